#!/usr/bin/env python3
"""
Движок бытовых активностей BDDL: единая точка входа.

Подкоманды:
    validate  - разбор BDDL файлов с диагностикой строка:столбец
    classify  - классификация активностей (только кинематические предикаты или нет)
    sample    - сэмплирование сцены, удовлетворяющей :init
    evaluate  - оценка цели на готовой сцене
    replay    - покадровая оценка траектории (JSON Lines)
    bench     - замер пропускной способности оценки по числу воркеров
    stats     - таблица статистики ассетов

Машинный вывод идёт в stdout (JSON / JSON Lines / таблицы), логи - в stderr.
Коды возврата: 0 - успех, 1 - ошибка движка, 2 - ошибка использования.
"""

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

# Добавляем пути для импорта
sys.path.insert(0, str(Path(__file__).parent))

from benchmarks.bench_harness import (
    BenchConfig,
    load_bench_report,
    render_speedup_table,
    run_bench,
    speedup_table,
    synthetic_activity,
    synthetic_scene,
)
from evaluators.logic import check_init, compile_condition, score_goal
from parsers.bddl_parser import discover_activities, load_activity
from parsers.classifier import classify_files
from samplers.instance_sampler import (
    load_object_library,
    load_presampled,
    load_scope_file,
    sample_instance,
)
from utils.base_command import CommandReport, create_arg_parser, setup_logging
from utils.config_loader import DATA_DIR, EngineConfig, load_engine_config
from utils.errors import EngineError
from utils.manifest import (
    Manifest,
    load_manifest_file,
    manifest_row_from_scenes,
    render_manifest,
)
from world.scene import iter_trajectory, load_scene_file, replay_snapshots
from world.taxonomy import load_taxonomy_file

logger = logging.getLogger('engine')


def _emit(data) -> None:
    sys.stdout.write(json.dumps(data, sort_keys=False) + '\n')


def _expand_paths(paths: List[str]) -> List[Path]:
    """Директории раскрываются в <dir>/<activity>/problem*.bddl."""
    expanded = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            expanded.extend(discover_activities(path))
        else:
            expanded.append(path)
    return expanded


# === подкоманды ===

def cmd_validate(args, config: EngineConfig, report: CommandReport) -> int:
    results = []
    for path in _expand_paths(args.paths):
        report.inputs.append(str(path))
        try:
            load_activity(path)
            results.append({'path': str(path), 'ok': True, 'error': None})
        except (EngineError, OSError, UnicodeDecodeError) as e:
            message = f"{path}:{e}"
            report.errors.append(message)
            logger.error(f"❌ {message}")
            results.append({'path': str(path), 'ok': False, 'error': str(e)})
    valid = sum(1 for r in results if r['ok'])
    _emit({'files': results, 'valid': valid, 'total': len(results)})
    return 0 if valid == len(results) else 1


def cmd_classify(args, config: EngineConfig, report: CommandReport) -> int:
    supported = config.kinematic_predicates
    if args.predicates:
        supported = frozenset(p.strip().lower() for p in args.predicates.split(',') if p.strip())
    paths = _expand_paths(args.paths)
    report.inputs.extend(str(p) for p in paths)
    results = classify_files(paths, supported)
    for result in results:
        if result.error:
            report.warnings.append(f"{result.path}: {result.error}")
    kinematic = sum(1 for r in results if r.kinematic_only)
    _emit({
        'activities': [r.to_dict() for r in results],
        'kinematic_only': kinematic,
        'total': len(results),
        'summary': f"{kinematic} of {len(results)} kinematic-only",
    })
    return 0


def cmd_sample(args, config: EngineConfig, report: CommandReport) -> int:
    activity = load_activity(args.activity)
    scene = load_scene_file(args.scene)
    taxonomy = load_taxonomy_file(config.taxonomy_path)
    library = load_object_library(config.object_library_path)
    params = config.sampler_params
    if args.seed is not None:
        params = replace(params, seed=args.seed)
    report.inputs.extend([args.activity, args.scene])

    instance = sample_instance(activity, scene, taxonomy, params, library, config.predicate_params)
    instance.write(args.out_scene, args.out_scope)
    report.outputs.extend([args.out_scene, args.out_scope])

    init_report = check_init(activity, instance.scope, taxonomy, instance.scene, config.predicate_params)
    _emit({
        'activity': activity.name,
        'seed': params.seed,
        'scene': args.out_scene,
        'scope': args.out_scope,
        'init': init_report.to_dict(),
    })
    return 0


def cmd_evaluate(args, config: EngineConfig, report: CommandReport) -> int:
    activity = load_activity(args.activity)
    taxonomy = load_taxonomy_file(config.taxonomy_path)
    report.inputs.extend([args.activity, args.scene, args.scope])

    instance = load_presampled(args.scene, args.scope, activity, taxonomy,
                               config.predicate_params, strict=config.strict or args.strict)
    report.warnings.extend(instance.warnings)
    if args.init:
        result = check_init(activity, instance.scope, taxonomy, instance.scene, config.predicate_params)
    else:
        compiled = compile_condition(activity.goal, instance.scope, taxonomy, instance.scene)
        result = score_goal(compiled, instance.scene, config.predicate_params)
    _emit(result.to_dict())
    return 0


def cmd_replay(args, config: EngineConfig, report: CommandReport) -> int:
    activity = load_activity(args.activity)
    taxonomy = load_taxonomy_file(config.taxonomy_path)
    scene = load_scene_file(args.scene)
    scope = load_scope_file(args.scope)
    scope.validate(scene)
    report.inputs.extend([args.activity, args.scene, args.scope, args.trajectory])

    compiled = compile_condition(activity.goal, scope, taxonomy, scene)
    frames = 0
    first_success = None
    last = None
    for t, snapshot in replay_snapshots(scene, iter_trajectory(args.trajectory)):
        if args.stop is not None and t >= args.stop:
            break
        if t < args.start:
            continue
        last = score_goal(compiled, snapshot, config.predicate_params)
        logger.debug(f"кадр {t}: q={last.q_score:.3f}")
        frames += 1
        if last.satisfied and first_success is None:
            first_success = t
        _emit({'t': t, **last.to_dict()})

    _emit({'summary': {
        'frames': frames,
        'satisfied': bool(last and last.satisfied),
        'final_q_score': last.q_score if last else None,
        'first_success_frame': first_success,
    }})
    return 0


def cmd_bench(args, config: EngineConfig, report: CommandReport) -> int:
    try:
        workers = sorted(int(w) for w in args.workers.split(','))
    except ValueError:
        raise EngineError(f"--workers expects comma-separated integers, got {args.workers!r}") from None

    if args.activity:
        activity = load_activity(args.activity)
        scene = load_scene_file(args.scene)
        scope = load_scope_file(args.scope)
        scope.validate(scene)
        taxonomy = load_taxonomy_file(config.taxonomy_path)
        report.inputs.extend([args.activity, args.scene, args.scope])
    try:
        if not args.activity:
            scene = synthetic_scene(args.objects, args.seed)
            activity, scope = synthetic_activity(scene)
            taxonomy = None
        bench_config = BenchConfig(
            workers=tuple(workers),
            frames_per_worker=args.frames,
            scene=scene,
            activity=activity,
            scope=scope,
            taxonomy=taxonomy,
            seed=args.seed,
            duration_cap=args.duration_cap,
            params=config.predicate_params,
            use_threads=args.threads,
        )
    except ValueError as e:
        raise EngineError(str(e)) from None

    result = run_bench(bench_config)
    sys.stdout.write(result.render_table())
    if args.json:
        Path(args.json).parent.mkdir(parents=True, exist_ok=True)
        Path(args.json).write_text(result.to_json(), encoding='utf-8')
        report.outputs.append(args.json)
    if args.compare:
        baseline = load_bench_report(args.compare)
        sys.stdout.write(render_speedup_table(speedup_table(baseline, result)))
    return 0


def cmd_stats(args, config: EngineConfig, report: CommandReport) -> int:
    rows = []
    if args.manifest or not args.scenes:
        manifest_path = args.manifest or str(DATA_DIR / 'manifest.json')
        report.inputs.append(manifest_path)
        rows.extend(load_manifest_file(manifest_path).rows)
    if args.scenes:
        report.inputs.extend(args.scenes)
        scenes = [load_scene_file(path) for path in args.scenes]
        rows.append(manifest_row_from_scenes(args.name, scenes))
    sys.stdout.write(render_manifest(Manifest(tuple(rows)), markdown=args.markdown))
    return 0


COMMANDS = {
    'validate': cmd_validate,
    'classify': cmd_classify,
    'sample': cmd_sample,
    'evaluate': cmd_evaluate,
    'replay': cmd_replay,
    'bench': cmd_bench,
    'stats': cmd_stats,
}


def build_parser():
    parser = create_arg_parser(
        description="Движок бытовых активностей BDDL",
        epilog="""
Примеры использования:
  python engine.py validate data/activities
  python engine.py classify data/activities --predicates ontop,inside,nextto
  python engine.py sample data/activities/setting_the_table/problem0.bddl data/scenes/apartment_0.json \\
      --seed 3 --out-scene out/scene.json --out-scope out/scope.json
  python engine.py evaluate problem0.bddl out/scene.json out/scope.json
  python engine.py replay problem0.bddl scene.json scope.json trajectory.jsonl --stop 50
  python engine.py bench --workers 1,16,64 --frames 1000 --seed 0 --json out/bench.json
  python engine.py stats --markdown
        """
    )
    parser.add_argument('--report', help='Сохранить JSON-отчёт о выполнении команды')
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='command')

    validate = subparsers.add_parser('validate', help='Проверить BDDL файлы')
    validate.add_argument('paths', nargs='+', help='BDDL файлы или директории корпуса')

    classify = subparsers.add_parser('classify', help='Классифицировать активности')
    classify.add_argument('paths', nargs='+', help='BDDL файлы или директории корпуса')
    classify.add_argument('--predicates', help='Поддерживаемые предикаты через запятую (переопределяет конфиг)')

    sample = subparsers.add_parser('sample', help='Сэмплировать экземпляр активности')
    sample.add_argument('activity', help='BDDL файл')
    sample.add_argument('scene', help='Базовая сцена (JSON)')
    sample.add_argument('--seed', type=int, help='Seed (переопределяет SAMPLER_SEED)')
    sample.add_argument('--out-scene', required=True, help='Куда записать сцену')
    sample.add_argument('--out-scope', required=True, help='Куда записать привязки термов')

    evaluate = subparsers.add_parser('evaluate', help='Оценить цель на сцене')
    evaluate.add_argument('activity', help='BDDL файл')
    evaluate.add_argument('scene', help='Сцена (JSON)')
    evaluate.add_argument('scope', help='Привязки термов (JSON)')
    evaluate.add_argument('--init', action='store_true', help='Оценить :init вместо :goal')
    evaluate.add_argument('--strict', action='store_true', help='Ошибка, если :init сцены нарушен')

    replay = subparsers.add_parser('replay', help='Покадровая оценка траектории')
    replay.add_argument('activity', help='BDDL файл')
    replay.add_argument('scene', help='Базовая сцена (JSON)')
    replay.add_argument('scope', help='Привязки термов (JSON)')
    replay.add_argument('trajectory', help='Траектория (JSON Lines)')
    replay.add_argument('--start', type=int, default=0, help='Первый выводимый кадр')
    replay.add_argument('--stop', type=int, help='Остановиться перед этим кадром')

    bench = subparsers.add_parser('bench', help='Замер пропускной способности')
    bench.add_argument('--workers', default='1', help='Числа воркеров через запятую (например 1,16,64)')
    bench.add_argument('--frames', type=int, default=100, help='Кадров на воркера')
    bench.add_argument('--seed', type=int, default=0, help='Seed потока кадров')
    bench.add_argument('--objects', type=int, default=100, help='Размер синтетической сцены')
    bench.add_argument('--activity', help='BDDL файл вместо синтетической нагрузки')
    bench.add_argument('--scene', help='Сцена для --activity')
    bench.add_argument('--scope', help='Привязки термов для --activity')
    bench.add_argument('--duration-cap', type=float, help='Лимит времени на строку, сек')
    bench.add_argument('--threads', action='store_true', help='Потоки вместо процессов')
    bench.add_argument('--json', help='Записать JSON-отчёт')
    bench.add_argument('--compare', help='JSON-отчёт базовой линии для таблицы ускорений')

    stats = subparsers.add_parser('stats', help='Статистика ассетов')
    stats.add_argument('manifest', nargs='?', help='Манифест (по умолчанию data/manifest.json)')
    stats.add_argument('--markdown', action='store_true', help='Markdown с жирными максимумами')
    stats.add_argument('--scenes', nargs='+', help='Посчитать строку по файлам сцен')
    stats.add_argument('--name', default='scenes', help='Имя строки для --scenes')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == 'bench' and args.activity and not (args.scene and args.scope):
        parser.error('bench --activity requires --scene and --scope')

    setup_logging('engine', 'DEBUG' if args.verbose else 'INFO')
    report = CommandReport(command=args.command)
    try:
        config = load_engine_config(args.config)
        if not args.verbose:
            setup_logging('engine', config.log_level)
        logger.debug(f"Конфигурация: {config.loaded_from or 'значения по умолчанию'}")
        code = COMMANDS[args.command](args, config, report)
    except EngineError as e:
        report.errors.append(str(e))
        sys.stderr.write(f"{e}\n")
        code = e.exit_code
    except OSError as e:
        report.errors.append(str(e))
        sys.stderr.write(f"{e}\n")
        code = 1
    except UnicodeDecodeError as e:
        message = f"input is not valid UTF-8 text: {e.reason} at byte {e.start}"
        report.errors.append(message)
        sys.stderr.write(f"{message}\n")
        code = 1

    report.finish().log_summary(logger)
    if args.report:
        report.save(args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
