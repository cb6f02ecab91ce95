# Evaluation throughput harness

from .bench_harness import (
    BenchConfig,
    BenchReport,
    BenchRow,
    BenchTimeout,
    ChecksumMismatch,
    MismatchedConfigs,
    SpeedupRow,
    bench_report_from_dict,
    jitter_frame,
    load_bench_report,
    render_speedup_table,
    run_bench,
    speedup_table,
    synthetic_activity,
    synthetic_scene,
)

__all__ = [
    'BenchConfig',
    'BenchReport',
    'BenchRow',
    'BenchTimeout',
    'ChecksumMismatch',
    'MismatchedConfigs',
    'SpeedupRow',
    'bench_report_from_dict',
    'jitter_frame',
    'load_bench_report',
    'render_speedup_table',
    'run_bench',
    'speedup_table',
    'synthetic_activity',
    'synthetic_scene',
]
