"""Simulator and detector for RRC signaling storms."""

from ._core import (
    availability_rate,
    classify,
    drop_time_ms,
    full_model,
    latency_campaign,
    preset_names,
    read_trace,
    run_stream,
    simulate,
    table1,
    truncated_poisson_samples,
    write_trace,
)

__all__ = [
    "availability_rate",
    "classify",
    "drop_time_ms",
    "full_model",
    "latency_campaign",
    "preset_names",
    "read_trace",
    "run_stream",
    "simulate",
    "table1",
    "truncated_poisson_samples",
    "write_trace",
]
