"""Distance-vector routing simulator with entanglement-assisted failure notification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ._core import (
    InvalidStateError,
    IoError,
    JointState,
    LifecycleError,
    ParseError,
    apply_projector,
    basis_state,
    bell_pair,
    expectation,
    measure_sample,
    replay_metrics,
    run_scenario,
    tensor,
)

__all__ = [
    "InvalidStateError",
    "IoError",
    "JointState",
    "LifecycleError",
    "ParseError",
    "RunOutput",
    "apply_projector",
    "basis_state",
    "bell_pair",
    "expectation",
    "measure_sample",
    "replay_metrics",
    "run",
    "run_file",
    "run_scenario",
    "tensor",
]


@dataclass(frozen=True)
class RunOutput:
    trace_text: str
    metrics_text: str
    tables: dict

    @property
    def metrics(self) -> dict:
        return json.loads(self.metrics_text)

    @property
    def trace(self) -> list[dict]:
        return [json.loads(line) for line in self.trace_text.splitlines()]


def run(text: str, *, seed: int | None = None, max_rounds: int | None = None,
        variant: str | None = None) -> RunOutput:
    out = run_scenario(text, seed=seed, max_rounds=max_rounds, variant=variant)
    return RunOutput(out["trace"], out["metrics"], out["tables"])


def run_file(path: str | Path, **overrides) -> RunOutput:
    return run(Path(path).read_text(), **overrides)
