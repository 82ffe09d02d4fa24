"""Python front end for the recbench C++ core."""

import json
import os
import sys

from . import _recbench
from ._recbench import (
    RecbenchError,
    aggregate_rounds,
    expected_improvement,
    hr_at_n,
    hyperband_schedule,
    ndcg_at_n,
    sample_unit,
)

__all__ = [
    "RecbenchError",
    "aggregate_rounds",
    "decode_unit",
    "expected_improvement",
    "hr_at_n",
    "hyperband_schedule",
    "main",
    "ndcg_at_n",
    "report",
    "run_experiment",
    "sample_unit",
]


def decode_unit(model, u):
    """Maps a unit-cube vector to a config dict of the model's default space."""
    return json.loads(_recbench.decode_unit_json(model, list(u)))


def run_experiment(config, out_dir, base_dir=""):
    """Runs an experiment described by a config dict and returns its report."""
    return json.loads(_recbench.run_experiment_json(json.dumps(config), os.fspath(out_dir), os.fspath(base_dir)))


def report(log_path):
    """Summarizes a trials.jsonl log: counts and mean/std per metric."""
    return json.loads(_recbench.report_json(os.fspath(log_path)))


def main(argv=None):
    args = list(sys.argv[1:] if argv is None else argv)
    return _recbench.cli(args)
