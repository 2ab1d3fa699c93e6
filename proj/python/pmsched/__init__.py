"""Total tardiness scheduling on flexible parallel machines.

Schedules cross the boundary as lists of placement dicts
({"operation", "machine", "setup", "start", "completion"}), using the
external ids of the instance.
"""

import json

from ._pmsched import (
    DesignError,
    FormatError,
    Instance,
    InstanceError,
    effect_to_ratio,
    f_critical,
    generate_instance,
    initial_temperature,
    log_tardiness,
)
from . import _pmsched

__all__ = [
    "DesignError",
    "FormatError",
    "Instance",
    "InstanceError",
    "effect_to_ratio",
    "f_critical",
    "generate_instance",
    "initial_temperature",
    "log_tardiness",
    "load_instance",
    "metrics",
    "run_lta",
    "run_sa",
    "solve",
    "validate",
]


def load_instance(path):
    with open(path) as f:
        return Instance.from_json(f.read())


def run_lta(instance, rule="atcoee", k1=10.0, k2=1.0, k3=10.0, machine_policy="auto", seed=0):
    return json.loads(_pmsched.run_lta(instance, rule, k1, k2, k3, machine_policy, seed))


def run_sa(instance, initial, structure="op_pa", cooling=0.95, max_iterations=15000, seed=0):
    out = _pmsched.run_sa(instance, json.dumps(initial), structure, cooling, max_iterations, seed)
    out["schedule"] = json.loads(out["schedule"])
    return out


def solve(instance, algorithm="atcoee.10.1", seed=0):
    return json.loads(_pmsched.solve(instance, algorithm, seed))


def validate(instance, schedule):
    return _pmsched.validate(instance, json.dumps(schedule))


def metrics(instance, schedule):
    return _pmsched.metrics(instance, json.dumps(schedule))
