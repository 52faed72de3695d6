"""Invariant-region workbench for reaction-diffusion systems.

Scenario functions accept a dict (or a JSON string) in the same schema as the
command-line tool and return plain dicts.
"""

import json as _json

from . import _core
from ._core import (
    ConvexSet,
    Error,
    HorizonExceeded,
    InsideSet,
    InteriorPoint,
    InvalidArgument,
    InvalidScenario,
    InvalidSet,
    LemmaPoint,
    ParseError,
    PreconditionViolated,
    dini_upper,
    find_lemma_point,
    geometric_steps,
)

__all__ = [
    "ConvexSet",
    "Error",
    "HorizonExceeded",
    "InsideSet",
    "InteriorPoint",
    "InvalidArgument",
    "InvalidScenario",
    "InvalidSet",
    "LemmaPoint",
    "ParseError",
    "PreconditionViolated",
    "check_tangency",
    "demo",
    "demo_names",
    "demo_scenario",
    "dini_upper",
    "find_lemma_point",
    "gauge_covariance_check",
    "geometric_steps",
    "run",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else _json.dumps(scenario)


def run(scenario, mode=None, seed=None, cadence=0, exit_threshold=None):
    """Solve a scenario; returns the verdict dict (status, worst_dist, hopf_records, ...)."""
    return _json.loads(_core.run(_text(scenario), mode, seed, cadence, exit_threshold))


def check_tangency(scenario, mode=None, seed=None):
    return _json.loads(_core.check_tangency(_text(scenario), mode, seed))


def demo_names():
    return list(_core.demo_names())


def demo_scenario(name):
    s = _core.demo_scenario(name)
    return None if s is None else _json.loads(s)


def demo(name):
    """Run a packaged demo; returns (exit_code, report_text)."""
    return _core.run_demo(name)


def gauge_covariance_check():
    diff, passed = _core.gauge_covariance_check()
    return {"max_difference": diff, "passed": passed}
