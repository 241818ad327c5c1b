"""Lipschitz selections on sampled metric spaces.

Structured inputs (spaces, bodies, correspondences) are plain dicts in the
same JSON layout the command-line tool reads.
"""

import json

import numpy as np

from . import _lipselect
from ._lipselect import Error, RightInverse, cantor_function, openness_constant

__all__ = [
    "Error",
    "RightInverse",
    "cantor_function",
    "openness_constant",
    "separation_hierarchy",
    "greedy_separation",
    "project",
    "select",
    "plip",
    "run_cli",
]


def _doc(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def separation_hierarchy(space, rounds):
    return json.loads(_lipselect.separation_hierarchy(_doc(space), rounds))


def greedy_separation(space, r):
    return _lipselect.greedy_separation(_doc(space), r)


def project(body, y):
    return _lipselect.project(_doc(body), np.asarray(y, dtype=float))


def select(correspondence, f0, alpha, beta, rounds=4, epsilon=None):
    """Run the iteration; returns the sequence document with a
    "verification" entry. Tables come back as numpy arrays."""
    f0 = np.asarray(f0, dtype=float)
    out = json.loads(_lipselect.select(_doc(correspondence), f0, alpha, beta, rounds, epsilon))
    out["selections"] = [np.asarray(t, dtype=float) for t in out["selections"]]
    return out


def plip(space, values, point, radii=(), k=3):
    return _lipselect.plip(_doc(space), np.asarray(values, dtype=float), point, list(radii), k)


def run_cli(command, **options):
    """Same as the lipselect executable; returns (exit code, report, log)."""
    options = {k: str(v) if hasattr(v, "__fspath__") else v for k, v in options.items()}
    return _lipselect.run_cli(command, options)
