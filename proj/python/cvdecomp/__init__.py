"""Decomposition of bosonic polynomial Hamiltonians into elementary CV gates."""

import json

from ._core import (
    BudgetError,
    ParseError,
    Polynomial,
    UnsupportedError,
    choose_order,
    commutator,
    naive_count,
    plan_text,
    verify_identity,
)
from . import _core

__all__ = [
    "BudgetError",
    "ParseError",
    "Polynomial",
    "UnsupportedError",
    "choose_order",
    "commutator",
    "compile",
    "library_scheme",
    "naive_count",
    "printed_table",
    "plan_text",
    "scheme_residual",
    "verify_identity",
    "verify_sequence",
]


def _poly(h):
    return h if isinstance(h, Polynomial) else Polynomial(h)


def compile(h, t, budget=1e-3, split_order=2):
    """Returns (sequence, report) as dicts for e^{i t H}."""
    seq, report = _core.compile_json(_poly(h), t, budget, split_order)
    return json.loads(seq), json.loads(report)


def verify_sequence(sequence, h, t, n, d=6):
    """Subspace distance between a sequence dict and e^{i t H}."""
    return _core.verify_sequence_json(json.dumps(sequence), _poly(h), t, n, d)


def printed_table(which):
    return json.loads(_core.printed_table_json(which))


def library_scheme(name):
    return json.loads(_core.library_scheme_json(name))


def scheme_residual(scheme):
    return _core.scheme_residual(json.dumps(scheme))
