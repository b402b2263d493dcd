"""Exact genus-zero Gromov-Witten engine: correlator reconstruction via the
WDVV equation, truncated potentials and the big quantum product."""

from gwzero._core import (
    MissingSeedsError,
    Potential,
    Table,
    Target,
    UnknownCorrelatorError,
    load_target,
    parse_target,
    potential,
    qmul,
    reconstruct,
)

__all__ = [
    "MissingSeedsError",
    "Potential",
    "Table",
    "Target",
    "UnknownCorrelatorError",
    "load_target",
    "parse_target",
    "potential",
    "qmul",
    "reconstruct",
]
