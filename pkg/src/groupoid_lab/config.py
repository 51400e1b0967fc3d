"""Central tolerance and seed record for all floating-point work."""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace

__all__ = ["Tolerances", "get", "override"]


@dataclass(frozen=True)
class Tolerances:
    power_rel_tol: float = 1e-12
    power_max_iter: int = 100_000
    jacobi_off_tol: float = 1e-12
    hermitian_tol: float = 1e-12
    # eigenvalue clustering and rank decisions in block decomposition
    rank_tol: float = 1e-9
    projection_tol: float = 1e-12
    unitary_tol: float = 1e-10
    probe_seed: int = 0x5EED


_current = Tolerances()


def get() -> Tolerances:
    return _current


def set_tolerances(tol: Tolerances) -> None:
    global _current
    _current = tol


@contextlib.contextmanager
def override(**changes):
    """Temporarily replace fields of the tolerance record."""
    global _current
    saved = _current
    _current = replace(_current, **changes)
    try:
        yield _current
    finally:
        _current = saved
