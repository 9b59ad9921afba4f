"""Dipolar coupling matrices for the model spin clusters.

All couplings are dimensionless, in units of the nearest-neighbour coupling
``D1``; times elsewhere in the package are in units of ``1/D1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import DEFAULT_MAX_SPINS, check_spin_count
from .errors import (
    CouplingConflictError,
    CouplingParseError,
    DomainError,
    SpinIndexError,
    ValidationError,
)

# Proton couplings of cyclopentane, high-temperature limit (units of D_11').
CYCLOPENTANE_CONSTANTS = {
    "geminal": 1.0,       # D_11'
    "vicinal": -0.178,    # D_12
    "vicinal_x": -0.002,  # D_12'
    "remote": -0.093,     # D_13
    "remote_x": 0.026,    # D_13'
}


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Spin count plus symmetric coupling matrix with zero diagonal."""

    n_spins: int
    couplings: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        d = np.array(self.couplings, dtype=float)
        if d.shape != (self.n_spins, self.n_spins):
            raise ValidationError(
                f"coupling matrix shape {d.shape} does not match n_spins={self.n_spins}"
            )
        if not np.all(np.isfinite(d)):
            raise ValidationError("coupling matrix has non-finite entries")
        if np.any(np.diag(d) != 0.0):
            raise ValidationError("coupling matrix must have a zero diagonal")
        if np.any(d != d.T):
            raise ValidationError("coupling matrix must be symmetric")
        d.setflags(write=False)
        object.__setattr__(self, "couplings", d)

    def pairs(self):
        """Yield ``(j, k, D_jk)`` over 0-based ``j < k`` with nonzero coupling."""
        n = self.n_spins
        for j in range(n):
            for k in range(j + 1, n):
                if self.couplings[j, k] != 0.0:
                    yield j, k, float(self.couplings[j, k])


def _from_function(n_spins, fn, label):
    d = np.zeros((n_spins, n_spins))
    for j in range(n_spins):
        for k in range(j + 1, n_spins):
            d[j, k] = d[k, j] = fn(j, k)
    return SpinSystem(n_spins, d, label)


def coupling_from_geometry(r: float, theta: float, gamma: float = 1.0, hbar: float = 1.0) -> float:
    """Dipolar constant ``gamma**2 * hbar / (2 r**3) * (1 - 3 cos(theta)**2)``.

    ``theta`` is the angle (radians) between the internuclear vector and the
    static field.
    """
    if not r > 0:
        raise DomainError(f"internuclear distance must be positive, got {r!r}")
    return gamma**2 * hbar / (2.0 * r**3) * (1.0 - 3.0 * math.cos(theta) ** 2)


def ring_couplings(n_spins: int, d1: float = 1.0, max_spins: int = DEFAULT_MAX_SPINS) -> SpinSystem:
    """Regular ring in a field normal to its plane.

    Chord length scales as ``sin(pi*|k-j|/N)``, so
    ``D_jk = d1 * (sin(pi/N) / sin(pi*(k-j)/N))**3``.
    """
    check_spin_count(n_spins, max_spins, minimum=2)
    s1 = math.sin(math.pi / n_spins)

    def fn(j, k):
        # sin is symmetric about N/2, so the (k - j) and N - (k - j) chords agree
        sep = min(k - j, n_spins - (k - j))
        return d1 * (s1 / math.sin(math.pi * sep / n_spins)) ** 3

    return _from_function(n_spins, fn, f"ring-{n_spins}")


def chain_couplings(n_spins: int, d1: float = 1.0, max_spins: int = DEFAULT_MAX_SPINS) -> SpinSystem:
    """Uniformly spaced linear chain, ``D_jk = d1 / |j - k|**3``."""
    check_spin_count(n_spins, max_spins, minimum=2)
    return _from_function(n_spins, lambda j, k: d1 / abs(j - k) ** 3, f"chain-{n_spins}")


def rectangle_couplings() -> SpinSystem:
    """Four ring protons of 1-chloro-4-nitrobenzene."""
    values = {
        (0, 1): 1.0, (2, 3): 1.0,
        (0, 2): 1.0 / 8.0, (1, 3): 1.0 / 8.0,
        (0, 3): 1.0 / (3.0 * math.sqrt(3.0)), (1, 2): 1.0 / (3.0 * math.sqrt(3.0)),
    }
    return _from_function(4, lambda j, k: values[(j, k)], "rectangle")


def cyclopentane_couplings(constants: dict | None = None) -> SpinSystem:
    """Ten protons of cyclopentane, two per carbon.

    Spin ``2c - 1`` is the unprimed and ``2c`` the primed proton on carbon
    ``c`` (1-based).  Carbon separation is cyclic on the five-membered ring.
    Same-side pairs on adjacent carbons get ``D_12``, opposite-side pairs
    ``D_12'``; the same split applies at separation two with ``D_13``/``D_13'``.
    """
    c = dict(CYCLOPENTANE_CONSTANTS)
    if constants:
        unknown = set(constants) - set(c)
        if unknown:
            raise ValueError(f"unknown cyclopentane constants: {sorted(unknown)}")
        c.update(constants)

    def fn(a, b):
        ca, cb = divmod(a, 2), divmod(b, 2)
        sep = abs(ca[0] - cb[0])
        sep = min(sep, 5 - sep)
        same_side = ca[1] == cb[1]
        if sep == 0:
            return c["geminal"]
        if sep == 1:
            return c["vicinal"] if same_side else c["vicinal_x"]
        return c["remote"] if same_side else c["remote_x"]

    return _from_function(10, fn, "cyclopentane")


def load_couplings(path, n_spins: int, max_spins: int = DEFAULT_MAX_SPINS, label=None) -> SpinSystem:
    """Read ``j,k,value`` triples (1-based indices) from a text file.

    Blank lines and lines starting with ``#`` are skipped.  Pairs that are not
    listed are uncoupled.  A pair listed twice must carry the same value in
    both places, in either index order.

    Raises:
        CouplingParseError: malformed line (message carries the line number).
        SpinIndexError: index outside ``[1, n_spins]`` or ``j == k``.
        CouplingConflictError: one pair given two different values.
    """
    check_spin_count(n_spins, max_spins)
    path = Path(path)
    d = np.zeros((n_spins, n_spins))
    seen = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise CouplingParseError(path, lineno, f"expected 'j,k,value', got {line!r}")
            try:
                j, k = int(parts[0]), int(parts[1])
                value = float(parts[2])
            except ValueError:
                raise CouplingParseError(path, lineno, f"cannot parse {line!r}") from None
            if not math.isfinite(value):
                raise CouplingParseError(path, lineno, f"non-finite coupling {parts[2]!r}")
            for idx in (j, k):
                if not 1 <= idx <= n_spins:
                    raise SpinIndexError(
                        f"{path}:{lineno}: spin index {idx} outside [1, {n_spins}]"
                    )
            if j == k:
                raise SpinIndexError(f"{path}:{lineno}: self-coupling {j},{k} not allowed")
            key = (min(j, k), max(j, k))
            if key in seen and seen[key][0] != value:
                raise CouplingConflictError(
                    f"{path}:{lineno}: pair {key} given {value} here but "
                    f"{seen[key][0]} on line {seen[key][1]}"
                )
            seen[key] = (value, lineno)
            d[j - 1, k - 1] = d[k - 1, j - 1] = value
    return SpinSystem(n_spins, d, label or path.stem)
