"""Hamiltonian spectra: gap structure, symmetry classification, and the
operational speed limit they impose.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvalidDimensionError, ValidationError

__all__ = [
    "Spectrum",
    "parse_spectrum",
    "gap_set",
    "gap_table",
    "odd_odd_ratio",
    "StructureReport",
    "classify_structure",
    "oqsl",
]


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of a Hamiltonian, at least two distinct."""

    energies: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1:
            raise ValidationError("energies must be a 1-d sequence")
        if e.size < 2:
            raise InvalidDimensionError(f"need at least 2 levels, got {e.size}")
        if not np.all(np.isfinite(e)):
            raise ValidationError("energies must be finite")
        e = np.sort(e)
        if e[-1] <= e[0]:
            raise ValidationError("spectrum is degenerate, E_max must exceed E_min")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    @property
    def e_min(self) -> float:
        return float(self.energies[0])

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])

    @property
    def width(self) -> float:
        return self.e_max - self.e_min

    def hamiltonian(self) -> np.ndarray:
        """The diagonal matrix in the energy eigenbasis."""
        return np.diag(self.energies.astype(complex))


def parse_spectrum(text: str) -> Spectrum:
    """Parse '0,1,3.5' or a JSON array like '[0, 1, 3.5]'."""
    text = text.strip()
    try:
        values = json.loads(text)
    except json.JSONDecodeError:
        values = [part for part in text.split(",") if part.strip()]
    try:
        return Spectrum(np.array([float(v) for v in values], dtype=float))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"cannot parse spectrum from {text!r}") from exc


def gap_table(sp: Spectrum) -> list[tuple[float, int, int]]:
    """All level gaps as (gap, j, k) with j > k, sorted by gap size."""
    e = sp.energies
    out = [
        (float(e[j] - e[k]), j, k)
        for j in range(1, sp.dim)
        for k in range(j)
    ]
    out.sort(key=lambda row: (row[0], row[1], row[2]))
    return out


def gap_set(sp: Spectrum) -> np.ndarray:
    """The gap multiset in ascending order."""
    return np.array([g for g, _, _ in gap_table(sp)])


def odd_odd_ratio(a: float, b: float, max_den: int = 999, tol: float = 1e-9) -> bool:
    """True when a/b is (within tol) a ratio of two odd integers.

    The candidate rational comes from the best approximation with
    denominator at most max_den; ratios that need a larger denominator
    are treated as irrational.
    """
    if a <= 0 or b <= 0:
        raise DomainError("gap ratios need positive gaps")
    x = a / b
    frac = Fraction(x).limit_denominator(max_den)
    if frac.numerator <= 0:
        return False
    if abs(x - float(frac)) > tol:
        return False
    return frac.numerator % 2 == 1 and frac.denominator % 2 == 1


@dataclass(frozen=True)
class StructureReport:
    """Structural facts about a spectrum that control pi-reachability."""

    equally_spaced: bool
    symmetric: bool
    odd_ratio_condition: bool
    min_gap: float
    max_gap: float


def classify_structure(
    sp: Spectrum, max_den: int = 999, tol: float = 1e-9
) -> StructureReport:
    """Classify spacing, mirror symmetry, and the odd-ratio condition.

    odd_ratio_condition is True when no two gaps (counted per level
    pair, so repeated values count) stand in an odd/odd rational ratio.
    Spectra with that property admit no multi-pair state reaching the
    opposite Bloch direction, which pins down the reachable set exactly.
    """
    e = sp.energies
    scale = sp.width
    diffs = np.diff(e)
    equally = bool(np.all(np.abs(diffs - diffs[0]) <= tol * scale))
    total = e[0] + e[-1]
    symmetric = bool(
        np.all(np.abs((e + e[::-1]) - total) <= tol * scale)
    )
    gaps = gap_set(sp)
    condition = True
    for i in range(gaps.size):
        for j in range(i + 1, gaps.size):
            if gaps[i] <= 0 or gaps[j] <= 0:
                continue
            if odd_odd_ratio(gaps[j], gaps[i], max_den=max_den, tol=tol):
                condition = False
                break
        if not condition:
            break
    positive = gaps[gaps > 0]
    return StructureReport(
        equally_spaced=equally,
        symmetric=symmetric,
        odd_ratio_condition=condition,
        min_gap=float(positive[0]) if positive.size else 0.0,
        max_gap=float(gaps[-1]),
    )


def oqsl(sp: Spectrum, theta: float) -> float:
    """Operational speed limit Theta / (E_max - E_min) for Theta in (0, pi]."""
    if not 0.0 < theta <= np.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    return float(theta) / sp.width
