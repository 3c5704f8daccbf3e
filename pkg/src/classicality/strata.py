"""Kernel spectra, degeneracy types and eigenvalue densities per stratum.

The unitary orbit type of an N-level state is the partition of N recording
the eigenvalue multiplicities.  Partitions are partially ordered by block
refinement (the finer partition has the smaller isotropy group), with the
maximal torus ``(1,...,1)`` at the bottom and the full group ``(N)`` at the
top.  On the stratum with multiplicities ``k`` the joint eigenvalue density
of the Hilbert-Schmidt ensemble is

    prod_{i<j} (r_i - r_j)^(2 k_i k_j)   restricted to   sum_i k_i r_i = 1,

a Vandermonde power in the distinct eigenvalues.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DomainError
from .polyalg import SparsePolynomial, vandermonde_power_density
from .scalars import all_exact, format_decimal, format_rational, to_mpf

#: Two eigenvalues are treated as equal when they differ by less than this
#: relative tolerance; keeps classification stable under float moduli.
DEGENERACY_RTOL = 1e-10

#: Constraint residuals larger than this reject a spectrum outright.
SPECTRUM_ATOL = 1e-12


def _isotropy_label(multiplicities: tuple[int, ...]) -> str:
    n = sum(multiplicities)
    if multiplicities == (n,):
        return f"SU({n})"
    if all(k == 1 for k in multiplicities):
        return f"T^{n}"
    factors = []
    for k, group in itertools.groupby(multiplicities):
        count = len(list(group))
        factors.append(f"U({k})" + (f"^{count}" if count > 1 else ""))
    return "S(" + "x".join(factors) + ")"


@dataclass(frozen=True, order=True)
class DegeneracyType:
    """Partition of N encoding an isotropy class."""

    multiplicities: tuple[int, ...]
    label: str = field(compare=False, default="")

    def __post_init__(self):
        ks = self.multiplicities
        if not ks or any(int(k) != k or k < 1 for k in ks):
            raise DomainError(f"invalid multiplicities {ks}")
        if not self.label:
            object.__setattr__(self, "label", _isotropy_label(ks))

    @classmethod
    def of(cls, *multiplicities: int) -> "DegeneracyType":
        return cls(tuple(int(k) for k in multiplicities))

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def parts(self) -> int:
        return len(self.multiplicities)

    def is_regular(self) -> bool:
        return all(k == 1 for k in self.multiplicities)

    def is_full_group(self) -> bool:
        return len(self.multiplicities) == 1

    def __str__(self) -> str:
        return ",".join(str(k) for k in self.multiplicities)


@dataclass(frozen=True)
class KernelSpectrum:
    """Ordered eigenvalues of the quasiprobability kernel.

    Valid spectra satisfy ``sum(pi) == 1`` and ``sum(pi^2) == n`` (exactly
    in rational mode, to ``SPECTRUM_ATOL`` otherwise) and are sorted
    non-increasing.
    """

    n: int
    pi: tuple

    def __post_init__(self):
        if self.n < 2 or len(self.pi) != self.n:
            raise DomainError(f"need n>=2 values, got n={self.n}, {len(self.pi)} entries")
        res1, res2 = self.residuals()
        if abs(res1) > SPECTRUM_ATOL or abs(res2) > SPECTRUM_ATOL:
            raise DomainError(
                "spectrum violates the moment constraints: "
                f"sum(pi)-1={format_decimal(res1)}, "
                f"sum(pi^2)-n={format_decimal(res2)}")
        for i in range(self.n - 1):
            if self.pi[i] < self.pi[i + 1]:
                raise DomainError(
                    f"spectrum not sorted non-increasing: pi[{i+1}] < pi[{i+2}] "
                    f"({format_decimal(self.pi[i])} < {format_decimal(self.pi[i+1])})")

    @classmethod
    def from_values(cls, values) -> "KernelSpectrum":
        values = tuple(values)
        if not all_exact(values):
            values = tuple(to_mpf(v) for v in values)
        else:
            values = tuple(Fraction(v) for v in values)
        return cls(len(values), values)

    def residuals(self) -> tuple:
        s1 = sum(self.pi) - 1
        s2 = sum(p * p for p in self.pi) - self.n
        return s1, s2

    def is_exact(self) -> bool:
        return all_exact(self.pi)

    def degeneracy_pattern(self) -> DegeneracyType:
        """Multiplicity pattern of the kernel eigenvalues (informational)."""
        ks = []
        for value, group in itertools.groupby(
                self.pi, key=lambda v: _DegKey(v)):
            ks.append(len(list(group)))
        return DegeneracyType(tuple(ks))

    def to_json(self) -> list[str]:
        return [format_rational(p) or format_decimal(p) for p in self.pi]


class _DegKey:
    """Grouping key implementing the relative degeneracy tolerance."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __eq__(self, other):
        a, b = self.value, other.value
        return abs(a - b) <= DEGENERACY_RTOL * max(1, abs(a))


@dataclass(frozen=True)
class StateSpectrum:
    """Ordered eigenvalues of a density matrix: 1 >= r_1 >= ... >= r_N >= 0."""

    r: tuple

    def __post_init__(self):
        rs = self.r
        if len(rs) < 1:
            raise DomainError("empty spectrum")
        if abs(sum(rs) - 1) > SPECTRUM_ATOL:
            raise DomainError("state eigenvalues must sum to 1")
        if any(rs[i] < rs[i + 1] for i in range(len(rs) - 1)) or rs[-1] < -SPECTRUM_ATOL:
            raise DomainError("state eigenvalues must be sorted non-increasing and >= 0")

    @property
    def n(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class StratumDensity:
    """Expanded eigenvalue density on a stratum plus its weight constraint."""

    degeneracy: DegeneracyType
    polynomial: SparsePolynomial
    weight_constraint: tuple[int, ...]


def stratum_density(deg: DegeneracyType) -> StratumDensity:
    """Vandermonde power density for the given multiplicities.

    The polynomial is in the ``s`` distinct eigenvalues; the constraint
    ``sum_i k_i r_i = 1`` is returned as the coefficient tuple.
    """
    poly = vandermonde_power_density(deg.multiplicities)
    return StratumDensity(deg, poly, deg.multiplicities)


def degeneracy_orbit(deg: DegeneracyType) -> list[tuple[int, ...]]:
    """All distinct reorderings of the multiplicity vector, sorted descending."""
    perms = set(itertools.permutations(deg.multiplicities))
    return sorted(perms, reverse=True)


# -- partitions and their partial order -------------------------------------


def _partitions(n: int, cap: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return out


def enumerate_strata(n: int) -> list[DegeneracyType]:
    """All partitions of ``n``, finest (maximal torus) first.

    The list is sorted by decreasing number of parts, then lexicographically,
    which is a linear extension of the refinement order.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    parts = _partitions(n, n)
    parts.sort(key=lambda p: (-len(p), p))
    return [DegeneracyType(p) for p in parts]


def refines(fine: tuple[int, ...], coarse: tuple[int, ...]) -> bool:
    """True when ``fine`` can be grouped into blocks summing to ``coarse``.

    This is exactly the condition for the block-diagonal unitary subgroup of
    ``fine`` to embed into the one of ``coarse``.
    """
    if sum(fine) != sum(coarse):
        return False
    fine = tuple(sorted(fine, reverse=True))
    coarse = tuple(sorted(coarse, reverse=True))
    if fine == coarse:
        return True

    def assign(remaining: tuple[int, ...], targets: tuple[int, ...]) -> bool:
        if not targets:
            return not remaining
        target, rest = targets[0], targets[1:]
        # choose a sub-multiset of `remaining` summing to `target`
        seen = set()
        items = list(remaining)

        def pick(idx: int, need: int, chosen: tuple[int, ...]) -> bool:
            if need == 0:
                left = list(items)
                for c in chosen:
                    left.remove(c)
                key = tuple(sorted(left))
                if key in seen:
                    return False
                seen.add(key)
                return assign(tuple(left), rest)
            if idx >= len(items) or need < 0:
                return False
            # skip duplicates at the same recursion depth
            if pick(idx + 1, need - items[idx], chosen + (items[idx],)):
                return True
            nxt = idx + 1
            while nxt < len(items) and items[nxt] == items[idx]:
                nxt += 1
            return pick(nxt, need, chosen)

        return pick(0, target, ())

    return assign(fine, coarse)


def hasse_less(a: DegeneracyType, b: DegeneracyType) -> bool:
    """Strict order: the isotropy class of ``a`` sits below the one of ``b``."""
    return a.multiplicities != b.multiplicities and refines(
        a.multiplicities, b.multiplicities)


def hasse_covers(n: int) -> list[tuple[DegeneracyType, DegeneracyType]]:
    """Covering pairs (a < b with nothing in between) of the refinement order."""
    strata = enumerate_strata(n)
    pairs = []
    for a in strata:
        for b in strata:
            if not hasse_less(a, b):
                continue
            if any(hasse_less(a, c) and hasse_less(c, b) for c in strata):
                continue
            pairs.append((a, b))
    return pairs


def maximal_chains(n: int) -> list[list[DegeneracyType]]:
    """All maximal chains from the torus partition to the full group."""
    covers = hasse_covers(n)
    strata = enumerate_strata(n)
    bottom = strata[0]
    top = strata[-1]
    successors: dict[DegeneracyType, list[DegeneracyType]] = {}
    for a, b in covers:
        successors.setdefault(a, []).append(b)

    chains: list[list[DegeneracyType]] = []

    def grow(chain: list[DegeneracyType]):
        tail = chain[-1]
        if tail == top:
            chains.append(list(chain))
            return
        for nxt in sorted(successors.get(tail, [])):
            grow(chain + [nxt])

    grow([bottom])
    return chains


# -- moduli parameterization -------------------------------------------------


def _helmert_basis(n: int) -> list[tuple]:
    """Orthonormal basis of the trace-zero hyperplane in R^n."""
    basis = []
    for j in range(1, n):
        norm = mpmath.sqrt(mpmath.mpf(j * (j + 1)))
        vec = tuple([1 / norm] * j + [-j / norm] + [mpmath.mpf(0)] * (n - j - 1))
        basis.append(vec)
    return basis


def _unit_vector(angles: list) -> list:
    """Angle chain in R^(len(angles)+1): () -> (1,), (a,) -> (sin a, cos a), ..."""
    vec = [mpmath.mpf(1)]
    for angle in angles:
        s, c = mpmath.sin(angle), mpmath.cos(angle)
        vec = [s * v for v in vec] + [c]
    return vec


def spectrum_from_moduli(n: int, angles) -> KernelSpectrum:
    """Kernel spectrum from ``n - 2`` angles on the constraint sphere.

    The constraints ``sum(pi)=1, sum(pi^2)=n`` define a sphere of radius
    ``sqrt(n - 1/n)`` around the maximally mixed point inside the trace
    hyperplane; the angles select a direction in an orthonormal (Helmert)
    basis of that hyperplane.  For ``n == 3`` the single angle runs over
    ``[0, pi/3]`` and the two endpoints give the exact rational spectra
    ``(1, 1, -1)`` and ``(5/3, -1/3, -1/3)``.

    Raises ``DomainError`` when the resulting spectrum is not sorted, i.e.
    the angles point outside the ordering chamber.
    """
    angles = [a for a in angles]
    if n < 2:
        raise DomainError("n must be >= 2")
    if len(angles) != n - 2:
        raise DomainError(f"n={n} takes exactly {n - 2} moduli angles")
    if n == 2:
        root3 = mpmath.sqrt(mpmath.mpf(3))
        values = (mpmath.mpf(1) / 2 + root3 / 2, mpmath.mpf(1) / 2 - root3 / 2)
        return KernelSpectrum(2, values)
    if n == 3 and angles[0] == 0:
        # chamber endpoint, exactly rational
        return KernelSpectrum(3, (Fraction(1), Fraction(1), Fraction(-1)))

    radius = mpmath.sqrt(mpmath.mpf(n) - mpmath.mpf(1) / n)
    unit = _unit_vector([mpmath.mpf(a) for a in angles])
    basis = _helmert_basis(n)
    center = mpmath.mpf(1) / n
    values = [center] * n
    for coeff, vec in zip(unit, basis):
        for i in range(n):
            values[i] += radius * coeff * vec[i]
    for i in range(n - 1):
        if values[i] < values[i + 1] - mpmath.mpf(10) ** (-20):
            extra = " (for n=3 the angle must lie in [0, pi/3])" if n == 3 else ""
            raise DomainError(
                f"moduli outside the ordering chamber: pi[{i+1}] < pi[{i+2}]"
                f"{extra}")
    # clamp tiny inversions from rounding so the constructor accepts
    vals = list(values)
    for i in range(n - 1):
        if vals[i] < vals[i + 1]:
            vals[i + 1] = vals[i]
    return KernelSpectrum(n, tuple(vals))


def sorted_spectrum_from_moduli(n: int, angles) -> KernelSpectrum:
    """Like :func:`spectrum_from_moduli` but maps out-of-chamber angles into
    the chamber by sorting (the quotient by eigenvalue permutations)."""
    try:
        return spectrum_from_moduli(n, angles)
    except DomainError:
        radius = mpmath.sqrt(mpmath.mpf(n) - mpmath.mpf(1) / n)
        unit = _unit_vector([mpmath.mpf(a) for a in angles])
        basis = _helmert_basis(n)
        center = mpmath.mpf(1) / n
        values = [center] * n
        for coeff, vec in zip(unit, basis):
            for i in range(n):
                values[i] += radius * coeff * vec[i]
        return KernelSpectrum(n, tuple(sorted(values, reverse=True)))
