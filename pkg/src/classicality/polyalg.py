"""Sparse multivariate polynomials and affine chart maps.

Coefficients may be exact rationals, extended-precision reals or floats;
the arithmetic is whatever the coefficients support.  Exponent vectors are
plain tuples of non-negative ints.  Terms are kept in a dict and exposed in
graded-lexicographic order for deterministic serialization.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import DomainError
from .scalars import format_decimal, format_rational


class SparsePolynomial:
    """Polynomial in ``nvars`` variables as a map exponent-vector -> coefficient.

    Instances are immutable by convention: every operation returns a new
    polynomial and never stores zero coefficients.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = int(nvars)
        clean = {}
        if terms:
            for exp, coeff in terms.items():
                if len(exp) != self.nvars:
                    raise DomainError(
                        f"exponent {exp} does not match nvars={self.nvars}")
                if coeff != 0:
                    clean[tuple(int(e) for e in exp)] = coeff
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "SparsePolynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "SparsePolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "SparsePolynomial":
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def affine(cls, offset, coeffs: Sequence) -> "SparsePolynomial":
        """offset + sum(coeffs[i] * x_i)."""
        nvars = len(coeffs)
        terms = {}
        if offset != 0:
            terms[(0,) * nvars] = offset
        for i, c in enumerate(coeffs):
            if c != 0:
                exp = [0] * nvars
                exp[i] = 1
                terms[tuple(exp)] = c
        return cls(nvars, terms)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        if self.nvars != other.nvars:
            raise DomainError("variable count mismatch")
        terms = dict(self.terms)
        for exp, coeff in other.terms.items():
            acc = terms.get(exp, 0) + coeff
            if acc == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = acc
        return SparsePolynomial(self.nvars, terms)

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        if self.nvars != other.nvars:
            raise DomainError("variable count mismatch")
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(exp, 0) + c1 * c2
                if acc == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = acc
        return SparsePolynomial(self.nvars, terms)

    def scale(self, factor) -> "SparsePolynomial":
        if factor == 0:
            return SparsePolynomial.zero(self.nvars)
        return SparsePolynomial(
            self.nvars, {e: c * factor for e, c in self.terms.items()})

    def __pow__(self, power: int) -> "SparsePolynomial":
        if power < 0:
            raise DomainError("negative power")
        result = SparsePolynomial.constant(self.nvars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base if power > 1 else base
            power >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparsePolynomial)
                and self.nvars == other.nvars and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, tuple(self.sorted_terms())))

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        """Terms in graded-lex order (by total degree, then exponent)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise DomainError("point dimension mismatch")
        acc = 0
        for exp, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, exp):
                if e:
                    term = term * x ** e
            acc = acc + term
        return acc

    def __repr__(self) -> str:
        if not self.terms:
            return "SparsePolynomial(0)"
        parts = [f"{c!r}*x^{e}" for e, c in self.sorted_terms()]
        return "SparsePolynomial(" + " + ".join(parts) + ")"

    # -- serialization -----------------------------------------------------

    def to_json_terms(self) -> list:
        """JSON form: list of [exponent-vector, coefficient-string]."""
        out = []
        for exp, coeff in self.sorted_terms():
            text = format_rational(coeff) or format_decimal(coeff)
            out.append([list(exp), text])
        return out


def homogeneous_parts(p: SparsePolynomial) -> list[tuple[int, SparsePolynomial]]:
    """Split ``p`` by total degree; concatenating the parts recovers ``p``."""
    buckets: dict[int, dict] = {}
    for exp, coeff in p.terms.items():
        buckets.setdefault(sum(exp), {})[exp] = coeff
    return [(j, SparsePolynomial(p.nvars, terms))
            for j, terms in sorted(buckets.items())]


def bombieri(p: SparsePolynomial) -> SparsePolynomial:
    """Multiply every coefficient by the factorials of its exponent vector."""
    terms = {}
    for exp, coeff in p.terms.items():
        mult = 1
        for e in exp:
            mult *= factorial(e)
        terms[exp] = coeff * mult
    return SparsePolynomial(p.nvars, terms)


@dataclass(frozen=True)
class AffineChartMap:
    """Map u in K_n  ->  base + sum_a (directions[a]) * u_a.

    ``base`` is the image of the canonical simplex origin and
    ``directions[a]`` the image of the a-th unit vector minus the base,
    i.e. the columns of the affine map onto a target simplex.
    """

    base: tuple
    directions: tuple  # tuple of direction vectors, each of len(base)

    @classmethod
    def from_simplex_vertices(cls, vertices: Sequence[Sequence]) -> "AffineChartMap":
        base = tuple(vertices[0])
        dirs = tuple(tuple(v[i] - base[i] for i in range(len(base)))
                     for v in vertices[1:])
        return cls(base, dirs)

    @property
    def source_dim(self) -> int:
        return len(self.directions)

    @property
    def target_dim(self) -> int:
        return len(self.base)

    def is_linear(self, component_pairs: Iterable[tuple[int, int]] | None = None) -> bool:
        """True when the listed coordinate differences vanish at the base.

        With no pairs given, checks that the base itself is the origin.
        """
        if component_pairs is None:
            return all(b == 0 for b in self.base)
        return all(self.base[i] == self.base[j] for i, j in component_pairs)

    def component_polynomials(self) -> list[SparsePolynomial]:
        n = self.source_dim
        polys = []
        for i in range(self.target_dim):
            polys.append(SparsePolynomial.affine(
                self.base[i], [d[i] for d in self.directions]))
        return polys

    def apply(self, u: Sequence) -> tuple:
        if len(u) != self.source_dim:
            raise DomainError("chart point dimension mismatch")
        out = list(self.base)
        for coeff, direction in zip(u, self.directions):
            for i, d in enumerate(direction):
                out[i] = out[i] + coeff * d
        return tuple(out)


def pullback(density: SparsePolynomial, chart: AffineChartMap) -> SparsePolynomial:
    """Compose ``density`` with the chart map and expand.

    The result lives in the chart variables; the total degree never grows.
    """
    if density.nvars != chart.target_dim:
        raise DomainError(
            f"density has {density.nvars} variables, chart targets "
            f"{chart.target_dim}")
    n = chart.source_dim
    components = chart.component_polynomials()
    # Cache powers of each component polynomial.
    power_cache: list[dict[int, SparsePolynomial]] = [
        {0: SparsePolynomial.constant(n, 1)} for _ in components]

    def component_power(i: int, e: int) -> SparsePolynomial:
        cache = power_cache[i]
        if e not in cache:
            best = max(k for k in cache if k <= e)
            poly = cache[best]
            for k in range(best, e):
                poly = poly * components[i]
                cache[k + 1] = poly
        return cache[e]

    acc = SparsePolynomial.zero(n)
    for exp, coeff in density.terms.items():
        term = SparsePolynomial.constant(n, coeff)
        for i, e in enumerate(exp):
            if e:
                term = term * component_power(i, e)
        acc = acc + term
    return acc


@dataclass(frozen=True)
class LinearFormProduct:
    """Product of powered linear forms prod_s (coeffs_s . u)^(mult_s)."""

    nvars: int
    factors: tuple  # tuple of (coefficient-vector, multiplicity)

    def __post_init__(self):
        for coeffs, mult in self.factors:
            if len(coeffs) != self.nvars:
                raise DomainError("form coefficient length mismatch")
            if mult < 1:
                raise DomainError("multiplicity must be positive")

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def expand(self) -> SparsePolynomial:
        acc = SparsePolynomial.constant(self.nvars, 1)
        for coeffs, mult in self.factors:
            form = SparsePolynomial.affine(0, coeffs)
            acc = acc * form ** mult
        return acc

    def evaluate(self, point: Sequence):
        acc = 1
        for coeffs, mult in self.factors:
            val = 0
            for c, x in zip(coeffs, point):
                val = val + c * x
            acc = acc * val ** mult
        return acc


def vandermonde_power_density(multiplicities: Sequence[int]) -> SparsePolynomial:
    """prod_{i<j} (r_i - r_j)^(2 k_i k_j) expanded over the distinct values."""
    ks = [int(k) for k in multiplicities]
    s = len(ks)
    acc = SparsePolynomial.constant(s, 1)
    for i in range(s):
        for j in range(i + 1, s):
            coeffs = [0] * s
            coeffs[i] = 1
            coeffs[j] = -1
            diff = SparsePolynomial.affine(0, coeffs)
            acc = acc * diff ** (2 * ks[i] * ks[j])
    return acc


def as_linear_form_product(multiplicities: Sequence[int],
                           chart: AffineChartMap) -> LinearFormProduct:
    """Eigenvalue-difference forms composed with a chart map.

    Each difference r_i - r_j appears with multiplicity ``2 k_i k_j``.  The
    chart base must assign equal values to every pair of distinct
    eigenvalues (the cone apex at a fully degenerate point), otherwise the
    composition is affine rather than linear and this representation does
    not apply.
    """
    ks = [int(k) for k in multiplicities]
    s = len(ks)
    if chart.target_dim != s:
        raise DomainError("chart target dimension does not match partition size")
    pairs = [(i, j) for i in range(s) for j in range(i + 1, s)]
    if not chart.is_linear(pairs):
        raise DomainError(
            "chart base is not a fully degenerate point; the composed "
            "difference forms would carry constant offsets")
    factors = []
    for i, j in pairs:
        coeffs = tuple(d[i] - d[j] for d in chart.directions)
        factors.append((coeffs, 2 * ks[i] * ks[j]))
    return LinearFormProduct(chart.source_dim, tuple(factors))
