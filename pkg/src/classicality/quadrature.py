"""Exact and stochastic integration of polynomials over simplices.

Two exact engines plus two oracles:

* the polarization/permanent method: a product of affine forms integrates
  over a simplex as a composition-weighted sum of matrix permanents,

      integral = vol(S) / C(n+q, q) * (1/q!) *
                 sum_{a_0+...+a_n = q} perm(M(a)),

  where column t of M(a) holds the form values at the vertex the
  composition assigns to slot t.  When every form vanishes at some vertex
  (the cone apex) the compositions touching that column contribute zero and
  are skipped.
* the canonical-point series: on the canonical simplex K_n a polynomial
  integrates degree by degree,

      integral = vol(K_n) * (p^_0 + sum_j p^_j(s_j)),

  evaluating the Bombieri transform of each homogeneous part at the single
  point s_j = (1,...,1) / ((n+1)...(n+j))^(1/j); every degree-j monomial
  picks up the same radial factor, so the evaluation is rational-exact.
* the Dirichlet closed form  integral_{K_n} prod x_i^{a_i} =
  prod a_i! / (n + sum a_i)!  serves as ground truth for both engines.
* seeded uniform Monte-Carlo sampling as the stochastic oracle.

Volumes are always chart-Lebesgue volumes as produced by
:func:`classicality.geometry.euclidean_volume`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .geometry import Simplex, determinant, euclidean_volume
from .polyalg import (AffineChartMap, LinearFormProduct, SparsePolynomial,
                      bombieri, pullback)
from .scalars import DEFAULT_SEED

#: Practical bound for the permanent kernel (O(2^q * q) work).
PERMANENT_MAX_SIZE = 24


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with the method that produced it."""

    value: object
    method: str
    stderr: object | None = None

    def __post_init__(self):
        if self.method == "mc" and (self.stderr is None or self.stderr < 0):
            raise DomainError("Monte-Carlo results must carry a standard error")
        if self.method != "mc" and self.stderr is not None:
            raise DomainError("exact methods carry no standard error")


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` non-negative ints summing to `total`.

    Exhaustive and duplicate-free; the count is C(total+parts-1, parts-1).
    """
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


# -- permanents ----------------------------------------------------------------


def permanent(matrix) -> object:
    """Permanent by inclusion-exclusion over column subsets (Gray-code order).

    Exact for exact entries; O(2^q * q).  Sizes above
    ``PERMANENT_MAX_SIZE`` raise ``CapacityError`` (use the canonical-point
    series engine instead for such degrees).
    """
    rows = [list(r) for r in matrix]
    q = len(rows)
    if any(len(r) != q for r in rows):
        raise DomainError("permanent needs a square matrix")
    if q == 0:
        return 1
    if q > PERMANENT_MAX_SIZE:
        raise CapacityError(
            f"permanent of size {q} exceeds the practical bound "
            f"{PERMANENT_MAX_SIZE}; the canonical-point series method "
            "handles high degrees without permanents")
    sums = [0 * rows[0][0]] * q
    total = 0
    gray = 0
    for k in range(1, 1 << q):
        new_gray = k ^ (k >> 1)
        bit = gray ^ new_gray
        col = bit.bit_length() - 1
        if new_gray & bit:
            sums = [s + row[col] for s, row in zip(sums, rows)]
        else:
            sums = [s - row[col] for s, row in zip(sums, rows)]
        gray = new_gray
        prod = 1
        for s in sums:
            prod = prod * s
        if (q - gray.bit_count()) % 2:
            total = total - prod
        else:
            total = total + prod
    return total


def permanent_naive(matrix) -> object:
    """Definition-level permanent (sum over permutations); test oracle."""
    rows = [list(r) for r in matrix]
    q = len(rows)
    total = 0
    for perm in itertools.permutations(range(q)):
        prod = 1
        for i, j in enumerate(perm):
            prod = prod * rows[i][j]
        total = total + prod
    return total


def permanent_with_multiplicities(values, row_mults, col_mults) -> object:
    """Permanent of a matrix whose distinct rows/columns carry multiplicities.

    ``values[s][t]`` is the entry for distinct row ``s`` and distinct column
    ``t``; row ``s`` is repeated ``row_mults[s]`` times and column ``t``
    ``col_mults[t]`` times.  Ryser inclusion-exclusion grouped over the
    identical columns:

        perm = (-1)^q sum_{b <= col_mults} (-1)^{|b|} prod_t C(a_t, b_t)
               * prod_s (sum_t b_t values[s][t])^(m_s).
    """
    q = sum(row_mults)
    if q != sum(col_mults):
        raise DomainError("row and column multiplicities must agree in total")
    if q == 0:
        return 1
    total = 0
    for b in itertools.product(*[range(a + 1) for a in col_mults]):
        weight = 1
        for a_t, b_t in zip(col_mults, b):
            weight *= comb(a_t, b_t)
        if sum(b) % 2:
            weight = -weight
        prod = weight
        for s, m_s in enumerate(row_mults):
            acc = 0
            row = values[s]
            for t, b_t in enumerate(b):
                if b_t:
                    acc = acc + b_t * row[t]
            if acc == 0:
                prod = 0
                break
            prod = prod * acc ** m_s
        total = total + prod
    return total if q % 2 == 0 else -total


# -- polarization / permanent engine -------------------------------------------


def polarization_matrix(form_values, row_mults, composition) -> list[list]:
    """Expanded q x q matrix M(a): rows repeat forms, column t repeats the
    vertex assigned by the composition (test and documentation helper)."""
    rows = []
    for vals, mult in zip(form_values, row_mults):
        expanded = []
        for t, a_t in enumerate(composition):
            expanded.extend([vals[t]] * a_t)
        rows.extend([list(expanded)] * mult)
    return rows


def _composition_sum(values, row_mults, q: int, ncols: int):
    acc = 0
    for a in compositions(q, ncols):
        acc = acc + permanent_with_multiplicities(values, row_mults, a)
    return acc


def _la_result(values, row_mults, simplex: Simplex) -> QuadratureResult:
    vol = euclidean_volume(simplex)
    q = sum(row_mults)
    if q > PERMANENT_MAX_SIZE:
        raise CapacityError(
            f"total form degree {q} exceeds the permanent bound "
            f"{PERMANENT_MAX_SIZE}; use the canonical-point series method")
    if vol == 0:
        return QuadratureResult(0 * vol, "la")
    if q == 0:
        return QuadratureResult(vol, "la")
    # columns where every form vanishes (the cone apex) never contribute
    active = [t for t in range(len(values[0]))
              if any(row[t] != 0 for row in values)]
    values = [[row[t] for t in active] for row in values]
    acc = _composition_sum(values, row_mults, q, len(active))
    kappa = vol / comb(simplex.dim + q, q)
    if isinstance(acc, (int, Fraction)) and isinstance(kappa, Fraction):
        return QuadratureResult(kappa * Fraction(acc, factorial(q)), "la")
    return QuadratureResult(kappa * acc / factorial(q), "la")


def integrate_affine_forms(factors, simplex: Simplex) -> QuadratureResult:
    """Permanent-method integral of ``prod_s f_s(x)^(m_s)`` over a simplex.

    ``factors`` is a sequence of ``(form, multiplicity)`` with ``form`` a
    callable on face coordinates (any affine function); it is evaluated at
    the simplex vertices only.
    """
    values = [[form(v) for v in simplex.vertices] for form, _ in factors]
    row_mults = [m for _, m in factors]
    return _la_result(values, row_mults, simplex)


def integrate_la(forms: LinearFormProduct, simplex: Simplex) -> QuadratureResult:
    """Permanent-method integral of a homogeneous product of linear forms.

    The forms live in the chart of the simplex whose first vertex is the
    apex at the chart origin; the t-th canonical unit vector maps to vertex
    t+1, so the form value at that vertex is its t-th coefficient.
    """
    if forms.nvars != simplex.dim:
        raise DomainError("form variables must match the simplex dimension")
    values = [list(coeffs) for coeffs, _ in forms.factors]
    row_mults = [m for _, m in forms.factors]
    # prepend the apex column (all forms vanish at the chart origin)
    values = [[0] + row for row in values]
    return _la_result(values, row_mults, simplex)


# -- canonical-point series and Dirichlet oracle --------------------------------


def lasserre_point(n: int, j: int) -> tuple:
    """The degree-j evaluation point (1,...,1)/((n+1)...(n+j))^(1/j)."""
    import mpmath
    prod = 1
    for i in range(1, j + 1):
        prod *= n + i
    radial = mpmath.power(mpmath.mpf(prod), -mpmath.mpf(1) / j)
    return tuple([radial] * n)


def integrate_lasserre(p: SparsePolynomial, n: int) -> QuadratureResult:
    """Canonical-simplex integral via Bombieri values at the degree points.

    Each homogeneous part of degree j contributes its Bombieri coefficient
    sum divided by (n+1)...(n+j) -- the radial j-th root of the evaluation
    point cancels against the homogeneity -- and the degree-0 part passes
    through unchanged; the total is scaled by vol(K_n) = 1/n!.
    """
    if p.nvars != n:
        raise DomainError("polynomial must be defined over K_n")
    exact = all(isinstance(c, (int, Fraction)) for c in p.terms.values())
    hat = bombieri(p)
    by_degree: dict[int, object] = {}
    for exp, coeff in hat.terms.items():
        j = sum(exp)
        by_degree[j] = by_degree.get(j, 0) + coeff
    total = Fraction(0) if exact else 0
    for j, coeff_sum in sorted(by_degree.items()):
        denom = 1
        for i in range(1, j + 1):
            denom *= n + i
        if exact:
            total += Fraction(coeff_sum) / denom
        else:
            total = total + coeff_sum / denom
    return QuadratureResult(total / factorial(n), "lasserre")


def integrate_dirichlet(p: SparsePolynomial, n: int) -> QuadratureResult:
    """Monomial-by-monomial canonical-simplex integral (ground-truth oracle)."""
    if p.nvars != n:
        raise DomainError("polynomial must be defined over K_n")
    exact = all(isinstance(c, (int, Fraction)) for c in p.terms.values())
    total = Fraction(0) if exact else 0
    for exp, coeff in p.terms.items():
        num = 1
        for e in exp:
            num *= factorial(e)
        den = factorial(n + sum(exp))
        if exact:
            total += coeff * Fraction(num, den)
        else:
            total = total + coeff * num / den
    return QuadratureResult(total, "dirichlet")


def integrate_polynomial(p: SparsePolynomial, simplex: Simplex,
                         method: str = "lasserre") -> QuadratureResult:
    """Integrate a face-coordinate polynomial over an arbitrary simplex.

    Maps the canonical simplex onto the target (first vertex at the chart
    origin), pulls the polynomial back and integrates over K_n, scaling by
    the chart Jacobian.
    """
    chart_vertices = simplex.chart_vertices()
    n = simplex.dim
    base = chart_vertices[0]
    rows = [[chart_vertices[j + 1][i] - base[i] for j in range(n)]
            for i in range(n)]
    jac = determinant(rows)
    if jac < 0:
        jac = -jac
    if jac == 0:
        return QuadratureResult(0 * jac, method)
    chart = AffineChartMap.from_simplex_vertices(simplex.vertices)
    pulled = pullback(p, chart)
    if method == "lasserre":
        inner = integrate_lasserre(pulled, n)
    elif method == "dirichlet":
        inner = integrate_dirichlet(pulled, n)
    else:
        raise DomainError(f"unknown polynomial method {method!r}")
    return QuadratureResult(jac * inner.value, method)


# -- Monte-Carlo ---------------------------------------------------------------


def simplex_weights(samples: int, nvertices: int, seed: int) -> np.ndarray:
    """Uniform barycentric weights via sorted-uniform spacings.

    Counter-based generator keyed by the seed: the stream is reproducible
    and independent of any threading scheme.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((samples, nvertices - 1))
    u.sort(axis=1)
    return np.diff(np.concatenate(
        [np.zeros((samples, 1)), u, np.ones((samples, 1))], axis=1), axis=1)


def evaluate_polynomial_array(p: SparsePolynomial, points: np.ndarray) -> np.ndarray:
    values = np.zeros(points.shape[0])
    for exp, coeff in p.terms.items():
        term = np.full(points.shape[0], float(coeff))
        for i, e in enumerate(exp):
            if e:
                term *= points[:, i] ** e
        values += term
    return values


def integrate_mc(p: SparsePolynomial, simplex: Simplex, samples: int = 100_000,
                 seed: int = DEFAULT_SEED) -> QuadratureResult:
    """Seeded uniform Monte-Carlo integral with standard error."""
    if samples < 1000:
        raise DomainError("use at least 1000 samples")
    verts = np.array([[float(x) for x in v] for v in simplex.vertices])
    weights = simplex_weights(samples, verts.shape[0], seed)
    points = weights @ verts
    vol = float(euclidean_volume(simplex))
    values = evaluate_polynomial_array(p, points)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples))
    return QuadratureResult(vol * mean, "mc", stderr=vol * stderr)
