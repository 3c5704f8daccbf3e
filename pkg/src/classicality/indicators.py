"""Classicality indicators per stratum and the hierarchy check.

The indicator of a stratum is the density-weighted fraction of its orbit
space occupied by states with a non-negative quasiprobability margin:

    Q = sum_w (1/k_w[s]) * integral over clipped face_w of density_w
        -----------------------------------------------------------
        sum_w (1/k_w[s]) * integral over full face_w of density_w

where w runs over the distinct reorderings of the multiplicity vector,
``density_w`` is the Vandermonde power in the distinct eigenvalues, and the
``1/k_w[s]`` factor is the Jacobian of solving the weight constraint
``sum_i k_i r_i = 1`` for the last distinct eigenvalue -- the same chart
the volumes are computed in, so all other constants cancel.  The full-group
stratum is a single point and gets the value one by convention.

Denominators do not depend on the kernel spectrum; they are computed once
per face in exact rational arithmetic and cached.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .geometry import (Polytope, Simplex, classify_cross_section,
                       euclidean_volume, face_hyperplane, face_simplex,
                       positivity_polytope, signed_decomposition_b_type,
                       triangulate)
from .quadrature import (QuadratureResult, integrate_affine_forms,
                         integrate_mc, integrate_polynomial, simplex_weights)
from .polyalg import vandermonde_power_density
from .scalars import DEFAULT_SEED, to_mpf
from .strata import (DegeneracyType, KernelSpectrum, degeneracy_orbit,
                     enumerate_strata, hasse_less, maximal_chains)

#: Degrees up to which the permanent engine is the default.
LA_DEFAULT_MAX_DEGREE = 14


@dataclass(frozen=True)
class IndicatorResult:
    """Computed indicator with full provenance."""

    n: int
    stratum: DegeneracyType
    spectrum: KernelSpectrum
    value: object
    method: str
    numerator: object
    denominator: object
    stderr: object | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.denominator <= 0:
            raise DomainError("indicator denominator must be positive")
        tol = 0 if isinstance(self.value, Fraction) else 1e-9
        if not (-tol <= self.value <= 1 + tol):
            raise DomainError(f"indicator {self.value} outside [0, 1]")

    def to_json(self) -> dict:
        from .scalars import format_decimal, format_rational
        payload = {
            "n": self.n,
            "stratum": str(self.stratum),
            "isotropy": self.stratum.label,
            "spectrum": self.spectrum.to_json(),
            "value": {
                "decimal": format_decimal(self.value),
                "rational": format_rational(self.value),
            },
            "numerator": format_rational(self.numerator) or format_decimal(self.numerator),
            "denominator": format_rational(self.denominator) or format_decimal(self.denominator),
            "method": self.method,
        }
        if self.stderr is not None:
            payload["stderr"] = format_decimal(self.stderr)
        if self.seed is not None:
            payload["seed"] = self.seed
        return payload


@dataclass(frozen=True)
class HierarchyReport:
    """Indicator values of every stratum against the refinement order."""

    spectrum: KernelSpectrum
    entries: tuple  # (DegeneracyType, value) in a linear extension order
    conjecture_holds: bool
    violations: tuple
    min_margin: object

    def to_json(self) -> dict:
        from .scalars import format_decimal
        return {
            "spectrum": self.spectrum.to_json(),
            "entries": [{"stratum": str(d), "isotropy": d.label,
                         "value": format_decimal(v)} for d, v in self.entries],
            "conjecture_holds": self.conjecture_holds,
            "violations": list(self.violations),
            "min_margin": format_decimal(self.min_margin),
        }


# -- density integration over faces --------------------------------------------


def _difference_factors(mults: tuple[int, ...]):
    s = len(mults)
    factors = []
    for i in range(s):
        for j in range(i + 1, s):
            def diff(v, i=i, j=j):
                return v[i] - v[j]
            factors.append((diff, 2 * mults[i] * mults[j]))
    return factors


def density_degree(mults: tuple[int, ...]) -> int:
    s = len(mults)
    return sum(2 * mults[i] * mults[j]
               for i in range(s) for j in range(i + 1, s))


def integrate_density(mults: tuple[int, ...], simplex: Simplex,
                      method: str) -> QuadratureResult:
    """Integral of the stratum density over one simplex, by either engine."""
    if method == "la":
        return integrate_affine_forms(_difference_factors(mults), simplex)
    if method in ("lasserre", "dirichlet"):
        density = vandermonde_power_density(mults)
        return integrate_polynomial(density, simplex, method)
    raise DomainError(f"unknown method {method!r}")


_DENOMINATOR_CACHE: dict = {}


def face_denominator(mults: tuple[int, ...], method: str) -> Fraction:
    """Exact density integral over the full ordered face (cached)."""
    key = (tuple(mults), method)
    if key not in _DENOMINATOR_CACHE:
        simplex = face_simplex(mults)
        _DENOMINATOR_CACHE[key] = integrate_density(mults, simplex, method).value
    return _DENOMINATOR_CACHE[key]


def _as_stratum(stratum) -> DegeneracyType:
    if isinstance(stratum, DegeneracyType):
        return stratum
    return DegeneracyType(tuple(sorted((int(k) for k in stratum), reverse=True)))


def default_method(stratum: DegeneracyType) -> str:
    q = density_degree(stratum.multiplicities)
    return "la" if q <= LA_DEFAULT_MAX_DEGREE else "lasserre"


def indicator(n: int, stratum, pi: KernelSpectrum, method: str | None = None,
              mc_samples: int = 1_000_000, seed: int = DEFAULT_SEED) -> IndicatorResult:
    """Classicality indicator of one stratum for one kernel spectrum.

    ``method`` is one of ``"la"`` (polarization permanents), ``"lasserre"``
    (canonical-point series) or ``"mc"``; by default the permanent engine is
    used up to total density degree 14 and the series engine above.  For
    four-level B-type spectra the permanent route integrates the two-term
    signed split instead of the fan triangulation.
    """
    stratum = _as_stratum(stratum)
    if stratum.n != n or pi.n != n:
        raise DomainError("dimension mismatch between stratum and spectrum")
    if stratum.is_full_group():
        return IndicatorResult(n, stratum, pi, _one_like(pi), "exact",
                               _one_like(pi), _one_like(pi))
    if method is None:
        method = default_method(stratum)
    if method == "mc":
        return _mc_indicator(n, stratum, pi, mc_samples, seed)
    if method not in ("la", "lasserre"):
        raise DomainError(f"unknown method {method!r}")

    numerator = 0
    denominator = Fraction(0)
    for mults in degeneracy_orbit(stratum):
        k_last = mults[-1]
        denominator += face_denominator(mults, method) / k_last
        numerator = numerator + _face_numerator(pi, mults, method) / k_last
    if not pi.is_exact():
        denominator_val = to_mpf(denominator)
    else:
        denominator_val = denominator
    value = numerator / denominator_val
    return IndicatorResult(n, stratum, pi, value, method,
                           numerator, denominator_val)


def _one_like(pi: KernelSpectrum):
    return Fraction(1) if pi.is_exact() else to_mpf(1)


def _face_numerator(pi: KernelSpectrum, mults: tuple[int, ...], method: str):
    polytope = positivity_polytope(pi, mults)
    if (method == "la" and pi.n == 4 and mults == (1, 1, 1, 1)
            and classify_cross_section(pi) == "B"):
        pieces = signed_decomposition_b_type(pi).terms
    else:
        pieces = triangulate(polytope).terms
    total = 0
    for sign, piece in pieces:
        total = total + sign * integrate_density(mults, piece, method).value
    return total


# -- Monte-Carlo indicator -------------------------------------------------------


def _mc_indicator(n: int, stratum: DegeneracyType, pi: KernelSpectrum,
                  samples: int, seed: int) -> IndicatorResult:
    """Self-normalizing estimator on the orbit faces.

    Samples each face uniformly, weights by the stratum density and
    classifies by the sign of the margin; independent of the clipping and
    triangulation code paths entirely.
    """
    num = 0.0
    den = 0.0
    var_num = 0.0
    var_den = 0.0
    cov = 0.0
    faces = degeneracy_orbit(stratum)
    for idx, mults in enumerate(faces):
        simplex = face_simplex(mults)
        verts = np.array([[float(x) for x in v] for v in simplex.vertices])
        weights = simplex_weights(samples, verts.shape[0], (seed, idx))
        points = weights @ verts
        s = len(mults)
        density = np.ones(samples)
        for i in range(s):
            for j in range(i + 1, s):
                density *= (points[:, i] - points[:, j]) ** (2 * mults[i] * mults[j])
        plane = face_hyperplane(pi, mults)
        coeffs = np.array([float(c) for c in plane.coefficients])
        classical = (points @ coeffs) >= 0.0
        scale = float(euclidean_volume(simplex)) / mults[-1]
        fc = density * classical
        num += scale * fc.mean()
        den += scale * density.mean()
        var_num += scale ** 2 * fc.var(ddof=1) / samples
        var_den += scale ** 2 * density.var(ddof=1) / samples
        cov += scale ** 2 * np.cov(fc, density, ddof=1)[0, 1] / samples
    value = num / den
    var = (var_num - 2 * value * cov + value ** 2 * var_den) / den ** 2
    stderr = float(np.sqrt(max(var, 0.0)))
    return IndicatorResult(n, stratum, pi, value, "mc", num, den,
                           stderr=stderr, seed=seed)


# -- closed forms ----------------------------------------------------------------


def q3_regular_closed_form(pi: KernelSpectrum):
    """Reference value for the three-level regular stratum.

    With a = 3 pi_1 - 1 and b = 1 - 3 pi_3:

        Q = [4/a^2 + 4/b^2 + 6/(a b)] / (a^3 b^3),

    symmetric under a <-> b; equals 1/256 at both chamber endpoints.
    """
    if pi.n != 3:
        raise DomainError("formula applies to n=3 only")
    a = 3 * pi.pi[0] - 1
    b = 1 - 3 * pi.pi[2]
    if a == 0 or b == 0:
        raise DomainError("singular parameters are excluded by the moment constraints")
    return (4 / (a * a) + 4 / (b * b) + 6 / (a * b)) / (a ** 3 * b ** 3)


def q3_degenerate_window_holds(pi: KernelSpectrum) -> bool:
    """Validity window of the degenerate-stratum closed form.

    The derivation assumes the hyperplane cuts both degenerate segments,
    i.e. pi_1 >= 1 and pi_3 <= 0; every valid ordered three-level spectrum
    satisfies this, but the guard keeps near-boundary floats honest.
    """
    if pi.n != 3:
        raise DomainError("formula applies to n=3 only")
    tol = 0 if pi.is_exact() else 1e-12
    return pi.pi[0] >= 1 - tol and pi.pi[2] <= tol


def q3_degenerate_closed_form(pi: KernelSpectrum):
    """Reference value for the three-level degenerate stratum.

    (32/33) * (a^-5 + b^-5) inside the validity window; outside it the
    generic clipped one-dimensional integration is authoritative and is
    returned instead.
    """
    if not q3_degenerate_window_holds(pi):
        return indicator(3, (2, 1), pi, method="la").value
    a = 3 * pi.pi[0] - 1
    b = 1 - 3 * pi.pi[2]
    scale = Fraction(32, 33) if pi.is_exact() else to_mpf(32) / 33
    return scale * (1 / a ** 5 + 1 / b ** 5)


#: Numerator bracket of the four-level triangle-section closed form:
#: coefficient / (x^i y^j z^k) with x = 4 pi_1 - 1, y = 1 - 4 pi_4,
#: z = pi_1 + pi_2 - pi_3 - pi_4.
_Q4_BRACKET_TERMS = (
    ((2, 4, 0), 480), ((4, 2, 0), 480), ((0, 0, 6), 35),
    ((1, 0, 5), 105), ((0, 1, 5), 105), ((2, 0, 4), 180),
    ((0, 2, 4), 180), ((3, 0, 3), 200), ((1, 2, 3), 540),
    ((2, 1, 3), 540), ((4, 0, 2), 120), ((0, 4, 2), 120),
    ((2, 2, 2), 912), ((1, 4, 1), 360), ((2, 3, 1), 960),
    ((3, 2, 1), 960), ((3, 3, 0), 800), ((1, 3, 2), 600),
    ((0, 3, 3), 200), ((1, 1, 4), 315), ((3, 1, 2), 600),
    ((4, 1, 1), 360),
)


def _q4_bracket(x, y, z):
    total = 0
    for (i, j, k), coeff in _Q4_BRACKET_TERMS:
        total = total + coeff / (x ** i * y ** j * z ** k)
    return total


def q4_a_type_closed_form(pi: KernelSpectrum):
    """Reference value for the four-level regular stratum, triangle section.

    The 22-term bracket over (4 pi_1 - 1, 1 - 4 pi_4, pi_1+pi_2-pi_3-pi_4)
    with prefactor 1/(x^3 y^3 z^3), normalized by its own value at the
    formal parameters (3, 1, 1) where the clipped region is the whole
    ordered simplex.  At those parameters the bracket sums to exactly 1728.
    """
    if classify_cross_section(pi) != "A":
        raise DomainError("closed form applies to A-type (pi_1 >= 1) spectra only")
    p1, p2, p3, p4 = pi.pi
    x = 4 * p1 - 1
    y = 1 - 4 * p4
    z = p1 + p2 - p3 - p4
    if not (x > 0 and y > 0 and z > 0):
        raise DomainError("bracket denominators must be positive for valid spectra")
    numerator = _q4_bracket(x, y, z) / (x ** 3 * y ** 3 * z ** 3)
    reference = Fraction(_q4_bracket(Fraction(3), Fraction(1), Fraction(1)), 27)
    if not pi.is_exact():
        reference = to_mpf(reference)
    return numerator / reference


# -- hierarchy -------------------------------------------------------------------


def hierarchy_check(n: int, pi: KernelSpectrum, method: str | None = None,
                    mc_samples: int = 200_000, seed: int = DEFAULT_SEED) -> HierarchyReport:
    """Indicators for every stratum, compared along the refinement order.

    A violation is any comparable pair whose indicators are not strictly
    increasing; violations are reported as data, never raised.
    """
    strata = enumerate_strata(n)
    values = {}
    for stratum in strata:
        res = indicator(n, stratum, pi, method=method,
                        mc_samples=mc_samples, seed=seed)
        values[stratum] = res.value
    violations = []
    min_margin = None
    for low in strata:
        for high in strata:
            if not hasse_less(low, high):
                continue
            margin = values[high] - values[low]
            if min_margin is None or margin < min_margin:
                min_margin = margin
            if margin <= 0:
                violations.append({
                    "lower": str(low), "upper": str(high),
                    "q_lower": float(values[low]), "q_upper": float(values[high]),
                    "margin": float(margin),
                })
    # sanity: every maximal chain starts at the torus and ends at value 1
    for chain in maximal_chains(n):
        assert chain[0] == strata[0] and chain[-1] == strata[-1]
    entries = tuple((s, values[s]) for s in strata)
    return HierarchyReport(pi, entries, not violations, tuple(violations),
                           min_margin)
