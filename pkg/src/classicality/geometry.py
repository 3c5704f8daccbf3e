"""Ordered eigenvalue simplices, half-space clipping and triangulation.

Geometry on a degeneracy face lives in the distinct-eigenvalue coordinates
``(r_1, ..., r_s)`` subject to ``sum_i k_i r_i = 1``; the face itself is the
simplex with vertex chain

    w_j = (1/K_j, ..., 1/K_j, 0, ..., 0),   K_j = k_1 + ... + k_j,

listed from the maximally mixed vertex (j = s) down to ``w_1``.  Volumes are
Lebesgue volumes in the chart that drops the last distinct coordinate; the
chart is shared between every numerator and denominator so normalization
constants cancel in the indicators.

A state is classical when the supporting-hyperplane margin (sorted
eigenvalues against the reversed kernel spectrum) is non-negative.  Clipping
the face simplex by that half-space yields the positivity polytope; its
triangulation is a pulling triangulation anchored at the maximally mixed
vertex, which for the four-level quadrilateral cross-section splits the base
along one diagonal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import ContractViolation, DomainError
from .scalars import convert_like, format_decimal, format_rational
from .strata import (DEGENERACY_RTOL, DegeneracyType, KernelSpectrum,
                     StateSpectrum, _isotropy_label)

#: Chart-metric tolerance for merging coincident polytope vertices.
DEDUP_TOL = 1e-10

#: Volumes below this (relative to 1) flag a degenerate simplex in
#: non-exact arithmetic.
VOLUME_TOL = 1e-24


def _as_mults(deg) -> tuple[int, ...]:
    if isinstance(deg, DegeneracyType):
        return deg.multiplicities
    return tuple(int(k) for k in deg)


@dataclass(frozen=True)
class Simplex:
    """Affine simplex given by its vertices.

    ``face`` records the multiplicity vector whose distinct-eigenvalue
    coordinates the vertices use; ``None`` means raw chart coordinates.
    """

    vertices: tuple
    face: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.vertices:
            raise DomainError("simplex needs at least one vertex")
        width = len(self.vertices[0])
        if any(len(v) != width for v in self.vertices):
            raise DomainError("vertices must share a dimension")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    def chart_vertices(self) -> list[tuple]:
        """Vertices in the volume chart (last coordinate dropped if affine)."""
        if self.ambient_dim == self.dim:
            return [tuple(v) for v in self.vertices]
        if self.ambient_dim == self.dim + 1:
            return [tuple(v[:-1]) for v in self.vertices]
        raise DomainError(
            f"simplex of dim {self.dim} embedded in {self.ambient_dim} "
            "coordinates has no canonical chart")

    def embedded_vertices(self) -> list[tuple]:
        """Vertices in the full N-coordinate representation."""
        if self.face is None:
            return [tuple(v) for v in self.vertices]
        return [expand_to_full(v, self.face) for v in self.vertices]

    def convert_like(self, template) -> "Simplex":
        return Simplex(tuple(tuple(convert_like(x, template) for x in v)
                             for v in self.vertices), self.face)


@dataclass(frozen=True)
class SignedSimplexList:
    """Signed simplices whose indicator functions sum to a region's."""

    terms: tuple  # tuple of (sign, Simplex)
    degenerate: bool = False

    def total_volume(self):
        acc = 0
        for sign, simplex in self.terms:
            acc = acc + sign * euclidean_volume(simplex)
        return acc


@dataclass(frozen=True)
class Hyperplane:
    """Margin functional on a face: sum_i coefficients[i] * r_i (offset 0)."""

    coefficients: tuple
    offset: int = 0

    def margin(self, point: Sequence):
        acc = self.offset
        for c, x in zip(self.coefficients, point):
            acc = acc + c * x
        return acc


@dataclass(frozen=True)
class Polytope:
    """Clipped face simplex: kept vertices plus edge intersection points."""

    vertices: tuple
    dim: int
    symmetry_tags: tuple
    face: tuple[int, ...]
    # clip structure consumed by triangulate(); not part of the public value
    simplex: Simplex = field(repr=False, compare=False)
    kept: tuple = field(repr=False, compare=False)
    cut: tuple = field(repr=False, compare=False)
    cut_points: dict = field(repr=False, compare=False)
    margins: tuple = field(repr=False, compare=False)

    def embedded_vertices(self) -> list[tuple]:
        return [expand_to_full(v, self.face) for v in self.vertices]

    def to_json(self) -> dict:
        verts = []
        for v in self.embedded_vertices():
            verts.append([format_rational(x) or format_decimal(x) for x in v])
        return {"vertices": verts, "tags": list(self.symmetry_tags),
                "dim": self.dim}


# -- basic constructions -----------------------------------------------------


def expand_to_full(point: Sequence, mults: Sequence[int]) -> tuple:
    """Distinct values -> full eigenvalue tuple with multiplicities."""
    out = []
    for value, k in zip(point, mults):
        out.extend([value] * k)
    return tuple(out)


def face_simplex(deg) -> Simplex:
    """Ordered face simplex in distinct coordinates, maximally mixed first."""
    mults = _as_mults(deg)
    s = len(mults)
    partial = list(itertools.accumulate(mults))
    verts = []
    for j in range(s, 0, -1):
        level = Fraction(1, partial[j - 1])
        verts.append(tuple([level] * j + [Fraction(0)] * (s - j)))
    return Simplex(tuple(verts), mults)


def ordered_simplex(n: int) -> Simplex:
    """Simplex of ordered eigenvalue spectra of an n-level system."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return face_simplex((1,) * n)


def face_hyperplane(pi: KernelSpectrum, deg) -> Hyperplane:
    """Margin functional restricted to a degeneracy face.

    Block ``i`` of the sorted spectrum carries ``k_i`` equal eigenvalues, so
    it pairs with the ``k_i`` smallest kernel eigenvalues still unassigned.
    """
    mults = _as_mults(deg)
    if sum(mults) != pi.n:
        raise DomainError("multiplicities do not sum to the dimension")
    ascending = tuple(reversed(pi.pi))
    coeffs = []
    pos = 0
    for k in mults:
        coeffs.append(sum(ascending[pos:pos + k]))
        pos += k
    return Hyperplane(tuple(coeffs))


def classicality_margin(r, pi: KernelSpectrum):
    """(r sorted down, pi sorted up); the state is classical iff >= 0."""
    values = r.r if isinstance(r, StateSpectrum) else tuple(r)
    if len(values) != pi.n:
        raise DomainError("state and kernel dimensions differ")
    if any(values[i] < values[i + 1] for i in range(len(values) - 1)):
        raise ContractViolation("state eigenvalues must be sorted non-increasing")
    if any(pi.pi[i] < pi.pi[i + 1] for i in range(pi.n - 1)):
        raise ContractViolation("kernel eigenvalues must be sorted non-increasing")
    acc = 0
    for value, p in zip(values, reversed(pi.pi)):
        acc = acc + value * p
    return acc


# -- clipping ----------------------------------------------------------------


def _vertex_tag(full_point: Sequence) -> str:
    groups = []
    count = 1
    for a, b in zip(full_point, full_point[1:]):
        if abs(a - b) <= DEGENERACY_RTOL * max(1, abs(a)):
            count += 1
        else:
            groups.append(count)
            count = 1
    groups.append(count)
    return _isotropy_label(tuple(groups))


def _points_equal(a: Sequence, b: Sequence, exact: bool) -> bool:
    if exact:
        return tuple(a) == tuple(b)
    return all(abs(x - y) <= DEDUP_TOL for x, y in zip(a, b))


def positivity_polytope(pi: KernelSpectrum, deg=None) -> Polytope:
    """Clip the (restricted) ordered simplex by the classicality half-space.

    Vertex set: face-simplex vertices with non-negative margin plus the
    margin zeros on all edges joining kept and cut vertices, deduplicated.
    The maximally mixed vertex has margin 1/N > 0, so the result is never
    empty.
    """
    mults = _as_mults(deg) if deg is not None else (1,) * pi.n
    simplex = face_simplex(mults)
    template = pi.pi[0]
    simplex = simplex.convert_like(template)
    plane = face_hyperplane(pi, mults)
    margins = tuple(plane.margin(v) for v in simplex.vertices)
    if margins[0] <= 0:
        raise ContractViolation("maximally mixed vertex must be classical")

    kept = tuple(i for i, m in enumerate(margins) if m >= 0)
    cut = tuple(i for i, m in enumerate(margins) if m < 0)
    cut_points = {}
    for i in kept:
        for j in cut:
            t = margins[i] / (margins[i] - margins[j])
            vi, vj = simplex.vertices[i], simplex.vertices[j]
            cut_points[(i, j)] = tuple(a + t * (b - a) for a, b in zip(vi, vj))

    exact = isinstance(template, Fraction)
    vertices: list[tuple] = []
    for i in kept:
        vertices.append(simplex.vertices[i])
    for key in sorted(cut_points):
        point = cut_points[key]
        if not any(_points_equal(point, v, exact) for v in vertices):
            vertices.append(point)
    tags = tuple(_vertex_tag(expand_to_full(v, mults)) for v in vertices)
    return Polytope(vertices=tuple(vertices), dim=len(mults) - 1,
                    symmetry_tags=tags, face=mults, simplex=simplex,
                    kept=kept, cut=cut, cut_points=cut_points,
                    margins=margins)


# -- triangulation -----------------------------------------------------------


def _pull_clipped(indices: tuple[int, ...], kept: frozenset) -> list[list]:
    """Pulling triangulation of (sub-simplex `indices`) cap half-space.

    Returns simplices as lists of ids: ("v", i) for an original vertex,
    ("c", i, j) for the cut point on the edge (kept i, cut j).  Pulls at the
    smallest kept vertex; the cross-section grid is pulled at its lex-least
    point, so the pieces glue along shared faces.
    """
    ks = [i for i in indices if i in kept]
    us = [i for i in indices if i not in kept]
    if not us:
        return [[("v", i) for i in indices]]
    if not ks:
        return []
    if len(ks) == 1:
        v = ks[0]
        return [[("v", v)] + [("c", v, u) for u in us]]
    v = ks[0]
    rest = tuple(i for i in indices if i != v)
    pieces = [[("v", v)] + s for s in _pull_clipped(rest, kept)]
    pieces += [[("v", v)] + s for s in _pull_section(ks, us)]
    return pieces


def _pull_section(ks: list[int], us: list[int]) -> list[list]:
    """Pulling triangulation of the cross-section grid {cut(i,j)}."""
    if len(ks) == 1:
        return [[("c", ks[0], u) for u in us]]
    if len(us) == 1:
        return [[("c", k, us[0]) for k in ks]]
    head = ("c", ks[0], us[0])
    pieces = [[head] + s for s in _pull_section(ks[1:], us)]
    pieces += [[head] + s for s in _pull_section(ks, us[1:])]
    return pieces


def triangulate(polytope: Polytope) -> SignedSimplexList:
    """Fan (pulling) triangulation anchored at the maximally mixed vertex.

    The pieces have disjoint interiors and cover the polytope; degenerate
    (zero-volume) pieces arising from boundary spectra are dropped.  A
    polytope that is entirely lower-dimensional yields an empty list with
    the degenerate flag set.
    """
    simplex = polytope.simplex
    kept = frozenset(polytope.kept)
    ids_list = _pull_clipped(tuple(range(len(simplex.vertices))), kept)

    def resolve(pid):
        if pid[0] == "v":
            return simplex.vertices[pid[1]]
        return polytope.cut_points[(pid[1], pid[2])]

    exact = isinstance(simplex.vertices[0][0], Fraction)
    terms = []
    for ids in ids_list:
        verts = tuple(resolve(pid) for pid in ids)
        piece = Simplex(verts, polytope.face)
        vol = euclidean_volume(piece)
        if (vol == 0) if exact else (abs(vol) <= VOLUME_TOL):
            continue
        terms.append((1, piece))
    return SignedSimplexList(tuple(terms), degenerate=not terms)


# -- four-level cross-section machinery ---------------------------------------


CROSS_SECTION_RTOL = 1e-10


def classify_cross_section(pi: KernelSpectrum) -> str:
    """"A" when the cross-section is a triangle (pi_1 >= 1), else "B".

    Only defined for four-level systems: the supporting hyperplane meets the
    rays from the maximally mixed vertex along the three edges; all three
    hits land inside their edges exactly when ``pi_1 >= 1``.
    """
    if pi.n != 4:
        raise DomainError("cross-section classification applies to n=4 only")
    p1 = pi.pi[0]
    if p1 >= 1 - CROSS_SECTION_RTOL * max(1, abs(p1)):
        return "A"
    return "B"


def _q4(pi: KernelSpectrum):
    if pi.n != 4:
        raise DomainError("formula applies to n=4 only")
    return pi.pi


def cut_point_oc(pi: KernelSpectrum) -> tuple:
    """Hyperplane hit on the line through O and C; on the edge iff pi_1 >= 1."""
    p1, _, _, _ = _q4(pi)
    d = 4 * p1 - 1
    return (p1 / d, p1 / d, p1 / d, (p1 - 1) / d)


def cut_point_oa(pi: KernelSpectrum) -> tuple:
    """Hit on edge OA; inside for every valid spectrum (pi_4 <= 0)."""
    _, _, _, p4 = _q4(pi)
    d = 1 - 4 * p4
    return ((1 - p4) / d, -p4 / d, -p4 / d, -p4 / d)


def cut_point_ob(pi: KernelSpectrum) -> tuple:
    """Hit on edge OB; inside for every valid spectrum (pi_3 + pi_4 <= 0)."""
    p1, p2, p3, p4 = _q4(pi)
    top = p1 + p2
    bottom = p3 + p4
    d = 2 * (top - bottom)
    return (top / d, top / d, -bottom / d, -bottom / d)


def cut_point_ac(pi: KernelSpectrum) -> tuple:
    """Hit on edge AC; on the edge iff pi_1 <= 1 (and pi_4 <= 0)."""
    p1, _, _, p4 = _q4(pi)
    d = 1 - p1 - 3 * p4
    return ((1 - (p1 + p4)) / d, -p4 / d, -p4 / d, 0 * p1)


def cut_point_bc(pi: KernelSpectrum) -> tuple:
    """Hit on edge BC; on the edge iff 1/2 <= pi_2 and pi_2 <= pi_1 <= 1."""
    p1, p2, _, _ = _q4(pi)
    d = p1 + 3 * p2 - 1
    return (p2 / d, p2 / d, (p1 + p2 - 1) / d, 0 * p1)


def cut_point_ab_ray(pi: KernelSpectrum) -> tuple:
    """Hyperplane hit on the ray through edge AB (never on the edge itself)."""
    _, _, p3, p4 = _q4(pi)
    d = p3 - p4
    if d == 0:
        raise DomainError("ray through edge AB is parallel to the hyperplane")
    return (p3 / d, -p4 / d, 0 * p3, 0 * p3)


def ab_exclusion_conditions(pi: KernelSpectrum) -> bool:
    """True when the hit would lie on edge AB: provably never for valid spectra."""
    _, _, p3, p4 = _q4(pi)
    return p3 > p4 and p4 < 0 and p3 + p4 > 0 and p3 > 0


def signed_decomposition_b_type(pi: KernelSpectrum) -> SignedSimplexList:
    """Two-term signed split of the quadrilateral-base positivity polytope.

    The cone over the extended triangle section, minus the spill-over
    tetrahedron beyond vertex C.  The extended point on line OC lies outside
    the state simplex for B-type spectra; the signed indicator functions
    still sum to the polytope's almost everywhere.
    """
    if classify_cross_section(pi) != "B":
        raise DomainError("signed split applies to B-type spectra only")
    one = 1 + 0 * pi.pi[0]  # 1 in the spectrum's arithmetic
    o = tuple(one / 4 for _ in range(4))
    c = (one / 3, one / 3, one / 3, 0 * one)
    plus = Simplex((o, cut_point_oc(pi), cut_point_oa(pi), cut_point_ob(pi)),
                   (1, 1, 1, 1))
    minus = Simplex((c, cut_point_oc(pi), cut_point_ac(pi), cut_point_bc(pi)),
                    (1, 1, 1, 1))
    return SignedSimplexList(((1, plus), (-1, minus)))


# -- volumes and membership ----------------------------------------------------


def determinant(rows: list[list]):
    """Exact-capable determinant by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    mat = [list(r) for r in rows]
    det = 1
    for col in range(n):
        pivot = None
        best = None
        for r in range(col, n):
            entry = mat[r][col]
            if entry != 0:
                if isinstance(entry, Fraction):
                    pivot = r
                    break
                if best is None or abs(entry) > best:
                    best = abs(entry)
                    pivot = r
        if pivot is None:
            return 0 * det
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det = det * mat[col][col]
        inv = mat[col][col]
        for r in range(col + 1, n):
            if mat[r][col] != 0:
                factor = mat[r][col] / inv
                for c in range(col, n):
                    mat[r][c] = mat[r][c] - factor * mat[col][c]
    return det


def euclidean_volume(simplex: Simplex):
    """Lebesgue volume of the simplex in its chart coordinates.

    ``|det(v_1 - v_0, ..., v_m - v_0)| / m!`` after dropping the dependent
    last coordinate when the vertices carry one more coordinate than the
    dimension.  Affinely dependent vertices give zero.
    """
    chart = simplex.chart_vertices()
    m = simplex.dim
    if m == 0:
        return 1
    base = chart[0]
    rows = [[v[i] - base[i] for i in range(m)] for v in chart[1:]]
    det = determinant(rows)
    return det if det >= 0 else -det


def solve_linear(rows: list[list], rhs: list):
    n = len(rows)
    mat = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = None
        best = None
        for r in range(col, n):
            entry = mat[r][col]
            if entry != 0:
                if isinstance(entry, Fraction):
                    pivot = r
                    break
                if best is None or abs(entry) > best:
                    best = abs(entry)
                    pivot = r
        if pivot is None:
            raise DomainError("singular system")
        mat[col], mat[pivot] = mat[pivot], mat[col]
        inv = mat[col][col]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                factor = mat[r][col] / inv
                for c in range(col, n + 1):
                    mat[r][c] = mat[r][c] - factor * mat[col][c]
    return [mat[i][n] / mat[i][i] for i in range(n)]


def barycentric_coordinates(point: Sequence, simplex: Simplex) -> list:
    """Coordinates of ``point`` w.r.t. the simplex vertices (chart solve)."""
    chart = simplex.chart_vertices()
    target = list(point)
    if len(target) == simplex.ambient_dim and simplex.ambient_dim == simplex.dim + 1:
        target = target[:-1]
    base = chart[0]
    m = simplex.dim
    rows = [[chart[j + 1][i] - base[i] for j in range(m)] for i in range(m)]
    rhs = [target[i] - base[i] for i in range(m)]
    lam = solve_linear(rows, rhs)
    return [1 - sum(lam)] + lam


def point_in_simplex(point: Sequence, simplex: Simplex, tol=1e-12) -> bool:
    try:
        bary = barycentric_coordinates(point, simplex)
    except DomainError:
        return False
    return all(b >= -tol for b in bary)
