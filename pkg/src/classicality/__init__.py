"""Positivity polytopes and classicality indicators for N-level systems."""

from .errors import CapacityError, ClassicalityError, ContractViolation, DomainError
from .geometry import (Hyperplane, Polytope, SignedSimplexList, Simplex,
                       classicality_margin, classify_cross_section,
                       euclidean_volume, ordered_simplex, positivity_polytope,
                       signed_decomposition_b_type, triangulate)
from .indicators import (HierarchyReport, IndicatorResult, hierarchy_check,
                         indicator, q3_degenerate_closed_form,
                         q3_regular_closed_form, q4_a_type_closed_form)
from .polyalg import (AffineChartMap, LinearFormProduct, SparsePolynomial,
                      as_linear_form_product, bombieri, homogeneous_parts,
                      pullback)
from .quadrature import (QuadratureResult, compositions, integrate_dirichlet,
                         integrate_la, integrate_lasserre, integrate_mc,
                         permanent)
from .strata import (DegeneracyType, KernelSpectrum, StateSpectrum,
                     StratumDensity, degeneracy_orbit, enumerate_strata,
                     spectrum_from_moduli, stratum_density)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
