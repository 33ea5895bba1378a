"""Spectra of Laplacians with four-parameter singular interactions.

Subpackages by capability:

- core: coupling validation, the 2x2 surface matrix, closed-form band
  bottoms, form lower bounds.
- interval: exact 1-D negative spectrum via characteristic-function
  scanning with a determinant cross-check.
- radial: sphere s-wave matching and radially reduced finite-difference
  spectra for disks/balls with the interaction on a concentric
  circle/sphere.
- fem2d: 2-D P1 finite elements on a disk+annulus mesh with doubled
  interface traces.
- harness: operator-ordering comparisons, bound-state certificates,
  essential-spectrum bound checks.
- cli: JSON-config batch driver (`surfint <task> --config ...`).
"""

from .core import (
    CONSTRAINED,
    FREE,
    CouplingField,
    FormBound,
    RegionCoupling,
    ThetaMatrix,
    delta_field,
    delta_prime_field,
    form_lower_bound,
    m_infinity,
    theta_matrix,
    uniform_field,
    validate_coupling,
)
from .interval import (
    IntervalProblem,
    IntervalSpectrum,
    RootBracket,
    characteristic_ghj,
    characteristic_scaled,
    determinant_oracle,
    eigenfunction_coefficients,
    expected_root_count,
    m_interval,
    m_interval_perturbed,
    matching_matrix,
    negative_spectrum,
)
from .report import SpectrumReport

__version__ = "0.1.0"

__all__ = [
    "CONSTRAINED",
    "FREE",
    "CouplingField",
    "FormBound",
    "RegionCoupling",
    "ThetaMatrix",
    "delta_field",
    "delta_prime_field",
    "form_lower_bound",
    "m_infinity",
    "theta_matrix",
    "uniform_field",
    "validate_coupling",
    "IntervalProblem",
    "IntervalSpectrum",
    "RootBracket",
    "characteristic_ghj",
    "characteristic_scaled",
    "determinant_oracle",
    "eigenfunction_coefficients",
    "expected_root_count",
    "m_interval",
    "m_interval_perturbed",
    "matching_matrix",
    "negative_spectrum",
    "SpectrumReport",
    "__version__",
]
