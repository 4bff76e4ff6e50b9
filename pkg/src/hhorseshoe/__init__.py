"""Numerics for an explicit partially hyperbolic horseshoe.

The horseshoe F acts on the cube [0, 1]^3; its central direction is driven by
the two interval maps ``f0 = f`` and ``f1(y) = sigma (1 - y)`` along the
golden-mean shift.  The package evaluates F and f exactly, certifies the
central contraction along words, computes periodic exponents and brackets
the pressure of ``t log|DF| on E^c`` together with its phase transition t0.

Modules:

* :mod:`hhorseshoe.core_map` - the map, parameters and the central map f
* :mod:`hhorseshoe.symbolic` - words of the golden-mean shift
* :mod:`hhorseshoe.central_ifs` - compositions, derivatives, certificates
* :mod:`hhorseshoe.thermo` - pressure, equilibria, periodic exponents, t0
* :mod:`hhorseshoe.cli` - the ``hh`` command
"""

__version__ = "0.1.0"

from .core_map import DEFAULT_PARAMS, P, Params, Point3, Q, apply_F, df_iter, f_iter, orbit, validate_params
from .errors import (
    ConstraintViolation,
    ConvergenceFailure,
    DomainError,
    Escaped,
    HorseshoeError,
    LimitExceeded,
    NonAdmissible,
    PatternError,
)
from .symbolic import enumerate_periodic, enumerate_words, is_admissible, sft_entropy
from .central_ifs import (
    CentralInterval,
    compose_phi,
    contraction_certificate,
    dphi_chain,
    dphi_product,
    fiber_enclosure,
    geometric_rate,
    periodic_fixed_point,
    reconstruct_point,
)
from .thermo import (
    build_transfer,
    empirical_measure_stats,
    find_t0,
    lyap_of_periodic,
    markov_equilibrium,
    pressure,
    pressure_curve,
    t0_variational,
)
from ._kernels import BACKEND
