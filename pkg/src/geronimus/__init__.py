"""Geronimus transforms of classical measures: dmu/(x-c) plus a point mass at c.

The package computes the transformed orthogonal families, their zeros and
interlacing/monotonicity behavior in the mass, ladder operators, the
holonomic differential equation, and the electrostatic model of the zeros,
for the Laguerre and Jacobi weights.
"""

from .errors import (
    DomainViolationError,
    GeronimusError,
    IllConditionedError,
    NumericalFailureError,
    ParameterDomainError,
    ShiftInsideSupportError,
    SimplicityViolationError,
    SingularEvaluationError,
)
from .measures import (
    Family,
    MeasureSpec,
    RecurrenceTable,
    StructureRelation,
    classical_recurrence,
    eval_monic,
    eval_monic_derivs,
    jacobi,
    kernel,
    laguerre,
    structure_relation,
)
from .secondkind import SecondKindTable, f0, second_kind
from .transform import (
    ConnectionData,
    GeronimusContext,
    christoffel_kernel_poly,
    connection_data,
    eval_Qc,
    eval_QcN,
    gram_schmidt_oracle,
    kernel_c,
    kernel_c_confluent,
    make_context,
)
from .zeros import (
    InterlacingReport,
    LimitRates,
    SweepTrajectory,
    ZeroReport,
    interlacing_report,
    limit_rates,
    minimum_mass,
    minimum_mass_bisection,
    sweep,
    zeros_divided,
    zeros_geronimus,
    zeros_kernel_poly,
    zeros_orthogonal,
)
from .ladder import (
    EquilibriumReport,
    LadderCoefficientSet,
    OdeCoefficientSet,
    equilibrium_residual,
    external_potential,
    ladder_coefficients,
    ode_coefficients,
)

__version__ = "0.1.0"
