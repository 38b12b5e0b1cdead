"""Exact workbench for finite hidden-variable models of Bell-type scenarios."""

from .analysis import (
    AnalysisReport,
    ChshPatternError,
    DeterminismWitness,
    FactorabilityWitness,
    analyze,
    chsh,
    correlation,
    is_ch_factorizable,
    is_deterministic,
)
from .demos import DEMOS, build_demo
from .determinize import (
    AugmentedScenario,
    NoisePartition,
    ResponseTable,
    determinize,
    is_gamma_factorizable,
    marginalize,
)
from .factorize import (
    FactorizedModel,
    NotFactorizable,
    build_shared_noise,
    factorize_independent,
    reconstruct,
    verify_factorization,
)
from .rational import Rational, parse_rational, render
from .scenario import (
    Context,
    LambdaPoint,
    LambdaSpace,
    Measurement,
    Scenario,
    ScenarioError,
    ValidationReport,
    marginal,
    validate,
)

__version__ = "0.1.0"
