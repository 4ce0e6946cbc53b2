"""Blaschke products and weak function-space diagnostics on the unit disc."""
from .blaschke import (
    BlaschkeProduct,
    Evaluation,
    SingularAtom,
    Zero,
    ZeroSequence,
    blaschke_factor,
    boundary_derivative_modulus,
    derivative,
    dump_zeros,
    evaluate,
    gen_exponential,
    gen_growing_density,
    gen_stacked_carleson,
    load_zeros,
    singular_atom_derivative,
    singular_atom_eval,
    stacked_box,
    truncation_depth,
)
from .disc import (
    Annulus,
    Arc,
    CarlesonBox,
    DiscPoint,
    FullDisc,
    PseudoDisc,
    SectorT,
    StolzAngle,
    annulus_index,
    mobius,
    mu_p_closed_form,
    pseudo_distance,
    region_contains,
)
from .errors import (
    DepthLimit,
    EvaluationFailure,
    IllConditioned,
    InconclusiveDepth,
    QuadratureStall,
    RangeTooNarrow,
    TailBudgetExceeded,
    WeakBesovError,
    ZeroOnRay,
)
from .measure import (
    Distribution,
    MeasureEstimate,
    PolarGrid,
    integrate_region,
    level_set_measure,
    refine,
    weighted_area_level_set,
)
from .norms import (
    LambdaGrid,
    NormEstimate,
    growth_norm,
    hardy_norm,
    hardy_weak_norm,
    hp_integral_mean,
    hp_weak_norm,
    kolmogorov_constant,
    nontangential_max,
    tilde_L1w_norm,
    verdict_from_trace,
    weak_quasinorm_mu_p,
)
from .zeros import (
    ClassificationVerdict,
    OccupancyProfile,
    annuli_counts,
    carleson_ratio,
    classify,
    exponential_constant,
    separation_delta,
)

__version__ = "0.1.0"
