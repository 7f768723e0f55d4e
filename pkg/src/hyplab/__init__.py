"""Word-length, growth, boundary-measure and convolution-norm computations
for word-hyperbolic groups."""

from .boundary import (
    BoundaryModel,
    MCEstimate,
    RaySample,
    build_boundary,
    canonical_geodesic,
    cylinder_measure,
    gromov_product_boundary,
    radial_pairing,
    rn_derivative,
    sample_ray,
    sample_rays,
    spherical_pairing,
    spherical_via_tail,
    tail_measure,
)
from .enumeration import (
    DEFAULT_CAP,
    BallIndex,
    GrowthEstimate,
    build_ball_index,
    estimate_growth,
    sphere_sizes,
    sphere_sizes_exact,
)
from .errors import *  # noqa: F401,F403
from .experiments import (
    ExperimentRow,
    FitResult,
    default_schedule,
    fit_exponent,
    parse_group_spec,
    read_rows,
    run_sharpness,
    write_rows,
)
from .groups import (
    Alphabet,
    GroupBackend,
    HyperbolicityEstimate,
    Word,
    compile_cyclicprod,
    estimate_delta,
    free_group,
    gromov_product,
    invert,
    load_rws,
    loads_rws,
    multiply,
    normalize,
)
from .opnorm import (
    CompressedOperator,
    NormEstimate,
    apply_compressed,
    build_compressed,
    eval_radial_combination,
    free_radial_oracle,
    norm_lower_bound,
    oracle_for_backend,
    radial_polynomials,
)
from .radial import (
    RadialElement,
    haagerup_upper_bounds,
    l2_norm,
    make_element,
    parse_element_spec,
    theorem_rhs,
    weighted_norm,
)

__version__ = "0.1.0"
