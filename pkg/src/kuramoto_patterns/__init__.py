"""Search, verify, and catalog phase-locked states of sine-coupled oscillators
on cubic graphs."""

from .analytic import (
    RootResult,
    beta_star,
    double_ring_phases,
    e_energy,
    f_energy,
    g50_angles,
    loop_energy,
    moebius_phases,
    twisted_phases,
    twisted_root,
    two_pattern_angles,
)
from .continuation import BranchPoint, Homotopy, align_to_double_ring, trace_branch
from .dynamics import (
    FixedPointReport,
    FlowResult,
    classify,
    energy,
    field,
    flow_to_equilibrium,
    gauge_normalize,
    jacobian,
    newton_refine,
    winding_number,
    wrap_angle,
)
from .graphs import (
    CubicGraph,
    Graph,
    Graph6Error,
    NotCubicError,
    double_ring,
    encode_graph6,
    fundamental_cycles,
    high_energy_e,
    high_energy_f,
    invariant_key,
    is_connected,
    moebius_ladder,
    parse_graph6,
    patternless_chain,
    read_graph6_file,
    twisted_ring,
    validate_cubic,
    write_graph6_file,
)
from .search import (
    BasinEstimate,
    GraphReport,
    PatternRecord,
    SearchConfig,
    aggregate,
    cluster_and_fit,
    dedup_by_energy,
    sample_batch,
    sample_initial,
    search_graph,
)

__version__ = "0.1.0"
