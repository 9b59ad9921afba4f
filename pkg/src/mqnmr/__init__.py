"""Multiple-quantum NMR dynamics of dipolar-coupled spin-1/2 clusters."""

from .basis import (
    BasisInfo,
    build_basis,
    collective_iz,
    equilibrium_state,
    intermediate_state,
    single_spin_ops,
    trace_iz_squared,
)
from .coherence import CoherenceSpectrum, coherence_order, mq_filter, mq_spectrum, scan_trajectory
from .dynamics import Propagator, diagonalize, evolve, evolve_series, propagator_for
from .geometry import (
    SpinSystem,
    chain_couplings,
    coupling_from_geometry,
    cyclopentane_couplings,
    load_couplings,
    rectangle_couplings,
    ring_couplings,
)
from .hamiltonian import dipolar_secular, dq_average
from .kernels import BACKEND
from .protocol import (
    IDENTICALLY_ZERO,
    ProtocolResult,
    ProtocolSchedule,
    find_homqc_maxima,
    find_nd0q_zeros,
    partial_saturate,
    pseudopure_metrics,
    run_protocol,
)

__version__ = "0.1.0"
