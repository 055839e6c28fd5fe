"""Min-SI RF beamforming with joint Tx/Rx sub-array selection for full-duplex massive MIMO."""

from .baselines import DBFSolution, OracleSolution, dbf, exhaustive_oracle
from .beamforming import (
    RX,
    TX,
    FeasibleWindow,
    PhaseResponse,
    Sense,
    SteeringVector,
    beampattern,
    degradation_db,
    directivity,
    feasible_window,
    first_null_beamwidth,
    phase_response,
    steering_vector,
)
from .channel import (
    DEFAULT_GRID,
    FrequencyGrid,
    SIChannelTensor,
    SubChannel,
    extract_subchannel,
    generate_synthetic,
    slice_bandwidth,
)
from .geometry import ArrayGeometry, SubArrayKind, SubArraySpec, element_position, subarray_count, subarray_elements
from .metric import SuppressionReport, a_si
from .pso import Inertia, OptimizationResult, PerturbationVector, PSOConfig, SwarmState, fitness, optimize
from .tensorio import load, save

__version__ = "0.1.0"
