"""BB84 key rates under a biased bit-transmission probability.

Modules:
  channel  - affine/Choi/Kraus qubit channel representations and validation
  entropy  - classical and von Neumann entropies, conditional entropies given Eve
  keyrate  - worst-case completion, closed forms, optimum-bias search, sweeps
  simulate - seeded Monte Carlo protocol runs and channel estimation
  cli      - command-line front end
"""

from .channel import (
    BlochVector,
    ChoiState,
    DensityMatrix,
    KrausSet,
    QubitChannel,
    apply_channel,
    bloch_to_density,
    channel_to_choi,
    choi_to_kraus,
    complementary_channel,
    density_to_bloch,
    is_tpcp,
)
from .entropy import (
    JointDistribution,
    SourceDistribution,
    binary_entropy,
    conditional_shannon,
    h_x_given_e,
    h_y_given_e,
    joint_distribution,
    von_neumann_entropy,
)
from .errors import (
    BiasedBB84Error,
    DomainError,
    Infeasible,
    InsufficientData,
    InvalidChoi,
    NonPhysicalState,
)
from .keyrate import (
    DIRECT,
    REVERSE,
    KeyRateReport,
    OmegaParams,
    closed_form_rate,
    feasible_ryy_interval,
    key_rate,
    optimize_bias,
    stationarity_residual,
    sweep,
    worst_case_ambiguity,
)
from .simulate import (
    OmegaEstimate,
    OutcomeCounts,
    ProtocolConfig,
    end_to_end_rate,
    estimate_omega,
    exact_counts,
    simulate,
)

__version__ = "0.1.0"
