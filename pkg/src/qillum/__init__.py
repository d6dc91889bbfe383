"""Truncated-Fock-space toolkit for entangled-probe target detection.

Probe engineering (squeezed pairs plus local and nonlocal conditional
photon operations), noisy target channels, Chernoff-type discrimination
bounds, receiver statistics, and a CSV-producing command line front end.
"""

from .channel import ChannelParams, KrausChannel, hypothesis_pair, pure_loss, thermal_attenuator_kraus
from .discriminate import (
    DiscriminationReport,
    build_report,
    chernoff_profile,
    chernoff_q,
    error_curve,
    error_exponent,
    gain_ratio,
    helstrom_error,
)
from .engineer import (
    ConditionalOutcome,
    NgoSpec,
    SqueezeParams,
    apply_local_ngo,
    b_coefficient,
    entanglement_entropy,
    marginal_state,
    nlpa_state,
    nlpa_success_probability,
    protocol_oracle,
    tmss,
    von_neumann_entropy,
)
from .fock import (
    CutoffError,
    DensityOperator,
    FockDims,
    FockRegister,
    ModeOperator,
    NumericalIntegrityError,
    annihilation,
    beam_splitter_unitary,
    creation,
    hermitian_power,
    number_operator,
    partial_trace,
    tensor,
    thermal_state,
    trace_norm,
)
from .receiver import ReceiverStats, moments, observable_dhd, observable_photon_diff, receiver_pipeline, snr_and_error

__version__ = "0.1.0"
