"""Yuen-Kim key-distribution simulator for intensity-keyed coherent links.

Layers, bottom up:

  quantum_core  coherent-state overlaps, amplitude grids, Gram matrices and
                span-basis density operators
  detection     minimum-error and square-root-measurement bounds, Poisson
                threshold receiver
  protocol      running-key expansion, pair/polarity encoding, eavesdropper
                density operators
  simulation    channel model, eavesdropper models, Monte-Carlo runs
  experiments   canned experiments with CSV/SVG output (CLI: ykqkd)
"""

from .quantum_core import (
    AmplitudeGrid,
    CoherentState,
    FockExpansion,
    GramRoots,
    SpanOperator,
    StateMixture,
    TwoModeCipheredState,
    build_grid,
    coherent_overlap,
    fock_amplitudes,
    gram_matrix,
    hermitian_sqrt_and_invsqrt,
    mixture_in_span,
    two_mode_cipher_state,
    two_mode_overlap,
)
from .detection import (
    DiscriminationResult,
    PoissonReceiver,
    bob_error_ideal,
    helstrom_mixed_binary,
    helstrom_pure_binary,
    neighbor_lower_bound,
    poisson_threshold_receiver,
    pure_guess_error,
    srm_error,
)
from .protocol import (
    BitAssignment,
    KeyStream,
    PairAssignment,
    Polarity,
    ProtocolConfig,
    SymbolChoice,
    bits_per_symbol,
    decode_count,
    encode_bit,
    eve_density_operators,
    expand_key,
    select_basis,
)
from .simulation import (
    ChannelConfig,
    EveModel,
    OpaqueEve,
    RunResult,
    TranslucentEve,
    amplitude_transmission,
    opaque_eve_act,
    run_protocol,
    sample_photon_count,
    tap_split,
    translucent_eve_bounds,
)

__version__ = "0.1.0"
