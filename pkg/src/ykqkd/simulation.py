"""Monte-Carlo link runs: attenuation, eavesdropper action, photon counting.

The channel is described by its amplitude transmission kappa = 10^(-dB/20);
a pulse of amplitude alpha arrives at the receiver as kappa*alpha plus dark
counts.  Two eavesdropper models are simulated:

  * translucent: a beam-splitter tap takes amplitude fraction eta off the
    pulse, leaving sqrt(1 - eta^2) for the receiver (energy conserving);
  * opaque: the full pulse is intercepted, the grid level is estimated by
    maximum likelihood on a photon count, and a fresh full-power symbol is
    resent on the estimated level's pair under a guessed polarity.

Even a perfect level estimate does not reveal the bit, so the opaque resend
scrambles the receiver's bit stream to a ~1/2 error rate (the polarity bit
is invisible without the running key), which is what the intrusion check
looks for.  Runs are deterministic given (configs, seed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quantum_core import CoherentState
from .detection import (
    poisson_threshold_receiver,
    neighbor_lower_bound,
    pure_guess_error,
    srm_error,
    helstrom_mixed_binary,
)
from .protocol import (
    BitAssignment,
    PairAssignment,
    ProtocolConfig,
    bits_per_symbol,
    eve_density_operators,
)

__all__ = [
    "ChannelConfig",
    "TranslucentEve",
    "OpaqueEve",
    "EveModel",
    "RunResult",
    "amplitude_transmission",
    "tap_split",
    "sample_photon_count",
    "opaque_eve_act",
    "translucent_eve_bounds",
    "run_protocol",
]

# Bob BER above this flags an intruder; far above any clean-link BER in the
# standard sweeps, far below the ~1/2 an intercept-resend attack produces.
DEFAULT_DETECTION_THRESHOLD = 0.15


@dataclass(frozen=True)
class ChannelConfig:
    """Fiber span plus lumped attenuation, and the receiver's dark counts."""

    fiber_length_km: float = 0.0
    loss_db_per_km: float = 0.2
    extra_attenuation_db: float = 0.0
    dark_mean: float = 0.0  # counts per slot

    def __post_init__(self):
        for name in ("fiber_length_km", "loss_db_per_km", "extra_attenuation_db", "dark_mean"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @property
    def total_db(self) -> float:
        return self.fiber_length_km * self.loss_db_per_km + self.extra_attenuation_db


def amplitude_transmission(cfg: ChannelConfig) -> float:
    """Amplitude factor kappa = 10^(-total_dB/20); 20 dB gives kappa = 0.1."""
    return 10.0 ** (-cfg.total_db / 20.0)


@dataclass(frozen=True)
class TranslucentEve:
    """Beam-splitter tap taking amplitude fraction eta_amp (power eta_amp^2)."""

    eta_amp: float

    def __post_init__(self):
        if not 0.0 < self.eta_amp < 1.0:
            raise ValueError(f"tap fraction must lie in (0, 1), got {self.eta_amp}")


@dataclass(frozen=True)
class OpaqueEve:
    """Intercept-resend: measure the full pulse, resend the estimated level."""


EveModel = TranslucentEve | OpaqueEve | None


@dataclass(frozen=True)
class RunResult:
    """Outcome of a Monte-Carlo protocol run."""

    n_symbols: int
    bob_errors: int
    bob_ber: float
    eve_bit_error_bound: float
    eve_state_id_bounds: tuple[float, float, float]  # (lower, srm upper, pure guess)
    eve_detected: bool
    rng_seed: int
    bob_mean_count: float  # diagnostic: observed counts per slot at the receiver


def tap_split(state: CoherentState, eta_amp: float) -> tuple[CoherentState, CoherentState]:
    """Split a pulse on a beam splitter: (eavesdropper arm, receiver arm).

    The tap takes amplitude eta_amp * alpha, the through arm keeps
    sqrt(1 - eta_amp^2) * alpha, so photon number is conserved exactly.
    """
    if not 0.0 < eta_amp < 1.0:
        raise ValueError(f"tap fraction must lie in (0, 1), got {eta_amp}")
    return state.scaled(eta_amp), state.scaled(math.sqrt(1.0 - eta_amp**2))


def sample_photon_count(state: CoherentState, dark_mean: float, rng: np.random.Generator) -> int:
    """One direct-detection sample: Poisson with mean |alpha|^2 + dark."""
    if dark_mean < 0:
        raise ValueError(f"dark_mean must be >= 0, got {dark_mean}")
    return int(rng.poisson(state.mean_photon_number + dark_mean))


def _ml_count_boundaries(means: np.ndarray) -> np.ndarray:
    """Count thresholds between adjacent Poisson hypotheses with these means.

    Level j+1 is more likely than level j exactly when the count reaches
    (mu_{j+1} - mu_j) / (ln mu_{j+1} - ln mu_j); with increasing means these
    boundaries increase, so maximum likelihood reduces to a searchsorted.
    """
    return np.diff(means) / np.diff(np.log(means))


def _ml_levels(counts: np.ndarray, means: np.ndarray) -> np.ndarray:
    boundaries = _ml_count_boundaries(means)
    return np.searchsorted(boundaries, counts, side="right")


def _pair_members_by_level(assignment: PairAssignment) -> tuple[np.ndarray, np.ndarray]:
    """Per level: the (low, high) indices of a pair containing it.

    With the default offset the pairs partition the grid; for smaller offsets
    the first containing pair is used, and a level outside every pair maps to
    itself (resending it unchanged is the only symbol it can carry).
    """
    n = assignment.grid.n_levels
    low_of = np.arange(n)
    high_of = np.arange(n)
    seen = [False] * n
    for lo, hi in assignment.pairs:
        for member in (lo, hi):
            if not seen[member]:
                low_of[member], high_of[member] = lo, hi
                seen[member] = True
    return low_of, high_of


def opaque_eve_act(
    state: CoherentState, assignment: PairAssignment, rng: np.random.Generator
) -> tuple[CoherentState, int]:
    """Intercept a pulse, estimate the level, resend a re-encoded symbol.

    The eavesdropper knows the grid and the (public) pairing but not the
    running key.  She photon counts the full pulse and picks the grid level
    whose Poisson likelihood is maximal for her count; that estimate is
    returned for her state-identification statistics.  To pass the symbol on
    she must re-encode a bit, and the per-symbol polarity is keyed and
    invisible to her, so the resent full-power pulse sits on a uniformly
    guessed member of the estimated level's pair.  The guess decouples the
    low/high position from the data bit, which is what drives the receiver's
    error rate to ~1/2 and exposes the attack.

    Returns (resent state, estimated level index).
    """
    levels = np.asarray(assignment.grid.levels)
    count = rng.poisson(state.mean_photon_number)
    estimate = int(_ml_levels(np.asarray([count]), levels**2)[0])
    low_of, high_of = _pair_members_by_level(assignment)
    resend = high_of[estimate] if rng.integers(2) else low_of[estimate]
    return CoherentState(levels[resend]), estimate


def translucent_eve_bounds(
    assignment: PairAssignment,
    eta_amp: float,
    scheme: BitAssignment = BitAssignment.OVERLAP_PAIRWISE,
) -> tuple[float, tuple[float, float]]:
    """Analytic limits on what a tap at amplitude fraction eta_amp learns.

    Returns (bit_error, (state_id_lower, state_id_srm_upper)): the minimum
    error on the bit value given the key-averaged density operators, and the
    closest-pair / square-root-measurement bracket on identifying which of
    the 2M levels was sent.  eta_amp = 1 gives the full-interception
    reference used for the opaque model.
    """
    if not 0.0 < eta_amp <= 1.0:
        raise ValueError(f"amplitude fraction must lie in (0, 1], got {eta_amp}")
    rho1, rho0 = eve_density_operators(assignment, scheme, eta_amp)
    bit_error = helstrom_mixed_binary(rho1, rho0, 0.5).error_probability
    lower = neighbor_lower_bound(assignment.grid, eta_amp).error_probability
    upper = srm_error(assignment.grid.states(eta_amp)).error_probability
    return bit_error, (lower, upper)


def run_protocol(
    pcfg: ProtocolConfig,
    ccfg: ChannelConfig,
    eve: EveModel = None,
    n_symbols: int = 10_000,
    seed: int = 0,
    detection_threshold: float = DEFAULT_DETECTION_THRESHOLD,
) -> RunResult:
    """Simulate n_symbols of the keyed link and tally receiver errors.

    Per symbol: the running key picks pair and polarity, a fresh uniform data
    bit is encoded onto the grid, the eavesdropper (if any) acts, the channel
    attenuates, and the receiver photon-counts and decodes with the shared
    key.  Receiver thresholds are calibrated for the clean link (the tap, if
    any, is unknown to the legitimate parties).

    The analytic eavesdropper columns describe the model that was simulated:
    a translucent tap at its eta_amp, full interception for the opaque model,
    and for an unmolested run the reference tap at eta_amp = kappa (equal
    amplitude factors for receiver and eavesdropper).

    Args:
        pcfg: grid, scheme and key configuration shared by Alice and Bob.
        ccfg: channel loss and dark counts.
        eve: None, TranslucentEve or OpaqueEve.
        n_symbols: symbols to simulate (must be >= 1).
        seed: Monte-Carlo seed; identical inputs give identical results.
        detection_threshold: receiver BER above which an intruder is flagged.

    Warns when any pair's high level arrives below one mean count per slot
    (link under the receiver sensitivity floor).
    """
    if n_symbols < 1:
        raise ValueError(f"n_symbols must be >= 1, got {n_symbols}")
    rng = np.random.default_rng(seed)
    grid = pcfg.grid()
    assignment = pcfg.assignment()
    kappa = amplitude_transmission(ccfg)
    levels = np.asarray(grid.levels)

    # per-pair thresholds for the clean-link means
    thresholds = np.empty(assignment.n_pairs, dtype=np.int64)
    for i, (lo, hi) in enumerate(assignment.pairs):
        receiver, _ = poisson_threshold_receiver(
            (kappa * levels[lo]) ** 2, (kappa * levels[hi]) ** 2, ccfg.dark_mean
        )
        thresholds[i] = receiver.threshold

    min_high_mean = min((kappa * levels[hi]) ** 2 for _, hi in assignment.pairs)
    if min_high_mean < 1.0:
        warnings.warn(
            f"high-level mean count {min_high_mean:.3g} under 1 per slot: "
            "link is below the receiver sensitivity floor",
            stacklevel=2,
        )

    width = bits_per_symbol(pcfg.m)
    key_bits = (
        pcfg.keystream().bits(n_symbols * width).reshape(n_symbols, width).astype(np.int64)
    )
    pair_idx = np.zeros(n_symbols, dtype=np.int64)
    for column in key_bits[:, :-1].T:  # pair bits, most significant first
        pair_idx = (pair_idx << 1) | column
    polarity = key_bits[:, -1]

    data = rng.integers(0, 2, n_symbols, dtype=np.int64)
    send_high = data ^ polarity
    low_index = np.asarray([pair[0] for pair in assignment.pairs], dtype=np.int64)
    level_idx = low_index[pair_idx] + assignment.offset * send_high
    alice_amps = levels[level_idx]

    if eve is None:
        bob_amps = kappa * alice_amps
        eve_scale = kappa
    elif isinstance(eve, TranslucentEve):
        bob_amps = kappa * math.sqrt(1.0 - eve.eta_amp**2) * alice_amps
        eve_scale = eve.eta_amp
    elif isinstance(eve, OpaqueEve):
        eve_counts = rng.poisson(alice_amps**2)
        estimates = _ml_levels(eve_counts, levels**2)
        low_of, high_of = _pair_members_by_level(assignment)
        polarity_guess = rng.integers(0, 2, n_symbols)
        resend_idx = np.where(polarity_guess, high_of[estimates], low_of[estimates])
        bob_amps = kappa * levels[resend_idx]
        eve_scale = 1.0
    else:
        raise TypeError(f"unsupported eavesdropper model {eve!r}")

    counts = rng.poisson(bob_amps**2 + ccfg.dark_mean)
    decoded = (counts >= thresholds[pair_idx]).astype(np.int64) ^ polarity
    bob_errors = int(np.count_nonzero(decoded != data))
    bob_ber = bob_errors / n_symbols

    bit_error, (state_lower, state_srm) = translucent_eve_bounds(
        assignment, eve_scale, pcfg.scheme
    )
    guess = pure_guess_error(grid.n_levels).error_probability

    return RunResult(
        n_symbols=n_symbols,
        bob_errors=bob_errors,
        bob_ber=bob_ber,
        eve_bit_error_bound=bit_error,
        eve_state_id_bounds=(state_lower, state_srm, guess),
        eve_detected=bool(bob_ber > detection_threshold),
        rng_seed=seed,
        bob_mean_count=float(np.mean(counts)),
    )
