"""Key-driven encoding of bits onto an intensity grid.

A short shared key seeds a linear-feedback shift register whose output (the
running key) selects, for every symbol, one of M level pairs and a polarity:

    DIRECT  : 0 -> low level,  1 -> high level
    SWAPPED : 0 -> high level, 1 -> low level

An eavesdropper without the running key sees, for either bit value, the same
mixture of grid levels, so the bit itself carries no information for her; she
can at best try to identify which level was sent.  The alternating scheme
(fixed bit labels on alternating levels, no key-driven swap) is also provided
for comparison: there the two bit mixtures differ and become distinguishable.

Per symbol the register supplies ceil(log2 M) + 1 bits: pair index first
(most significant bit first), polarity bit last.  M is restricted to powers
of two so the windows tile the stream exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .quantum_core import (
    AmplitudeGrid,
    CoherentState,
    SpanOperator,
    StateMixture,
    build_grid,
    mixture_in_span,
)
from .detection import PoissonReceiver

__all__ = [
    "KeyStream",
    "expand_key",
    "Polarity",
    "SymbolChoice",
    "BitAssignment",
    "PairAssignment",
    "ProtocolConfig",
    "bits_per_symbol",
    "select_basis",
    "encode_bit",
    "decode_count",
    "eve_density_operators",
]


class KeyStream:
    """Deterministic bit stream from a Fibonacci linear-feedback register.

    Stages are numbered 1..length; each step outputs the bit shifted out of
    stage `length` and feeds the XOR of the tapped stages back into stage 1.
    Maximal-length tap sets visit all 2^length - 1 non-zero states, and the
    stream is cached so the same instance can be read at arbitrary offsets.

    This expander gives Alice/Bob synchronization for simulation purposes
    only; it is not a cryptographic stream cipher.
    """

    def __init__(self, seed_bits: Sequence[int], taps: Sequence[int]):
        bits = tuple(int(b) for b in seed_bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError("seed must be a non-empty sequence of 0/1 bits")
        if not any(bits):
            raise ValueError("all-zero seed locks the register in a degenerate cycle")
        length = len(bits)
        taps = tuple(sorted(set(int(t) for t in taps)))
        if not taps or taps[0] < 1 or taps[-1] > length:
            raise ValueError(f"tap positions must lie in 1..{length}, got {taps}")
        self.length = length
        self.taps = taps
        # stage i lives at bit (length - i); stage `length` is bit 0
        self._seed_state = sum(b << (length - i) for i, b in enumerate(bits, start=1))
        self._tap_mask = sum(1 << (length - t) for t in taps)
        self._state = self._seed_state
        self._cache = bytearray()
        self._period: int | None = None

    @classmethod
    def from_int(cls, value: int, length: int, taps: Sequence[int]) -> "KeyStream":
        """Register seeded from an integer (stage 1 = most significant bit)."""
        if not 0 < value < (1 << length):
            raise ValueError(f"seed integer must lie in 1..{(1 << length) - 1}")
        bits = [(value >> (length - i)) & 1 for i in range(1, length + 1)]
        return cls(bits, taps)

    def _extend(self, n: int) -> None:
        cache = self._cache
        if self._period is None and len(cache) < n:
            state = self._state
            mask = self._tap_mask
            top = self.length - 1
            seed = self._seed_state
            append = cache.append
            while len(cache) < n:
                feedback = (state & mask).bit_count() & 1
                append(state & 1)
                state = (state >> 1) | (feedback << top)
                if state == seed:
                    # the state walk closed on the seed: the stream is periodic
                    self._period = len(cache)
                    break
            self._state = state
        if self._period is not None and len(cache) < n:
            one_period = bytes(cache[: self._period])
            while len(cache) < n:
                cache.extend(one_period)

    def bits(self, n: int) -> np.ndarray:
        """First n bits of the stream (uint8 array)."""
        if n < 0:
            raise ValueError(f"bit count must be >= 0, got {n}")
        self._extend(n)
        return np.frombuffer(bytes(self._cache[:n]), dtype=np.uint8)

    def window(self, start: int, length: int) -> np.ndarray:
        """Bits start .. start+length-1 of the stream."""
        if start < 0 or length < 0:
            raise ValueError("window offsets must be non-negative")
        self._extend(start + length)
        return np.frombuffer(bytes(self._cache[start : start + length]), dtype=np.uint8)


def expand_key(seed_bits: Sequence[int], taps: Sequence[int], n: int) -> np.ndarray:
    """First n running-key bits expanded from a short seed key."""
    return KeyStream(seed_bits, taps).bits(n)


class Polarity(Enum):
    """Which pair level carries bit 0."""

    DIRECT = 0  # 0 -> low, 1 -> high
    SWAPPED = 1  # 0 -> high, 1 -> low


class BitAssignment(Enum):
    """How bit values map onto grid levels."""

    # key-selected pair + polarity; both bit values average to the same mixture
    OVERLAP_PAIRWISE = "overlap-pairwise"
    # fixed alternating labels: level j carries bit (j mod 2), no polarity swap
    ALTERNATING_NO_OVERLAP = "alternating-no-overlap"


@dataclass(frozen=True)
class SymbolChoice:
    """Per-symbol basis selection read from the running key."""

    pair_index: int
    polarity: Polarity


@dataclass(frozen=True)
class PairAssignment:
    """M level pairs (j, j+offset) on a 2M-level grid, indices 0-based.

    With the default offset M every level belongs to exactly one pair and all
    pairs share the amplitude separation offset * alpha_max / (2M).
    """

    grid: AmplitudeGrid
    offset: int
    pairs: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        m = self.grid.m
        if not 1 <= self.offset <= m:
            raise ValueError(f"pair offset must lie in 1..{m}, got {self.offset}")
        pairs = tuple((j, j + self.offset) for j in range(m))
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_grid(cls, grid: AmplitudeGrid, offset: int | None = None) -> "PairAssignment":
        return cls(grid, grid.m if offset is None else offset)

    @property
    def n_pairs(self) -> int:
        return self.grid.m

    @property
    def pair_distance(self) -> float:
        return self.offset * self.grid.spacing

    def pair_levels(self, pair_index: int) -> tuple[float, float]:
        lo, hi = self.pairs[pair_index]
        return self.grid.levels[lo], self.grid.levels[hi]


def bits_per_symbol(m: int) -> int:
    """Running-key bits consumed per symbol: log2(M) pair bits + 1 polarity bit."""
    if m < 1 or m & (m - 1):
        raise ValueError(f"M must be a power of two for exact key windowing, got {m}")
    return (m.bit_length() - 1) + 1


def select_basis(stream: KeyStream, symbol_index: int, m: int) -> SymbolChoice:
    """Read symbol `symbol_index`'s basis choice from the running key.

    Consecutive symbols read disjoint windows of ceil(log2 M) + 1 bits; the
    pair index comes first (MSB first), the polarity bit last.
    """
    if symbol_index < 0:
        raise ValueError(f"symbol index must be >= 0, got {symbol_index}")
    width = bits_per_symbol(m)
    window = stream.window(symbol_index * width, width)
    pair_index = 0
    for bit in window[:-1]:
        pair_index = (pair_index << 1) | int(bit)
    return SymbolChoice(pair_index, Polarity(int(window[-1])))


def encode_bit(bit: int, choice: SymbolChoice, assignment: PairAssignment) -> CoherentState:
    """Map a data bit to the grid level selected by pair and polarity."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    lo, hi = assignment.pairs[choice.pair_index]
    send_high = bit ^ choice.polarity.value
    return CoherentState(assignment.grid.levels[hi if send_high else lo])


def decode_count(
    count: int,
    choice: SymbolChoice,
    assignment: PairAssignment,
    receiver: PoissonReceiver,
) -> int:
    """Invert encode_bit from a photon count, given the shared basis choice.

    The receiver must have been built for this pair's (attenuated) level
    means; counts at or above its threshold mean the high level was sent.
    """
    high = receiver.decide(count)
    return high ^ choice.polarity.value


def _pairwise_level_weights(assignment: PairAssignment) -> np.ndarray:
    # uniform pair choice, uniform polarity: each pair puts half its
    # probability on each member, for either bit value
    weights = np.zeros(assignment.grid.n_levels)
    per_pair = 1.0 / assignment.n_pairs
    for lo, hi in assignment.pairs:
        weights[lo] += 0.5 * per_pair
        weights[hi] += 0.5 * per_pair
    return weights


def eve_density_operators(
    assignment: PairAssignment,
    scheme: BitAssignment = BitAssignment.OVERLAP_PAIRWISE,
    eve_scale: float = 1.0,
) -> tuple[SpanOperator, SpanOperator]:
    """Key-averaged density operators (rho1, rho0) an eavesdropper must split.

    eve_scale is the amplitude fraction reaching the eavesdropper.  Under
    OVERLAP_PAIRWISE both bit values average to the identical level mixture,
    so rho1 = rho0 and her bit error is exactly 1/2.  Under
    ALTERNATING_NO_OVERLAP bit b is the uniform mixture over the levels with
    (1-based) index congruent to b mod 2.
    """
    if not eve_scale > 0:
        raise ValueError(f"eve_scale must be positive, got {eve_scale}")
    constellation = assignment.grid.states(eve_scale)
    if scheme is BitAssignment.OVERLAP_PAIRWISE:
        weights = _pairwise_level_weights(assignment)
        used = [k for k in range(len(weights)) if weights[k] > 0]
        mix1 = StateMixture(tuple((weights[k], k) for k in used))
        mix0 = StateMixture(tuple((weights[k], k) for k in used))
    elif scheme is BitAssignment.ALTERNATING_NO_OVERLAP:
        n = assignment.grid.n_levels
        mix1 = StateMixture.uniform([k for k in range(n) if (k + 1) % 2 == 1])
        mix0 = StateMixture.uniform([k for k in range(n) if (k + 1) % 2 == 0])
    else:
        raise ValueError(f"unknown bit assignment scheme {scheme!r}")
    return (
        mixture_in_span(mix1, constellation),
        mixture_in_span(mix0, constellation),
    )


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything Alice and Bob share: grid shape, scheme and the short key."""

    alpha_max: float
    m: int
    pairing_offset: int | None = None
    scheme: BitAssignment = BitAssignment.OVERLAP_PAIRWISE
    key_seed: int = 0xACE1
    key_register_length: int = 16
    key_taps: tuple[int, ...] = (16, 15, 13, 4)

    def __post_init__(self):
        bits_per_symbol(self.m)  # validates the power-of-two restriction

    def grid(self) -> AmplitudeGrid:
        return build_grid(self.alpha_max, self.m)

    def assignment(self) -> PairAssignment:
        return PairAssignment.from_grid(self.grid(), self.pairing_offset)

    def keystream(self) -> KeyStream:
        return KeyStream.from_int(
            self.key_seed, self.key_register_length, self.key_taps
        )
