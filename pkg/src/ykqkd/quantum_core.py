"""Coherent-state algebra for amplitude-keyed signal constellations.

Everything downstream (detection bounds, eavesdropper density operators)
reduces to inner products of coherent states,

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a)*b),   |<a|b>|^2 = exp(-|a-b|^2),

so a constellation of N states is fully described by its N x N Gram matrix.
Density operators supported on the span of the constellation are represented
as small Hermitian matrices in the Loewdin (symmetric) orthonormal basis:
the coefficient vector of state k in that basis is column k of G^{1/2}, which
keeps every trace, eigenvalue and overlap computation exact at any amplitude
without a Fock-space cutoff.  A truncated Fock expansion is provided as an
independent numerical cross-check, not as the working representation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "CoherentState",
    "TwoModeCipheredState",
    "AmplitudeGrid",
    "StateMixture",
    "SpanOperator",
    "GramRoots",
    "FockExpansion",
    "coherent_overlap",
    "two_mode_cipher_state",
    "two_mode_overlap",
    "build_grid",
    "gram_matrix",
    "hermitian_sqrt_and_invsqrt",
    "mixture_in_span",
    "fock_amplitudes",
]

# Eigenvalues below EIGENVALUE_CUTOFF * lambda_max count as zero rank
# (double-precision noise floor).
EIGENVALUE_CUTOFF = 1e-12


@dataclass(frozen=True)
class CoherentState:
    """A coherent state |alpha>, amplitude in sqrt-photon units.

    The mean photon number is |alpha|^2.  Amplitudes on an intensity-keyed
    link are real and non-negative; complex amplitudes are supported for the
    two-mode phase-ciphered states.
    """

    amplitude: complex

    def __post_init__(self):
        a = complex(self.amplitude)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError(f"coherent amplitude must be finite, got {a!r}")
        object.__setattr__(self, "amplitude", a)

    @property
    def mean_photon_number(self) -> float:
        return abs(self.amplitude) ** 2

    def scaled(self, factor: float) -> "CoherentState":
        """Amplitude-scaled copy, e.g. after a lossy channel or a tap."""
        return CoherentState(self.amplitude * factor)


def coherent_overlap(a: complex, b: complex) -> complex:
    """Inner product <a|b> of two coherent states.

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a)*b), so the overlap magnitude
    depends only on the separation: |<a|b>|^2 = exp(-|a-b|^2).
    """
    a = complex(a)
    b = complex(b)
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


@dataclass(frozen=True)
class TwoModeCipheredState:
    """Product of two coherent modes carrying a bit phase and a key phase.

    The total phase phi = bit_phase + key_phase rotates the two modes in
    opposite directions:

        mode 1: exp(-i*phi/2) * alpha / sqrt(2)
        mode 2: exp(+i*phi/2) * alpha / sqrt(2)

    The rotation preserves the total mean photon number |alpha|^2.
    """

    base_amplitude: complex
    bit_phase: float
    key_phase: float

    @property
    def total_phase(self) -> float:
        return self.bit_phase + self.key_phase

    @property
    def mode1(self) -> complex:
        return cmath.exp(-0.5j * self.total_phase) * self.base_amplitude / math.sqrt(2)

    @property
    def mode2(self) -> complex:
        return cmath.exp(+0.5j * self.total_phase) * self.base_amplitude / math.sqrt(2)

    @property
    def mean_photon_number(self) -> float:
        return abs(self.base_amplitude) ** 2


def two_mode_cipher_state(
    alpha: complex, phi_b: float, phi_k: float
) -> TwoModeCipheredState:
    """Cipher a two-mode state with bit phase phi_b and key phase phi_k."""
    return TwoModeCipheredState(complex(alpha), float(phi_b), float(phi_k))


def two_mode_overlap(s1: TwoModeCipheredState, s2: TwoModeCipheredState) -> complex:
    """Inner product of two ciphered two-mode states (product of the modes).

    For equal base amplitude alpha and total-phase difference dphi the
    magnitude is exp(-|alpha|^2 * (1 - cos(dphi/2))).
    """
    return coherent_overlap(s1.mode1, s2.mode1) * coherent_overlap(s1.mode2, s2.mode2)


@dataclass(frozen=True)
class AmplitudeGrid:
    """2M equally spaced intensity levels below a fixed maximum amplitude.

    levels[j-1] = j * alpha_max / (2M) for j = 1..2M, so neighbouring levels
    are alpha_max/(2M) apart and the top level equals alpha_max.
    """

    alpha_max: float
    m: int
    levels: tuple[float, ...]

    @property
    def n_levels(self) -> int:
        return 2 * self.m

    @property
    def spacing(self) -> float:
        return self.alpha_max / (2 * self.m)

    def states(self, scale: float = 1.0) -> list[CoherentState]:
        """The grid as coherent states, optionally amplitude-scaled."""
        return [CoherentState(scale * level) for level in self.levels]


def build_grid(alpha_max: float, m: int) -> AmplitudeGrid:
    """Divide the amplitude range (0, alpha_max] into 2M equal steps."""
    if not (alpha_max > 0 and math.isfinite(alpha_max)):
        raise ValueError(f"alpha_max must be positive and finite, got {alpha_max}")
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    step = alpha_max / (2 * m)
    levels = tuple(j * step for j in range(1, 2 * m))
    # close the grid on alpha_max exactly, immune to float rounding in step
    return AmplitudeGrid(float(alpha_max), int(m), levels + (float(alpha_max),))


def _pairwise_overlap(a, b) -> complex:
    if isinstance(a, TwoModeCipheredState):
        return two_mode_overlap(a, b)
    return coherent_overlap(a.amplitude, b.amplitude)


def _span_key(states: Sequence) -> tuple:
    """Hashable identity of the span a constellation generates."""
    if states and isinstance(states[0], TwoModeCipheredState):
        return tuple((s.mode1, s.mode2) for s in states)
    return tuple(s.amplitude for s in states)


def gram_matrix(states: Sequence) -> np.ndarray:
    """Hermitian Gram matrix G_ij = <psi_i|psi_j> of a constellation.

    Accepts CoherentState or TwoModeCipheredState sequences.  The result is
    symmetrized, has a unit diagonal, and is positive semidefinite up to
    double-precision noise.
    """
    n = len(states)
    if n < 1:
        raise ValueError("constellation must contain at least one state")
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        g[i, i] = 1.0
        for j in range(i + 1, n):
            g[i, j] = _pairwise_overlap(states[i], states[j])
            g[j, i] = g[i, j].conjugate()
    return 0.5 * (g + g.conj().T)


class GramRoots(NamedTuple):
    """Square root and pseudo-inverse square root of a Gram matrix."""

    sqrt: np.ndarray
    inv_sqrt: np.ndarray
    n_cut: int  # eigenvalues treated as zero; > 0 flags a degenerate constellation


def hermitian_sqrt_and_invsqrt(g: np.ndarray) -> GramRoots:
    """G^{1/2} and G^{-1/2} by Hermitian eigendecomposition.

    Eigenvalues below EIGENVALUE_CUTOFF times the largest are treated as
    exact zeros: they contribute nothing to the square root and are excluded
    from the pseudo-inverse.  The number of such cut eigenvalues is returned
    so callers can detect rank-deficient (duplicate-state) constellations.
    """
    g = np.asarray(g, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    cutoff = EIGENVALUE_CUTOFF * max(w[-1], 0.0)
    keep = w > cutoff
    n_cut = int(np.count_nonzero(~keep))
    sqrt_w = np.where(keep, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    inv_sqrt_w = np.where(keep, 1.0 / np.where(keep, sqrt_w, 1.0), 0.0)
    sqrt = (v * sqrt_w) @ v.conj().T
    inv_sqrt = (v * inv_sqrt_w) @ v.conj().T
    return GramRoots(sqrt, inv_sqrt, n_cut)


@dataclass(frozen=True)
class StateMixture:
    """Probabilistic mixture of constellation states: (weight, index) pairs."""

    components: tuple[tuple[float, int], ...]

    def __post_init__(self):
        components = tuple((float(w), int(k)) for w, k in self.components)
        if not components:
            raise ValueError("mixture needs at least one component")
        if any(w < 0 for w, _ in components):
            raise ValueError("mixture weights must be non-negative")
        total = sum(w for w, _ in components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        object.__setattr__(self, "components", components)

    @classmethod
    def uniform(cls, indices: Sequence[int]) -> "StateMixture":
        w = 1.0 / len(indices)
        return cls(tuple((w, int(k)) for k in indices))

    @classmethod
    def pure(cls, index: int) -> "StateMixture":
        return cls(((1.0, int(index)),))


@dataclass(frozen=True)
class SpanOperator:
    """Hermitian operator on the span of a constellation, in the Loewdin basis.

    `basis_key` identifies the constellation whose span the coefficients live
    in; operators from different constellations cannot be combined.
    """

    matrix: np.ndarray
    basis_key: tuple
    rank_deficiency: int = 0

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def same_span(self, other: "SpanOperator") -> bool:
        return self.basis_key == other.basis_key

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def trace_product(self, other: "SpanOperator") -> float:
        """Tr(self @ other), e.g. purity or state fidelity terms."""
        if not self.same_span(other):
            raise ValueError("operators live on different spans")
        return float(np.real(np.trace(self.matrix @ other.matrix)))


def mixture_in_span(mix: StateMixture, constellation: Sequence) -> SpanOperator:
    """Density operator sum_k w_k |psi_k><psi_k| in the Loewdin span basis.

    Column k of G^{1/2} is the coefficient vector of |psi_k> in the
    orthonormal basis defined by G^{-1/2}, so the mixture becomes a small
    Hermitian matrix with exact unit trace.
    """
    n = len(constellation)
    for _, k in mix.components:
        if not 0 <= k < n:
            raise ValueError(f"state index {k} outside constellation of size {n}")
    g = gram_matrix(constellation)
    roots = hermitian_sqrt_and_invsqrt(g)
    rho = np.zeros((n, n), dtype=complex)
    for w, k in mix.components:
        vec = roots.sqrt[:, k]
        rho += w * np.outer(vec, vec.conj())
    rho = 0.5 * (rho + rho.conj().T)

    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"density operator trace {trace!r} deviates from 1")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -1e-10:
        raise ValueError(f"density operator has negative eigenvalue {min_eig!r}")
    return SpanOperator(rho, _span_key(constellation), roots.n_cut)


class FockExpansion(NamedTuple):
    """Truncated photon-number expansion of a coherent state."""

    coeffs: np.ndarray
    truncation_mass: float


def fock_amplitudes(a: complex, n_max: int) -> FockExpansion:
    """Number-basis coefficients c_n = exp(-|a|^2/2) a^n / sqrt(n!), n <= n_max.

    Computed by the stable recurrence c_{n+1} = c_n * a / sqrt(n+1).  The
    truncation mass 1 - sum |c_n|^2 is returned, and a warning is issued when
    it exceeds 1e-10 (the cutoff is too low for this amplitude).

    This expansion exists as an independent cross-check of the Gram-matrix
    representation; it is not used by the production code paths.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    a = complex(a)
    coeffs = np.zeros(n_max + 1, dtype=complex)
    coeffs[0] = math.exp(-0.5 * abs(a) ** 2)
    for n in range(n_max):
        coeffs[n + 1] = coeffs[n] * a / math.sqrt(n + 1)
    mass = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    if mass > 1e-10:
        warnings.warn(
            f"Fock truncation at n_max={n_max} loses probability mass "
            f"{mass:.3e} for |a|={abs(a):.3f}",
            stacklevel=2,
        )
    return FockExpansion(coeffs, mass)
