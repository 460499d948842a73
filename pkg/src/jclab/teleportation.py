"""Teleportation through the atom-field channel.

One-qubit protocol: the resource acts as a generalized depolarizing channel
``rho -> sum_i p_i s_i rho s_i`` with ``p_i`` the Bell-state weights of the
resource. Two-qubit protocol: two independent copies, so the Pauli
pair ``(s_i, s_j)`` occurs with weight ``p_i p_j``.

The Bell basis is fixed over the ordered product basis
``|+v1>, |+v2>, |-v1>, |-v2>``:

    B0 = (|+v2> + |-v1>)/sqrt2    B1 = (|+v1> + |-v2>)/sqrt2
    B2 = (|+v1> - |-v2>)/sqrt2    B3 = (|+v2> - |-v1>)/sqrt2
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SystemParams, scalar_profile
from .errors import NonPhysicalState
from .metrics import SIGMA, _coherence_factor, _physical, concurrence
from .states import EPS_DEG, QubitDensity, TwoQubitState, joint_state

CLASSICAL_ONE_QUBIT = 2.0 / 3.0
CLASSICAL_TWO_QUBIT = 2.0 / 5.0

PAULI = (np.eye(2, dtype=complex),) + SIGMA

_R = 1.0 / math.sqrt(2.0)
BELL_BASIS = np.array([
    [0, _R, _R, 0],
    [_R, 0, 0, _R],
    [_R, 0, 0, -_R],
    [0, _R, -_R, 0],
], dtype=complex)


@dataclass(frozen=True)
class BlochAngles:
    """Pure input ``cos(vartheta/2)|0> + exp(i varphi) sin(vartheta/2)|1>``."""

    vartheta: float
    varphi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.vartheta <= math.pi:
            raise ValueError(f"vartheta must lie in [0, pi], got {self.vartheta}")
        if not 0.0 <= self.varphi < 2 * math.pi:
            raise ValueError(f"varphi must lie in [0, 2pi), got {self.varphi}")

    def amplitudes(self) -> np.ndarray:
        return np.array([math.cos(0.5 * self.vartheta),
                         np.exp(1j * self.varphi) * math.sin(0.5 * self.vartheta)])

    def one_qubit_ket(self) -> np.ndarray:
        return self.amplitudes()

    def two_qubit_ket(self) -> np.ndarray:
        """``cos(vartheta/2)|+-> + exp(i varphi) sin(vartheta/2)|-+>``."""
        c, s = self.amplitudes()
        return np.array([0.0, c, s, 0.0], dtype=complex)


@dataclass(frozen=True)
class ChannelProbabilities:
    p0: float
    p1: float
    p2: float
    p3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3])

    @property
    def p0_not_maximal(self) -> bool:
        return self.p0 < max(self.p1, self.p2, self.p3)

    @property
    def max(self) -> float:
        return float(self.as_array().max())


@dataclass(frozen=True)
class TeleportationReport:
    probabilities: ChannelProbabilities
    output: QubitDensity | TwoQubitState
    fidelity: float
    average_fidelity: float
    optimal_fidelity: float
    output_concurrence: float | None = None
    literal_optimal_fidelity: float | None = None


def channel_probabilities(channel) -> ChannelProbabilities:
    """Weights ``p_i = <B_i|rho|B_i>`` of the resource on the fixed Bell basis."""
    rho = _physical(channel, "channel")
    p = np.real(np.einsum("ia,ab,ib->i", BELL_BASIS.conj(), rho, BELL_BASIS))
    if p.min() < -1e-12:
        raise NonPhysicalState(f"negative Bell weight {p.min():.3e}")
    return ChannelProbabilities(*(float(v) for v in p))


def channel_probabilities_closed_form(params: SystemParams, t: float) -> ChannelProbabilities:
    prof = scalar_profile(params, t)
    x2c = (1.0 if abs(prof.alpha) <= EPS_DEG else prof.x ** 2) * math.cos(0.5 * params.theta) ** 2
    q = _coherence_factor(prof) * math.sin(params.theta) * math.cos(params.phi)
    return ChannelProbabilities(0.5 * (1 - x2c + q), 0.5 * x2c, 0.5 * x2c, 0.5 * (1 - x2c - q))


def _probabilities(channel) -> ChannelProbabilities:
    if isinstance(channel, ChannelProbabilities):
        return channel
    return channel_probabilities(channel)


def input_density(state: BlochAngles) -> np.ndarray:
    psi = state.one_qubit_ket()
    return np.outer(psi, psi.conj())


def teleport_one_qubit(channel, state: BlochAngles) -> QubitDensity:
    """Output of the standard protocol: ``sum_i p_i s_i rho_in s_i``."""
    p = _probabilities(channel).as_array()
    rho_in = input_density(state)
    out = sum(pi * s @ rho_in @ s for pi, s in zip(p, PAULI))
    return QubitDensity(out)


def fidelity(state: BlochAngles, output) -> float:
    """``<psi_in|rho_out|psi_in>`` for a pure one- or two-qubit input."""
    rho = np.asarray(getattr(output, "matrix", output))
    psi = state.one_qubit_ket() if rho.shape == (2, 2) else state.two_qubit_ket()
    return float(np.real(np.vdot(psi, rho @ psi)))


def fidelity_p0_closed_form(probs: ChannelProbabilities, vartheta: float) -> float:
    return (probs.p0 + probs.p3) + (probs.p1 - probs.p3) * math.sin(vartheta) ** 2


def average_fidelity_p0(source, t: float | None = None) -> float:
    """Input-averaged fidelity of the one-qubit protocol.

    ``source`` is either channel probabilities (or a channel state), giving
    ``(p0 + p3) + 2(p1 - p3)/3``, or ``SystemParams`` with ``t``, giving the
    expression in ``x``, ``f`` and the atomic angles.
    """
    if isinstance(source, SystemParams):
        if t is None:
            raise TypeError("t is required when passing SystemParams")
        prof = scalar_profile(source, t)
        x2 = 1.0 if abs(prof.alpha) <= EPS_DEG else prof.x ** 2
        q = _coherence_factor(prof) * math.sin(source.theta) * math.cos(source.phi)
        return 2.0 / 3.0 + (q - x2 * math.cos(0.5 * source.theta) ** 2) / 3.0
    p = _probabilities(source)
    return (p.p0 + p.p3) + 2.0 * (p.p1 - p.p3) / 3.0


def average_fidelity_quadrature(channel, nodes: int = 16) -> float:
    """Bloch-sphere average by Gauss-Legendre in cos(vartheta) and a uniform azimuth grid."""
    p = _probabilities(channel)
    z, w = np.polynomial.legendre.leggauss(nodes)
    phis = 2 * math.pi * np.arange(nodes) / nodes
    total = 0.0
    for zi, wi in zip(z, w):
        vt = math.acos(zi)
        for ph in phis:
            s = BlochAngles(vt, ph)
            total += wi * fidelity(s, teleport_one_qubit(p, s))
    return total / (2.0 * nodes)


def average_fidelity_monte_carlo(channel, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Mean fidelity over Haar-random pure inputs and its standard error.

    Each sample is pushed through the depolarizing map explicitly; no closed
    form is used.
    """
    p = _probabilities(channel).as_array()
    z = rng.uniform(-1.0, 1.0, samples)
    phis = rng.uniform(0.0, 2 * math.pi, samples)
    kets = np.stack([np.sqrt(0.5 * (1 + z)), np.exp(1j * phis) * np.sqrt(0.5 * (1 - z))], axis=1)
    rho_in = np.einsum("si,sj->sij", kets, kets.conj())
    paulis = np.array(PAULI)
    out = np.einsum("k,kab,sbc,kcd->sad", p, paulis, rho_in, paulis)
    vals = np.real(np.einsum("sa,sab,sb->s", kets.conj(), out, kets))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def optimal_fidelity(f_max: float, d: int) -> float:
    """Optimal teleportation fidelity ``(f_max d + 1)/(d + 1)`` from the singlet fraction."""
    if not 0.0 <= f_max <= 1.0:
        raise ValueError(f"f_max must lie in [0, 1], got {f_max}")
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    return (f_max * d + 1.0) / (d + 1.0)


def teleport_two_qubit(channel, state: BlochAngles) -> TwoQubitState:
    """Two-copy output ``sum_ij p_i p_j (s_i x s_j) rho_in (s_i x s_j)``."""
    p = _probabilities(channel).as_array()
    psi = state.two_qubit_ket()
    rho_in = np.outer(psi, psi.conj())
    out = np.zeros((4, 4), dtype=complex)
    for i, si in enumerate(PAULI):
        for j, sj in enumerate(PAULI):
            u = np.kron(si, sj)
            out += p[i] * p[j] * (u @ rho_in @ u)
    return TwoQubitState(out)


def output_concurrence_closed_form(probs: ChannelProbabilities, vartheta: float) -> float:
    return max(0.0, (probs.p0 - probs.p3) ** 2 * math.sin(vartheta)
               - 4.0 * (probs.p0 + probs.p3) * probs.p1)


def output_concurrence_expanded(params: SystemParams, t: float, vartheta: float) -> float:
    """Same quantity written directly in ``x``, ``f`` and the atomic angles."""
    prof = scalar_profile(params, t)
    x2 = 1.0 if abs(prof.alpha) <= EPS_DEG else prof.x ** 2
    c2 = math.cos(0.5 * params.theta) ** 2
    q = _coherence_factor(prof) * math.sin(params.theta) * math.cos(params.phi)
    return max(0.0, q * q * math.sin(vartheta) - 2.0 * x2 * (1.0 - x2 * c2) * c2)


def fidelity_p1_closed_form(probs: ChannelProbabilities, vartheta: float) -> float:
    return (probs.p0 + probs.p3) ** 2 + 2.0 * (probs.p1 ** 2 - probs.p0 * probs.p3) * math.sin(vartheta) ** 2


def average_fidelity_p1(channel) -> float:
    """Fidelity averaged over the input family ``BlochAngles`` drawn uniformly on the sphere.

    Only ``sin^2(vartheta)`` enters the two-qubit fidelity, and its average is 2/3.
    """
    p = _probabilities(channel)
    return (p.p0 + p.p3) ** 2 + (4.0 / 3.0) * (p.p1 ** 2 - p.p0 * p.p3)


def optimal_fidelity_p1_literal(params: SystemParams, t: float) -> float:
    """Two-qubit optimal fidelity written out in ``x`` and ``f``.

    The expression is ``(4 p0^2 + 1)/5`` expanded, so it is only the optimal
    fidelity while ``p0`` is the largest weight.
    """
    prof = scalar_profile(params, t)
    x2 = 1.0 if abs(prof.alpha) <= EPS_DEG else prof.x ** 2
    c2 = math.cos(0.5 * params.theta) ** 2
    q = _coherence_factor(prof) * math.sin(params.theta) * math.cos(params.phi)
    return 0.4 + 0.2 * (q * q + x2 * x2 * c2 * c2 + 2.0 * (1.0 - x2 * c2) * q - 2.0 * x2 * c2)


def one_qubit_report(params: SystemParams, t: float, state: BlochAngles) -> TeleportationReport:
    channel = joint_state(params, t)
    probs = channel_probabilities(channel)
    out = teleport_one_qubit(probs, state)
    return TeleportationReport(
        probabilities=probs,
        output=out,
        fidelity=fidelity(state, out),
        average_fidelity=average_fidelity_p0(probs),
        optimal_fidelity=optimal_fidelity(probs.max, 2),
    )


def two_qubit_report(params: SystemParams, t: float, state: BlochAngles) -> TeleportationReport:
    """Two-qubit protocol through two copies of the state at time ``t``.

    ``optimal_fidelity`` uses the largest single-copy weight squared as the
    singlet fraction. ``literal_optimal_fidelity`` is the expanded expression
    in ``x`` and ``f``, which silently assumes ``p0`` is the largest weight.
    """
    channel = joint_state(params, t)
    probs = channel_probabilities(channel)
    out = teleport_two_qubit(probs, state)
    literal = optimal_fidelity_p1_literal(params, t)
    return TeleportationReport(
        probabilities=probs,
        output=out,
        fidelity=fidelity(state, out),
        average_fidelity=average_fidelity_p1(probs),
        optimal_fidelity=optimal_fidelity(probs.max ** 2, 4),
        output_concurrence=concurrence(out),
        literal_optimal_fidelity=literal,
    )
