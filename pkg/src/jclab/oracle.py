"""Brute-force Lindblad integration in a truncated Fock space.

This module is the independent check on the closed form. It builds the
effective Hamiltonian ``(g/2)(sigma^+ + sigma)(a + a^dagger)`` from the bare
atomic operators, integrates the zero-temperature master equation with RK4
on the full ``2(N+1)``-dimensional space, and only afterwards projects onto
span{|alpha>, |-alpha>} for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SystemParams
from .errors import DegenerateBasis, ExcessLeakage, StepFailure, TruncationTooSmall
from .states import EPS_DEG, TwoQubitState, field_qubit_basis

TOP_LEVEL_MAX = 1e-10
TRACE_DRIFT_MAX = 1e-8
HERMITIAN_MAX = 1e-10

# Rotated atomic basis |+-> = (|g> +- |e>)/sqrt(2) with |e> = (1,0), |g> = (0,1).
_ROTATION = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)  # rows: <+|, <-| on (e, g)


def default_truncation(params: SystemParams, t_max: float | None = None) -> int:
    """Fock cutoff from the bound ``|alpha| <= g/k`` (or ``g t_max / 2`` when k = 0)."""
    if params.k > 0:
        return int(math.ceil(10 + 12 * (params.g / params.k) ** 2))
    if t_max is None:
        raise ValueError("t_max is required to size the cutoff when k = 0")
    return int(math.ceil(10 + 12 * (0.5 * params.g * t_max) ** 2))


def default_step(params: SystemParams) -> float:
    dt = 0.001 / params.g
    if params.k > 0:
        dt = min(dt, 0.001 / params.k)
    return dt


def atom_operators() -> tuple[np.ndarray, np.ndarray]:
    """Lowering operator ``|g><e|`` and its adjoint, in the rotated basis."""
    sigma = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e| on (e, g)
    lower = _ROTATION @ sigma @ _ROTATION.T
    return lower, lower.conj().T


def annihilation(N: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), 1).astype(complex)


def effective_hamiltonian(g: float, N: int) -> np.ndarray:
    lower, raise_ = atom_operators()
    a = annihilation(N)
    return 0.5 * g * np.kron(raise_ + lower, a + a.conj().T)


@dataclass
class FockJointState:
    """Atom x truncated-Fock density matrix (atom index major)."""

    matrix: np.ndarray
    N: int
    t: float

    @property
    def dim(self) -> int:
        return 2 * (self.N + 1)

    def top_level_population(self) -> float:
        d = np.real(np.diag(self.matrix))
        return float(d[self.N] + d[2 * self.N + 1])

    def block(self, i: int, j: int) -> np.ndarray:
        """Field operator ``<i|rho|j>`` with i, j in {1, 2} for |+>, |->."""
        n = self.N + 1
        return self.matrix[(i - 1) * n: i * n, (j - 1) * n: j * n]

    def atom_state(self) -> np.ndarray:
        n = self.N + 1
        return np.einsum("ijkj->ik", self.matrix.reshape(2, n, 2, n))

    def field_state(self) -> np.ndarray:
        n = self.N + 1
        return np.einsum("ijil->jl", self.matrix.reshape(2, n, 2, n))


class _Liouvillian:
    """``L rho = K rho + (K rho)^dagger + k A rho A^dagger`` with ``K = -i H - (k/2) A^dagger A``."""

    def __init__(self, params: SystemParams, N: int):
        a = annihilation(N)
        self.k = params.k
        self.big_a = np.kron(np.eye(2), a)
        num = self.big_a.conj().T @ self.big_a
        self.K = -1j * effective_hamiltonian(params.g, N) - 0.5 * params.k * num
        self.N = N
        # A rho A^dagger only touches the shifted Fock indices inside each atomic block
        n = N + 1
        root = np.sqrt(np.arange(1, n, dtype=float))
        self._weights = np.outer(root, root)[None, :, None, :]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        m = self.K @ rho
        out = m + m.conj().T
        if self.k:
            n = self.N + 1
            r = rho.reshape(2, n, 2, n)
            jump = np.zeros_like(r)
            jump[:, :-1, :, :-1] = r[:, 1:, :, 1:] * self._weights
            out += self.k * jump.reshape(rho.shape)
        return out


def _rk4(L, rho, dt):
    k1 = L(rho)
    k2 = L(rho + 0.5 * dt * k1)
    k3 = L(rho + 0.5 * dt * k2)
    k4 = L(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def initial_state(params: SystemParams, N: int) -> np.ndarray:
    """``(cos(theta/2)|+> + e^{i phi} sin(theta/2)|->) x |0>`` as a density matrix."""
    atom = np.array([math.cos(0.5 * params.theta),
                     np.exp(1j * params.phi) * math.sin(0.5 * params.theta)])
    vac = np.zeros(N + 1, dtype=complex)
    vac[0] = 1.0
    psi = np.kron(atom, vac)
    return np.outer(psi, psi.conj())


def _health(rho: np.ndarray, N: int, t: float, where: str) -> None:
    d = np.real(np.diag(rho))
    top = d[N] + d[2 * N + 1]
    if top > TOP_LEVEL_MAX:
        raise TruncationTooSmall(
            f"{where}: population {top:.3e} in Fock level N={N} at t={t:.6g} exceeds {TOP_LEVEL_MAX:.0e}")
    drift = abs(d.sum() - 1.0)
    if drift > TRACE_DRIFT_MAX:
        raise StepFailure(f"{where}: trace drift {drift:.3e} at t={t:.6g}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_MAX:
        raise StepFailure(f"{where}: Hermiticity lost ({herm:.3e}) at t={t:.6g}")


def lindblad_trajectory(params: SystemParams, times, N: int | None = None,
                        tol: float | None = None, dt: float | None = None,
                        max_steps: int = 10_000_000) -> list[FockJointState]:
    """Integrate the master equation and return the state at each requested time.

    Parameters
    ----------
    params : SystemParams
    times : sequence of float
        Non-negative output times (any order; returned in the given order).
    N : int, optional
        Fock cutoff. Defaults to :func:`default_truncation`.
    tol : float, optional
        If given, RK4 with step doubling keeps the local error estimate (max
        entry) below ``tol``. Otherwise fixed-step RK4 is used.
    dt : float, optional
        Fixed step, or the first trial step in adaptive mode. Defaults to
        :func:`default_step`.

    Raises
    ------
    TruncationTooSmall
        If the top Fock level ever holds more than ``1e-10`` probability.
    StepFailure
        If the step size collapses, or trace/Hermiticity drift past tolerance.
    """
    times = [float(t) for t in np.atleast_1d(times)]
    if any(t < 0 or not math.isfinite(t) for t in times):
        raise ValueError("output times must be finite and non-negative")
    t_max = max(times)
    if N is None:
        N = default_truncation(params, t_max)
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if dt is None:
        dt = default_step(params)
    L = _Liouvillian(params, N)
    rho = initial_state(params, N)
    t = 0.0
    steps = 0
    out: dict[float, FockJointState] = {}
    for target in sorted(set(times)):
        while t < target:
            if steps >= max_steps:
                raise StepFailure(f"exceeded {max_steps} steps before t={target}")
            h = min(dt, target - t)
            if tol is None:
                rho = _rk4(L, rho, h)
            else:
                full = _rk4(L, rho, h)
                half = _rk4(L, _rk4(L, rho, 0.5 * h), 0.5 * h)
                err = float(np.max(np.abs(half - full))) / 15.0
                if not err <= tol:
                    dt = h * (0.2 if not math.isfinite(err) else max(0.2, 0.9 * (tol / err) ** 0.2))
                    if dt < 1e-12 * max(1.0, target):
                        raise StepFailure(f"step size underflow at t={t:.6g} (tol={tol:.1e})")
                    continue
                rho = half
                grow = 5.0 if err == 0 else min(5.0, 0.9 * (tol / err) ** 0.2)
                # a step shortened to land on an output time says nothing about dt
                dt = h * grow if h >= dt else max(dt, h * grow)
            t = t + h if target - (t + h) > 1e-15 * max(1.0, target) else target
            steps += 1
            _health(rho, N, t, "lindblad")
        out[target] = FockJointState(rho.copy(), N, target)
    return [out[t] for t in times]


def evolve_lindblad(params: SystemParams, t_final: float, N: int | None = None,
                    tol: float | None = None, dt: float | None = None) -> FockJointState:
    """State at ``t_final``; see :func:`lindblad_trajectory`."""
    return lindblad_trajectory(params, [t_final], N=N, tol=tol, dt=dt)[0]


@dataclass(frozen=True)
class Projection:
    state: TwoQubitState
    leakage: float


def project_to_qubit(state: FockJointState, alpha: complex,
                     max_leakage: float = 1e-6) -> Projection:
    """Express ``state`` in the {|+>,|->} x {v1, v2} basis built from ``alpha``.

    ``leakage`` is the probability outside the span of the four basis vectors.
    """
    try:
        basis = field_qubit_basis(alpha)
    except DegenerateBasis as exc:
        raise ExcessLeakage(f"cannot project: {exc} (threshold {EPS_DEG:.0e})") from exc
    kets = basis.to_fock(state.N, max_tail=None)
    # re-orthonormalise against truncation of the coherent kets
    V = _fix_phase(np.linalg.qr(kets)[0], kets)
    W = np.kron(np.eye(2), V)
    q = W.conj().T @ state.matrix @ W
    leakage = float(max(0.0, 1.0 - np.real(np.trace(q))))
    if leakage > max_leakage:
        raise ExcessLeakage(f"leakage {leakage:.3e} exceeds {max_leakage:.1e}")
    return Projection(TwoQubitState(q), leakage)


def _fix_phase(Q: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Rotate the columns of ``Q`` so each has a positive overlap with ``ref``."""
    ov = np.einsum("ij,ij->j", ref.conj(), Q)
    return Q * (np.conj(ov) / np.abs(ov))[None, :]
