"""Exact atom-field states built from the scalar dynamics.

The joint state lives on span{|+>, |->} x span{|alpha>, |-alpha>}. The field
part is orthonormalised by Gram-Schmidt (``v1 = |alpha>``) and every 4x4 matrix
in the package uses the ordered basis

    |+>|v1>, |+>|v2>, |->|v1>, |->|v2>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammainc, gammaln

from .dynamics import ScalarProfile, SystemParams, scalar_profile
from .errors import DegenerateBasis, NonPhysicalState, TruncationTooSmall

# Below this |alpha| the Gram-Schmidt denominator sqrt(1 - x^2) is meaningless.
EPS_DEG = 1e-8

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def _check_density(m: np.ndarray, *, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                   psd_tol=PSD_TOL) -> None:
    if not np.all(np.isfinite(m)):
        raise NonPhysicalState("matrix has non-finite entries")
    herm = np.max(np.abs(m - m.conj().T))
    if herm > herm_tol:
        raise NonPhysicalState(f"not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > trace_tol:
        raise NonPhysicalState(f"trace is {tr!r}, expected 1")
    w_min = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
    if w_min < -psd_tol:
        raise NonPhysicalState(f"negative eigenvalue {w_min:.3e}")


@dataclass(frozen=True, eq=False)
class _Density:
    """Read-only square matrix. Only the shape is enforced on construction, so
    intermediate objects such as truncated projections can be held;
    :meth:`check` (and every metric) enforces physicality."""

    matrix: np.ndarray
    dim = 0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def check(self, **tols) -> None:
        """Raise :class:`NonPhysicalState` unless Hermitian, unit trace and PSD."""
        _check_density(self.matrix, **tols)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


class TwoQubitState(_Density):
    """4x4 density matrix in the ordered atom-field product basis."""

    dim = 4


class QubitDensity(_Density):
    dim = 2


def as_matrix(state) -> np.ndarray:
    return np.asarray(getattr(state, "matrix", state), dtype=complex)


# -- coherent states -------------------------------------------------------

def coherent_overlap(beta: complex, gamma: complex) -> complex:
    """<beta|gamma> for coherent states."""
    beta, gamma = complex(beta), complex(gamma)
    return complex(np.exp(-0.5 * abs(beta) ** 2 - 0.5 * abs(gamma) ** 2
                          + beta.conjugate() * gamma))


def fock_tail_mass(alpha: complex, N: int) -> float:
    """Probability that |alpha> has more than N photons."""
    lam = abs(alpha) ** 2
    if lam == 0.0:
        return 0.0
    # P(n > N) for a Poisson(lam) variable
    return float(gammainc(N + 1, lam))


def coherent_fock(alpha: complex, N: int, max_tail: float | None = 1e-10) -> np.ndarray:
    """Components <n|alpha> for n = 0..N.

    Raises
    ------
    TruncationTooSmall
        If the discarded tail probability exceeds ``max_tail``.
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    alpha = complex(alpha)
    tail = fock_tail_mass(alpha, N)
    if max_tail is not None and tail > max_tail:
        raise TruncationTooSmall(
            f"Fock cutoff N={N} leaves tail mass {tail:.3e} > {max_tail:.1e} for |alpha|={abs(alpha):.4g}")
    vec = np.empty(N + 1, dtype=complex)
    vec[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, N + 1):
        vec[n] = vec[n - 1] * alpha / math.sqrt(n)
    return vec


def displacement_matrix(beta: complex, N: int) -> np.ndarray:
    """Matrix elements <m|D(beta)|n> for m, n = 0..N.

    Uses the exact Laguerre form, so the truncated block equals the
    corresponding block of the infinite-dimensional operator.
    """
    beta = complex(beta)
    r2 = abs(beta) ** 2
    out = np.empty((N + 1, N + 1), dtype=complex)
    for m in range(N + 1):
        for n in range(N + 1):
            lo, hi = min(m, n), max(m, n)
            d = hi - lo
            mag = math.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * r2)
            lag = eval_genlaguerre(lo, d, r2)
            phase = beta ** d if m >= n else (-beta.conjugate()) ** d
            out[m, n] = mag * lag * phase
    return out


# -- field qubit -----------------------------------------------------------

@dataclass(frozen=True)
class FieldQubitBasis:
    """Orthonormal pair built from |alpha> and |-alpha>.

    ``coeffs[i]`` holds the coefficients of ``v_{i+1}`` on ``(|alpha>, |-alpha>)``.
    """

    alpha: complex
    x: float
    coeffs: np.ndarray

    def gram(self) -> np.ndarray:
        """<v_i|v_j> evaluated with the coherent-state overlap rule."""
        kets = (self.alpha, -self.alpha)
        ov = np.array([[coherent_overlap(a, b) for b in kets] for a in kets])
        c = self.coeffs
        return c.conj() @ ov @ c.T

    def to_fock(self, N: int, max_tail: float | None = 1e-10) -> np.ndarray:
        """(N+1) x 2 array whose columns are v1, v2 in the Fock basis."""
        plus = coherent_fock(self.alpha, N, max_tail)
        minus = coherent_fock(-self.alpha, N, max_tail)
        return np.column_stack([plus, minus]) @ self.coeffs.T


def field_qubit_basis(alpha: complex) -> FieldQubitBasis:
    """Gram-Schmidt basis ``v1 = |alpha>``, ``v2 = (|-alpha> - x|alpha>)/sqrt(1-x^2)``."""
    alpha = complex(alpha)
    if abs(alpha) <= EPS_DEG:
        raise DegenerateBasis(f"|alpha| = {abs(alpha):.3e} <= {EPS_DEG:.0e}")
    r2 = abs(alpha) ** 2
    x = math.exp(-2.0 * r2)
    s = math.sqrt(-math.expm1(-4.0 * r2))
    coeffs = np.array([[1.0, 0.0], [-x / s, 1.0 / s]], dtype=complex)
    coeffs.setflags(write=False)
    return FieldQubitBasis(alpha=alpha, x=x, coeffs=coeffs)


# -- joint and reduced states ----------------------------------------------

def _matrix_from_scalars(theta: float, phi: float, x: float, s: float,
                         f: float, f_over_x: float) -> np.ndarray:
    c2 = math.cos(0.5 * theta) ** 2
    s2 = math.sin(0.5 * theta) ** 2
    coh = 0.5 * math.sin(theta) * np.exp(-1j * phi)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = x * x * c2
    rho[0, 1] = rho[1, 0] = x * s * c2
    rho[1, 1] = s * s * c2
    rho[0, 2] = coh * f
    rho[1, 2] = coh * s * f_over_x
    rho[2, 2] = s2
    rho[2, 0] = np.conj(rho[0, 2])
    rho[2, 1] = np.conj(rho[1, 2])
    return rho


def joint_state_from_profile(params: SystemParams, prof: ScalarProfile) -> TwoQubitState:
    if abs(prof.alpha) <= EPS_DEG:
        # field is still (numerically) the vacuum; product state embedded on v1
        x, s, fx = 1.0, 0.0, prof.f
    else:
        x, s, fx = prof.x, math.sqrt(prof.one_minus_x2), prof.f_over_x
    return TwoQubitState(_matrix_from_scalars(params.theta, params.phi, x, s, prof.f, fx))


def joint_state(params: SystemParams, t: float) -> TwoQubitState:
    """Atom-field density matrix at time ``t`` in the field-qubit basis."""
    return joint_state_from_profile(params, scalar_profile(params, t))


def partial_trace_field(rho) -> np.ndarray:
    m = as_matrix(rho).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", m)


def partial_trace_atom(rho) -> np.ndarray:
    m = as_matrix(rho).reshape(2, 2, 2, 2)
    return np.einsum("ijil->jl", m)


def reduced_states(state, t: float | None = None) -> tuple[QubitDensity, QubitDensity]:
    """Return ``(atom, field)`` reduced density matrices.

    ``state`` is a :class:`TwoQubitState` (or 4x4 array), or a
    :class:`SystemParams` together with ``t``.
    """
    if isinstance(state, SystemParams):
        if t is None:
            raise TypeError("t is required when passing SystemParams")
        state = joint_state(state, t)
    return QubitDensity(partial_trace_field(state)), QubitDensity(partial_trace_atom(state))


def asymptotic_infinity_amplitude(params: SystemParams) -> complex:
    if params.k == 0:
        raise ValueError("no stationary state without dissipation (k = 0)")
    return complex(0.0, params.g / params.k)


def asymptotic_state(params: SystemParams) -> TwoQubitState:
    """Separable long-time limit, expressed in the basis built from ``alpha = i g/k``."""
    a_inf = asymptotic_infinity_amplitude(params)
    r2 = abs(a_inf) ** 2
    x = math.exp(-2.0 * r2)
    s = math.sqrt(-math.expm1(-4.0 * r2))
    return TwoQubitState(_matrix_from_scalars(params.theta, params.phi, x, s, 0.0, 0.0))


# -- decoherence-free evolution ----------------------------------------------

ATOM_KETS = {"+": np.array([1.0, 0.0], dtype=complex), "-": np.array([0.0, 1.0], dtype=complex)}


def decoherence_free_evolve(g: float, t: float, branch: str = "+") -> tuple[np.ndarray, complex]:
    """Evolve ``|branch>|0>`` with the dissipation-free unitary.

    Returns the (unchanged) atomic ket in the rotated basis and the coherent
    amplitude of the field: ``-xi`` for ``|+>`` and ``+xi`` for ``|->``, with
    ``xi = i g t / 2``.
    """
    if branch not in ATOM_KETS:
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    xi = 0.5j * g * t
    return ATOM_KETS[branch].copy(), (-xi if branch == "+" else xi)


def decoherence_free_unitary(g: float, t: float, N: int) -> np.ndarray:
    """``|+><+| D(-xi) + |-><-| D(xi)`` on the truncated atom-Fock space."""
    xi = 0.5j * g * t
    u = np.zeros((2 * (N + 1), 2 * (N + 1)), dtype=complex)
    u[: N + 1, : N + 1] = displacement_matrix(-xi, N)
    u[N + 1:, N + 1:] = displacement_matrix(xi, N)
    return u
