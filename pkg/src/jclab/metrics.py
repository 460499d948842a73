"""Entanglement, nonlocality and mixedness of the atom-field state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .dynamics import ScalarProfile, SystemParams, scalar_profile
from .errors import NoViolation, NonPhysicalState
from .states import EPS_DEG, as_matrix, _check_density

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
SIGMA_YY = np.kron(SIGMA[1], SIGMA[1])
TSIRELSON = 2.0 * math.sqrt(2.0)

# eigenvalues of rho smaller than this (relative to the largest) are round-off
_RANK_CUTOFF = 64 * np.finfo(float).eps


def _physical(rho, what="state") -> np.ndarray:
    m = as_matrix(rho)
    try:
        _check_density(m)
    except NonPhysicalState as exc:
        raise NonPhysicalState(f"{what}: {exc}") from None
    return m


# -- concurrence -----------------------------------------------------------

def wootters_eigenvalues(state) -> np.ndarray:
    """Eigenvalues of ``rho (sigma_y x sigma_y) rho* (sigma_y x sigma_y)``, descending.

    They are computed as squared singular values of ``W^T (sigma_y x sigma_y) W``
    where ``rho = W W^dagger``; this equals the spectrum of the Hermitian
    ``sqrt(rho) rho~ sqrt(rho)`` and keeps exact zeros at round-off level.
    """
    rho = _physical(state)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = w > _RANK_CUTOFF * max(w.max(), 1.0)
    W = v[:, keep] * np.sqrt(w[keep])[None, :]
    sv = np.linalg.svd(W.T @ SIGMA_YY @ W, compute_uv=False)
    lam = np.zeros(4)
    lam[: sv.size] = np.sort(sv)[::-1] ** 2
    return lam


def concurrence(state) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)`` of the square roots ``l_i``."""
    root = np.sqrt(np.clip(wootters_eigenvalues(state), 0.0, None))
    return float(max(0.0, root[0] - root[1:].sum()))


def _binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entanglement_of_formation(C: float) -> float:
    if not 0.0 <= C <= 1.0:
        raise ValueError(f"concurrence must lie in [0, 1], got {C}")
    return _binary_entropy(0.5 + 0.5 * math.sqrt(1.0 - C * C))


def _coherence_factor(prof: ScalarProfile) -> float:
    """``sqrt(1 - x^2) f / x``; zero in the degenerate (vacuum) limit."""
    if abs(prof.alpha) <= EPS_DEG:
        return 0.0
    return math.sqrt(prof.one_minus_x2) * prof.f_over_x


def concurrence_closed_form(params: SystemParams, t: float) -> float:
    prof = scalar_profile(params, t)
    return max(0.0, _coherence_factor(prof) * math.sin(params.theta))


# -- linear entropies ------------------------------------------------------

def linear_entropy(density) -> float:
    """``1 - Tr rho^2`` for a density matrix of any size."""
    m = as_matrix(density)
    return float(1.0 - np.real(np.vdot(m.conj().T, m)))


@dataclass(frozen=True)
class LinearEntropies:
    joint: float
    atom: float
    field: float


def linear_entropies_closed_form(params: SystemParams, t: float) -> LinearEntropies:
    prof = scalar_profile(params, t)
    s2 = math.sin(params.theta) ** 2
    ratio2 = 1.0 if abs(prof.alpha) <= EPS_DEG else prof.f_over_x ** 2
    return LinearEntropies(
        joint=0.5 * (1.0 - ratio2) * s2,
        atom=-0.5 * math.expm1(2.0 * prof.log_f) * s2,
        field=0.5 * prof.one_minus_x2 * s2,
    )


# -- Bell-CHSH -------------------------------------------------------------

@dataclass(frozen=True)
class BellSettings:
    """Measurement directions ``a, a', b, b'`` (unit vectors in R^3)."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
                raise ValueError(f"{name} is not a unit vector (norm {np.linalg.norm(vec)!r})")
            object.__setattr__(self, name, vec)

    @classmethod
    def from_angles(cls, angles) -> "BellSettings":
        """Build from four (polar, azimuth) pairs."""
        vecs = []
        for pol, az in np.asarray(angles, dtype=float).reshape(4, 2):
            vecs.append(np.array([math.sin(pol) * math.cos(az), math.sin(pol) * math.sin(az), math.cos(pol)]))
        return cls(*vecs)


def correlation_matrix(state) -> np.ndarray:
    """``T_ij = Tr(rho sigma_i x sigma_j)``."""
    rho = as_matrix(state)
    return np.array([[np.real(np.trace(rho @ np.kron(si, sj))) for sj in SIGMA] for si in SIGMA])


def chsh_operator(settings: BellSettings) -> np.ndarray:
    def dot(v):
        return sum(c * s for c, s in zip(v, SIGMA))

    s = settings
    return (np.kron(dot(s.a), dot(s.b + s.b_prime))
            + np.kron(dot(s.a_prime), dot(s.b - s.b_prime)))


def bell_expectation(state, settings: BellSettings) -> float:
    value = np.trace(as_matrix(state) @ chsh_operator(settings))
    if abs(value.imag) > 1e-12:
        raise NonPhysicalState(f"CHSH expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def bell_max(state) -> float:
    """Horodecki maximum ``2 sqrt(mu1 + mu2)`` over the spectrum of ``T^T T``."""
    T = correlation_matrix(state)
    mu = np.sort(np.linalg.eigvalsh(T.T @ T))[::-1]
    return float(2.0 * math.sqrt(max(0.0, mu[0] + mu[1])))


def bell_max_closed_form(params: SystemParams, t: float) -> float:
    prof = scalar_profile(params, t)
    if abs(prof.alpha) <= EPS_DEG:
        gap = 0.0
    else:
        gap = prof.f_over_x ** 2 - prof.x ** 2
    return 2.0 * math.sqrt(1.0 + gap * math.sin(params.theta) ** 2)


def random_settings(rng: np.random.Generator, count: int) -> list[BellSettings]:
    """``count`` quadruples of directions drawn uniformly on the sphere."""
    raw = rng.normal(size=(count, 4, 3))
    raw /= np.linalg.norm(raw, axis=-1, keepdims=True)
    return [BellSettings(*q) for q in raw]


def refine_settings(state, start: BellSettings, sweeps: int = 50) -> tuple[BellSettings, float]:
    """Coordinate ascent on the eight setting angles, starting from ``start``.

    Each coordinate is updated by a bounded scalar maximisation. Returns the
    refined settings and their CHSH value.
    """
    from scipy.optimize import minimize_scalar

    def to_angles(s: BellSettings) -> np.ndarray:
        out = []
        for v in (s.a, s.a_prime, s.b, s.b_prime):
            out += [math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0])]
        return np.array(out)

    angles = to_angles(start)
    value = bell_expectation(state, BellSettings.from_angles(angles))
    for _ in range(sweeps):
        before = value
        for i in range(8):
            def neg(theta, i=i):
                trial = angles.copy()
                trial[i] = theta
                return -bell_expectation(state, BellSettings.from_angles(trial))

            res = minimize_scalar(neg, bounds=(angles[i] - math.pi, angles[i] + math.pi),
                                  method="bounded", options={"xatol": 1e-10})
            if -res.fun > value:
                angles[i], value = res.x, -res.fun
        if value - before < 1e-13:
            break
    return BellSettings.from_angles(angles), value


def _violation_gap_scaled(kt: float) -> float:
    """``log(f^2/x^2) - log(x^2)`` divided by ``(g/k)^2``; positive while CHSH is violated."""
    u = 0.5 * kt
    one_minus = -math.expm1(-u)
    return -2.0 * kt + 4.0 * one_minus + 4.0 * one_minus ** 2


def bell_death_time(params: SystemParams, rtol: float = 1e-10) -> float:
    """Time at which ``f^2/x^2 = x^2``, after which the CHSH inequality holds.

    The condition does not depend on theta, phi or even g/k: it fixes ``kt``.

    Raises
    ------
    NoViolation
        If no sign change is found (or ``sin(theta) = 0``).
    """
    if params.k <= 0:
        raise ValueError("bell_death_time needs k > 0")
    if math.sin(params.theta) == 0.0:
        raise NoViolation("sin(theta) = 0: the state never violates CHSH")
    lo, hi = 1e-6, 50.0
    if _violation_gap_scaled(lo) <= 0:
        raise NoViolation("no violation at the start of the bracket")
    expansions = 0
    while _violation_gap_scaled(hi) > 0:
        hi *= 2.0
        expansions += 1
        if expansions > 20:
            raise NoViolation("violation persists over the whole search bracket")
    kt = bisect(_violation_gap_scaled, lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps),
                maxiter=2000)
    return kt / params.k
