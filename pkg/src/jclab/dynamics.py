"""Closed-form scalar dynamics of the strongly driven atom in a lossy cavity.

Everything in the exact solution is driven by three scalars of time:

* ``alpha(t) = i (g/k) (1 - exp(-kt/2))``, the coherent amplitude,
* ``f(t)``, the factor that damps the atomic coherence,
* ``x(t) = <alpha|-alpha> = exp(-2|alpha|^2)``, the overlap of the two field branches.

``f`` and ``x`` are carried together with their logarithms so that ratios such
as ``f/x`` stay finite long after ``f`` itself underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this value of kt the dissipation-free limit branch is used.
KT_SWITCH = 1e-6
# Below this value of kt/2 the shifted exponentials are summed as series.
_SERIES_U = 0.1
_SERIES_TERMS = 12


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs.

    Attributes
    ----------
    g : float
        Atom-field coupling rate, ``g > 0``.
    k : float
        Cavity decay rate, ``k >= 0``.
    theta, phi : float
        Bloch angles of the initial atomic state
        ``cos(theta/2)|+> + exp(i phi) sin(theta/2)|->``.
    """

    g: float = 1.0
    k: float = 1.0
    theta: float = math.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        for name in ("g", "k", "theta", "phi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")

    @property
    def g_over_k(self) -> float:
        return math.inf if self.k == 0 else self.g / self.k

    def with_(self, **changes) -> "SystemParams":
        fields = {"g": self.g, "k": self.k, "theta": self.theta, "phi": self.phi}
        fields.update(changes)
        return SystemParams(**fields)


@dataclass(frozen=True)
class ScalarProfile:
    """The triple (alpha, f, x) at one instant, plus ``log f`` and ``log x``."""

    alpha: complex
    f: float
    x: float
    log_f: float
    log_x: float

    @property
    def one_minus_x2(self) -> float:
        """``1 - x^2`` without cancellation for small |alpha|."""
        return -math.expm1(2.0 * self.log_x)

    @property
    def f_over_x(self) -> float:
        return math.exp(self.log_f - self.log_x)


def _shifted_exp_ratios(u: float) -> tuple[float, float]:
    """Return ``((1 - e^-u)/u, (e^-u - 1 + u)/u^2)``; both are finite at u = 0."""
    if u < _SERIES_U:
        # sum_n (-u)^n/(n+1)!  and  sum_n (-u)^n/(n+2)!
        p1 = p2 = 0.0
        term = 1.0
        for n in range(_SERIES_TERMS):
            p1 += term / math.factorial(n + 1)
            p2 += term / math.factorial(n + 2)
            term *= -u
        return p1, p2
    em1 = math.expm1(-u)
    return -em1 / u, (em1 + u) / (u * u)


def _check_time(t: float) -> None:
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")


def scalar_profile(params: SystemParams, t: float) -> ScalarProfile:
    """Evaluate alpha(t), f(t) and x(t).

    For ``kt < KT_SWITCH`` (including ``k = 0``) the limit form
    ``alpha = i g t/2 * phi1(kt/2)``, ``log f = -g^2 t^2 * phi2(kt/2)`` is used,
    which reduces to ``alpha = i g t / 2`` and ``f = x = exp(-g^2 t^2 / 2)``
    at ``k = 0``. No branch divides by ``k``.
    """
    _check_time(t)
    g, k = params.g, params.k
    kt = k * t
    u = 0.5 * kt
    if kt < KT_SWITCH:
        p1, p2 = _shifted_exp_ratios(u)
        amp = 0.5 * g * t * p1
        log_f = -(g * t) ** 2 * p2
    else:
        ratio = g / k
        amp = ratio * -math.expm1(-u)
        if u < _SERIES_U:
            shifted = u * u * _shifted_exp_ratios(u)[1]
        else:
            shifted = math.expm1(-u) + u
        # -2 (g/k)^2 kt + 4 (g/k)^2 (1 - e^{-kt/2})
        log_f = -4.0 * ratio * ratio * shifted
    log_x = -2.0 * amp * amp
    return ScalarProfile(
        alpha=complex(0.0, amp),
        f=math.exp(log_f),
        x=math.exp(log_x),
        log_f=log_f,
        log_x=log_x,
    )


def scalar_profiles(params: SystemParams, times) -> list[ScalarProfile]:
    return [scalar_profile(params, float(t)) for t in np.atleast_1d(times)]


def characteristic_function(params: SystemParams, t: float, beta: complex,
                            block: tuple[int, int]) -> complex:
    """Phase-space function ``chi_ij(beta, t) = Tr_f[rho_ij(t) D(beta)]``.

    ``block`` indexes the atomic rotated basis, 1 for ``|+>`` and 2 for ``|->``.
    The (2, 1) block is obtained from the (1, 2) block through
    ``chi_21(beta) = conj(chi_12(-beta))``, which follows from ``rho_21 = rho_12^dagger``
    and ``D(beta)^dagger = D(-beta)``.
    """
    i, j = block
    if (i, j) not in {(1, 1), (1, 2), (2, 1), (2, 2)}:
        raise ValueError(f"block must be a pair in {{1, 2}}^2, got {block!r}")
    if (i, j) == (2, 1):
        return complex(np.conj(characteristic_function(params, t, -beta, (1, 2))))
    prof = scalar_profile(params, t)
    a = prof.alpha
    beta = complex(beta)
    bc = beta.conjugate()
    base = -0.5 * abs(beta) ** 2
    half = 0.5 * params.theta
    if (i, j) == (1, 1):
        return math.cos(half) ** 2 * np.exp(base - a.conjugate() * beta + a * bc)
    if (i, j) == (2, 2):
        return math.sin(half) ** 2 * np.exp(base + a.conjugate() * beta - a * bc)
    pref = 0.5 * np.exp(-1j * params.phi) * math.sin(params.theta)
    # f enters through its logarithm so the product survives f underflow
    return pref * np.exp(prof.log_f + base + a.conjugate() * beta + a * bc)
