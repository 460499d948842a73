"""Closed form versus independent routes: the ``validate`` scenario."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import metrics as M
from . import teleportation as T
from .config import ScenarioConfig
from .dynamics import SystemParams, scalar_profile
from .errors import JCLabError
from .oracle import lindblad_trajectory, project_to_qubit
from .scenarios import Dataset, parallel_map
from .states import coherent_fock, joint_state, reduced_states

ORACLE_KT = (0.25, 0.5, 1.0, 2.0, 4.0)
ORACLE_G_OVER_K = (0.5, 1.0, 2.0)
ORACLE_THETA = (math.pi / 4, math.pi / 2, 3 * math.pi / 4)
ORACLE_PHI = (0.0, math.pi / 3)

METRIC_KT = (0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0)
METRIC_THETA = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)
METRIC_PHI = (0.0, math.pi / 3, math.pi)

TOL_ORACLE = 1e-6
TOL_METRIC = 1e-10
TOL_QUADRATURE = 1e-8
TOL_DFS = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: max_dev={self.value:.3e} tol={self.tol:.1e}"
        return text + (f" ({self.detail})" if self.detail else "")


def _check(name, value, tol, detail="") -> CheckResult:
    return CheckResult(name, float(value), tol, bool(value < tol), detail)


def _axis_values(config: ScenarioConfig, variable: str, default):
    for axis in config.grid:
        if axis.variable == variable:
            return tuple(float(v) for v in axis.grid())
    return default


def _oracle_case(k: float, ratio: float, theta: float, phi: float, kts, fock_dim, tol):
    """Max deviation and leakage of one trajectory; errors come back as text."""
    params = SystemParams(g=ratio * k, k=k, theta=theta, phi=phi)
    times = [kt / k for kt in kts]
    where = f"g/k={ratio:g}, theta={theta:.6g}, phi={phi:.6g}"
    try:
        states = lindblad_trajectory(params, times, N=fock_dim, tol=tol, dt=0.01 / max(params.g, k))
        dev = leak = 0.0
        for t, st in zip(times, states):
            proj = project_to_qubit(st, scalar_profile(params, t).alpha)
            dev = max(dev, float(np.max(np.abs(proj.state.matrix - joint_state(params, t).matrix))))
            leak = max(leak, proj.leakage)
        return dev, leak, None
    except JCLabError as exc:
        return math.inf, math.inf, f"{type(exc).__name__} at {where}: {exc}"


def _oracle_worker(args, k, kts, fock_dim, tol):
    return _oracle_case(k, *args, kts, fock_dim, tol)


def check_oracle(config: ScenarioConfig, threads: int = 1) -> CheckResult:
    kts = _axis_values(config, "kt", ORACLE_KT)
    cases = [(r, th, ph)
             for r in _axis_values(config, "g_over_k", ORACLE_G_OVER_K)
             for th in _axis_values(config, "theta", ORACLE_THETA)
             for ph in _axis_values(config, "phi", ORACLE_PHI)]
    k = config.params.k if config.params.k > 0 else 1.0
    work = partial(_oracle_worker, k=k, kts=kts, fock_dim=config.fock_dim, tol=config.tol)
    results = parallel_map(work, cases, threads)
    errors = [err for _, _, err in results if err]
    dev = max(r[0] for r in results)
    leak = max(r[1] for r in results)
    detail = errors[0] if errors else f"{len(cases)} trajectories x {len(kts)} times, max leakage {leak:.2e}"
    return CheckResult("oracle_vs_closed_form", dev, TOL_ORACLE, not errors and dev < TOL_ORACLE, detail)


def _metric_grid(config: ScenarioConfig):
    k = config.params.k if config.params.k > 0 else 1.0
    for r in _axis_values(config, "g_over_k", ORACLE_G_OVER_K):
        for th in METRIC_THETA:
            for ph in METRIC_PHI:
                p = SystemParams(g=r * k, k=k, theta=th, phi=ph)
                for kt in METRIC_KT:
                    yield p, kt / k


def check_metrics(config: ScenarioConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)
    dev = {name: 0.0 for name in ("wootters", "horodecki", "lambda34", "probabilities",
                                  "p0_fidelity", "p1_concurrence", "p1_expanded", "p1_lambda23",
                                  "linear_entropy")}
    for p, t in _metric_grid(config):
        rho = joint_state(p, t)
        lam = M.wootters_eigenvalues(rho)
        dev["wootters"] = max(dev["wootters"], abs(M.concurrence(rho) - M.concurrence_closed_form(p, t)))
        dev["lambda34"] = max(dev["lambda34"], lam[2], lam[3])
        dev["horodecki"] = max(dev["horodecki"], abs(M.bell_max(rho) - M.bell_max_closed_form(p, t)))
        atom, field = reduced_states(rho)
        closed = M.linear_entropies_closed_form(p, t)
        dev["linear_entropy"] = max(dev["linear_entropy"], abs(M.linear_entropy(rho) - closed.joint),
                                    abs(M.linear_entropy(atom) - closed.atom),
                                    abs(M.linear_entropy(field) - closed.field))
        probs = T.channel_probabilities(rho)
        closed_p = T.channel_probabilities_closed_form(p, t)
        dev["probabilities"] = max(dev["probabilities"],
                                   float(np.max(np.abs(probs.as_array() - closed_p.as_array()))))
        for vt, vp in zip(rng.uniform(0, math.pi, 4), rng.uniform(0, 2 * math.pi, 4)):
            s = T.BlochAngles(float(vt), float(vp))
            out1 = T.teleport_one_qubit(probs, s)
            dev["p0_fidelity"] = max(dev["p0_fidelity"],
                                     abs(T.fidelity(s, out1) - T.fidelity_p0_closed_form(closed_p, s.vartheta)))
            out2 = T.teleport_two_qubit(probs, s)
            c_closed = T.output_concurrence_closed_form(closed_p, s.vartheta)
            dev["p1_concurrence"] = max(dev["p1_concurrence"], abs(M.concurrence(out2) - c_closed))
            dev["p1_expanded"] = max(dev["p1_expanded"],
                                     abs(T.output_concurrence_expanded(p, t, s.vartheta) - c_closed))
            lam2 = M.wootters_eigenvalues(out2)
            target = 4 * (closed_p.p0 + closed_p.p3) ** 2 * closed_p.p1 ** 2
            # the pair need not sit in the middle of the sorted spectrum
            near = np.sort(np.abs(lam2 - target))[:2]
            dev["p1_lambda23"] = max(dev["p1_lambda23"], float(near.max()))
    return [
        _check("wootters_vs_closed_form", dev["wootters"], TOL_METRIC),
        _check("wootters_lambda3_lambda4_zero", dev["lambda34"], TOL_METRIC),
        _check("horodecki_vs_closed_form", dev["horodecki"], TOL_METRIC),
        _check("linear_entropies_vs_closed_form", dev["linear_entropy"], TOL_METRIC),
        _check("bell_weights_vs_closed_form", dev["probabilities"], TOL_METRIC),
        _check("p0_fidelity_vs_closed_form", dev["p0_fidelity"], TOL_METRIC),
        _check("p1_concurrence_vs_closed_form", dev["p1_concurrence"], TOL_METRIC),
        _check("p1_concurrence_expanded_form", dev["p1_expanded"], TOL_METRIC),
        _check("p1_lambda2_lambda3", dev["p1_lambda23"], TOL_METRIC),
    ]


def check_average_fidelity(config: ScenarioConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed + 1)
    quad = 0.0
    worst_z = 0.0
    base = config.params
    for kt in (0.5, 1.0, 1.5, 2.0, 3.0):
        t = kt / base.k if base.k > 0 else kt
        probs = T.channel_probabilities(joint_state(base, t))
        formula = T.average_fidelity_p0(base, t)
        quad = max(quad, abs(T.average_fidelity_quadrature(probs) - formula))
        mean, err = T.average_fidelity_monte_carlo(probs, 10_000, rng)
        worst_z = max(worst_z, abs(mean - formula) / err if err > 0 else 0.0)
    return [
        _check("p0_average_fidelity_quadrature", quad, TOL_QUADRATURE),
        _check("p0_average_fidelity_monte_carlo", worst_z, 3.0, "value is |mean - formula| / stderr"),
    ]


def check_bell_maximality(config: ScenarioConfig, samples: int = 1000) -> CheckResult:
    rng = np.random.default_rng(config.seed + 2)
    worst = -math.inf
    base = config.params
    for kt in (0.5, 1.0, 2.5):
        t = kt / base.k if base.k > 0 else kt
        rho = joint_state(base, t)
        bmax = M.bell_max(rho)
        values = [M.bell_expectation(rho, s) for s in M.random_settings(rng, samples)]
        worst = max(worst, max(values) - bmax)
    return CheckResult("horodecki_bound_over_random_settings", max(worst, 0.0), TOL_METRIC,
                       worst <= TOL_METRIC, f"{samples} settings per state; max excess {worst:.3e}")


def check_bell_death(config: ScenarioConfig) -> CheckResult:
    worst = 0.0
    k = config.params.k if config.params.k > 0 else 1.0
    for r in _axis_values(config, "g_over_k", ORACLE_G_OVER_K):
        p = SystemParams(g=r * k, k=k, theta=math.pi / 2)
        t = M.bell_death_time(p)
        prof = scalar_profile(p, t)
        worst = max(worst, abs(prof.f_over_x ** 2 - prof.x ** 2))
    return _check("bell_death_root_residual", worst, 1e-9)


def check_decoherence_free(config: ScenarioConfig) -> CheckResult:
    base = config.params.with_(theta=0.0)
    k = base.k if base.k > 0 else 1.0
    base = base.with_(k=k)
    kts = tuple(np.linspace(0.0, 6.0, 13))
    times = [kt / k for kt in kts]
    worst = 0.0
    for t in times:
        rho = joint_state(base, t)
        atom, field = reduced_states(rho)
        worst = max(worst, M.concurrence(rho), M.concurrence_closed_form(base, t),
                    M.linear_entropy(rho), M.linear_entropy(atom), M.linear_entropy(field))
    try:
        states = lindblad_trajectory(base, times, N=config.fock_dim, tol=config.tol, dt=0.01 / max(base.g, k))
    except JCLabError as exc:
        return CheckResult("decoherence_free_subspace", math.inf, TOL_DFS, False,
                           f"{type(exc).__name__} at theta=0: {exc}")
    for t, st in zip(times, states):
        alpha = scalar_profile(base, t).alpha
        psi = np.kron(np.array([1.0, 0.0]), coherent_fock(-alpha, st.N, max_tail=None))
        worst = max(worst, abs(1.0 - float(np.real(np.vdot(psi, st.matrix @ psi)))))
    return _check("decoherence_free_subspace", worst, TOL_DFS,
                  "theta=0: concurrence, three linear entropies, 1 - oracle fidelity")


def validate(config: ScenarioConfig, threads: int = 1) -> list[CheckResult]:
    """Run every cross-check; each result carries its own pass/fail."""
    results = [check_oracle(config, threads)]
    results += check_metrics(config)
    results += check_average_fidelity(config)
    results.append(check_bell_maximality(config))
    results.append(check_bell_death(config))
    results.append(check_decoherence_free(config))
    return results


def report_dataset(results: list[CheckResult]) -> Dataset:
    rows = [(r.name, r.value, r.tol, int(r.passed)) for r in results]
    return Dataset(("check", "max_dev", "tol", "passed"), rows, (), {"scenario": "validate"})
