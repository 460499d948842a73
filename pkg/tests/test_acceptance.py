"""Acceptance suite: one PASS/FAIL line per criterion, printed to the terminal.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even when
output capture is on) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from jclab.config import config_from_dict
from jclab.dynamics import SystemParams
from jclab.metrics import bell_death_time, bell_max_closed_form, concurrence, concurrence_closed_form, linear_entropy
from jclab.scenarios import run_scenario
from jclab.states import joint_state, reduced_states
from jclab.teleportation import CLASSICAL_ONE_QUBIT, CLASSICAL_TWO_QUBIT, average_fidelity_p0
from jclab.validation import check_average_fidelity, check_decoherence_free, check_metrics, check_oracle

UNIT = SystemParams(g=1.0, k=1.0, theta=math.pi / 2, phi=0.0)


@pytest.fixture
def report(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line)
        else:
            print(line)
        assert passed, line

    return emit


def test_asymptotic_field_entropy(report):
    _, field = reduced_states(joint_state(UNIT, 40.0))
    value = linear_entropy(field)
    target = 0.5 * (1 - math.exp(-4))
    report("asymptotic field entropy", abs(value - target) < 1e-6,
           f"S_field(kt=40) = {value:.10f}, target {target:.10f}, |diff| = {abs(value - target):.2e} (tol 1e-6)")


def test_two_qubit_teleportation_ceiling(report):
    start = time.perf_counter()
    ds = run_scenario(config_from_dict({}, "fig5"))
    c = ds.column("output_concurrence_p1")
    k = int(np.argmax(c))
    kt_at, theta_at = ds.rows[k][0], ds.rows[k][1]
    # the theta = pi/2 slice (g = k = 1, input vartheta = pi/2, phi = 0)
    slice_ds = run_scenario(config_from_dict(
        {"grid": [{"variable": "kt", "min": 0.0, "max": 6.0, "points": 601}]}, "fig5"))
    cs = slice_ds.column("output_concurrence_p1")
    js = int(np.argmax(cs))
    closed_kt2 = float(cs[np.argmin(np.abs(slice_ds.column("kt") - 2.0))])
    elapsed = time.perf_counter() - start
    positive = c.max() > 0
    below = c.max() < 0.1
    near = abs(cs.max() - 0.026) <= 0.005 and abs(slice_ds.rows[js][0] - 2.0) <= 0.25
    report("two-qubit teleportation ceiling", positive and below and near,
           f"grid max {c.max():.6f} at kt={kt_at:.4g}, theta={theta_at:.4g} "
           f"(positive: {positive}, < 0.1: {below}); theta=pi/2 slice max {cs.max():.6f} "
           f"at kt={slice_ds.rows[js][0]:.4g}, value at kt=2 is {closed_kt2:.6f} "
           f"(max ~0.026 near kt~2: {near}); {elapsed:.2f} s")


def test_classical_thresholds(report):
    start = time.perf_counter()
    p0 = run_scenario(config_from_dict({}, "fig4"))
    p1 = run_scenario(config_from_dict({}, "fig6"))
    kts = p0.column("kt")
    one = kts[p0.column("average_fidelity_p0") > CLASSICAL_ONE_QUBIT]
    two = kts[p1.column("optimal_fidelity_p1") > CLASSICAL_TWO_QUBIT]
    # sanity: the dataset column is the function itself
    assert p0.column("average_fidelity_p0")[50] == average_fidelity_p0(UNIT, kts[50])
    elapsed = time.perf_counter() - start
    report("classical thresholds", one.size > 0 and two.size > 0 and elapsed < 1.0,
           f"P0 average fidelity > 2/3 for kt in [{one.min():.3g}, {one.max():.3g}]; "
           f"P1 optimal fidelity > 2/5 for kt in [{two.min():.3g}, {two.max():.3g}]; {elapsed:.2f} s")


def test_oracle_equivalence(report):
    start = time.perf_counter()
    result = check_oracle(config_from_dict({}, "validate"))
    elapsed = time.perf_counter() - start
    report("oracle equivalence", result.passed and elapsed < 60.0,
           f"max entrywise deviation {result.value:.3e} (tol 1e-6), {result.detail}; {elapsed:.1f} s")


def test_metric_equivalence(report):
    start = time.perf_counter()
    wanted = {"wootters_vs_closed_form", "horodecki_vs_closed_form", "p0_fidelity_vs_closed_form",
              "p1_concurrence_vs_closed_form"}
    results = [r for r in check_metrics(config_from_dict({}, "validate")) if r.name in wanted]
    elapsed = time.perf_counter() - start
    detail = ", ".join(f"{r.name.replace('_vs_closed_form', '')} {r.value:.1e}" for r in results)
    report("metric equivalence", len(results) == 4 and all(r.passed for r in results),
           f"max deviations (tol 1e-10): {detail}; {elapsed:.1f} s")


def test_entanglement_without_violation(report):
    kt_star = bell_death_time(UNIT) * UNIT.k
    found = None
    for kt in kt_star + np.linspace(1e-4, 0.2, 200):
        c = concurrence(joint_state(UNIT, kt))
        b = bell_max_closed_form(UNIT, kt)
        if c > 0.3 and b < 2.0:
            found = (kt, c, b)
            break
    detail = f"Bell-death kt* = {kt_star:.9f}"
    if found:
        detail += f"; at kt = {found[0]:.6f}: C = {found[1]:.6f}, B_max = {found[2]:.8f}"
    report("entanglement without violation", found is not None and abs(kt_star - 2.31) < 0.01, detail)


def test_decoherence_free_subspace(report):
    result = check_decoherence_free(config_from_dict({}, "validate"))
    theta0 = SystemParams(theta=0.0)
    closed = max(concurrence_closed_form(theta0, kt) for kt in np.linspace(0, 6, 61))
    report("decoherence-free subspace", result.passed and closed == 0.0,
           f"max over kt in [0,6] of C, three linear entropies and 1 - oracle fidelity: "
           f"{result.value:.3e} (tol 1e-6)")


def test_monte_carlo_fidelity(report):
    mc = [r for r in check_average_fidelity(config_from_dict({}, "validate"))
          if r.name == "p0_average_fidelity_monte_carlo"][0]
    report("Monte-Carlo fidelity", mc.passed,
           f"worst |mean - formula| / stderr over five kt values with 1e4 samples: {mc.value:.3f} (limit 3)")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
