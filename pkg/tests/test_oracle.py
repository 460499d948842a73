import math

import numpy as np
import pytest

from jclab.dynamics import SystemParams, scalar_profile
from jclab.errors import ExcessLeakage, StepFailure, TruncationTooSmall
from jclab.oracle import (FockJointState, default_step, default_truncation, effective_hamiltonian,
                          evolve_lindblad, initial_state, lindblad_trajectory, project_to_qubit)
from jclab.states import decoherence_free_unitary, joint_state


def deviation(params, t, fock):
    proj = project_to_qubit(fock, scalar_profile(params, t).alpha)
    return float(np.max(np.abs(proj.state.matrix - joint_state(params, t).matrix))), proj.leakage


def test_reference_point_fixed_step(unit_params):
    fock = evolve_lindblad(unit_params, 1.0)
    dev, leak = deviation(unit_params, 1.0, fock)
    assert dev < 1e-6
    assert leak < 1e-8


def test_trajectory_health(unit_params):
    times = [0.0, 0.5, 1.0, 3.0]
    states = lindblad_trajectory(unit_params, times, tol=1e-10, dt=0.01)
    for t, st in zip(times, states):
        m = st.matrix
        assert st.t == t
        assert abs(np.trace(m).real - 1.0) < 1e-8
        assert np.max(np.abs(m - m.conj().T)) < 1e-10
        assert np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() > -1e-8
        assert st.top_level_population() < 1e-10
        # the atomic populations in the rotated basis are conserved
        np.testing.assert_allclose(np.real(np.diag(st.atom_state())), [0.5, 0.5], atol=1e-9)


def test_output_order_is_preserved(unit_params):
    a = lindblad_trajectory(unit_params, [2.0, 0.5, 1.0], tol=1e-10, dt=0.01)
    b = lindblad_trajectory(unit_params, [0.5, 1.0, 2.0], tol=1e-10, dt=0.01)
    assert [s.t for s in a] == [2.0, 0.5, 1.0]
    np.testing.assert_array_equal(a[0].matrix, b[2].matrix)


def test_tolerance_halving_converges():
    p = SystemParams(g=1.0, k=1.0, theta=math.pi / 3, phi=math.pi / 3)
    devs = []
    for tol in (1e-6, 1e-8, 1e-10):
        fock = evolve_lindblad(p, 2.0, tol=tol, dt=0.05)
        devs.append(deviation(p, 2.0, fock)[0])
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-8


def test_fixed_step_is_fourth_order():
    p = SystemParams(g=0.5, k=1.0, theta=math.pi / 4)
    devs = [deviation(p, 1.0, evolve_lindblad(p, 1.0, dt=dt))[0] for dt in (0.2, 0.1)]
    assert devs[0] / devs[1] > 2 ** 3


def test_tiny_truncation_is_reported(unit_params):
    with pytest.raises(TruncationTooSmall):
        evolve_lindblad(unit_params, 1.0, N=2)


def test_unreachable_tolerance():
    with pytest.raises(StepFailure):
        lindblad_trajectory(SystemParams(), [1.0], tol=1e-30, dt=0.1, max_steps=50)


def test_no_dissipation_matches_unitary():
    p = SystemParams(g=1.0, k=0.0, theta=1.0, phi=0.4)
    t = 1.5
    N = default_truncation(p, t)
    fock = evolve_lindblad(p, t, tol=1e-11, dt=0.01)
    u = decoherence_free_unitary(p.g, t, N)
    rho0 = initial_state(p, N)
    expected = u @ rho0 @ u.conj().T
    assert np.max(np.abs(fock.matrix - expected)) < 1e-8


def test_hamiltonian_hermitian():
    h = effective_hamiltonian(0.7, 10)
    np.testing.assert_allclose(h, h.conj().T, atol=0)


def test_defaults():
    assert default_truncation(SystemParams(g=1.0, k=1.0)) == 22
    assert default_truncation(SystemParams(g=1.0, k=0.0), t_max=2.0) == 22
    with pytest.raises(ValueError):
        default_truncation(SystemParams(g=1.0, k=0.0))
    assert default_step(SystemParams(g=2.0, k=1.0)) == pytest.approx(0.0005)


def test_projection_rejects_degenerate_alpha(unit_params):
    fock = FockJointState(initial_state(unit_params, 10), 10, 0.0)
    with pytest.raises(ExcessLeakage):
        project_to_qubit(fock, 0.0)


def test_projection_detects_leakage(unit_params):
    fock = evolve_lindblad(unit_params, 1.0, tol=1e-10, dt=0.01)
    wrong = scalar_profile(unit_params, 3.0).alpha
    with pytest.raises(ExcessLeakage):
        project_to_qubit(fock, wrong)


@pytest.mark.slow
@pytest.mark.parametrize("ratio", [0.5, 1.0, 2.0])
def test_grid_matches_closed_form(ratio):
    p = SystemParams(g=ratio, k=1.0, theta=3 * math.pi / 4, phi=math.pi / 3)
    kts = (0.25, 0.5, 1.0, 2.0, 4.0)
    states = lindblad_trajectory(p, kts, tol=1e-10, dt=0.01 / max(ratio, 1.0))
    for kt, st in zip(kts, states):
        assert deviation(p, kt, st)[0] < 1e-6


def test_spec_examples_oracle_state(unit_params):
    fock = evolve_lindblad(unit_params, 1.0, tol=1e-10, dt=0.01)
    assert abs(np.trace(fock.matrix).real - 1.0) < 1e-8
    assert fock.atom_state()[0, 1].real == pytest.approx(0.32651812479727, abs=1e-6)
    unitary = evolve_lindblad(SystemParams(g=1.0, k=0.0), 1.0)
    assert np.real(np.trace(unitary.matrix @ unitary.matrix)) == pytest.approx(1.0, abs=1e-6)
    theta0 = SystemParams(theta=0.0)
    st = evolve_lindblad(theta0, 2.0, tol=1e-10, dt=0.01)
    proj = project_to_qubit(st, scalar_profile(theta0, 2.0).alpha)
    w = np.linalg.eigvalsh(proj.state.matrix)
    assert w[-1] == pytest.approx(1.0, abs=1e-8) and np.all(np.abs(w[:-1]) < 1e-8)
