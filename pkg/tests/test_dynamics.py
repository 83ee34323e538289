import numpy as np
import numpy.testing as npt
import pytest

from attbound.dynamics import (
    FreeBody,
    GravityGradient,
    Pendulum3D,
    RigidBodyModel,
    State,
    linearize_step,
    moment,
    solve_relative_attitude,
    step,
)
from attbound.so3 import exp_so3, hat, log_so3, rotation_defect, vee

J_SEC5 = np.diag([1.0, 2.8, 2.0])


def random_rotation(rng):
    v = rng.standard_normal(3)
    return exp_so3(v * rng.uniform(0.0, np.pi) / np.linalg.norm(v))


def fd_jacobian(model, s, h, eps=1e-5):
    """Independent finite-difference Jacobian of the step map (eps differs
    from the implementation default)."""
    center = step(model, s, h)
    A = np.empty((6, 6))
    for j in range(6):
        d = np.zeros(6)
        d[j] = eps
        cols = []
        for sign in (1.0, -1.0):
            p = State(s.R @ exp_so3(sign * d[:3]), s.Omega + sign * d[3:])
            n = step(model, p, h)
            cols.append(np.concatenate([log_so3(center.R.T @ n.R), n.Omega - center.Omega]))
        A[:, j] = (cols[0] - cols[1]) / (2.0 * eps)
    return A


def total_energy(model, s):
    return 0.5 * s.Omega @ (model.J @ s.Omega) + model.potential.energy(s.R)


# --- moment ---------------------------------------------------------------

def test_moment_free_body_vanishes():
    rng = np.random.default_rng(20)
    model = RigidBodyModel(J_SEC5)
    for _ in range(10):
        npt.assert_array_equal(moment(model, random_rotation(rng)), np.zeros(3))


def test_moment_pendulum_hanging_equilibrium():
    model = RigidBodyModel(J_SEC5, Pendulum3D(mg=1.0, rho=[0.0, 0.0, 1.0]))
    npt.assert_allclose(moment(model, np.eye(3)), np.zeros(3), atol=1e-15)


@pytest.mark.parametrize("potential", [
    GravityGradient(J_SEC5),
    Pendulum3D(mg=2.0, rho=[0.1, -0.3, 0.9]),
])
def test_moment_matches_potential_finite_differences(potential):
    # d/dt U(R exp(hat(t eta)))|_0 = -eta . M for every so(3) direction eta
    rng = np.random.default_rng(21)
    model = RigidBodyModel(J_SEC5, potential)
    delta = 1e-6
    for _ in range(20):
        R = random_rotation(rng)
        M = moment(model, R)
        for i in range(3):
            eta = np.zeros(3)
            eta[i] = delta
            dU = (potential.energy(R @ exp_so3(eta)) - potential.energy(R @ exp_so3(-eta))) / (2.0 * delta)
            npt.assert_allclose(dU, -M[i], rtol=1e-5, atol=1e-9)


@pytest.mark.parametrize("potential", [
    FreeBody(),
    GravityGradient(J_SEC5),
    Pendulum3D(mg=2.0, rho=[0.1, -0.3, 0.9]),
])
def test_moment_two_formulas_agree(potential):
    # rows-of-R cross rows-of-gradient vs skew extraction of G^T R - R^T G
    rng = np.random.default_rng(22)
    model = RigidBodyModel(J_SEC5, potential)
    for _ in range(20):
        R = random_rotation(rng)
        G = potential.gradient(R)
        npt.assert_allclose(moment(model, R), vee(G.T @ R - R.T @ G, tol=1e-9), atol=1e-12)


# --- implicit relative-attitude solve --------------------------------------

def test_relative_attitude_zero_momentum():
    model = RigidBodyModel(J_SEC5)
    npt.assert_allclose(
        solve_relative_attitude(model, np.zeros(3), np.zeros(3), 0.01), np.eye(3), atol=1e-15
    )


def test_relative_attitude_residual_certificate():
    model = RigidBodyModel.gravity_gradient(J_SEC5)
    Omega = np.array([2.316, 0.446, -0.591])
    h = 0.01
    M = moment(model, np.diag([-1.0, -1.0, 1.0]))
    F = solve_relative_attitude(model, Omega, M, h)
    lhs = h * hat(model.J @ Omega + 0.5 * h * M)
    rhs = F @ model.J_d - model.J_d @ F.T
    resid = np.linalg.norm(lhs - rhs, "fro")
    assert resid <= 1e-13 * max(1.0, np.linalg.norm(model.J @ Omega))
    assert rotation_defect(F) <= 1e-12


def test_relative_attitude_step_refinement():
    model = RigidBodyModel(J_SEC5)
    Omega = np.array([1.2, -0.7, 0.4])
    norms = []
    for h in (1e-2, 1e-3, 1e-4):
        F = solve_relative_attitude(model, Omega, np.zeros(3), h)
        norms.append(np.linalg.norm(log_so3(F)))
    # ||log F|| = O(h): each decade of h shrinks it by ~10x
    assert norms[0] / norms[1] == pytest.approx(10.0, rel=0.05)
    assert norms[1] / norms[2] == pytest.approx(10.0, rel=0.05)


# --- step: conservation ----------------------------------------------------

def test_step_relative_equilibrium():
    model = RigidBodyModel(J_SEC5)
    omega0 = np.array([1.7, 0.0, 0.0])  # spin about the principal axis e1
    R0 = np.eye(3)
    s = State(R0, omega0)
    spatial_axis = R0 @ np.array([1.0, 0.0, 0.0])
    for _ in range(1000):
        s = step(model, s, 0.01)
        npt.assert_allclose(s.Omega, omega0, atol=1e-12)
        npt.assert_allclose(s.R @ np.array([1.0, 0.0, 0.0]), spatial_axis, atol=1e-12)


def test_step_free_body_long_run_conservation():
    model = RigidBodyModel(J_SEC5)
    s = State(np.diag([-1.0, -1.0, 1.0]), np.array([2.316, 0.446, -0.591]))
    E0 = total_energy(model, s)
    L0 = s.R @ (model.J @ s.Omega)
    energies = [E0]
    for k in range(10_000):
        s = step(model, s, 0.01)
        energies.append(total_energy(model, s))
        if k % 100 == 0:
            assert rotation_defect(s.R) <= 1e-12
            npt.assert_allclose(s.R @ (model.J @ s.Omega), L0, atol=1e-10)
    energies = np.array(energies)
    assert (energies.max() - energies.min()) / abs(E0) < 1e-6
    npt.assert_allclose(s.R @ (model.J @ s.Omega), L0, atol=1e-10)


def test_step_pendulum_energy_bounded():
    model = RigidBodyModel(J_SEC5, Pendulum3D(mg=1.0, rho=[0.0, 0.0, 1.0]))
    s = State(exp_so3([0.4, 0.2, 0.0]), np.array([0.1, -0.2, 0.3]))
    E0 = total_energy(model, s)
    energies = [E0]
    for _ in range(2000):
        s = step(model, s, 0.01)
        energies.append(total_energy(model, s))
    energies = np.array(energies)
    assert (energies.max() - energies.min()) / abs(E0) < 1e-5


# --- linearize_step ---------------------------------------------------------

def test_linearize_identity_limit():
    model = RigidBodyModel.gravity_gradient(J_SEC5)
    s = State(exp_so3([0.3, -0.1, 0.2]), np.array([0.4, 0.2, -0.3]))
    for h, bound in ((1e-2, 0.1), (1e-3, 0.01), (1e-4, 1e-3)):
        A = linearize_step(model, s, h)
        assert np.linalg.norm(A - np.eye(6), "fro") < bound


def test_linearize_matches_independent_finite_differences():
    rng = np.random.default_rng(23)
    potentials = [FreeBody(), GravityGradient(J_SEC5), Pendulum3D(mg=1.5, rho=[0.2, 0.1, 0.95])]
    for trial in range(30):
        model = RigidBodyModel(J_SEC5, potentials[trial % 3])
        s = State(random_rotation(rng), rng.uniform(-1.5, 1.5, 3))
        A = linearize_step(model, s, 0.01)
        A_fd = fd_jacobian(model, s, 0.01, eps=1e-5)
        assert np.linalg.norm(A - A_fd, "fro") <= 1e-5 * max(1.0, np.linalg.norm(A_fd, "fro"))


def test_linearize_omega_to_zeta_block():
    # at rest the delta-Omega -> zeta sensitivity is h * I to leading order
    rng = np.random.default_rng(24)
    model = RigidBodyModel(J_SEC5)
    h = 1e-3
    A = linearize_step(model, State(random_rotation(rng), np.zeros(3)), h)
    npt.assert_allclose(A[:3, 3:], h * np.eye(3), atol=5.0 * h**2)
