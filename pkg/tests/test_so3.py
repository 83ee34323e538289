import numpy as np
import numpy.testing as npt
import pytest

from attbound.errors import NotSkew, NotSPD
from attbound.so3 import exp_so3, hat, log_so3, rotation_defect, spd_sqrt, trace_deflate


def series_exp(v, terms=30):
    """Truncated matrix-exponential series, independent of the Rodrigues path.

    30 terms keep the truncation tail below 1e-12 out to a full half turn.
    """
    S = hat(v)
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, terms):
        term = term @ S / k
        out = out + term
    return out


def test_hat_zero():
    npt.assert_array_equal(hat([0.0, 0.0, 0.0]), np.zeros((3, 3)))


def test_hat_cross_product_definition():
    npt.assert_allclose(hat([1.0, 0.0, 0.0]) @ [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])


def test_hat_antisymmetry_of_cross():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        npt.assert_allclose(hat(a) @ b, -hat(b) @ a, atol=1e-14)
        npt.assert_allclose(hat(a) @ b, np.cross(a, b), atol=1e-14)


def test_vee_round_trip():
    v = np.array([1.0, 2.0, 3.0])
    npt.assert_array_equal(vee_of(hat(v)), v)


def vee_of(S):
    from attbound.so3 import vee
    return vee(S)


def test_vee_zero():
    npt.assert_array_equal(vee_of(np.zeros((3, 3))), np.zeros(3))


def test_vee_rejects_symmetric():
    with pytest.raises(NotSkew):
        vee_of(np.eye(3))


def test_exp_zero_is_identity():
    npt.assert_array_equal(exp_so3([0.0, 0.0, 0.0]), np.eye(3))


def test_exp_half_turn_about_e3():
    npt.assert_allclose(exp_so3([0.0, 0.0, np.pi]), np.diag([-1.0, -1.0, 1.0]), atol=1e-15)


def test_exp_matches_series_oracle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        v = rng.standard_normal(3)
        v *= rng.uniform(0.0, np.pi) / np.linalg.norm(v)
        npt.assert_allclose(exp_so3(v), series_exp(v), atol=1e-12)


def test_log_identity():
    npt.assert_array_equal(log_so3(np.eye(3)), np.zeros(3))


def test_log_round_trip_small():
    v = np.array([0.1, -0.2, 0.3])
    npt.assert_allclose(log_so3(exp_so3(v)), v, atol=1e-12)


def test_log_half_turn_sign_convention():
    v = log_so3(np.diag([-1.0, -1.0, 1.0]))
    npt.assert_allclose(np.linalg.norm(v), np.pi, atol=1e-12)
    npt.assert_allclose(v, [0.0, 0.0, np.pi], atol=1e-12)
    # half turn about e1 and e2 as well: first nonzero component positive
    npt.assert_allclose(log_so3(np.diag([1.0, -1.0, -1.0])), [np.pi, 0.0, 0.0], atol=1e-12)
    npt.assert_allclose(log_so3(np.diag([-1.0, 1.0, -1.0])), [0.0, np.pi, 0.0], atol=1e-12)


def test_log_exp_round_trip_below_pi():
    rng = np.random.default_rng(3)
    for _ in range(300):
        v = rng.standard_normal(3)
        v *= rng.uniform(0.0, np.pi - 1e-9) / np.linalg.norm(v)
        npt.assert_allclose(log_so3(exp_so3(v)), v, atol=1e-10)


def test_log_exp_round_trip_near_pi():
    # Below a gap of ~1e-13 the axis sign is unrecoverable in double
    # precision (the branch convention takes over), so stop at 1e-10.
    rng = np.random.default_rng(4)
    for gap in (1e-3, 1e-5, 1e-7, 1e-9, 1e-10):
        for _ in range(20):
            v = rng.standard_normal(3)
            v *= (np.pi - gap) / np.linalg.norm(v)
            npt.assert_allclose(log_so3(exp_so3(v)), v, atol=1e-10)


def test_rotation_round_trip_at_the_branch_cut():
    # exp(log(R)) must return R even when the axis sign is conventional.
    rng = np.random.default_rng(40)
    for gap in (1e-12, 0.0):
        for _ in range(20):
            v = rng.standard_normal(3)
            v *= (np.pi - gap) / np.linalg.norm(v)
            R = exp_so3(v)
            npt.assert_allclose(exp_so3(log_so3(R)), R, atol=1e-10)


def test_exp_log_round_trip_on_rotations():
    rng = np.random.default_rng(5)
    for _ in range(300):
        v = rng.standard_normal(3)
        v *= rng.uniform(0.0, np.pi) / np.linalg.norm(v)
        R = exp_so3(v)
        npt.assert_allclose(exp_so3(log_so3(R)), R, atol=1e-10)


def test_exp_output_is_orthonormal():
    rng = np.random.default_rng(6)
    for _ in range(300):
        v = rng.standard_normal(3) * rng.uniform(0.0, 10.0)
        R = exp_so3(v)
        assert rotation_defect(R) <= 1e-12
        assert np.linalg.det(R) > 0.0


def test_trace_deflate_identity_and_zero():
    npt.assert_array_equal(trace_deflate(np.eye(3)), 2.0 * np.eye(3))
    npt.assert_array_equal(trace_deflate(np.zeros((3, 3))), np.zeros((3, 3)))


def test_trace_deflate_skew_identity():
    rng = np.random.default_rng(7)
    for _ in range(100):
        A = rng.standard_normal((3, 3))
        x = rng.standard_normal(3)
        lhs = hat(x) @ A + A.T @ hat(x)
        rhs = hat(trace_deflate(A) @ x)
        npt.assert_allclose(lhs, rhs, atol=1e-12)


def test_spd_sqrt_identity_and_scaled():
    npt.assert_allclose(spd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
    npt.assert_allclose(spd_sqrt(4.0 * np.eye(3)), 2.0 * np.eye(3), atol=1e-14)


def test_spd_sqrt_eigendecomposition_oracle():
    rng = np.random.default_rng(8)
    for _ in range(50):
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        D = np.diag([1.0, 4.0, 9.0])
        A = Q @ D @ Q.T
        expected = Q @ np.sqrt(D) @ Q.T
        B = spd_sqrt(A)
        npt.assert_allclose(B, expected, atol=1e-12)
        npt.assert_allclose(B @ B, A, atol=1e-10)


def test_spd_sqrt_rejects_indefinite():
    with pytest.raises(NotSPD):
        spd_sqrt(np.diag([1.0, -1.0, 2.0]))
    with pytest.raises(NotSPD):
        spd_sqrt(np.arange(9.0).reshape(3, 3))
