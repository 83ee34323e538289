"""Deterministic attitude estimator on the tangent bundle of SO(3).

State uncertainty is an ellipsoid around a center (R_hat, Omega_hat): the
true state satisfies R = R_hat exp(hat(zeta)), Omega = Omega_hat + dOmega
with x = [zeta; dOmega] inside a 6-ellipsoid of shape P. Estimation
alternates three stages:

  flow update         propagate center through the variational integrator
                      and P through the linearized step map;
  measurement update  build a state ellipsoid from vector observations and
                      an (optional) angular velocity reading with bounded
                      errors;
  filtering           outer-bound the intersection of the predicted and
                      measured ellipsoids and re-center on the result.

All bounds are hard (set-membership): no distributional assumptions are
made beyond the error ellipsoids, and guarantees are first order in the
linearization.
"""

from dataclasses import dataclass

import numpy as np

from . import wahba
from .dynamics import RigidBodyModel, State, linearize_step, step
from .ellipsoids import Ellipsoid, fuse_intersection, fuse_intersection_info, outer_sum
from .errors import ChartOverflow, DegenerateProfile
from .so3 import exp_so3, log_so3, rotation_defect, trace_deflate

# Embeddings of the attitude and angular-velocity blocks into R^6.
H1 = np.vstack([np.eye(3), np.zeros((3, 3))])
H2 = np.vstack([np.zeros((3, 3)), np.eye(3)])


@dataclass
class StateEllipsoid:
    """Center on TSO(3) plus a 6x6 SPD uncertainty matrix in [zeta; dOmega]."""

    R_hat: np.ndarray
    Omega_hat: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        self.R_hat = np.asarray(self.R_hat, dtype=float)
        self.Omega_hat = np.asarray(self.Omega_hat, dtype=float)
        P = np.asarray(self.P, dtype=float)
        if rotation_defect(self.R_hat) > 1e-9:
            raise ValueError("R_hat must be a rotation matrix")
        if np.linalg.norm(P - P.T, "fro") > 1e-9 * max(1.0, np.linalg.norm(P, "fro")):
            raise ValueError("P must be symmetric")
        P = 0.5 * (P + P.T)
        if np.linalg.eigvalsh(P).min() <= 0.0:
            raise ValueError("P must be positive definite")
        self.P = P

    def error_coordinates(self, R: np.ndarray, Omega: np.ndarray) -> np.ndarray:
        """Chart coordinates [zeta; dOmega] of a state relative to the center."""
        return np.concatenate([log_so3(self.R_hat.T @ R), np.asarray(Omega, dtype=float) - self.Omega_hat])

    def contains(self, R: np.ndarray, Omega: np.ndarray, slack: float = 1e-9) -> bool:
        x = self.error_coordinates(R, Omega)
        return float(x @ np.linalg.solve(self.P, x)) <= 1.0 + slack


@dataclass
class MeasurementSet:
    """Direction observations plus an optional angular velocity reading.

    ``omega_meas`` and ``omega_bound`` (its 3x3 SPD error-bound matrix) must
    be given together or not at all.
    """

    observations: list
    omega_meas: np.ndarray | None = None
    omega_bound: np.ndarray | None = None

    def __post_init__(self):
        if (self.omega_meas is None) != (self.omega_bound is None):
            raise ValueError("omega_meas and omega_bound must be given together")
        if self.omega_meas is not None:
            self.omega_meas = np.asarray(self.omega_meas, dtype=float)
            self.omega_bound = np.asarray(self.omega_bound, dtype=float)

    @property
    def has_omega(self) -> bool:
        return self.omega_meas is not None


def flow_update(model: RigidBodyModel, E: StateEllipsoid, h: float, l: int) -> StateEllipsoid:
    """Propagate the state ellipsoid ``l`` integrator steps of size ``h``.

    The center follows the nonlinear discrete dynamics; the uncertainty
    matrix is pushed through the per-step Jacobian, P <- A P A^T.
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    center = State(E.R_hat, E.Omega_hat)
    P = E.P
    for _ in range(l):
        A = linearize_step(model, center, h)
        center = step(model, center, h)
        P = 0.5 * ((A @ P @ A.T) + (A @ P @ A.T).T)
    return StateEllipsoid(center.R, center.Omega, P)


def measurement_center(meas: MeasurementSet):
    """Attitude from the observation profile; angular velocity passed through."""
    R_m = wahba.solve(wahba.profile_matrix(meas.observations))
    return R_m, (None if meas.omega_meas is None else meas.omega_meas.copy())


def measurement_sensitivities(R_m: np.ndarray, observations: list) -> list[np.ndarray]:
    """First-order maps from each sensor error to the attitude-chart error.

    Perturbing observation i by the axis-angle error nu_i moves the optimal
    attitude by zeta = sum_i A_i nu_i with

        A_i = -w_i D^{-1} (tr(B_i) I - B_i),   B_i = b_i e_i^T R_m,

    and D = tr(R_m^T L) I - R_m^T L for the measured profile L. D inherits
    invertibility from the non-degeneracy of the profile.
    """
    L = wahba.profile_matrix(observations).L
    D = trace_deflate(R_m.T @ L)
    if abs(np.linalg.det(D)) <= 1e-12 * max(1.0, np.linalg.norm(D, "fro") ** 3):
        raise DegenerateProfile("sensitivity system is singular")
    out = []
    for obs in observations:
        B = np.outer(obs.b_meas, obs.e_ref) @ R_m
        out.append(-obs.weight * np.linalg.solve(D, trace_deflate(B)))
    return out


def measurement_update(meas: MeasurementSet):
    """Measured state ellipsoid: center plus 6x6 bound on [zeta; dOmega].

    The attitude part of the bound collects one term per observation,
    H1 A_i S_i A_i^T H1^T; the angular velocity part is H2 T H2^T. Their
    Minkowski sum is outer-bounded by the trace-minimal sum ellipsoid.
    Requires an angular velocity reading; see
    :func:`measurement_update_attitude_only` otherwise.
    """
    if not meas.has_omega:
        raise ValueError("measurement set has no angular velocity reading")
    _require_bounds(meas)
    R_m, omega_m = measurement_center(meas)
    parts = [
        Ellipsoid(np.zeros(6), H1 @ (A @ obs.noise_bound @ A.T) @ H1.T)
        for A, obs in zip(measurement_sensitivities(R_m, meas.observations), meas.observations)
    ]
    parts.append(Ellipsoid(np.zeros(6), H2 @ meas.omega_bound @ H2.T))
    Pm = outer_sum(parts).shape
    return (R_m, omega_m), Pm


def _require_bounds(meas: MeasurementSet) -> None:
    if any(obs.noise_bound is None for obs in meas.observations):
        raise ValueError("every observation needs a noise bound for the measurement update")


def measurement_update_attitude_only(meas: MeasurementSet):
    """Measured attitude center plus 3x3 bound on zeta (no angular velocity)."""
    _require_bounds(meas)
    R_m, _ = measurement_center(meas)
    parts = [
        Ellipsoid(np.zeros(3), A @ obs.noise_bound @ A.T)
        for A, obs in zip(measurement_sensitivities(R_m, meas.observations), meas.observations)
    ]
    return R_m, outer_sum(parts).shape


def _center_offset(pred: StateEllipsoid, R_m: np.ndarray, omega_m: np.ndarray | None) -> np.ndarray:
    zeta_mf = log_so3(R_m.T @ pred.R_hat)
    if np.linalg.norm(zeta_mf) >= np.pi:
        raise ChartOverflow("predicted and measured attitudes are a half turn apart")
    domega_mf = np.zeros(3) if omega_m is None else pred.Omega_hat - omega_m
    return np.concatenate([zeta_mf, domega_mf])


def filter_step(pred: StateEllipsoid, meas_center, Pm: np.ndarray) -> StateEllipsoid:
    """Fuse a predicted ellipsoid with a full measured ellipsoid.

    Both are expressed in the chart centered on the measurement; the fused
    center re-enters TSO(3) through the exponential map.
    """
    R_m, omega_m = meas_center
    if omega_m is None:
        raise ValueError("full filter step needs an angular velocity center")
    x_mf = _center_offset(pred, R_m, omega_m)
    xhat, P, _ = fuse_intersection(
        Ellipsoid(np.zeros(6), Pm, degenerate=False),
        Ellipsoid(x_mf, pred.P, degenerate=False),
    )
    return StateEllipsoid(R_m @ exp_so3(xhat[:3]), omega_m + xhat[3:], P)


def filter_step_attitude_only(
    pred: StateEllipsoid, R_m: np.ndarray, Pm_att: np.ndarray
) -> StateEllipsoid:
    """Fuse the prediction with an attitude-only measurement.

    The measurement constrains only the zeta block, so the measured set is
    a degenerate ellipsoid, unbounded in dOmega; fusion uses the
    information form, which accepts the singular bound.
    """
    x_mf = _center_offset(pred, R_m, None)
    measured = Ellipsoid(np.zeros(6), H1 @ Pm_att @ H1.T, degenerate=True)
    xhat, P, _ = fuse_intersection_info(
        Ellipsoid(x_mf, pred.P, degenerate=False), measured
    )
    return StateEllipsoid(R_m @ exp_so3(xhat[:3]), pred.Omega_hat + xhat[3:], P)


def fuse(pred: StateEllipsoid, meas: MeasurementSet) -> StateEllipsoid:
    """Measurement update plus filtering, full or attitude-only as available."""
    if meas.has_omega:
        center, Pm = measurement_update(meas)
        return filter_step(pred, center, Pm)
    R_m, Pm_att = measurement_update_attitude_only(meas)
    return filter_step_attitude_only(pred, R_m, Pm_att)


def estimate(
    model: RigidBodyModel,
    E0: StateEllipsoid,
    schedule: list[tuple[float, MeasurementSet]],
    h: float,
    n_steps: int | None = None,
) -> list[StateEllipsoid]:
    """Run the filter over a measurement schedule.

    ``schedule`` holds (time, measurements) pairs with strictly increasing
    times that are integer multiples of ``h``. Returns one ellipsoid per
    step from 0 to ``n_steps`` (default: the last measurement); entries at
    measurement instants are post-fusion.
    """
    meas_by_step = {}
    prev = 0
    for t, meas in schedule:
        k = round(t / h)
        if abs(k * h - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError("schedule times must be integer multiples of h")
        if k <= prev:
            raise ValueError("schedule times must be strictly increasing and positive")
        meas_by_step[k] = meas
        prev = k
    if n_steps is None:
        n_steps = prev
    out = [E0]
    current = E0
    for k in range(1, n_steps + 1):
        current = flow_update(model, current, h, 1)
        if k in meas_by_step:
            current = fuse(current, meas_by_step[k])
        out.append(current)
    return out
