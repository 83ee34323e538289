"""Rigid-body attitude dynamics in an attitude-dependent potential.

The continuous model is

    J dOmega/dt + Omega x J Omega = M(R),     dR/dt = R hat(Omega),

with M the moment produced by the potential U(R). Time stepping uses a
variational integrator on the rotation group: each step solves

    h * hat(J Omega_k + (h/2) M_k) = F J_d - J_d F^T,      J_d = tr(J)/2 I - J,

for the relative rotation F in SO(3), then updates

    R_{k+1} = R_k F,
    J Omega_{k+1} = F^T J Omega_k + (h/2) F^T M_k + (h/2) M_{k+1}.

Updating R by group multiplication keeps it orthonormal for arbitrarily
many steps, and the discrete-mechanics origin of the scheme gives bounded
energy error and exact momentum conservation for the free body.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotSPD
from .so3 import exp_so3, hat, log_so3

_E3 = np.array([0.0, 0.0, 1.0])


class FreeBody:
    """No potential: U(R) = 0."""

    def energy(self, R: np.ndarray) -> float:
        return 0.0

    def gradient(self, R: np.ndarray) -> np.ndarray:
        return np.zeros((3, 3))


@dataclass
class GravityGradient:
    """Gravity-gradient potential for a circular orbit, orbital rate normalized to 1.

    U(R) = (3/2) e3^T R J R^T e3, minimized when the minimum-inertia axis
    points along the local vertical.
    """

    inertia: np.ndarray

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, dtype=float)

    def energy(self, R: np.ndarray) -> float:
        r = R.T @ _E3
        return 1.5 * float(r @ (self.inertia @ r))

    def gradient(self, R: np.ndarray) -> np.ndarray:
        return 3.0 * np.outer(_E3, _E3 @ R @ self.inertia)


@dataclass
class Pendulum3D:
    """Pendulum potential U(R) = -mg * e3^T R rho."""

    mg: float = 1.0
    rho: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)

    def energy(self, R: np.ndarray) -> float:
        return -self.mg * float(_E3 @ R @ self.rho)

    def gradient(self, R: np.ndarray) -> np.ndarray:
        return -self.mg * np.outer(_E3, self.rho)


@dataclass
class RigidBodyModel:
    """Inertia plus potential. ``J_d = tr(J)/2 I - J`` is recomputed on access."""

    J: np.ndarray
    potential: object = field(default_factory=FreeBody)

    def __post_init__(self):
        self.J = np.asarray(self.J, dtype=float)
        if np.linalg.norm(self.J - self.J.T) > 1e-12 or np.linalg.eigvalsh(self.J).min() <= 0.0:
            raise NotSPD("inertia matrix must be symmetric positive definite")

    @property
    def J_d(self) -> np.ndarray:
        return 0.5 * np.trace(self.J) * np.eye(3) - self.J

    @classmethod
    def gravity_gradient(cls, J: np.ndarray) -> "RigidBodyModel":
        return cls(J, GravityGradient(np.asarray(J, dtype=float)))


@dataclass
class State:
    """Attitude (rotation matrix) and body-frame angular velocity."""

    R: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.Omega = np.asarray(self.Omega, dtype=float)


def _cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross has too much call overhead for single 3-vectors
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def moment(model: RigidBodyModel, R: np.ndarray) -> np.ndarray:
    """Moment due to the potential: rows of R crossed with rows of dU/dR.

    Equivalently the vee of (dU/dR)^T R - R^T (dU/dR); both agree to
    roundoff for any potential.
    """
    G = model.potential.gradient(R)
    return np.array([
        R[:, 1] @ G[:, 2] - R[:, 2] @ G[:, 1],
        R[:, 2] @ G[:, 0] - R[:, 0] @ G[:, 2],
        R[:, 0] @ G[:, 1] - R[:, 1] @ G[:, 0],
    ])


def _ab_coeffs(th: float) -> tuple[float, float, float, float]:
    # a = sin(th)/th, b = (1-cos th)/th^2, plus a'(th)/th and b'(th)/th.
    if th < 1e-4:
        a = 1.0 - th**2 / 6.0 + th**4 / 120.0
        b = 0.5 - th**2 / 24.0 + th**4 / 720.0
        da = -1.0 / 3.0 + th**2 / 30.0
        db = -1.0 / 12.0 + th**2 / 180.0
    else:
        s, c = np.sin(th), np.cos(th)
        a = s / th
        b = (1.0 - c) / th**2
        da = (th * c - s) / th**3
        db = (th * s - 2.0 * (1.0 - c)) / th**4
    return a, b, da, db


def solve_relative_attitude(
    model: RigidBodyModel,
    Omega: np.ndarray,
    M: np.ndarray,
    h: float,
    max_iter: int = 50,
) -> np.ndarray:
    """Solve ``h hat(J Omega + h/2 M) = F J_d - J_d F^T`` for F in SO(3).

    With F = exp(hat(f)) the equation reduces to the 3-vector root problem

        a(|f|) J f - b(|f|) f x (J_d f) = h (J Omega + h/2 M),

    solved by Newton iteration from f0 = h J^{-1}(J Omega + h/2 M).
    Raises :class:`NoConvergence` after ``max_iter`` iterations (step too
    large or extreme spin).
    """
    J, Jd = model.J, model.J_d
    rhs = h * (J @ np.asarray(Omega, dtype=float) + 0.5 * h * np.asarray(M, dtype=float))
    tol = 1e-14 * max(1.0, np.sqrt(rhs @ rhs))
    f = np.linalg.solve(J, rhs)
    for _ in range(max_iter):
        th = np.sqrt(f @ f)
        a, b, da, db = _ab_coeffs(th)
        Jf = J @ f
        Jdf = Jd @ f
        cross = _cross3(f, Jdf)
        g = a * Jf - b * cross - rhs
        if np.sqrt(g @ g) <= tol:
            return exp_so3(f)
        Dg = a * J + da * np.outer(Jf, f)
        Dg -= b * (hat(f) @ Jd - hat(Jdf)) + db * np.outer(cross, f)
        try:
            f = f - np.linalg.solve(Dg, g)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Newton system; step too large or extreme spin") from exc
        if not np.isfinite(f).all():
            raise NoConvergence("diverging Newton iterate; step too large or extreme spin")
    raise NoConvergence(f"relative-attitude solve did not converge in {max_iter} iterations")


def step(model: RigidBodyModel, s: State, h: float) -> State:
    """Advance (R, Omega) by one step of size h."""
    M_k = moment(model, s.R)
    F = solve_relative_attitude(model, s.Omega, M_k, h)
    R_next = s.R @ F
    M_next = moment(model, R_next)
    pi_next = F.T @ (model.J @ s.Omega) + 0.5 * h * (F.T @ M_k) + 0.5 * h * M_next
    return State(R_next, np.linalg.solve(model.J, pi_next))


def linearize_step(model: RigidBodyModel, s_center: State, h: float, eps: float = 1e-6) -> np.ndarray:
    """6x6 Jacobian of the step map in perturbation coordinates [zeta; dOmega].

    A perturbed state is R = R_c exp(hat(zeta)), Omega = Omega_c + dOmega;
    the Jacobian is taken by central differences of size ``eps`` and maps
    perturbations at step k to perturbations about the stepped center.
    """
    center_next = step(model, s_center, h)
    A = np.empty((6, 6))
    for j in range(6):
        d = np.zeros(6)
        d[j] = eps
        plus = _perturbed_chart(model, s_center, center_next, d, h)
        minus = _perturbed_chart(model, s_center, center_next, -d, h)
        A[:, j] = (plus - minus) / (2.0 * eps)
    return A


def _perturbed_chart(
    model: RigidBodyModel, s: State, center_next: State, d: np.ndarray, h: float
) -> np.ndarray:
    perturbed = State(s.R @ exp_so3(d[:3]), s.Omega + d[3:])
    nxt = step(model, perturbed, h)
    return np.concatenate(
        [log_so3(center_next.R.T @ nxt.R), nxt.Omega - center_next.Omega]
    )
