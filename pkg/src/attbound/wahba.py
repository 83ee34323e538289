"""Static attitude determination from weighted vector observations.

Each observation pairs a known reference direction with the corresponding
measured body-frame direction. The optimal attitude minimizes the weighted
sum of squared residuals over SO(3) and is computed in closed form from a
QR factorization of the attitude profile matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProfile, NotSPD
from .so3 import exp_so3, spd_sqrt, trace_deflate

_DET_TOL = 1e-12
_UNIT_TOL = 1e-9


@dataclass
class DirectionObservation:
    """One vector observation: reference direction, measured body direction.

    ``noise_bound`` is the 3x3 SPD matrix bounding the axis-angle sensor
    error (rad^2); it is only needed by the estimator, not by the solver.
    """

    e_ref: np.ndarray
    b_meas: np.ndarray
    weight: float = 1.0
    noise_bound: np.ndarray | None = None

    def __post_init__(self):
        self.e_ref = np.asarray(self.e_ref, dtype=float)
        self.b_meas = np.asarray(self.b_meas, dtype=float)
        for name, v in (("e_ref", self.e_ref), ("b_meas", self.b_meas)):
            if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
                raise ValueError(f"{name} must be a unit vector")
        if not self.weight > 0.0:
            raise ValueError("weight must be positive")
        if self.noise_bound is not None:
            self.noise_bound = np.asarray(self.noise_bound, dtype=float)
            lam = np.linalg.eigvalsh(self.noise_bound)
            if np.linalg.norm(self.noise_bound - self.noise_bound.T) > 1e-9 or lam.min() <= 0.0:
                raise NotSPD("noise_bound must be symmetric positive definite")


@dataclass
class AttitudeProfile:
    """Weighted sum of outer products of reference and measured directions."""

    L: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))


def profile_matrix(observations: list[DirectionObservation]) -> AttitudeProfile:
    """Accumulate the 3x3 profile matrix sum(w_i * e_i b_i^T)."""
    if not observations:
        raise ValueError("at least one observation is required")
    L = np.zeros((3, 3))
    for obs in observations:
        L += obs.weight * np.outer(obs.e_ref, obs.b_meas)
    return AttitudeProfile(L)


def solve(profile: AttitudeProfile) -> np.ndarray:
    """Optimal attitude for a non-singular profile matrix.

    Factor L = Q_q Q_r with Q_q special orthogonal, then apply the symmetric
    orthogonalizer Q_q ((Q_r Q_r^T)^{-1/2}) Q_q^T to L. The result R
    satisfies R^T L symmetric positive definite, which certifies global
    optimality of the weighted least-squares objective.

    Raises :class:`DegenerateProfile` when L is singular (fewer than two
    non-collinear observations).
    """
    L = np.asarray(profile.L, dtype=float)
    scale = np.linalg.norm(L, "fro")
    det = np.linalg.det(L)
    if scale == 0.0 or abs(det) <= _DET_TOL * scale**3:
        raise DegenerateProfile("profile matrix is singular; attitude unobservable")
    Qq, Qr = np.linalg.qr(L)
    # Make diag(Q_r) nonnegative, then force Q_q into SO(3) by flipping one
    # column/row pair if needed.
    signs = np.sign(np.diag(Qr))
    signs[signs == 0.0] = 1.0
    Qq = Qq * signs
    Qr = signs[:, None] * Qr
    if np.linalg.det(Qq) < 0.0:
        Qq[:, 2] = -Qq[:, 2]
        Qr[2, :] = -Qr[2, :]
    S = Qq @ spd_sqrt(np.linalg.inv(Qr @ Qr.T)) @ Qq.T
    R = S @ L
    if np.linalg.det(R) < 0.0:
        # det L < 0: the orthogonalizer lands on the wrong component of O(3).
        # Reflect along the weakest direction of L L^T to recover the global
        # minimizer over SO(3).
        _, U = np.linalg.eigh(L @ L.T)
        u = U[:, 0]
        R = R - 2.0 * np.outer(u, u @ R)
    # One polish step removes the O(cond(L) * eps) orthogonality defect of
    # the floating-point evaluation; the exact-arithmetic map is unchanged.
    R = R @ (1.5 * np.eye(3) - 0.5 * (R.T @ R))
    # Newton-refine the optimality condition R^T L = L^T R, which the
    # closed form satisfies only to O(cond(L)^2 * eps): linearizing about
    # R exp(hat(delta)) gives (tr(A) I - A) delta = vee(A - A^T), A = R^T L.
    for _ in range(3):
        A = R.T @ L
        z = np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]])
        D = trace_deflate(A)
        if np.linalg.norm(z) <= 1e-12 * scale or abs(np.linalg.det(D)) <= 1e-12 * scale**3:
            break
        R = R @ exp_so3(np.linalg.solve(D, z))
    return R


def objective(R: np.ndarray, observations: list[DirectionObservation]) -> float:
    """Weighted half-sum of squared residuals between reference and rotated directions."""
    R = np.asarray(R, dtype=float)
    total = 0.0
    for obs in observations:
        r = obs.e_ref - R @ obs.b_meas
        total += obs.weight * (r @ r)
    return 0.5 * total
