"""Primitives on the rotation group SO(3) and its Lie algebra so(3).

All rotations are plain 3x3 numpy arrays with R^T R = I and det R = 1.
Axis-angle vectors live in R^3; their norm is the rotation angle in radians.
"""

import numpy as np

from .errors import NotSkew, NotSPD

_SMALL_ANGLE = 1e-4  # switch to series expansions below this angle
_ROTATION_TOL = 1e-9


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of ``v``, so that ``hat(v) @ w == np.cross(v, w)``."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(S: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse of :func:`hat`. Raises :class:`NotSkew` unless ``S + S.T`` vanishes."""
    S = np.asarray(S, dtype=float)
    if np.linalg.norm(S + S.T, "fro") > tol:
        raise NotSkew(f"matrix is not skew-symmetric to {tol:g}")
    A = 0.5 * (S - S.T)
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def rotation_defect(R: np.ndarray) -> float:
    """Frobenius norm of ``R.T @ R - I`` (0 for an exact rotation)."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - np.eye(3), "fro"))


def _require_rotation(R: np.ndarray) -> None:
    if rotation_defect(R) > _ROTATION_TOL or np.linalg.det(R) <= 0.0:
        raise ValueError("matrix is not a rotation (orthonormal, det +1)")


def exp_so3(v: np.ndarray) -> np.ndarray:
    """Rotation matrix for the axis-angle vector ``v`` (Rodrigues formula)."""
    v = np.asarray(v, dtype=float)
    th = np.linalg.norm(v)
    if th < _SMALL_ANGLE:
        a = 1.0 - th**2 / 6.0 + th**4 / 120.0
        b = 0.5 - th**2 / 24.0 + th**4 / 720.0
    else:
        a = np.sin(th) / th
        b = (1.0 - np.cos(th)) / th**2
    S = hat(v)
    return np.eye(3) + a * S + b * (S @ S)


def log_so3(R: np.ndarray) -> np.ndarray:
    """Axis-angle vector of ``R`` on the principal branch (norm <= pi).

    At a half turn the axis sign is ambiguous; the convention is that the
    first nonzero axis component is positive.
    """
    R = np.asarray(R, dtype=float)
    _require_rotation(R)
    # w = 2 sin(theta) * axis
    w = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = 0.5 * np.linalg.norm(w)
    c = 0.5 * (np.trace(R) - 1.0)
    th = np.arctan2(s, c)
    if th < _SMALL_ANGLE:
        return (0.5 + th**2 / 12.0 + 7.0 * th**4 / 720.0) * w
    if th < np.pi - _SMALL_ANGLE:
        return (0.5 * th / s) * w
    # Near a half turn sin(theta) -> 0; recover the axis from the symmetric
    # part, where outer(axis, axis) = ((R + R.T)/2 - c*I) / (1 - c).
    M = (0.5 * (R + R.T) - c * np.eye(3)) / (1.0 - c)
    j = int(np.argmax(np.diag(M)))
    axis = M[:, j] / np.sqrt(M[j, j])
    axis /= np.linalg.norm(axis)
    if s > 1e-13:
        if axis @ w < 0.0:
            axis = -axis
    else:
        for comp in axis:
            if abs(comp) > 1e-8:
                if comp < 0.0:
                    axis = -axis
                break
    return th * axis


def trace_deflate(A: np.ndarray) -> np.ndarray:
    """Return ``tr(A) I - A``, so that ``hat(x) A + A.T hat(x) = hat(trace_deflate(A) @ x)``."""
    A = np.asarray(A, dtype=float)
    return np.trace(A) * np.eye(A.shape[0]) - A


def spd_sqrt(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Principal square root of a symmetric positive definite matrix."""
    A = np.asarray(A, dtype=float)
    if np.linalg.norm(A - A.T, "fro") > tol:
        raise NotSPD(f"matrix is not symmetric to {tol:g}")
    lam, V = np.linalg.eigh(0.5 * (A + A.T))
    if lam.min() <= 0.0:
        raise NotSPD(f"matrix has a non-positive eigenvalue {lam.min():g}")
    B = (V * np.sqrt(lam)) @ V.T
    return 0.5 * (B + B.T)
