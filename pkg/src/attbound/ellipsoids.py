"""Ellipsoidal set operations in R^n.

An ellipsoid is the set {x : (x - c)^T P^{-1} (x - c) <= 1} with symmetric
positive semidefinite shape matrix P. Its size is measured by tr(P), the
sum of squared semi-principal axes. Degenerate ellipsoids (singular P) are
interpreted through the pseudo-inverse on the range of P and are unbounded
along its null space.

Besides membership and affine images, this module provides trace-minimal
outer bounds for two set constructions that are not ellipsoids themselves:
the Minkowski (vector) sum and the intersection of two ellipsoids.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEllipsoid, EmptyIntersection, ZeroTrace

_SYM_TOL = 1e-12
_RANK_TOL = 1e-12
_BETA_ROUNDOFF = 1e-9
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


@dataclass
class Ellipsoid:
    """Center and shape matrix; ``degenerate`` marks a singular shape.

    When ``degenerate`` is omitted it is detected from the eigenvalues of
    the shape matrix.
    """

    center: np.ndarray
    shape: np.ndarray
    degenerate: bool | None = None

    def __post_init__(self):
        self.center = np.atleast_1d(np.asarray(self.center, dtype=float))
        shape = np.asarray(self.shape, dtype=float)
        if np.linalg.norm(shape - shape.T, "fro") > _SYM_TOL * max(1.0, np.linalg.norm(shape, "fro")):
            raise ValueError("shape matrix must be symmetric")
        shape = _sym(shape)
        lam = np.linalg.eigvalsh(shape)
        if lam.min() < -_BETA_ROUNDOFF * max(1.0, lam.max()):
            raise ValueError(f"shape matrix has a negative eigenvalue {lam.min():g}")
        if self.degenerate is None:
            self.degenerate = bool(lam.min() <= _RANK_TOL * max(1.0, lam.max()))
        self.shape = shape

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def info(self) -> np.ndarray:
        """Information matrix: inverse shape, or pseudo-inverse when degenerate."""
        if self.degenerate:
            return _sym(np.linalg.pinv(self.shape, rcond=1e-12))
        return _sym(np.linalg.inv(self.shape))


def contains(E: Ellipsoid, x: np.ndarray, slack: float = 1e-9) -> bool:
    """Membership test with a small roundoff slack on the quadratic form."""
    if E.degenerate:
        raise DegenerateEllipsoid("membership test requires a full-rank shape matrix")
    d = np.asarray(x, dtype=float) - E.center
    return float(d @ np.linalg.solve(E.shape, d)) <= 1.0 + slack


def size(E: Ellipsoid) -> float:
    """Trace of the shape matrix (sum of squared semi-principal axes)."""
    return float(np.trace(E.shape))


def linear_image(E: Ellipsoid, A: np.ndarray) -> Ellipsoid:
    """Exact image of ``E`` under x -> A x (degenerate when A is rank-deficient)."""
    A = np.asarray(A, dtype=float)
    return Ellipsoid(A @ E.center, _sym(A @ E.shape @ A.T))


def outer_sum(parts: list[Ellipsoid]) -> Ellipsoid:
    """Trace-minimal ellipsoidal bound of the Minkowski sum of ``parts``.

    With s_i = sqrt(tr P_i), the bound is (sum_i s_i) * (sum_i P_i / s_i),
    centered at the sum of the centers. Every part must have positive trace.
    """
    if not parts:
        raise ValueError("at least one ellipsoid is required")
    roots = []
    for part in parts:
        t = np.trace(part.shape)
        if not t > 0.0:
            raise ZeroTrace("every summand must have a positive-trace shape matrix")
        roots.append(np.sqrt(t))
    center = np.sum([p.center for p in parts], axis=0)
    shape = sum(p.shape / r for p, r in zip(parts, roots)) * sum(roots)
    return Ellipsoid(center, _sym(shape))


def _fusion_eval(Pm: np.ndarray, Pf: np.ndarray, info_sum, d: np.ndarray, q: float):
    """Fused (beta, center-offset, unscaled shape) at multiplier q.

    The unscaled shape (I - L) P_m is evaluated in the algebraically equal
    information form (P_m^{-1} + q P_f^{-1})^{-1}, which is free of the
    catastrophic cancellation the product form suffers at extreme q.
    """
    K = Pm + Pf / q
    w = np.linalg.solve(K, d)
    beta = 1.0 + q - float(d @ w)
    body = _sym(np.linalg.inv(info_sum(q)))
    return beta, Pm @ w, body


def _scan_and_refine(trace_of, probes):
    """Coarse scan + golden-section refinement of a positive scalar function.

    ``trace_of(p)`` returns (validity-value, trace); candidates with
    validity <= 0 are excluded. Returns (best_p, proof_negative, best_validity)
    where proof_negative is True when some probe is decisively infeasible.
    """
    vals = [trace_of(p) for p in probes]
    proof_negative = any(v[0] < -_BETA_ROUNDOFF for v in vals)
    valid = [(t, i) for i, (b, t) in enumerate(vals) if b > 0.0]
    if not valid:
        best_i = int(np.argmax([b for b, _ in vals]))
        return probes[best_i], proof_negative, vals[best_i][0]
    _, i = min(valid)
    lo = probes[max(i - 1, 0)]
    hi = probes[min(i + 1, len(probes) - 1)]
    a, b = np.log(lo), np.log(hi)
    c = b - _GOLDEN * (b - a)
    e = a + _GOLDEN * (b - a)
    fc = _guarded_trace(trace_of, c)
    fe = _guarded_trace(trace_of, e)
    while (b - a) > 1e-8:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _guarded_trace(trace_of, c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = _guarded_trace(trace_of, e)
    best = np.exp(0.5 * (a + b))
    return best, proof_negative, trace_of(best)[0]


def _guarded_trace(trace_of, log_p):
    beta, t = trace_of(np.exp(log_p))
    return t if beta > 0.0 else np.inf


def fuse_intersection(Em: Ellipsoid, Ef: Ellipsoid):
    """Trace-minimal ellipsoidal bound of the intersection of two ellipsoids.

    For a multiplier q > 0 the ellipsoid with

        L = P_m (P_m + q^{-1} P_f)^{-1},
        beta = 1 + q - d^T P_m^{-1} L d,        d = center_f - center_m,
        center = center_m + L d,  shape = beta (I - L) P_m,

    contains the intersection; q is chosen to minimize the trace. The exact
    q -> 0 and q -> inf limits (the two operands themselves) are admitted as
    candidates, so the result never exceeds either operand in trace.

    Returns (center, shape, q_opt). Raises :class:`EmptyIntersection` when
    some multiplier certifies that the sets are disjoint.
    """
    for E in (Em, Ef):
        if E.degenerate:
            raise DegenerateEllipsoid("fusion operands must be non-degenerate")
    Pm, Pf = Em.shape, Ef.shape
    d = Ef.center - Em.center
    Im, If = Em.info(), Ef.info()

    def info_sum(q):
        return Im + q * If

    def trace_of(q):
        beta, _, body = _fusion_eval(Pm, Pf, info_sum, d, q)
        return beta, beta * float(np.trace(body))

    probes = np.logspace(-6.0, 6.0, 20)
    q_best, proof_negative, beta_best = _scan_and_refine(trace_of, probes)
    if proof_negative:
        raise EmptyIntersection("measurement inconsistent with prediction (beta < 0)")

    candidates = [
        (float(np.trace(Pm)), Em.center.copy(), Pm.copy(), 0.0),
        (float(np.trace(Pf)), Ef.center.copy(), Pf.copy(), np.inf),
    ]
    if beta_best > 0.0:
        beta, offset, body = _fusion_eval(Pm, Pf, info_sum, d, q_best)
        candidates.append((beta * float(np.trace(body)), Em.center + offset, beta * body, q_best))
    elif beta_best > -_BETA_ROUNDOFF:
        warnings.warn("near-tangent ellipsoids: clamping beta to 1e-12", RuntimeWarning)
        beta, offset, body = _fusion_eval(Pm, Pf, info_sum, d, q_best)
        candidates.append((1e-12 * float(np.trace(body)), Em.center + offset, 1e-12 * body, q_best))
    _, center, shape, q_opt = min(candidates, key=lambda c: c[0])
    return center, _sym(shape), q_opt


def fuse_intersection_info(Ef: Ellipsoid, Em: Ellipsoid):
    """Intersection bound accepting a degenerate second operand.

    Uses the information-form convex combination

        X(q) = (1-q) P_f^{-1} + q I_m,    q in (0, 1),

    with I_m the (pseudo-)information matrix of ``Em``; the combination is
    positive definite because ``Ef`` is. Centers and normalization follow
    from completing the square, so the result outer-bounds the intersection
    for every q; q minimizes the trace. Returns (center, shape, q_opt).
    """
    if Ef.degenerate:
        raise DegenerateEllipsoid("the first fusion operand must be non-degenerate")
    If = Ef.info()
    Im = Em.info()
    cf, cm = Ef.center, Em.center
    af = float(cf @ If @ cf)
    am = float(cm @ Im @ cm)

    def pieces(q):
        X = _sym((1.0 - q) * If + q * Im)
        u = (1.0 - q) * (If @ cf) + q * (Im @ cm)
        c = np.linalg.solve(X, u)
        delta = 1.0 - (1.0 - q) * af - q * am + float(c @ u)
        return X, c, delta

    def trace_of(r):
        q = r / (1.0 + r)
        X, _, delta = pieces(q)
        return delta, delta * float(np.trace(np.linalg.inv(X)))

    probes = np.logspace(-6.0, 6.0, 20)
    r_best, proof_negative, delta_best = _scan_and_refine(trace_of, probes)
    if proof_negative:
        raise EmptyIntersection("measurement inconsistent with prediction (delta < 0)")
    if delta_best <= 0.0:
        if delta_best <= -_BETA_ROUNDOFF:
            raise EmptyIntersection("measurement inconsistent with prediction (delta < 0)")
        warnings.warn("near-tangent sets: clamping normalization to 1e-12", RuntimeWarning)
        delta_best = 1e-12
    q_opt = r_best / (1.0 + r_best)
    X, c, delta = pieces(q_opt)
    delta = max(delta, 1e-12)
    shape = _sym(delta * np.linalg.inv(X))
    # The q -> 0 limit is the first operand exactly; keep it as a candidate.
    if float(np.trace(shape)) > float(np.trace(Ef.shape)):
        return Ef.center.copy(), Ef.shape.copy(), 0.0
    return c, shape, q_opt


def sample_points(
    E: Ellipsoid, n: int, rng: np.random.Generator, boundary: bool = False
) -> np.ndarray:
    """Draw ``n`` points from ``E`` (uniform inside, or uniform on the boundary).

    For a degenerate ellipsoid the points sample the bounded cross-section
    through the center.
    """
    lam, V = np.linalg.eigh(E.shape)
    root = (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.T
    z = rng.standard_normal((n, E.dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if not boundary:
        z *= rng.uniform(size=(n, 1)) ** (1.0 / E.dim)
    return E.center + z @ root
