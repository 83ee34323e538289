"""Scenario-driven simulation: truth propagation, bounded noisy measurements,
estimator execution, and machine-readable run records.

Scenarios are JSON files with a fixed schema (unknown keys are rejected).
All quantities are in normalized units: the orbital rate is 1, so a quarter
orbit spans pi/2 time units.
"""

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import FreeBody, GravityGradient, Pendulum3D, RigidBodyModel, State, step
from .errors import AttboundError, ScenarioError
from .estimator import MeasurementSet, StateEllipsoid, flow_update, fuse
from .so3 import exp_so3, log_so3, rotation_defect, spd_sqrt
from .wahba import DirectionObservation

MODES = ("full", "attitude_only")
NOISE_MODES = ("truncated_gaussian", "uniform_ellipsoid", "worst_case_boundary")
CSV_COLUMNS = ("step", "time", "zeta_norm_deg", "domega_norm", "trace_P", "measured", "contained")

_SCENARIO_KEYS = {
    "inertia_diag", "potential", "h", "n_steps", "meas_every",
    "reference_directions", "attitude_noise_bound", "omega_noise_bound",
    "truth_R0", "truth_Omega0", "est_R0", "est_Omega0", "P0_diag",
    "mode", "noise", "seed", "trials", "description",
}


def _parse_rotation(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).ravel()
    if arr.size == 3:
        return exp_so3(arr)
    if arr.size == 9:
        R = arr.reshape(3, 3)
        if rotation_defect(R) > 1e-9 or np.linalg.det(R) <= 0.0:
            raise ScenarioError(f"{name}: 9-entry form must be a rotation matrix")
        return R
    raise ScenarioError(f"{name} must have 3 (axis-angle) or 9 (matrix) entries")


@dataclass
class Scenario:
    """Full description of one simulated estimation experiment."""

    inertia_diag: np.ndarray
    potential: object
    h: float
    n_steps: int
    meas_every: int
    reference_directions: np.ndarray
    attitude_noise_bound: float
    omega_noise_bound: float
    truth_R0: np.ndarray
    truth_Omega0: np.ndarray
    est_R0: np.ndarray
    est_Omega0: np.ndarray
    P0_diag: np.ndarray
    mode: str = "full"
    noise: str = "truncated_gaussian"
    seed: int = 0
    trials: int = 1
    description: str = ""

    def __post_init__(self):
        self.inertia_diag = np.asarray(self.inertia_diag, dtype=float)
        self.reference_directions = np.asarray(self.reference_directions, dtype=float)
        self.truth_Omega0 = np.asarray(self.truth_Omega0, dtype=float)
        self.est_Omega0 = np.asarray(self.est_Omega0, dtype=float)
        self.P0_diag = np.asarray(self.P0_diag, dtype=float)
        self.validate()

    def validate(self):
        if not self.h > 0.0:
            raise ScenarioError("h must be positive")
        if self.n_steps < 1:
            raise ScenarioError("n_steps must be at least 1")
        if not 1 <= self.meas_every <= self.n_steps:
            raise ScenarioError("meas_every must lie in [1, n_steps]")
        if self.mode not in MODES:
            raise ScenarioError(f"mode must be one of {MODES}")
        if self.noise not in NOISE_MODES:
            raise ScenarioError(f"noise must be one of {NOISE_MODES}")
        if self.inertia_diag.shape != (3,) or self.inertia_diag.min() <= 0.0:
            raise ScenarioError("inertia_diag must be 3 positive values")
        if self.reference_directions.ndim != 2 or self.reference_directions.shape[1] != 3:
            raise ScenarioError("reference_directions must be an m x 3 array")
        norms = np.linalg.norm(self.reference_directions, axis=1)
        if np.abs(norms - 1.0).max() > 1e-9:
            raise ScenarioError("reference directions must be unit vectors")
        if self.attitude_noise_bound < 0.0 or self.omega_noise_bound < 0.0:
            raise ScenarioError("noise bounds must be nonnegative")
        if self.P0_diag.shape != (6,) or self.P0_diag.min() <= 0.0:
            raise ScenarioError("P0_diag must be 6 positive values")
        if self.trials < 1:
            raise ScenarioError("trials must be at least 1")
        if self.initial_mismatch() > 1.0:
            raise ScenarioError(
                f"initial error lies outside the initial ellipsoid "
                f"(x0^T P0^-1 x0 = {self.initial_mismatch():.4f} > 1)"
            )

    def initial_mismatch(self) -> float:
        """Quadratic form x0^T P0^{-1} x0 of the implied initial error."""
        x0 = np.concatenate([
            log_so3(self.est_R0.T @ self.truth_R0),
            self.truth_Omega0 - self.est_Omega0,
        ])
        return float(x0 @ (x0 / self.P0_diag))

    @classmethod
    def from_dict(cls, raw: dict) -> "Scenario":
        if not isinstance(raw, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(raw) - _SCENARIO_KEYS
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
        missing = _SCENARIO_KEYS - {"description"} - set(raw) - {"mode", "noise", "seed", "trials"}
        if missing:
            raise ScenarioError(f"missing scenario keys: {sorted(missing)}")
        data = dict(raw)
        inertia = np.asarray(data["inertia_diag"], dtype=float)
        data["potential"] = _parse_potential(data["potential"], np.diag(inertia))
        data["truth_R0"] = _parse_rotation(data["truth_R0"], "truth_R0")
        data["est_R0"] = _parse_rotation(data["est_R0"], "est_R0")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw)

    def model(self) -> RigidBodyModel:
        return RigidBodyModel(np.diag(self.inertia_diag), self.potential)

    def initial_truth(self) -> State:
        return State(self.truth_R0, self.truth_Omega0)

    def initial_estimate(self) -> StateEllipsoid:
        return StateEllipsoid(self.est_R0, self.est_Omega0, np.diag(self.P0_diag))

    def attitude_bound_matrix(self) -> np.ndarray:
        return self.attitude_noise_bound**2 * np.eye(3)

    def omega_bound_matrix(self) -> np.ndarray:
        return self.omega_noise_bound**2 * np.eye(3)


def _parse_potential(value, J: np.ndarray):
    if value == "free":
        return FreeBody()
    if value == "gravity_gradient":
        return GravityGradient(J)
    if value == "pendulum3d":
        return Pendulum3D()
    if isinstance(value, dict) and value.get("name") == "pendulum3d":
        extra = set(value) - {"name", "mg", "rho"}
        if extra:
            raise ScenarioError(f"unknown pendulum3d keys: {sorted(extra)}")
        return Pendulum3D(mg=float(value.get("mg", 1.0)),
                          rho=np.asarray(value.get("rho", [0.0, 0.0, 1.0]), dtype=float))
    raise ScenarioError(f"unrecognized potential {value!r}")


def sample_bounded_error(rng: np.random.Generator, bound: np.ndarray, noise: str) -> np.ndarray:
    """Draw an error vector inside the ellipsoid {v : v^T bound^{-1} v <= 1}.

    truncated_gaussian draws from a normal with covariance bound/9 and
    rejects draws outside the ellipsoid; uniform_ellipsoid is uniform over
    the set; worst_case_boundary lands on the boundary.
    """
    bound = np.asarray(bound, dtype=float)
    n = bound.shape[0]
    if not np.trace(bound) > 0.0:
        return np.zeros(n)
    if noise == "truncated_gaussian":
        u = rng.standard_normal(n)
        while np.linalg.norm(u) > 3.0:
            u = rng.standard_normal(n)
        u /= 3.0
    elif noise == "uniform_ellipsoid":
        u = rng.standard_normal(n)
        u *= rng.uniform() ** (1.0 / n) / np.linalg.norm(u)
    elif noise == "worst_case_boundary":
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
    else:
        raise ScenarioError(f"unrecognized noise mode {noise!r}")
    return spd_sqrt(bound) @ u


def generate_measurements(truth: State, scenario: Scenario, rng: np.random.Generator) -> MeasurementSet:
    """Noisy bounded measurements of a true state.

    Each true body direction b = R^T e is reported as exp(-hat(nu)) b with
    nu inside the attitude bound, so b = exp(hat(nu)) b_meas holds exactly.
    In full mode the angular velocity is reported as Omega - upsilon with
    upsilon inside its bound.
    """
    S = scenario.attitude_bound_matrix()
    S_valid = scenario.attitude_noise_bound > 0.0
    observations = []
    for e_ref in scenario.reference_directions:
        b_true = truth.R.T @ e_ref
        nu = sample_bounded_error(rng, S, scenario.noise)
        observations.append(DirectionObservation(
            e_ref=e_ref,
            b_meas=exp_so3(-nu) @ b_true,
            weight=1.0,
            noise_bound=S if S_valid else None,
        ))
    if scenario.mode == "attitude_only":
        return MeasurementSet(observations)
    upsilon = sample_bounded_error(rng, scenario.omega_bound_matrix(), scenario.noise)
    return MeasurementSet(observations, truth.Omega - upsilon, scenario.omega_bound_matrix())


@dataclass
class RunRecord:
    """Per-step estimation errors and uncertainty size for one trial."""

    step: int
    time: float
    zeta_norm_deg: float
    domega_norm: float
    trace_P: float
    measured: bool
    contained: bool | None = None


def _record(k: int, h: float, truth: State, est: StateEllipsoid,
            measured: bool, contained: bool | None) -> RunRecord:
    x = est.error_coordinates(truth.R, truth.Omega)
    return RunRecord(
        step=k,
        time=k * h,
        zeta_norm_deg=float(np.degrees(np.linalg.norm(x[:3]))),
        domega_norm=float(np.linalg.norm(x[3:])),
        trace_P=float(np.trace(est.P)),
        measured=measured,
        contained=contained,
    )


def run(scenario: Scenario, trial: int = 0) -> list[RunRecord]:
    """Simulate one trial: truth, measurements, estimator; one record per step.

    Deterministic for a given (scenario.seed, trial): the trial RNG is
    seeded with seed + trial.
    """
    rng = np.random.default_rng(scenario.seed + trial)
    model = scenario.model()
    truth = scenario.initial_truth()
    est = scenario.initial_estimate()
    records = [_record(0, scenario.h, truth, est, False, None)]
    for k in range(1, scenario.n_steps + 1):
        try:
            truth = step(model, truth, scenario.h)
            est = flow_update(model, est, scenario.h, 1)
            measured = (k % scenario.meas_every == 0)
            contained = None
            if measured:
                meas = generate_measurements(truth, scenario, rng)
                est = fuse(est, meas)
                contained = est.contains(truth.R, truth.Omega)
        except AttboundError as exc:
            raise type(exc)(f"step {k}: {exc}") from exc
        records.append(_record(k, scenario.h, truth, est, measured, contained))
    return records


def write_csv(records: list[RunRecord], path) -> None:
    """Write one trial's records with the fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.step,
                f"{r.time:.17g}",
                f"{r.zeta_norm_deg:.17g}",
                f"{r.domega_norm:.17g}",
                f"{r.trace_P:.17g}",
                int(r.measured),
                "" if r.contained is None else int(r.contained),
            ])


def report(trial_records: list[list[RunRecord]]) -> dict:
    """Aggregate terminal errors, containment rate, and uncertainty sizes."""
    terminal = [records[-1] for records in trial_records]
    zeta = np.array([r.zeta_norm_deg for r in terminal])
    domega = np.array([r.domega_norm for r in terminal])
    trace = np.array([r.trace_P for r in terminal])
    flags = [r.contained for records in trial_records for r in records if r.contained is not None]
    per_trial = []
    for records in trial_records:
        checks = [r.contained for r in records if r.contained is not None]
        per_trial.append({
            "terminal_zeta_deg": records[-1].zeta_norm_deg,
            "terminal_domega": records[-1].domega_norm,
            "terminal_trace_P": records[-1].trace_P,
            "all_measurements_contained": bool(checks) and all(checks),
        })
    return {
        "trials": len(trial_records),
        "terminal_zeta_deg": _stats(zeta),
        "terminal_domega": _stats(domega),
        "terminal_trace_P": _stats(trace),
        "containment_rate": float(np.mean(flags)) if flags else None,
        "fully_contained_trials": sum(t["all_measurements_contained"] for t in per_trial),
        "per_trial": per_trial,
    }


def _stats(values: np.ndarray) -> dict:
    return {
        "min": float(values.min()),
        "median": float(np.median(values)),
        "max": float(values.max()),
    }


def format_summary(summary: dict) -> str:
    lines = [
        f"trials: {summary['trials']}",
        f"terminal |zeta| deg  min/median/max: "
        f"{summary['terminal_zeta_deg']['min']:.4g} / "
        f"{summary['terminal_zeta_deg']['median']:.4g} / "
        f"{summary['terminal_zeta_deg']['max']:.4g}",
        f"terminal |dOmega|    min/median/max: "
        f"{summary['terminal_domega']['min']:.4g} / "
        f"{summary['terminal_domega']['median']:.4g} / "
        f"{summary['terminal_domega']['max']:.4g}",
        f"terminal tr(P)       min/median/max: "
        f"{summary['terminal_trace_P']['min']:.4g} / "
        f"{summary['terminal_trace_P']['median']:.4g} / "
        f"{summary['terminal_trace_P']['max']:.4g}",
    ]
    if summary["containment_rate"] is not None:
        lines.append(
            f"containment rate: {summary['containment_rate']:.3f} "
            f"({summary['fully_contained_trials']}/{summary['trials']} trials fully contained)"
        )
    return "\n".join(lines)


def with_overrides(scenario: Scenario, seed=None, trials=None, mode=None) -> Scenario:
    """Copy of a scenario with CLI-level overrides applied."""
    kwargs = {}
    if seed is not None:
        kwargs["seed"] = seed
    if trials is not None:
        kwargs["trials"] = trials
    if mode is not None:
        kwargs["mode"] = mode
    return replace(scenario, **kwargs) if kwargs else scenario
