"""Deterministic attitude estimation on SO(3) with uncertainty ellipsoids."""

from . import dynamics, ellipsoids, errors, estimator, sim, so3, wahba
from .dynamics import FreeBody, GravityGradient, Pendulum3D, RigidBodyModel, State
from .ellipsoids import Ellipsoid
from .estimator import MeasurementSet, StateEllipsoid, estimate
from .sim import RunRecord, Scenario
from .wahba import AttitudeProfile, DirectionObservation

__all__ = [
    "AttitudeProfile",
    "DirectionObservation",
    "Ellipsoid",
    "FreeBody",
    "GravityGradient",
    "MeasurementSet",
    "Pendulum3D",
    "RigidBodyModel",
    "RunRecord",
    "Scenario",
    "State",
    "StateEllipsoid",
    "dynamics",
    "ellipsoids",
    "errors",
    "estimate",
    "estimator",
    "sim",
    "so3",
    "wahba",
]
