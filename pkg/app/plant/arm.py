"""Rigid-body model of the two-link planar arm.

The arm moves in the horizontal plane, so gravity does not enter, and
friction is ignored. The equation of motion is ``M(q) q'' + C(q, q') q' = tau``
with the explicit Euler update used throughout the toolkit.
"""

import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import ArmParams
from app.exceptions import NonFiniteStateError, UnreachablePointError


TWO_PI = 2.0 * math.pi

# Tolerance on the reachable annulus radii (m).
REACH_TOL = 1e-9
# Below this radius the end effector sits on the base and q1 is free.
SINGULAR_RADIUS = 1e-9


class TorqueCommand(BaseModel):
    """Torques applied at the two joints (N m)."""

    model_config = ConfigDict(frozen=True)

    tau1: float = Field(0.0, allow_inf_nan=False)
    tau2: float = Field(0.0, allow_inf_nan=False)

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2])


class Observation(BaseModel):
    """Partial measurement y = [cx, cy, qd1, qd2]."""

    model_config = ConfigDict(frozen=True)

    cx: float = Field(allow_inf_nan=False)
    cy: float = Field(allow_inf_nan=False)
    qd1: float = Field(allow_inf_nan=False)
    qd2: float = Field(allow_inf_nan=False)

    def as_array(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.qd1, self.qd2])


class PlantState(BaseModel):
    """Full eight-dimensional plant state.

    ``cx``/``cy`` always equal the forward kinematics of ``q1``/``q2``; build
    states through :meth:`from_angles` to keep that true. ``qdd1``/``qdd2``
    hold the most recently evaluated joint accelerations.
    """

    model_config = ConfigDict(frozen=True)

    q1: float = 0.0
    q2: float = 0.0
    qd1: float = 0.0
    qd2: float = 0.0
    qdd1: float = 0.0
    qdd2: float = 0.0
    cx: float = 0.0
    cy: float = 0.0

    @classmethod
    def from_angles(
        cls,
        p: ArmParams,
        q1: float,
        q2: float,
        qd1: float = 0.0,
        qd2: float = 0.0,
        qdd1: float = 0.0,
        qdd2: float = 0.0,
    ) -> "PlantState":
        cx, cy = forward_kinematics(p, q1, q2)
        return cls(
            q1=q1, q2=q2, qd1=qd1, qd2=qd2, qdd1=qdd1, qdd2=qdd2, cx=cx, cy=cy
        )

    def as_vector(self) -> np.ndarray:
        """x = [cx, cy, q1, q2, qd1, qd2, qdd1, qdd2]"""
        return np.array(
            [self.cx, self.cy, self.q1, self.q2, self.qd1, self.qd2, self.qdd1, self.qdd2]
        )

    def observation(self) -> Observation:
        return Observation(cx=self.cx, cy=self.cy, qd1=self.qd1, qd2=self.qd2)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())))


def mass_matrix(p: ArmParams, q2: float) -> np.ndarray:
    c2 = math.cos(q2)
    m22 = p.m2 * p.lc2**2 + p.I2
    m12 = p.m2 * p.l1 * p.lc2 * c2 + m22
    m11 = (
        p.m1 * p.lc1**2
        + p.I1
        + p.m2 * (p.l1**2 + p.lc2**2 + 2.0 * p.l1 * p.lc2 * c2)
        + p.I2
    )
    return np.array([[m11, m12], [m12, m22]])


def coriolis_matrix(p: ArmParams, q2: float, qd1: float, qd2: float) -> np.ndarray:
    h = p.m2 * p.l1 * p.lc2 * math.sin(q2)
    return np.array([[-h * qd2, -h * (qd1 + qd2)], [h * qd1, 0.0]])


def kinetic_energy(p: ArmParams, s: PlantState) -> float:
    qd = np.array([s.qd1, s.qd2])
    return 0.5 * float(qd @ mass_matrix(p, s.q2) @ qd)


def forward_dynamics(
    p: ArmParams, s: PlantState, u: TorqueCommand, step_index: Optional[int] = None
) -> Tuple[float, float]:
    """Joint accelerations solving M(q) q'' = tau - C(q, q') q'.

    Raises:
        NonFiniteStateError: if the state or the torque is not finite.
    """
    values = (s.q1, s.q2, s.qd1, s.qd2, u.tau1, u.tau2)
    if not all(math.isfinite(v) for v in values):
        raise NonFiniteStateError(
            f"Non-finite plant input: state={s}, torque={u}", step_index
        )

    m = mass_matrix(p, s.q2)
    qd = np.array([s.qd1, s.qd2])
    r1, r2 = u.as_array() - coriolis_matrix(p, s.q2, s.qd1, s.qd2) @ qd

    # closed-form 2x2 solve; M is symmetric positive definite
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[0, 1]
    qdd1 = (m[1, 1] * r1 - m[0, 1] * r2) / det
    qdd2 = (m[0, 0] * r2 - m[0, 1] * r1) / det
    return float(qdd1), float(qdd2)


def step(
    p: ArmParams,
    s: PlantState,
    u: TorqueCommand,
    dt: float = 0.01,
    step_index: Optional[int] = None,
) -> PlantState:
    """Advance the plant by one explicit Euler step.

    Positions advance with the velocity at time t and velocities with the
    acceleration evaluated at time t.

    Raises:
        NonFiniteStateError: if the new state is not finite.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    qdd1, qdd2 = forward_dynamics(p, s, u, step_index)
    new = PlantState.from_angles(
        p,
        s.q1 + s.qd1 * dt,
        s.q2 + s.qd2 * dt,
        s.qd1 + qdd1 * dt,
        s.qd2 + qdd2 * dt,
        qdd1,
        qdd2,
    )
    if not new.is_finite():
        where = f" at step {step_index}" if step_index is not None else ""
        raise NonFiniteStateError(f"Plant state became non-finite{where}", step_index)
    return new


def forward_kinematics(p: ArmParams, q1: float, q2: float) -> Tuple[float, float]:
    q12 = q1 + q2
    return (
        p.l1 * math.cos(q1) + p.l2 * math.cos(q12),
        p.l1 * math.sin(q1) + p.l2 * math.sin(q12),
    )


def jacobian(p: ArmParams, q1: float, q2: float) -> np.ndarray:
    """d(cx, cy) / d(q1, q2)"""
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    return np.array(
        [
            [-p.l1 * s1 - p.l2 * s12, -p.l2 * s12],
            [p.l1 * c1 + p.l2 * c12, p.l2 * c12],
        ]
    )


def wrap_angles(q1: float, q2: float) -> Tuple[float, float]:
    """Map q1 into [0, 2pi) and q2 into [-pi, pi)."""
    w1 = q1 % TWO_PI
    if w1 >= TWO_PI:
        w1 = 0.0
    w2 = (q2 + math.pi) % TWO_PI - math.pi
    return w1, w2


def check_reachable(p: ArmParams, cx: float, cy: float, index: Optional[int] = None):
    """Raise UnreachablePointError if (cx, cy) is outside the reachable annulus."""
    r = math.hypot(cx, cy)
    at = f" at index {index}" if index is not None else ""
    if r > p.reach + REACH_TOL:
        raise UnreachablePointError(
            f"Point ({cx:.6g}, {cy:.6g}){at} has radius {r:.6g} > l1 + l2 = {p.reach:.6g}",
            bound="outer",
            index=index,
        )
    if r < p.inner_reach - REACH_TOL:
        raise UnreachablePointError(
            f"Point ({cx:.6g}, {cy:.6g}){at} has radius {r:.6g} < |l1 - l2| = {p.inner_reach:.6g}",
            bound="inner",
            index=index,
        )


def inverse_kinematics(
    p: ArmParams,
    cx: float,
    cy: float,
    prev: Optional[Tuple[float, float]] = None,
    wrap: bool = True,
) -> Tuple[float, float]:
    """Joint angles placing the end effector at (cx, cy).

    Without ``prev`` the elbow branch with q2 >= 0 is returned. With ``prev``
    the branch and 2pi offsets closest to ``prev`` (L1 distance) are chosen so
    that successive solutions along a path stay continuous. ``wrap=False``
    keeps those unwrapped angles; otherwise q1 is reported in [0, 2pi) and
    q2 in [-pi, pi).

    Raises:
        UnreachablePointError: if the point is outside the reachable annulus.
    """
    check_reachable(p, cx, cy)

    c2 = (cx * cx + cy * cy - p.l1**2 - p.l2**2) / (2.0 * p.l1 * p.l2)
    c2 = min(1.0, max(-1.0, c2))
    s2 = math.sqrt(1.0 - c2 * c2)
    base = math.atan2(cy, cx)

    candidates = []
    for sign in (1.0, -1.0):
        q2 = math.atan2(sign * s2, c2)
        q1 = base - math.atan2(p.l2 * math.sin(q2), p.l1 + p.l2 * math.cos(q2))
        candidates.append((q1, q2))

    if prev is None:
        q1, q2 = candidates[0]
    elif math.hypot(cx, cy) < SINGULAR_RADIUS:
        # folded arm at the base: q1 is free, hold it
        q1 = prev[0]
        q2 = math.pi + TWO_PI * round((prev[1] - math.pi) / TWO_PI)
    else:
        best, best_dist = None, math.inf
        for q1, q2 in candidates:
            q1 += TWO_PI * round((prev[0] - q1) / TWO_PI)
            q2 += TWO_PI * round((prev[1] - q2) / TWO_PI)
            dist = abs(q1 - prev[0]) + abs(q2 - prev[1])
            if dist < best_dist:
                best, best_dist = (q1, q2), dist
        q1, q2 = best

    if wrap:
        return wrap_angles(q1, q2)
    return q1, q2
