"""Differential kinematics: tip-map Jacobians, the fixed-tip compensation
solver, and a normalized singularity indicator.

Writing the tip map as F(X, Q) = f(Q) - X = 0 with inputs
Q = (q1, q2, q3, psi, theta) makes the end-effector Jacobian the constant
A = -I and B = df/dQ, so the velocity relation A Xdot + B Qdot = 0 reads
Xdot = B Qdot. B is expressed in millimetres and radians; degree conversion
happens only at this module's public boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularConfigurationError
from .platform import PlatformPose, check_pose
from .spherical import SphericalGeometry, SphericalJoints, check_joints
from .transforms import rot_x, rot_y, rot_z

#: Abort threshold on the normalized joint-block determinant.
SIGMA_MIN = 1e-8

#: Largest input perturbation (rad or mm) used for the B time-derivative.
_RATE_STEP = 1e-5

# d/da rot_x(a) = _GEN_X @ rot_x(a), and likewise for Y.
_GEN_X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
_GEN_Y = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])


@dataclass(frozen=True)
class TaskRates:
    """Tip velocity (mm/s) and acceleration (mm/s^2) in the fixed frame."""

    tip_vel: np.ndarray
    tip_acc: np.ndarray


@dataclass(frozen=True)
class InputRates:
    """Rates and accelerations of the five coupled inputs.

    Angular entries in deg/s and deg/s^2, insertion in mm/s and mm/s^2.
    """

    q1_dot: float
    q2_dot: float
    q3_dot: float
    psi_dot: float
    theta_dot: float
    q1_ddot: float = 0.0
    q2_ddot: float = 0.0
    q3_ddot: float = 0.0
    psi_ddot: float = 0.0
    theta_ddot: float = 0.0

    def rates_internal(self) -> np.ndarray:
        """Input rate vector in radians and millimetres per second."""
        return np.array(
            [
                math.radians(self.q1_dot),
                math.radians(self.q2_dot),
                self.q3_dot,
                math.radians(self.psi_dot),
                math.radians(self.theta_dot),
            ]
        )

    def accels_internal(self) -> np.ndarray:
        """Input acceleration vector in radians and millimetres per second^2."""
        return np.array(
            [
                math.radians(self.q1_ddot),
                math.radians(self.q2_ddot),
                self.q3_ddot,
                math.radians(self.psi_ddot),
                math.radians(self.theta_ddot),
            ]
        )


@dataclass(frozen=True)
class JacobianPair:
    """The A (3x3) and B (3x5) matrices of the velocity relation.

    ``b_q_unit`` is the joint block of B with its angle columns expressed
    per unit insertion depth, which makes all three columns dimensionless
    and the determinant comparable across configurations. ``char_len`` is
    the insertion depth the normalization used.
    """

    a: np.ndarray
    b: np.ndarray
    b_q_unit: np.ndarray
    char_len: float

    @property
    def b_q(self) -> np.ndarray:
        """Columns of B over the module joints (q1, q2, q3)."""
        return self.b[:, :3]

    @property
    def b_a(self) -> np.ndarray:
        """Columns of B over the platform angles (psi, theta)."""
        return self.b[:, 3:]


def _b_core(
    psi: float,
    theta: float,
    phi: float,
    q1: float,
    q2: float,
    q3: float,
    offset: np.ndarray,
    alpha: float,
    beta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """B and its unit-insertion joint block; all angles in radians."""
    ra = rot_y(alpha)
    r1 = rot_x(q1)
    r2 = rot_y(q2)
    core = rot_x(beta) @ np.array([0.0, 0.0, -1.0])
    m = ra @ r1 @ r2 @ core
    dm_dq1 = ra @ _GEN_X @ r1 @ r2 @ core
    dm_dq2 = ra @ r1 @ _GEN_Y @ r2 @ core

    rx, ry, rz = rot_x(psi), rot_y(theta), rot_z(phi)
    r = rx @ ry @ rz
    dr_dpsi = _GEN_X @ r
    dr_dtheta = rx @ _GEN_Y @ ry @ rz
    arm = offset + q3 * m

    u1, u2, u3 = r @ dm_dq1, r @ dm_dq2, r @ m
    b = np.column_stack([q3 * u1, q3 * u2, u3, dr_dpsi @ arm, dr_dtheta @ arm])
    return b, np.column_stack([u1, u2, u3])


def jacobians(
    pose: PlatformPose, joints: SphericalJoints, geometry: SphericalGeometry
) -> JacobianPair:
    """A and B of the velocity relation at one configuration."""
    check_pose(pose)
    check_joints(joints, geometry)
    b, b_q_unit = _b_core(
        *pose.angles_rad,
        math.radians(joints.q1),
        math.radians(joints.q2),
        joints.q3,
        geometry.port.offset_vec,
        math.radians(geometry.alpha),
        math.radians(geometry.beta),
    )
    return JacobianPair(a=-np.eye(3), b=b, b_q_unit=b_q_unit, char_len=joints.q3)


def jacobian_rate(
    pose: PlatformPose,
    joints: SphericalJoints,
    geometry: SphericalGeometry,
    rates: InputRates,
    step: float = _RATE_STEP,
) -> np.ndarray:
    """Time derivative of B along the current input rates.

    Central differences of the analytic B along the input direction; the
    step is scaled so the largest perturbed input moves by ``step``.
    """
    qdot = rates.rates_internal()
    scale = float(np.abs(qdot).max())
    if scale < 1e-15:
        return np.zeros((3, 5))
    h = step / scale

    psi, theta, phi = pose.angles_rad
    base = np.array(
        [math.radians(joints.q1), math.radians(joints.q2), joints.q3, psi, theta]
    )
    offset = geometry.port.offset_vec
    alpha, beta = math.radians(geometry.alpha), math.radians(geometry.beta)

    def b_at(q: np.ndarray) -> np.ndarray:
        return _b_core(q[3], q[4], phi, q[0], q[1], q[2], offset, alpha, beta)[0]

    return (b_at(base + h * qdot) - b_at(base - h * qdot)) / (2.0 * h)


def singularity_measure(pair: JacobianPair) -> float:
    """|det| of the unit-insertion joint block; zero at a singularity."""
    return abs(float(np.linalg.det(pair.b_q_unit)))


def _require_nonsingular(pair: JacobianPair) -> None:
    measure = singularity_measure(pair)
    if measure <= SIGMA_MIN:
        raise SingularConfigurationError(
            f"normalized joint-block |det| = {measure:.3e} <= {SIGMA_MIN:g}"
        )


def compensation_rates(
    pair: JacobianPair, psi_dot: float, theta_dot: float
) -> tuple[float, float, float]:
    """Joint rates that keep the tip stationary under platform angle rates.

    Solves b_q qdot = -b_a (psi_dot, theta_dot) from the velocity relation
    with zero tip velocity. Angle rates in deg/s in and out, q3 in mm/s.
    """
    _require_nonsingular(pair)
    omega = np.radians([psi_dot, theta_dot])
    qdot = np.linalg.solve(pair.b_q, -pair.b_a @ omega)
    return math.degrees(qdot[0]), math.degrees(qdot[1]), float(qdot[2])


def compensation_accels(
    pair: JacobianPair, b_dot: np.ndarray, rates: InputRates
) -> tuple[float, float, float]:
    """Joint accelerations that keep the tip fixed.

    From differentiating the velocity relation with the tip at rest:
    b_q qddot = -b_dot Qdot - b_a (psi_ddot, theta_ddot).
    """
    _require_nonsingular(pair)
    rhs = -(b_dot @ rates.rates_internal())
    rhs -= pair.b_a @ np.radians([rates.psi_ddot, rates.theta_ddot])
    qddot = np.linalg.solve(pair.b_q, rhs)
    return math.degrees(qddot[0]), math.degrees(qddot[1]), float(qddot[2])


def tip_rates(pair: JacobianPair, b_dot: np.ndarray, rates: InputRates) -> TaskRates:
    """Forward velocity relation: tip velocity B Qdot and acceleration
    B Qddot + Bdot Qdot for the given input rates."""
    qdot = rates.rates_internal()
    return TaskRates(
        tip_vel=pair.b @ qdot,
        tip_acc=pair.b @ rates.accels_internal() + b_dot @ qdot,
    )
