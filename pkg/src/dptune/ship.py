"""3-DOF ship model: kinematics, actuator force mapping, steady wind, saturation.

The vessel is described by an earth-fixed pose ``p = (x0, y0, psi0)``, a
body-fixed velocity ``v = (v1, v2, v3)`` (surge, sway, yaw rate) and an
actuator state ``u = (delta_P, delta_S, n_B)`` (port/starboard rudder angle,
bow thruster speed).  Dynamics follow

    p_dot = J(psi) v
    M v_dot + D v = tau + tau_wind,      tau = TV u_tilde

where ``u_tilde`` is the deviation of the actuators from their hover
configuration (``n_B`` enters through ``n_B |n_B|``).  The environment
enforces box and slew-rate limits on the actuator state; commanded values may
exceed them and are penalized elsewhere.

All math helpers are vectorized: a leading batch axis may be prepended to any
state array, and scalar heading arguments may be arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DivergenceError

TWO_PI = 2.0 * np.pi

# Admissible actuator boxes [rad, rad, 1/s] and slew-rate limits
# [rad/s, rad/s, (1/s)/s] of the model ship's drive train.
ACTUATOR_LOWER = np.array([-105.0 * np.pi / 180.0, 60.0 * np.pi / 180.0, -60.0])
ACTUATOR_UPPER = np.array([-60.0 * np.pi / 180.0, 105.0 * np.pi / 180.0, 60.0])
RATE_LIMITS = np.array([0.349, 0.349, 100.0])


def wrap_angle(angle):
    """Wrap an angle (or array of angles) to (-pi, pi]."""
    a = np.asarray(angle, dtype=float)
    w = a - TWO_PI * np.round(a / TWO_PI)
    return np.where(w <= -np.pi, w + TWO_PI, w)


@dataclass(frozen=True)
class Pose:
    """Earth-fixed position [m] and heading [rad]; heading kept unwrapped."""

    x0: float
    y0: float
    psi0: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.y0, self.psi0], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Pose":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class Velocity:
    """Body-fixed surge/sway speed [m/s] and yaw rate [rad/s]."""

    v1: float
    v2: float
    v3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Velocity":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class ActuatorState:
    """Rudder angles [rad] and bow thruster speed [1/s]."""

    delta_P: float
    delta_S: float
    n_B: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta_P, self.delta_S, self.n_B], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ActuatorState":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class ShipState:
    """Full integration state: pose, body velocity, actuator state."""

    pose: Pose
    vel: Velocity
    act: ActuatorState


@dataclass(frozen=True)
class WindCondition:
    """True wind: speed [m/s] and the earth-frame direction it blows FROM [rad].

    Fields may be arrays of matching shape for batched evaluation.
    """

    speed_true: float
    direction_true: float


@dataclass(frozen=True)
class WindCoefficients:
    """Dimensionless wind force/moment coefficients (may hold arrays)."""

    Cwx: float
    Cwy: float
    Cwpsi: float


def _as3(x) -> np.ndarray:
    """Coerce a Pose/Velocity/ActuatorState or array-like to a float array."""
    if hasattr(x, "as_array"):
        return x.as_array()
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ShipParams:
    """Hull, actuator and wind-model parameters of the simulated vessel.

    The mass matrix ``M`` and damping matrix ``D`` use the standard 3-DOF
    sparsity (surge decoupled from sway/yaw):

        M = [[m11, 0, 0], [0, m22, m23], [0, m32, m33]]
        D = [[d11, 0, 0], [0, d22, d23], [0, d32, d33]]

    ``tv`` maps actuator deviations ``(delta_P - delta_P_hover,
    delta_S - delta_S_hover, n_B |n_B|)`` linearly to body forces/moment.

    The default values (``ShipParams.default()``) are plausible placeholder
    numbers for a small free-running twin-rudder model; they are NOT
    identified coefficients of any particular hull and exist so that the
    toolkit runs out of the box.  Real studies must supply their own set via
    the configuration file.
    """

    m11: float
    m22: float
    m23: float
    m32: float
    m33: float
    d11: float
    d22: float
    d23: float
    d32: float
    d33: float
    tv: np.ndarray
    delta_P_hover: float
    delta_S_hover: float
    n_P: float  # stern propeller speed, held constant [1/s]
    lpp: float
    a_T: float
    a_L: float
    rho_air: float
    # dimensionless wind-coefficient regressors
    xx0: float
    xx1: float
    xx3: float
    xx5: float
    yy1: float
    yy3: float
    yy5: float
    nn1: float
    nn2: float
    nn3: float
    act_lower: np.ndarray = field(default_factory=lambda: ACTUATOR_LOWER.copy())
    act_upper: np.ndarray = field(default_factory=lambda: ACTUATOR_UPPER.copy())
    rate_limits: np.ndarray = field(default_factory=lambda: RATE_LIMITS.copy())

    def __post_init__(self):
        tv = np.asarray(self.tv, dtype=float)
        lo = np.asarray(self.act_lower, dtype=float)
        hi = np.asarray(self.act_upper, dtype=float)
        om = np.asarray(self.rate_limits, dtype=float)
        object.__setattr__(self, "tv", tv)
        object.__setattr__(self, "act_lower", lo)
        object.__setattr__(self, "act_upper", hi)
        object.__setattr__(self, "rate_limits", om)

        M = np.array(
            [[self.m11, 0.0, 0.0], [0.0, self.m22, self.m23], [0.0, self.m32, self.m33]]
        )
        D = np.array(
            [[self.d11, 0.0, 0.0], [0.0, self.d22, self.d23], [0.0, self.d32, self.d33]]
        )
        self._validate(M, tv, lo, hi, om)
        M_inv = np.linalg.inv(M)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "M_inv", M_inv)
        object.__setattr__(self, "A_mat", M_inv @ D)  # decay matrix M^-1 D
        object.__setattr__(self, "B_mat", M_inv @ tv)  # input matrix M^-1 TV
        object.__setattr__(self, "B_inv", np.linalg.solve(tv, M))
        object.__setattr__(self, "hover", np.array([self.delta_P_hover, self.delta_S_hover, 0.0]))
        object.__setattr__(self, "box_widths", hi - lo)

    def _validate(self, M, tv, lo, hi, om):
        for name, val in (("M", M), ("TV", tv)):
            if not np.all(np.isfinite(val)):
                raise ConfigurationError(f"{name} contains non-finite entries")
            if abs(np.linalg.det(val)) < 1e-12:
                raise ConfigurationError(f"{name} is singular")
        if tv.shape != (3, 3):
            raise ConfigurationError("TV must be a 3x3 matrix")
        if not np.all(hi > lo):
            raise ConfigurationError("actuator boxes must have positive width")
        if not np.all(om > 0):
            raise ConfigurationError("rate limits must be positive")
        if not (lo[0] <= self.delta_P_hover <= hi[0] and lo[1] <= self.delta_S_hover <= hi[1]):
            raise ConfigurationError("hover angles must lie inside the rudder boxes")

    @property
    def cond_B(self) -> float:
        """Condition number of the acceleration input matrix M^-1 TV."""
        return float(np.linalg.cond(self.B_mat))

    def hover_actuators(self) -> ActuatorState:
        """Actuator state producing zero net force (bow thruster stopped)."""
        return ActuatorState(self.delta_P_hover, self.delta_S_hover, 0.0)

    @classmethod
    def default(cls) -> "ShipParams":
        """Placeholder parameter set for a ~1.8 m twin-rudder model ship.

        Plausible magnitudes only (mass ~30 kg, rudder authority a few N,
        bow thruster a few N); not identified from any experiment.
        """
        return cls(
            m11=32.0,
            m22=55.0,
            m23=2.0,
            m32=1.5,
            m33=9.0,
            d11=4.0,
            d22=10.0,
            d23=1.0,
            d32=0.5,
            d33=3.0,
            tv=np.array(
                [
                    [9.0, -9.0, 0.0],
                    [3.5, 3.5, 0.002],
                    [-2.8, -2.8, 0.0015],
                ]
            ),
            delta_P_hover=-82.5 * np.pi / 180.0,
            delta_S_hover=82.5 * np.pi / 180.0,
            n_P=60.0,
            lpp=1.8,
            a_T=0.12,
            a_L=0.50,
            rho_air=1.225,
            xx0=-0.05,
            xx1=-0.60,
            xx3=-0.065,
            xx5=0.01,
            yy1=0.90,
            yy3=0.12,
            yy5=0.02,
            nn1=0.05,
            nn2=-0.10,
            nn3=0.02,
        )


def rotation_matrix(psi) -> np.ndarray:
    """Body-to-earth rotation J(psi); shape (..., 3, 3) for array input."""
    p = np.asarray(psi, dtype=float)
    c, s = np.cos(p), np.sin(p)
    J = np.zeros(p.shape + (3, 3))
    J[..., 0, 0] = c
    J[..., 0, 1] = -s
    J[..., 1, 0] = s
    J[..., 1, 1] = c
    J[..., 2, 2] = 1.0
    return J


def rotation_derivative(psi) -> np.ndarray:
    """Element-wise derivative dJ/dpsi; third row and column are zero."""
    p = np.asarray(psi, dtype=float)
    c, s = np.cos(p), np.sin(p)
    dJ = np.zeros(p.shape + (3, 3))
    dJ[..., 0, 0] = -s
    dJ[..., 0, 1] = -c
    dJ[..., 1, 0] = c
    dJ[..., 1, 1] = -s
    return dJ


def rotate(psi, vec) -> np.ndarray:
    """Apply J(psi) to a (..., 3) vector without forming matrices."""
    v = np.asarray(vec, dtype=float)
    c, s = np.cos(psi), np.sin(psi)
    return np.stack(
        [c * v[..., 0] - s * v[..., 1], s * v[..., 0] + c * v[..., 1], v[..., 2]],
        axis=-1,
    )


def rotate_back(psi, vec) -> np.ndarray:
    """Apply J(psi)^T = J(psi)^-1 to a (..., 3) vector."""
    v = np.asarray(vec, dtype=float)
    c, s = np.cos(psi), np.sin(psi)
    return np.stack(
        [c * v[..., 0] + s * v[..., 1], -s * v[..., 0] + c * v[..., 1], v[..., 2]],
        axis=-1,
    )


def relative_wind(pose, vel, wind: WindCondition):
    """Apparent wind felt by the hull.

    Returns ``(U_A, gamma_A)``: the magnitude of the wind velocity relative
    to the moving ship, and the body-frame encounter angle in [0, 2*pi)
    (0 = wind from dead ahead).
    """
    p = _as3(pose)
    v = _as3(vel)
    psi = p[..., 2]
    c, s = np.cos(psi), np.sin(psi)
    # ship ground velocity, earth frame
    vx = c * v[..., 0] - s * v[..., 1]
    vy = s * v[..., 0] + c * v[..., 1]
    # air velocity relative to the ship, earth frame (wind blows FROM gamma)
    rx = -wind.speed_true * np.cos(wind.direction_true) - vx
    ry = -wind.speed_true * np.sin(wind.direction_true) - vy
    u_A = np.hypot(rx, ry)
    # direction the apparent wind comes from, body frame
    ax = -(c * rx + s * ry)
    ay = -(-s * rx + c * ry)
    gamma_A = np.mod(np.arctan2(ay, ax), TWO_PI)
    return u_A, gamma_A


def wind_coefficients(gamma_A, params: ShipParams) -> WindCoefficients:
    """Trigonometric regression for the dimensionless wind coefficients."""
    th = TWO_PI - np.asarray(gamma_A, dtype=float)
    cwx = (
        params.xx0
        + params.xx1 * np.cos(th)
        + params.xx3 * np.cos(3.0 * th)
        + params.xx5 * np.cos(5.0 * th)
    )
    cwy = params.yy1 * np.sin(th) + params.yy3 * np.sin(3.0 * th) + params.yy5 * np.sin(5.0 * th)
    cwpsi = (
        params.nn1 * np.sin(th) + params.nn2 * np.sin(2.0 * th) + params.nn3 * np.sin(3.0 * th)
    )
    return WindCoefficients(cwx, cwy, cwpsi)


def wind_force(u_A, gamma_A, params: ShipParams) -> np.ndarray:
    """Body-frame wind force/moment (..., 3), quadratic in the apparent speed."""
    cw = wind_coefficients(gamma_A, params)
    q = 0.5 * params.rho_air * np.square(np.abs(u_A))
    return np.stack(
        [q * params.a_T * cw.Cwx, q * params.a_L * cw.Cwy, q * params.a_L * params.lpp * cw.Cwpsi],
        axis=-1,
    )


def actuator_deviation(u, params: ShipParams) -> np.ndarray:
    """Deviation coordinates u_tilde driving the force map.

    Rudders enter as offsets from hover; the bow thruster as ``n_B |n_B|``.
    """
    a = _as3(u)
    n = a[..., 2]
    return np.stack(
        [a[..., 0] - params.delta_P_hover, a[..., 1] - params.delta_S_hover, n * np.abs(n)],
        axis=-1,
    )


def actuator_force(u_tilde, params: ShipParams) -> np.ndarray:
    """Linear actuator force map tau = TV u_tilde."""
    return np.asarray(u_tilde, dtype=float) @ params.tv.T


def acceleration(vel, tau, tau_wind, params: ShipParams) -> np.ndarray:
    """Body-frame acceleration: v_dot = -M^-1 D v + M^-1 (tau + tau_wind)."""
    v = _as3(vel)
    f = np.asarray(tau, dtype=float) + np.asarray(tau_wind, dtype=float)
    return -(v @ params.A_mat.T) + f @ params.M_inv.T


def apply_actuator_limits(u, u_c, dt: float, params: ShipParams) -> np.ndarray:
    """Slew-rate limit the command, then clip into the actuator boxes."""
    a = _as3(u)
    c = _as3(u_c)
    step = np.clip(c - a, -params.rate_limits * dt, params.rate_limits * dt)
    return np.clip(a + step, params.act_lower, params.act_upper)


def dynamics_step(pose, vel, act, u_c, wind: WindCondition, dt: float, params: ShipParams,
                  tau_wind=None):
    """One explicit-Euler step of the environment.

    The actuator moves toward the command under rate and box limits first;
    forces are evaluated at the updated actuator and the current
    pose/velocity; the pose update uses the pre-update velocity.

    Returns ``(pose_next, vel_next, act_next)``.
    """
    pose = np.asarray(pose, dtype=float)
    vel = np.asarray(vel, dtype=float)
    act_next = apply_actuator_limits(act, u_c, dt, params)
    tau = actuator_force(actuator_deviation(act_next, params), params)
    if tau_wind is None:
        u_A, gamma_A = relative_wind(pose, vel, wind)
        tau_wind = wind_force(u_A, gamma_A, params)
    v_dot = acceleration(vel, tau, tau_wind, params)
    pose_next = pose + dt * rotate(pose[..., 2], vel)
    vel_next = vel + dt * v_dot
    return pose_next, vel_next, act_next


def step(state: ShipState, u_c, wind: WindCondition, dt: float, params: ShipParams,
         step_index: int | None = None) -> ShipState:
    """Advance the full ship state by one step of size ``dt``.

    Raises ``DivergenceError`` if any component of the next state is
    non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    pose, vel, act = state.pose.as_array(), state.vel.as_array(), state.act.as_array()
    pose_n, vel_n, act_n = dynamics_step(pose, vel, act, _as3(u_c), wind, dt, params)
    if not (np.all(np.isfinite(pose_n)) and np.all(np.isfinite(vel_n)) and np.all(np.isfinite(act_n))):
        raise DivergenceError("ship state became non-finite", step_index=step_index)
    return ShipState(Pose.from_array(pose_n), Velocity.from_array(vel_n),
                     ActuatorState.from_array(act_n))
