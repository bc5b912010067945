"""Analytic surrogate environments: specs, dynamics, and ground-truth rewards.

Three deterministic tasks cover the experimental axes the pipeline needs:
dense-reward reaching (PointMass2D), unstable dynamic control
(CartPoleBalance), and a small discrete chain (ChainMDP) that admits exact
tabular solutions for oracle tests. All dynamics are pure functions of
(spec, state, action).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import ContractViolation


class EnvId(str, Enum):
    POINT_MASS = "pointmass2d"
    CARTPOLE = "cartpole_balance"
    CHAIN = "chain_mdp"


class OptimalityLevel(str, Enum):
    RANDOM = "random"
    MEDIUM = "medium"
    EXPERT = "expert"


# CartPole constants: the de-facto standard parameterization, Euler integration.
CP_GRAVITY = 9.8
CP_MASSCART = 1.0
CP_MASSPOLE = 0.1
CP_TOTAL_MASS = CP_MASSCART + CP_MASSPOLE
CP_HALF_LENGTH = 0.5
CP_POLEMASS_LENGTH = CP_MASSPOLE * CP_HALF_LENGTH
CP_FORCE_SCALE = 10.0
CP_DT = 0.02
CP_ACTION_COST = 0.01

PM_ACTION_BOUND = 0.1
PM_GAIN = 1.0
PM_SUCCESS_THRESHOLD = 0.05

CHAIN_N_STATES = 5
CHAIN_TERMINAL_STATE = 4

_DIMS = {
    EnvId.POINT_MASS: (4, 2),
    EnvId.CARTPOLE: (4, 1),
    EnvId.CHAIN: (1, 1),
}
_DEFAULT_HORIZONS = {
    EnvId.POINT_MASS: 50,
    EnvId.CARTPOLE: 200,
    EnvId.CHAIN: 20,
}


@dataclass(frozen=True)
class EnvSpec:
    env_id: EnvId
    state_dim: int
    action_dim: int
    action_low: np.ndarray
    action_high: np.ndarray
    horizon: int
    success_threshold: float | None = None

    def __post_init__(self):
        expected = _DIMS[self.env_id]
        if (self.state_dim, self.action_dim) != expected:
            raise ContractViolation(
                f"{self.env_id.value}: state/action dims must be {expected}, "
                f"got ({self.state_dim}, {self.action_dim})"
            )
        object.__setattr__(
            self, "action_low", np.asarray(self.action_low, dtype=np.float64)
        )
        object.__setattr__(
            self, "action_high", np.asarray(self.action_high, dtype=np.float64)
        )
        if self.action_low.shape != (self.action_dim,) or self.action_high.shape != (
            self.action_dim,
        ):
            raise ContractViolation("action bounds must have shape (action_dim,)")
        if not np.all(self.action_low < self.action_high):
            raise ContractViolation("action_low must be element-wise below action_high")
        if self.horizon < 1:
            raise ContractViolation("horizon must be >= 1")


def make_spec(env_id: EnvId | str, horizon: int | None = None) -> EnvSpec:
    """Canonical spec for one of the three surrogate environments."""
    env_id = EnvId(env_id)
    state_dim, action_dim = _DIMS[env_id]
    if env_id is EnvId.POINT_MASS:
        low = -PM_ACTION_BOUND * np.ones(2)
        high = PM_ACTION_BOUND * np.ones(2)
        success = PM_SUCCESS_THRESHOLD
    elif env_id is EnvId.CARTPOLE:
        low, high = -np.ones(1), np.ones(1)
        success = None
    else:
        low, high = -np.ones(1), np.ones(1)
        success = None
    return EnvSpec(
        env_id=env_id,
        state_dim=state_dim,
        action_dim=action_dim,
        action_low=low,
        action_high=high,
        horizon=horizon if horizon is not None else _DEFAULT_HORIZONS[env_id],
        success_threshold=success,
    )


@dataclass(frozen=True)
class EnvState:
    values: np.ndarray
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.t < 0:
            raise ContractViolation("step index must be >= 0")


def _wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def _check_state(spec: EnvSpec, state: EnvState) -> np.ndarray:
    v = state.values
    if v.shape != (spec.state_dim,):
        raise ContractViolation(
            f"state has shape {v.shape}, expected ({spec.state_dim},)"
        )
    return v


def _clip_action(spec: EnvSpec, action) -> np.ndarray:
    a = np.asarray(action, dtype=np.float64).reshape(-1)
    if a.shape != (spec.action_dim,):
        raise ContractViolation(
            f"action has shape {a.shape}, expected ({spec.action_dim},)"
        )
    return np.clip(a, spec.action_low, spec.action_high)


def _chain_move(a: np.ndarray) -> float:
    return 1.0 if a[0] >= 0.0 else -1.0


def step(spec: EnvSpec, state: EnvState, action) -> tuple[EnvState, float, bool]:
    """Advance one deterministic step; returns (next_state, gt_reward, done)."""
    v = _check_state(spec, state)
    a = _clip_action(spec, action)
    t_next = state.t + 1

    if spec.env_id is EnvId.POINT_MASS:
        pos = np.clip(v[:2] + a, -1.0, 1.0)
        nxt = np.concatenate([pos, v[2:]])
        reward = -float(np.linalg.norm(pos - v[2:]))
        done = t_next >= spec.horizon
    elif spec.env_id is EnvId.CARTPOLE:
        x, x_dot, theta, theta_dot = v
        force = CP_FORCE_SCALE * a[0]
        sin_t, cos_t = math.sin(theta), math.cos(theta)
        temp = (force + CP_POLEMASS_LENGTH * theta_dot**2 * sin_t) / CP_TOTAL_MASS
        theta_acc = (CP_GRAVITY * sin_t - cos_t * temp) / (
            CP_HALF_LENGTH * (4.0 / 3.0 - CP_MASSPOLE * cos_t**2 / CP_TOTAL_MASS)
        )
        x_acc = temp - CP_POLEMASS_LENGTH * theta_acc * cos_t / CP_TOTAL_MASS
        x = x + CP_DT * x_dot
        x_dot = x_dot + CP_DT * x_acc
        theta = _wrap_angle(theta + CP_DT * theta_dot)
        theta_dot = theta_dot + CP_DT * theta_acc
        nxt = np.array([x, x_dot, theta, theta_dot])
        reward = -(theta**2 + CP_ACTION_COST * float(a[0]) ** 2)
        done = t_next >= spec.horizon
    else:
        s = v[0]
        s_next = float(np.clip(s + _chain_move(a), 0, CHAIN_N_STATES - 1))
        nxt = np.array([s_next])
        reward = 1.0 if (s_next == CHAIN_TERMINAL_STATE and s != CHAIN_TERMINAL_STATE) else 0.0
        done = s_next == CHAIN_TERMINAL_STATE or t_next >= spec.horizon

    return EnvState(values=nxt, t=t_next), float(reward), bool(done)


def gt_reward(spec: EnvSpec, state: EnvState, action) -> float:
    """Ground-truth reward of taking ``action`` in ``state`` (transition-based)."""
    return step(spec, state, action)[1]


def gt_state_reward(spec: EnvSpec, values: np.ndarray) -> float:
    """State-only ground-truth reward, as attached to resulting states."""
    v = np.asarray(values, dtype=np.float64)
    if spec.env_id is EnvId.POINT_MASS:
        return -float(np.linalg.norm(v[:2] - v[2:]))
    if spec.env_id is EnvId.CARTPOLE:
        return -float(v[2] ** 2)
    return 1.0 if v[0] == CHAIN_TERMINAL_STATE else 0.0


def gt_state_reward_batch(spec: EnvSpec, values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`gt_state_reward` over rows of ``values``."""
    v = np.asarray(values, dtype=np.float64)
    if spec.env_id is EnvId.POINT_MASS:
        return -np.linalg.norm(v[:, :2] - v[:, 2:], axis=1)
    if spec.env_id is EnvId.CARTPOLE:
        return -(v[:, 2] ** 2)
    return (v[:, 0] == CHAIN_TERMINAL_STATE).astype(np.float64)


def start_state(spec: EnvSpec, rng: np.random.Generator) -> EnvState:
    """Sample an initial state from the environment's start distribution."""
    if spec.env_id is EnvId.POINT_MASS:
        pos = rng.uniform(-1.0, 1.0, size=2)
        values = np.array([pos[0], pos[1], 0.0, 0.0])
    elif spec.env_id is EnvId.CARTPOLE:
        values = np.array([0.0, 0.0, rng.uniform(-0.05, 0.05), 0.0])
    else:
        values = np.array([0.0])
    return EnvState(values=values, t=0)
