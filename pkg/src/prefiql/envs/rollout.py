"""Scripted behavior policies, offline dataset generation, policy evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ..dataset import OfflineDataset, RewardStatus
from ..errors import ContractViolation
from .core import (
    CHAIN_TERMINAL_STATE,
    EnvId,
    EnvSpec,
    EnvState,
    OptimalityLevel,
    start_state,
    step,
)

# CartPole PD gains in action units (force = 10 * a): stabilizes the pole and
# recentres the cart for the standard constants.
CP_PD_GAINS = (3.0, 0.6, 0.05, 0.25)  # theta, theta_dot, x, x_dot


class PolicyLike(Protocol):
    """Anything that maps a state vector to an action vector."""

    def mean_action(self, state: np.ndarray) -> np.ndarray: ...

    def sample_action(self, state: np.ndarray, rng: np.random.Generator) -> np.ndarray: ...


def _expert_action(spec: EnvSpec, state: EnvState) -> np.ndarray:
    v = state.values
    if spec.env_id is EnvId.POINT_MASS:
        return np.clip(1.0 * (v[2:] - v[:2]), spec.action_low, spec.action_high)
    if spec.env_id is EnvId.CARTPOLE:
        k_th, k_thd, k_x, k_xd = CP_PD_GAINS
        a = k_th * v[2] + k_thd * v[3] + k_x * v[0] + k_xd * v[1]
        return np.clip(np.array([a]), spec.action_low, spec.action_high)
    return np.array([1.0])


def _random_action(spec: EnvSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.env_id is EnvId.CHAIN:
        # Discrete action set {-1, +1}; intermediate values are not representable.
        return np.array([rng.choice([-1.0, 1.0])])
    return rng.uniform(spec.action_low, spec.action_high)


def scripted_action(
    spec: EnvSpec,
    level: OptimalityLevel,
    state: EnvState,
    rng: np.random.Generator,
) -> np.ndarray:
    """Behavior-policy action at one of the three optimality levels."""
    if level is OptimalityLevel.RANDOM:
        return _random_action(spec, rng)
    if level is OptimalityLevel.EXPERT:
        return _expert_action(spec, state)
    # Medium: 50/50 mixture of noisy-expert and uniform random.
    if rng.random() < 0.5:
        a = _expert_action(spec, state)
        if spec.env_id is EnvId.CHAIN:
            return a
        noise = rng.normal(0.0, 0.5 * (spec.action_high - spec.action_low))
        return np.clip(a + noise, spec.action_low, spec.action_high)
    return _random_action(spec, rng)


def generate_dataset(
    spec: EnvSpec,
    level: OptimalityLevel,
    n_traj: int,
    seed: int,
) -> OfflineDataset:
    """Roll out the scripted policy; rewards are left absent (unlabeled).

    Each trajectory uses its own generator seeded `seed + index`, so
    trajectories are independent and the merge order is deterministic.
    """
    if n_traj < 1:
        raise ContractViolation("n_traj must be >= 1")
    traj_ids, ts, states, actions, next_states, dones = [], [], [], [], [], []
    for i in range(n_traj):
        rng = np.random.default_rng(seed + i)
        s = start_state(spec, rng)
        while True:
            a = scripted_action(spec, level, s, rng)
            s_next, _, done = step(spec, s, a)
            traj_ids.append(i)
            ts.append(s.t)
            states.append(s.values)
            actions.append(a)
            next_states.append(s_next.values)
            dones.append(done)
            s = s_next
            if done:
                break
    return OfflineDataset(
        spec=spec,
        traj_ids=np.array(traj_ids),
        ts=np.array(ts),
        states=np.array(states),
        actions=np.array(actions),
        rewards=None,
        next_states=np.array(next_states),
        dones=np.array(dones),
        reward_status=RewardStatus.UNLABELED,
    )


def _episode_success(spec: EnvSpec, final: EnvState) -> bool | None:
    if spec.env_id is EnvId.POINT_MASS:
        dist = float(np.linalg.norm(final.values[:2] - final.values[2:]))
        return dist < spec.success_threshold
    if spec.env_id is EnvId.CHAIN:
        return final.values[0] == CHAIN_TERMINAL_STATE
    return None


@dataclass(frozen=True)
class EvalReport:
    mean_return: float
    std_return: float
    success_rate: float | None
    n_episodes: int


def evaluate_policy(
    spec: EnvSpec,
    policy: PolicyLike,
    n_episodes: int,
    seed: int,
    stochastic: bool = False,
) -> EvalReport:
    """Roll out the policy mean (or samples, if ``stochastic``) for n episodes.

    Episode i uses generator seed ``seed + i`` so episodes are independent and
    the report is reproducible.
    """
    if n_episodes < 1:
        raise ContractViolation("n_episodes must be >= 1")
    returns = np.zeros(n_episodes)
    successes: list[bool] = []
    for ep in range(n_episodes):
        rng = np.random.default_rng(seed + ep)
        s = start_state(spec, rng)
        total = 0.0
        while True:
            a = policy.sample_action(s.values, rng) if stochastic else policy.mean_action(s.values)
            a = np.asarray(a, dtype=np.float64).reshape(-1)
            if a.shape != (spec.action_dim,):
                raise ContractViolation(
                    f"policy produced action of shape {a.shape}, expected ({spec.action_dim},)"
                )
            s, r, done = step(spec, s, a)
            total += r
            if done:
                break
        returns[ep] = total
        got = _episode_success(spec, s)
        if got is not None:
            successes.append(got)
    success_rate = float(np.mean(successes)) if successes else None
    return EvalReport(
        mean_return=float(returns.mean()),
        std_return=float(returns.std()),
        success_rate=success_rate,
        n_episodes=n_episodes,
    )


class ScriptedPolicy:
    """Adapter exposing a scripted controller through the policy protocol."""

    def __init__(self, spec: EnvSpec, level: OptimalityLevel, rng_seed: int = 0):
        self.spec = spec
        self.level = level
        self._rng = np.random.default_rng(rng_seed)

    def mean_action(self, state: np.ndarray) -> np.ndarray:
        return scripted_action(self.spec, self.level, EnvState(values=state), self._rng)

    def sample_action(self, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return scripted_action(self.spec, self.level, EnvState(values=state), rng)
