"""Offline transition datasets: container, bit-exact persistence, relabeling.

The on-disk format is a `manifest.json` (canonical key order, no insignificant
whitespace) next to a `transitions.bin` of fixed-size little-endian records,
so identical datasets serialize to identical bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator, Optional

import numpy as np

from .envs.core import EnvId, EnvSpec, make_spec
from .errors import ContractViolation, DatasetCorruption, FormatVersionError

FORMAT_VERSION = 1
DTYPE_TAG = "f32le"

MANIFEST_NAME = "manifest.json"
TRANSITIONS_NAME = "transitions.bin"


class RewardStatus(str, Enum):
    UNLABELED = "unlabeled"
    GROUND_TRUTH = "ground_truth"
    LEARNED = "learned"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Transition:
    """Row view over one dataset record."""

    traj_id: int
    t: int
    s: np.ndarray
    a: np.ndarray
    r: Optional[float]
    s_next: np.ndarray
    done: bool


def record_dtype(state_dim: int, action_dim: int) -> np.dtype:
    """Packed little-endian record layout of `transitions.bin`."""
    return np.dtype(
        [
            ("traj_id", "<u4"),
            ("t", "<u4"),
            ("s", "<f4", (state_dim,)),
            ("a", "<f4", (action_dim,)),
            ("r_present", "u1"),
            ("r", "<f4"),
            ("s_next", "<f4", (state_dim,)),
            ("done", "u1"),
        ]
    )


def _frozen_f32(values, shape) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float32).reshape(shape))
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class OfflineDataset:
    """Immutable set of ordered trajectories of transitions.

    Stored column-wise; ``rewards`` is None exactly when the dataset is
    unlabeled. Relabeling returns a new dataset.
    """

    spec: EnvSpec
    traj_ids: np.ndarray
    ts: np.ndarray
    states: np.ndarray
    actions: np.ndarray
    rewards: Optional[np.ndarray]
    next_states: np.ndarray
    dones: np.ndarray
    reward_status: RewardStatus

    def __post_init__(self):
        n = len(self.traj_ids)
        object.__setattr__(
            self, "traj_ids", np.ascontiguousarray(self.traj_ids, dtype=np.uint32)
        )
        object.__setattr__(self, "ts", np.ascontiguousarray(self.ts, dtype=np.uint32))
        object.__setattr__(
            self, "states", _frozen_f32(self.states, (n, self.spec.state_dim))
        )
        object.__setattr__(
            self, "actions", _frozen_f32(self.actions, (n, self.spec.action_dim))
        )
        object.__setattr__(
            self, "next_states", _frozen_f32(self.next_states, (n, self.spec.state_dim))
        )
        object.__setattr__(
            self, "dones", np.ascontiguousarray(self.dones, dtype=bool)
        )
        if self.rewards is not None:
            object.__setattr__(self, "rewards", _frozen_f32(self.rewards, (n,)))
        for arr in (self.traj_ids, self.ts):
            arr.flags.writeable = False
        self.dones.flags.writeable = False
        self.validate()

    def __len__(self) -> int:
        return len(self.traj_ids)

    @property
    def n_trajectories(self) -> int:
        return int(self.traj_ids[-1]) + 1

    def validate(self) -> None:
        n = len(self)
        if n < 1:
            raise ContractViolation("dataset must contain at least one transition")
        if (self.rewards is None) != (self.reward_status is RewardStatus.UNLABELED):
            raise ContractViolation(
                "reward column must be absent exactly when reward_status is unlabeled"
            )
        if self.rewards is not None and not np.all(np.isfinite(self.rewards)):
            raise ContractViolation("reward column contains non-finite values")
        if not (np.all(np.isfinite(self.states)) and np.all(np.isfinite(self.next_states))):
            raise ContractViolation("state columns contain non-finite values")

        traj = self.traj_ids.astype(np.int64)
        boundaries = np.flatnonzero(np.diff(traj) != 0)
        starts = np.concatenate([[0], boundaries + 1])
        ends = np.concatenate([boundaries, [n - 1]])
        ids = traj[starts]
        if ids[0] != 0 or np.any(np.diff(ids) != 1):
            raise ContractViolation("trajectory ids must be contiguous from 0")
        for s0, s1 in zip(starts, ends):
            ts = self.ts[s0 : s1 + 1].astype(np.int64)
            if ts[0] != 0 or np.any(np.diff(ts) != 1):
                raise ContractViolation("step indices within a trajectory must be 0..L-1")
            if s1 > s0 and not np.array_equal(
                self.next_states[s0:s1], self.states[s0 + 1 : s1 + 1]
            ):
                raise ContractViolation(
                    "s_next of step t must equal s of step t+1 within a trajectory"
                )
            done = self.dones[s0 : s1 + 1]
            if not done[-1] or np.any(done[:-1]):
                raise ContractViolation(
                    "done must be true exactly at the last transition of a trajectory"
                )

    def traj_slices(self) -> list[slice]:
        traj = self.traj_ids.astype(np.int64)
        boundaries = np.flatnonzero(np.diff(traj) != 0)
        starts = np.concatenate([[0], boundaries + 1])
        ends = np.concatenate([boundaries + 1, [len(self)]])
        return [slice(int(a), int(b)) for a, b in zip(starts, ends)]

    def row_index(self, traj_id: int, t: int) -> int:
        """Row of the transition at (traj_id, t)."""
        idx = np.flatnonzero((self.traj_ids == traj_id) & (self.ts == t))
        if len(idx) != 1:
            raise ContractViolation(f"no transition at traj={traj_id}, t={t}")
        return int(idx[0])

    def transition(self, i: int) -> Transition:
        return Transition(
            traj_id=int(self.traj_ids[i]),
            t=int(self.ts[i]),
            s=self.states[i],
            a=self.actions[i],
            r=None if self.rewards is None else float(self.rewards[i]),
            s_next=self.next_states[i],
            done=bool(self.dones[i]),
        )

    def transitions(self) -> Iterator[Transition]:
        for i in range(len(self)):
            yield self.transition(i)


def _manifest_dict(d: OfflineDataset) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "env_id": d.spec.env_id.value,
        "state_dim": d.spec.state_dim,
        "action_dim": d.spec.action_dim,
        "n_transitions": len(d),
        "n_trajectories": d.n_trajectories,
        "reward_status": d.reward_status.value,
        "dtype": DTYPE_TAG,
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def save_dataset(d: OfflineDataset, path) -> None:
    """Write `manifest.json` + `transitions.bin`; rejects invalid datasets."""
    d.validate()
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    (out / MANIFEST_NAME).write_text(canonical_json(_manifest_dict(d)) + "\n")

    arr = np.zeros(len(d), dtype=record_dtype(d.spec.state_dim, d.spec.action_dim))
    arr["traj_id"] = d.traj_ids
    arr["t"] = d.ts
    arr["s"] = d.states
    arr["a"] = d.actions
    if d.rewards is not None:
        arr["r_present"] = 1
        arr["r"] = d.rewards
    arr["s_next"] = d.next_states
    arr["done"] = d.dones.astype(np.uint8)
    (out / TRANSITIONS_NAME).write_bytes(arr.tobytes())


def load_dataset(path) -> OfflineDataset:
    """Load and fully re-validate a persisted dataset."""
    root = Path(path)
    manifest = json.loads((root / MANIFEST_NAME).read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise FormatVersionError(
            f"unknown dataset format_version {manifest.get('format_version')!r}"
        )
    if manifest.get("dtype") != DTYPE_TAG:
        raise FormatVersionError(f"unknown dtype tag {manifest.get('dtype')!r}")
    n = int(manifest["n_transitions"])
    if n < 1:
        raise ContractViolation("manifest declares an empty dataset")
    spec = make_spec(EnvId(manifest["env_id"]))
    if (spec.state_dim, spec.action_dim) != (
        int(manifest["state_dim"]),
        int(manifest["action_dim"]),
    ):
        raise DatasetCorruption("manifest dims do not match the environment")

    dtype = record_dtype(spec.state_dim, spec.action_dim)
    raw = (root / TRANSITIONS_NAME).read_bytes()
    expected = n * dtype.itemsize
    if len(raw) != expected:
        raise DatasetCorruption(
            f"transitions.bin: expected {expected} bytes, got {len(raw)}"
        )
    arr = np.frombuffer(raw, dtype=dtype)

    status = RewardStatus(manifest["reward_status"])
    present = arr["r_present"].astype(bool)
    if status is RewardStatus.UNLABELED:
        if present.any():
            raise DatasetCorruption("unlabeled dataset carries reward payloads")
        rewards = None
    else:
        if not present.all():
            raise DatasetCorruption("labeled dataset has missing reward payloads")
        rewards = arr["r"].copy()

    d = OfflineDataset(
        spec=spec,
        traj_ids=arr["traj_id"].copy(),
        ts=arr["t"].copy(),
        states=arr["s"].copy(),
        actions=arr["a"].copy(),
        rewards=rewards,
        next_states=arr["s_next"].copy(),
        dones=arr["done"].astype(bool),
        reward_status=status,
    )
    if d.n_trajectories != int(manifest["n_trajectories"]):
        raise DatasetCorruption("manifest trajectory count does not match payload")
    return d


def relabel_rewards(
    d: OfflineDataset,
    reward_fn: Callable,
    status: RewardStatus = RewardStatus.LEARNED,
) -> OfflineDataset:
    """New dataset with r = reward_fn(s_next) per transition; all else unchanged.

    ``reward_fn`` may be vectorized over an (N, state_dim) batch or accept a
    single state vector.
    """
    if status is RewardStatus.UNLABELED:
        raise ContractViolation("cannot relabel to unlabeled status")
    batch = d.next_states.astype(np.float64)
    out = reward_fn(batch)
    rewards = np.asarray(out, dtype=np.float64).reshape(-1)
    if rewards.shape != (len(d),):
        rewards = np.array([float(reward_fn(s)) for s in batch])
    return replace(d, rewards=rewards, reward_status=status)


def label_constant_average(d: OfflineDataset, gt_reward_fn: Callable) -> OfflineDataset:
    """Label every transition with the dataset mean of gt_reward_fn(s, a)."""
    values = np.array(
        [
            float(gt_reward_fn(s, a))
            for s, a in zip(d.states.astype(np.float64), d.actions.astype(np.float64))
        ]
    )
    mean = float(values.mean())
    return replace(
        d,
        rewards=np.full(len(d), mean),
        reward_status=RewardStatus.CONSTANT,
    )
