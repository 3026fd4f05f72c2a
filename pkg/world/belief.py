"""
Belief Module - factored per-target beliefs and the exact Bayes update

The joint belief is kept as a product: one dense vector per target plus the
fully observed camera state. No joint distribution is ever materialized.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.errors import BeliefConflictError, ConfigurationError
from world.gridworld import JointAction, JointCameraState, SurveillanceArea
from world.motion import StateSpace, TargetState, TransitionTable
from world.sensing import Observation, SensorModel, format_observation

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TargetBelief:
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1:
            raise ConfigurationError(f"belief must be a vector, got shape {probs.shape}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return self.probs.shape[0]

    def total(self) -> float:
        return float(self.probs.sum())

    def location_marginal(self, space: StateSpace) -> np.ndarray:
        return self.probs.reshape(space.n_locations, -1).sum(axis=1)

    def top_k(self, space: StateSpace, k: int) -> List[Tuple[TargetState, float]]:
        """The k most probable states, ties broken by state index"""
        order = np.argsort(-self.probs, kind="stable")[:k]
        return [(space.state(i), float(self.probs[i])) for i in order if self.probs[i] > 0]


@dataclass(frozen=True)
class JointBelief:
    per_target: Tuple[TargetBelief, ...]
    camera_state: JointCameraState

    def __post_init__(self):
        object.__setattr__(self, "per_target", tuple(self.per_target))
        object.__setattr__(self, "camera_state", tuple(int(c) for c in self.camera_state))

    @property
    def n_targets(self) -> int:
        return len(self.per_target)

    def stacked(self) -> np.ndarray:
        """Beliefs as columns of a (|T|, m) array"""
        if not self.per_target:
            return np.zeros((0, 0))
        return np.column_stack([b.probs for b in self.per_target])


def uniform_belief(space: StateSpace) -> TargetBelief:
    return TargetBelief(np.full(space.size, 1.0 / space.size))


def initial_belief(space: StateSpace, mode: Union[str, TargetState, Sequence[int]] = "uniform") -> TargetBelief:
    """'uniform' over every state, or a delta at a (cell, direction, velocity) state"""
    if isinstance(mode, str):
        if mode != "uniform":
            raise ConfigurationError(f"unknown initial belief mode {mode!r}")
        return uniform_belief(space)

    state = TargetState(*(int(v) for v in mode))
    space.validate(state)
    probs = np.zeros(space.size)
    probs[space.index(state)] = 1.0
    return TargetBelief(probs)


def predict(b: TargetBelief, T: TransitionTable) -> np.ndarray:
    """Unnormalized predicted belief Σ_t P(t'|t) b(t)"""
    return T.predict(b.probs)


def update(b: TargetBelief, T: TransitionTable, z: Observation, C_next: JointCameraState,
           sensor: SensorModel, target_id: Optional[int] = None) -> Tuple[TargetBelief, float]:
    """Posterior belief and evidence P(z | b, C') for one target"""
    predicted = predict(b, T)
    lik = sensor.likelihood_vector(z, C_next)[T.space.location_of_state]
    weighted = lik * predicted
    evidence = float(weighted.sum())
    if evidence <= 0.0:
        raise BeliefConflictError(z, C_next, target_id)
    return TargetBelief(weighted / evidence), evidence


def joint_posterior(B: JointBelief, T: TransitionTable, Z: Sequence[Observation],
                    C_next: JointCameraState, sensor: SensorModel) -> Tuple[Tuple[TargetBelief, ...], Tuple[float, ...]]:
    if len(Z) != B.n_targets:
        raise ConfigurationError(f"joint observation has {len(Z)} entries for {B.n_targets} targets")
    beliefs, evidences = [], []
    for k, (b, z) in enumerate(zip(B.per_target, Z)):
        posterior, evidence = update(b, T, z, C_next, sensor, target_id=k)
        beliefs.append(posterior)
        evidences.append(evidence)
    return tuple(beliefs), tuple(evidences)


def joint_update(B: JointBelief, T: TransitionTable, Z: Sequence[Observation], A: JointAction,
                 area: SurveillanceArea, sensor: SensorModel) -> JointBelief:
    """Advance the camera state by A, then update every target belief independently"""
    C_next = area.apply_action(B.camera_state, A)
    beliefs, _ = joint_posterior(B, T, Z, C_next, sensor)
    return JointBelief(beliefs, C_next)


def snapshot_record(b: TargetBelief, space: StateSpace, target_id: int, step: int,
                    top_k: Optional[int] = None) -> dict:
    """Structured belief snapshot: full vector, or the top-k entries"""
    record = {"target": target_id, "step": step}
    if top_k is None:
        record["probs"] = [float(p) for p in b.probs]
    else:
        record["top"] = [
            {"cell": t.location, "direction": t.direction, "velocity": t.velocity, "p": p}
            for t, p in b.top_k(space, top_k)
        ]
    record["location_marginal"] = [float(p) for p in b.location_marginal(space)]
    return record


def describe_conflict(err: BeliefConflictError) -> str:
    return (
        f"target {err.target_id}: observation {format_observation(err.observation)} "
        f"impossible at camera state {'-'.join(str(c) for c in err.camera_state)}"
    )
