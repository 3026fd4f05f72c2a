"""
POMDP Planner - reward, factored one-step value and greedy policy

The value of a joint action is a sum of per-target terms

    V(B, A) = Σ_k Σ_{z ∈ fov(C')} Σ_{t'} R(t', C') b̂'_k(t')

with b̂' the unnormalized posterior. Reward and likelihood depend on t' only
through its location, so the inner sum runs over location marginals of the
predicted belief. value_bruteforce enumerates joint observations instead and
is exponential in the number of targets.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config import config
from controllers.base import Controller, ControllerParams, first_best
from utils.errors import BeliefConflictError, EnumerationLimitError
from world.belief import (JointBelief, TargetBelief, describe_conflict, joint_posterior, predict,
                          snapshot_record, uniform_belief, update)
from world.gridworld import JointAction, JointCameraState, SurveillanceArea
from world.motion import TargetState, TransitionTable
from world.sensing import SensorModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValueReport:
    best_action: JointAction
    best_value: float
    per_action_values: Dict[JointAction, float] = field(repr=False)

    def to_record(self, verbose: bool = False) -> dict:
        record = {
            "best_action": "-".join(str(a) for a in self.best_action),
            "best_value": self.best_value,
        }
        if verbose:
            record["values"] = {
                "-".join(str(a) for a in action): value
                for action, value in self.per_action_values.items()
            }
        return record


def reward_state(t: TargetState, C: JointCameraState, area: SurveillanceArea) -> int:
    return 1 if t.location in area.fov(C) else 0


def reward_belief(b: TargetBelief, C: JointCameraState, area: SurveillanceArea) -> float:
    """Expected number of this target's observations: belief mass inside fov(C)"""
    marginal = b.probs.reshape(area.grid.n_locations, -1).sum(axis=1)
    return float(marginal @ area.fov_mask(C))


def _double_sum(marginals: np.ndarray, C_next: JointCameraState, sensor: SensorModel,
                reward_scale: float = 1.0) -> np.ndarray:
    """Σ_{z ∈ fov(C')} Σ_l R(l, C') P(z | l, C') p(l) for each column p of marginals"""
    _, likelihoods = sensor.observation_matrix(C_next)
    reward = sensor.area.fov_mask(C_next) * reward_scale
    return (likelihoods @ (reward[:, None] * marginals)).sum(axis=0)


def target_value(b: TargetBelief, T: TransitionTable, C_next: JointCameraState,
                 sensor: SensorModel) -> float:
    predicted = predict(b, T)
    marginal = predicted.reshape(T.space.n_locations, -1).sum(axis=1)
    return float(_double_sum(marginal[:, None], C_next, sensor)[0])


def value(B: JointBelief, A: JointAction, T: TransitionTable, area: SurveillanceArea,
          sensor: SensorModel) -> float:
    C_next = area.apply_action(B.camera_state, A)
    return float(sum(target_value(b, T, C_next, sensor) for b in B.per_target))


def value_bruteforce(B: JointBelief, A: JointAction, T: TransitionTable, area: SurveillanceArea,
                     limit: int = config.BRUTEFORCE_LIMIT) -> float:
    """Σ_Z R(B') P(Z | B, A) by enumerating every joint observation.

    Evidence is taken under the normalized null channel; the posteriors are the
    same as under the verbatim one.
    """
    m = B.n_targets
    observations = list(area.grid.free_cells) + [None]
    size = len(observations) ** m
    if size > limit:
        raise EnumerationLimitError(size, limit)

    channel = SensorModel(area, normalize_null=True)
    C_next = area.apply_action(B.camera_state, A)
    total = 0.0
    for Z in itertools.product(observations, repeat=m):
        try:
            posteriors, evidences = joint_posterior(B, T, Z, C_next, channel)
        except BeliefConflictError:
            continue
        reward = sum(reward_belief(b, C_next, area) for b in posteriors)
        total += reward * math.prod(evidences)
    return total


def joint_evidence(B: JointBelief, T: TransitionTable, Z, C_next: JointCameraState,
                   area: SurveillanceArea, normalize_null: bool = True) -> float:
    """P(Z | B, A) computed on the product of the predicted joint belief"""
    channel = SensorModel(area, normalize_null=normalize_null)
    total = 1.0
    for b, z in zip(B.per_target, Z):
        predicted = predict(b, T)
        lik = channel.likelihood_vector(z, C_next)[T.space.location_of_state]
        total *= float(lik @ predicted)
    return total


class Planner:
    """Evaluates every joint action on a factored belief and picks the best"""

    def __init__(self, area: SurveillanceArea, table: TransitionTable, sensor: SensorModel,
                 reward_scale: float = 1.0, tie_tolerance: float = config.TIE_TOLERANCE):
        self.area = area
        self.table = table
        self.sensor = sensor
        self.reward_scale = reward_scale
        self.tie_tolerance = tie_tolerance
        self.actions = area.joint_actions
        self._likelihoods = [sensor.observation_matrix(A)[1] for A in self.actions]
        self._rewards = [area.fov_mask(A) * reward_scale for A in self.actions]

    def evaluate(self, B: JointBelief) -> np.ndarray:
        """V(B, A) for every A in lexicographic order"""
        values = np.zeros(len(self.actions))
        if B.n_targets == 0:
            return values

        predicted = self.table.predict(B.stacked())
        marginals = predicted.reshape(self.table.space.n_locations, -1, B.n_targets).sum(axis=1)
        for i, A in enumerate(self.actions):
            C_next = self.area.apply_action(B.camera_state, A)
            if C_next != A:
                likelihoods = self.sensor.observation_matrix(C_next)[1]
                reward = self.area.fov_mask(C_next) * self.reward_scale
            else:
                likelihoods, reward = self._likelihoods[i], self._rewards[i]
            values[i] = (likelihoods @ (reward[:, None] * marginals)).sum()
        return values

    def plan(self, B: JointBelief) -> ValueReport:
        values = self.evaluate(B)
        best = first_best(values, self.tie_tolerance)
        return ValueReport(
            best_action=self.actions[best],
            best_value=float(values[best]),
            per_action_values={A: float(v) for A, v in zip(self.actions, values)},
        )


class StubPlanner(Planner):
    """Constant work per call whatever the number of targets; bench control case"""

    def __init__(self, area: SurveillanceArea, table: TransitionTable, sensor: SensorModel, **kwargs):
        super().__init__(area, table, sensor, **kwargs)
        self._fixed = JointBelief((uniform_belief(table.space),), area.initial_state())

    def evaluate(self, B: JointBelief) -> np.ndarray:
        return super().evaluate(JointBelief(self._fixed.per_target, B.camera_state))


def plan(B: JointBelief, T: TransitionTable, area: SurveillanceArea, sensor: SensorModel,
         reward_scale: float = 1.0) -> ValueReport:
    return Planner(area, T, sensor, reward_scale=reward_scale).plan(B)


def plan_bruteforce(B: JointBelief, T: TransitionTable, area: SurveillanceArea,
                    tie_tolerance: float = 1e-9) -> ValueReport:
    """Exponential-time reference policy over value_bruteforce"""
    actions = area.joint_actions
    values = np.array([value_bruteforce(B, A, T, area) for A in actions])
    best = first_best(values, tie_tolerance)
    return ValueReport(actions[best], float(values[best]),
                       {A: float(v) for A, v in zip(actions, values)})


class POMDPController(Controller):
    """Tracks one belief per target and plans one step ahead on them"""

    name = "pomdp"

    def __init__(self, area: SurveillanceArea, table: TransitionTable, sensor: SensorModel,
                 params: Optional[ControllerParams] = None, planner: Optional[Planner] = None):
        super().__init__(area, table, sensor, params)
        self.planner = planner or Planner(area, table, sensor)
        self.belief = JointBelief((), self.camera_state)
        self._report: Optional[ValueReport] = None
        self.conflicts = 0

    def reset(self, n_targets, rng=None):
        C = super().reset(n_targets, rng)
        prior = uniform_belief(self.table.space)
        self.belief = JointBelief(tuple(prior for _ in range(n_targets)), C)
        self._report = None
        self.conflicts = 0
        return C

    def choose(self, step: int) -> JointAction:
        self._report = self.planner.plan(self.belief)
        return self._report.best_action

    def observe(self, step, observations, camera_state, truth):
        super().observe(step, observations, camera_state, truth)
        beliefs = []
        for k, (b, z) in enumerate(zip(self.belief.per_target, observations)):
            try:
                posterior, _ = update(b, self.table, z, self.camera_state, self.sensor, target_id=k)
            except BeliefConflictError as err:
                self.conflicts += 1
                logger.warning(f"⚠️ Belief conflict at step {step}, {describe_conflict(err)}; reset to uniform")
                posterior = uniform_belief(self.table.space)
            beliefs.append(posterior)
        self.belief = JointBelief(tuple(beliefs), self.camera_state)

    def belief_records(self, step: int, top_k: Optional[int] = None) -> List[dict]:
        return [
            snapshot_record(b, self.table.space, k, step, top_k)
            for k, b in enumerate(self.belief.per_target)
        ]

    @property
    def last_report(self) -> Optional[ValueReport]:
        return self._report
