"""Acceptance-scale runs on the junction map; run with `pytest -m slow`"""
import pytest

from config import config
from controllers import CONTROLLER_NAMES
from processors.bench import scaling_bench
from processors.metrics import aggregate, summarize
from processors.scenario import load_scenario
from processors.simulator import build_world, run

pytestmark = pytest.mark.slow

SEEDS = range(1, 21)


@pytest.fixture(scope="module")
def junction():
    return load_scenario(config.SCENARIO_DIR / "junction.scn").replace(tau=100)


def test_plan_runtime_is_linear_in_targets(junction):
    report = scaling_bench(junction, [5, 10, 20, 40], repeats=11)
    assert all(t > 0 for t in report.runtimes)
    assert report.r_squared >= 0.95
    assert report.endpoint_ratio <= 5.0


def _mean_percent_obs(scenario, controller, world):
    scenario = scenario.replace(controller=controller)
    return aggregate([summarize(run(scenario, seed=seed, world=world)) for seed in SEEDS]).mean


@pytest.mark.parametrize("m", [5, 10, 20])
def test_pomdp_beats_sweeping_and_parked_cameras(junction, m):
    scenario = junction.replace(targets=m)
    world = build_world(scenario)
    means = {name: _mean_percent_obs(scenario, name, world) for name in ("pomdp", "sys", "stat")}
    assert means["pomdp"] >= means["sys"]
    assert means["pomdp"] >= means["stat"]


def test_pomdp_beats_point_estimates_under_occlusion(junction):
    scenario = junction.replace(targets=10)
    world = build_world(scenario)
    assert _mean_percent_obs(scenario, "pomdp", world) >= _mean_percent_obs(scenario, "mp", world)


def test_every_controller_runs_on_junction(junction):
    scenario = junction.replace(targets=3, tau=5)
    world = build_world(scenario)
    digests = {run(scenario.replace(controller=name), seed=1, world=world).truth_digest() for name in CONTROLLER_NAMES}
    assert len(digests) == 1
