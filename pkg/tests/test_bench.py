import itertools

import pytest

from processors.bench import check_m_values, endpoint_ratio, linear_fit, scaling_bench, time_plan
from processors.scenario import Scenario
from utils.errors import ConfigurationError
from world.gridworld import CameraModel, GridMap
from world.motion import MotionParams


@pytest.fixture
def small_scenario():
    return Scenario(
        name="bench",
        grid=GridMap(4, 3),
        cameras=(CameraModel(0, (frozenset({0, 1}), frozenset({10, 11}))),),
        motion=MotionParams(velocities=(1.0,)),
        targets=1,
        tau=1,
    )


def fake_timer(step=0.002):
    """Each call advances by step seconds, so every timed call lasts exactly step"""
    ticks = itertools.count()
    return lambda: next(ticks) * step


def test_check_m_values():
    assert check_m_values([5, 10, 20]) == [5, 10, 20]
    with pytest.raises(ConfigurationError, match="at least 3"):
        check_m_values([5, 10])
    with pytest.raises(ConfigurationError, match="ascending"):
        check_m_values([5, 20, 10])
    with pytest.raises(ConfigurationError, match=">= 1"):
        check_m_values([0, 5, 10])


def test_linear_fit_recovers_a_line():
    slope, intercept, r_squared, residuals = linear_fit([5, 10, 20, 40], [1.5, 2.0, 3.0, 5.0])
    assert slope == pytest.approx(0.1)
    assert intercept == pytest.approx(1.0)
    assert r_squared == pytest.approx(1.0)
    assert max(abs(r) for r in residuals) < 1e-12


def test_linear_fit_on_constant_runtimes():
    slope, _, r_squared, _ = linear_fit([5, 10, 20], [2.0, 2.0, 2.0])
    assert slope == pytest.approx(0.0)
    assert 0.0 <= r_squared <= 1.0


def test_endpoint_ratio():
    assert endpoint_ratio([5, 10, 20, 40], [1.0, 2.0, 4.0, 8.0]) == 8.0 / 2.0
    # 30 / 4 is not a benchmarked point, so the smallest m is the reference
    assert endpoint_ratio([5, 10, 30], [1.0, 2.0, 6.0]) == 6.0


def test_time_plan_drops_first_repeat(small_scenario):
    from processors.simulator import build_world
    from controllers.planner import Planner
    from world.belief import JointBelief, uniform_belief

    world = build_world(small_scenario)
    planner = Planner(world.area, world.table, world.sensor)
    belief = JointBelief((uniform_belief(world.table.space),), (0,))
    durations = iter([0.0, 5.0, 5.0, 5.1, 5.1, 5.2, 5.2, 5.3])  # start/stop pairs
    assert time_plan(planner, belief, 4, timer=lambda: next(durations)) == pytest.approx(0.1)


def test_scaling_bench_with_constant_timer(small_scenario):
    calls = []
    report = scaling_bench(small_scenario, [1, 2, 4, 8], repeats=3, timer=fake_timer(),
                           progress=lambda i, n: calls.append((i, n)))
    assert report.m_values == [1, 2, 4, 8]
    assert report.runtimes == pytest.approx([0.002] * 4)
    assert report.slope == pytest.approx(0.0, abs=1e-12)
    assert report.endpoint_ratio == pytest.approx(1.0)
    assert calls == [(1, 4), (2, 4), (3, 4), (4, 4)]

    doc = report.to_dict()
    assert doc["planner"] == "factored"
    assert [row["m"] for row in doc["rows"]] == [1, 2, 4, 8]
    assert set(doc["fit"]) == {"slope", "intercept", "r_squared", "residuals"}


def test_scaling_bench_validation(small_scenario):
    with pytest.raises(ConfigurationError, match="repeats"):
        scaling_bench(small_scenario, [1, 2, 3], repeats=1)
    report = scaling_bench(small_scenario, [1, 2, 3], repeats=2, stub=True)
    assert report.planner == "stub"
    assert all(t >= 0 for t in report.runtimes)
