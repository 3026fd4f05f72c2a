import json

import numpy as np
import pytest
from PIL import Image

from storage import OutputStore, TableCache, atomic_write_bytes
from world.gridworld import GridMap
from world.motion import MotionParams, build_transition_table, transition_table_key


def test_write_json_is_sorted_and_recorded(tmp_path):
    store = OutputStore(tmp_path / "out")
    path = store.write_json("doc.json", {"b": 1, "a": [1, 2]})
    assert path.read_text().startswith('{\n  "a": [')
    assert json.loads(path.read_text()) == {"a": [1, 2], "b": 1}
    assert store.written == [path]


def test_write_jsonl(tmp_path):
    store = OutputStore(tmp_path)
    path = store.write_jsonl("rows.jsonl", [{"step": 0, "x": 1}, {"step": 1}])
    assert path.read_text().splitlines() == ['{"step":0,"x":1}', '{"step":1}']
    assert store.write_jsonl("empty.jsonl", []).read_text() == ""


def test_write_table_with_footer(tmp_path):
    store = OutputStore(tmp_path)
    path = store.write_table("t.csv", ["step", "obs"], [{"step": 0, "obs": "phi"}, {"step": 1, "obs": 4}],
                             footer={"m_obs": "0,1", "seed": "7"})
    assert path.read_text() == "step,obs\n0,phi\n1,4\n# m_obs: 0,1\n# seed: 7\n"


def test_atomic_write_replaces_without_leftovers(tmp_path):
    target = tmp_path / "nested" / "file.bin"
    atomic_write_bytes(target, b"one")
    atomic_write_bytes(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in target.parent.iterdir()] == ["file.bin"]


def test_save_image(tmp_path):
    store = OutputStore(tmp_path)
    path = store.save_image("snap.png", Image.new("RGB", (8, 4)))
    with Image.open(path) as image:
        assert image.size == (8, 4)


def test_table_cache_round_trip(tmp_path):
    grid = GridMap(4, 3, frozenset({5}))
    params = MotionParams()
    cache = TableCache(tmp_path)
    built = cache.load_or_build(grid, params)
    assert cache.load_or_build(grid, params) is built
    files = list(tmp_path.glob("transition_*.npz"))
    assert [f.name for f in files] == [f"transition_{transition_table_key(grid, params)}.npz"]

    fresh = TableCache(tmp_path)
    loaded = fresh.load_or_build(grid, params)
    assert loaded is not built
    assert (loaded.matrix != built.matrix).nnz == 0
    np.testing.assert_allclose(loaded.row_sums(), 1.0, atol=1e-9)


def test_table_cache_rebuilds_unreadable_file(tmp_path, caplog):
    grid = GridMap(3, 3)
    params = MotionParams(velocities=(1.0,))
    key = transition_table_key(grid, params)
    (tmp_path / f"transition_{key}.npz").write_bytes(b"not a table")

    table = TableCache(tmp_path).load_or_build(grid, params)
    expected = build_transition_table(grid, params)
    assert (table.matrix != expected.matrix).nnz == 0
    assert "Ignoring unreadable cached table" in caplog.text


def test_memory_only_cache_writes_nothing(tmp_path):
    cache = TableCache(None)
    cache.load_or_build(GridMap(2, 2), MotionParams())
    assert list(tmp_path.iterdir()) == []
    cache.clear_memory()


@pytest.mark.parametrize("velocities", [(1.0,), (1.0, 1.5, 2.0)])
def test_cache_key_tracks_motion(velocities):
    grid = GridMap(3, 3)
    assert transition_table_key(grid, MotionParams(velocities=velocities)) != transition_table_key(
        grid, MotionParams(velocities=velocities, sigma_d=10.0))
