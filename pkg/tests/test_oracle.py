import pytest

from polycrystal import presets
from polycrystal.models import PathVector, Weight
from polycrystal.modules.graph_ops import GraphFormatError, export_dot, export_json, parse_json
from polycrystal.modules.oracle import (
    bfs_image,
    character,
    character_counts,
    collapse_level,
    degree_counts,
    verify_graph,
    window_stabilization,
)
from polycrystal.modules.zinfty import SequenceCrystal


def crystal_of(preset):
    return SequenceCrystal(preset.datum, preset.iota)


def test_sl2_is_a_chain():
    g = bfs_image(crystal_of(presets.sl2()), 4)
    assert g.nodes() == [PathVector.from_dict({1: n}) if n else PathVector() for n in range(5)]
    assert degree_counts(g) == {0: 1, 1: 1, 2: 1, 3: 1, 4: 1}


def test_zero_parameters_stay_in_two_positions():
    g = bfs_image(crystal_of(presets.rank2(0, 0, 0)), 3, window=6)
    assert len(g) == 10
    assert all(x.max_position() <= 2 for x in g.nodes())
    assert g.window_hits == 0


def test_commuting_imaginary_pair():
    g = bfs_image(crystal_of(presets.all_imaginary(-2, -4, 0)), 3)
    assert degree_counts(g) == {0: 1, 1: 2, 2: 3, 3: 4}


def test_free_imaginary_pair():
    g = bfs_image(crystal_of(presets.all_imaginary(-2, -4, -1)), 3)
    assert degree_counts(g) == {0: 1, 1: 2, 2: 4, 3: 8}


def test_single_imaginary_chain():
    g = bfs_image(crystal_of(presets.single_imaginary()), 3)
    assert degree_counts(g) == {0: 1, 1: 1, 2: 1, 3: 1}


def test_depth_first_order_finds_same_nodes():
    crystal = crystal_of(presets.rank2(2, 1, 1))
    assert bfs_image(crystal, 4, order="depth").node_set() == bfs_image(crystal, 4).node_set()
    with pytest.raises(ValueError):
        bfs_image(crystal, 2, order="sideways")
    with pytest.raises(ValueError):
        bfs_image(crystal, -1)


@pytest.mark.parametrize(
    "preset",
    [presets.rank2(2, 1, 1), presets.rank3(2, 1, 1, 1, 2, 1, 1, 1), presets.monster_toy()],
    ids=["rank2", "rank3", "toy-monster"],
)
def test_enumerated_graph_verifies(preset):
    g = bfs_image(crystal_of(preset), 3)
    assert verify_graph(g).empty


def test_window_hits_are_counted():
    g = bfs_image(crystal_of(presets.rank2(2, 1, 1)), 3, window=2)
    assert g.window_hits > 0


def test_indices_first_seen_past_the_window_are_enumerated():
    # (2,1) first sits at position 7, outside the default window 6
    crystal = crystal_of(presets.monster_toy())
    g = bfs_image(crystal, 2)
    assert g.window == 6
    assert (2, 1) in g.indices
    lifted = crystal.f_tilde(PathVector(), (2, 1))
    assert lifted == PathVector.from_dict({7: 1})
    assert lifted in g
    assert g.window_hits >= 1
    assert character_counts(g)[Weight.from_dict({(2, 1): -1})] == 1


def test_character_rows():
    g = bfs_image(crystal_of(presets.rank2(0, 0, 0)), 3, window=6)
    frame = character(g)
    assert list(frame.columns) == ["degree", "weight", "count"]
    assert frame["count"].sum() == len(g)
    counts = character_counts(g)
    assert counts[Weight.from_dict({1: -1, 2: -1})] == 1
    assert counts[Weight.from_dict({1: -2})] == 1
    assert list(frame["degree"]) == sorted(frame["degree"])


def test_character_collapses_monster_copies():
    g = bfs_image(crystal_of(presets.monster_toy()), 2)
    merged = character_counts(g, collapse_level)
    # x_2 and x_3 carry the two copies of level 1
    assert merged[Weight.from_dict({1: -1})] == 2
    assert character(g, collapse_levels=True)["count"].sum() == len(g)


def test_window_stabilization():
    frame = window_stabilization(crystal_of(presets.rank2(0, 0, 0)), 2, [2, 4, 6])
    assert list(frame.columns) == ["window", "degree", "count", "stable"]
    assert frame["stable"].all()


def test_graph_exports():
    preset = presets.monster_toy()
    g = bfs_image(crystal_of(preset), 2)
    dot = export_dot(g)
    assert dot.startswith("digraph crystal {")
    assert 'label="2_1"' in dot
    back = parse_json(export_json(g))
    assert back.node_set() == g.node_set()
    assert back.edge_set() == g.edge_set()
    assert back.crystal is None
    assert verify_graph(back).empty


def test_parse_json_rejects_bad_documents():
    with pytest.raises(GraphFormatError):
        parse_json("{}")
    bad_edge = '{"depth": 1, "window": 2, "nodes": ["[]"], "edges": [{"src": "[]", "dst": "[1]", "index": 1}]}'
    with pytest.raises(GraphFormatError):
        parse_json(bad_edge)
