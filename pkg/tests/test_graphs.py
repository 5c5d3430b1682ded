import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab.errors import DisconnectedError, FormatError, InvalidVertex, SpecError, BudgetExceeded
from heatlab.graphs import (
    CycleTower,
    FreeGroup,
    GeneratorSpec,
    HalfLine,
    Lattice,
    RegularTree,
    SL2Tower,
    ball,
    complete_graph,
    distances,
    dump_edge_list,
    from_edges,
    load_edge_list,
    make_generator,
    petersen_graph,
    random_graph,
    regular_tree_ball_size,
)


def test_lattice_neighbors():
    assert Lattice(1).neighbors("0") == ("1", "-1")
    assert sorted(Lattice(2).neighbors("0,0")) == ["-1,0", "0,-1", "0,1", "1,0"]


def test_tree_neighbors_and_letters():
    t = RegularTree(3)
    assert t.neighbors("") == ("a", "b", "c")
    assert sorted(t.neighbors("ab")) == ["a", "aba", "abc"]
    with pytest.raises(InvalidVertex):
        t.neighbors("aa")


def test_free_group_neighbors():
    f = FreeGroup(2)
    assert set(f.neighbors("a")) == {"aa", "ab", "", "aB"}
    with pytest.raises(InvalidVertex):
        f.neighbors("aA")


def test_cycle_tower_neighbors():
    g = CycleTower(2, 3)
    assert g.neighbors("1:0") == ("1:1", "1:1", "0:0", "2:0", "2:2")
    # level 0 is Z/1: both within-level half-edges are a loop
    assert g.neighbors("0:0") == ("0:0", "0:0", "1:0", "1:1")
    with pytest.raises(InvalidVertex):
        g.neighbors("4:0")


def test_sl2_tower_level_sizes():
    g = SL2Tower(3, 2)
    assert len(g.elements(1)) == 24 == g.level_size(1)
    assert g.fiber_size(0) == 24
    assert g.fiber_size(1) == 27
    assert g.degree("1:1,0,0,1") == 4 + 1 + 27


def test_half_line():
    h = HalfLine()
    assert h.degree("0") == 1
    assert h.neighbors("3") == ("2", "4")
    with pytest.raises(InvalidVertex):
        h.neighbors("-1")


def test_edge_list_triangle_and_loop(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text("# triangle\na b 1\nb c\nc a 1\n")
    g = load_edge_list(p)
    assert sorted(g.degree(v) for v in g.vertices) == [2, 2, 2]
    q = tmp_path / "loop.txt"
    q.write_text("a a 1\n")
    assert load_edge_list(q).degree("a") == 2


def test_edge_list_header_and_errors(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text('{"max_degree": 1}\na b\nb c\n')
    with pytest.raises(FormatError):
        load_edge_list(p)
    p.write_text("a b\nc d\n")
    with pytest.raises(DisconnectedError) as info:
        load_edge_list(p)
    assert info.value.components == 2
    p.write_text("a b 2\nb a 1\n")
    with pytest.raises(FormatError):
        load_edge_list(p, symmetrize=False)
    p.write_text("a b x\n")
    with pytest.raises(FormatError):
        load_edge_list(p)


def test_petersen_round_trip(tmp_path):
    g = petersen_graph()
    assert len(g) == 10 and all(g.degree(v) == 3 for v in g.vertices)
    p = tmp_path / "pet.txt"
    dump_edge_list(g, p)
    h = load_edge_list(p)
    assert {v: Counter(h.neighbors(v)) for v in h.vertices} == {v: Counter(g.neighbors(v)) for v in g.vertices}


def test_generator_specs():
    assert isinstance(make_generator({"family": "lattice", "dim": 2}), Lattice)
    spec = GeneratorSpec.from_dict({"family": "cycle-tower", "p": 2, "k_max": 3})
    assert spec.to_dict() == {"family": "cycle-tower", "p": 2, "k_max": 3}
    with pytest.raises(SpecError):
        make_generator({"family": "nope"})
    with pytest.raises(SpecError):
        make_generator({"family": "lattice", "dim": 0})


def test_budget_exceeded(monkeypatch):
    monkeypatch.setenv("HEATLAB_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        distances(RegularTree(3), "", 10)


@pytest.mark.parametrize("d", [3, 4, 5])
@pytest.mark.parametrize("r", range(0, 9))
def test_tree_ball_closed_form(d, r):
    assert len(distances(RegularTree(d), "", r)) == regular_tree_ball_size(d, r)


def test_free_group_ball_matches_tree():
    # F_2 is 4-regular, so its balls match T_4
    for r in range(6):
        assert len(distances(FreeGroup(2), "", r)) == regular_tree_ball_size(4, r)


graph_strategy = st.builds(
    lambda n, e, s, loops, multi: random_graph(n, e, s, loops=loops, multi=multi),
    st.integers(1, 12),
    st.integers(0, 15),
    st.integers(0, 10**6),
    st.booleans(),
    st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(graph_strategy)
def test_random_graph_symmetric_and_bounded(g):
    for v in g.vertices:
        cnt = Counter(g.neighbors(v))
        assert cnt[v] % 2 == 0
        assert g.degree(v) <= g.max_degree
        for w, m in cnt.items():
            if w != v:
                assert Counter(g.neighbors(w))[v] == m


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["lattice1", "lattice2", "tree3", "free2", "tower"]), st.integers(0, 4))
def test_balls_are_nested(name, r):
    g, o = {
        "lattice1": (Lattice(1), "0"),
        "lattice2": (Lattice(2), "0,0"),
        "tree3": (RegularTree(3), ""),
        "free2": (FreeGroup(2), ""),
        "tower": (CycleTower(2, 5), "0:0"),
    }[name]
    small = set(ball(g, o, r).graph.vertices)
    big = set(ball(g, o, r + 1).graph.vertices)
    assert small <= big


@settings(max_examples=50)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=3))
def test_lattice_label_round_trip(point):
    g = Lattice(len(point))
    label = Lattice.label(point)
    assert g.parse(label) == tuple(point)
    assert g.multiply(label, g.inverse(label)) == g.identity


@settings(max_examples=50)
@given(st.lists(st.sampled_from("abcd"), max_size=8))
def test_tree_words_round_trip(letters):
    t = RegularTree(4)
    w = ""
    for ch in letters:
        w = t.multiply(w, ch)
    assert t.contains(w)
    assert t.multiply(w, t.inverse(w)) == ""
    assert len(distances(t, "", len(w))) >= 1
    assert distances(t, "", len(w) + 1).get(w) == len(w)


def test_from_edges_loop_degree():
    g = from_edges([("a", "a", 1), ("a", "b", 2)])
    assert g.degree("a") == 4 and g.degree("b") == 2
    assert list(g.edges()) == [("a", "a", 1), ("a", "b", 2)]


def test_complete_graph_json_spec():
    assert json.loads(json.dumps(complete_graph(4).spec())) == {"family": "finite", "vertices": 4}
