from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab.errors import BudgetExceeded
from heatlab.graphs import CycleTower, HalfLine, Lattice, RegularTree, random_graph, star_graph
from heatlab.heat import (
    VertexMeasure,
    flattening_curve,
    heat_kernel,
    heat_kernels,
    monte_carlo_kernel,
    radial_tree_chain,
    step,
    total_variation,
    tower_level_chain,
)
from oracles import half_line_kernels, z_kernel


def test_t3_two_steps_root_mass():
    mu = heat_kernel(RegularTree(3), "", 2)
    assert mu[""] == Fraction(1, 3)
    assert mu["ab"] == Fraction(1, 9)
    assert mu.total() == 1


@pytest.mark.parametrize("n", range(0, 13))
def test_z_matches_binomial(n):
    mu = heat_kernel(Lattice(1), "0", n)
    for x in range(-n - 1, n + 2):
        assert mu[str(x)] == z_kernel(n, x)


def test_half_line_matches_propagation():
    ref = half_line_kernels(30)
    for n, mu in enumerate(heat_kernels(HalfLine(), "0", 30)):
        assert {int(v): m for v, m in mu.masses.items()} == {x: m for x, m in ref[n].items() if m}


def test_lazy_walk_on_star():
    mu = heat_kernel(star_graph(3), "0", 1, lazy=True)
    assert mu["0"] == Fraction(1, 2)
    assert mu["1"] == Fraction(1, 6)


def test_loops_count_twice():
    g = CycleTower(2, 3)
    mu = heat_kernel(g, "0:0", 1)
    assert mu["0:0"] == Fraction(1, 2)
    assert mu["1:0"] == mu["1:1"] == Fraction(1, 4)


def test_float_mode_agrees_with_exact():
    g = RegularTree(4)
    a = heat_kernel(g, "", 6)
    b = heat_kernel(g, "", 6, mode="float")
    assert total_variation(a.masses, b.masses) < 1e-12


def test_budget_stops_propagation():
    with pytest.raises(BudgetExceeded):
        heat_kernel(RegularTree(3), "", 12, budget=1000)


def test_jsonl_round_trip():
    mu = heat_kernel(Lattice(2), "0,0", 3)
    assert VertexMeasure.from_jsonl(mu.to_jsonl()) == mu
    fl = mu.to_float()
    back = VertexMeasure.from_jsonl(fl.to_jsonl())
    assert not back.exact and back.masses == fl.masses


def test_monte_carlo_deterministic_and_thread_independent():
    g = RegularTree(3)
    a = monte_carlo_kernel(g, "", 6, 10_000, seed=5)
    b = monte_carlo_kernel(g, "", 6, 10_000, seed=5, threads=4)
    assert a.masses == b.masses
    assert a.masses != monte_carlo_kernel(g, "", 6, 10_000, seed=6).masses
    assert total_variation(a.masses, heat_kernel(g, "", 6).masses) < 0.05


def test_flattening_on_z_and_tree():
    assert flattening_curve(Lattice(1), "0", 4).values == (
        Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), Fraction(3, 16), Fraction(3, 16)
    )
    assert flattening_curve(RegularTree(3), "", 2).values == (Fraction(1, 3), Fraction(1, 9), Fraction(1, 9))


def test_radial_chain_matches_explicit_tree():
    t = RegularTree(4)
    chain = radial_tree_chain(4)
    for n, classes in enumerate(chain.kernels(7)):
        mu = heat_kernel(t, "", n)
        for r, m in classes.items():
            assert sum(x for v, x in mu.masses.items() if len(v) == r) == m


def test_tower_chain_matches_explicit():
    g = CycleTower(2, 4)
    chain = tower_level_chain(g)
    for n, levels in enumerate(chain.kernels(8)):
        mu = heat_kernel(g, "0:0", n)
        agg = {}
        for v, m in mu.masses.items():
            agg[g.level(v)] = agg.get(g.level(v), 0) + m
        assert agg == levels


graphs = st.builds(lambda n, e, s: random_graph(n, e, s, loops=True, multi=True), st.integers(2, 10), st.integers(0, 12), st.integers(0, 10**6))


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 8), st.booleans())
def test_mass_conservation(g, n, lazy):
    assert heat_kernel(g, g.vertices[0], n, lazy=lazy).total() == 1


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 6))
def test_reversibility(g, n):
    o, v = g.vertices[0], g.vertices[-1]
    lhs = heat_kernel(g, o, n)[v] / g.degree(v)
    rhs = heat_kernel(g, v, n)[o] / g.degree(o)
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.sampled_from([(Lattice(2), "0,0"), (RegularTree(3), ""), (Lattice(1), "0")]))
def test_bipartite_parity(n, case):
    g, o = case
    dist = {v: len(v) if o == "" else sum(abs(int(x)) for x in v.split(",")) for v in heat_kernel(g, o, n).support}
    assert all(d % 2 == n % 2 and d <= n for d in dist.values())


@settings(max_examples=25, deadline=None)
@given(graphs, st.integers(1, 5))
def test_step_matches_propagation(g, n):
    o = g.vertices[0]
    assert step(g, heat_kernel(g, o, n - 1)) == heat_kernel(g, o, n)
    assert step(g, heat_kernel(g, o, n - 1, lazy=True), lazy=True) == heat_kernel(g, o, n, lazy=True)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_monte_carlo_close_on_random_graphs(seed):
    g = random_graph(8, 6, seed)
    exact = heat_kernel(g, g.vertices[0], 5)
    mc = monte_carlo_kernel(g, g.vertices[0], 5, 20_000, seed=seed)
    assert total_variation(exact.masses, mc.masses) < 0.03


def test_monte_carlo_tree_tv_shrinks_with_trials():
    # Sampling noise on 2047 atoms: E[TV] ~ 0.028 at 1e5 trials, ~ 0.014 at 4e5.
    g = RegularTree(3)
    exact = heat_kernel(g, "", 10)
    mc = monte_carlo_kernel(g, "", 10, 400_000, seed=1)
    assert total_variation(exact.masses, mc.masses) <= 0.02
