"""Random-walk distributions on graphs.

The simple walk moves along a uniformly chosen half-edge; the lazy walk
first flips a fair coin to stay put.  Exact mode propagates integer
numerators over a shared denominator and hands back :class:`Fraction`
masses, float mode uses binary64 and tracks mass drift.
"""

from __future__ import annotations

import json
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Hashable, Iterable, Iterator, Literal, Mapping, Union

import numpy as np

from .errors import BudgetExceeded, NumericalError
from .graphs import (
    Graph,
    TowerGraph,
    TreeGraph,
    distances,
    lcm,
    vertex_budget,
)

Mass = Union[Fraction, float]
Mode = Literal["exact", "float"]

FLOAT_TOLERANCE = 1e-9
PRNG_TAG = "numpy.random.PCG64 via SeedSequence(seed, spawn_key=(chunk,)), chunk=4096 trials"
MC_CHUNK = 4096


@dataclass(frozen=True)
class VertexMeasure:
    """Sparse finite measure on vertex labels; zero masses are never stored."""

    masses: Mapping[str, Mass]
    exact: bool = True

    def __post_init__(self) -> None:
        clean = {v: m for v, m in self.masses.items() if m != 0}
        if any(m < 0 for m in clean.values()):
            raise ValueError("masses must be non-negative")
        object.__setattr__(self, "masses", clean)

    def __getitem__(self, v: str) -> Mass:
        return self.masses.get(v, Fraction(0) if self.exact else 0.0)

    def __len__(self) -> int:
        return len(self.masses)

    def __iter__(self) -> Iterator[str]:
        return iter(self.masses)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.masses)

    def total(self) -> Mass:
        return sum(self.masses.values(), Fraction(0) if self.exact else 0.0)

    def mass(self, vertices: Iterable[str]) -> Mass:
        zero: Mass = Fraction(0) if self.exact else 0.0
        return sum((self.masses.get(v, 0) for v in set(vertices)), zero)

    def scaled(self, factor: Fraction | int) -> "VertexMeasure":
        return VertexMeasure({v: m * factor for v, m in self.masses.items()}, self.exact)

    def to_float(self) -> "VertexMeasure":
        return VertexMeasure({v: float(m) for v, m in self.masses.items()}, exact=False)

    @classmethod
    def delta(cls, v: str, exact: bool = True) -> "VertexMeasure":
        return cls({v: Fraction(1) if exact else 1.0}, exact)

    def to_jsonl(self) -> str:
        lines = []
        for v in sorted(self.masses):
            m = self.masses[v]
            if self.exact:
                rec = {"v": v, "mass_num": m.numerator, "mass_den": m.denominator}
            else:
                rec = {"v": v, "mass": float(m)}
            lines.append(json.dumps(rec))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "VertexMeasure":
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
        exact = all("mass_num" in r for r in recs)
        if exact:
            return cls({r["v"]: Fraction(r["mass_num"], r["mass_den"]) for r in recs}, True)
        return cls({r["v"]: float(r["mass"]) for r in recs}, False)


def total_variation(a: Mapping[str, Mass], b: Mapping[str, Mass]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(float(a.get(k, 0)) - float(b.get(k, 0))) for k in keys)


def step(g: Graph, mu: VertexMeasure, lazy: bool = False) -> VertexMeasure:
    """One walk step, ``nu(v) = sum_w m(w, v) mu(w) / deg(w)``."""
    out: dict[str, Mass] = defaultdict(Fraction if mu.exact else float)
    for w, m in mu.masses.items():
        nbrs = g.neighbors(w)
        if lazy:
            out[w] += m / 2
            share = m / (2 * len(nbrs)) if mu.exact else m / (2.0 * len(nbrs))
        else:
            share = m / len(nbrs) if mu.exact else m / float(len(nbrs))
        for u in nbrs:
            out[u] += share
    return VertexMeasure(dict(out), mu.exact)


class _ExactWalk:
    """Integer numerators over one common denominator."""

    def __init__(self, g: Graph, root: str, lazy: bool, budget: int):
        g.neighbors(root)
        self.g, self.lazy, self.budget = g, lazy, budget
        self.num: dict[str, int] = {root: 1}
        self.den = 1

    def advance(self) -> None:
        g = self.g
        degs = {w: g.degree(w) for w in self.num}
        L = lcm(set(degs.values()))
        new: dict[str, int] = defaultdict(int)
        for w, c in self.num.items():
            share = c * (L // degs[w])
            if self.lazy:
                new[w] += c * L
            for u in g.neighbors(w):
                new[u] += share
        self.den *= 2 * L if self.lazy else L
        if len(new) > self.budget:
            raise BudgetExceeded(f"support exceeds {self.budget} vertices")
        common = self.den
        for c in new.values():
            common = gcd(common, c)
            if common == 1:
                break
        if common > 1:
            new = {v: c // common for v, c in new.items()}
            self.den //= common
        self.num = dict(new)

    def measure(self) -> VertexMeasure:
        den = self.den
        return VertexMeasure({v: Fraction(c, den) for v, c in self.num.items()}, True)

    def flatness(self) -> Fraction:
        g = self.g
        best = max(self.num, key=lambda v: Fraction(self.num[v], g.degree(v)))
        return Fraction(self.num[best], self.den * g.degree(best))


class _FloatWalk:
    def __init__(self, g: Graph, root: str, lazy: bool, budget: int):
        g.neighbors(root)
        self.g, self.lazy, self.budget = g, lazy, budget
        self.mu: dict[str, float] = {root: 1.0}

    def advance(self) -> None:
        g = self.g
        new: dict[str, float] = defaultdict(float)
        for w, m in self.mu.items():
            nbrs = g.neighbors(w)
            if self.lazy:
                new[w] += 0.5 * m
                share = 0.5 * m / len(nbrs)
            else:
                share = m / len(nbrs)
            for u in nbrs:
                new[u] += share
        if len(new) > self.budget:
            raise BudgetExceeded(f"support exceeds {self.budget} vertices")
        self.mu = dict(new)
        drift = abs(sum(self.mu.values()) - 1.0)
        if drift > FLOAT_TOLERANCE:
            raise NumericalError(f"mass drift {drift:.3e} exceeds {FLOAT_TOLERANCE}")

    def measure(self) -> VertexMeasure:
        return VertexMeasure(dict(self.mu), False)

    def flatness(self) -> float:
        g = self.g
        return max(m / g.degree(v) for v, m in self.mu.items())


def _walker(g: Graph, root: str, lazy: bool, mode: Mode, budget: int | None):
    cap = vertex_budget(budget)
    if mode == "exact":
        return _ExactWalk(g, root, lazy, cap)
    if mode == "float":
        return _FloatWalk(g, root, lazy, cap)
    raise ValueError(f"unknown arithmetic mode {mode!r}")


def heat_kernel(
    g: Graph,
    root: str,
    n: int,
    lazy: bool = False,
    mode: Mode = "exact",
    budget: int | None = None,
) -> VertexMeasure:
    """Distribution of the ``n``-th step of the walk started at ``root``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    walk = _walker(g, root, lazy, mode, budget)
    for _ in range(n):
        walk.advance()
    return walk.measure()


def heat_kernels(
    g: Graph,
    root: str,
    n_max: int,
    lazy: bool = False,
    mode: Mode = "exact",
    budget: int | None = None,
) -> Iterator[VertexMeasure]:
    """Yield the kernels for ``n = 0, 1, ..., n_max`` in order."""
    walk = _walker(g, root, lazy, mode, budget)
    yield walk.measure()
    for _ in range(n_max):
        walk.advance()
        yield walk.measure()


def uniform_ball_measure(g: Graph, root: str, r: int, budget: int | None = None) -> VertexMeasure:
    ball = distances(g, root, r, budget)
    mass = Fraction(1, len(ball))
    return VertexMeasure({v: mass for v in ball}, True)


@dataclass(frozen=True)
class FlatteningCurve:
    """``values[n] = max_v mu^n(v) / deg(v)``."""

    values: tuple[Mass, ...]
    exact: bool = True

    def is_non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.values, self.values[1:]))

    def violations(self) -> list[int]:
        return [n for n, (a, b) in enumerate(zip(self.values, self.values[1:])) if b > a]


def flattening_curve(
    g: Graph,
    root: str,
    N: int,
    lazy: bool = False,
    mode: Mode = "exact",
    budget: int | None = None,
) -> FlatteningCurve:
    """Flattening sequence ``c_0..c_N``.

    On regular trees the kernel is computed on the radial quotient (spheres
    around the root are orbits of its stabilizer), which is exact and keeps
    ``N = 40`` tractable where the explicit support would be astronomical.
    """
    if isinstance(g, TreeGraph):
        g.neighbors(root)
        chain = radial_tree_chain(g.branching)
        values = tuple(chain.flatness(m) for m in chain.kernels(N, lazy=lazy, exact=mode == "exact"))
    else:
        walk = _walker(g, root, lazy, mode, budget)
        vals = [walk.flatness()]
        for _ in range(N):
            walk.advance()
            vals.append(walk.flatness())
        values = tuple(vals)
    curve = FlatteningCurve(values, mode == "exact")
    if mode == "exact" and not curve.is_non_increasing():
        raise AssertionError(f"flattening sequence increased at n={curve.violations()}")
    return curve


# --------------------------------------------------------------------------
# lumped chains on orbit partitions


@dataclass
class LumpedChain:
    """Walk aggregated over a partition whose classes the walk cannot resolve.

    ``moves(state)`` lists ``(target_state, half_edges)`` for one vertex of
    the class; ``degree(state)`` is the common vertex degree.  When classes
    are orbits of the root stabilizer the per-vertex mass is
    ``class_mass / size(state)``.
    """

    start: Hashable
    moves: Callable[[Any], Iterable[tuple[Any, int]]]
    degree: Callable[[Any], int]
    size: Callable[[Any], int]
    _cache: dict = field(default_factory=dict, repr=False)

    def _moves(self, s):
        out = self._cache.get(s)
        if out is None:
            out = self._cache[s] = tuple(self.moves(s))
        return out

    def kernels(self, n_max: int, lazy: bool = False, exact: bool = True) -> Iterator[dict]:
        """Yield class masses for ``n = 0..n_max``."""
        num: dict = {self.start: 1}
        den = 1
        for n in range(n_max + 1):
            if exact:
                yield {s: Fraction(c, den) for s, c in num.items()}
            else:
                yield {s: c / den for s, c in num.items()}
            if n == n_max:
                return
            L = lcm({self.degree(s) for s in num})
            new: dict = defaultdict(int)
            for s, c in num.items():
                share = c * (L // self.degree(s))
                if lazy:
                    new[s] += c * L
                for t, k in self._moves(s):
                    new[t] += share * k
            den *= 2 * L if lazy else L
            common = den
            for c in new.values():
                common = gcd(common, c)
                if common == 1:
                    break
            num = {s: c // common for s, c in new.items()}
            den //= common

    def flatness(self, masses: Mapping) -> Mass:
        return max(m / (self.size(s) * self.degree(s)) for s, m in masses.items())


def radial_tree_chain(d: int) -> LumpedChain:
    """Spheres around the root of ``T_d``."""

    def moves(r: int):
        return ((1, d),) if r == 0 else ((r - 1, 1), (r + 1, d - 1))

    return LumpedChain(0, moves, lambda r: d, lambda r: 1 if r == 0 else d * (d - 1) ** (r - 1))


def tower_level_chain(g: TowerGraph) -> LumpedChain:
    """Levels of a tower; degree depends on the level only, so levels lump."""

    def degree(k: int) -> int:
        return g.within_degree + (k > 0) + (g.fiber_size(k) if k < g.k_max else 0)

    def moves(k: int):
        out = [(k, g.within_degree)]
        if k > 0:
            out.append((k - 1, 1))
        if k < g.k_max:
            out.append((k + 1, g.fiber_size(k)))
        return out

    return LumpedChain(0, moves, degree, g.level_size)


# --------------------------------------------------------------------------
# Monte Carlo


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(c, min(MC_CHUNK, trials - c * MC_CHUNK)) for c in range((trials + MC_CHUNK - 1) // MC_CHUNK)]


def _walk_chunk(g: Graph, root: str, n: int, seed: int, chunk: int, size: int) -> dict[str, int]:
    u = _chunk_rng(seed, chunk).random((size, n)) if n else None
    counts: dict[str, int] = defaultdict(int)
    nb = g.neighbors
    for t in range(size):
        v = root
        if n:
            row = u[t]
            for i in range(n):
                nbrs = nb(v)
                v = nbrs[int(row[i] * len(nbrs))]
        counts[v] += 1
    return counts


def map_chunks(fn, trials: int, threads: int = 1) -> list:
    """Run ``fn(chunk, size)`` over trial chunks; result order is chunk order."""
    chunks = _chunks(trials)
    if threads <= 1 or len(chunks) == 1:
        return [fn(c, s) for c, s in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda cs: fn(*cs), chunks))


def monte_carlo_kernel(
    g: Graph,
    root: str,
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> VertexMeasure:
    """Empirical law of ``X_n`` over independent simulated walks."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    g.neighbors(root)
    totals: dict[str, int] = defaultdict(int)
    for part in map_chunks(lambda c, s: _walk_chunk(g, root, n, seed, c, s), trials, threads):
        for v, k in part.items():
            totals[v] += k
    return VertexMeasure({v: k / trials for v, k in sorted(totals.items())}, exact=False)
