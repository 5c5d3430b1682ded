"""Canonical rooted-ball codes and Cesaro rerooting measures.

``ball_type_code`` canonizes the induced radius-``r`` ball around a root.
Balls whose simple graph is a tree get an AHU code.  Others go through
individualization-refinement: colour refinement from the root (and the
optional decoration), then a depth-first search over individualizations of
the first smallest non-singleton cell.  The code is the lexicographically
least leaf encoding.  Automorphisms discovered as equal leaves prune the
search, which keeps highly symmetric tree balls cheap.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .graphs import Graph, ball
from .heat import _chunk_rng, heat_kernels, map_chunks

Decoration = Callable[[str], bool]
ALGORITHM_TAG = "ir-refine-v1"


# --------------------------------------------------------------------------
# canonical codes


def _rank(keys: list) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


class _Canonizer:
    def __init__(self, n: int, nbrs: list[list[tuple[int, int]]], init: list):
        self.n = n
        self.nbrs = nbrs
        self.init = init
        self.best: tuple | None = None
        self.best_path: list[int] = []
        self.best_order: list[int] = []
        self.first: tuple | None = None
        self.first_order: list[int] = []
        self.first_path: list[int] = []
        self.autos: list[list[int]] = []

    def refine(self, colors: list[int]) -> list[int]:
        count = len(set(colors))
        while True:
            sig = [
                (colors[v], tuple(sorted((colors[w], m) for w, m in self.nbrs[v])))
                for v in range(self.n)
            ]
            colors = _rank(sig)
            new = len(set(colors))
            if new == count:
                return colors
            count = new

    def encode(self, colors: list[int]) -> tuple[tuple, list[int]]:
        order = sorted(range(self.n), key=colors.__getitem__)
        pos = colors
        attrs = tuple(self.init[v] for v in order)
        edges = tuple(sorted(
            (pos[v], pos[w], m) for v in range(self.n) for w, m in self.nbrs[v] if pos[v] <= pos[w]
        ))
        return (attrs, edges), order

    def search(self, colors: list[int], path: list[int]) -> int | None:
        colors = self.refine(colors)
        cells: dict[int, list[int]] = defaultdict(list)
        for v, c in enumerate(colors):
            cells[c].append(v)
        if len(cells) == self.n:
            return self.leaf(colors, path)
        size = min(len(c) for c in cells.values() if len(c) > 1)
        target = next(cells[c] for c in sorted(cells) if len(cells[c]) == size)
        depth = len(path)
        done: list[int] = []
        for v in target:
            if done and self._same_orbit(v, done, path):
                continue
            indiv = [2 * c + (1 if c == colors[v] and u != v else 0) for u, c in enumerate(colors)]
            jump = self.search(indiv, path + [v])
            done.append(v)
            if jump is not None and jump < depth:
                return jump
        return None

    def _same_orbit(self, v: int, done: list[int], path: list[int]) -> bool:
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for pi in self.autos:
            if all(pi[p] == p for p in path):
                for x in range(self.n):
                    a, b = find(x), find(pi[x])
                    if a != b:
                        parent[a] = b
        root = find(v)
        return any(find(u) == root for u in done)

    def leaf(self, colors: list[int], path: list[int]) -> int | None:
        enc, order = self.encode(colors)
        if self.first is None:
            self.first, self.first_order, self.first_path = enc, order, list(path)
            self.best, self.best_path, self.best_order = enc, list(path), order
            return None
        if enc == self.first:
            return self._automorphism(self.first_order, order, path, self.first_path)
        if enc == self.best:
            return self._automorphism(self.best_order, order, path, self.best_path)
        if enc < self.best:
            self.best, self.best_path, self.best_order = enc, list(path), order
        return None

    def _automorphism(self, ref: list[int], order: list[int], path: list[int], other: list[int]) -> int:
        pi = [0] * self.n
        for a, b in zip(ref, order):
            pi[a] = b
        self.autos.append(pi)
        common = 0
        while common < min(len(path), len(other)) and path[common] == other[common]:
            common += 1
        return common


def _tree_code(v: int, parent: int, nbrs: list[list[tuple[int, int]]], init: list) -> str:
    """AHU code; balls are connected, so ``n - 1`` simple edges means a tree."""
    _, dec, loops = init[v]
    kids = sorted(f"{m}*{_tree_code(w, v, nbrs, init)}" for w, m in nbrs[v] if w != parent)
    return f"({int(dec)}{loops}:{','.join(kids)})"


@dataclass(frozen=True, order=True)
class BallType:
    code: str

    def __str__(self) -> str:
        return self.code


def ball_type_code(
    g: Graph,
    root: str,
    r: int,
    decoration: Decoration | None = None,
    budget: int | None = None,
) -> BallType:
    """Canonical code of the rooted (decorated) radius-``r`` ball."""
    fg = ball(g, root, r, budget).graph
    verts = fg.vertices
    index = {v: i for i, v in enumerate(verts)}
    nbrs: list[list[tuple[int, int]]] = []
    init = []
    for v in verts:
        counts: dict[int, int] = defaultdict(int)
        for w in fg.neighbors(v):
            counts[index[w]] += 1
        loops = counts.pop(index[v], 0) // 2
        nbrs.append(sorted(counts.items()))
        init.append((v != root, bool(decoration(v)) if decoration else False, loops))
    simple_edges = sum(len(x) for x in nbrs) // 2
    if simple_edges == len(verts) - 1:
        return BallType(f"r{r}|t" + _tree_code(index[root], -1, nbrs, init))
    canon = _Canonizer(len(verts), nbrs, init)
    canon.search(_rank(init), [])
    attrs, edges = canon.best
    parts = [f"r{r}", f"n{len(verts)}"]
    parts.append("v" + ".".join(f"{int(d)}{lp}" for _, d, lp in attrs))
    parts.append("e" + ".".join(f"{a}-{b}x{m}" for a, b, m in edges))
    return BallType("|".join(parts))


# --------------------------------------------------------------------------
# Cesaro measures


@dataclass
class TypeDistribution:
    probs: dict[str, float]
    counts: dict[str, int]
    sample_count: int
    radius: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], radius: int, **meta) -> "TypeDistribution":
        total = sum(counts.values())
        keys = sorted(k for k, c in counts.items() if c > 0)
        return cls(
            {k: counts[k] / total for k in keys},
            {k: counts[k] for k in keys},
            total,
            radius,
            dict(meta),
        )

    def __post_init__(self) -> None:
        if self.probs and abs(math.fsum(self.probs.values()) - 1) > 1e-12:
            raise ValueError("type probabilities do not sum to 1")
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("type counts must be positive")

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"code": k, "p": self.probs[k], "count": self.counts[k]}) + "\n"
            for k in sorted(self.probs)
        )

    @classmethod
    def from_jsonl(cls, text: str, radius: int) -> "TypeDistribution":
        counts = {}
        for line in text.splitlines():
            if line.strip():
                rec = json.loads(line)
                counts[rec["code"]] = int(rec["count"])
        return cls.from_counts(counts, radius)


def type_tv(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    return 0.5 * math.fsum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))


class _CodeCache:
    def __init__(self, g: Graph, r: int, decoration: Decoration | None, budget: int | None):
        self.g, self.r, self.decoration, self.budget = g, r, decoration, budget
        self.memo: dict[str, str] = {}

    def __call__(self, v: str) -> str:
        code = self.memo.get(v)
        if code is None:
            code = self.memo[v] = ball_type_code(self.g, v, self.r, self.decoration, self.budget).code
        return code


def _pair_chunk(g: Graph, root: str, N: int, seed: int, chunk: int, size: int):
    """Endpoints ``(X_k, X_{k+1})`` with ``k`` uniform in ``0..N-1``."""
    rng = _chunk_rng(seed, chunk)
    ks = rng.integers(0, N, size=size)
    u = rng.random((size, N))
    nb = g.neighbors
    out = []
    for t in range(size):
        v = root
        row = u[t]
        k = int(ks[t])
        for i in range(k):
            nbrs = nb(v)
            v = nbrs[int(row[i] * len(nbrs))]
        here = v
        nbrs = nb(v)
        out.append((here, nbrs[int(row[k] * len(nbrs))]))
    return out


def _sample(g, root, N, r, trials, seed, decoration, threads, budget):
    if N < 1 or trials < 1:
        raise ValueError("N and trials must be at least 1")
    g.neighbors(root)
    cache = _CodeCache(g, r, decoration, budget)
    base: dict[str, int] = defaultdict(int)
    moved: dict[str, int] = defaultdict(int)
    for part in map_chunks(lambda c, s: _pair_chunk(g, root, N, seed, c, s), trials, threads):
        for a, b in part:
            base[cache(a)] += 1
            moved[cache(b)] += 1
    meta = {"N": N, "trials": trials, "seed": seed, "algorithm": ALGORITHM_TAG}
    return TypeDistribution.from_counts(base, r, **meta), TypeDistribution.from_counts(moved, r, **meta)


def cesaro_distribution(
    g: Graph,
    root: str,
    N: int,
    r: int,
    trials: int,
    seed: int,
    decoration: Decoration | None = None,
    threads: int = 1,
    budget: int | None = None,
) -> TypeDistribution:
    """Monte Carlo estimate of the Cesaro average of heat kernels, pushed to ball types."""
    return _sample(g, root, N, r, trials, seed, decoration, threads, budget)[0]


def stationarity_deficit(
    g: Graph,
    root: str,
    N: int,
    r: int,
    trials: int,
    seed: int,
    decoration: Decoration | None = None,
    threads: int = 1,
    budget: int | None = None,
) -> tuple[float, float]:
    """TV between the Cesaro type law and its one-step rerooting, with ``1/N + 3 sqrt(#types/trials)``.

    Both laws come from the same simulated walks: each trial records the
    type at ``X_k`` and at ``X_{k+1}``.
    """
    base, moved = _sample(g, root, N, r, trials, seed, decoration, threads, budget)
    types = len(set(base.probs) | set(moved.probs))
    return type_tv(base.probs, moved.probs), 1 / N + 3 * math.sqrt(types / trials)


def exact_cesaro_distribution(
    g: Graph,
    root: str,
    N: int,
    r: int,
    decoration: Decoration | None = None,
    budget: int | None = None,
) -> dict[str, Fraction]:
    """Exact ``(1/N) sum_{k<N} mu^k`` pushed to ball types (for linear-growth graphs)."""
    cache = _CodeCache(g, r, decoration, budget)
    out: dict[str, Fraction] = defaultdict(Fraction)
    for k, mu in enumerate(heat_kernels(g, root, N - 1, budget=budget)):
        for v, m in mu.masses.items():
            out[cache(v)] += m
    return {c: m / N for c, m in sorted(out.items())}


def codes(g: Graph, vertices: Iterable[str], r: int, decoration: Decoration | None = None) -> dict[str, str]:
    cache = _CodeCache(g, r, decoration, None)
    return {v: cache(v) for v in vertices}
