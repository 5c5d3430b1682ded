"""Adjacency oracles for finite and lazily generated multigraphs.

Every graph is accessed through :meth:`Graph.neighbors`, which returns the
neighbor multiset of a vertex as a tuple.  A loop at ``v`` contributes ``v``
twice to that tuple, so ``degree(v) == len(neighbors(v))`` counts half-edges.
Vertices are canonical strings; each generator family documents its format.
"""

from __future__ import annotations

import json
import os
import random
import re
import string
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping

from .errors import (
    BudgetExceeded,
    DisconnectedError,
    FormatError,
    InvalidVertex,
    SpecError,
)

DEFAULT_VERTEX_BUDGET = 10**7

_INT = re.compile(r"-?(0|[1-9][0-9]*)\Z")
_NAT = re.compile(r"(0|[1-9][0-9]*)\Z")


def vertex_budget(override: int | None = None) -> int:
    """Vertex budget in effect: explicit override, then ``HEATLAB_BUDGET``."""
    if override is not None:
        return int(override)
    env = os.environ.get("HEATLAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SpecError(f"HEATLAB_BUDGET is not an integer: {env!r}") from None
    return DEFAULT_VERTEX_BUDGET


def _parse_int(text: str, label: str) -> int:
    if not _INT.match(text) or text == "-0":
        raise InvalidVertex(f"malformed integer {text!r} in label {label!r}")
    return int(text)


class Graph:
    """Base adjacency oracle.

    Subclasses implement :meth:`_neighbors`; results are memoized forever.
    Concurrent readers are safe: two threads racing on the same key compute
    the same tuple, and ``dict.setdefault`` keeps whichever lands first.
    """

    kind = "generated"
    family = "abstract"

    def __init__(self, max_degree: int):
        self.max_degree = int(max_degree)
        self._cache: dict[str, tuple[str, ...]] = {}

    def _neighbors(self, v: str) -> Iterable[str]:
        raise NotImplementedError

    def neighbors(self, v: str) -> tuple[str, ...]:
        cached = self._cache.get(v)
        if cached is not None:
            return cached
        if not isinstance(v, str):
            raise InvalidVertex(f"vertex labels are strings, got {v!r}")
        return self._cache.setdefault(v, tuple(self._neighbors(v)))

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def adjacency(self, v: str) -> tuple[int, tuple[str, ...]]:
        nbrs = self.neighbors(v)
        return len(nbrs), nbrs

    def multiplicity(self, v: str, w: str) -> int:
        """Number of times ``w`` occurs in ``neighbors(v)``."""
        return self.neighbors(v).count(w)

    def contains(self, v: str) -> bool:
        try:
            self.neighbors(v)
        except InvalidVertex:
            return False
        return True

    def spec(self) -> dict[str, Any]:
        return {"family": self.family}

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.spec().items() if k != "family")
        return f"{type(self).__name__}({params})"


class FiniteGraph(Graph):
    """Explicit multigraph given as a vertex -> neighbor-multiset mapping."""

    kind = "finite"
    family = "finite"

    def __init__(
        self,
        adjacency: Mapping[str, Iterable[str]],
        max_degree: int | None = None,
        *,
        check: bool = True,
        allow_isolated: bool = False,
    ):
        adj = {str(v): tuple(nbrs) for v, nbrs in adjacency.items()}
        top = max((len(n) for n in adj.values()), default=0)
        super().__init__(top if max_degree is None else max_degree)
        self._adj = adj
        self._cache = adj
        if check:
            self._check(allow_isolated)

    def _check(self, allow_isolated: bool) -> None:
        counts = {v: Counter(n) for v, n in self._adj.items()}
        for v, cnt in counts.items():
            if len(self._adj[v]) > self.max_degree:
                raise FormatError(f"degree of {v!r} exceeds bound {self.max_degree}")
            if not allow_isolated and not self._adj[v]:
                raise FormatError(f"vertex {v!r} is isolated")
            if cnt[v] % 2:
                raise FormatError(f"loop at {v!r} must appear an even number of times")
            for w, m in cnt.items():
                if w not in counts:
                    raise FormatError(f"neighbor {w!r} of {v!r} is not a vertex")
                if w != v and counts[w][v] != m:
                    raise FormatError(f"asymmetric multiplicity between {v!r} and {w!r}")

    def _neighbors(self, v: str) -> Iterable[str]:
        raise InvalidVertex(f"{v!r} is not a vertex of this finite graph")

    @property
    def vertices(self) -> list[str]:
        return list(self._adj)

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """Undirected edges ``(u, w, m)``; a loop line counts loops, not half-edges."""
        order = {v: i for i, v in enumerate(self._adj)}
        for u, nbrs in self._adj.items():
            for w, m in Counter(nbrs).items():
                if u == w:
                    yield u, u, m // 2
                elif order[u] < order[w]:
                    yield u, w, m

    def spec(self) -> dict[str, Any]:
        return {"family": self.family, "vertices": len(self._adj)}


def components(graph: FiniteGraph) -> list[set[str]]:
    seen: set[str] = set()
    comps = []
    for start in graph.vertices:
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in graph.neighbors(v):
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        comps.append(comp)
    return comps


class GroupGraph(Graph):
    """Right Cayley graph of a group; left translations are automorphisms."""

    identity = ""

    def multiply(self, a: str, b: str) -> str:
        raise NotImplementedError

    def inverse(self, a: str) -> str:
        raise NotImplementedError

    def translate(self, g: str, v: str) -> str:
        return self.multiply(g, v)


class Lattice(GroupGraph):
    """``Z^dim`` with its standard generators; labels like ``"2,-1"``."""

    family = "lattice"

    def __init__(self, dim: int):
        if dim < 1:
            raise SpecError("lattice dimension must be positive")
        super().__init__(2 * dim)
        self.dim = dim
        self.identity = ",".join("0" * dim)

    def parse(self, v: str) -> tuple[int, ...]:
        parts = v.split(",")
        if len(parts) != self.dim:
            raise InvalidVertex(f"{v!r} is not a point of Z^{self.dim}")
        return tuple(_parse_int(p, v) for p in parts)

    @staticmethod
    def label(point: Iterable[int]) -> str:
        return ",".join(str(int(x)) for x in point)

    def _neighbors(self, v: str) -> Iterator[str]:
        x = self.parse(v)
        for i in range(self.dim):
            for s in (1, -1):
                y = list(x)
                y[i] += s
                yield self.label(y)

    def multiply(self, a: str, b: str) -> str:
        return self.label(p + q for p, q in zip(self.parse(a), self.parse(b)))

    def inverse(self, a: str) -> str:
        return self.label(-p for p in self.parse(a))

    def spec(self) -> dict[str, Any]:
        return {"family": self.family, "dim": self.dim}


class TreeGraph(GroupGraph):
    """Regular tree whose labels are reduced words read from the root ``""``.

    Graph distance is ``len(u) + len(w) - 2 * lcp(u, w)``.
    """

    branching: int

    def word_length(self, v: str) -> int:
        self.neighbors(v)
        return len(v)


class RegularTree(TreeGraph):
    """``T_d`` as the Cayley graph of the free product of ``d`` copies of Z/2.

    Labels are words over the first ``d`` lowercase letters with no letter
    repeated twice in a row.
    """

    family = "regular-tree"

    def __init__(self, degree: int):
        if not 2 <= degree <= 26:
            raise SpecError("regular-tree degree must lie in 2..26")
        super().__init__(degree)
        self.degree_d = degree
        self.branching = degree
        self.letters = string.ascii_lowercase[:degree]

    def _check_word(self, v: str) -> None:
        prev = ""
        for ch in v:
            if ch not in self.letters or ch == prev:
                raise InvalidVertex(f"{v!r} is not a reduced word of T_{self.degree_d}")
            prev = ch

    def _neighbors(self, v: str) -> Iterator[str]:
        self._check_word(v)
        for s in self.letters:
            yield v[:-1] if v and v[-1] == s else v + s

    def multiply(self, a: str, b: str) -> str:
        self._check_word(a)
        self._check_word(b)
        out = list(a)
        for ch in b:
            if out and out[-1] == ch:
                out.pop()
            else:
                out.append(ch)
        return "".join(out)

    def inverse(self, a: str) -> str:
        self._check_word(a)
        return a[::-1]

    def spec(self) -> dict[str, Any]:
        return {"family": self.family, "degree": self.degree_d}


class FreeGroup(TreeGraph):
    """Cayley graph of ``F_rank``; generators ``a, b, ...`` with inverses ``A, B, ...``."""

    family = "free-group"

    def __init__(self, rank: int):
        if not 1 <= rank <= 26:
            raise SpecError("free-group rank must lie in 1..26")
        super().__init__(2 * rank)
        self.rank = rank
        self.branching = 2 * rank
        lower = string.ascii_lowercase[:rank]
        self.letters = lower + lower.upper()

    @staticmethod
    def _inv(ch: str) -> str:
        return ch.swapcase()

    def _check_word(self, v: str) -> None:
        prev = ""
        for ch in v:
            if ch not in self.letters or (prev and ch == prev.swapcase()):
                raise InvalidVertex(f"{v!r} is not a reduced word of F_{self.rank}")
            prev = ch

    def _neighbors(self, v: str) -> Iterator[str]:
        self._check_word(v)
        for s in self.letters:
            yield v[:-1] if v and v[-1] == s.swapcase() else v + s

    def multiply(self, a: str, b: str) -> str:
        self._check_word(a)
        self._check_word(b)
        out = list(a)
        for ch in b:
            if out and out[-1] == ch.swapcase():
                out.pop()
            else:
                out.append(ch)
        return "".join(out)

    def inverse(self, a: str) -> str:
        self._check_word(a)
        return a[::-1].swapcase()

    def spec(self) -> dict[str, Any]:
        return {"family": self.family, "rank": self.rank}


class HalfLine(Graph):
    """The half-line ``N``: vertex ``"0"`` has degree 1, all others degree 2."""

    family = "half-line"

    def __init__(self) -> None:
        super().__init__(2)

    def _neighbors(self, v: str) -> tuple[str, ...]:
        if not _NAT.match(v):
            raise InvalidVertex(f"{v!r} is not a natural number")
        k = int(v)
        return (str(k + 1),) if k == 0 else (str(k - 1), str(k + 1))


class TowerGraph(Graph):
    """Disjoint union of quotients ``G_0, ..., G_kmax`` with vertical edges.

    Each ``x`` in ``G_k`` (``k >= 1``) has one edge to its image in
    ``G_{k-1}``, so a vertex receives one upward edge per fiber element.
    Labels are ``"k:element"``.
    """

    def __init__(self, p: int, k_max: int, within_degree: int, max_fiber: int):
        if p < 2 or k_max < 1:
            raise SpecError("towers need p >= 2 and k_max >= 1")
        self.p = p
        self.k_max = k_max
        self.within_degree = within_degree
        super().__init__(within_degree + 1 + max_fiber)

    def level(self, v: str) -> int:
        head, sep, _ = v.partition(":")
        if not sep or not _NAT.match(head):
            raise InvalidVertex(f"{v!r} is not a tower label")
        k = int(head)
        if k > self.k_max:
            raise InvalidVertex(f"level {k} exceeds k_max={self.k_max}")
        return k

    def level_size(self, k: int) -> int:
        raise NotImplementedError

    def fiber_size(self, k: int) -> int:
        """Number of preimages in ``G_{k+1}`` of a vertex of ``G_k``."""
        return self.level_size(k + 1) // self.level_size(k)

    def spec(self) -> dict[str, Any]:
        return {"family": self.family, "p": self.p, "k_max": self.k_max}


class CycleTower(TowerGraph):
    """Levels ``G_k = Cay(Z/p^k, {+1, -1})``; labels ``"k:x"`` with ``0 <= x < p^k``."""

    family = "cycle-tower"

    def __init__(self, p: int, k_max: int):
        super().__init__(p, k_max, within_degree=2, max_fiber=p)

    def level_size(self, k: int) -> int:
        return self.p**k

    def parse(self, v: str) -> tuple[int, int]:
        k = self.level(v)
        tail = v.partition(":")[2]
        if not _NAT.match(tail) or int(tail) >= self.p**k:
            raise InvalidVertex(f"{v!r}: element must be in 0..{self.p ** k - 1}")
        return k, int(tail)

    def _neighbors(self, v: str) -> Iterator[str]:
        k, x = self.parse(v)
        n = self.p**k
        yield f"{k}:{(x + 1) % n}"
        yield f"{k}:{(x - 1) % n}"
        if k > 0:
            yield f"{k - 1}:{x % (n // self.p)}"
        if k < self.k_max:
            for t in range(self.p):
                yield f"{k + 1}:{x + t * n}"


Matrix = tuple[int, int, int, int]


class SL2Tower(TowerGraph):
    """Levels ``G_k = Cay(SL2(Z/p^k), {A, B, A^-1, B^-1})``.

    ``A = [[1,1],[0,1]]`` and ``B = [[1,0],[1,1]]``; right multiplication.
    Labels are ``"k:a,b,c,d"`` with entries reduced into ``0..p^k-1``.
    """

    family = "sl2-tower"
    GENERATORS: tuple[Matrix, ...] = ((1, 1, 0, 1), (1, 0, 1, 1), (1, -1, 0, 1), (1, 0, -1, 1))

    def __init__(self, p: int, k_max: int):
        max_fiber = p**3 if k_max >= 2 else p**3 - p
        super().__init__(p, k_max, within_degree=4, max_fiber=max_fiber)

    def level_size(self, k: int) -> int:
        if k == 0:
            return 1
        return self.p ** (3 * k) - self.p ** (3 * k - 2)

    def parse(self, v: str) -> tuple[int, Matrix]:
        k = self.level(v)
        parts = v.partition(":")[2].split(",")
        n = self.p**k
        if len(parts) != 4 or not all(_NAT.match(x) for x in parts):
            raise InvalidVertex(f"{v!r} is not an SL2 tower label")
        a, b, c, d = (int(x) for x in parts)
        if max(a, b, c, d) >= n or (a * d - b * c - 1) % n:
            raise InvalidVertex(f"{v!r} is not a reduced element of SL2(Z/{n})")
        return k, (a, b, c, d)

    @staticmethod
    def label(k: int, m: Matrix) -> str:
        return f"{k}:{m[0]},{m[1]},{m[2]},{m[3]}"

    @staticmethod
    def _mul(x: Matrix, y: Matrix, n: int) -> Matrix:
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % n, (a * f + b * h) % n, (c * e + d * g) % n, (c * f + d * h) % n)

    def elements(self, k: int) -> list[str]:
        """All vertices of level ``k`` (brute-force enumeration)."""
        n = self.p**k
        return [
            self.label(k, (a, b, c, d))
            for a, b, c, d in product(range(n), repeat=4)
            if (a * d - b * c - 1) % n == 0
        ]

    def _lifts(self, k: int, m: Matrix) -> Iterator[Matrix]:
        step = self.p**k
        n = step * self.p
        for t in product(range(self.p), repeat=4):
            lift = tuple(x + step * s for x, s in zip(m, t))
            if (lift[0] * lift[3] - lift[1] * lift[2] - 1) % n == 0:
                yield lift  # type: ignore[misc]

    def _neighbors(self, v: str) -> Iterator[str]:
        k, m = self.parse(v)
        n = self.p**k
        for s in self.GENERATORS:
            yield self.label(k, self._mul(m, s, n))
        if k > 0:
            q = n // self.p
            yield self.label(k - 1, tuple(x % q for x in m))  # type: ignore[arg-type]
        if k < self.k_max:
            for lift in self._lifts(k, m):
                yield self.label(k + 1, lift)


@dataclass(frozen=True)
class RootedGraph:
    graph: Graph
    root: str

    def __post_init__(self) -> None:
        self.graph.neighbors(self.root)


def distances(graph: Graph, root: str, r: int, budget: int | None = None) -> dict[str, int]:
    """Breadth-first distances from ``root`` for all vertices within ``r``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    cap = vertex_budget(budget)
    graph.neighbors(root)
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        if dv == r:
            continue
        for w in graph.neighbors(v):
            if w not in dist:
                dist[w] = dv + 1
                if len(dist) > cap:
                    raise BudgetExceeded(f"ball of radius {r} exceeds {cap} vertices")
                queue.append(w)
    return dist


def ball(graph: Graph, root: str, r: int, budget: int | None = None) -> RootedGraph:
    """Induced sub-multigraph on the radius-``r`` ball, rooted at ``root``."""
    dist = distances(graph, root, r, budget)
    adj = {v: tuple(w for w in graph.neighbors(v) if w in dist) for v in dist}
    return RootedGraph(FiniteGraph(adj, graph.max_degree, check=False), root)


def regular_tree_ball_size(d: int, r: int) -> int:
    """Closed form ``1 + d((d-1)^r - 1)/(d-2)`` for ``d >= 3``."""
    return 1 + d * ((d - 1) ** r - 1) // (d - 2)


# --------------------------------------------------------------------------
# finite families and file ingestion


def from_edges(edges: Iterable[tuple[str, str, int]], max_degree: int | None = None) -> FiniteGraph:
    """Undirected multigraph from ``(u, w, multiplicity)`` triples."""
    adj: dict[str, list[str]] = {}
    for u, w, m in edges:
        adj.setdefault(u, [])
        adj.setdefault(w, [])
        if u == w:
            adj[u].extend([u] * (2 * m))
        else:
            adj[u].extend([w] * m)
            adj[w].extend([u] * m)
    return FiniteGraph(adj, max_degree)


def path_graph(n: int) -> FiniteGraph:
    return from_edges((str(i), str(i + 1), 1) for i in range(n - 1))


def cycle_graph(n: int) -> FiniteGraph:
    if n < 3:
        raise SpecError("cycle needs at least 3 vertices")
    return from_edges((str(i), str((i + 1) % n), 1) for i in range(n))


def star_graph(leaves: int) -> FiniteGraph:
    """``K_{1,leaves}`` with center ``"0"`` and leaves ``"1"..``."""
    return from_edges(("0", str(i), 1) for i in range(1, leaves + 1))


def complete_graph(n: int) -> FiniteGraph:
    return from_edges((str(i), str(j), 1) for i in range(n) for j in range(i + 1, n))


def petersen_graph() -> FiniteGraph:
    edges = []
    for i in range(5):
        edges.append((str(i), str((i + 1) % 5), 1))
        edges.append((str(i), str(i + 5), 1))
        edges.append((str(5 + i), str(5 + (i + 2) % 5), 1))
    return from_edges(edges)


def random_graph(
    n: int,
    extra_edges: int,
    seed: int,
    *,
    loops: bool = False,
    multi: bool = False,
) -> FiniteGraph:
    """Connected random multigraph: a random tree plus ``extra_edges`` chords."""
    rng = random.Random(seed)
    edges: Counter[tuple[str, str]] = Counter()
    for i in range(1, n):
        j = rng.randrange(i)
        edges[(str(j), str(i))] += 1
    for _ in range(extra_edges):
        u, w = rng.randrange(n), rng.randrange(n)
        if u == w and not loops:
            continue
        key = (str(min(u, w)), str(max(u, w)))
        if edges[key] and not multi:
            continue
        edges[key] += 1
    if n == 1 and not edges:
        edges[("0", "0")] = 1
    return from_edges((u, w, m) for (u, w), m in edges.items())


def load_edge_list(path: str | os.PathLike, *, symmetrize: bool = True) -> FiniteGraph:
    """Read an edge-list file.

    One edge per line as ``u w [m]``; ``#`` starts a comment.  An optional
    first line holding a JSON object (``{"max_degree": d}``) bounds degrees.
    With ``symmetrize=False`` each line is a directed half-edge count and the
    file must list both directions with equal multiplicity.
    """
    text = Path(path).read_text(encoding="utf-8")
    header: dict[str, Any] = {}
    directed: Counter[tuple[str, str]] = Counter()
    loops: Counter[str] = Counter()
    first = True
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if first and line.startswith("{"):
            try:
                header = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: bad JSON header: {exc}") from None
            first = False
            continue
        first = False
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'u w [m]', got {raw!r}")
        u, w = parts[0], parts[1]
        try:
            m = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise FormatError(f"line {lineno}: multiplicity {parts[2]!r} is not an integer") from None
        if m < 1:
            raise FormatError(f"line {lineno}: multiplicity must be positive")
        if u == w:
            loops[u] += m
        elif symmetrize:
            directed[(u, w)] += m
            directed[(w, u)] += m
        else:
            directed[(u, w)] += m
    if not symmetrize:
        for (u, w), m in directed.items():
            if directed[(w, u)] != m:
                raise FormatError(f"asymmetric edge {u!r}-{w!r}: {m} vs {directed[(w, u)]}")
    adj: dict[str, list[str]] = {}
    for (u, w), m in directed.items():
        adj.setdefault(u, []).extend([w] * m)
        adj.setdefault(w, [])
    for u, m in loops.items():
        adj.setdefault(u, []).extend([u] * (2 * m))
    if not adj:
        raise FormatError("edge list is empty")
    bound = header.get("max_degree")
    if bound is not None and (not isinstance(bound, int) or bound < 1):
        raise FormatError("max_degree header must be a positive integer")
    graph = FiniteGraph(adj, bound)
    comps = components(graph)
    if len(comps) > 1:
        raise DisconnectedError(len(comps))
    return graph


def dump_edge_list(graph: FiniteGraph, path: str | os.PathLike) -> None:
    lines = [json.dumps({"max_degree": graph.max_degree})]
    lines += [f"{u} {w} {m}" for u, w, m in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# declarative generator specs


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GeneratorSpec":
        if "family" not in data:
            raise SpecError("generator spec needs a 'family'")
        params = {k: v for k, v in data.items() if k != "family"}
        return cls(str(data["family"]), params)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, **self.params}


def _positive(params: Mapping[str, Any], name: str, minimum: int = 1) -> int:
    if name not in params:
        raise SpecError(f"missing parameter {name!r}")
    value = params[name]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise SpecError(f"parameter {name!r} must be an integer >= {minimum}")
    return value


_FAMILIES: dict[str, Callable[[Mapping[str, Any]], Graph]] = {
    "lattice": lambda p: Lattice(_positive(p, "dim")),
    "regular-tree": lambda p: RegularTree(_positive(p, "degree", 2)),
    "free-group": lambda p: FreeGroup(_positive(p, "rank")),
    "cycle-tower": lambda p: CycleTower(_positive(p, "p", 2), _positive(p, "k_max")),
    "sl2-tower": lambda p: SL2Tower(_positive(p, "p", 2), _positive(p, "k_max")),
    "half-line": lambda p: HalfLine(),
    "path": lambda p: path_graph(_positive(p, "n", 2)),
    "cycle": lambda p: cycle_graph(_positive(p, "n", 3)),
    "star": lambda p: star_graph(_positive(p, "leaves")),
    "complete": lambda p: complete_graph(_positive(p, "n", 2)),
    "petersen": lambda p: petersen_graph(),
    "random": lambda p: random_graph(
        _positive(p, "n"),
        int(p.get("extra_edges", 0)),
        int(p.get("seed", 0)),
        loops=bool(p.get("loops", False)),
        multi=bool(p.get("multi", False)),
    ),
}

FAMILIES = frozenset(_FAMILIES) | {"file"}


def make_generator(spec: GeneratorSpec | Mapping[str, Any]) -> Graph:
    if not isinstance(spec, GeneratorSpec):
        spec = GeneratorSpec.from_dict(spec)
    if spec.family == "file":
        if "path" not in spec.params:
            raise SpecError("file family needs a 'path'")
        return load_edge_list(spec.params["path"], symmetrize=bool(spec.params.get("symmetrize", True)))
    try:
        factory = _FAMILIES[spec.family]
    except KeyError:
        raise SpecError(f"unsupported graph family {spec.family!r}") from None
    return factory(spec.params)


def default_root(graph: Graph) -> str:
    """Canonical base vertex of a family (identity, origin or level 0)."""
    if isinstance(graph, GroupGraph):
        return graph.identity
    if isinstance(graph, HalfLine):
        return "0"
    if isinstance(graph, SL2Tower):
        return "0:0,0,0,0"
    if isinstance(graph, CycleTower):
        return "0:0"
    if isinstance(graph, FiniteGraph):
        return graph.vertices[0]
    raise SpecError(f"no default root for {graph!r}")


def lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
