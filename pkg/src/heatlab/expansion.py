"""Boundary operators, expansion ratios and non-expansion witnesses.

The boundary of a vertex set ``S`` is the inner vertex boundary
``{v in S : some neighbor of v lies outside S}``, computed in the full graph.
The outer boundary ``{w not in S : w ~ S}`` is available for comparison.
All ratios are ``mu(boundary) / mu(S)`` and candidate sets must satisfy
``mu(S) <= mu(V) / 2``.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Any, Callable, Iterable, Literal, Sequence

import numpy as np

from . import rational
from .errors import (
    DegeneratePartition,
    GuardTooSmall,
    NoFeasibleSet,
    SearchCapExceeded,
    UnsupportedGraph,
    ZeroMassError,
)
from .graphs import Graph, GroupGraph, distances
from .heat import Mass, VertexMeasure, heat_kernel

BoundaryMode = Literal["inner", "outer"]
Policy = Literal["support-only", "support-plus-padding"]

DEFAULT_SEARCH_CAP = 22
_CHUNK_BITS = 20


def inner_boundary(g: Graph, S: Iterable[str]) -> frozenset[str]:
    S = set(S)
    return frozenset(v for v in S if any(w not in S for w in g.neighbors(v)))


def outer_boundary(g: Graph, S: Iterable[str]) -> frozenset[str]:
    S = set(S)
    return frozenset(w for v in S for w in g.neighbors(v) if w not in S)


def boundary(g: Graph, S: Iterable[str], mode: BoundaryMode = "inner") -> frozenset[str]:
    if mode == "inner":
        return inner_boundary(g, S)
    if mode == "outer":
        return outer_boundary(g, S)
    raise ValueError(f"unknown boundary mode {mode!r}")


@dataclass(frozen=True)
class CutWitness:
    """A set ``S`` together with its boundary masses.

    Witnesses built from a symbolic partition (huge trees) leave ``S`` and
    ``boundary`` empty and describe the chosen components in ``classes``.
    """

    n: int | None
    S: tuple[str, ...]
    boundary: tuple[str, ...]
    mass_S: Mass
    mass_boundary: Mass
    ratio: Mass
    method: str
    certified_below: float | None = None
    flags: tuple[str, ...] = ()
    classes: tuple[dict, ...] = field(default=(), compare=False)

    def to_json(self) -> dict[str, Any]:
        def num(x: Mass) -> str | float:
            return rational.fmt(x) if isinstance(x, (Fraction, int)) else float(x)

        out: dict[str, Any] = {
            "n": self.n,
            "S": list(self.S),
            "boundary": list(self.boundary),
            "mass_S": num(self.mass_S),
            "mass_boundary": num(self.mass_boundary),
            "ratio": num(self.ratio),
            "method": self.method,
            "flags": list(self.flags),
        }
        if self.certified_below is not None:
            out["certified_below"] = self.certified_below
        if self.classes:
            out["classes"] = [dict(c) for c in self.classes]
        return out


def label_key(v: str) -> str:
    """Total order on labels used for every tie-break."""
    return v


def expansion_ratio(
    g: Graph,
    mu: VertexMeasure,
    S: Iterable[str],
    mode: BoundaryMode = "inner",
) -> tuple[Mass, Mass, Mass]:
    """``(mu(S), mu(boundary S), ratio)``."""
    S = set(S)
    mass_S = mu.mass(S)
    if mass_S == 0:
        raise ZeroMassError("mu(S) = 0")
    mass_b = mu.mass(boundary(g, S, mode))
    return mass_S, mass_b, mass_b / mass_S


# --------------------------------------------------------------------------
# exhaustive search


def _integer_weights(mu: VertexMeasure, verts: Sequence[str]) -> tuple[list[int], int]:
    den = math.lcm(*(Fraction(mu[v]).denominator for v in verts))
    weights = [int(Fraction(mu[v]) * den) for v in verts]
    return weights, sum(weights)


def exact_profile(
    g: Graph,
    mu: VertexMeasure,
    policy: Policy = "support-only",
    cap: int = DEFAULT_SEARCH_CAP,
    mode: BoundaryMode = "inner",
    n: int | None = None,
    threads: int = 1,
) -> tuple[Mass, CutWitness]:
    """Minimum ratio over all nonempty ``S`` inside the support of ``mu``.

    ``support-only`` computes boundaries in the full graph.
    ``support-plus-padding`` only counts neighbors in ``supp(mu) \\ S``,
    which is what ``A = S`` plus every zero-mass vertex achieves and is the
    least value any ``A`` can reach.  Padding cannot lower an outer
    boundary, so for ``mode="outer"`` both policies agree.

    The ``2^|supp|`` subsets are enumerated as bitmask blocks with numpy;
    blocks are independent shards reduced by minimum.
    """
    if policy not in ("support-only", "support-plus-padding"):
        raise ValueError(f"unknown policy {policy!r}")
    verts = sorted(mu.support, key=label_key)
    k = len(verts)
    if k > cap:
        raise SearchCapExceeded(f"support has {k} vertices, cap is {cap}; use sweep_profile")
    if k == 0:
        raise NoFeasibleSet("empty support")
    index = {v: i for i, v in enumerate(verts)}
    nbr_mask = []
    external = []
    for v in verts:
        m, ext = 0, False
        for w in g.neighbors(v):
            if w == v:
                continue
            if w in index:
                m |= 1 << index[w]
            else:
                ext = True
        nbr_mask.append(m)
        external.append(ext and policy == "support-only")

    if mu.exact:
        weights, total = _integer_weights(mu, verts)
        dtype: Any = np.int64 if total < 2**62 else object
    else:
        weights = [float(mu[v]) for v in verts]
        total = sum(weights)
        dtype = np.float64
    w_arr = np.array(weights, dtype=dtype)
    zero = w_arr[0] * 0

    def shard(lo: int, hi: int):
        masks = np.arange(lo, hi, dtype=np.int64)
        s_w = np.zeros(len(masks), dtype=dtype)
        b_w = np.zeros(len(masks), dtype=dtype)
        for i in range(k):
            inside = ((masks >> i) & 1).astype(bool)
            if mode == "inner":
                leaks = (masks & nbr_mask[i]) != nbr_mask[i]
                on_b = inside & (leaks | external[i])
            else:
                on_b = ~inside & ((masks & nbr_mask[i]) != 0)
            s_w = s_w + np.where(inside, w_arr[i], zero)
            b_w = b_w + np.where(on_b, w_arr[i], zero)
        feasible = (s_w > 0) & (2 * s_w <= total)
        if not feasible.any():
            return None
        idx = np.nonzero(feasible)[0]
        s_f, b_f = s_w[idx], b_w[idx]
        approx = b_f.astype(np.float64) / s_f.astype(np.float64)
        lo_val = approx.min()
        near = np.nonzero(approx <= lo_val * (1 + 1e-9))[0]
        if not mu.exact:
            j = near[np.argmin(approx[near])]
            return float(approx[j]), int(masks[idx[j]])
        pairs = {(int(b), int(s)) for b, s in zip(b_f[near], s_f[near])}
        r = min(Fraction(b, s) for b, s in pairs)
        hit = b_f[near].astype(object) * r.denominator == s_f[near].astype(object) * r.numerator
        return r, int(masks[idx[near[np.nonzero(hit)[0][0]]]])

    size = 1 << k
    step_ = 1 << min(_CHUNK_BITS, k)
    bounds = [(lo, min(lo + step_, size)) for lo in range(1, size, step_)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda b: shard(*b), bounds))
    else:
        results = [shard(*b) for b in bounds]
    results = [r for r in results if r is not None]
    if not results:
        raise NoFeasibleSet("no nonempty subset of the support has at most half the mass")
    h_star, mask = min(results)
    S = [verts[i] for i in range(k) if mask >> i & 1]
    if mode == "outer":
        bset = outer_boundary(g, S) & mu.support
    elif policy == "support-only":
        bset = inner_boundary(g, S)
    else:
        Sset = set(S)
        bset = frozenset(v for v in S if any(w in mu.support and w not in Sset for w in g.neighbors(v)))
    mass_S = mu.mass(S)
    mass_b = mu.mass(bset)
    flags = ("padded",) if policy == "support-plus-padding" else ()
    if mode == "outer":
        flags += ("outer",)
    witness = CutWitness(
        n, tuple(S), tuple(sorted(bset, key=label_key)), mass_S, mass_b, mass_b / mass_S, "exact", flags=flags
    )
    if mu.exact:
        assert witness.ratio == h_star
    return h_star, witness


def sweep_profile(
    g: Graph,
    mu: VertexMeasure,
    n: int | None = None,
    mode: BoundaryMode = "inner",
) -> CutWitness:
    """Best prefix of the support ordered by ``mu(v)/deg(v)`` (descending)."""
    def density(v: str) -> Mass:
        return Fraction(mu[v]) / g.degree(v) if mu.exact else mu[v] / g.degree(v)

    order = sorted(mu.support, key=lambda v: (-density(v), label_key(v)))
    if not order:
        raise NoFeasibleSet("empty support")
    total = mu.total()
    inside: set[str] = set()
    outside_edges: dict[str, int] = {}
    zero: Mass = Fraction(0) if mu.exact else 0.0
    mass_S, mass_b = zero, zero
    outer_count: dict[str, int] = {}
    best: tuple[Mass, int] | None = None
    for k, u in enumerate(order, 1):
        nbrs = g.neighbors(u)
        inside.add(u)
        mass_S += mu[u]
        if mode == "inner":
            outside_edges[u] = sum(1 for w in nbrs if w not in inside)
            if outside_edges[u]:
                mass_b += mu[u]
            for w in nbrs:
                if w != u and w in inside:
                    outside_edges[w] -= 1
                    if outside_edges[w] == 0:
                        mass_b -= mu[w]
        else:
            if outer_count.get(u):
                mass_b -= mu[u]
            for w in nbrs:
                if w not in inside:
                    if not outer_count.get(w):
                        mass_b += mu[w]
                    outer_count[w] = outer_count.get(w, 0) + 1
        if 2 * mass_S > total:
            break
        ratio = mass_b / mass_S
        if best is None or ratio < best[0]:
            best = (ratio, k)
    if best is None:
        raise NoFeasibleSet("every prefix exceeds half the mass")
    S = order[: best[1]]
    bset = boundary(g, S, mode) & mu.support if mode == "outer" else inner_boundary(g, S)
    m_S, m_b, ratio = expansion_ratio(g, mu, S, mode)
    if mu.exact:
        assert ratio == best[0]
    return CutWitness(
        n, tuple(S), tuple(sorted(bset, key=label_key)), m_S, m_b, ratio, "sweep",
        flags=("outer",) if mode == "outer" else (),
    )


@dataclass(frozen=True)
class ProfileRecord:
    n: int
    h_star: Mass
    witness: CutWitness
    exact: bool


def expansion_profile(
    g: Graph,
    root: str,
    ns: Iterable[int],
    policy: Policy = "support-only",
    cap: int = DEFAULT_SEARCH_CAP,
    lazy: bool = False,
    mode: BoundaryMode = "inner",
    budget: int | None = None,
) -> list[ProfileRecord]:
    """Per-step minimum ratio: exhaustive when the support fits the cap, sweep otherwise."""
    records = []
    for n in ns:
        mu = heat_kernel(g, root, n, lazy=lazy, budget=budget)
        try:
            if len(mu) <= cap:
                h, w = exact_profile(g, mu, policy, cap, mode, n=n)
                records.append(ProfileRecord(n, h, w, True))
            else:
                w = sweep_profile(g, mu, n=n, mode=mode)
                records.append(ProfileRecord(n, w.ratio, w, False))
        except NoFeasibleSet:
            continue
    return records


# --------------------------------------------------------------------------
# partition witness


def _sqrt_lt(x: Fraction, y: Fraction) -> bool:
    """``x < sqrt(y)`` exactly, for rational ``x`` and ``y >= 0``."""
    return x < 0 or x * x < y


@dataclass(frozen=True)
class Component:
    vertices: frozenset[str]
    mass: Mass
    confirmed: bool

    @property
    def key(self) -> str:
        return min(self.vertices, key=label_key)


def claim_bound(d: int, epsilon: Fraction) -> float:
    """``6 sqrt((d+1) epsilon)``."""
    return 6 * float((d + 1) * epsilon) ** 0.5


def witness_from_partition(
    g: Graph,
    root: str,
    n: int,
    cut: Callable[[str], bool],
    guard: int,
    *,
    epsilon: Fraction | None = None,
    lazy: bool = False,
    mu: VertexMeasure | None = None,
    budget: int | None = None,
) -> CutWitness:
    """Assemble ``S`` from the heaviest components of the complement of ``cut``.

    Components of ``ball(root, n + guard) \\ cut`` are ordered by decreasing
    mass (ties by smallest label).  With ``k`` the first index whose
    cumulative mass reaches 1/2, ``S = C_1 u ... u C_{k-1}``.  A component is
    confirmed when it does not leave the explored ball.

    When ``epsilon`` is given and the pointwise and removed-mass hypotheses
    hold, the conclusion ``1/3 < mu(S) <= 1/2`` and
    ``ratio < 6 sqrt((d+1) epsilon)`` is checked and recorded.
    """
    if mu is None:
        mu = heat_kernel(g, root, n, lazy=lazy, budget=budget)
    radius = n + guard
    dist = distances(g, root, radius, budget)
    free = {v for v in dist if not cut(v)}
    comps: list[Component] = []
    seen: set[str] = set()
    for start in sorted(free, key=label_key):
        if start in seen:
            continue
        members = {start}
        queue = deque([start])
        confirmed = True
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if w in members or cut(w):
                    continue
                if w not in dist:
                    confirmed = False
                    continue
                members.add(w)
                queue.append(w)
        seen |= members
        comps.append(Component(frozenset(members), mu.mass(members), confirmed))
    comps.sort(key=lambda c: (-c.mass, label_key(c.key)))

    total = mu.total()
    running = Fraction(0) if mu.exact else 0.0
    k = None
    for i, c in enumerate(comps, 1):
        running += c.mass
        if 2 * running >= total:
            k = i
            break
    flags: list[str] = []
    if k is None:
        chosen = [c for c in comps if c.mass > 0]
        flags.append("components-below-half")
    else:
        if k == 1:
            raise DegeneratePartition(f"heaviest component carries {comps[0].mass} >= 1/2")
        chosen = comps[: k - 1]
    if not chosen:
        raise DegeneratePartition("no component carries mass")
    unconfirmed = [c.key for c in chosen if not c.confirmed]
    if unconfirmed:
        raise GuardTooSmall(f"components {unconfirmed[:5]} leave the radius-{radius} ball")
    S = set().union(*(c.vertices for c in chosen))
    mass_S, mass_b, ratio = expansion_ratio(g, mu, S)
    bset = inner_boundary(g, S)

    certified = None
    if epsilon is not None and mu.exact:
        epsilon = Fraction(epsilon)
        d = g.max_degree
        y = (d + 1) * epsilon
        removed = {v for v in dist if cut(v)}
        removed |= {v for v in free if any(cut(w) for w in g.neighbors(v))}
        M = max(len(c.vertices) for c in comps)
        all_confirmed = all(c.confirmed for c in comps if c.mass > 0)
        pointwise = all((3 * M * m) ** 2 <= y for m in mu.masses.values())
        small_removed = mu.mass(removed) ** 2 <= 4 * y
        if all_confirmed and pointwise and small_removed:
            flags.append("claim-hypotheses-hold")
            if not (3 * mass_S > total and 2 * mass_S <= total):
                raise AssertionError(f"mu(S) = {mass_S} outside (1/3, 1/2]")
            if not _sqrt_lt(ratio / 6, y):
                raise AssertionError(f"ratio {ratio} not below 6 sqrt({y})")
            certified = claim_bound(d, epsilon)
    return CutWitness(
        n,
        tuple(sorted(S, key=label_key)),
        tuple(sorted(bset, key=label_key)),
        mass_S,
        mass_b,
        ratio,
        "partition-witness",
        certified_below=certified,
        flags=tuple(flags),
    )


# --------------------------------------------------------------------------
# Folner translates


def folner_translate_search(
    g: Graph,
    F: Iterable[str],
    n: int,
    lazy: bool = False,
    budget: int | None = None,
) -> CutWitness:
    """Translate ``hF`` minimizing ``mu_e^n(boundary hF) / mu_e^n(hF)``.

    Since translating by every group element sums ``mu(hF)`` to ``|F|`` and
    ``mu(h dF)`` to ``|dF|``, some translate does at least as well as
    ``|dF|/|F|``; the returned ratio is checked against that bound.
    """
    if not isinstance(g, GroupGraph):
        raise UnsupportedGraph("Folner search needs a group (lattice, tree or free group) graph")
    F = sorted(set(F), key=label_key)
    if not F:
        raise ZeroMassError("F is empty")
    dF = inner_boundary(g, F)
    mu = heat_kernel(g, g.identity, n, lazy=lazy, budget=budget)
    f_inv = [g.inverse(f) for f in F]
    shifts = {g.multiply(s, fi) for s in mu.support for fi in f_inv}
    best = None
    for h in sorted(shifts, key=label_key):
        mass = sum((mu[g.multiply(h, f)] for f in F), Fraction(0))
        if mass == 0:
            continue
        mass_b = sum((mu[g.multiply(h, f)] for f in dF), Fraction(0))
        key = (mass_b / mass, label_key(h))
        if best is None or key < best[0]:
            best = (key, h, mass, mass_b)
    if best is None:
        raise ZeroMassError("no translate of F carries mass")
    (ratio, _), h, mass, mass_b = best
    bound = Fraction(len(dF), len(F))
    if ratio > bound:
        raise AssertionError(f"averaging bound violated: {ratio} > {bound}")
    S = [g.multiply(h, f) for f in F]
    flags = [f"translate={h}", f"averaging-bound={rational.fmt(bound)}"]
    if 2 * mass > 1:
        flags.append("mass-above-half")
    return CutWitness(
        n,
        tuple(sorted(S, key=label_key)),
        tuple(sorted((g.multiply(h, f) for f in dF), key=label_key)),
        mass,
        mass_b,
        ratio,
        "folner",
        flags=tuple(flags),
    )
