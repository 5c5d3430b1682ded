"""Horosphere cuts on regular trees and tower-of-quotients diagnostics.

A ray ``xi`` from the root of a word tree is an eventually periodic reduced
letter sequence.  The Busemann value ``b(v) = lim_k d(v, xi_k) - k`` equals
``len(v) - 2 * lcp(v, xi)``.  A horosphere cut keeps the levels ``m`` whose
rotation phase ``frac(theta + alpha * m)`` falls in ``[0, epsilon)``;
removing them leaves finite components whenever the selected levels are
unbounded in both directions.

Irrational rotation numbers are carried as a continued-fraction convergent
with an explicit error bound, so every membership test is an exact rational
comparison and levels whose classification the error could flip are
reported as ambiguous.
"""

from __future__ import annotations

import bisect
import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Any, Iterable, Iterator, Mapping

from . import rational
from .errors import DegeneratePartition, GuardTooSmall, SpecError, UnsupportedGraph
from .expansion import CutWitness, claim_bound, expansion_ratio
from .graphs import FreeGroup, Graph, TowerGraph, TreeGraph
from .heat import LumpedChain, heat_kernel, tower_level_chain

DEFAULT_MIN_DENOMINATOR = 10**6


# --------------------------------------------------------------------------
# rays and the Busemann cocycle


def _cancels(tree: TreeGraph, a: str, b: str) -> bool:
    if isinstance(tree, FreeGroup):
        return a == b.swapcase()
    return a == b


@dataclass(frozen=True)
class RaySpec:
    """Geodesic ray ``preperiod + period + period + ...``."""

    preperiod: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.period:
            raise SpecError("ray period must be nonempty")

    def letter(self, i: int) -> str:
        p = len(self.preperiod)
        if i < p:
            return self.preperiod[i]
        return self.period[(i - p) % len(self.period)]

    def prefix(self, k: int) -> str:
        return "".join(self.letter(i) for i in range(k))

    def validate(self, tree: TreeGraph) -> None:
        letters = set(tree.letters)
        if not set(self.preperiod + self.period) <= letters:
            raise SpecError(f"ray uses letters outside {sorted(letters)}")
        end = len(self.preperiod) + 2 * len(self.period)
        for i in range(end):
            if _cancels(tree, self.letter(i), self.letter(i + 1)):
                raise SpecError(f"ray is not reduced at position {i}")

    def to_json(self) -> dict[str, list[str]]:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "RaySpec":
        return cls(tuple(data.get("preperiod", ())), tuple(data["period"]))


def random_ray(tree: TreeGraph, seed: int, preperiod: int = 3, period: int = 4) -> RaySpec:
    """Seeded reduced eventually periodic ray."""
    rng = random.Random(seed)
    while True:
        word: list[str] = []
        for _ in range(preperiod + period):
            choices = [s for s in tree.letters if not (word and _cancels(tree, word[-1], s))]
            word.append(rng.choice(choices))
        ray = RaySpec(tuple(word[:preperiod]), tuple(word[preperiod:]))
        try:
            ray.validate(tree)
        except SpecError:
            continue
        return ray


def _require_tree(tree: Graph) -> TreeGraph:
    if not isinstance(tree, TreeGraph):
        raise UnsupportedGraph("Busemann functions need a regular-tree or free-group graph")
    return tree


def ray_lcp(ray: RaySpec, v: str) -> int:
    for i, ch in enumerate(v):
        if ray.letter(i) != ch:
            return i
    return len(v)


def busemann(tree: Graph, ray: RaySpec, v: str) -> int:
    """Busemann value of ``v`` toward ``xi``, normalized to 0 at the root."""
    tree = _require_tree(tree)
    tree.neighbors(v)
    return len(v) - 2 * ray_lcp(ray, v)


# --------------------------------------------------------------------------
# rotation numbers


def _convergents(partial_quotients: Iterator[int]) -> Iterator[tuple[int, int]]:
    p0, q0, p1, q1 = 1, 0, next(partial_quotients), 1
    yield p1, q1
    for a in partial_quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


_PARTIAL_QUOTIENTS = {
    "golden": lambda: (1 for _ in count()),
    "sqrt2": lambda: (1 if i == 0 else 2 for i in count()),
}


@dataclass(frozen=True)
class Alpha:
    """Rotation number: rational ``value`` within ``error`` of the true alpha."""

    tag: str
    value: Fraction
    error: Fraction

    @classmethod
    def irrational(cls, tag: str, min_denominator: int = DEFAULT_MIN_DENOMINATOR) -> "Alpha":
        if tag not in _PARTIAL_QUOTIENTS:
            raise SpecError(f"unsupported irrational {tag!r}")
        conv = _convergents(_PARTIAL_QUOTIENTS[tag]())
        p, q = next(conv)
        for p_next, q_next in conv:
            if q >= min_denominator:
                # |alpha - p/q| < 1 / (q q_next) for consecutive convergents
                return cls(tag, Fraction(p, q), Fraction(1, q * q_next))
            p, q = p_next, q_next
        raise AssertionError("unreachable")

    @classmethod
    def rational(cls, value: Fraction) -> "Alpha":
        return cls("rational", Fraction(value), Fraction(0))

    def to_json(self) -> Any:
        if self.tag == "rational":
            return {"num": self.value.numerator, "den": self.value.denominator}
        return self.tag

    @classmethod
    def from_json(cls, data: Any) -> "Alpha":
        if isinstance(data, str):
            return cls.irrational(data)
        if isinstance(data, Mapping) and "num" in data and "den" in data:
            return cls.rational(Fraction(int(data["num"]), int(data["den"])))
        raise SpecError(f"alpha must be 'golden', 'sqrt2' or {{num, den}}, got {data!r}")


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class HorosphereCut:
    ray: RaySpec
    alpha: Alpha
    theta: Fraction
    epsilon: Fraction

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise SpecError("epsilon must lie in (0, 1)")
        if not 0 <= self.theta < 1:
            raise SpecError("theta must lie in [0, 1)")

    def phase(self, m: int) -> Fraction:
        return _frac(self.theta + self.alpha.value * m)

    def level_selected(self, m: int) -> bool:
        return self.phase(m) < self.epsilon

    def level_ambiguous(self, m: int) -> bool:
        err = self.alpha.error * abs(m)
        if err == 0:
            return False
        x = self.phase(m)
        return min(x, 1 - x) <= err or abs(x - self.epsilon) <= err

    def selects(self, tree: TreeGraph):
        """Vertex predicate ``v -> v lies on a selected horosphere``."""
        return lambda v: self.level_selected(busemann(tree, self.ray, v))

    def to_json(self) -> dict[str, Any]:
        return {
            "ray": self.ray.to_json(),
            "alpha": self.alpha.to_json(),
            "theta": rational.fmt(self.theta),
            "epsilon": rational.fmt(self.epsilon),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "HorosphereCut":
        return cls(
            RaySpec.from_json(data["ray"]),
            Alpha.from_json(data["alpha"]),
            rational.parse(data.get("theta", "0/1")),
            rational.parse(data["epsilon"]),
        )


def centered_theta(alpha: Alpha, epsilon: Fraction, level: int) -> Fraction:
    """Offset placing ``level`` at the middle of the selection window."""
    return _frac(Fraction(epsilon) / 2 - alpha.value * level)


def selected_levels(cut: HorosphereCut, lo: int, hi: int) -> tuple[list[int], list[int]]:
    """Selected and ambiguous levels in ``lo..hi`` inclusive."""
    chosen = [m for m in range(lo, hi + 1) if cut.level_selected(m)]
    unsure = [m for m in range(lo, hi + 1) if cut.level_ambiguous(m)]
    return chosen, unsure


def level_density(cut: HorosphereCut, L: int) -> Fraction:
    """Fraction of selected levels among ``L`` consecutive levels centered at 0."""
    lo = -(L // 2)
    chosen, _ = selected_levels(cut, lo, lo + L - 1)
    return Fraction(len(chosen), L)


def level_gaps(cut: HorosphereCut, lo: int, hi: int) -> list[int]:
    chosen, _ = selected_levels(cut, lo, hi)
    return [b - a for a, b in zip(chosen, chosen[1:])]


def horosphere_subset(tree: Graph, cut: HorosphereCut, region: Iterable[str]) -> frozenset[str]:
    tree = _require_tree(tree)
    pick = cut.selects(tree)
    return frozenset(v for v in region if pick(v))


# --------------------------------------------------------------------------
# horosphere witnesses on the ray quotient


def _offray(d: int, j: int) -> int:
    return d - 1 if j == 0 else d - 2


def ray_tree_chain(d: int) -> LumpedChain:
    """Classes ``(j, l)``: vertices of length ``l`` leaving the ray after ``j`` letters.

    These are the orbits of the automorphisms fixing the root and the ray,
    so the walk from the root spreads mass uniformly inside each class.
    """

    def moves(s):
        j, l = s
        if l == j:
            out = [((j + 1, j + 1), 1), ((j, j + 1), _offray(d, j))]
            if j:
                out.append(((j - 1, j - 1), 1))
            return out
        return [((j, l - 1), 1), ((j, l + 1), d - 1)]

    def size(s):
        j, l = s
        return 1 if l == j else _offray(d, j) * (d - 1) ** (l - j - 1)

    return LumpedChain((0, 0), moves, lambda s: d, size)


def _subtree_size(d: int, levels: int) -> int:
    return sum((d - 1) ** i for i in range(levels))


@dataclass
class _ComponentType:
    key: tuple
    count: int
    mass: Fraction
    bmass: Fraction
    size: int


class HorosphereWitnessSearch:
    """Partition witnesses for ``T \\ S_eps`` at every step up to ``n_max``.

    Works on the ray quotient of the tree, so ``n`` in the hundreds is
    cheap even though the explicit ball would have ``(d-1)^n`` vertices.
    Component finiteness is certified from the selected levels: each
    component lives between two consecutive selected horospheres.
    """

    def __init__(self, tree: Graph, cut: HorosphereCut, n_max: int, window: int | None = None):
        self.tree = _require_tree(tree)
        cut.ray.validate(self.tree)
        self.cut = cut
        self.d = self.tree.max_degree
        self.n_max = n_max
        if window is None:
            window = n_max + 4 * math.ceil(1 / cut.epsilon) + 10
        self.window = window
        self.levels, self.ambiguous = selected_levels(cut, -window, window)
        self._level_set = set(self.levels)
        self.chain = ray_tree_chain(self.d)

    def band(self, b: int) -> tuple[int | None, int | None]:
        """Nearest selected levels strictly below and above ``b``."""
        i = bisect.bisect_left(self.levels, b)
        lo = self.levels[i - 1] if i > 0 else None
        j = bisect.bisect_right(self.levels, b)
        hi = self.levels[j] if j < len(self.levels) else None
        return lo, hi

    def _component_size(self, key: tuple) -> int:
        d = self.d
        if key[0] == "off":
            _, j, m1, m2 = key
            return _subtree_size(d, m2 - m1 - 1)
        _, m1, m2 = key
        total = 0
        for i in range(max(0, 1 - m2), -(m1 + 1) + 1):
            total += 1 + _offray(d, i) * _subtree_size(d, m2 - 1 + i)
        return total

    def witness(self, n: int, masses: Mapping[tuple[int, int], Fraction]) -> CutWitness:
        d = self.d
        types: dict[tuple, _ComponentType] = {}
        cut_mass = Fraction(0)
        adjacent_mass = Fraction(0)
        open_bands = False
        max_point = Fraction(0)
        for (j, l), m in masses.items():
            size = self.chain.size((j, l))
            max_point = max(max_point, m / size)
            b = l - 2 * j
            if b in self._level_set:
                cut_mass += m
                continue
            m1, m2 = self.band(b)
            if m1 is None or m2 is None:
                open_bands = True
                key = ("open", j, str(m1), str(m2))
                count_, csize = 1, 0
            elif -j > m1:
                key = ("ray", m1, m2)
                count_, csize = 1, 0
            else:
                anchor = m1 + 1 + 2 * j
                key = ("off", j, m1, m2)
                count_, csize = self.chain.size((j, anchor)), 0
            t = types.get(key)
            if t is None:
                t = types[key] = _ComponentType(key, count_, Fraction(0), Fraction(0), csize)
            t.mass += m
            if m1 is not None and b == m1 + 1 or m2 is not None and b == m2 - 1:
                t.bmass += m
                adjacent_mass += m

        order = sorted(types.values(), key=lambda t: (-t.mass / t.count, t.key))
        half = Fraction(1, 2)
        running = Fraction(0)
        chosen: list[tuple[_ComponentType, int]] = []
        flags: list[str] = []
        first = True
        done = False
        for t in order:
            per = t.mass / t.count
            need = running + t.mass
            if need < half:
                chosen.append((t, t.count))
                running = need
                first = False
                continue
            c = math.ceil((half - running) / per)
            if first and c == 1:
                raise DegeneratePartition(f"heaviest component carries {float(per):.4f} of the mass at n={n}")
            if c > 1:
                chosen.append((t, c - 1))
            done = True
            break
        if not done:
            flags.append("components-below-half")
        if not chosen:
            raise DegeneratePartition(f"no component carries mass at n={n}")
        if any(t.key[0] == "open" for t, _ in chosen):
            raise GuardTooSmall(f"a chosen component is not bounded by selected levels within +-{self.window}")
        mass_S = sum((t.mass * c / t.count for t, c in chosen), Fraction(0))
        mass_b = sum((t.bmass * c / t.count for t, c in chosen), Fraction(0))
        ratio = mass_b / mass_S
        span_lo = min(t.key[-2] for t, _ in chosen)  # open types were rejected above
        span_hi = max(t.key[-1] for t, _ in chosen)
        if any(span_lo <= m <= span_hi for m in self.ambiguous):
            flags.append("ambiguous-levels")
        else:
            flags.append("confirmed")
        if open_bands:
            flags.append("unbounded-bands-elsewhere")

        eps = self.cut.epsilon
        y = (d + 1) * eps
        sizes = [self._component_size(t.key) for t in types.values() if t.key[0] != "open"]
        M = max(sizes) if sizes and not open_bands else None
        certified = None
        removed = cut_mass + adjacent_mass
        if M is not None and (3 * M * max_point) ** 2 <= y and removed**2 <= 4 * y:
            flags.append("claim-hypotheses-hold")
            certified = claim_bound(d, eps)
        classes = tuple(
            {
                "component": list(t.key),
                "components_used": used,
                "components_of_type": t.count,
                "mass_each": rational.fmt(t.mass / t.count),
            }
            for t, used in chosen
        )
        return CutWitness(
            n, (), (), mass_S, mass_b, ratio, "partition-witness",
            certified_below=certified, flags=tuple(flags), classes=classes,
        )

    def run(
        self, stop_at_first: bool = True, odd_only: bool = False
    ) -> tuple[CutWitness | None, list[dict[str, Any]]]:
        """Scan ``n = 1..n_max``; return the first qualifying witness and a log.

        With ``odd_only`` even steps are skipped: the boundary levels of a
        component can have parity opposite to ``n`` and then carry no mass.
        """
        y = (self.d + 1) * self.cut.epsilon
        found = None
        log = []
        for n, masses in enumerate(self.chain.kernels(self.n_max)):
            if n == 0 or odd_only and n % 2 == 0:
                continue
            try:
                w = self.witness(n, masses)
            except (DegeneratePartition, GuardTooSmall) as exc:
                log.append({"n": n, "status": type(exc).__name__})
                continue
            ok = (
                "confirmed" in w.flags
                and 3 * w.mass_S > 1
                and 2 * w.mass_S <= 1
                and w.ratio * w.ratio < 36 * y
            )
            log.append({"n": n, "status": "witness" if ok else "weak", "ratio": float(w.ratio), "mass_S": float(w.mass_S)})
            if ok and found is None:
                found = w
                if stop_at_first:
                    break
        return found, log


# --------------------------------------------------------------------------
# towers


def _require_tower(g: Graph) -> TowerGraph:
    if not isinstance(g, TowerGraph):
        raise UnsupportedGraph("tower diagnostics need a cycle-tower or sl2-tower graph")
    return g


def tower_level_mass(g: Graph, o: str, k: int, lazy: bool = False) -> dict[int, Fraction]:
    """``mu_o^k`` aggregated by tower level."""
    g = _require_tower(g)
    mu = heat_kernel(g, o, k, lazy=lazy)
    out: dict[int, Fraction] = defaultdict(Fraction)
    for v, m in mu.masses.items():
        out[g.level(v)] += m
    return dict(sorted(out.items()))


def tower_level_mass_lumped(g: Graph, o: str, k: int, lazy: bool = False) -> dict[int, Fraction]:
    """Same quantity from the level chain; levels lump because degree depends on level only."""
    g = _require_tower(g)
    chain = tower_level_chain(g)
    chain.start = g.level(o)
    *_, last = chain.kernels(k, lazy=lazy)
    return dict(sorted(last.items()))


def tower_lower_levels(g: Graph, j: int) -> list[str]:
    """Vertices of ``G_0 u ... u G_j`` (explicit enumeration)."""
    g = _require_tower(g)
    out = []
    for k in range(j + 1):
        if hasattr(g, "elements"):
            out += g.elements(k)
        else:
            out += [f"{k}:{x}" for x in range(g.level_size(k))]
    return out


def tower_cut_ratio(g: Graph, o: str, k: int, j: int, lazy: bool = False):
    """``(mu(A_j), mu(boundary A_j), ratio)`` for ``A_j`` = levels ``<= j``."""
    g = _require_tower(g)
    mu = heat_kernel(g, o, k, lazy=lazy)
    return expansion_ratio(g, mu, tower_lower_levels(g, j))
