"""Experiment configuration: JSON files validated against a shipped schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from . import rational
from .constructions import Alpha, HorosphereCut, RaySpec, centered_theta, random_ray
from .errors import ConfigError, HeatlabError, InvalidVertex
from .graphs import GeneratorSpec, Graph, TreeGraph, default_root, make_generator

TASKS = ("heat", "flatten", "expansion", "witness", "folner", "horosphere", "tower", "stationarity")
RANDOMIZED = {"stationarity"}


@cache
def schema(name: str) -> dict[str, Any]:
    text = resources.files("heatlab").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _path(parts) -> str:
    return ".".join(str(p) for p in parts) or "<root>"


@dataclass
class ExperimentConfig:
    task: str
    graph: GeneratorSpec
    params: dict[str, Any] = field(default_factory=dict)
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    @property
    def seed(self) -> int | None:
        return self.params.get("seed")

    def build_graph(self) -> Graph:
        return make_generator(self.graph)

    def root(self, g: Graph) -> str:
        return self.params.get("root") or default_root(g)


def horosphere_cut(tree: Graph, data: Mapping[str, Any], where: str) -> HorosphereCut:
    """Build a cut from its config block; ``ray_seed`` draws a periodic ray."""
    if not isinstance(tree, TreeGraph):
        raise ConfigError(where, "horosphere cuts need a regular-tree or free-group graph")
    try:
        if "ray" in data:
            ray = RaySpec.from_json(data["ray"])
        else:
            ray = random_ray(tree, int(data.get("ray_seed", 0)))
        ray.validate(tree)
        alpha = Alpha.from_json(data["alpha"])
        epsilon = rational.parse(data["epsilon"])
        if "theta" in data:
            theta = rational.parse(data["theta"])
        elif "center_level" in data:
            theta = centered_theta(alpha, epsilon, int(data["center_level"]))
        else:
            theta = Fraction(0)
        return HorosphereCut(ray, alpha, theta, epsilon)
    except (HeatlabError, ValueError) as exc:
        raise ConfigError(where, str(exc)) from None


def validate(data: Any) -> ExperimentConfig:
    """Schema plus semantic checks; failures raise ``ConfigError`` naming the field."""
    validator = jsonschema.Draft202012Validator(schema("config"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_path(err.absolute_path), err.message)
    cfg = ExperimentConfig(
        data["task"],
        GeneratorSpec.from_dict(data["graph"]),
        {k: v for k, v in data.items() if k not in ("task", "graph")},
        dict(data),
    )
    try:
        g = cfg.build_graph()
    except (HeatlabError, OSError) as exc:
        raise ConfigError("graph", str(exc)) from None
    try:
        g.neighbors(cfg.root(g))
    except InvalidVertex as exc:
        raise ConfigError("root", str(exc)) from None
    for key in ("cut", "decoration"):
        if key in data:
            horosphere_cut(g, data[key], key)
    if cfg.task in RANDOMIZED and cfg.seed is None:
        raise ConfigError("seed", "randomized tasks need a seed")
    if cfg.task == "witness" and "guard" not in data:
        cfg.params["guard"] = 4
    return cfg


def load(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"config is not valid JSON: {exc}") from None
    return validate(data)
