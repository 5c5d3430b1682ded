"""Reports: config echo, deterministic results payload and provenance."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import jsonschema

from . import __version__
from .config import schema
from .heat import PRNG_TAG


@dataclass
class Report:
    config: dict[str, Any]
    results: dict[str, Any]
    mode: str = "exact"
    wall_time_s: float = 0.0
    threads: int = 1

    def provenance(self) -> dict[str, Any]:
        return {
            "version": __version__,
            "mode": self.mode,
            "prng": PRNG_TAG,
            "wall_time_s": round(self.wall_time_s, 6),
            "threads": self.threads,
        }

    def to_json(self) -> dict[str, Any]:
        return {"config": self.config, "results": self.results, "provenance": self.provenance()}

    def results_bytes(self) -> bytes:
        """Canonical serialization of the payload that reruns must reproduce."""
        return json.dumps(self.results, sort_keys=True, separators=(",", ":")).encode()

    def validate(self) -> None:
        jsonschema.validate(self.to_json(), schema("report"))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", "utf-8")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
