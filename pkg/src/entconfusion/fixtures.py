"""Golden reference records shipped with the package.

Each record is a JSON file under ``golden/`` holding named expected values,
each with a ``source`` (``published``, ``derived`` or ``definition``) and an
absolute tolerance.  Derived records are produced by
``scripts/make_fixtures.py`` from an implementation independent of this
package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import FixtureError

SOURCES = ("published", "derived", "definition")


@dataclass(frozen=True)
class Expectation:
    value: object
    source: str
    tolerance: float


@dataclass(frozen=True)
class GoldenRecord:
    name: str
    description: str
    inputs: dict
    expected: dict
    generator: dict

    def __getitem__(self, key: str) -> Expectation:
        try:
            return self.expected[key]
        except KeyError:
            raise FixtureError(f"record {self.name!r} has no entry {key!r}") from None

    def value(self, key: str):
        return self[key].value


def _golden_dir():
    return resources.files(__package__) / "golden"


def catalog() -> list[str]:
    return sorted(p.name[:-5] for p in _golden_dir().iterdir() if p.name.endswith(".json"))


def _parse_expected(name: str, raw: dict) -> dict:
    out = {}
    for key, val in raw.items():
        if isinstance(val, dict) and set(val) == {"value", "source", "tolerance"}:
            if val["source"] not in SOURCES:
                raise FixtureError(f"{name}:{key}: unknown source {val['source']!r}")
            out[key] = Expectation(val["value"], val["source"], float(val["tolerance"]))
        elif isinstance(val, dict):
            out[key] = _parse_expected(f"{name}:{key}", val)
        else:
            raise FixtureError(f"{name}:{key}: expected value lacks source/tolerance")
    return out


@lru_cache(maxsize=None)
def load_golden(name: str) -> GoldenRecord:
    path = _golden_dir() / f"{name}.json"
    if not path.is_file():
        raise FixtureError(f"unknown fixture {name!r}; available: {catalog()}")
    doc = json.loads(path.read_text())
    return GoldenRecord(
        doc["name"], doc["description"], doc.get("inputs", {}),
        _parse_expected(name, doc["expected"]), doc.get("generator", {}),
    )
