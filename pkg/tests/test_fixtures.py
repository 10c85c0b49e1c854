import json

import pytest

from entconfusion import fixtures
from entconfusion.errors import FixtureError


def walk(expected):
    for key, val in expected.items():
        if isinstance(val, fixtures.Expectation):
            yield key, val
        else:
            yield from walk(val)


def test_catalog_lists_shipped_records():
    names = fixtures.catalog()
    assert "published_examples" in names and "table4" in names
    assert len(names) == len(set(names)) >= 10


@pytest.mark.parametrize("name", fixtures.catalog())
def test_every_record_parses(name):
    rec = fixtures.load_golden(name)
    assert rec.name == name and rec.description
    entries = list(walk(rec.expected))
    assert entries
    for key, exp in entries:
        assert exp.source in fixtures.SOURCES, key
        assert exp.tolerance >= 0, key


def test_unknown_fixture():
    with pytest.raises(FixtureError, match="unknown fixture"):
        fixtures.load_golden("no_such_record")


def test_missing_entry():
    rec = fixtures.load_golden("table4")
    assert rec.value("hidden") == 16
    with pytest.raises(FixtureError):
        rec["missing"]


def test_entry_without_provenance_is_rejected():
    with pytest.raises(FixtureError, match="source/tolerance"):
        fixtures._parse_expected("x", {"a": 1.0})
    with pytest.raises(FixtureError, match="unknown source"):
        fixtures._parse_expected("x", {"a": {"value": 1, "source": "guess", "tolerance": 0}})


def test_records_are_plain_json():
    path = fixtures._golden_dir() / "table4.json"
    doc = json.loads(path.read_text())
    assert set(doc) >= {"name", "description", "expected"}
