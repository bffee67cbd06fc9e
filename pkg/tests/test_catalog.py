import dataclasses
import json

import pytest

from fibsum.catalog import (
    FIELDS,
    IdentityRecord,
    catalog_verify,
    dumps_catalog,
    find_record,
    load_catalog,
    loads_catalog,
    save_catalog,
    seed_assignments,
    shipped_catalog,
    shipped_catalog_path,
    sum_shape,
    two_path_check,
    var_range,
)
from fibsum.errors import SchemaError, UnknownRecord
from fibsum.sequences import FIB, STANDARD_SEEDS, Seed


def test_shipped_catalog_size_and_sections():
    recs = shipped_catalog()
    assert len(recs) >= 90
    sections = {r.section for r in recs}
    assert {"07", "11", "12", "13", "14"} <= sections
    assert len({r.id for r in recs}) == len(recs)


def test_power_sums_present():
    lhs = {r.lhs for r in shipped_catalog()}
    for text in ("sum(k=0..n, F[k]^3)", "sum(k=0..n, L[k]^3)", "sum(k=0..n, F[k]^4)", "sum(k=0..n, L[k]^4)"):
        assert text in lhs


def test_empty_array(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    assert load_catalog(path) == []
    assert dumps_catalog([]) == "[]\n"


def test_missing_declared_variable_names_symbol():
    with pytest.raises(SchemaError, match="'q'"):
        IdentityRecord("99.01", "sum(k=0..n, F[p + k])", "F[q]", {"n": (0, 3), "p": (0, 1)})


def test_schema_errors_carry_record_id():
    good = find_record("12.08").to_json()
    with pytest.raises(SchemaError) as err:
        IdentityRecord.from_json({**good, "extra": 1})
    assert err.value.record_id == "12.08"
    for field in FIELDS:
        broken = dict(good)
        del broken[field]
        with pytest.raises(SchemaError, match=field):
            IdentityRecord.from_json(broken)
    with pytest.raises(SchemaError):
        IdentityRecord.from_json({**good, "lhs": "sum(k=0..n, F[k]"})
    with pytest.raises(SchemaError):
        IdentityRecord.from_json({**good, "seeds": {"F": [0, 1]}})
    with pytest.raises(SchemaError):
        IdentityRecord.from_json({**good, "vars": {"n": [3, 1]}})
    with pytest.raises(SchemaError):
        loads_catalog(json.dumps([good, good]))
    with pytest.raises(SchemaError):
        loads_catalog("{}")
    with pytest.raises(SchemaError):
        loads_catalog("[")


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_catalog(tmp_path / "nope.json")


def test_byte_identical_round_trip(tmp_path):
    original = shipped_catalog_path().read_bytes()
    out = tmp_path / "again.json"
    save_catalog(load_catalog(shipped_catalog_path()), out)
    assert out.read_bytes() == original


def test_save_is_canonical(tmp_path):
    recs = shipped_catalog()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_catalog(reversed(recs), a)
    save_catalog(load_catalog(a), b)
    assert a.read_bytes() == b.read_bytes() == shipped_catalog_path().read_bytes()


def test_find_record():
    assert find_record("11.07").section == "11"
    with pytest.raises(UnknownRecord):
        find_record("11.99")
    with pytest.raises(UnknownRecord):
        find_record("11.07", sections=["12"])


def test_var_range_scaling():
    assert list(var_range(-3, 3, 1)) == [-1, 0, 1]
    assert list(var_range(0, 10, 3)) == list(range(0, 11))
    assert list(var_range(0, 10, 1)) == list(range(0, 7))
    assert list(var_range(1, 10, 0)) == list(range(1, 5))


def test_seed_assignments_cover_every_seed_in_every_slot():
    assigns = seed_assignments(("G", "H", "K"))
    for letter in "GHK":
        assert {a[letter] for a in assigns} == set(STANDARD_SEEDS)
    assert seed_assignments(()) == [{}]


def test_empty_catalog_report():
    report = catalog_verify([], 3, workers=1)
    assert report.results == [] and report.ok


def test_corrupted_record_is_isolated():
    recs = [find_record(i) for i in ("11.07", "12.08", "13.01")]
    bad = dataclasses.replace(recs[1], rhs=recs[1].rhs.replace("1/2", "1/3", 1))
    report = catalog_verify([recs[0], bad, recs[2]], 1, workers=1)
    assert report.failing == ["12.08"]
    result = report.results[1]
    assert result.failed > 0 and result.first_failure is not None


def test_report_is_deterministic():
    recs = [find_record(i) for i in ("11.07", "13.01", "14.01")]
    a = catalog_verify(recs, 1, workers=1).to_json()
    b = catalog_verify(list(reversed(recs)), 1, workers=1).to_json()
    assert a == b
    assert [r["id"] for r in a["results"]] == ["11.07", "13.01", "14.01"]


def test_pinned_seed_respected():
    rec = find_record("12.08")
    pinned = dataclasses.replace(rec, lhs="sum(k=0..n, G[k]^3)", seeds={"G": FIB})
    assert catalog_verify([pinned], 1, workers=1).ok
    wrong = dataclasses.replace(pinned, seeds={"G": Seed(2, 1)})
    assert not catalog_verify([wrong], 1, workers=1).ok


def test_constraint_skips_points():
    rec = IdentityRecord("99.01", "sum(k=0..n, x^k)", "(x^(n + 1) - 1) * (x - 1)^-1", {"n": (0, 6), "x": (-3, 3)}, "x - 1")
    report = catalog_verify([rec], 3, workers=1)
    assert report.ok and report.results[0].skipped == 11


@pytest.mark.parametrize("rid", ["11.07", "12.08", "12.14", "12.19", "13.01", "14.01"])
def test_two_path_agreement(rid):
    assert two_path_check(find_record(rid), grid_scale=1) == []


def test_two_path_agreement_all_records_small_grid():
    checked = 0
    for rec in shipped_catalog():
        try:
            sum_shape(rec)
        except ValueError:
            continue
        assert two_path_check(rec, grid_scale=0) == [], rec.id
        checked += 1
    assert checked >= 100
