import math

import pytest
from hypothesis import given, strategies as st

from lsl.errors import ParameterError
from lsl.report import Check, VerificationReport, json_value, parse_report, serialize_report

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def sample_report():
    rep = VerificationReport("verify model", {"name": "torus", "a": -0.125, "grid": [4, 4]}, 7,
                             version="9.9.9")
    rep.add("legendrian", 1.25e-16, 1e-10)
    rep.add("A_norm_sq", 2.0000000000000058, 1e-4, "abs-diff", 2.0)
    rep.add("info", 0.1, comparison="reported")
    return rep


def test_check_comparisons():
    assert Check("a", 1e-11, 1e-10).passed
    assert not Check("a", 1e-10, 1e-10).passed          # strict upper gate
    assert Check("b", -3.0 + 1e-9, 1e-8, "abs-diff", -3.0).passed
    assert Check("c", 0.0, 0.0, "min").passed
    assert Check("d", float("nan"), 1.0).status == "fail"
    assert Check("e", 5.0, comparison="reported").status == "reported"


def test_check_validation():
    with pytest.raises(ParameterError):
        Check("x", 1.0, 1.0, "median")
    with pytest.raises(ParameterError):
        Check("x", 1.0)
    with pytest.raises(ParameterError):
        Check("x", 1.0, 1.0, "abs-diff")


def test_reported_rows_do_not_fail_a_report():
    rep = sample_report()
    rep.add("huge", 1e9, comparison="reported")
    assert rep.passed
    rep.add("bad", 1.0, 1e-3)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["bad"]


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_round_trip(fmt):
    rep = sample_report()
    back = parse_report(serialize_report(rep, fmt), fmt)
    assert back.command == rep.command and back.seed == rep.seed
    assert back.config == rep.config
    assert [(c.name, c.value, c.gate, c.comparison, c.target) for c in back.checks] == \
        [(c.name, c.value, c.gate, c.comparison, c.target) for c in rep.checks]
    assert serialize_report(back, fmt) == serialize_report(rep, fmt)


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_empty_report(fmt):
    rep = VerificationReport("report", {}, None, version="1")
    back = parse_report(serialize_report(rep, fmt), fmt)
    assert back.checks == [] and back.passed and back.seed is None


@given(values=st.lists(finite, min_size=1, max_size=8), seed=st.integers(0, 2 ** 31))
def test_values_survive_exactly(values, seed):
    rep = VerificationReport("x", {"v": values[0]}, seed, version="1")
    for k, v in enumerate(values):
        rep.add(f"c{k}", v, comparison="reported")
    for fmt in ("json", "csv"):
        back = parse_report(serialize_report(rep, fmt), fmt)
        assert [c.value for c in back.checks] == [float(v) for v in values]


def test_non_finite_values():
    rep = VerificationReport("x", {}, 0, version="1")
    rep.add("inf", math.inf, 1.0)
    for fmt in ("json", "csv"):
        back = parse_report(serialize_report(rep, fmt), fmt)
        assert math.isnan(back.checks[0].value)
        assert back.checks[0].status == "fail"


def test_serialization_is_deterministic_and_timing_is_opt_in():
    a, b = serialize_report(sample_report()), serialize_report(sample_report())
    assert a == b
    assert b"wall_time" not in a
    rep = sample_report()
    rep.wall_time = 1.5
    assert b'"wall_time": 1.5' in serialize_report(rep)


def test_json_value_formats():
    assert json_value(1.0) == "1.0"
    assert json_value(0.1) == "0.10000000000000001"
    assert json_value({"b": 1, "a": [True, None]}) == '{"a": [true, null], "b": 1}'
    with pytest.raises(ParameterError):
        json_value(object())


def test_unknown_format():
    with pytest.raises(ParameterError):
        serialize_report(sample_report(), "xml")
    with pytest.raises(ParameterError):
        parse_report(b"", "yaml")
