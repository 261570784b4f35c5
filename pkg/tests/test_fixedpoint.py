from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from microarena.fixedpoint import (SUBTICK_US, SUBTICKS_PER_DECISION,
                                   fmt_milli, fmt_us_seconds, seconds_to_us,
                                   step_per_subtick, tdiv, to_milli)


def test_to_milli_exact_decimals():
    assert to_milli("3.15") == 3150
    assert to_milli("45") == 45000
    assert to_milli("0.5") == 500
    assert to_milli(0) == 0


def test_to_milli_rejects_sub_milli():
    with pytest.raises(ValueError):
        to_milli("0.0001")


def test_seconds_to_us():
    assert seconds_to_us("0.61") == 610_000
    assert seconds_to_us("2.14") == 2_140_000


def test_subtick_layout():
    assert SUBTICK_US * SUBTICKS_PER_DECISION == 500_000  # 2 Hz decisions


def test_fmt_milli():
    assert fmt_milli(45000) == "45"
    assert fmt_milli(31500) == "31.5"
    assert fmt_milli(30062) == "30.062"
    assert fmt_milli(0) == "0"


def test_fmt_us_seconds():
    assert fmt_us_seconds(11_000_000) == "11.0"
    assert fmt_us_seconds(8_250_000) == "8.3"  # rounds up the tenth


def test_tdiv_truncates_toward_zero():
    assert tdiv(7, 2) == 3
    assert tdiv(-7, 2) == -3
    assert tdiv(7, -2) == -3
    assert tdiv(-7, -2) == 3


@given(st.integers(-10**9, 10**9), st.integers(1, 10**6))
def test_tdiv_symmetry(a, b):
    assert tdiv(-a, b) == -tdiv(a, b)


def test_step_per_subtick_marine_speed():
    # 3.15 u/s at 16 Hz physics: floor(3150 / 16) per sub-tick
    assert step_per_subtick(3150) == 196
