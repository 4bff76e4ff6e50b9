import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhorseshoe import core_map as cm
from hhorseshoe.errors import ConstraintViolation, DomainError, Escaped

unit = st.floats(0.0, 1.0, allow_nan=False)


def test_default_params_accepted():
    p = cm.validate_params(0.25, 0.25, 6.5, 0.25, 3.5)
    assert p == cm.DEFAULT_PARAMS


@pytest.mark.parametrize(
    "raw, name, bound",
    [
        ((0.25, 0.25, 6.0, 0.25, 3.5), "beta0", ">6"),
        ((0.25, 0.25, 6.5, 1 / 3, 3.5), "sigma", "<1/3"),
        ((0.0, 0.25, 6.5, 0.25, 3.5), "lambda0", ">0"),
        ((0.25, 0.34, 6.5, 0.25, 3.5), "lambda1", "<1/3"),
        ((0.25, 0.25, 6.5, 0.25, 4.0), "beta1", "<4"),
        ((0.25, 0.25, 6.5, 0.25, 3.0), "beta1", ">3"),
    ],
)
def test_constraint_violation_names_bound(raw, name, bound):
    with pytest.raises(ConstraintViolation) as exc:
        cm.validate_params(*raw)
    assert (exc.value.name, exc.value.bound) == (name, bound)
    assert exc.value.value == raw[("lambda0", "lambda1", "beta0", "sigma", "beta1").index(name)]


def test_f_iter_fixed_points_and_identity():
    assert cm.f_iter(0.0, 17) == 0.0
    assert cm.f_iter(1.0, 17) == 1.0
    assert cm.f_iter(0.3, 0) == 0.3


def test_f_iter_matches_flow_oracle(oracle):
    assert cm.f_iter(0.5, 1) == pytest.approx(float(oracle["f_half_flow"]), rel=1e-14)
    assert cm.f_iter(0.5, 1) == pytest.approx(math.e / (math.e + 1), rel=1e-15)


def test_f_iter_three_fold_composition():
    assert abs(cm.f_iter(0.5, 3) - cm.f_iter(cm.f_iter(cm.f_iter(0.5, 1), 1), 1)) <= 1e-12


def test_f_iter_domain():
    with pytest.raises(DomainError):
        cm.f_iter(1.5, 1)
    with pytest.raises(DomainError):
        cm.f_iter(-0.1, 1)
    with pytest.raises(DomainError):
        cm.f_iter(0.5, -1)


def test_df_iter_boundary_values():
    assert cm.df_iter(1.0, 1) == pytest.approx(math.exp(-1), abs=1e-15)
    assert cm.df_iter(0.0, 1, allow_zero=True) == pytest.approx(math.e, abs=1e-15)
    with pytest.raises(DomainError):
        cm.df_iter(0.0, 1)
    with pytest.raises(DomainError):
        cm.df_iter(0.5, 0)


def test_df_iter_half_matches_oracle(oracle):
    assert cm.df_iter(0.5, 1) == pytest.approx(float(oracle["df_half"]), rel=1e-14)
    h = 1e-6
    fd = (cm.f_iter(0.5 + h, 1) - cm.f_iter(0.5 - h, 1)) / (2 * h)
    assert cm.df_iter(0.5, 1) == pytest.approx(fd, rel=1e-8)


@settings(max_examples=200, deadline=None)
@given(unit, st.integers(0, 40), st.integers(0, 40))
def test_f_iter_is_a_flow(y, n, m):
    assert abs(cm.f_iter(y, n + m) - cm.f_iter(cm.f_iter(y, n), m)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1.0), st.integers(1, 50))
def test_df_iter_chain_rule(y, n):
    prod = 1.0
    v = y
    for _ in range(n):
        prod *= cm.df_iter(v, 1, allow_zero=True)
        v = cm.f_iter(v, 1)
    assert cm.df_iter(y, n) == pytest.approx(prod, rel=1e-10)


def test_df_decreasing_and_f_increasing():
    grid = np.linspace(0, 1, 10_001)
    assert np.all(np.diff(cm.df_iter(grid[1:], 1)) < 0)
    for n in (1, 4, 9):
        assert np.all(np.diff(cm.f_iter(grid, n)) > 0)
    # for large n the image saturates at 1.0 in double precision
    assert np.all(np.diff(cm.f_iter(grid, 30)) >= 0)


def test_log_df_endpoints():
    assert cm.log_df(0.0) == 1.0
    assert cm.log_df(1.0) == -1.0
    assert cm.log_df(0.5) == pytest.approx(math.log(cm.df_iter(0.5, 1)))


def test_apply_F_fixed_saddles_exact():
    assert cm.apply_F(cm.Q) == cm.Q
    assert cm.apply_F(cm.P) == cm.P


def test_apply_F_branch_one(oracle):
    img = cm.apply_F(cm.Point3(0.5, 0.5, 1.0))
    expect = [float(v) for v in oracle["F1_point"]]
    assert list(img) == pytest.approx(expect, rel=1e-15)


def test_apply_F_gap_and_boundaries():
    with pytest.raises(Escaped) as exc:
        cm.apply_F(cm.Point3(0, 0, 0.5))
    assert exc.value.reason == "gap_z"
    # z = 1/6 belongs to R0 and is mapped to beta0/6 > 1
    with pytest.raises(Escaped) as exc:
        cm.apply_F(cm.Point3(0, 0, 1 / 6))
    assert exc.value.reason == "image_outside"
    assert cm.symbol_of(cm.Point3(0, 0, 1 / 6)) == 0
    assert cm.symbol_of(cm.Point3(0, 0, 5 / 6)) == 1


def test_orbit_records():
    rec = cm.orbit(cm.Q, cm.DEFAULT_PARAMS, 5)
    assert rec.itinerary == "00000" and rec.escaped_at is None and len(rec.points) == 6
    rec = cm.orbit(cm.Point3(0, 0, 0.5), cm.DEFAULT_PARAMS, 5)
    assert rec.escaped_at == 0 and rec.itinerary == ""
    rec = cm.orbit(cm.Point3(0.5, 0.5, 1.0), cm.DEFAULT_PARAMS, 3)
    assert rec.itinerary.startswith("1")
    assert rec.points[1] == cm.apply_F(cm.Point3(0.5, 0.5, 1.0))
    assert len(rec.itinerary) == len(rec.points) - 1


def test_orbit_never_repeats_one():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        rec = cm.orbit(cm.Point3(*rng.random(3)), cm.DEFAULT_PARAMS, 25)
        assert "11" not in rec.itinerary
