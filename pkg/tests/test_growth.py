import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from polyafreq.growth import (
    GrowthEstimate, beuermann_lambda, direct_disk_growth, disk_sigma, disk_type_estimate,
    dyadic_block_sups, levin_estimate, levin_sigma, limsup_extrapolate, log_order_type_disk,
    log_order_type_entire, singularity_circle_growth,
)
from polyafreq.proxorder import make_constant_po
from polyafreq.seqcore import (
    AESWParams, binomial_alternating_transform, family_aesw, family_qproduct, from_function,
    from_logs, from_values,
)


def logs(fn):
    return from_logs(lambda ks: fn(np.asarray(ks, dtype=float)))


ONE = make_constant_po(1.0)
SQRT2 = logs(lambda k: 2 * np.sqrt(k))


# --- extrapolation -----------------------------------------------------------

def test_extrapolate_examples():
    const = [(2 ** j, 0.7) for j in range(2, 10)]
    v, res, inf = limsup_extrapolate(const)
    assert (v, res, inf) == (0.7, 0.0, False)
    harmonic = [(2 ** j, 1 - 1 / j) for j in range(1, 9)]
    assert limsup_extrapolate(harmonic)[0] == pytest.approx(1.0, abs=1e-2)
    grow = [(2 ** j, float(j * j)) for j in range(1, 9)]
    assert limsup_extrapolate(grow)[2] is True


def test_extrapolate_needs_four_windows():
    with pytest.raises(ValueError):
        limsup_extrapolate([(2, 1.0), (4, 0.5), (8, 0.25)])


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.1, 10), b=st.floats(-5, 5))
def test_extrapolate_recovers_inv_log_model(a, b):
    pts = [(2 ** j, a + b / math.log(2 ** j)) for j in range(3, 14)]
    assert limsup_extrapolate(pts)[0] == pytest.approx(a, rel=1e-8, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300))
def test_running_sup_monotone(vals):
    ks = np.arange(1, len(vals) + 1)
    est = GrowthEstimate("disk_type", dyadic_block_sups(ks, np.array(vals)), 0.0, 0.0)
    rs = est.running_sup
    assert all(b >= a for a, b in zip(rs, rs[1:]))
    assert rs[-1] == max(vals) == est.raw_sup


def test_dyadic_blocks():
    ks = np.arange(1, 20)
    blocks = dyadic_block_sups(ks, -np.abs(ks - 5.0))
    assert [b[0] for b in blocks] == [2, 4, 8, 16, 20]
    assert blocks[2] == (8, 5, 0.0)


# --- inversions --------------------------------------------------------------

def test_sigma_inversions():
    assert levin_sigma(math.e, 1.0) == pytest.approx(1.0)
    assert disk_sigma(2.0, 1.0) == pytest.approx(1.0)
    assert disk_sigma(3.0, 1.0) == pytest.approx(9 / 4)


# --- Levin -------------------------------------------------------------------

def test_levin_exponential():
    est = levin_estimate(logs(lambda n: -gammaln(n + 1)), ONE, 10 ** 4)
    assert math.e * 0.99 <= est.raw_sup <= math.e
    assert est.derived["sigma_B"] == pytest.approx(1.0, abs=0.01)


def test_levin_order_two():
    est = levin_estimate(logs(lambda n: -gammaln(n / 2 + 1)), make_constant_po(2.0), 10 ** 4)
    assert est.extrapolated == pytest.approx(math.sqrt(2 * math.e), rel=0.02)
    assert est.derived["sigma_B"] == pytest.approx(1.0, abs=0.02)


def test_levin_finite_support_degenerate():
    est = levin_estimate(from_values([1, 2, 3]), ONE, 1000)
    assert est.degenerate and est.extrapolated == 0


# --- disk type ---------------------------------------------------------------

def test_disk_type_examples():
    est = disk_type_estimate(SQRT2, ONE, 10 ** 6)
    assert 1.98 <= est.raw_sup <= 2.0 * (1 + 1e-12)
    assert est.derived["sigma_h"] == pytest.approx(1.0, abs=0.04)
    est = disk_type_estimate(logs(lambda k: 3 * np.sqrt(k)), ONE, 10 ** 6)
    assert est.derived["sigma_h"] == pytest.approx(9 / 4, rel=0.04)
    est = disk_type_estimate(from_function(lambda k: F(1)), ONE, 1000)
    assert est.degenerate


# --- Beuermann ---------------------------------------------------------------

@pytest.mark.parametrize("fn,lam,tol", [
    (lambda k: 0 * k, 0.0, 1e-12),
    (lambda k: np.sqrt(k), 1.0, 0.05),
    (lambda k: k ** (2 / 3), 2.0, 0.1),
])
def test_beuermann(fn, lam, tol):
    est = beuermann_lambda(logs(fn), 10 ** 6)
    assert est.derived["lambda"] == pytest.approx(lam, abs=tol)


def test_beuermann_infinite():
    # log a_k = k / (log k)^0.1: radius 1 but faster than every k^(1-eps)
    est = beuermann_lambda(logs(lambda k: k / np.log(k + 2) ** 0.1), 10 ** 5)
    assert est.infinite and est.derived["lambda"] == math.inf


def test_faber_consistency_synthetic():
    # log a_k = 2 sqrt k: disk order 1 with sigma_h = 1 and Beuermann lambda = 1
    sig = disk_type_estimate(SQRT2, ONE, 10 ** 6).derived["sigma_h"]
    lam = beuermann_lambda(SQRT2, 10 ** 6).derived["lambda"]
    assert sig == pytest.approx(1.0, abs=0.04)
    assert lam == pytest.approx(1.0, abs=0.05)


# --- logarithmic order and type ----------------------------------------------

def test_log_order_entire_gaussian():
    est = log_order_type_entire(logs(lambda n: -n ** 2), 1000)
    assert est.derived["rho0"] == pytest.approx(2.0, abs=0.05)
    assert est.derived["sigma0"] == pytest.approx(0.25, abs=0.02)


def test_log_type_entire_qproduct():
    est = log_order_type_entire(family_qproduct(F(1, 2), 40), 40, rho0=2.0)
    assert est.derived["sigma0"] == pytest.approx(1 / (2 * math.log(2)), rel=0.10)


def test_log_order_entire_infinite():
    est = log_order_type_entire(logs(lambda n: -gammaln(n + 1)), 1000)
    assert est.infinite and est.derived["rho0"] == math.inf


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_log_order_disk_powers_of_log(p):
    est = log_order_type_disk(logs(lambda k: np.log(k) ** p), 10 ** 6)
    assert est.derived["rho0"] == pytest.approx(p, abs=0.05)
    assert est.derived["sigma0"] == pytest.approx(1.0, abs=0.05)


def test_log_order_disk_boundary():
    est = log_order_type_disk(from_function(lambda k: F(1)), 10 ** 4)
    assert est.derived["rho0"] == 1.0
    assert math.isnan(est.derived["sigma0"]) and est.degenerate


# --- direct measurements -------------------------------------------------------

def test_direct_geometric_is_order_zero():
    geo = family_aesw(AESWParams(0, (), (F(1, 2),)))
    est = direct_disk_growth(geo, [1 - 2.0 ** -j for j in range(3, 12)], po=ONE)
    vals = [w[2] for w in est.window_values]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_direct_sqrt_proxy():
    est = direct_disk_growth(SQRT2, [1 - 2.0 ** -j for j in range(3, 11)], po=ONE,
                             correction="power", power=1.0)
    assert est.extrapolated == pytest.approx(1.0, rel=0.05)


def test_direct_matches_coefficient_side():
    a = logs(lambda k: np.log(k + 1) ** 2)
    coef = log_order_type_disk(a, 10 ** 6).derived["sigma0"]
    direct = direct_disk_growth(a, [1 - 2.0 ** -j for j in range(3, 13)], "log_type",
                                rho0=2.0, correction="log_log")
    assert direct.extrapolated == pytest.approx(coef, rel=0.15)


def test_singularity_simple_poles():
    xs = [10.0, 25.0, 50.0, 100.0]
    h1 = binomial_alternating_transform(from_function(lambda k: F(1)), 30)
    est = singularity_circle_growth(h1, xs, mode="plain")
    assert all(w[2] == pytest.approx(1.0, rel=1e-8) for w in est.window_values)
    h2 = binomial_alternating_transform(from_function(lambda k: F(k + 1)), 30)
    est = singularity_circle_growth(h2, xs, po=make_constant_po(2.0), mode="plain")
    assert all(w[2] == pytest.approx(1.0, rel=1e-8) for w in est.window_values)


def test_singularity_flags_failure():
    h = from_function(lambda k: F(2) ** k)
    est = singularity_circle_growth(h, [10.0, 20.0])
    assert est.derived["failed_x"] == [10.0, 20.0]
    assert est.notes


def test_estimate_json():
    est = disk_type_estimate(SQRT2, ONE, 10 ** 4)
    d = json.loads(est.to_json())
    assert d["functional"] == "disk_type"
    assert len(d["window_values"]) == len(est.window_values)
