import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from polyafreq.proxorder import (
    DomainError, NonMonotoneError, ScaleFunction, check_condition_ii, check_int_identity,
    check_monotone, check_regular_variation, faber_forward, faber_inverse, invert_scale,
    make_constant_po, make_custom_po, make_logarithmic_po, make_tabulated_po, po_from_json,
    po_to_json, psi_of, rho1_of, xi_of,
)


def brentq_inverse(log_f, w):
    """Independent oracle: solve log_f(u) = w for u with scipy."""
    lo, hi = -50.0, 1.0
    while log_f(hi) < w:
        hi *= 2
    return brentq(lambda u: log_f(u) - w, lo, hi, xtol=1e-14, rtol=1e-15)


# --- constant orders ---------------------------------------------------------

def test_constant_examples():
    assert make_constant_po(2).V(3.0) == pytest.approx(9.0, rel=1e-15)
    assert make_constant_po(1).V(5.0) == pytest.approx(5.0, rel=1e-15)
    assert make_constant_po(0.5).V_inverse()(4.0) == pytest.approx(16.0, rel=1e-14)


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_constant_rejects_nonpositive(rho):
    with pytest.raises(ValueError):
        make_constant_po(rho)


def test_logarithmic_examples():
    e10 = math.exp(10)
    assert make_logarithmic_po(2).V(e10) == pytest.approx(100.0, rel=1e-13)
    assert make_logarithmic_po(3).V(e10) == pytest.approx(1000.0, rel=1e-13)
    assert make_logarithmic_po(2).V_inverse()(100.0) == pytest.approx(e10, rel=1e-6)
    with pytest.raises(ValueError):
        make_logarithmic_po(0.5)


def test_logarithmic_closed_form_above_patch():
    po = make_logarithmic_po(2.5)
    xs = np.logspace(1.5, 30, 40)
    assert np.allclose(po.V(xs), np.log(xs) ** 2.5, rtol=1e-12)


def test_logarithmic_patch_is_increasing_from_zero():
    po = make_logarithmic_po(2)
    xs = np.linspace(1e-6, 50, 4001)
    v = po.V(xs)
    assert np.all(np.diff(v) > 0)
    assert v[0] < 1e-5


def test_invert_scale_examples():
    v2 = make_constant_po(2).scale()
    assert invert_scale(v2)(16.0) == pytest.approx(4.0, rel=1e-12)
    assert xi_of(make_constant_po(1))(9.0) == pytest.approx(3.0, rel=1e-12)
    vl = make_logarithmic_po(2).scale()
    assert invert_scale(vl)(25.0) == pytest.approx(math.exp(5), rel=1e-10)


def test_invert_scale_matches_brentq_oracle():
    po = make_custom_po(lambda x: 1.0 + 1.0 / np.log(x), 1.0)
    inv = invert_scale(po.scale())
    for w in np.linspace(2.0, 30.0, 15):
        u_ref = brentq_inverse(lambda u: float(po.log_V(u)), w)
        assert float(inv.log(w)) == pytest.approx(u_ref, rel=1e-10, abs=1e-10)


def test_invert_rejects_non_monotone():
    bumpy = ScaleFunction(lambda u: np.asarray(u) + 3 * np.sin(np.asarray(u)), "custom")
    with pytest.raises(NonMonotoneError):
        check_monotone(bumpy)
    with pytest.raises(NonMonotoneError):
        invert_scale(bumpy)


def test_invert_domain_error():
    s = make_constant_po(1).scale()
    inv = invert_scale(s, domain=(2.0, 10.0))
    assert inv(5.0) == pytest.approx(5.0)
    with pytest.raises(DomainError):
        inv(50.0)


# --- derived scales ----------------------------------------------------------

def test_xi_examples():
    assert xi_of(make_constant_po(1))(100.0) == pytest.approx(10.0, rel=1e-12)
    assert xi_of(make_constant_po(2))(8.0) == pytest.approx(2.0, rel=1e-12)
    t = math.exp(10) * 100
    assert xi_of(make_logarithmic_po(2))(t) == pytest.approx(math.exp(10), rel=1e-5)


def test_psi_examples():
    assert psi_of(make_constant_po(1))(49.0) == pytest.approx(7.0, rel=1e-12)
    assert psi_of(make_constant_po(2))(8.0) == pytest.approx(4.0, rel=1e-12)


def test_psi_round_trip_logarithmic():
    po = make_logarithmic_po(2)
    psi = psi_of(po)
    vinv = po.V_inverse()
    # t V_{-1}(t) overflows floats quickly, so compose in log coordinates
    for w in np.log(np.logspace(2, 9, 15)):
        lx = w + float(vinv.log(w))
        assert float(psi.log(lx)) == pytest.approx(w, rel=1e-9)


@pytest.mark.parametrize("rho,lim", [(1.0, 0.5), (2.0, 2 / 3), (3.0, 0.75)])
def test_rho1_limits(rho, lim):
    r1 = rho1_of(make_constant_po(rho))
    assert r1.rho_limit == pytest.approx(lim)
    assert r1.rho(1e6) == pytest.approx(lim, abs=1e-6)


def test_rho1_rejects_zero_order():
    with pytest.raises(ValueError):
        rho1_of(make_logarithmic_po(2))


def test_faber_forward_constants():
    fa = faber_forward(make_constant_po(1))
    assert fa.rho_limit == pytest.approx(0.5)
    assert faber_forward(make_constant_po(2)).rho_limit == pytest.approx(2 / 3)


def test_faber_forward_logarithmic_decreasing():
    fa = faber_forward(make_logarithmic_po(2))
    vals = fa.rho(np.logspace(3, 9, 7))
    assert np.all(np.diff(vals) < 0)
    assert fa.rho_limit == 0


def test_faber_inverse_constants_and_rejection():
    assert faber_inverse(make_constant_po(0.5)).rho_limit == pytest.approx(1.0)
    assert faber_inverse(make_constant_po(2 / 3)).rho_limit == pytest.approx(2.0)
    with pytest.raises(ValueError):
        faber_inverse(make_constant_po(1.0))


def test_faber_round_trip_custom():
    po_a = make_custom_po(lambda t: 0.5 + 1.0 / np.log(t), 0.5, patch_x0=math.exp(4))
    back = faber_forward(faber_inverse(po_a))
    ts = np.logspace(4, 12, 17)
    assert np.allclose(back.rho(ts), po_a.rho(ts), rtol=1e-8)


@pytest.mark.parametrize("rho0", [2.0, 3.0])
def test_faber_round_trip_logarithmic(rho0):
    po = make_logarithmic_po(rho0)
    back = faber_inverse(faber_forward(po))
    xs = np.logspace(3, 12, 10)
    assert np.allclose(back.rho(xs), po.rho(xs), rtol=1e-8)


# --- checks ------------------------------------------------------------------

def test_regular_variation_examples():
    assert check_regular_variation(make_constant_po(2)) == pytest.approx(0.0, abs=1e-12)
    po = make_logarithmic_po(2)
    dev = check_regular_variation(po, (2.0, 2.0), [1e8], n_k=1)
    # (log 2e8 / log 1e8)^2 - 1
    assert dev == pytest.approx((math.log(2e8) / math.log(1e8)) ** 2 - 1, rel=1e-9)
    assert check_regular_variation(po, (2.0, 2.0), [math.exp(150)], n_k=1) < 0.01


def test_regular_variation_perturbed_decays():
    # x^{1 + 1/log x} = e x, so the deviation vanishes identically
    po = make_custom_po(lambda x: 1.0 + 1.0 / np.log(x), 1.0)
    assert check_regular_variation(po, (2.0, 2.0), np.logspace(2, 16, 8), n_k=1) < 1e-12
    # a slower perturbation whose deviation only decays
    po = make_custom_po(lambda x: 1.0 + 1.0 / np.log(np.log(x)), 1.0, patch_x0=math.exp(math.e))
    devs = [check_regular_variation(po, (2.0, 2.0), [x], n_k=1) for x in (1e4, 1e8, 1e16, 1e64)]
    assert all(a > b for a, b in zip(devs, devs[1:]))


@pytest.mark.parametrize("po", [make_constant_po(1), make_constant_po(2),
                                make_logarithmic_po(2)], ids=["rho1", "rho2", "log2"])
def test_int_identity(po):
    assert check_int_identity(po) < 1e-6


def test_int_identity_constant_exact():
    assert check_int_identity(make_constant_po(1), [100.0]) < 1e-14


def test_condition_ii_trend():
    po = make_custom_po(lambda x: 1.0 + 1.0 / np.log(x), 1.0,
                        derivative_fn=lambda x: -1.0 / (x * np.log(x) ** 2))
    q = check_condition_ii(po)
    assert np.all(np.diff(q) < 0)
    ql = check_condition_ii(make_logarithmic_po(2), np.logspace(2, 40, 6), normalized=False)
    assert np.all(np.diff(ql) < 0)


# --- serialisation -----------------------------------------------------------

@pytest.mark.parametrize("po", [make_constant_po(1.5), make_logarithmic_po(3)], ids=["c", "log"])
def test_json_round_trip(po):
    back = po_from_json(po_to_json(po))
    xs = np.logspace(2, 10, 9)
    assert np.allclose(back.V(xs), po.V(xs), rtol=1e-14)


def test_custom_serialises_as_tabulated():
    po = make_custom_po(lambda x: 1.0 + 1.0 / np.log(x), 1.0)
    back = po_from_json(po_to_json(po))
    assert back.kind == "tabulated"
    xs = np.logspace(2, 10, 9)
    assert np.allclose(back.rho(xs), po.rho(xs), rtol=1e-3)


def test_tabulated_interpolates_samples():
    samples = [[10.0, 1.2], [100.0, 1.1], [1e4, 1.05]]
    po = make_tabulated_po(samples, rho_limit=1.0)
    assert po.rho(100.0) == pytest.approx(1.1)


# --- properties --------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(rho=st.floats(0.2, 4.0), lt=st.floats(0.5, 40.0))
def test_property_constant_round_trips(rho, lt):
    po = make_constant_po(rho)
    t = math.exp(lt)
    assert po.V(po.V_inverse()(t)) == pytest.approx(t, rel=1e-9)
    assert faber_inverse(faber_forward(po)).rho_limit == pytest.approx(rho, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(rho0=st.floats(1.0, 4.0), lt=st.floats(1.0, 60.0))
def test_property_logarithmic_round_trip(rho0, lt):
    po = make_logarithmic_po(rho0)
    w = float(po.V_inverse().log(lt))
    assert float(po.log_V(w)) == pytest.approx(lt, rel=1e-9)
