import itertools
import json
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyafreq.seqcore import (
    AESWParams, Enclosure, LogFloat, dh_transform, family_aesw,
    from_function, from_values,
)
from polyafreq.totalpos import (
    EXHAUSTIVE_CAP, MinorBudgetError, bareiss_det, build_window, cofactor_det, count_minors,
    karlin_grid_check, minor_det, verify_pf,
)


def leibniz(m):
    """Permutation-sum determinant, the slowest and most literal oracle."""
    n = len(m)
    tot = F(0)
    for p in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        prod = F(1)
        for i in range(n):
            prod *= m[i][p[i]]
        tot += -prod if inv % 2 else prod
    return tot


def brute_pf(vals, r, N):
    """All minors of order <= r via the Leibniz oracle; True iff none negative."""
    a = [F(v) for v in vals] + [F(0)] * N
    for k in range(1, r + 1):
        for rows in itertools.combinations(range(N), k):
            for cols in itertools.combinations(range(N), k):
                m = [[a[j - i] if j >= i else 0 for j in cols] for i in rows]
                if leibniz(m) < 0:
                    return False
    return True


# --- determinants ------------------------------------------------------------

def test_hilbert_closed_form():
    for n in range(1, 7):
        h = [[F(1, i + j + 1) for j in range(n)] for i in range(n)]
        # det H_n = c_n^4 / c_{2n}, c_n = prod_{i<n} i!
        c = lambda m: math.prod(math.factorial(i) for i in range(m))
        ref = F(c(n) ** 4, c(2 * n))
        assert bareiss_det(h) == ref == cofactor_det(h)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.fractions(-20, 20, max_denominator=30), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(m):
    assert bareiss_det(m) == leibniz(m) == cofactor_det(m)


def test_bareiss_singular_and_pivoting():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[1, 2], [2, 4]]) == 0
    assert bareiss_det([[0, 0, 1], [0, 1, 0], [1, 0, 0]]) == -1
    assert bareiss_det([]) == 1


def test_bareiss_agrees_with_numpy():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 6)
        m = [[F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)] for _ in range(n)]
        assert float(bareiss_det(m)) == pytest.approx(
            np.linalg.det(np.array(m, dtype=float)), rel=1e-9, abs=1e-9)


# --- windows -----------------------------------------------------------------

def test_window_examples():
    assert build_window(from_values([1, 1, 1]), 2).entries == [[1, 1], [0, 1]]
    nat = from_function(lambda k: F(k))
    assert build_window(nat, 3).entries == [[0, 1, 2], [0, 0, 1], [0, 0, 0]]
    geo = family_aesw(AESWParams(0, (), (F(1, 2),)))
    assert build_window(geo, 2).entries == [[1, F(1, 2)], [0, 1]]


def test_window_toeplitz_structure():
    w = build_window(family_aesw(AESWParams(F(1, 3), (2,))), 9)
    e = w.entries
    for i in range(8):
        for j in range(8):
            assert e[i][j] == e[i + 1][j + 1]
    assert all(e[i][j] == 0 for i in range(9) for j in range(i))


def test_minor_examples():
    ones = build_window(from_function(lambda k: F(1)), 4)
    assert minor_det(ones, [0], [0]) == 1
    nat = build_window(from_function(lambda k: F(k)), 4)
    assert minor_det(nat, [0, 1], [1, 2]) == 1
    w = build_window(from_values([1, 1, 3]), 3)
    assert minor_det(w, [0, 1], [1, 2]) == -2
    with pytest.raises(ValueError):
        minor_det(w, [0, 1], [1])
    with pytest.raises(IndexError):
        minor_det(w, [0, 5], [1, 2])


def test_minor_interval_contains_exact():
    vals = [1.0 / math.factorial(k) for k in range(12)]
    wf = build_window(from_values(vals), 12)
    we = build_window(from_values([F(v) for v in vals]), 12)
    rng = random.Random(1)
    for _ in range(100):
        k = rng.randint(1, 4)
        rows = sorted(rng.sample(range(12), k))
        cols = sorted(rng.sample(range(12), k))
        enc = minor_det(wf, rows, cols)
        assert isinstance(enc, Enclosure)
        assert enc.lo <= minor_det(we, rows, cols) <= enc.hi


# --- verify_pf ---------------------------------------------------------------

def test_verify_examples():
    assert verify_pf(from_function(lambda k: F(1)), 2, 5).status == "certified_pass"
    v = verify_pf(from_values([1, 1, 3]), 2, 3)
    assert v.status == "counterexample"
    assert F(v.witness["det"]) == -2
    nat = from_function(lambda k: F(k))
    assert verify_pf(nat, 2, 8).status == "certified_pass"


def test_witness_recomputable_and_first():
    s = from_values([1, 2, 5, 1, 3])
    v = verify_pf(s, 2, 5)
    wt = v.witness
    w = build_window(s, 5)
    assert minor_det(w, wt["rows"], wt["cols"]) == F(wt["det"]) < 0
    # oracle: lexicographically first negative minor
    first = None
    for k in (1, 2):
        for rows in itertools.combinations(range(5), k):
            for cols in itertools.combinations(range(5), k):
                if minor_det(w, rows, cols) < 0:
                    first = (k, list(rows), list(cols))
                    break
            if first:
                break
        if first:
            break
    assert (wt["order"], wt["rows"], wt["cols"]) == first


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-2, 5), min_size=1, max_size=6), st.integers(1, 3))
def test_verify_matches_brute_force(vals, r):
    N = max(r, 5)
    s = from_values(vals)
    assert verify_pf(s, r, N, strategy="exhaustive").passed == brute_pf(vals, r, N)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=7), min_size=1, max_size=12))
def test_pf1_iff_nonnegative(vals):
    N = len(vals)
    assert verify_pf(from_values(vals), 1, N).passed == all(v >= 0 for v in vals)


def test_budget_and_window_errors():
    with pytest.raises(ValueError):
        verify_pf(from_values([1, 1]), 3, 2)
    assert count_minors(40, 4) > EXHAUSTIVE_CAP
    with pytest.raises(MinorBudgetError):
        verify_pf(family_aesw(AESWParams(1)), 4, 40, strategy="exhaustive")


def test_sampled_is_reproducible():
    s = family_aesw(AESWParams(1))
    a = verify_pf(s, 3, 30, strategy="contiguous_plus_random", seed=7, samples=2000)
    b = verify_pf(s, 3, 30, strategy="contiguous_plus_random", seed=7, samples=2000)
    assert a.to_json() == b.to_json()
    assert a.passed and a.seed == 7 and a.samples == 2000


def test_sampled_finds_counterexample():
    v = verify_pf(from_values([1, 1, 3]), 2, 3, strategy="contiguous_plus_random", samples=100)
    assert v.status == "counterexample"


def test_logfloat_window_certified():
    s = from_function(lambda k: LogFloat(1, -math.lgamma(k + 1)), kind="logfloat")
    assert verify_pf(s, 2, 12).status == "certified_pass"


def test_logfloat_window_undecided():
    # geometric: a_k^2 - a_{k-1} a_{k+1} = 0 exactly, which rounding cannot decide
    s = from_function(lambda k: LogFloat(1, -k * math.log(3)), kind="logfloat")
    v = verify_pf(s, 2, 6)
    assert v.status == "undecided"
    assert ((0, 1), (1, 2)) in [(tuple(a), tuple(b)) for a, b in v.undecided_minors]


def test_verdict_json():
    v = verify_pf(from_values([1, 1, 3]), 2, 3)
    d = json.loads(v.to_json())
    assert d["witness"]["det"] == "-2" and d["status"] == "counterexample"


# (1 - z) G(z) stays PF_{r-1} only for radius-1 series; entire ones fail at k = 1
@pytest.mark.parametrize("name,s", [
    ("ones", from_function(lambda k: F(1))),
    ("k+1", from_function(lambda k: F(k + 1))),
    ("binom", from_function(lambda k: F(math.comb(k + 2, 2)))),
    ("1+z over 1-z", from_function(lambda k: F(1) if k == 0 else F(2))),
])
def test_dh_property(name, s):
    assert verify_pf(s, 3, 14).passed
    assert verify_pf(dh_transform(s), 2, 13).passed


def test_dh_fails_for_entire():
    v = verify_pf(dh_transform(family_aesw(AESWParams(1))), 1, 10)
    assert v.status == "counterexample"


# --- Karlin grid ---------------------------------------------------------------

def f1(x):
    return F(x) if x >= 0 else F(0)


def test_karlin_grid_examples():
    assert karlin_grid_check(lambda x: F(3), [0], [0])["sign"] == "nonnegative"
    r = karlin_grid_check(f1, [0, 1], [0, 1])
    assert r == {"det": "0", "sign": "nonnegative"}
    r = karlin_grid_check(f1, [1, 2], [0, 1])
    assert r == {"det": "1", "sign": "nonnegative"}


def test_karlin_grid_float_and_errors():
    r = karlin_grid_check(lambda x: math.exp(-x * x), [0.0, 1.0], [0.0, 0.5])
    assert r["sign"] == "nonnegative"
    with pytest.raises(ValueError):
        karlin_grid_check(f1, [1, 0], [0, 1])
    with pytest.raises(ValueError):
        karlin_grid_check(f1, [0, 1], [0])
