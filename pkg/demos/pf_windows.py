"""PF windows, the Karlin transform and the (1 - z) step.

Run: python demos/pf_windows.py
"""
from fractions import Fraction

from polyafreq.seqcore import AESWParams, dh_transform, family_aesw, family_qproduct, from_values
from polyafreq.totalpos import build_window, count_minors, verify_pf
from polyafreq.transforms import karlin_transform

# %% A window is the upper-triangular Toeplitz matrix of the first N coefficients.
exp = family_aesw(AESWParams(1))
for row in build_window(exp, 4).entries:
    print(" ".join(f"{str(x):>4s}" for x in row))

# %% (1, 1, 3) is not PF_2: the minor on rows (0, 1), cols (1, 2) is 1 - 3 = -2.
v = verify_pf(from_values([1, 1, 3]), 2, 3)
print(v.status, v.witness)

# %% Karlin outputs are PF_r.  Order-2 windows are checked exhaustively,
# higher orders by contiguous minors plus a seeded random sample.
for name, base in [("exp", exp), ("qproduct", family_qproduct(Fraction(1, 2), 20))]:
    for r in (2, 3):
        d = karlin_transform(base, r).d
        v = verify_pf(d, r, 30, samples=20_000)
        print(f"{name:9s} r={r} minors={count_minors(30, r):>9d} {v.strategy:24s} {v.status}")

# %% Multiplying a radius-one PF_r series by (1 - z) drops one order.
d = karlin_transform(exp, 3).d
print("(1-z) g:", verify_pf(dh_transform(d), 2, 30).status)
