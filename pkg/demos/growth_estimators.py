"""Reading order and type off coefficients.

Each estimator reduces a coefficient sequence to dyadic window sups, then
extrapolates the last few windows.  Run: python demos/growth_estimators.py
"""
import numpy as np
from scipy.special import gammaln

from polyafreq import growth
from polyafreq.proxorder import make_constant_po
from polyafreq.seqcore import from_logs


def logs(fn):
    return from_logs(lambda ks: fn(np.asarray(ks, dtype=float)))


one = make_constant_po(1.0)

# %% 1/n!: e^z has order 1 and type 1, so n (n!)^(-1/n) -> e.
est = growth.levin_estimate(logs(lambda n: -gammaln(n + 1)), one, 10_000)
print("levin    ", est.raw_sup, est.derived["sigma_B"])
for b, a, v in est.window_values[-4:]:
    print(f"   window <= {b:6d}  argmax {a:6d}  {v:.6f}")

# %% log a_k = 2 sqrt(k): growth exp(1/(1-y)) in the disk.
est = growth.disk_type_estimate(logs(lambda k: 2 * np.sqrt(k)), one, 10 ** 6)
print("disk type", est.extrapolated, est.derived["sigma_h"])

# %% Disk order without a proximate order, from log log a_k / log k.
for p in (0.5, 2 / 3):
    est = growth.beuermann_lambda(logs(lambda k: k ** p), 10 ** 6)
    print(f"lambda for k^{p:.3f}:", round(est.derived["lambda"], 4))

# %% Logarithmic order and type of exp(-n^2) coefficients: (2, 1/4).
est = growth.log_order_type_entire(logs(lambda n: -n ** 2), 1000)
print("log order/type", est.derived["rho0"], est.derived["sigma0"])

# %% 1/n! is of positive ordinary order, hence infinite logarithmic order.
est = growth.log_order_type_entire(logs(lambda n: -gammaln(n + 1)), 1000)
print("1/n!:", est.derived["rho0"], est.notes[-1])
