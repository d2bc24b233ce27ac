"""
Monte-Carlo check
=================

Draw homodyne samples from the two-mode state and estimate the variance of
the summed signal, as a spectrum analyser would. The analytic values should
sit inside the statistical error bars.
"""
# %%
import math

import numpy as np

from cvinterface import build_state, reference_scenario
from cvinterface.criteria import joint_variance, p_diff, x_sum
from cvinterface.mc_oracle import estimate_joint_variance, scan_with_noise
from cvinterface.scenario import resolve

state = build_state(resolve(reference_scenario()))
for name, combo in (("X-sum", x_sum()), ("P-diff", p_diff())):
    exact = joint_variance(state, combo).variance
    run = estimate_joint_variance(state, combo, 1_000_000, seed=1)
    z = (run.estimate - exact) / run.std_error
    print(f"{name}: exact {exact:.5f}  sampled {run.estimate:.5f} +- {run.std_error:.5f}  z = {z:+.2f}")

# %%
# Error bars shrink as 1/sqrt(n).
for n in (10_000, 40_000, 160_000):
    print(n, estimate_joint_variance(state, x_sum(), n, seed=2).std_error)

# %%
tr = scan_with_noise(reference_scenario(), np.linspace(0, 2 * math.pi, 9), 100_000, seed=3)
print(tr.to_csv())
