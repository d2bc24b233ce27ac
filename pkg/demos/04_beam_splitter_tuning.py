"""
Tuning the variable beam splitter
=================================

Cancelling the anti-squeezing in P_1550 - P_532 is not quite the setting
with the lowest Duan sum. Compare both over a scan of the transmittance.
"""
# %%
import numpy as np

from cvinterface import optimize_vbs, reference_scenario
from cvinterface.scenario import analytic_duan

cfg = reference_scenario()
op = optimize_vbs(cfg)
print("balance:   t = %.6f  I = %.6f" % (op.t_balance, op.i_balance))
print("optimum:   t = %.6f  I = %.6f" % (op.t, op.duan.i_value))

# %%
vm, vp = cfg.source_variances()
for t in np.linspace(0.60, 0.84, 13):
    i = analytic_duan(vm, vp, t, cfg.tau_532, cfg.tau_1550)
    print(f"t = {t:.3f}  t^2 = {t * t:.3f}  I = {i:.4f}" + ("  <4" if i < 4 else ""))

# %%
# Stronger anti-squeezing pulls the optimum back onto the balance point.
from cvinterface import FixedSource

for vplus in (10.0, 100.0, 1e4):
    hot = cfg.replace(source=FixedSource.from_variances(vm, vplus))
    o = optimize_vbs(hot)
    print(f"V+ = {vplus:8.0f}: t* - t_bal = {o.t - o.t_balance:+.2e}")
