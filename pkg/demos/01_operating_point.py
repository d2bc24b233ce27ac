"""
Operating point of the up-conversion link
=========================================

Squeezed vacuum at 1550 nm is split on a variable beam splitter. One half is
detected directly, the other is up-converted to 532 nm and detected there.
We evaluate the Duan sum at the balance setting of the splitter.
"""
# %%
from cvinterface import evaluate, reference_scenario, solve_balance

cfg = reference_scenario()
print("source V- = %.4f (%.2f dB), V+ = %.3f" % (
    cfg.source.v_minus, cfg.source.squeezing_db, cfg.source.v_plus))
print("arm amplitudes: tau_532 = %.3f, tau_1550 = %.4f" % (cfg.tau_532, cfg.tau_1550))

# %%
# The balance condition t tau_532 = r tau_1550 sends slightly more than half
# of the light towards the lossier up-conversion arm.
t = solve_balance(cfg.tau_532, cfg.tau_1550)
print("balance transmittance t = %.4f, t^2 = %.4f" % (t, t * t))

# %%
op = evaluate(cfg)
labels = {"A": "Var[X1550 + X532]", "B": "Var[X1550 - X532]",
          "C": "Var[P1550 + P532]", "D": "Var[P1550 - P532]"}
for key, level in op.points.items():
    print(f"{key}: {labels[key]:<20s} {level.variance:8.4f}  {level.rel_db:+7.3f} dB")

# %%
print("Duan sum I = %.4f -> entangled: %s" % (op.duan.i_value, op.duan.entangled))
