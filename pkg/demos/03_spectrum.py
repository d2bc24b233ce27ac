"""
Sideband spectrum of the correlations
=====================================

The source is modelled as an OPA below threshold with a Lorentzian spectrum.
Its pump and linewidth are fitted to two points of the joint-amplitude noise
spectrum (-5.5 dB at 5 MHz, -3 dB at 20 MHz) and the full spectrum is swept.
"""
# %%
from cvinterface import (FrequencyGrid, calibrate_to_landmarks, reference_scenario,
                         source_variances, spectrum_sweep)
from cvinterface.spectral import crossing_frequency

cfg = reference_scenario()
model = calibrate_to_landmarks(-5.5, 5.0, -3.0, 20.0, cfg)
print(model)
vm, vp = source_variances(model, 5.0)
print("source at 5 MHz: V- = %.4f, V+ = %.3f" % (vm, vp))

# %%
trace = spectrum_sweep(cfg.replace(source=model), FrequencyGrid(0.5, 40.0, 80))
for f, xs, pd in list(zip(*trace.columns.values()))[::8]:
    print(f"{f:6.1f} MHz   X-sum {xs:+6.2f} dB   P-diff {pd:+6.2f} dB")
print("-3 dB crossing at %.2f MHz" % crossing_frequency(trace, -3.0))

# %%
# The same table as CSV, as written by `cvinterface spectrum`.
print(trace.to_csv()[:200])
