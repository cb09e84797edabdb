"""How the P4 angle trades visibility against the Bell threshold."""
# %%
import numpy as np

from freqbin import correlation as corr
from freqbin import estimator as est
from freqbin import montecarlo as mc

acq = mc.AcquisitionConfig(total_coincidences=1e6)
print(" phi_deg  V_law   V_hat            bell")
for deg in (5, 15, 20, 25, 30, 45):
    phi = np.deg2rad(deg)
    fit = est.run_pipeline(np.pi, est.PipelineConfig(phi=phi, acquisition=acq)).fit
    print(f"{deg:8.1f}  {corr.visibility(phi):.3f}   {fit.v_hat:.4f} +/- {fit.v_sigma:.4f}  {fit.bell_violation}")

# %% The threshold sits at sin(2 phi) = 1/sqrt2, i.e. phi = 22.5 deg.
print("\nthreshold", corr.BELL_THRESHOLD)
