"""Scan the waveplate angle and recover the linear phase law."""
# %%
import numpy as np

from freqbin import estimator as est

betas = np.deg2rad(np.arange(0, 91, 10))
points = est.sweep_beta(betas, est.PipelineConfig())
unwrapped = est.unwrap_phases([p.theta_hat for p in points])

for p, u in zip(points, unwrapped):
    print(f"beta={np.rad2deg(p.beta):5.1f}  theta_hat={p.theta_hat / np.pi:.4f} pi"
          f"  unwrapped={u / np.pi:+.4f} pi")

# %%
line = est.fit_phase_line(betas, [p.theta_hat for p in points])
print(f"\nslope     {line.slope:.4f} +/- {line.slope_stderr:.4f}   (law: 4)")
print(f"intercept {line.intercept:.4f} +/- {line.intercept_stderr:.4f} rad   (law: {-np.pi / 2:.4f})")
