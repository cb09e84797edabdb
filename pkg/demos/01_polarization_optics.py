"""Waveplates, projectors and the Poincare sphere."""
# %%
import numpy as np

from freqbin import polarization as pol

np.set_printoptions(precision=4, suppress=True)

# %% A half-wave plate at 22.5 degrees takes diagonal light to horizontal.
print("hwp(22.5) D ->", pol.hwp(np.pi / 8).apply(pol.D).vector)

# %% QWP at 45 deg then HWP at beta, followed by a PBS, picks out
# (H + e^{i(4 beta - pi/2)} V)/sqrt2 up to a global phase.
for deg in (0, 22.5, 45, 78.75):
    beta = np.deg2rad(deg)
    row = pol.WaveplateSetting(np.pi / 4, beta).operator().matrix[0]
    rel = np.angle(row[1] / row[0]) % (2 * np.pi)
    print(f"beta={deg:6.2f} deg  relative phase {rel / np.pi:.4f} pi"
          f"  expected {pol.phase_of_t3(beta) / np.pi:.4f} pi")

# %% The solver inverts that law.
s = pol.solve_waveplates(1.25 * np.pi)
print("theta=1.25 pi needs qwp", np.rad2deg(s.qwp_angle), "hwp", np.rad2deg(s.hwp_angle))

# %% Polarizer states for different theta all lie on the S1 = 0 great circle.
for theta in np.linspace(0, 2 * np.pi, 5, endpoint=False):
    print(f"theta={theta / np.pi:.2f} pi  Stokes", pol.to_poincare(pol.complex_polarizer_state(theta)).vector)
