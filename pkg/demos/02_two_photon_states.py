"""Follow the photon pair from the source to the two detectors."""
# %%
import numpy as np

from freqbin import twophoton as tp


def show(state, title):
    print(f"\n{title}  (norm^2 = {state.norm2():.4f})")
    for (a, b), amp in sorted(state.terms.items(), key=lambda kv: str(kv[0])):
        def lab(m):
            f = m.frequency
            return f"{f.species.value}{'+d' if f.shifted else ''}@{m.port}{m.polarization}"
        print(f"  {amp.real:+.4f}{amp.imag:+.4f}j  {lab(a)} {lab(b)}")


# %% Source: polarizers, AOM on path 1, half-wave plate on path 2.
src = tp.source_state(normalized=False)
show(src, "source")

# %% The beam splitter spreads each term over ports 3 and 4.
bs = tp.apply_beamsplitter(src)
show(bs.sector(3, 4), "coincidence sector after the beam splitter")
print("same-port weight discarded by post-selection:",
      bs.sector(3, 3).norm2() + bs.sector(4, 4).norm2())

# %% Projection onto P3 (theta) and P4 (phi) erases the polarization label.
cfg = tp.ProjectionConfig(theta=0.6 * np.pi, phi=np.pi / 12)
out = tp.frequency_bin_state(cfg)
show(out, "after projection, ports 5 and 6")
c1, c2 = tp.branch_amplitudes(out)
print(f"\n|c2/c1| = {abs(c2 / c1):.4f}  (tan phi = {np.tan(cfg.phi):.4f})")
print(f"arg(c2/c1) = {np.angle(c2 / c1) / np.pi:.4f} pi")
