"""End-to-end acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line and then asserts. Run with
``pytest tests/test_acceptance.py -s`` or directly as a script.
"""

import sys
import time

import numpy as np

from freqbin import correlation as corr
from freqbin import estimator as est
from freqbin import montecarlo as mc
from freqbin import polarization as pol
from freqbin import twophoton as tp

RESULTS = {}
K = 1 / (2 * np.sqrt(2))


def verdict(num, name, ok, elapsed, limit, detail):
    ok = bool(ok) and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} criterion {num} ({name}): {detail}; {elapsed:.2f}s of {limit:g}s"
    RESULTS[num] = line
    print(line)
    assert ok, line


def up_to_phase_error(a, b):
    k = np.argmax(np.abs(b))
    ph = a[k] / b[k]
    return max(abs(abs(ph) - 1), np.max(np.abs(a - ph * b)))


def test_criterion_1_waveplate_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for beta in rng.uniform(-2 * np.pi, 2 * np.pi, 100):
        row = (pol.hwp(beta) @ pol.qwp(np.pi / 4)).matrix[0]
        target = np.array([1, np.exp(1j * (4 * beta - np.pi / 2))]) / np.sqrt(2)
        worst = max(worst, up_to_phase_error(row, target))
    verdict(1, "waveplate identity", worst < 1e-10, time.perf_counter() - t0, 1, f"max error {worst:.1e}")


def test_criterion_2_pipeline_amplitudes():
    t0 = time.perf_counter()
    worst = 0.0
    for theta in np.linspace(0, 2 * np.pi, 5, endpoint=False):
        for phi in np.linspace(0.1, np.pi / 2 - 0.1, 4):
            state = tp.frequency_bin_state(tp.ProjectionConfig(theta, phi))
            c1, c2 = tp.branch_amplitudes(state)
            worst = max(worst, abs(c1 - np.cos(phi) * K), abs(c2 - np.sin(phi) * np.exp(1j * theta) * K))
    c1, c2 = tp.branch_amplitudes(tp.frequency_bin_state(tp.ProjectionConfig(0.9, np.pi / 4)))
    total = abs(c1) ** 2 + abs(c2) ** 2
    ok = worst < 1e-12 and abs(total - 1 / 8) < 1e-15
    verdict(2, "pipeline amplitudes", ok, time.perf_counter() - t0, 1,
            f"max error {worst:.1e}, probability sum {total!r}")


def test_criterion_3_closed_form_beating():
    t0 = time.perf_counter()
    w = corr.BiphotonWaveform()
    rng = np.random.default_rng(303)
    theta = rng.uniform(0, 2 * np.pi, 1000)
    phi = rng.uniform(0, np.pi / 2, 1000)
    tau = rng.uniform(-300e-9, 300e-9, 1000)
    worst = 0.0
    for th, ph, t in zip(theta, phi, tau):
        p = corr.BeatParameters.from_angles(th, ph)
        want = corr.g0(w, abs(t)) / 8 * (1 + np.sin(2 * ph) * np.cos(corr.DEFAULT_DELTA * abs(t) - th))
        worst = max(worst, abs(corr.g56(w, p, t) - want))
    verdict(3, "closed-form beating", worst < 1e-12, time.perf_counter() - t0, 1, f"max error {worst:.1e}")


def test_criterion_4_phase_recovery():
    t0 = time.perf_counter()
    theta = pol.phase_of_t3(np.deg2rad(79))
    cfg = est.PipelineConfig()
    hits, sigmas = 0, []
    for seed in range(50):
        fit = est.run_pipeline(theta, cfg, seed=seed).fit
        err = np.angle(np.exp(1j * (fit.theta_hat - theta)))
        hits += abs(err) <= 3 * fit.theta_sigma
        sigmas.append(fit.theta_sigma)
    coverage = hits / 50
    worst_sigma = max(sigmas) / np.pi
    ok = coverage >= 0.90 and worst_sigma <= 0.03
    verdict(4, "phase recovery", ok, time.perf_counter() - t0, 60,
            f"true {theta / np.pi:.5f} pi, 3-sigma coverage {coverage:.0%}, max sigma {worst_sigma:.4f} pi")


def test_criterion_5_visibility_law():
    t0 = time.perf_counter()
    cfg = est.PipelineConfig(phi=np.pi / 12)
    v = np.array([est.run_pipeline(np.pi, cfg, seed=seed).fit.v_hat for seed in range(50)])
    mean, std = v.mean(), v.std(ddof=1)
    # the whole mean +/- 1 sigma band must sit inside 0.50 +/- 0.03
    ok = abs(mean - 0.5) + std <= 0.03
    verdict(5, "visibility law", ok, time.perf_counter() - t0, 60, f"V mean {mean:.4f}, std {std:.4f}")


def test_criterion_6_sweep_line():
    t0 = time.perf_counter()
    betas = np.deg2rad(np.arange(0, 91, 10))
    points = est.sweep_beta(betas, est.PipelineConfig())
    line = est.fit_phase_line(betas, [p.theta_hat for p in points])
    ok = abs(line.slope / 4 - 1) <= 0.02 and abs(line.intercept + np.pi / 2) <= 0.05
    verdict(6, "sweep line", ok, time.perf_counter() - t0, 120,
            f"slope {line.slope:.4f}, intercept {line.intercept:.4f} rad")


def test_criterion_7_bell_threshold():
    t0 = time.perf_counter()
    acq = mc.AcquisitionConfig(total_coincidences=1e6)
    theta = pol.phase_of_t3(np.deg2rad(79))
    hi = est.run_pipeline(theta, est.PipelineConfig(phi=np.pi / 4, acquisition=acq)).fit
    lo = est.run_pipeline(np.pi, est.PipelineConfig(phi=np.pi / 12, acquisition=acq)).fit
    ok = hi.bell_violation and hi.v_hat > 1 / np.sqrt(2) and not lo.bell_violation
    verdict(7, "Bell threshold", ok, time.perf_counter() - t0, 60,
            f"V(pi/4) {hi.v_hat:.4f} -> {hi.bell_violation}, V(pi/12) {lo.v_hat:.4f} -> {lo.bell_violation}")


def test_criterion_8_symmetry_and_conservation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    w = corr.BiphotonWaveform()

    even = True
    for th, ph, t in zip(rng.uniform(0, 2 * np.pi, 500), rng.uniform(0, np.pi / 2, 500),
                         rng.uniform(0, 300e-9, 500)):
        p = corr.BeatParameters.from_angles(th, ph)
        even &= corr.g56(w, p, t) == corr.g56(w, p, -t)

    modes = [tp.PhotonMode(port, pol_, f) for port in (1, 2) for pol_ in "HV"
             for f in (tp.STOKES, tp.STOKES.shift(), tp.ANTI_STOKES, tp.ANTI_STOKES.shift())]
    bs_err = 0.0
    for _ in range(50):
        picks = rng.choice(len(modes), size=(6, 2))
        terms = {}
        for a, b in picks:
            key = (modes[a], modes[b])
            terms[key] = terms.get(key, 0) + complex(*rng.normal(size=2))
        s = tp.TwoPhotonState(terms)
        s = s.scaled(1 / np.sqrt(s.norm2()))
        bs_err = max(bs_err, abs(tp.apply_beamsplitter(s).norm2() - 1))

    unit_err = max(pol.retarder(eta, r).unitarity_error()
                   for eta, r in zip(rng.uniform(-np.pi, np.pi, 200), rng.uniform(0, 2 * np.pi, 200)))
    unit_err = max(unit_err, *(op(eta).unitarity_error() for op in (pol.hwp, pol.qwp)
                               for eta in rng.uniform(-np.pi, np.pi, 50)))

    cfg = est.PipelineConfig(acquisition=mc.AcquisitionConfig(seed=42))
    a = est.run_pipeline(1.0, cfg)
    b = est.run_pipeline(1.0, cfg)
    same = (a.beat.counts.tobytes() == b.beat.counts.tobytes()
            and a.reference.counts.tobytes() == b.reference.counts.tobytes()
            and a.fit.coef == b.fit.coef)

    ok = even and bs_err < 1e-12 and unit_err < 1e-12 and same
    verdict(8, "symmetry and conservation", ok, time.perf_counter() - t0, 10,
            f"even {even}, BS norm error {bs_err:.1e}, unitarity error {unit_err:.1e}, bitwise {same}")


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
            except Exception as exc:
                print(f"FAIL {name}: {type(exc).__name__}: {exc}")
                failed += 1
    sys.exit(1 if failed else 0)
