"""Frequency-bin entangled biphotons with a polarization-tunable phase.

Modules follow the optical chain: :mod:`polarization` (Jones calculus and
waveplate solving), :mod:`twophoton` (source, beam splitter, projection),
:mod:`correlation` (envelope and beating), :mod:`montecarlo` (coincidence
histograms), :mod:`estimator` (phase and visibility fits) and :mod:`cli`.
"""

from . import correlation, estimator, montecarlo, polarization, twophoton
from .correlation import BeatParameters, BiphotonWaveform, bell_threshold_check, g0, g56, visibility
from .estimator import (
    BeatFit,
    FitError,
    NormalizedBeating,
    PipelineConfig,
    fit_beating,
    normalize,
    run_pipeline,
    sweep_beta,
)
from .montecarlo import AcquisitionConfig, CoincidenceHistogram, simulate_histogram, simulate_reference
from .polarization import (
    JonesOperator,
    PoincarePoint,
    PolarizationState,
    WaveplateSetting,
    hwp,
    phase_of_t3,
    projector,
    qwp,
    solve_waveplates,
    to_poincare,
)
from .twophoton import (
    ProjectionConfig,
    TwoPhotonState,
    apply_beamsplitter,
    apply_projection,
    branch_amplitudes,
    source_state,
)

__version__ = "0.1.0"
