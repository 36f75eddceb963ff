"""Analytical error bounds (SLB, SUB, MSLB, MSUB) and Monte Carlo ML-decoding
simulation for multidimensional lattice constellations over Nakagami-m block
fading."""

from .bounds import (
    BoundParams,
    BoundValue,
    SphereRadii,
    closed_form_eligible,
    func_a,
    func_b,
    func_c,
    mslb,
    msub,
    numeric_expectation,
    slb,
    sphere_integral_i,
    sphere_integral_i_cal,
    sub,
)
from .channel import (
    ChannelParams,
    FadingRealization,
    RandomStream,
    apply_channel,
    gamma_power_cdf,
    gamma_power_pdf,
    order_statistics,
    sample_fading,
)
from .lattice import (
    Constellation,
    FadedConstellation,
    GeneratorMatrix,
    a2_generator,
    enumerate_points,
    load_generator,
    mean_basis_norm,
    min_distance,
    normalize_generator,
    rotated_zn_generator,
    save_generator,
    zn_generator,
)
from .sfuncs import (
    SpecialFnConfig,
    compositions,
    compositions_count,
    g_integral,
    gauss_2f1,
    meijer_g_nn,
    upper_gamma_reg,
)
from .sim import FepEstimate, SimConfig, ml_decode, simulate_fep_finite, simulate_fep_infinite
from .sweep import SweepConfig, SweepResult, emit_csv, emit_json, parse_config, run_sweep

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
