"""Stopped occupancy scheme: simulation, exact laws and large-n approximations."""
from __future__ import annotations

import os

import numba

# TBB is tried first by default and warns when the installed version is too old
if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .asymptotics import (  # noqa: E402
    AsymptoticConstants,
    GumbelSpec,
    constants,
    expected_mn,
    gumbel_cdf,
    joint_max_multiplicity,
    mean_zn,
    multiplicity_pmf,
    multiplicity_pmf_direct,
    sample_gumbel,
    sample_topk_approx,
    zn_pmf,
)
from .exact import stopped_max_cdf, stopped_max_pmf, stopping_time_pdf  # noqa: E402
from .pointproc import PointConfig, lattice_round, poisson_shift, sample_exponential_process  # noqa: E402
from .quadrature import QuadratureSpec  # noqa: E402
from .sim import (  # noqa: E402
    ModelParams,
    OccupancyState,
    StoppedResult,
    fixed_time_maxima,
    r_arrival_times,
    simulate,
    simulate_bipoissonized,
    simulate_discrete,
    simulate_poissonized,
)
from .special import (  # noqa: E402
    complex_log_gamma,
    log_pmf_expansion,
    log_poisson_pmf,
    poisson_cdf,
    poisson_pmf,
    poisson_sf,
)
from .stats import LatticePMF, TailBoundFit, check_tail_bounds, empirical_pmf, mc_summary, tv_distance  # noqa: E402

__version__ = "0.1.0"
