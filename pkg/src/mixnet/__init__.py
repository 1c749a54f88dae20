"""Mixed random/preferential attachment: growth, estimation, distributions."""

__version__ = "0.1.0"

from .em import EmConfig, EmTrace, em_estimate, em_step, responsibility
from .degree_dist import (
    EmpiricalDistribution,
    StationaryDistribution,
    empirical_ccdf,
    empirical_distribution,
    finite_t_pmf,
    stationary_ccdf,
    stationary_pmf,
)
from .likelihood import (
    MleReport,
    RootProfile,
    check_theorem1,
    log_likelihood,
    mle_estimate,
    root_profile,
    snapshot_log_likelihood,
)
from .netmodel import (
    AttachmentRecord,
    GrowingNetwork,
    ModelParams,
    SampleLog,
    SeedSpec,
    attachment_probability,
    grow_sequence,
    grow_step,
    make_rng,
)

__all__ = [
    "AttachmentRecord",
    "EmConfig",
    "EmTrace",
    "EmpiricalDistribution",
    "GrowingNetwork",
    "MleReport",
    "ModelParams",
    "RootProfile",
    "SampleLog",
    "SeedSpec",
    "StationaryDistribution",
    "attachment_probability",
    "check_theorem1",
    "em_estimate",
    "em_step",
    "empirical_ccdf",
    "empirical_distribution",
    "finite_t_pmf",
    "grow_sequence",
    "grow_step",
    "log_likelihood",
    "make_rng",
    "mle_estimate",
    "responsibility",
    "root_profile",
    "snapshot_log_likelihood",
    "stationary_ccdf",
    "stationary_pmf",
]
