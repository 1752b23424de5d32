"""Scale-free bipartite contact-network growth with SIR transmission.

Grows heterosexual contact networks through three mechanisms (node
introduction with fitness-preferential attachment, duration-based link
expiry, and balance-rate secondary link formation), runs a discrete-time
SIR process on the evolving network, and provides topology diagnostics
(degree distributions, assortativity, power-law fit) plus a CLI for
reproducible batch runs.
"""

from .baselines import BaNetwork, generate_ba
from .config import AGE_TABLE, RunSpec, SimConfig
from .epidemic import (
    IntercourseSchedule,
    recovery_step,
    seed_infection,
    sir_counts,
    transmission_step,
)
from .errors import (
    ConfigError,
    ContactNetError,
    DegenerateGraphError,
    InsufficientSupportError,
    UndefinedAssortativityError,
)
from .growth import (
    AttachmentDistribution,
    InitiationDistribution,
    SecondaryLinkBudget,
    attachment_distribution,
    fitness,
    initialize_network,
    initiation_distribution,
    mechanism1_introduce_node,
    mechanism2_expire_links,
    mechanism3_form_secondary_links,
    sample_duration,
    secondary_link_quota,
    step,
    theta,
)
from .model import (
    FEMALE,
    MALE,
    HealthState,
    LinkKind,
    NetworkState,
    Person,
    Phase,
    Population,
    Relationship,
)
from .population import initialize_population, sample_age
from .runner import BatchResult, RunResult, Simulation, run_simulation, run_single
from .topology import (
    DegreeDistribution,
    ExcessDegreeDistribution,
    GraphSnapshot,
    JointDegreeDistribution,
    PowerLawFit,
    TopologyReport,
    assortativity,
    average_degree,
    bipartite_check,
    build_report,
    degree_distribution,
    excess_degree_distribution,
    fit_power_law,
    joint_degree_distribution,
)

__version__ = "0.1.0"
