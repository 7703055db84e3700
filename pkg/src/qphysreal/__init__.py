"""Physical realizability of linear quantum systems and coherent LQG design."""
from .errors import *  # noqa: F401,F403
from .model import (
    Plant,
    QuantumRealization,
    RealizationWitness,
    StateSpace,
    gamma,
    perm,
    theta,
    vacuum_ito,
)
from .numerics import DEFAULT_TOL, Tolerances
from .realizability import (
    check_realizable,
    noise_requirement,
    realize_minimal,
    reconstruct,
    s_tilde,
)
from .tf_realization import realize_tf, tf_eval
from .lqg import RhoSearchConfig, aux_lqg, closed_loop, cost, design, realize_controller

__version__ = "0.1.0"
