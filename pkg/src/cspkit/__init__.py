"""cspkit: constraint-network toolkit.

Pairwise-consistency enforcement (singleton-check driven nogood learning,
triangle filtering, singleton arc consistency), a brute-force definitional
oracle for cross-validation, MAC search with adaptive heuristics, and random
binary instance generation with phase-transition scans.
"""

from .network import (
    CONFLICTS,
    SUPPORTS,
    Constraint,
    ConstraintNetwork,
    Domain,
    NetworkError,
    ResourceCapError,
    build_network,
    canonicalize,
    compare,
    refines,
)
from .propagation import (
    OK,
    WIPEOUT,
    PropagationOutcome,
    Trail,
    enforce_gac,
    singleton_check,
)
from .enforcers import (
    EnforceReport,
    enforce_sac1,
    enforce_scdc,
    enforce_scpc,
    enforce_sdc,
)
from .generator import (
    ModelBParams,
    child_seed,
    crossing_tightness,
    generate_model_b,
    phase_scan,
    scan_to_csv,
)
from .instance_io import (
    InstanceError,
    load_network,
    loads_network,
    save_network,
)
from .oracle import (
    check_network,
    check_pair,
    check_value,
    enumerate_solutions,
    oracle_closure,
)
from .lattice import (
    certify_witness,
    find_witness,
    load_witness,
    required_witnesses,
    verify_equivalence,
    verify_lattice_edge,
)
from .search import SearchConfig, SearchResult, mac_solve, select_variable

__all__ = [
    "CONFLICTS",
    "SUPPORTS",
    "Constraint",
    "ConstraintNetwork",
    "Domain",
    "NetworkError",
    "ResourceCapError",
    "build_network",
    "canonicalize",
    "compare",
    "refines",
    "OK",
    "WIPEOUT",
    "PropagationOutcome",
    "Trail",
    "enforce_gac",
    "singleton_check",
    "EnforceReport",
    "enforce_sac1",
    "enforce_scdc",
    "enforce_scpc",
    "enforce_sdc",
    "ModelBParams",
    "child_seed",
    "crossing_tightness",
    "generate_model_b",
    "phase_scan",
    "scan_to_csv",
    "InstanceError",
    "load_network",
    "loads_network",
    "save_network",
    "check_network",
    "check_pair",
    "check_value",
    "enumerate_solutions",
    "oracle_closure",
    "certify_witness",
    "find_witness",
    "load_witness",
    "required_witnesses",
    "verify_equivalence",
    "verify_lattice_edge",
    "SearchConfig",
    "SearchResult",
    "mac_solve",
    "select_variable",
]

__version__ = "0.1.0"
