"""overlap-lab: finite-scale translation-overlap laboratory.

Layers, bottom up: GF(2) bit vectors and the two translation lemmas
(gf2_core); uniform-height forests with overlap counts (forest); level
structures and their relations (structures); the branching rank over a forest
(rank_ndrk); threshold ranks of finite models (model_rank); and the
extension/amalgamation calculus of oracle-backed conditions (forcing).
"""

from .errors import InternalError, OracleError, ResourceError, UsageError
from .gf2_core import BitVec, add, check_pair_family, from01, is_independent, solve_translate
from .forest import Forest, Tree, overlap, stnd_at_depth
from .structures import (
    Diagnostic,
    MStruct,
    enumerate_structures,
    essentially_extends,
    essentially_same,
    extends,
    restrict,
    translate,
    validate,
)
from .rank_ndrk import (
    ChainWitness,
    RankResult,
    WitnessCertificate,
    check_chain,
    extract_perfect_witness,
    ndrk_bounded,
    ndrk_sup,
    structure_poset,
)
from .model_rank import (
    FiniteModel,
    RankParams,
    Relation,
    build_successor_model,
    npr_check,
    order_model,
    qf_type,
    rank_certificate,
    rk,
    rk_star,
    zeta_token,
)

__version__ = "0.1.0"
