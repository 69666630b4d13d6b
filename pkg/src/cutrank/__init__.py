"""Central unit rank of integral group rings of finite groups.

Decides cut (rank 0) and ecut (rank <= 1) groups from real and rational
class counts, cross-checks closed forms and Shoda pair sums, and rebuilds
the classification of split metacyclic ecut groups.
"""

from .atlas import (
    AtlasClass,
    AtlasRow,
    FixtureTables,
    VerificationReport,
    candidate_space,
    classify_space,
    deduplicate,
    load_fixtures,
    verify_tables,
)
from .classes import (
    ClassPartition,
    EcutWitness,
    Tag,
    Verdict,
    class_partition,
    classify_element,
    conjugacy_classes,
    ecut_witness,
    inverse_semi_rational_set,
)
from .groups import (
    FiniteGroup,
    GroupError,
    GroupTooLarge,
    Subgroup,
    abelian,
    cyclic,
    dihedral,
    direct_product,
    from_table,
    generalized_quaternion,
    quotient,
    read_cayley_csv,
    split_metacyclic,
)
from .groupspec import GroupSpecError, parse_group_spec
from .isomorphism import IsomorphismUndecided, fingerprint, is_isomorphic
from .presentation import InvalidParams, MetacyclicParams, validate_params
from .rank import (
    AbelianVerdict,
    InconsistencyError,
    RankReport,
    RankVerdict,
    check_pq_lists,
    classify_abelian,
    nilpotent_ecut_check,
    pgroup_ecut_case,
    prime_spectrum_check,
    rank_cyclic,
    rank_dihedral,
    rank_ferraz,
    rank_metacyclic_pq,
    rank_quaternion,
)
from .shoda import (
    ShodaPair,
    component_center_degree,
    rank_from_pairs,
    shoda_pairs_cyclic,
    shoda_pairs_dihedral,
    shoda_pairs_metacyclic_pq,
    shoda_pairs_quaternion,
    verify_esspair,
)

__version__ = "0.1.0"
