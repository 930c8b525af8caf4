"""Desk-scale combinatorics of group-adding forcing posets."""

from .words import (
    EMPTY_WORD,
    GoodDecomposition,
    Letter,
    NotGood,
    Word,
    concat,
    conjugate_decompose,
    format_word,
    good_decompose,
    hat_words,
    invert,
    is_hat,
    occurrences,
    parse_word,
    power,
    reduce_letters,
    reduced_words,
    single,
    substitute,
)
from .evaluation import (
    Assignment,
    FixResult,
    GroundPermutation,
    GroundRep,
    EMPTY_GROUND,
    PartialMap,
    eval_domain,
    eval_range,
    eval_word,
    fix_points,
    ground_from_json,
    identity_perm,
    table_over_zshift,
    zshift,
)
from .poset import (
    Condition,
    Incompatible,
    PosetMode,
    add_words,
    delta_compatible_merge,
    leq,
    merge_disjoint,
    restrict,
    strong_restrict,
    validate,
)
from .extension import (
    CertificateError,
    ContractViolation,
    ExtensionCertificate,
    NOT_FOUND,
    Rejected,
    canonical_extension,
    cover_extend,
    domain_extend,
    extend_with,
    hit_extend,
    hit_search,
    hit_threshold,
    mad_set_point,
    range_extend,
    strong_reduction,
)
from .builder import (
    BuildError,
    BuildReport,
    DenseGoal,
    build,
    build_variant_family,
    hit_goal,
    verify_cofinitary,
    verify_variant,
)
from .templates import (
    AxiomViolation,
    SurrogateParams,
    TemplateOrder,
    build_surrogate_template,
    check_axioms,
    closure,
    depth,
    rank,
    restrict_template,
    template_from_parts,
)
from .suslin import (
    DomCondition,
    FinSeq,
    LocCondition,
    Rule,
    Undecidable,
    build_localizing_slalom,
    dom_condition,
    dom_leq,
    dom_meet,
    ffp_axiom_suite,
    loc_condition,
    loc_leq,
    loc_meet,
    localizes,
    n_suslin_trial,
)

__version__ = "0.1.0"
