"""Exact and simulated analysis of labeled coupon-collector processes.

A collector repeatedly draws subsets of coupons and sees the subset of their
labels without the pairing.  This package provides the sampling model, an
exact deduction engine, an absorbing-chain solver, Monte Carlo estimation,
the published closed forms with their proof-level variants, a brute-force
arbitration oracle for tiny instances, and a CLI that ties them together.
"""

from .errors import (
    EmptySupport,
    IdOutOfRange,
    InvalidState,
    LccpError,
    NonBijection,
    NonTerminating,
    NumericalInstability,
    OutOfRange,
    SizeExceedsN,
    TargetExceedsN,
    TooLargeN,
    TooSmallN,
    Unrecoverable,
    UnsupportedHistory,
    ZeroSize,
)
from .model import (
    Instance,
    RecoveryMode,
    RecoveryTarget,
    Sample,
    SampleSizeDist,
    dist_from_json,
    dist_to_json,
    draw_sample,
    instance_from_json,
    instance_to_json,
    make_instance,
    make_kp_dist,
    make_size_dist,
)
from .inference import (
    KnowledgeState,
    absorb_sample,
    init_knowledge,
    is_recovered,
    known_by_component_rule,
    known_coupons,
)
from .simulate import (
    SimulationStats,
    TrialResult,
    compare_lccp_ccp,
    derive_stream,
    estimate,
    estimate_ccp,
    run_trial,
    run_trial_ccp,
)
from .markov import (
    MarkovState,
    TransitionRow,
    ccp_expected,
    expected_complete,
    state_space,
    tail_distribution,
    topological_index,
    transition_row,
)
from .formulas import (
    FormulaResult,
    Provenance,
    ccp_expected_full,
    ccp_expected_partial,
    conjectured_2lccp_expected,
    harmonic,
    kp3_expected,
    min_sample_pivot,
    min_samples,
    min_witness_k2,
    st1_expected,
    st1_tail,
    t1_expected_series,
)
from .oracle import (
    canonical_key,
    known_by_enumeration,
    lemma_nk_check,
    oracle_expected,
    oracle_tail,
)

__version__ = "0.1.0"
