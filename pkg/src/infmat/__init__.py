"""Exact structured infinite matrices, the inverse of ad(shift), and
witness recovery for derivations and (anti-)automorphisms."""

from .automorphisms import (
    AutomorphismTable,
    ConjugatorWitness,
    Flavor,
    LieAutClassification,
    check_involution_scalar,
    classify_lie_automorphism,
    conjugation_table,
    decompose_anti_automorphism,
    projective_scalar,
    recover_conjugator,
)
from .bases import BasisKind, basis_for, sl_basis, skew_basis, unit_basis
from .derivations import (
    DerivationTable,
    DerivationWitness,
    inner_derivation_table,
    recover_witness,
    recover_witness_full,
    recover_witness_linear,
    recover_witness_skew,
)
from .errors import *  # noqa: F401,F403
from .matrix import (
    BlockIndexMap,
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    IndexWindow,
    Involution,
    WindowedMatrix,
    bracket,
    check_class,
    elementwise_linear,
    involute,
    matrix_unit,
    multiply,
    shift_matrix,
    skew_project,
    trace,
)
from .perfectness import (
    SpanDecomposition,
    TildeResult,
    bracket_span_decompose,
    class_preservation_report,
    tilde_n,
    tilde_z,
    verify_ad_inverse,
)
from .scalars import GF, QQ, Field, PrimeField, Rationals, Scalar, scalar_arith
from .tails import (
    Tail,
    TailMatrix,
    TailMode,
    involute_tail,
    tail_entry,
    tail_linear,
    tail_mul_finitary,
    tail_shift_bracket,
)

__version__ = "0.1.0"
