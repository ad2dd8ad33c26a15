//! Proof search for multiplicative-additive linear logic, organised
//! around a three-phase focussed presentation (deterministic,
//! nondeterministic, co-nondeterministic), together with QBF semantics
//! and translations in both directions.
//!
//! The pieces:
//!
//! - [`formula`]: the two formula languages, duality, polarity classes;
//! - [`parse`]: textual grammars for both;
//! - [`qbf`]: satisfaction, constant elimination, prefix classes;
//! - [`btt`]: Boolean Truth Trees, a proof system for closed prenex QBFs;
//! - [`sequent`] / [`prover`]: sequents, proof trees, the five calculi,
//!   proof search, proof checking, and the bounded-alternation
//!   provability hierarchy;
//! - [`measure`]: polynomial-time approximations of the minimal
//!   alternation measures, and the classifier/decider built on them;
//! - [`encode`]: QBF-to-MALL encodings and the literal-guarding
//!   translation that trades weakening for c-formulas;
//! - [`corpus`]: exhaustive and seeded-random test families.

pub mod btt;
pub mod corpus;
pub mod encode;
pub mod formula;
pub mod measure;
pub mod parse;
pub mod prover;
pub mod qbf;
pub mod sequent;

pub use btt::{btt_check, btt_prove, render_btt, BttProof, BttRule};
pub use encode::{
    assignment_cedent, guard_occurrences, negtrans, postrans, prime_translate, qltrans,
    weakened_formulas, EncodeError, EncodingContext, OccPath, Qltrans,
};
pub use formula::{
    limp, plimp, MallFormula, MallRef, Name, PolarityClass, QbfFormula, Quantifier, Regime,
    UnitKind,
};
pub use measure::{
    classify_cedent, classify_lqtrans, condcomp, condcomp_run, decide_lqtrans, ndcomp, ndcomp_run,
    FormulaOrder, MeasureResult, MeasureRun, ProvClass,
};
pub use parse::{parse_mall, parse_mall_cedent, parse_qbf, ParseError};
pub use prover::{
    check_proof, check_proof_with, deterministic_saturate, BudgetExceeded, CheckError,
    MeasureError, Prover, DEFAULT_BUDGET,
};
pub use qbf::{
    assignment_of, evaluate, instantiate_simplify, prefix_class, Assignment, PrefixClass, QbfError,
    Side,
};
pub use sequent::{
    parse_proof, parse_sequent, render_proof, Discipline, Phase, ProofTree, RuleLabel, Sequent,
    SystemId,
};
