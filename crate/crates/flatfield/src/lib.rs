//! Exact affine incidence geometry over small prime fields.
//!
//! The crate enumerates and manipulates affine k-flats of F_p^n with exact
//! arithmetic throughout: canonical flat representations, Grassmannian
//! counting formulas, union cardinalities, structural axiom checkers, the
//! plane-selection / foliation / popularity-refinement machinery, and
//! generators for extremal line families. Everything is deterministic given
//! its inputs and a seed, and every asymptotic-flavored claim is surfaced as
//! an exact ledger entry rather than an assertion.

pub mod axioms;
pub mod cauchy_schwarz;
pub mod construct;
pub mod counting;
pub mod decompose;
pub mod error;
pub mod family;
pub mod field;
pub mod flat;
pub mod foliation;
pub mod hairbrush;
pub mod linalg;
pub mod refine;

pub use axioms::{check_dplane_wolff, check_wolff, AxiomKind, AxiomReport};
pub use cauchy_schwarz::{verify_cauchy_schwarz, CauchySchwarzReport};
pub use counting::{count_containing, count_disjoint_hyperplanes, count_flats, gaussian_binomial};
pub use decompose::{extract_quasi_extremizers, select_planes, Decomposition, QuasiExtremizer};
pub use error::{Error, Result};
pub use family::FlatFamily;
pub use field::PrimeField;
pub use flat::{enumerate_flats, set_enumeration_guard, AffineFlat};
pub use foliation::{foliate, Foliation};
pub use hairbrush::{hairbrush_decompose, HairbrushOutcome, HairbrushTrace};
pub use linalg::Matrix;
pub use refine::{iterated_popularity, popularity_refine, DichotomyBranch, RefinementTrace};
