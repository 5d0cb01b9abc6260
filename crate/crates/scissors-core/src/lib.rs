//! Exact computational engine for cut-and-paste ("scissors") congruence of
//! rectilinear polytopes.
//!
//! The crate provides:
//! - exact arithmetic in the multi-quadratic tower ([`scalar`]),
//! - axis-aligned polytopes, covers, and common refinement ([`polytope`]),
//! - assembler specifications and span composition ([`assembler`]),
//! - scissors automorphism groups and embeddings ([`group`]),
//! - constructive embeddings and congruences ([`construct`]),
//! - abelianization invariants such as the SAF wedge ([`invariant`]),
//! - finitely generated abelian group calculators, Smith normal form, the
//!   one-dimensional K-theory homology, and Künneth products ([`ktheory`]),
//! - destabilisation complexes and homological connectivity ([`complex`]).

pub mod assembler;
pub mod complex;
pub mod construct;
pub mod group;
pub mod invariant;
pub mod ktheory;
pub mod polytope;
pub mod scalar;
pub mod suite;

pub use assembler::{
    AssemblerMode, AssemblerSpec, CoeffRing, FinSpan, FiniteSetAssembler, Span, TranslationGroup,
};
pub use group::{AffineMap, PieceMap, ScissorsAuto, ScissorsEmbedding};
pub use invariant::{RecInvariant, WedgeElement};
pub use ktheory::{FgAbGroup, GradedAb, IntMatrix};
pub use polytope::{AxisBox, Cover, RectPolytope};
pub use scalar::{CoefficientGroup, Rat, Scalar};
