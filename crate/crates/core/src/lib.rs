//! Finitely presented groups: words, coset enumeration, Reidemeister-Schreier
//! rewriting, Smith normal form, index-3 towers and triangle-group quotients.

pub mod abelian;
pub mod cache;
pub mod coset;
pub mod eisenstein;
pub mod error;
pub mod finite;
pub mod fingerprint;
pub mod integer;
pub mod matrix;
pub mod parse;
pub mod presentation;
pub mod quotient;
pub mod rewrite;
pub mod repro;
pub mod surface;
pub mod words;

pub use abelian::{abelian_invariants, exponent_matrix, AbelianInvariants};
pub use coset::{todd_coxeter, CosetTable, EnumerationLimits, Strategy};
pub use error::{EnumerationError, FormatError, LinalgError, ParseError, TowerError, WordError};
pub use integer::Integer;
pub use matrix::{mod_p_rank, nullspace_mod_p, smith_diagonal, smith_normal_form, IntMatrix, SnfResult};
pub use parse::{parse_any, parse_presentation, parse_pres_file, parse_word, parse_word_list};
pub use presentation::Presentation;
pub use words::{commutator, conjugate, cyclic_reduce, free_reduce, invert, Letter, Word};
pub use quotient::{ChainReport, EpiToCyclic, RecordId, SubgroupRecord, Tower};
pub use repro::{ReproConfig, ReproReport};
pub use rewrite::{SubgroupPresentation, TietzeBudget};
pub use surface::{SurfaceInvariants, TowerRow};
