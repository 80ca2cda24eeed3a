//! Exact machinery for rainbow triangles in 3-edge-colored complete graphs:
//! canonical forms and censuses, induced densities, flag algebra expansions,
//! sum-of-squares certificate checking, blow-up constructions, exhaustive
//! search and exact small optimization programs.

pub mod canon;
pub mod census;
pub mod certificate;
pub mod constructions;
pub mod densities;
pub mod error;
pub mod flags;
pub mod graph;
pub mod lincomb;
pub mod optimizers;
pub mod parallel;
pub mod rational;
pub mod search;

pub use canon::{canonical_form, is_isomorphic, CanonicalKey, Mode};
pub use census::{census, census_cached, enumerate_census, Census};
pub use error::{Error, Result};
pub use graph::{ColoredGraph, Color};
pub use rational::Rational;
