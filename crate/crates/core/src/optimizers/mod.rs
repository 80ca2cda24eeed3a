//! Exact solvers for small polynomial programs: active-set case
//! enumeration with at most one quadratic constraint, univariate rational
//! maximization and real root isolation.

pub mod library;
pub mod linalg;
pub mod program;
pub mod solver;
pub mod univariate;
pub mod upoly;

pub use program::{parse_qpoly, Constraint, Goal, PolyProgram, QPoly, Relation};
pub use upoly::{isolate_roots, parse_upoly, real_roots, Enclosure, RealRoot, RootIsolation, UPoly};
