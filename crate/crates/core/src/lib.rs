//! Exact verification of the unramified computation of the spin zeta
//! integral for `GSp6` against its Hecke-algebra expression.

pub mod admissible;
pub mod alpha;
pub mod cosets;
pub mod groups;
pub mod hecke;
pub mod hnf;
pub mod lemmas;
pub mod lhs;
pub mod matrix;
pub mod modulus;
pub mod padic;
pub mod report;
pub mod rhs;
pub mod series;
pub mod spin;
pub mod suites;
pub mod symbols;
