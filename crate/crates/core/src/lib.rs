//! Finite models for exceptional-zero Gross-Zagier identities over p-adic tori.

pub mod format;
pub mod groups;
pub mod gz;
pub mod iwasawa;
pub mod lfactors;
pub mod padic;
pub mod projline;
pub mod tate;
pub mod torus;
