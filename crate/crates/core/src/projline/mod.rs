//! The disc tree of P¹(Q_p), integer-valued boundary measures, the Möbius
//! action, multiplicative integrals and the pushforward to torus quotients.

mod disc;
mod integral;
mod measure;
mod split;

pub use disc::{cover, Chart, DiscAddress, Sampler};
pub use integral::{
    coarsen, mult_integral, period_product, pushforward_to_torus, BetaValue, FixedPair, IntegralValue, Point,
};
pub use measure::{BoundaryMeasure, MoebiusMap};
pub use split::{
    beta_map, ord_cocycle, ord_component_sides, phi1_eval, phibar1_eval, valuation_histogram, z_p_function,
    ZFunction, ZInput,
};

use crate::padic::PadicError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjlineError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("invalid disc address {0}")]
    BadAddress(DiscAddress),
    #[error("duplicate record for {0}")]
    DuplicateRecord(DiscAddress),
    #[error("additivity violated at disc {disc}: listed {listed}, children sum to {children}")]
    Additivity { disc: DiscAddress, listed: i64, children: i64 },
    #[error("depth {depth} exceeds stored maxdepth {maxdepth}")]
    DepthExceeded { depth: u32, maxdepth: u32 },
    #[error("measures have different contexts or depths")]
    Incompatible,
    #[error("singular Moebius map")]
    Singular,
    #[error("image disc not resolvable: {0}")]
    Unresolvable(String),
    #[error("fixed point lies in Q_p")]
    FixedPointInBase,
    #[error("sample point collides with a fixed point")]
    FixedPointCollision,
    #[error("operation needs a non-split fixed pair")]
    NeedsNonSplit,
    #[error("operation needs a split fixed pair")]
    NeedsSplit,
    #[error("torus element is zero")]
    ZeroTorusElement,
    #[error("insufficient depth: disc {disc} does not map into a single level-{level} coset")]
    InsufficientDepth { disc: DiscAddress, level: u32 },
    #[error("integral did not converge: {achieved} digits, wanted {target}")]
    NonConvergence { achieved: i64, target: u32 },
}
