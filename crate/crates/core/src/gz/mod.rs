//! Exceptional-zero Gross-Zagier identities on finite models: the measure
//! built from boundary distributions, Darmon and plectic points and the
//! comparison in the graded pieces of the augmentation filtration.

mod instance;
mod measure;
mod plectic;
mod random;
mod split;
mod verify;

pub use instance::{idele_group, ClassMeasures, GZInstance, InstanceParts, MinusPrime, PrimeData};
pub use measure::{build_measure, build_measure_int, epsilon_exact, unramified_at_s_characters};
pub use plectic::{
    class_integrals, darmon_difference, darmon_point, plectic_determinant, plectic_point, plectic_q, PlecticElement,
    PlecticGroup,
};
pub use random::{corrupt_rec, random_instance, working_precision, RandomSpec};
pub use split::{ord_component_check, random_split_case, OrdCheck};
pub use verify::{epsilon_sq_total, verify_thm71, verify_thm91, Verdict};

use crate::iwasawa::IwasawaError;
use crate::lfactors::LFactorError;
use crate::padic::PadicError;
use crate::projline::ProjlineError;
use crate::tate::TateError;
use crate::torus::TorusError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GzError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Projline(#[from] ProjlineError),
    #[error(transparent)]
    Iwasawa(#[from] IwasawaError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Tate(#[from] TateError),
    #[error(transparent)]
    LFactor(#[from] LFactorError),
    #[error("invariant {invariant} violated: {detail}")]
    Invalid { invariant: &'static str, detail: String },
    #[error("character is not trivial on the rec image at prime {0}")]
    CharacterRamifiedAtS(u64),
    #[error("unit index {0} is not invertible in the coefficient ring")]
    IndexNotInvertible(u64),
    #[error("operation needs exactly {want} primes in S, instance has {got}")]
    Arity { want: usize, got: usize },
    #[error("character values must be ±1 for point sums")]
    NonRationalCharacter,
    #[error("ε² is not rational")]
    IrrationalEpsilon,
    #[error("tensors at different primes or coefficient rings")]
    PlecticMismatch,
}

#[cfg(test)]
mod tests;
