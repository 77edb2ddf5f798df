//! p-adic numbers with capped relative precision, quadratic extensions and the
//! finite torus quotients K^×/Q_p^×(1 + p^m O_K).

mod quad;
mod scalar;
mod torus;

pub use quad::{unramified_delta, ExtKind, QuadContext, QuadScalar};
pub use scalar::{inv_mod, is_prime, mul_mod, pow_mod, PadicScalar, PrimeContext, MAX_PRECISION};
pub use torus::{norm_one_to_torus, torus_rep, TorusElement, TorusQuotient};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision {n} out of range for p = {p} (p^N must fit in 63 bits)")]
    PrecisionOutOfRange { p: u64, n: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not a p-adic unit")]
    NotAUnit,
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("discriminant {0} is not a supported quadratic extension")]
    BadDelta(i64),
    #[error("level {m} needs precision above {m} (have {n})")]
    LevelOutOfRange { m: u32, n: u32 },
    #[error("cannot parse p-adic value '{0}'")]
    Parse(String),
}
