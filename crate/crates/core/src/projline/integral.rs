use std::collections::BTreeMap;

use crate::padic::{PadicScalar, QuadScalar, TorusQuotient};

use super::disc::{Chart, DiscAddress, Sampler};
use super::measure::BoundaryMeasure;
use super::ProjlineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(PadicScalar),
    Infinity,
}

/// The two fixed points of a torus acting on P¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPair {
    NonSplit { tau: QuadScalar },
    Split { tau: PadicScalar, taubar: PadicScalar },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaValue {
    Quad(QuadScalar),
    Base(PadicScalar),
    /// x = τ̄
    Zero,
    /// x = τ
    Infinity,
}

impl FixedPair {
    pub fn nonsplit(tau: QuadScalar) -> Result<Self, ProjlineError> {
        if tau.b.is_zero() {
            return Err(ProjlineError::FixedPointInBase);
        }
        Ok(FixedPair::NonSplit { tau })
    }

    pub fn split(tau: PadicScalar, taubar: PadicScalar) -> Result<Self, ProjlineError> {
        if tau.sub(&taubar).is_zero() {
            return Err(ProjlineError::FixedPointCollision);
        }
        Ok(FixedPair::Split { tau, taubar })
    }

    /// β(x) = (x - τ̄)/(x - τ); β(∞) = 1.
    pub fn beta(&self, x: &Point) -> Result<BetaValue, ProjlineError> {
        match (self, x) {
            (FixedPair::NonSplit { tau }, Point::Infinity) => Ok(BetaValue::Quad(QuadScalar::one(tau.ctx()))),
            (FixedPair::NonSplit { tau }, Point::Finite(x)) => {
                let xq = QuadScalar::from_base(tau.ctx(), *x);
                Ok(BetaValue::Quad(xq.sub(&tau.conj()).div(&xq.sub(tau))?))
            }
            (FixedPair::Split { tau, .. }, Point::Infinity) => Ok(BetaValue::Base(PadicScalar::one(tau.ctx()))),
            (FixedPair::Split { tau, taubar }, Point::Finite(x)) => {
                let num = x.sub(taubar);
                let den = x.sub(tau);
                match (num.is_zero(), den.is_zero()) {
                    (true, _) => Ok(BetaValue::Zero),
                    (_, true) => Ok(BetaValue::Infinity),
                    _ => Ok(BetaValue::Base(num.div(&den)?)),
                }
            }
        }
    }
}

/// Value of a multiplicative integral with the number of digits on which the
/// depth-D and depth-(D-1) Riemann products agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralValue {
    pub value: QuadScalar,
    pub precision: i64,
}

fn integrand_factor(
    s: &Sampler,
    d: &DiscAddress,
    t: &QuadScalar,
) -> QuadScalar {
    let q = t.ctx();
    let z = QuadScalar::from_base(q, s.sample(d));
    match d.chart {
        // x - t
        Chart::Std => z.sub(t),
        // (1/y - t) = (1 - t y)/y; the 1/y drops out of every ratio
        Chart::Inf => QuadScalar::one(q).sub(&t.mul(&z)),
    }
}

fn riemann_product(
    mu: &BoundaryMeasure,
    depth: u32,
    s: &Sampler,
    t1: &QuadScalar,
    t2: &QuadScalar,
) -> Result<QuadScalar, ProjlineError> {
    let q = t1.ctx();
    let mut num = QuadScalar::one(q);
    let mut den = QuadScalar::one(q);
    for (d, m) in mu.level(depth) {
        let f2 = integrand_factor(s, &d, t2);
        let f1 = integrand_factor(s, &d, t1);
        if f1.is_zero() || f2.is_zero() {
            return Err(ProjlineError::FixedPointCollision);
        }
        let (a, b) = if m > 0 { (f2, f1) } else { (f1, f2) };
        num = num.mul(&a.pow(m.abs())?);
        den = den.mul(&b.pow(m.abs())?);
    }
    Ok(num.div(&den)?)
}

/// ∮ (x - τ₂)/(x - τ₁) dμ as the Riemann product over the deepest layer with
/// Teichmüller-digit sample points.  With `target = Some(M)` a result whose
/// depth-to-depth agreement is below M is an error.
pub fn mult_integral(
    mu: &BoundaryMeasure,
    t1: &QuadScalar,
    t2: &QuadScalar,
    target: Option<u32>,
) -> Result<IntegralValue, ProjlineError> {
    if t1.sub(t2).is_zero() {
        return Err(ProjlineError::FixedPointCollision);
    }
    let s = Sampler::new(mu.ctx());
    let n = mu.ctx().precision() as i64;
    if mu.is_zero() {
        return Ok(IntegralValue { value: QuadScalar::one(t1.ctx()), precision: n });
    }
    let d = mu.maxdepth();
    let value = riemann_product(mu, d, &s, t1, t2)?;
    let cap = value.rel_prec() as i64;
    let precision = if d == 0 {
        0
    } else {
        let coarse = riemann_product(mu, d - 1, &s, t1, t2)?;
        value.agreement(&coarse).min(cap)
    };
    if let Some(m) = target {
        if precision < m as i64 {
            return Err(ProjlineError::NonConvergence { achieved: precision, target: m });
        }
    }
    Ok(IntegralValue { value, precision })
}

/// Darmon period Π_std (x_U - τ)^μ(U) · Π_inf (1 - τ y_U)^μ(U), based at ∞.
/// Its conjugate over itself is `mult_integral(μ, τ, τ̄)`.
pub fn period_product(mu: &BoundaryMeasure, tau: &QuadScalar) -> Result<QuadScalar, ProjlineError> {
    let s = Sampler::new(mu.ctx());
    let q = tau.ctx();
    let mut num = QuadScalar::one(q);
    let mut den = QuadScalar::one(q);
    for (d, m) in mu.leaves() {
        let f = integrand_factor(&s, &d, tau);
        if m > 0 {
            num = num.mul(&f.pow(m)?);
        } else {
            den = den.mul(&f.pow(-m)?);
        }
    }
    Ok(num.div(&den)?)
}

/// ν(c) = μ({x : β(x) ∈ c}) over the level-m torus quotient.  Each leaf must
/// land in a single coset; the sufficient test is D - v(x_U - τ̄) >= m (and the
/// analogue on the inf chart), otherwise the depth is reported insufficient.
pub fn pushforward_to_torus(
    mu: &BoundaryMeasure,
    fp: &FixedPair,
    tq: &TorusQuotient,
) -> Result<BTreeMap<usize, i64>, ProjlineError> {
    let FixedPair::NonSplit { tau } = fp else {
        return Err(ProjlineError::NeedsNonSplit);
    };
    let taubar = tau.conj();
    let s = Sampler::new(mu.ctx());
    let m2 = 2 * tq.level() as i64;
    let mut out: BTreeMap<usize, i64> = BTreeMap::new();
    for (d, mass) in mu.leaves() {
        let e = integrand_factor(&s, &d, &taubar);
        let ve = e.val2().ok_or(ProjlineError::FixedPointCollision)?;
        let margin = match d.chart {
            Chart::Std => 2 * d.depth as i64 - ve,
            Chart::Inf => {
                let vt = taubar.val2().expect("nonzero fixed point");
                2 * (d.depth.max(1) as i64) + vt - ve
            }
        };
        if margin < m2 {
            return Err(ProjlineError::InsufficientDepth { disc: d, level: tq.level() });
        }
        let label = tq.label(&e)?;
        *out.entry(label).or_insert(0) += mass;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Push a finer-level distribution down to a coarser quotient.
pub fn coarsen(
    nu: &BTreeMap<usize, i64>,
    fine: &TorusQuotient,
    coarse: &TorusQuotient,
) -> Result<BTreeMap<usize, i64>, ProjlineError> {
    let mut out: BTreeMap<usize, i64> = BTreeMap::new();
    for (&c, &m) in nu {
        *out.entry(coarse.label(&fine.representative(c))?).or_insert(0) += m;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}
