//! Evaluators at a split prime, written in the coordinate w = β(x) = (x - τ̄)/(x - τ).

use std::collections::BTreeMap;

use crate::padic::{PadicScalar, TorusElement};

use super::disc::{DiscAddress, Sampler};
use super::integral::{BetaValue, FixedPair, Point};
use super::measure::{BoundaryMeasure, MoebiusMap};
use super::ProjlineError;

/// The function z_p(t) on the torus: constant 1 at a non-split prime, and
/// 1_{Z_p} - 1_{t Z_p} on Q_p^× at a split prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZFunction {
    One,
    /// k = v(t)
    Split { k: i64 },
}

pub enum ZInput<'a> {
    Split(&'a PadicScalar),
    NonSplit(&'a TorusElement),
}

pub fn z_p_function(t: ZInput<'_>) -> Result<ZFunction, ProjlineError> {
    match t {
        ZInput::NonSplit(_) => Ok(ZFunction::One),
        ZInput::Split(t) => Ok(ZFunction::Split { k: t.val().ok_or(ProjlineError::ZeroTorusElement)? }),
    }
}

impl ZFunction {
    /// Value at a point of valuation `v` of Q_p^× (or anywhere on a non-split torus).
    pub fn eval(&self, v: i64) -> i64 {
        match *self {
            ZFunction::One => 1,
            ZFunction::Split { k } => (v >= 0) as i64 - (v >= k) as i64,
        }
    }

    /// (Σ_{n=-b..b} t^n z)(w) with (t·f)(w) = f(t^{-1} w); equals 1 near the
    /// unit circle when v(t) > 0.
    pub fn translate_sum(&self, b: i64, v: i64) -> i64 {
        match *self {
            ZFunction::One => 1,
            ZFunction::Split { k } => (-b..=b).map(|n| self.eval(v - n * k)).sum(),
        }
    }
}

fn big_f(vw: Option<i64>) -> Option<i64> {
    // (v(w) + 1) · 1_{Z_p}(w); None stands for w = 0
    vw.map(|v| if v >= 0 { v + 1 } else { 0 })
}

fn split_pair(fp: &FixedPair) -> Result<(PadicScalar, PadicScalar), ProjlineError> {
    match *fp {
        FixedPair::Split { tau, taubar } => Ok((tau, taubar)),
        FixedPair::NonSplit { .. } => Err(ProjlineError::NeedsSplit),
    }
}

/// φ₁(g) = v(d + τ̄c) - ((v + 1)·1_{Z_p})((d + τ̄c)/(d + τc)).
pub fn phi1_eval(g: &MoebiusMap, fp: &FixedPair) -> Result<i64, ProjlineError> {
    let (tau, taubar) = split_pair(fp)?;
    let e1 = g.d.add(&taubar.mul(&g.c));
    let e2 = g.d.add(&tau.mul(&g.c));
    if e1.is_zero() || e2.is_zero() {
        return Err(ProjlineError::FixedPointCollision);
    }
    let w = e1.div(&e2)?;
    Ok(e1.val().unwrap() - big_f(w.val()).unwrap())
}

/// φ̄₁(g): d + τc when (d + τ̄c)/(d + τc) lies in Z_p, otherwise d + τ̄c.
/// Its valuation exceeds φ₁(g) by 1_{Z_p}((d + τ̄c)/(d + τc)).
pub fn phibar1_eval(g: &MoebiusMap, fp: &FixedPair) -> Result<PadicScalar, ProjlineError> {
    let (tau, taubar) = split_pair(fp)?;
    let e1 = g.d.add(&taubar.mul(&g.c));
    let e2 = g.d.add(&tau.mul(&g.c));
    if e1.is_zero() || e2.is_zero() {
        return Err(ProjlineError::FixedPointCollision);
    }
    let w = e1.div(&e2)?;
    Ok(if w.val().unwrap() >= 0 { e2 } else { e1 })
}

/// c^ord(t)(x) = F(w) - F(t^{-1} w) with F = (v + 1)·1_{Z_p} and w = β(x).
pub fn ord_cocycle(fp: &FixedPair, t: &PadicScalar, x: &Point) -> Result<i64, ProjlineError> {
    let k = t.val().ok_or(ProjlineError::ZeroTorusElement)?;
    match fp.beta(x)? {
        BetaValue::Zero => Ok(k),
        BetaValue::Infinity => Ok(0),
        BetaValue::Base(w) => {
            let v = w.val().ok_or(ProjlineError::FixedPointCollision)?;
            Ok(big_f(Some(v)).unwrap() - big_f(Some(v - k)).unwrap())
        }
        BetaValue::Quad(_) => Err(ProjlineError::NeedsSplit),
    }
}

/// The Möbius map x -> (x - τ̄)/(x - τ); in GL₂(Z_p) when τ, τ̄ are integral
/// with unit difference.
pub fn beta_map(fp: &FixedPair) -> Result<MoebiusMap, ProjlineError> {
    let (tau, taubar) = split_pair(fp)?;
    let integral = |x: &PadicScalar| x.val().map_or(true, |v| v >= 0);
    if !integral(&tau) || !integral(&taubar) || tau.sub(&taubar).val() != Some(0) {
        return Err(ProjlineError::Unresolvable("split fixed points must be integral and distinct mod p".into()));
    }
    let ctx = tau.ctx();
    Ok(MoebiusMap::new(PadicScalar::one(ctx), taubar.neg(), PadicScalar::one(ctx), tau.neg())?)
}

/// ν(p^j Z_p) for ν on the w-line, j in (-D, D].
fn lattice_mass(nu: &BoundaryMeasure, j: i64) -> Result<i64, ProjlineError> {
    if j >= 0 {
        nu.measure_of(&DiscAddress::std(j as u32, 0))
    } else {
        let m = (-j) as u32;
        Ok(nu.total() - nu.measure_of(&DiscAddress::inf(m + 1, 0))?)
    }
}

/// Valuation histogram of β_*μ on the window [lo, hi]; the two tails are
/// reported under lo - 1 (valuations below lo) and hi + 1 (valuations above hi).
pub fn valuation_histogram(
    mu: &BoundaryMeasure,
    fp: &FixedPair,
    lo: i64,
    hi: i64,
) -> Result<BTreeMap<i64, i64>, ProjlineError> {
    let d = mu.maxdepth() as i64;
    if lo > hi || hi + 1 > d || 1 - lo > d {
        return Err(ProjlineError::InsufficientDepth { disc: DiscAddress::std(mu.maxdepth(), 0), level: hi.max(-lo) as u32 });
    }
    let nu = mu.act(&beta_map(fp)?)?;
    let mut out = BTreeMap::new();
    for k in lo..=hi {
        out.insert(k, lattice_mass(&nu, k)? - lattice_mass(&nu, k + 1)?);
    }
    out.insert(hi + 1, lattice_mass(&nu, hi + 1)?);
    out.insert(lo - 1, nu.total() - lattice_mass(&nu, lo)?);
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Both sides of Φ(c^ord(t)) = Σ_j z(t)(p^j) · (β_*Φ)(p^j Z_p).  The left side
/// evaluates the cocycle at sample points in x; the right side reads masses of
/// lattices after moving Φ to the w-line.
pub fn ord_component_sides(phi: &BoundaryMeasure, fp: &FixedPair, t: &PadicScalar) -> Result<(i64, i64), ProjlineError> {
    let k = t.val().ok_or(ProjlineError::ZeroTorusElement)?;
    let d = phi.maxdepth() as i64;
    if k.abs() > d - 1 {
        return Err(ProjlineError::InsufficientDepth { disc: DiscAddress::std(phi.maxdepth(), 0), level: k.unsigned_abs() as u32 });
    }
    let s = Sampler::new(phi.ctx());
    let mut lhs = 0;
    for (u, m) in phi.leaves() {
        let y = s.sample(&u);
        let x = match u.chart {
            super::Chart::Std => Point::Finite(y),
            super::Chart::Inf if y.is_zero() => Point::Infinity,
            super::Chart::Inf => Point::Finite(y.inv()?),
        };
        lhs += m * ord_cocycle(fp, t, &x)?;
    }
    let nu = phi.act(&beta_map(fp)?)?;
    let z = z_p_function(ZInput::Split(t))?;
    let mut rhs = 0;
    for j in k.min(0)..k.max(0) {
        rhs += z.eval(j) * lattice_mass(&nu, j)?;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;
    use crate::projline::disc::cover;
    use rand::{Rng, SeedableRng};

    fn k() -> PrimeContext {
        PrimeContext::new(5, 10).unwrap()
    }

    fn fp() -> FixedPair {
        FixedPair::split(k().scalar(2), k().scalar(-1)).unwrap()
    }

    #[test]
    fn phi1_examples() {
        let id = MoebiusMap::from_ints(k(), 1, 0, 0, 1).unwrap();
        assert_eq!(phi1_eval(&id, &fp()).unwrap(), -1);
        let g = MoebiusMap::from_ints(k(), 1, 0, 0, 5).unwrap();
        assert_eq!(phi1_eval(&g, &fp()).unwrap(), 0);
        assert_eq!(phibar1_eval(&id, &fp()).unwrap(), PadicScalar::one(k()));
    }

    #[test]
    fn phibar_valuation_bookkeeping() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-60..60)).collect();
            let Ok(g) = MoebiusMap::from_ints(k(), e[0], e[1], e[2], e[3]) else { continue };
            let Ok(phi) = phi1_eval(&g, &fp()) else { continue };
            let bar = phibar1_eval(&g, &fp()).unwrap();
            let (tau, taubar) = (k().scalar(2), k().scalar(-1));
            let w = g.d.add(&taubar.mul(&g.c)).div(&g.d.add(&tau.mul(&g.c))).unwrap();
            let ind = (w.val().unwrap() >= 0) as i64;
            assert_eq!(bar.val().unwrap() - phi, ind);
            // scaling by 5 shifts φ₁ by one and φ̄₁ by the scalar
            let five = k().scalar(5);
            let g5 = MoebiusMap::new(g.a.mul(&five), g.b.mul(&five), g.c.mul(&five), g.d.mul(&five)).unwrap();
            assert_eq!(phi1_eval(&g5, &fp()).unwrap(), phi + 1);
            assert_eq!(phibar1_eval(&g5, &fp()).unwrap(), bar.mul(&five));
        }
    }

    #[test]
    fn cocycle_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let t1 = PadicScalar::from_parts(k(), rng.gen_range(-3..4), rng.gen_range(1..5), 10).unwrap();
            let t2 = PadicScalar::from_parts(k(), rng.gen_range(-3..4), rng.gen_range(1..5), 10).unwrap();
            let x = Point::Finite(k().scalar(rng.gen_range(-3000..3000)));
            let lhs = ord_cocycle(&fp(), &t1.mul(&t2), &x).unwrap();
            // (t₁ · f)(x) = f(β⁻¹(t₁⁻¹ β(x))): evaluate the second term in w directly
            let BetaValue::Base(w) = fp().beta(&x).unwrap() else { continue };
            let shifted = w.div(&t1).unwrap();
            let f = |v: i64| if v >= 0 { v + 1 } else { 0 };
            let k2 = t2.val().unwrap();
            let second = f(shifted.val().unwrap()) - f(shifted.val().unwrap() - k2);
            assert_eq!(lhs, ord_cocycle(&fp(), &t1, &x).unwrap() + second);
        }
    }

    #[test]
    fn z_translates_sum_to_one() {
        for k0 in [1i64, 2, 3] {
            let z = ZFunction::Split { k: k0 };
            for v in -6..=6 {
                assert_eq!(z.translate_sum(12, v), 1);
            }
        }
        assert_eq!(ZFunction::Split { k: 1 }.eval(0), 1);
        assert_eq!(ZFunction::Split { k: 1 }.eval(1), 0);
        assert_eq!(ZFunction::Split { k: 1 }.eval(-1), 0);
    }

    #[test]
    fn ord_component_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let discs = cover(5, 4);
        for _ in 0..50 {
            let leaves: Vec<_> = (0..6).map(|_| (discs[rng.gen_range(0..discs.len())], rng.gen_range(-3..4))).collect();
            let phi = BoundaryMeasure::from_leaves(k(), 4, leaves).unwrap();
            let t = PadicScalar::from_parts(k(), rng.gen_range(-3..4), rng.gen_range(1..5), 10).unwrap();
            let (l, r) = ord_component_sides(&phi, &fp(), &t).unwrap();
            assert_eq!(l, r);
        }
        let one = PadicScalar::one(k());
        let phi = BoundaryMeasure::from_leaves(k(), 2, [(DiscAddress::std(2, 3), 1)]).unwrap();
        assert_eq!(ord_component_sides(&phi, &fp(), &one).unwrap(), (0, 0));
    }

    #[test]
    fn histogram_mass() {
        let phi = BoundaryMeasure::from_leaves(k(), 3, [(DiscAddress::std(3, 2), 2), (DiscAddress::std(3, 7), -1), (DiscAddress::inf(3, 5), 4)])
            .unwrap();
        let h = valuation_histogram(&phi, &fp(), -1, 1).unwrap();
        assert_eq!(h.values().sum::<i64>(), phi.total());
    }
}
