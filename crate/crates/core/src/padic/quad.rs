use std::fmt;

use super::{PadicError, PadicScalar, PrimeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtKind {
    Inert,
    Ramified,
}

/// K_p = Q_p(sqrt(Δ)) for a fundamental Δ with v_p(Δ) in {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadContext {
    base: PrimeContext,
    delta: i64,
    kind: ExtKind,
}

/// Smallest positive unit whose square root generates the unramified extension.
pub fn unramified_delta(p: u64) -> i64 {
    if p == 2 {
        return 5;
    }
    (2..p as i64).find(|&a| !is_qr(a, p)).expect("odd prime has a non-residue")
}

fn is_qr(a: i64, p: u64) -> bool {
    let r = a.rem_euclid(p as i64) as u64;
    super::scalar::pow_mod(r, (p - 1) / 2, p) == 1
}

impl QuadContext {
    pub fn new(base: PrimeContext, delta: i64) -> Result<Self, PadicError> {
        let p = base.p();
        if delta == 0 {
            return Err(PadicError::BadDelta(delta));
        }
        let (v, w) = base.split_int(delta as i128);
        let w = w as i64;
        if v > 1 {
            return Err(PadicError::BadDelta(delta));
        }
        let kind = if p == 2 {
            let r8 = w.rem_euclid(8);
            match (v, r8) {
                (0, 5) => ExtKind::Inert,
                (0, 7) | (1, 1) | (1, 7) => ExtKind::Ramified,
                _ => return Err(PadicError::BadDelta(delta)),
            }
        } else if v == 1 {
            ExtKind::Ramified
        } else if is_qr(w, p) {
            return Err(PadicError::BadDelta(delta));
        } else {
            ExtKind::Inert
        };
        Ok(QuadContext { base, delta, kind })
    }

    pub fn inert(base: PrimeContext) -> Self {
        Self::new(base, unramified_delta(base.p())).expect("standard inert delta")
    }

    pub fn base(&self) -> PrimeContext {
        self.base
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn kind(&self) -> ExtKind {
        self.kind
    }

    pub fn delta_scalar(&self) -> PadicScalar {
        PadicScalar::from_int(self.base, self.delta as i128)
    }

    /// Generator ω of the ring of integers: (1+√Δ)/2 when p = 2 and Δ ≡ 1 mod 4, else √Δ.
    pub fn omega(&self) -> QuadScalar {
        let k = self.base;
        if k.p() == 2 && self.delta.rem_euclid(4) == 1 {
            let h = PadicScalar::from_rational(k, 1, 2).unwrap();
            QuadScalar::new(*self, h, h)
        } else {
            QuadScalar::new(*self, PadicScalar::zero(k), PadicScalar::one(k))
        }
    }

    /// A uniformizer of K_p.
    pub fn uniformizer(&self) -> QuadScalar {
        let k = self.base;
        match self.kind {
            ExtKind::Inert => QuadScalar::from_base(*self, PadicScalar::from_int(k, k.p() as i128)),
            ExtKind::Ramified if self.delta == -1 || self.delta.rem_euclid(4) == 3 && k.p() == 2 => {
                QuadScalar::new(*self, PadicScalar::one(k), PadicScalar::one(k))
            }
            ExtKind::Ramified => QuadScalar::new(*self, PadicScalar::zero(k), PadicScalar::one(k)),
        }
    }

    pub fn from_ints(&self, a: i128, b: i128) -> QuadScalar {
        QuadScalar::new(*self, PadicScalar::from_int(self.base, a), PadicScalar::from_int(self.base, b))
    }
}

/// a + b√Δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    ctx: QuadContext,
    pub a: PadicScalar,
    pub b: PadicScalar,
}

impl QuadScalar {
    pub fn new(ctx: QuadContext, a: PadicScalar, b: PadicScalar) -> Self {
        QuadScalar { ctx, a, b }
    }

    pub fn from_base(ctx: QuadContext, a: PadicScalar) -> Self {
        QuadScalar { ctx, a, b: PadicScalar::zero(ctx.base) }
    }

    pub fn one(ctx: QuadContext) -> Self {
        Self::from_base(ctx, PadicScalar::one(ctx.base))
    }

    pub fn ctx(&self) -> QuadContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadScalar { ctx: self.ctx, a: self.a.add(&o.a), b: self.b.add(&o.b) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadScalar { ctx: self.ctx, a: self.a.sub(&o.a), b: self.b.sub(&o.b) }
    }

    pub fn neg(&self) -> Self {
        QuadScalar { ctx: self.ctx, a: self.a.neg(), b: self.b.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.ctx.delta_scalar();
        let a = self.a.mul(&o.a).add(&d.mul(&self.b.mul(&o.b)));
        let b = self.a.mul(&o.b).add(&self.b.mul(&o.a));
        QuadScalar { ctx: self.ctx, a, b }
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        QuadScalar { ctx: self.ctx, a: self.a.mul(s), b: self.b.mul(s) }
    }

    pub fn conj(&self) -> Self {
        QuadScalar { ctx: self.ctx, a: self.a, b: self.b.neg() }
    }

    pub fn norm(&self) -> PadicScalar {
        let d = self.ctx.delta_scalar();
        self.a.mul(&self.a).sub(&d.mul(&self.b.mul(&self.b)))
    }

    pub fn trace(&self) -> PadicScalar {
        self.a.add(&self.a)
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let ni = n.inv()?;
        Ok(self.conj().scale(&ni))
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, PadicError> {
        let base = if e < 0 { self.inv()? } else { *self };
        let mut r = Self::one(self.ctx);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(r)
    }

    /// Twice the valuation, normalized by v(p) = 1; `None` for zero.
    pub fn val2(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        self.norm().val().or_else(|| {
            // norm lost to cancellation: fall back to the coordinate bound
            let va = self.a.val().map(|v| 2 * v);
            let vb = self.b.val().map(|v| 2 * v + 1);
            va.into_iter().chain(vb).min()
        })
    }

    /// Smallest relative precision among nonzero coordinates.
    pub fn rel_prec(&self) -> u32 {
        [self.a, self.b].iter().filter(|x| !x.is_zero()).map(|x| x.rel_prec()).min().unwrap_or(0)
    }

    /// Coordinate-wise agreement, measured relative to the smaller valuation of the pair.
    pub fn agreement(&self, o: &Self) -> i64 {
        let base = [self.a, self.b, o.a, o.b].iter().filter_map(|x| x.val()).min();
        let d = self.sub(o);
        let lo = |x: &PadicScalar| if x.is_zero() { x.abs_prec() } else { x.val().unwrap() };
        let dv = lo(&d.a).min(lo(&d.b));
        match base {
            Some(b) => dv.saturating_sub(b),
            None => i64::MAX,
        }
    }

    pub fn to_text(&self) -> String {
        if self.b.is_exact_zero() {
            return self.a.to_text();
        }
        format!("({}) + ({})*sqrt({})", self.a.to_text(), self.b.to_text(), self.ctx.delta)
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_classification() {
        let k5 = PrimeContext::new(5, 8).unwrap();
        assert_eq!(QuadContext::new(k5, 2).unwrap().kind(), ExtKind::Inert);
        assert!(QuadContext::new(k5, 4).is_err());
        assert_eq!(QuadContext::new(k5, 5).unwrap().kind(), ExtKind::Ramified);
        assert_eq!(QuadContext::new(k5, 10).unwrap().kind(), ExtKind::Ramified);
        assert!(QuadContext::new(k5, 25).is_err());
        let k2 = PrimeContext::new(2, 20).unwrap();
        assert_eq!(QuadContext::new(k2, 5).unwrap().kind(), ExtKind::Inert);
        for d in [-1, 2, -2] {
            assert_eq!(QuadContext::new(k2, d).unwrap().kind(), ExtKind::Ramified);
        }
        for d in [3, 10, 1, 17] {
            assert!(QuadContext::new(k2, d).is_err(), "{d}");
        }
        assert_eq!(unramified_delta(3), 2);
        assert_eq!(unramified_delta(7), 3);
    }

    #[test]
    fn omega_is_integral_root() {
        let k2 = PrimeContext::new(2, 20).unwrap();
        let q = QuadContext::new(k2, 5).unwrap();
        let w = q.omega();
        // ω² = ω + 1
        let lhs = w.mul(&w);
        let rhs = w.add(&QuadScalar::one(q));
        assert!(lhs.agreement(&rhs) >= 18);
        assert_eq!(w.norm().val(), Some(0));
    }

    #[test]
    fn uniformizers_have_half_valuation() {
        let k2 = PrimeContext::new(2, 20).unwrap();
        for d in [-1, 2, -2] {
            let q = QuadContext::new(k2, d).unwrap();
            assert_eq!(q.uniformizer().val2(), Some(1));
        }
        let k7 = PrimeContext::new(7, 8).unwrap();
        assert_eq!(QuadContext::new(k7, 21).unwrap().uniformizer().val2(), Some(1));
    }

    proptest::proptest! {
        #[test]
        fn multiplicative_norm(a in -500i128..500, b in -500i128..500, c in -500i128..500, d in -500i128..500) {
            let k = PrimeContext::new(7, 10).unwrap();
            let q = QuadContext::new(k, 3).unwrap();
            let x = q.from_ints(a, b);
            let y = q.from_ints(c, d);
            proptest::prop_assert_eq!(x.mul(&y).norm(), x.norm().mul(&y.norm()));
            if !y.is_zero() {
                proptest::prop_assert!(x.mul(&y).div(&y).unwrap().agreement(&x) >= 8 || x.is_zero());
            }
        }
    }
}
