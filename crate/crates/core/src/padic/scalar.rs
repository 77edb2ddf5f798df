use std::fmt;

use super::PadicError;

/// A prime together with the working precision N.  Residues live in `[0, p^N)`
/// and products are formed in `u128`, so `p^N` must fit in 63 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    n: u32,
}

pub const MAX_PRECISION: u32 = 64;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    pub fn new(p: u64, n: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if n == 0 || n > MAX_PRECISION {
            return Err(PadicError::PrecisionOutOfRange { p, n });
        }
        let mut acc: u64 = 1;
        for _ in 0..n {
            acc = acc
                .checked_mul(p)
                .filter(|&x| x < (1u64 << 63))
                .ok_or(PadicError::PrecisionOutOfRange { p, n })?;
        }
        Ok(PrimeContext { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// p^k for 0 <= k <= N.
    pub fn pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.n);
        self.p.pow(k)
    }

    pub fn modulus(&self) -> u64 {
        self.pow(self.n)
    }

    /// Split a nonzero integer as p^v * w with p not dividing w.
    pub fn split_int(&self, x: i128) -> (i64, i128) {
        let mut v = 0;
        let mut w = x;
        let p = self.p as i128;
        while w % p == 0 {
            w /= p;
            v += 1;
        }
        (v, w)
    }

    /// Teichmüller lift of a residue prime to p, as an integer mod p^N.
    pub fn teichmuller(&self, a: u64) -> u64 {
        let m = self.modulus();
        let mut x = a % m;
        if x % self.p == 0 {
            return 0;
        }
        for _ in 0..self.n {
            x = pow_mod(x, self.p, m);
        }
        x
    }

    pub fn scalar(&self, x: i64) -> PadicScalar {
        PadicScalar::from_int(*self, x as i128)
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of a unit modulo m via the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Capped relative precision p-adic number p^v * u + O(p^(v+prec)).
///
/// A zero carries its absolute precision in `v` (`i64::MAX` for an exact zero),
/// with `u = 0` and `prec = 0`.  Nonzero values keep `u` reduced mod p^prec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    ctx: PrimeContext,
    v: i64,
    u: u64,
    prec: u32,
}

const EXACT: i64 = i64::MAX;

impl PadicScalar {
    pub fn zero(ctx: PrimeContext) -> Self {
        PadicScalar { ctx, v: EXACT, u: 0, prec: 0 }
    }

    pub fn zero_to(ctx: PrimeContext, abs: i64) -> Self {
        PadicScalar { ctx, v: abs, u: 0, prec: 0 }
    }

    pub fn one(ctx: PrimeContext) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: PrimeContext, x: i128) -> Self {
        if x == 0 {
            return Self::zero(ctx);
        }
        let (v, w) = ctx.split_int(x);
        let m = ctx.modulus() as i128;
        PadicScalar { ctx, v, u: w.rem_euclid(m) as u64, prec: ctx.n }
    }

    pub fn from_rational(ctx: PrimeContext, num: i128, den: i128) -> Result<Self, PadicError> {
        if den == 0 {
            return Err(PadicError::DivisionByZero);
        }
        Self::from_int(ctx, num).div(&Self::from_int(ctx, den))
    }

    /// Build p^v * u with the unit known to `prec` digits.
    pub fn from_parts(ctx: PrimeContext, v: i64, u: u64, prec: u32) -> Result<Self, PadicError> {
        let prec = prec.min(ctx.n);
        if prec == 0 {
            return Err(PadicError::PrecisionExhausted);
        }
        let m = ctx.pow(prec);
        let u = u % m;
        if u % ctx.p == 0 {
            return Err(PadicError::NotAUnit);
        }
        Ok(PadicScalar { ctx, v, u, prec })
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.u == 0 && self.v == EXACT
    }

    /// Valuation, `None` for zero.
    pub fn val(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.v)
        }
    }

    pub fn unit(&self) -> u64 {
        self.u
    }

    /// Relative precision (0 for zero).
    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    /// Absolute precision: the value is known modulo p^abs.
    pub fn abs_prec(&self) -> i64 {
        if self.is_zero() {
            self.v
        } else {
            self.v + self.prec as i64
        }
    }

    /// Valuation, or the absolute precision for a zero (a lower bound).
    fn val_or_abs(&self) -> i64 {
        self.v
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = self.ctx.pow(self.prec);
        PadicScalar { u: (m - self.u) % m, ..*self }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let ctx = self.ctx;
        if self.is_zero() && o.is_zero() {
            return Self::zero_to(ctx, self.v.min(o.v));
        }
        if self.is_zero() {
            return o.cap_abs(self.v);
        }
        if o.is_zero() {
            return self.cap_abs(o.v);
        }
        let abs = self.abs_prec().min(o.abs_prec());
        let vmin = self.v.min(o.v);
        let width = (abs - vmin) as u32;
        if width == 0 {
            return Self::zero_to(ctx, abs);
        }
        let m = ctx.pow(width);
        let term = |x: &Self| -> u64 {
            let shift = x.v - vmin;
            if shift >= width as i64 {
                0
            } else {
                mul_mod(x.u % m, ctx.pow(shift as u32), m)
            }
        };
        let s = (term(self) as u128 + term(o) as u128) % m as u128;
        Self::normalize_residue(ctx, vmin, s as u64, width)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let ctx = self.ctx;
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Self::zero_to(ctx, sat_add(self.v, o.v)),
            (true, false) => Self::zero_to(ctx, sat_add(self.v, o.v)),
            (false, true) => Self::zero_to(ctx, sat_add(self.v, o.v)),
            (false, false) => {
                let prec = self.prec.min(o.prec);
                let m = ctx.pow(prec);
                PadicScalar { ctx, v: self.v + o.v, u: mul_mod(self.u % m, o.u % m, m), prec }
            }
        }
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let m = self.ctx.pow(self.prec);
        let u = inv_mod(self.u, m).ok_or(PadicError::NotAUnit)?;
        Ok(PadicScalar { v: -self.v, u, ..*self })
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

    /// Multiply by p^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero_to(self.ctx, sat_add(self.v, k));
        }
        PadicScalar { v: self.v + k, ..*self }
    }

    /// Forget digits beyond absolute precision `abs`.
    pub fn cap_abs(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero_to(self.ctx, self.v.min(abs));
        }
        if self.abs_prec() <= abs {
            return *self;
        }
        if abs <= self.v {
            return Self::zero_to(self.ctx, abs);
        }
        let prec = (abs - self.v) as u32;
        PadicScalar { u: self.u % self.ctx.pow(prec), prec, ..*self }
    }

    /// Forget digits beyond relative precision `prec`.
    pub fn cap_rel(&self, prec: u32) -> Self {
        if self.is_zero() || self.prec <= prec {
            return *self;
        }
        if prec == 0 {
            return Self::zero_to(self.ctx, self.v);
        }
        PadicScalar { u: self.u % self.ctx.pow(prec), prec, ..*self }
    }

    fn normalize_residue(ctx: PrimeContext, base: i64, s: u64, width: u32) -> Self {
        if s == 0 {
            return Self::zero_to(ctx, base + width as i64);
        }
        let mut k = 0u32;
        let mut w = s;
        while w % ctx.p == 0 {
            w /= ctx.p;
            k += 1;
        }
        let prec = (width - k).min(ctx.n);
        PadicScalar { ctx, v: base + k as i64, u: w % ctx.pow(prec), prec }
    }

    /// The integer residue of an integral value mod p^k, if known that far.
    pub fn residue(&self, k: u32) -> Option<u64> {
        if k == 0 {
            return Some(0);
        }
        if self.is_zero() {
            return (self.v >= k as i64).then_some(0);
        }
        if self.v < 0 || self.abs_prec() < k as i64 {
            return None;
        }
        if self.v >= k as i64 {
            return Some(0);
        }
        let m = self.ctx.pow(k);
        Some(mul_mod(self.u % m, self.ctx.pow(self.v as u32), m))
    }

    /// Agreement to at least `digits` relative to the smaller valuation.
    pub fn agrees(&self, o: &Self, digits: u32) -> bool {
        let d = self.sub(o);
        let base = self.val_or_abs().min(o.val_or_abs());
        let lhs = if d.is_zero() { d.abs_prec() } else { d.v };
        lhs >= sat_add(base, digits as i64)
    }

    /// Number of digits (relative to the smaller valuation) on which two values agree.
    pub fn agreement(&self, o: &Self) -> i64 {
        let d = self.sub(o);
        let base = self.val_or_abs().min(o.val_or_abs());
        let lhs = if d.is_zero() { d.abs_prec() } else { d.v };
        lhs.saturating_sub(base)
    }

    /// Canonical text form `p^v * u mod p^N`, with `0` for an exact zero.
    pub fn to_text(&self) -> String {
        let p = self.ctx.p;
        if self.is_zero() {
            if self.v == EXACT {
                return "0".into();
            }
            return format!("O({}^{})", p, self.v);
        }
        format!("{}^{} * {} mod {}^{}", p, self.v, self.u, p, self.prec)
    }

    pub fn parse_text(ctx: PrimeContext, s: &str) -> Result<Self, PadicError> {
        let t = s.trim();
        let bad = || PadicError::Parse(s.to_string());
        if t == "0" {
            return Ok(Self::zero(ctx));
        }
        if let Some(rest) = t.strip_prefix("O(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let (pp, k) = inner.split_once('^').ok_or_else(bad)?;
            if pp.trim().parse::<u64>().map_err(|_| bad())? != ctx.p {
                return Err(bad());
            }
            return Ok(Self::zero_to(ctx, k.trim().parse().map_err(|_| bad())?));
        }
        if let Some((lhs, rhs)) = t.split_once(" mod ") {
            let (pv, u) = lhs.split_once('*').ok_or_else(bad)?;
            let (pp, v) = pv.trim().split_once('^').ok_or_else(bad)?;
            let (pp2, k) = rhs.trim().split_once('^').ok_or_else(bad)?;
            let pp: u64 = pp.trim().parse().map_err(|_| bad())?;
            let pp2: u64 = pp2.trim().parse().map_err(|_| bad())?;
            if pp != ctx.p || pp2 != ctx.p {
                return Err(bad());
            }
            let v: i64 = v.trim().parse().map_err(|_| bad())?;
            let u: u64 = u.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            return Self::from_parts(ctx, v, u, k);
        }
        if let Some((num, den)) = t.split_once('/') {
            let num: i128 = num.trim().parse().map_err(|_| bad())?;
            let den: i128 = den.trim().parse().map_err(|_| bad())?;
            return Self::from_rational(ctx, num, den);
        }
        let x: i128 = t.parse().map_err(|_| bad())?;
        Ok(Self::from_int(ctx, x))
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_add(b)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: u64, n: u32) -> PrimeContext {
        PrimeContext::new(p, n).unwrap()
    }

    #[test]
    fn half_mod_625() {
        let k = c(5, 4);
        let h = PadicScalar::from_rational(k, 1, 2).unwrap();
        assert_eq!(h.val(), Some(0));
        assert_eq!(h.unit(), 313);
        assert_eq!(h.rel_prec(), 4);
    }

    #[test]
    fn teichmuller_seven_mod_25() {
        let k = c(5, 2);
        let t = k.teichmuller(2);
        assert_eq!(t, 7);
        assert_eq!(pow_mod(t, 4, 25), 1);
    }

    #[test]
    fn rejects_oversized_modulus() {
        assert!(PrimeContext::new(7, 23).is_err());
        assert!(PrimeContext::new(7, 22).is_ok());
        assert!(PrimeContext::new(2, 62).is_ok());
        assert!(PrimeContext::new(4, 3).is_err());
    }

    #[test]
    fn cancellation_lowers_precision() {
        let k = c(3, 6);
        let a = PadicScalar::from_int(k, 1);
        let b = PadicScalar::from_int(k, 1 + 81);
        let d = b.sub(&a);
        assert_eq!(d.val(), Some(4));
        assert_eq!(d.rel_prec(), 2);
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(z.abs_prec(), 6);
    }

    #[test]
    fn text_roundtrip() {
        let k = c(7, 5);
        for x in [PadicScalar::from_rational(k, -3, 49).unwrap(), PadicScalar::zero(k), PadicScalar::zero_to(k, 3)] {
            assert_eq!(PadicScalar::parse_text(k, &x.to_text()).unwrap(), x);
        }
    }

    #[test]
    fn residue_of_integral() {
        let k = c(5, 6);
        let x = PadicScalar::from_int(k, 1234);
        assert_eq!(x.residue(3), Some(1234 % 125));
        let y = PadicScalar::from_rational(k, 1, 5).unwrap();
        assert_eq!(y.residue(1), None);
    }

    proptest::proptest! {
        #[test]
        fn field_axioms(a in -5000i128..5000, b in -5000i128..5000, d in 1i128..300) {
            let k = c(3, 10);
            let x = PadicScalar::from_rational(k, a, d).unwrap();
            let y = PadicScalar::from_int(k, b);
            let s = x.add(&y).sub(&y);
            proptest::prop_assert!(x.is_zero() || s.agrees(&x, s.rel_prec()));
            if !y.is_zero() {
                let q = x.mul(&y).div(&y).unwrap();
                proptest::prop_assert_eq!(q, x);
            }
        }
    }
}
