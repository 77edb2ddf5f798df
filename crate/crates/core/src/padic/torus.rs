use crate::groups::{abelian_basis, basis_coordinates, CyclicBasis, EnumGroup};

use super::scalar::{inv_mod, mul_mod};
use super::{ExtKind, PadicError, PadicScalar, QuadContext, QuadScalar};

/// Element of K^×/Q_p^×, stored with its first nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusElement(QuadScalar);

impl TorusElement {
    pub fn rep(&self) -> &QuadScalar {
        &self.0
    }

    pub fn mul(&self, o: &Self) -> Result<Self, PadicError> {
        torus_rep(&self.0.mul(&o.0))
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        torus_rep(&self.0.conj())
    }
}

pub fn torus_rep(x: &QuadScalar) -> Result<TorusElement, PadicError> {
    let lead = if !x.a.is_zero() { x.a } else { x.b };
    if lead.is_zero() {
        return Err(PadicError::DivisionByZero);
    }
    let s = lead.inv()?;
    let mut y = x.scale(&s);
    if !x.a.is_zero() {
        y.a = PadicScalar::one(x.ctx().base());
    } else {
        y.b = PadicScalar::one(x.ctx().base());
    }
    Ok(TorusElement(y))
}

/// Hilbert 90: a torus element t with t̄/t... written so that t/t̄ = w for a norm-one w.
pub fn norm_one_to_torus(w: &QuadScalar) -> Result<TorusElement, PadicError> {
    let t = QuadScalar::one(w.ctx()).add(w);
    if t.is_zero() {
        // w = -1 is the image of √Δ
        let k = w.ctx().base();
        return torus_rep(&QuadScalar::new(w.ctx(), PadicScalar::zero(k), PadicScalar::one(k)));
    }
    torus_rep(&t)
}

/// The finite quotient T(Q_p)/U_m = K^×/Q_p^×(1 + p^m O_K).
///
/// Elements are indexed `parity * units + unit_index`; a unit class is a
/// primitive pair (α : β) in O_K = Z_p[ω] reduced mod p^m and scaled so that
/// a unit coordinate equals 1.  The parity bit records a factor of the
/// uniformizer in the ramified case.
#[derive(Clone, Debug)]
pub struct TorusQuotient {
    qctx: QuadContext,
    m: u32,
    pm: u64,
    s: u64,
    r: u64,
    ramified: bool,
    pi: (i128, i128),
    pi_sq: usize,
    units: Vec<(u8, u64)>,
    lookup: Vec<u32>,
    basis: CyclicBasis,
    coords: Vec<Vec<u64>>,
}

impl TorusQuotient {
    pub fn new(qctx: QuadContext, m: u32) -> Result<Self, PadicError> {
        let base = qctx.base();
        let p = base.p();
        if m == 0 || m + 1 > base.precision() {
            return Err(PadicError::LevelOutOfRange { m, n: base.precision() });
        }
        let pm = p.pow(m);
        if pm > 1 << 20 {
            return Err(PadicError::LevelOutOfRange { m, n: base.precision() });
        }
        let d = qctx.delta() as i128;
        let half_basis = p == 2 && qctx.delta().rem_euclid(4) == 1;
        let (s, r) = if half_basis { (1i128, (d - 1) / 4) } else { (0, d) };
        let red = |x: i128| x.rem_euclid(pm as i128) as u64;
        let ramified = qctx.kind() == ExtKind::Ramified;
        let pi = if !ramified {
            (p as i128, 0)
        } else if qctx.delta().rem_euclid(4) == 3 && p == 2 {
            (1, 1)
        } else {
            (0, 1)
        };
        let mut tq = TorusQuotient {
            qctx,
            m,
            pm,
            s: red(s),
            r: red(r),
            ramified,
            pi,
            pi_sq: 0,
            units: Vec::new(),
            lookup: vec![u32::MAX; 2 * pm as usize],
            basis: CyclicBasis { gens: vec![], orders: vec![] },
            coords: vec![],
        };
        for c in 0..pm {
            if tq.is_unit(1, c) {
                tq.lookup[c as usize] = tq.units.len() as u32;
                tq.units.push((0, c));
            }
        }
        for c in (0..pm).step_by(p as usize) {
            if tq.is_unit(c, 1) {
                tq.lookup[(pm + c) as usize] = tq.units.len() as u32;
                tq.units.push((1, c));
            }
        }
        if ramified {
            // π² / p as a unit class
            let (a, b) = pi;
            let (s, r) = (s, r);
            let sq = (a * a + r * b * b, 2 * a * b + s * b * b);
            let pp = p as i128;
            debug_assert!(sq.0 % pp == 0 && sq.1 % pp == 0);
            tq.pi_sq = tq.unit_index(red(sq.0 / pp), red(sq.1 / pp)).expect("π²/p is a unit");
        }
        tq.basis = abelian_basis(&tq);
        tq.coords = basis_coordinates(&tq, &tq.basis);
        Ok(tq)
    }

    pub fn qctx(&self) -> QuadContext {
        self.qctx
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn basis(&self) -> &CyclicBasis {
        &self.basis
    }

    pub fn coords(&self, x: usize) -> &[u64] {
        &self.coords[x]
    }

    pub fn from_coords(&self, c: &[u64]) -> usize {
        let mut acc = self.identity();
        for (k, &e) in c.iter().enumerate() {
            acc = self.op(acc, self.pow(self.basis.gens[k], e));
        }
        acc
    }

    fn norm_mod_p(&self, a: u64, b: u64) -> u64 {
        let p = self.qctx.base().p();
        let (a, b, s, r) = (a % p, b % p, self.s % p, self.r % p);
        (a * a + s * a * b + (p - r) * b % p * b) % p
    }

    fn is_unit(&self, a: u64, b: u64) -> bool {
        self.norm_mod_p(a, b) != 0
    }

    /// Index of the unit class of a primitive pair (α, β) mod p^m.
    fn unit_index(&self, a: u64, b: u64) -> Option<usize> {
        let p = self.qctx.base().p();
        let pm = self.pm;
        let (chart, c) = if a % p != 0 {
            (0u64, mul_mod(b, inv_mod(a, pm)?, pm))
        } else {
            (1u64, mul_mod(a, inv_mod(b, pm)?, pm))
        };
        let i = self.lookup[(chart * pm + c) as usize];
        (i != u32::MAX).then_some(i as usize)
    }

    fn pair(&self, unit: usize) -> (u64, u64) {
        match self.units[unit] {
            (0, c) => (1, c),
            (_, c) => (c, 1),
        }
    }

    fn mul_pairs(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let pm = self.pm;
        let bb = mul_mod(x.1, y.1, pm);
        let a = (mul_mod(x.0, y.0, pm) + mul_mod(self.r, bb, pm)) % pm;
        let b = ((mul_mod(x.0, y.1, pm) + mul_mod(x.1, y.0, pm)) % pm + mul_mod(self.s, bb, pm)) % pm;
        (a, b)
    }

    /// Label of an arbitrary element of K^×.
    pub fn label(&self, x: &QuadScalar) -> Result<usize, PadicError> {
        if x.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let (alpha, beta) = self.primitive_coords(x)?;
        let k = self.qctx.base();
        let sc = PadicScalar::from_int(k, self.s as i128);
        let rc = PadicScalar::from_int(k, self.r_exact());
        let nrm = alpha.mul(&alpha).add(&sc.mul(&alpha.mul(&beta))).sub(&rc.mul(&beta.mul(&beta)));
        let nonunit = match nrm.val() {
            Some(v) => v > 0,
            None => {
                if nrm.abs_prec() < 1 {
                    return Err(PadicError::PrecisionExhausted);
                }
                true
            }
        };
        if nonunit {
            if !self.ramified {
                return Err(PadicError::PrecisionExhausted);
            }
            let y = x.div(&self.pi_scalar())?;
            let (a2, b2) = self.primitive_coords(&y)?;
            let u = self.unit_from_coords(&a2, &b2)?;
            return Ok(self.units.len() + u);
        }
        self.unit_from_coords(&alpha, &beta)
    }

    fn r_exact(&self) -> i128 {
        let d = self.qctx.delta() as i128;
        if self.s == 1 {
            (d - 1) / 4
        } else {
            d
        }
    }

    fn pi_scalar(&self) -> QuadScalar {
        self.okc_to_quad(self.pi.0, self.pi.1)
    }

    fn okc_to_quad(&self, a: i128, b: i128) -> QuadScalar {
        let w = self.qctx.omega();
        let k = self.qctx.base();
        QuadScalar::from_base(self.qctx, PadicScalar::from_int(k, a)).add(&w.scale(&PadicScalar::from_int(k, b)))
    }

    fn primitive_coords(&self, x: &QuadScalar) -> Result<(PadicScalar, PadicScalar), PadicError> {
        let (alpha, beta) = if self.s == 1 { (x.a.sub(&x.b), x.b.add(&x.b)) } else { (x.a, x.b) };
        let k = match (alpha.val(), beta.val()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(PadicError::PrecisionExhausted),
        };
        Ok((alpha.shift(-k), beta.shift(-k)))
    }

    fn unit_from_coords(&self, alpha: &PadicScalar, beta: &PadicScalar) -> Result<usize, PadicError> {
        let (chart, ratio) = if alpha.val() == Some(0) { (0, beta.div(alpha)?) } else { (1, alpha.div(beta)?) };
        let c = ratio.residue(self.m).ok_or(PadicError::PrecisionExhausted)?;
        let i = self.lookup[(chart * self.pm + c) as usize];
        if i == u32::MAX {
            return Err(PadicError::PrecisionExhausted);
        }
        Ok(i as usize)
    }

    /// A representative in K^× of a label.
    pub fn representative(&self, x: usize) -> QuadScalar {
        let (parity, unit) = (x / self.units.len(), x % self.units.len());
        let (a, b) = self.pair(unit);
        let u = self.okc_to_quad(a as i128, b as i128);
        if parity == 1 {
            u.mul(&self.pi_scalar())
        } else {
            u
        }
    }
}

impl EnumGroup for TorusQuotient {
    fn size(&self) -> usize {
        self.units.len() * if self.ramified { 2 } else { 1 }
    }

    fn identity(&self) -> usize {
        self.lookup[0] as usize
    }

    fn op(&self, x: usize, y: usize) -> usize {
        let u = self.units.len();
        let (ex, ux) = (x / u, x % u);
        let (ey, uy) = (y / u, y % u);
        let mut z = self.mul_pairs(self.pair(ux), self.pair(uy));
        if ex == 1 && ey == 1 {
            z = self.mul_pairs(z, self.pair(self.pi_sq));
        }
        let idx = self.unit_index(z.0, z.1).expect("unit classes are closed");
        ((ex + ey) % 2) * u + idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    fn quot(p: u64, delta: i64, m: u32) -> TorusQuotient {
        let k = PrimeContext::new(p, 10).unwrap();
        TorusQuotient::new(QuadContext::new(k, delta).unwrap(), m).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(quot(3, 2, 1).size(), 4);
        assert_eq!(quot(5, 2, 2).size(), 30);
        assert_eq!(quot(5, 5, 2).size(), 50);
        assert_eq!(quot(2, 5, 3).size(), 12);
        for d in [-1, 2, -2] {
            assert_eq!(quot(2, d, 3).size(), 16, "{d}");
        }
        assert_eq!(quot(7, 21, 1).size(), 14);
    }

    #[test]
    fn labels_are_homomorphic_on_representatives() {
        for (p, d, m) in [(3, 2, 2), (5, 10, 2), (2, 5, 3), (2, -1, 3), (2, 2, 2), (7, 3, 1)] {
            let t = quot(p, d, m);
            for x in 0..t.size() {
                assert_eq!(t.label(&t.representative(x)).unwrap(), x);
            }
            for x in (0..t.size()).step_by(3) {
                for y in (0..t.size()).step_by(5) {
                    let prod = t.representative(x).mul(&t.representative(y));
                    assert_eq!(t.label(&prod).unwrap(), t.op(x, y), "{p} {d} {m}");
                }
            }
        }
    }

    #[test]
    fn label_ignores_base_scalars() {
        let t = quot(5, 2, 2);
        let k = t.qctx().base();
        let x = t.qctx().from_ints(3, 7);
        let y = x.scale(&PadicScalar::from_rational(k, 50, 3).unwrap());
        assert_eq!(t.label(&x).unwrap(), t.label(&y).unwrap());
    }

    #[test]
    fn basis_coordinates_roundtrip() {
        let t = quot(3, 6, 2);
        for x in 0..t.size() {
            assert_eq!(t.from_coords(t.coords(x)), x);
        }
        let total: u64 = t.basis().orders.iter().product();
        assert_eq!(total as usize, t.size());
    }

    #[test]
    fn torus_rep_is_scale_invariant() {
        let k = PrimeContext::new(7, 8).unwrap();
        let q = QuadContext::new(k, 3).unwrap();
        let x = q.from_ints(14, 5);
        let lam = PadicScalar::from_int(k, 3);
        assert_eq!(torus_rep(&x.scale(&lam)).unwrap(), torus_rep(&x).unwrap());
        let r = torus_rep(&x).unwrap();
        assert_eq!(torus_rep(r.rep()).unwrap(), r);
    }

    #[test]
    fn hilbert_ninety() {
        let k = PrimeContext::new(5, 10).unwrap();
        let q = QuadContext::new(k, 2).unwrap();
        let t = q.from_ints(3, 4);
        let w = t.div(&t.conj()).unwrap();
        let s = norm_one_to_torus(&w).unwrap();
        let back = s.rep().div(&s.rep().conj()).unwrap();
        assert!(back.agreement(&w) >= 8);
    }
}
