//! Tate curves E_q : Y² + XY = X³ + a4 X + a6 and the uniformization
//! K_p^×/q^Z -> E_q(K_p).

use crate::padic::{PadicError, PadicScalar, QuadContext, QuadScalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TateError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("Tate period must have positive valuation")]
    PeriodNotSmall,
    #[error("points lie on different curves")]
    CurveMismatch,
    #[error("Galois action data missing")]
    MissingAction,
    #[error("u = 0 has no point")]
    ZeroArgument,
}

fn sigma(n: u64, k: u32) -> i128 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as i128).pow(k)).sum()
}

/// Integer q-expansion coefficients (index n = 1..=terms) of a4, a6 and s₁.
pub fn tate_coefficients(terms: usize) -> (Vec<i128>, Vec<i128>, Vec<i128>) {
    let mut a4 = Vec::with_capacity(terms);
    let mut a6 = Vec::with_capacity(terms);
    let mut s1 = Vec::with_capacity(terms);
    for n in 1..=terms as u64 {
        let s3 = sigma(n, 3);
        let s5 = sigma(n, 5);
        a4.push(-5 * s3);
        // 5σ₃ + 7σ₅ ≡ 0 mod 12 termwise
        a6.push(-(5 * s3 + 7 * s5) / 12);
        s1.push(sigma(n, 1));
    }
    (a4, a6, s1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TateCurve {
    qctx: QuadContext,
    q: PadicScalar,
    a4: PadicScalar,
    a6: PadicScalar,
    s1: PadicScalar,
}

fn eval_series(q: &PadicScalar, coeffs: &[i128]) -> PadicScalar {
    let ctx = q.ctx();
    let mut acc = PadicScalar::zero(ctx);
    let mut qn = *q;
    for &c in coeffs {
        acc = acc.add(&PadicScalar::from_int(ctx, c).mul(&qn));
        qn = qn.mul(q);
    }
    acc
}

pub fn make_curve(qctx: QuadContext, q: PadicScalar) -> Result<TateCurve, TateError> {
    let vq = q.val().ok_or(TateError::PeriodNotSmall)?;
    if vq < 1 {
        return Err(TateError::PeriodNotSmall);
    }
    let n = qctx.base().precision() as i64;
    // terms with n·v(q) >= N vanish mod p^N
    let terms = ((n + vq - 1) / vq) as usize;
    let (c4, c6, c1) = tate_coefficients(terms);
    let cap = |x: PadicScalar| x.cap_abs(n);
    Ok(TateCurve {
        qctx,
        q,
        a4: cap(eval_series(&q, &c4)),
        a6: cap(eval_series(&q, &c6)),
        s1: cap(eval_series(&q, &c1)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TatePoint {
    Zero,
    Affine { x: QuadScalar, y: QuadScalar },
}

impl TateCurve {
    pub fn q(&self) -> PadicScalar {
        self.q
    }

    pub fn a4(&self) -> PadicScalar {
        self.a4
    }

    pub fn a6(&self) -> PadicScalar {
        self.a6
    }

    pub fn qctx(&self) -> QuadContext {
        self.qctx
    }

    fn lift(&self, x: &PadicScalar) -> QuadScalar {
        QuadScalar::from_base(self.qctx, *x)
    }

    /// Reduce into 0 <= v(u) < v(q); returns the reduced representative.
    pub fn reduce(&self, u: &QuadScalar) -> Result<QuadScalar, TateError> {
        let v2 = u.val2().ok_or(TateError::ZeroArgument)?;
        let vq2 = 2 * self.q.val().unwrap();
        let k = v2.div_euclid(vq2);
        Ok(u.mul(&self.lift(&self.q).pow(-k)?))
    }

    pub fn uniformize(&self, u: &QuadScalar) -> Result<TatePoint, TateError> {
        let u = self.reduce(u)?;
        let one = QuadScalar::one(self.qctx);
        if u.sub(&one).is_zero() {
            return Ok(TatePoint::Zero);
        }
        let n = self.qctx.base().precision() as i64;
        let vq = self.q.val().unwrap();
        let vu2 = u.val2().unwrap();
        let ui = u.inv()?;
        let q = self.lift(&self.q);
        let pow_term = |w: &QuadScalar, e: i64| -> Result<QuadScalar, TateError> {
            let d = one.sub(w);
            Ok(w.div(&d.pow(e)?)?)
        };
        // n = 0 term
        let mut x = pow_term(&u, 2)?;
        let mut y = u.mul(&u).div(&one.sub(&u).pow(3)?)?;
        let mut qn = q;
        let mut k = 1;
        // |q^k u^{±1}| <= p^-N beyond this point, with two guard digits
        while 2 * k * vq - vu2 < 2 * (n + 2) || 2 * k * vq + vu2 < 2 * (n + 2) {
            let a = qn.mul(&u);
            let b = qn.mul(&ui);
            x = x.add(&pow_term(&a, 2)?).add(&pow_term(&b, 2)?);
            y = y.add(&a.mul(&a).div(&one.sub(&a).pow(3)?)?).sub(&pow_term(&b, 3)?);
            qn = qn.mul(&q);
            k += 1;
        }
        let s1 = self.lift(&self.s1);
        let two = self.lift(&PadicScalar::from_int(self.qctx.base(), 2));
        Ok(TatePoint::Affine { x: x.sub(&two.mul(&s1)), y: y.add(&s1) })
    }

    pub fn neg(&self, p: &TatePoint) -> TatePoint {
        match p {
            TatePoint::Zero => TatePoint::Zero,
            TatePoint::Affine { x, y } => TatePoint::Affine { x: *x, y: y.neg().sub(x) },
        }
    }

    pub fn point_add(&self, p: &TatePoint, r: &TatePoint) -> Result<TatePoint, TateError> {
        let (x1, y1, x2, y2) = match (p, r) {
            (TatePoint::Zero, _) => return Ok(*r),
            (_, TatePoint::Zero) => return Ok(*p),
            (TatePoint::Affine { x: x1, y: y1 }, TatePoint::Affine { x: x2, y: y2 }) => (*x1, *y1, *x2, *y2),
        };
        let a4 = self.lift(&self.a4);
        let a6 = self.lift(&self.a6);
        let k = self.qctx.base();
        let c = |v: i128| self.lift(&PadicScalar::from_int(k, v));
        let (lambda, nu) = if x2.sub(&x1).is_zero() {
            if y1.add(&y2).add(&x2).is_zero() {
                return Ok(TatePoint::Zero);
            }
            let den = c(2).mul(&y1).add(&x1);
            let lam = c(3).mul(&x1).mul(&x1).add(&a4).sub(&y1).div(&den)?;
            let nu = x1.mul(&x1).mul(&x1).neg().add(&a4.mul(&x1)).add(&c(2).mul(&a6)).div(&den)?;
            (lam, nu)
        } else {
            let den = x2.sub(&x1);
            (y2.sub(&y1).div(&den)?, y1.mul(&x2).sub(&y2.mul(&x1)).div(&den)?)
        };
        let x3 = lambda.mul(&lambda).add(&lambda).sub(&x1).sub(&x2);
        let y3 = lambda.add(&c(1)).mul(&x3).neg().sub(&nu);
        Ok(TatePoint::Affine { x: x3, y: y3 })
    }

    /// Digits of agreement in Y² + XY = X³ + a4 X + a6, relative to the
    /// largest term.
    pub fn residual_digits(&self, pt: &TatePoint) -> i64 {
        let TatePoint::Affine { x, y } = pt else { return i64::MAX };
        let a4 = self.lift(&self.a4);
        let a6 = self.lift(&self.a6);
        let terms = [y.mul(y), x.mul(y), x.mul(x).mul(x), a4.mul(x), a6];
        let lhs = terms[0].add(&terms[1]);
        let rhs = terms[2].add(&terms[3]).add(&terms[4]);
        lhs.agreement(&rhs)
    }
}

impl TatePoint {
    /// Digits of agreement of two points; closeness to O is measured by
    /// -v(X)/2.
    pub fn agreement(&self, o: &Self) -> i64 {
        let near_zero = |x: &QuadScalar| x.val2().map_or(i64::MAX, |v| -v / 4);
        match (self, o) {
            (TatePoint::Zero, TatePoint::Zero) => i64::MAX,
            (TatePoint::Zero, TatePoint::Affine { x, .. }) | (TatePoint::Affine { x, .. }, TatePoint::Zero) => {
                near_zero(x)
            }
            (TatePoint::Affine { x: x1, y: y1 }, TatePoint::Affine { x: x2, y: y2 }) => {
                x1.agreement(x2).min(y1.agreement(y2))
            }
        }
    }

    /// Relative digits still carried by the coordinates.
    pub fn rel_prec(&self) -> i64 {
        match self {
            TatePoint::Zero => i64::MAX,
            TatePoint::Affine { x, y } => x.rel_prec().min(y.rel_prec()) as i64,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            TatePoint::Zero => "O".into(),
            TatePoint::Affine { x, y } => format!("({}, {})", x.to_text(), y.to_text()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaloisAction {
    /// the non-trivial automorphism of K_p/Q_p
    Conjugation,
    Identity,
}

/// A class u mod q^Z with a sign ε(τ) = ±1 for the generator τ of Gal(K_p/Q_p).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistedClass {
    pub u: QuadScalar,
    pub eps: i8,
}

/// u^{-ε(τ)} · u^τ ∈ q^Z at working precision.
pub fn twist_check(curve: &TateCurve, tc: &TwistedClass, action: Option<GaloisAction>) -> Result<bool, TateError> {
    let action = action.ok_or(TateError::MissingAction)?;
    let ut = match action {
        GaloisAction::Conjugation => tc.u.conj(),
        GaloisAction::Identity => tc.u,
    };
    let w = ut.mul(&tc.u.pow(-(tc.eps as i64))?);
    let v2 = w.val2().ok_or(TateError::ZeroArgument)?;
    let vq2 = 2 * curve.q.val().unwrap();
    if v2.rem_euclid(vq2) != 0 {
        return Ok(false);
    }
    let r = w.mul(&curve.lift(&curve.q).pow(-(v2 / vq2))?);
    Ok(r.sub(&QuadScalar::one(curve.qctx)).is_zero())
}
