//! Local L-factors and ε²-factors at Steinberg primes, with exceptional-zero
//! detection.  Values live in Q(ζ_k) with exact rational coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LFactorError {
    #[error("s = {0} is not in 1/2 + Z")]
    NotHalfOdd(String),
    #[error("ramified character: supply L(1/2) and use the conductor formula")]
    RamifiedCharacter,
    #[error("missing local data: {0}")]
    MissingData(&'static str),
    #[error("residue cardinality must be at least 2")]
    BadResidueField,
    #[error("root of unity of order 0")]
    BadRoot,
    #[error("L(1/2) vanishes, ε² undefined")]
    ZeroLValue,
}

fn q_rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn cyclotomic(k: u64) -> Vec<BigInt> {
    // x^k - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![BigInt::zero(); k as usize + 1];
    num[0] = BigInt::from(-1);
    num[k as usize] = BigInt::one();
    for d in 1..k {
        if k % d == 0 {
            num = poly_div_exact(&num, &cyclotomic(d));
        }
    }
    num
}

fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut out = vec![BigInt::zero(); a.len() - db];
    for i in (0..out.len()).rev() {
        let c = &rem[i + db] / &b[db];
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        out[i] = c;
    }
    out
}

/// An element of Q(ζ_k) in the power basis 1, ζ, ..., ζ^{φ(k)-1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    k: u64,
    c: Vec<BigRational>,
}

impl Cyclo {
    fn degree(k: u64) -> usize {
        cyclotomic(k).len() - 1
    }

    pub fn rational(k: u64, x: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); Self::degree(k)];
        c[0] = x;
        Cyclo { k, c }
    }

    /// ζ_k^j.
    pub fn root(k: u64, j: i64) -> Self {
        let mut c = vec![BigRational::zero(); k as usize];
        c[j.rem_euclid(k as i64) as usize] = BigRational::one();
        Self::reduce(k, c)
    }

    fn reduce(k: u64, mut c: Vec<BigRational>) -> Self {
        let phi = cyclotomic(k);
        let d = phi.len() - 1;
        // Φ is monic
        for i in (d..c.len()).rev() {
            let lead = c[i].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate() {
                c[i - d + j] -= &lead * BigRational::from_integer(pj.clone());
            }
        }
        c.resize(d, BigRational::zero());
        Cyclo { k, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.c[1..].iter().all(|x| x.is_zero()).then(|| self.c[0].clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Cyclo { k: self.k, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cyclo { k: self.k, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len()];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::reduce(self.k, c)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Cyclo { k: self.k, c: self.c.iter().map(|a| a * s).collect() }
    }

    /// ζ ↦ ζ^j.
    fn galois(&self, j: u64) -> Self {
        let mut out = Cyclo::rational(self.k, BigRational::zero());
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                out = out.add(&Cyclo::root(self.k, (i as u64 * j) as i64).scale(a));
            }
        }
        out
    }

    /// Inverse through the product of the non-trivial conjugates.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut others = Cyclo::rational(self.k, BigRational::one());
        for j in 2..=self.k.max(2) {
            if j < self.k && j.gcd(&self.k) == 1 {
                others = others.mul(&self.galois(j));
            }
        }
        let norm = self.mul(&others).as_rational().expect("norms are rational");
        Some(others.scale(&norm.recip()))
    }

    pub fn to_text(&self) -> String {
        if let Some(r) = self.as_rational() {
            return r.to_string();
        }
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let coef = if a.is_integer() { a.to_integer().to_string() } else { format!("({a})") };
            parts.push(match i {
                0 => coef,
                _ => format!("{coef}*z{}^{i}", self.k),
            });
        }
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalRepCase {
    SteinbergPlus,
    SteinbergMinus,
    /// Supplied values of L(1, π_p, ad) and L(1/2, π_p, χ_p).
    Generic { l_ad: (i64, i64), l_half: (i64, i64) },
}

impl LocalRepCase {
    fn sign(&self) -> Option<i64> {
        match self {
            LocalRepCase::SteinbergPlus => Some(1),
            LocalRepCase::SteinbergMinus => Some(-1),
            LocalRepCase::Generic { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCharCase {
    pub torus: TorusKind,
    /// χ_p(ω_p) = ζ_order^exp
    pub chi_omega: (u64, i64),
    pub conductor: u32,
    pub q: i64,
    /// L(1/2, π_p, χ_p), needed only for ramified χ at a Steinberg prime
    pub l_half: Option<(i64, i64)>,
}

fn ratio(x: (i64, i64)) -> BigRational {
    BigRational::new(BigInt::from(x.0), BigInt::from(x.1))
}

/// s as twice its value; must be odd.
pub fn parse_half(s: &str) -> Result<i64, LFactorError> {
    let bad = || LFactorError::NotHalfOdd(s.to_string());
    let t = s.trim();
    let twice = match t.split_once('/') {
        Some((n, "2")) => n.trim().parse::<i64>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => 2 * t.parse::<i64>().map_err(|_| bad())?,
    };
    if twice.rem_euclid(2) != 1 {
        return Err(bad());
    }
    Ok(twice)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LValue {
    Value(Cyclo),
    Pole,
}

impl LValue {
    pub fn to_text(&self) -> String {
        match self {
            LValue::Value(v) => v.to_text(),
            LValue::Pole => "pole".into(),
        }
    }
}

/// L(s, π_p, χ_p)⁻¹ for Steinberg π_p and unramified χ_p; `s2` is 2s.
pub fn local_l_inverse(rep: &LocalRepCase, ch: &LocalCharCase, s2: i64) -> Result<Cyclo, LFactorError> {
    if ch.q < 2 {
        return Err(LFactorError::BadResidueField);
    }
    if s2.rem_euclid(2) != 1 {
        return Err(LFactorError::NotHalfOdd(format!("{s2}/2")));
    }
    let sign = rep.sign().ok_or(LFactorError::MissingData("closed forms cover Steinberg only"))?;
    if ch.conductor > 0 {
        return Err(LFactorError::RamifiedCharacter);
    }
    let (k, j) = ch.chi_omega;
    if k == 0 {
        return Err(LFactorError::BadRoot);
    }
    // x = q^{-s-1/2}
    let e = -(s2 + 1) / 2;
    let x = if e >= 0 { q_rat(ch.q.pow(e as u32)) } else { q_rat(ch.q.pow((-e) as u32)).recip() };
    let one = Cyclo::rational(k, BigRational::one());
    let c = Cyclo::root(k, j);
    let sx = x.clone() * q_rat(sign);
    Ok(match ch.torus {
        TorusKind::Split => {
            let ci = Cyclo::root(k, -j);
            one.sub(&c.scale(&sx)).mul(&one.sub(&ci.scale(&sx)))
        }
        TorusKind::Inert => one.sub(&Cyclo::rational(k, &x * &x)),
        TorusKind::Ramified => one.sub(&c.scale(&sx)),
    })
}

pub fn local_l(rep: &LocalRepCase, ch: &LocalCharCase, s2: i64) -> Result<LValue, LFactorError> {
    let li = local_l_inverse(rep, ch, s2)?;
    Ok(match li.inv() {
        Some(v) => LValue::Value(v),
        None => LValue::Pole,
    })
}

/// ε_p(π_p, χ_p)².
pub fn epsilon_sq(rep: &LocalRepCase, ch: &LocalCharCase) -> Result<Cyclo, LFactorError> {
    let k = ch.chi_omega.0.max(1);
    match rep {
        LocalRepCase::Generic { l_ad, l_half } => {
            let lh = ratio(*l_half);
            if lh.is_zero() {
                return Err(LFactorError::ZeroLValue);
            }
            Ok(Cyclo::rational(k, ratio(*l_ad) / lh))
        }
        _ if ch.conductor == 0 => local_l_inverse(rep, ch, -1),
        _ => {
            let lh = ratio(ch.l_half.ok_or(LFactorError::MissingData("L(1/2) for a ramified character"))?);
            if lh.is_zero() {
                return Err(LFactorError::ZeroLValue);
            }
            Ok(Cyclo::rational(k, q_rat(ch.q).pow(ch.conductor as i32) / lh))
        }
    }
}

/// Whether the local Euler factor forces a zero.
pub fn exceptional_zero(rep: &LocalRepCase, ch: &LocalCharCase) -> bool {
    let Some(sign) = rep.sign() else { return false };
    if ch.conductor > 0 {
        return false;
    }
    let c = Cyclo::root(ch.chi_omega.0.max(1), ch.chi_omega.1);
    match ch.torus {
        TorusKind::Inert => true,
        TorusKind::Split | TorusKind::Ramified => c.as_rational() == Some(q_rat(sign)),
    }
}

/// q⁻¹(1 + q⁻¹)/(1 - q⁻¹)³.
pub fn alpha_ordinary_unit(q: i64) -> Result<BigRational, LFactorError> {
    if q < 2 {
        return Err(LFactorError::BadResidueField);
    }
    let qi = q_rat(q).recip();
    let one = BigRational::one();
    Ok(&qi * (&one + &qi) / (&one - &qi).pow(3))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRow {
    pub rep: String,
    pub torus: TorusKind,
    pub chi_omega: String,
    pub s: String,
    pub l: String,
    pub eps_sq: String,
    pub exceptional_zero: bool,
}

/// Every Steinberg sign × torus × χ(ω) ∈ {1, -1} at s = ±1/2.
pub fn case_table(q: i64) -> Result<Vec<CaseRow>, LFactorError> {
    let mut rows = Vec::new();
    for (name, rep) in [("St+", LocalRepCase::SteinbergPlus), ("St-", LocalRepCase::SteinbergMinus)] {
        for torus in [TorusKind::Split, TorusKind::Inert, TorusKind::Ramified] {
            for (cname, chi_omega) in [("1", (1u64, 0i64)), ("-1", (2, 1))] {
                let ch = LocalCharCase { torus, chi_omega, conductor: 0, q, l_half: None };
                let eps = epsilon_sq(&rep, &ch)?;
                for (sname, s2) in [("-1/2", -1), ("1/2", 1)] {
                    rows.push(CaseRow {
                        rep: name.into(),
                        torus,
                        chi_omega: cname.into(),
                        s: sname.into(),
                        l: local_l(&rep, &ch, s2)?.to_text(),
                        eps_sq: eps.to_text(),
                        exceptional_zero: exceptional_zero(&rep, &ch),
                    });
                }
            }
        }
    }
    Ok(rows)
}
