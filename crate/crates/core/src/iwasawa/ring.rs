use crate::groups::factorize;
use crate::padic::{inv_mod, is_prime};

use super::IwasawaError;

/// Z/ℓ^N, or its unramified quadratic extension Z/ℓ^N[x]/(x² - s x - r).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoeffRing {
    ell: u64,
    n: u32,
    modulus: u64,
    ext: Option<(u64, u64)>,
}

/// An element a + b x; b = 0 in the unextended ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff {
    pub a: u64,
    pub b: u64,
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl CoeffRing {
    pub fn new(ell: u64, n: u32) -> Result<Self, IwasawaError> {
        if !is_prime(ell) {
            return Err(IwasawaError::NotPrime(ell));
        }
        let modulus = ell
            .checked_pow(n)
            .filter(|&m| n >= 1 && m < 1 << 62)
            .ok_or(IwasawaError::PrecisionOutOfRange { ell, n })?;
        Ok(CoeffRing { ell, n, modulus, ext: None })
    }

    /// The quadratic unramified extension.
    pub fn extended(ell: u64, n: u32) -> Result<Self, IwasawaError> {
        let mut r = Self::new(ell, n)?;
        let m = r.modulus;
        r.ext = Some(if ell == 2 {
            // x² + x + 1
            (m - 1, m - 1)
        } else {
            let u0 = (2..ell).find(|&u| crate::padic::pow_mod(u, (ell - 1) / 2, ell) == ell - 1).unwrap();
            (0, u0)
        });
        Ok(r)
    }

    /// The smallest ring over Z/ℓ^N holding the k-th roots of unity.
    pub fn with_roots(ell: u64, n: u32, k: u64) -> Result<Self, IwasawaError> {
        let base = Self::new(ell, n)?;
        if base.root_of_unity(k).is_some() {
            return Ok(base);
        }
        let ext = Self::extended(ell, n)?;
        if ext.root_of_unity(k).is_some() {
            return Ok(ext);
        }
        Err(IwasawaError::RootsUnavailable { ell, order: k })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        if self.ext.is_some() { 2 } else { 1 }
    }

    pub fn is_extended(&self) -> bool {
        self.ext.is_some()
    }

    pub fn zero(&self) -> Coeff {
        Coeff { a: 0, b: 0 }
    }

    pub fn one(&self) -> Coeff {
        Coeff { a: 1 % self.modulus, b: 0 }
    }

    pub fn from_int(&self, x: i128) -> Coeff {
        Coeff { a: x.rem_euclid(self.modulus as i128) as u64, b: 0 }
    }

    pub fn add(&self, x: Coeff, y: Coeff) -> Coeff {
        let m = self.modulus;
        Coeff { a: (x.a + y.a) % m, b: (x.b + y.b) % m }
    }

    pub fn neg(&self, x: Coeff) -> Coeff {
        let m = self.modulus;
        Coeff { a: (m - x.a) % m, b: (m - x.b) % m }
    }

    pub fn sub(&self, x: Coeff, y: Coeff) -> Coeff {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Coeff, y: Coeff) -> Coeff {
        let m = self.modulus;
        match self.ext {
            None => Coeff { a: mulm(x.a, y.a, m), b: 0 },
            Some((s, r)) => {
                // (a + b x)(c + d x) = ac + bd r + (ad + bc + bd s) x
                let bd = mulm(x.b, y.b, m);
                let a = (mulm(x.a, y.a, m) + mulm(bd, r, m)) % m;
                let b = (mulm(x.a, y.b, m) + mulm(x.b, y.a, m) + mulm(bd, s, m)) % m;
                Coeff { a, b }
            }
        }
    }

    pub fn pow(&self, x: Coeff, mut e: u64) -> Coeff {
        let mut acc = self.one();
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn norm(&self, x: Coeff) -> u64 {
        match self.ext {
            None => x.a,
            Some((s, r)) => {
                // N(a + b x) = a² + s a b - r b²
                let m = self.modulus;
                let t = (mulm(x.a, x.a, m) + mulm(mulm(s, x.a, m), x.b, m)) % m;
                (t + m - mulm(r, mulm(x.b, x.b, m), m)) % m
            }
        }
    }

    pub fn is_unit(&self, x: Coeff) -> bool {
        self.norm(x) % self.ell != 0
    }

    pub fn inv(&self, x: Coeff) -> Option<Coeff> {
        let ni = inv_mod(self.norm(x), self.modulus)?;
        let conj = match self.ext {
            None => return Some(Coeff { a: ni, b: 0 }),
            // conjugate of a + b x is (a + b s) - b x
            Some((s, _)) => Coeff { a: (x.a + mulm(x.b, s, self.modulus)) % self.modulus, b: (self.modulus - x.b) % self.modulus },
        };
        Some(self.mul(conj, Coeff { a: ni, b: 0 }))
    }

    pub fn is_zero(&self, x: Coeff) -> bool {
        x.a == 0 && x.b == 0
    }

    /// A primitive k-th root of unity, if the ring has one.
    pub fn root_of_unity(&self, k: u64) -> Option<Coeff> {
        if k == 0 {
            return None;
        }
        if k == 1 {
            return Some(self.one());
        }
        let q = if self.ext.is_some() { self.ell * self.ell } else { self.ell };
        let unit_order = q - 1;
        if self.ell == 2 {
            // μ = {±1} × μ_{q-1}
            if k % 2 == 0 {
                let odd = self.root_of_unity(k / 2).filter(|_| k % 4 != 0)?;
                let minus = self.neg(self.one());
                return Some(if (k / 2) % 2 == 1 { self.mul(minus, odd) } else { odd });
            }
        }
        if unit_order % k != 0 {
            return None;
        }
        let gen = self.teichmuller_generator(q)?;
        Some(self.pow(gen, unit_order / k))
    }

    fn teichmuller_generator(&self, q: u64) -> Option<Coeff> {
        let unit_order = q - 1;
        if unit_order == 1 {
            return Some(self.one());
        }
        let primes: Vec<u64> = factorize(unit_order).into_iter().map(|(l, _)| l).collect();
        let reduces_to_one = |z: Coeff| z.a % self.ell == 1 % self.ell && z.b % self.ell == 0;
        let cands: Vec<Coeff> = if self.ext.is_some() {
            (0..self.ell).flat_map(|a| (1..self.ell).map(move |b| Coeff { a, b })).collect()
        } else {
            (1..self.ell).map(|a| Coeff { a, b: 0 }).collect()
        };
        let g = cands.into_iter().find(|&z| primes.iter().all(|&l| !reduces_to_one(self.pow(z, unit_order / l))))?;
        // Teichmüller lift: g^{q^{N-1}}
        let mut t = g;
        for _ in 1..self.n {
            t = self.pow(t, q);
        }
        Some(t)
    }

    /// Coordinates over Z/ℓ^N.
    pub fn flatten_into(&self, x: Coeff, out: &mut Vec<u64>) {
        out.push(x.a);
        if self.ext.is_some() {
            out.push(x.b);
        }
    }

    pub fn to_text(&self, x: Coeff) -> String {
        match self.ext {
            None => x.a.to_string(),
            Some(_) => format!("{}+{}x", x.a, x.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_have_exact_order() {
        for (ell, k) in [(5u64, 4u64), (7, 3), (7, 6), (3, 8), (5, 3), (2, 3), (2, 6), (2, 2), (11, 5)] {
            let r = CoeffRing::with_roots(ell, 6, k).unwrap();
            let z = r.root_of_unity(k).unwrap();
            assert_eq!(r.pow(z, k), r.one(), "ell={ell} k={k}");
            for d in 1..k {
                if k % d == 0 {
                    assert_ne!(r.pow(z, d), r.one());
                }
            }
        }
    }

    #[test]
    fn ramified_roots_rejected() {
        assert!(matches!(CoeffRing::with_roots(3, 4, 9), Err(IwasawaError::RootsUnavailable { .. })));
        assert!(CoeffRing::with_roots(2, 4, 4).is_err());
    }

    #[test]
    fn inverse_in_extension() {
        let r = CoeffRing::extended(5, 4).unwrap();
        let x = Coeff { a: 3, b: 7 };
        assert_eq!(r.mul(x, r.inv(x).unwrap()), r.one());
        assert!(r.inv(Coeff { a: 5, b: 10 }).is_none());
    }
}
