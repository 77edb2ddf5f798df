use crate::groups::{gcd, Elem, FiniteAbelian};

use super::howell::Howell;
use super::ring::{Coeff, CoeffRing};
use super::IwasawaError;

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A character χ of G = ⊕ Z/n_j with χ(e_j) = ζ_{n_j}^{a_j}, valued in the
/// coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    exps: Vec<u64>,
    order: u64,
    values: Vec<Coeff>,
}

impl Character {
    pub fn new(ring: &CoeffRing, g: &FiniteAbelian, exps: &[u64]) -> Result<Self, IwasawaError> {
        if exps.len() != g.rank() {
            return Err(IwasawaError::BadCharacter("exponent count differs from the group rank".into()));
        }
        let exps: Vec<u64> = exps.iter().zip(&g.orders).map(|(&a, &n)| a % n).collect();
        let e = g.orders.iter().fold(1, |a, &n| lcm(a, n));
        // χ(x) = ζ_E^{t(x)}, t(x) = Σ x_j a_j E/n_j
        let t: Vec<u64> = exps.iter().zip(&g.orders).map(|(&a, &n)| a * (e / n) % e).collect();
        let step = t.iter().fold(e, |acc, &x| gcd(acc, x));
        let order = e / step;
        let zeta = ring.root_of_unity(order).ok_or(IwasawaError::RootsUnavailable { ell: ring.ell(), order })?;
        let values = g
            .elements()
            .map(|x| {
                let tx = x.iter().zip(&t).fold(0u64, |acc, (&c, &tj)| (acc + c * tj) % e);
                ring.pow(zeta, tx / step)
            })
            .collect();
        Ok(Character { exps, order, values })
    }

    pub fn trivial(ring: &CoeffRing, g: &FiniteAbelian) -> Self {
        Character::new(ring, g, &vec![0; g.rank()]).expect("trivial character")
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn value(&self, idx: usize) -> Coeff {
        self.values[idx]
    }

    pub fn is_trivial_on(&self, g: &FiniteAbelian, elems: &[Elem]) -> bool {
        elems.iter().all(|x| self.values[g.index(x)] == self.values[0])
    }
}

/// Coefficient-valued functions on G: measures and test functions alike.
pub type Measure = Vec<Coeff>;

/// The group algebra R[G] with convolution.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    ring: CoeffRing,
    g: FiniteAbelian,
    table: Vec<usize>,
    inv: Vec<usize>,
}

impl GroupAlgebra {
    pub fn new(ring: CoeffRing, g: FiniteAbelian) -> Self {
        let elems: Vec<Elem> = g.elements().collect();
        let n = elems.len();
        let mut table = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = g.index(&g.add(&elems[i], &elems[j]));
            }
        }
        let inv = elems.iter().map(|x| g.index(&g.neg(x))).collect();
        GroupAlgebra { ring, g, table, inv }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn group(&self) -> &FiniteAbelian {
        &self.g
    }

    pub fn size(&self) -> usize {
        self.inv.len()
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn zero(&self) -> Measure {
        vec![self.ring.zero(); self.size()]
    }

    pub fn delta(&self, idx: usize) -> Measure {
        let mut m = self.zero();
        m[idx] = self.ring.one();
        m
    }

    pub fn add(&self, x: &Measure, y: &Measure) -> Measure {
        x.iter().zip(y).map(|(&a, &b)| self.ring.add(a, b)).collect()
    }

    pub fn sub(&self, x: &Measure, y: &Measure) -> Measure {
        x.iter().zip(y).map(|(&a, &b)| self.ring.sub(a, b)).collect()
    }

    pub fn scale(&self, x: &Measure, c: Coeff) -> Measure {
        x.iter().map(|&a| self.ring.mul(a, c)).collect()
    }

    pub fn convolve(&self, x: &Measure, y: &Measure) -> Result<Measure, IwasawaError> {
        if x.len() != self.size() || y.len() != self.size() {
            return Err(IwasawaError::ModelMismatch);
        }
        let mut out = self.zero();
        for (i, &a) in x.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                let k = self.op(i, j);
                out[k] = self.ring.add(out[k], self.ring.mul(a, b));
            }
        }
        Ok(out)
    }

    /// ∫ χ dμ.
    pub fn epsilon(&self, mu: &Measure, chi: &Character) -> Coeff {
        mu.iter().enumerate().fold(self.ring.zero(), |acc, (g, &m)| self.ring.add(acc, self.ring.mul(chi.value(g), m)))
    }

    /// ∫ f dμ.
    pub fn pair(&self, f: &[Coeff], mu: &Measure) -> Coeff {
        f.iter().zip(mu).fold(self.ring.zero(), |acc, (&a, &b)| self.ring.add(acc, self.ring.mul(a, b)))
    }

    /// χ(g)⁻¹δ_g - δ₁.
    pub fn aug_gen(&self, chi: &Character, g: usize) -> Measure {
        let mut m = self.zero();
        let ci = self.ring.inv(chi.value(g)).expect("character values are units");
        m[g] = ci;
        m[0] = self.ring.sub(m[0], self.ring.one());
        m
    }

    pub fn flatten(&self, mu: &Measure) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.size() * self.ring.degree());
        for &c in mu {
            self.ring.flatten_into(c, &mut out);
        }
        out
    }

    /// Module generators over Z/ℓ^N of the R-span of the given measures.
    fn rows_of(&self, ms: &[Measure]) -> Vec<Vec<u64>> {
        let mut rows = Vec::new();
        let x = Coeff { a: 0, b: 1 };
        for m in ms {
            rows.push(self.flatten(m));
            if self.ring.is_extended() {
                rows.push(self.flatten(&self.scale(m, x)));
            }
        }
        rows
    }

    fn howell(&self, rows: Vec<Vec<u64>>) -> Howell {
        Howell::new(self.ring.ell(), self.ring.precision(), self.size() * self.ring.degree(), rows)
    }

    /// The R-submodule spanned by the given measures.
    pub fn span(&self, ms: &[Measure]) -> Howell {
        self.howell(self.rows_of(ms))
    }

    /// δ₁ - |H|⁻¹ Σ_{h∈H} χ(h)⁻¹ δ_h: kills the χ|_H-isotypic functions along
    /// H and is evaluation at 1 on the complementary isotypic parts.
    pub fn delta_chi(&self, h: &[Elem], chi: &Character) -> Result<Measure, IwasawaError> {
        let members = self.g.span(h);
        let hn = self.ring.from_int(members.len() as i128);
        let hinv = self.ring.inv(hn).ok_or(IwasawaError::NotInvertible(members.len() as u64))?;
        let mut m = self.delta(0);
        for x in &members {
            let idx = self.g.index(x);
            let c = self.ring.mul(hinv, self.ring.inv(chi.value(idx)).expect("unit"));
            m[idx] = self.ring.sub(m[idx], c);
        }
        Ok(m)
    }

    /// f(x h) = χ(h) f(x) for all x ∈ G, h ∈ H.
    pub fn in_c_chi(&self, f: &[Coeff], h: &[Elem], chi: &Character) -> bool {
        h.iter().all(|hg| {
            let hi = self.g.index(hg);
            (0..self.size()).all(|x| f[self.op(x, hi)] == self.ring.mul(chi.value(hi), f[x]))
        })
    }
}

/// The filtration R[G] ⊇ I_χ ⊇ I_χ² ⊇ ..., computed up to a fixed power.
#[derive(Clone, Debug)]
pub struct Filtration {
    chi: Character,
    powers: Vec<Howell>,
}

impl Filtration {
    /// I_χ^0 .. I_χ^max_r.
    pub fn new(alg: &GroupAlgebra, chi: &Character, max_r: usize) -> Self {
        let n = alg.size();
        let mut powers = vec![alg.span(&(0..n).map(|g| alg.delta(g)).collect::<Vec<_>>())];
        let first: Vec<Measure> = (1..n).map(|g| alg.aug_gen(chi, g)).collect();
        powers.push(alg.span(&first));
        let gens: Vec<Measure> =
            (0..alg.group().rank()).map(|k| alg.aug_gen(chi, alg.group().index(&alg.group().generator(k)))).collect();
        while powers.len() <= max_r {
            let prev = powers.last().unwrap();
            let mut rows = Vec::new();
            for row in prev.rows() {
                let m = unflatten(alg, row);
                for e in &gens {
                    rows.push(alg.flatten(&alg.convolve(&m, e).unwrap()));
                }
            }
            powers.push(alg.howell(rows));
        }
        Filtration { chi: chi.clone(), powers }
    }

    pub fn character(&self) -> &Character {
        &self.chi
    }

    pub fn max_power(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, r: usize) -> &Howell {
        &self.powers[r]
    }

    pub fn contains(&self, alg: &GroupAlgebra, mu: &Measure, r: usize) -> bool {
        self.powers[r].contains(&alg.flatten(mu))
    }

    /// Canonical coordinates of μ in I^r/I^{r+1}: its normal form modulo
    /// I^{r+1}, after checking μ ∈ I^r.
    pub fn graded_class(&self, alg: &GroupAlgebra, mu: &Measure, r: usize) -> Result<Vec<u64>, IwasawaError> {
        if r + 1 > self.max_power() {
            return Err(IwasawaError::PowerNotComputed(r + 1));
        }
        let v = alg.flatten(mu);
        let residual = self.powers[r].reduce(&v);
        if residual.iter().any(|&x| x != 0) {
            return Err(IwasawaError::NotInPower { r, residual });
        }
        Ok(self.powers[r + 1].reduce(&v))
    }

    /// φ(σ): the class of χ(σ)⁻¹δ_σ - δ₁ in I/I².
    pub fn phi(&self, alg: &GroupAlgebra, sigma: usize) -> Result<Vec<u64>, IwasawaError> {
        self.graded_class(alg, &alg.aug_gen(&self.chi, sigma), 1)
    }

    /// Elementary divisors of I^r/I^{r+1} over Z/ℓ^N.
    pub fn graded_divisors(&self, r: usize) -> Vec<u64> {
        self.powers[r].quotient_divisors(&self.powers[r + 1])
    }
}

pub fn unflatten(alg: &GroupAlgebra, v: &[u64]) -> Measure {
    if alg.ring().is_extended() {
        v.chunks(2).map(|c| Coeff { a: c[0], b: c[1] }).collect()
    } else {
        v.iter().map(|&a| Coeff { a, b: 0 }).collect()
    }
}
