use crate::groups::{gcd, Elem, EnumGroup};
use crate::iwasawa::{Coeff, CoeffRing};
use crate::padic::{norm_one_to_torus, QuadScalar};
use crate::projline::{mult_integral, period_product, IntegralValue};
use crate::tate::{make_curve, TatePoint};

use super::{GZInstance, GzError};

/// ⊗_p T_p ⊗ R with each T_p = ⊕_j Z/n_{p,j} in its cyclic coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlecticGroup {
    pub orders: Vec<Vec<u64>>,
    pub ring: CoeffRing,
}

impl PlecticGroup {
    pub fn new(orders: Vec<Vec<u64>>, ring: CoeffRing) -> Self {
        PlecticGroup { orders, ring }
    }

    pub fn for_instance(inst: &GZInstance) -> Self {
        Self::new(inst.primes.iter().map(|p| p.tq.basis().orders.clone()).collect(), inst.ring)
    }

    pub fn len(&self) -> usize {
        self.orders.iter().map(|o| o.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Mixed-radix multi-index of a flat position.
    pub fn multi_index(&self, mut pos: usize) -> Vec<usize> {
        let mut out = vec![0; self.orders.len()];
        for k in (0..self.orders.len()).rev() {
            let r = self.orders[k].len();
            out[k] = pos % r;
            pos /= r;
        }
        out
    }

    fn position(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.orders).fold(0, |acc, (&j, o)| acc * o.len() + j)
    }

    /// gcd(ℓ^N, n_{1,j_1}, ..., n_{r,j_r}): the order of that tensor entry.
    pub fn entry_modulus(&self, idx: &[usize]) -> u64 {
        idx.iter().zip(&self.orders).fold(self.ring.modulus(), |acc, (&j, o)| gcd(acc, o[j]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlecticElement {
    group: PlecticGroup,
    coeffs: Vec<Coeff>,
}

impl PlecticElement {
    pub fn zero(group: &PlecticGroup) -> Self {
        PlecticElement { group: group.clone(), coeffs: vec![group.ring.zero(); group.len()] }
    }

    pub fn group(&self) -> &PlecticGroup {
        &self.group
    }

    fn reduce(&mut self) {
        for pos in 0..self.coeffs.len() {
            let d = self.group.entry_modulus(&self.group.multi_index(pos));
            let c = &mut self.coeffs[pos];
            c.a %= d;
            c.b %= d;
        }
    }

    /// Adds c · (x_1 ⊗ ... ⊗ x_r).
    pub fn add_pure(&mut self, c: Coeff, factors: &[Elem]) -> Result<(), GzError> {
        let g = &self.group;
        if factors.len() != g.orders.len() || factors.iter().zip(&g.orders).any(|(x, o)| x.len() != o.len()) {
            return Err(GzError::PlecticMismatch);
        }
        let ring = g.ring;
        for pos in 0..self.coeffs.len() {
            let idx = g.multi_index(pos);
            let w = idx.iter().zip(factors).fold(c, |acc, (&j, x)| ring.mul(acc, ring.from_int(x[j] as i128)));
            self.coeffs[pos] = ring.add(self.coeffs[pos], w);
        }
        self.reduce();
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, GzError> {
        if self.group != o.group {
            return Err(GzError::PlecticMismatch);
        }
        let ring = self.group.ring;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a = ring.add(*a, *b);
        }
        out.reduce();
        Ok(out)
    }

    pub fn scale(&self, c: Coeff) -> Self {
        let ring = self.group.ring;
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = ring.mul(*a, c);
        }
        out.reduce();
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(self.group.ring.neg(self.group.ring.one()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.a == 0 && c.b == 0)
    }

    /// Nonzero entries as (multi-index, coefficient).
    pub fn entries(&self) -> Vec<(Vec<usize>, Coeff)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.a != 0 || c.b != 0)
            .map(|(pos, c)| (self.group.multi_index(pos), *c))
            .collect()
    }

    pub fn get(&self, idx: &[usize]) -> Coeff {
        self.coeffs[self.group.position(idx)]
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .entries()
            .into_iter()
            .map(|(idx, c)| {
                let e: Vec<String> = idx.iter().map(|j| format!("e{j}")).collect();
                format!("{}*{}", self.group.ring.to_text(c), e.join("⊗"))
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// det(P_1 ∧ ... ∧ P_r) = Σ_σ sgn(σ) P_{σ(1),1} ⊗ ... ⊗ P_{σ(r),r}; row i holds
/// the local components of the i-th point.
pub fn plectic_determinant(group: &PlecticGroup, rows: &[Vec<Elem>]) -> Result<PlecticElement, GzError> {
    let r = group.orders.len();
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(GzError::Arity { want: r, got: rows.len() });
    }
    let ring = group.ring;
    let mut out = PlecticElement::zero(group);
    let mut perm: Vec<usize> = (0..r).collect();
    loop {
        let inversions = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let sign = if inversions % 2 == 0 { ring.one() } else { ring.neg(ring.one()) };
        let factors: Vec<Elem> = (0..r).map(|col| rows[perm[col]][col].clone()).collect();
        out.add_pure(sign, &factors)?;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// J_{ikp} = ∮ (x - τ̄)/(x - τ) dμ_{ikp}, per class, tensor and prime.
pub fn class_integrals(inst: &GZInstance) -> Result<Vec<Vec<Vec<IntegralValue>>>, GzError> {
    inst.measures
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|tensor| {
                    tensor
                        .iter()
                        .zip(&inst.primes)
                        .map(|(mu, p)| Ok(mult_integral(mu, &p.tau, &p.tau.conj(), None)?))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Σ_k ⊗_p [J_{ikp}] for every class, each J read in T(Q_p)/U_p.
fn class_tensors(inst: &GZInstance, group: &PlecticGroup) -> Result<Vec<PlecticElement>, GzError> {
    let ints = class_integrals(inst)?;
    ints.iter()
        .map(|class| {
            let mut acc = PlecticElement::zero(group);
            for tensor in class {
                let mut factors = Vec::new();
                for (j, p) in tensor.iter().zip(&inst.primes) {
                    let t = norm_one_to_torus(&j.value)?;
                    factors.push(p.tq.coords(p.tq.label(t.rep())?).to_vec());
                }
                acc.add_pure(group.ring.one(), &factors)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Q_χ = Σ_{s̄ ∈ cl^S} Σ_{l ∈ T(F_S)/U_S} χ(s̄ l) Σ_k ⊗_p [J_{cl(s̄ l),k,p}].  Every
/// class of cl occurs [O₊^S : O₊] times.
pub fn plectic_q(inst: &GZInstance) -> Result<PlecticElement, GzError> {
    let group = PlecticGroup::for_instance(inst);
    let tensors = class_tensors(inst, &group)?;
    let a = inst.a();
    let sizes: Vec<usize> = inst.primes.iter().map(|p| p.tq.size()).collect();
    let total: usize = sizes.iter().product();
    let mut out = PlecticElement::zero(&group);
    for s in inst.model.cls_reps() {
        for pos in 0..total {
            let mut x = s.clone();
            let mut rest = pos;
            for (k, &n) in sizes.iter().enumerate() {
                x = a.add(&x, &inst.iota(k, rest % n));
                rest /= n;
            }
            let i = inst.model.cl_class(&x);
            let chi = inst.chi.value(inst.rho_index(&x));
            out = out.add(&tensors[i].scale(chi))?;
        }
    }
    Ok(out)
}

/// (σ_p - 1)P_χ for a single prime, as an element of T(Q_p)/U_p ⊗ R.
pub fn darmon_difference(inst: &GZInstance) -> Result<PlecticElement, GzError> {
    if inst.r() != 1 {
        return Err(GzError::Arity { want: 1, got: inst.r() });
    }
    plectic_q(inst)
}

fn sign_of(inst: &GZInstance, i: usize) -> Result<i64, GzError> {
    let ring = &inst.ring;
    let v = inst.chi.value(inst.rho_index(&inst.reps[i]));
    if v == ring.one() {
        Ok(1)
    } else if v == ring.neg(ring.one()) {
        Ok(-1)
    } else {
        Err(GzError::NonRationalCharacter)
    }
}

/// P_χ = Σ_i χ(t_i) Φ_Tate(Π_k ∮ (x - τ) dμ_{ik}) on E(K_p), for ±1-valued χ.
pub fn darmon_point(inst: &GZInstance) -> Result<TatePoint, GzError> {
    if inst.r() != 1 {
        return Err(GzError::Arity { want: 1, got: inst.r() });
    }
    let p = &inst.primes[0];
    let mut u = QuadScalar::one(p.qctx);
    for (i, class) in inst.measures.iter().enumerate() {
        let e = sign_of(inst, i)?;
        for tensor in class {
            u = u.mul(&period_product(&tensor[0], &p.tau)?.pow(e)?);
        }
    }
    let curve = make_curve(p.qctx, p.tate_q)?;
    Ok(curve.uniformize(&u)?)
}

/// The plectic point before applying σ - 1: signed terms Σ_i χ(t_i) ⊗_p of
/// periods, for ±1-valued χ.
pub fn plectic_point(inst: &GZInstance) -> Result<Vec<(i64, Vec<QuadScalar>)>, GzError> {
    let mut out = Vec::new();
    for (i, class) in inst.measures.iter().enumerate() {
        let e = sign_of(inst, i)?;
        for tensor in class {
            let periods = tensor
                .iter()
                .zip(&inst.primes)
                .map(|(mu, p)| Ok(period_product(mu, &p.tau)?))
                .collect::<Result<Vec<_>, GzError>>()?;
            out.push((e, periods));
        }
    }
    Ok(out)
}
