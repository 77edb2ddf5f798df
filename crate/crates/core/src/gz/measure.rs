use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::groups::{gcd, Elem, FiniteAbelian};
use crate::iwasawa::Measure;
use crate::lfactors::Cyclo;
use crate::projline::pushforward_to_torus;

use super::{GZInstance, GzError};

/// μ = Σ_i Σ_k Σ_{c_p} Π_p ν_{ikp}(c_p) δ_{ρ(t_i + Σ_p ι_p(c_p))} with integer
/// multiplicities, before the S₋ scalar.
pub fn build_measure_int(inst: &GZInstance) -> Result<Vec<i64>, GzError> {
    let g = &inst.galois.g;
    let a = inst.a();
    let mut out = vec![0i64; g.order() as usize];
    for (i, class) in inst.measures.iter().enumerate() {
        let t = &inst.reps[i];
        for tensor in class {
            // per prime: (ι_p(c), ν(c))
            let mut factors: Vec<Vec<(Elem, i64)>> = Vec::new();
            for (k, mu) in tensor.iter().enumerate() {
                let p = &inst.primes[k];
                let nu: BTreeMap<usize, i64> = pushforward_to_torus(mu, &p.fixed_pair(), &p.tq)?;
                factors.push(nu.into_iter().map(|(c, m)| (inst.iota(k, c), m)).collect());
            }
            let mut partial: Vec<(Elem, i64)> = vec![(t.clone(), 1)];
            for f in &factors {
                let mut next = Vec::with_capacity(partial.len() * f.len());
                for (x, m) in &partial {
                    for (y, n) in f {
                        next.push((a.add(x, y), m * n));
                    }
                }
                partial = next;
            }
            for (x, m) in partial {
                out[inst.rho_index(&x)] += m;
            }
        }
    }
    Ok(out)
}

/// The measure with coefficients in R, including the S₋ local scalars.
pub fn build_measure(inst: &GZInstance) -> Result<Measure, GzError> {
    let ring = &inst.ring;
    let e = inst.minus.iter().fold(ring.one(), |acc, m| ring.mul(acc, m.local_value));
    Ok(build_measure_int(inst)?.into_iter().map(|m| ring.mul(e, ring.from_int(m as i128))).collect())
}

fn exponent(g: &FiniteAbelian) -> u64 {
    g.orders.iter().fold(1, |a, &n| a / gcd(a, n) * n)
}

/// t(x) with χ(x) = ζ_E^{t(x)}, E the exponent of G.
fn char_exponent(g: &FiniteAbelian, exps: &[u64], x: &[u64]) -> u64 {
    let e = exponent(g);
    x.iter().zip(exps).zip(&g.orders).fold(0, |acc, ((&c, &a), &n)| (acc + c * a % n * (e / n)) % e)
}

/// ε_χ(μ) = Σ_g μ(g) χ(g) in Q(ζ_E), exactly.
pub fn epsilon_exact(g: &FiniteAbelian, mu: &[i64], exps: &[u64]) -> Cyclo {
    let e = exponent(g);
    let mut counts = vec![0i64; e as usize];
    for (idx, &m) in mu.iter().enumerate() {
        counts[char_exponent(g, exps, &g.elem(idx)) as usize] += m;
    }
    counts.iter().enumerate().fold(Cyclo::rational(e, BigRational::from_integer(BigInt::from(0))), |acc, (j, &c)| {
        acc.add(&Cyclo::root(e, j as i64).scale(&BigRational::from_integer(BigInt::from(c))))
    })
}

/// Exponent vectors of the characters of G trivial on every rec image.
pub fn unramified_at_s_characters(inst: &GZInstance) -> Vec<Vec<u64>> {
    let g = &inst.galois.g;
    let images = inst.galois.rec_images();
    let dual = FiniteAbelian::new(g.orders.clone());
    dual.elements().filter(|a| images.iter().all(|y| char_exponent(g, a, y) == 0)).collect()
}
