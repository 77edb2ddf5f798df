use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::groups::{abelian_basis, basis_coordinates, factorize, gcd, Elem, EnumGroup, FiniteAbelian};
use crate::iwasawa::{Character, Coeff, CoeffRing, GaloisModel};
use crate::lfactors::{LocalCharCase, LocalRepCase, TorusKind};
use crate::padic::{unramified_delta, PadicScalar, PrimeContext, QuadContext};
use crate::projline::{cover, BoundaryMeasure};
use crate::torus::{exact_units, IdeleClassModel};

use super::{build_measure_int, idele_group, GZInstance, GzError, InstanceParts, MinusPrime, PrimeData};

/// Shape of a random instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    /// number of primes in S, drawn from {2, 3, 5, 7} unless `primes` is set
    pub r: usize,
    pub primes: Option<Vec<u64>>,
    pub precision: u32,
    pub max_class: usize,
    pub max_depth: u32,
    pub max_tensors: usize,
    pub with_minus: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { r: 1, primes: None, precision: 12, max_class: 6, max_depth: 4, max_tensors: 2, with_minus: false }
    }
}

/// cl as an enumerated group, to find a cyclic basis.
struct ClGroup<'a>(&'a IdeleClassModel);

impl EnumGroup for ClGroup<'_> {
    fn size(&self) -> usize {
        self.0.cl_reps().len()
    }
    fn identity(&self) -> usize {
        self.0.cl_class(&self.0.a().zero())
    }
    fn op(&self, x: usize, y: usize) -> usize {
        let reps = self.0.cl_reps();
        self.0.cl_class(&self.0.a().add(&reps[x], &reps[y]))
    }
}

/// p-adic working precision: guard digits over N, doubled at p = 2 where the
/// √Δ coordinates of O_K = Z_2[(1+√5)/2] lose about a bit per product.
pub fn working_precision(p: u64, n: u32) -> u32 {
    if p == 2 {
        2 * n
    } else {
        n + 4
    }
}

fn random_prime_data<R: Rng>(rng: &mut R, p: u64, spec: &RandomSpec) -> Result<PrimeData, GzError> {
    let k = PrimeContext::new(p, working_precision(p, spec.precision))?;
    let delta = if rng.gen_bool(0.5) {
        unramified_delta(p)
    } else if p == 2 {
        *[-1i64, 2, -2].choose(rng).unwrap()
    } else {
        *[p as i64, -(p as i64)].choose(rng).unwrap()
    };
    let qctx = QuadContext::new(k, delta)?;
    let a = rng.gen_range(0..(p * p) as i128);
    let b = loop {
        let b = rng.gen_range(1..(p * p) as i128);
        if b % p as i128 != 0 {
            break b;
        }
    };
    // b a unit on the ω-coordinate keeps τ away from Q_p in O_K = Z_p[ω]
    let tau = qctx.from_ints(a, 0).add(&qctx.omega().scale(&PadicScalar::from_int(k, b)));
    let unit = 1 + p as i128 * rng.gen_range(0..p as i128);
    let tate_q = PadicScalar::from_int(k, p as i128 * unit);
    let level = 1;
    if spec.max_depth <= level {
        return Err(GzError::Invalid { invariant: "depth_covers_level", detail: format!("depth {} <= level {level}", spec.max_depth) });
    }
    let depth = rng.gen_range(level + 1..=spec.max_depth);
    PrimeData::new(qctx, tau, tate_q, level, depth)
}

fn random_measure<R: Rng>(rng: &mut R, k: PrimeContext, depth: u32) -> Result<BoundaryMeasure, GzError> {
    let discs = cover(k.p(), depth);
    let mut masses: BTreeMap<usize, i64> = BTreeMap::new();
    let n = rng.gen_range(2..=5);
    let mut total = 0;
    for _ in 0..n - 1 {
        let m = rng.gen_range(-3..=3);
        *masses.entry(rng.gen_range(0..discs.len())).or_insert(0) += m;
        total += m;
    }
    *masses.entry(rng.gen_range(0..discs.len())).or_insert(0) -= total;
    let leaves = masses.into_iter().filter(|&(_, m)| m != 0).map(|(i, m)| (discs[i], m));
    Ok(BoundaryMeasure::from_leaves(k, depth, leaves)?)
}

/// A square root in R of a unit of Z/ℓ^N, ℓ odd, by search mod ℓ and Newton.
fn ring_sqrt(ring: &CoeffRing, x: Coeff) -> Option<Coeff> {
    if ring.ell() == 2 {
        return None;
    }
    let ell = ring.ell();
    let reduce = |c: Coeff| Coeff { a: c.a % ell, b: c.b % ell };
    let target = reduce(x);
    let bs = if ring.is_extended() { ell } else { 1 };
    let mut y = (0..ell).flat_map(|a| (0..bs).map(move |b| Coeff { a, b })).find(|&y| {
        let y = Coeff { a: y.a, b: y.b };
        reduce(ring.mul(y, y)) == target && reduce(y) != Coeff { a: 0, b: 0 }
    })?;
    let half = ring.inv(ring.from_int(2))?;
    for _ in 0..ring.precision() + 1 {
        let q = ring.mul(x, ring.inv(y)?);
        y = ring.mul(half, ring.add(y, q));
    }
    (ring.mul(y, y) == x).then_some(y)
}

/// ℓ coprime to the unit index, preferring primes dividing every local rec
/// image (so the tensor of the local pieces survives mod ℓ^N), then |G|.
fn pick_coeff_prime<R: Rng>(rng: &mut R, g_order: u64, image_orders: &[u64], index: u64, first_p: u64) -> u64 {
    let all = image_orders.iter().fold(0, |acc, &n| gcd(acc, n));
    let mut cands: Vec<u64> = factorize(all).into_iter().map(|(l, _)| l).filter(|l| index % l != 0).collect();
    if cands.is_empty() {
        cands = factorize(g_order).into_iter().map(|(l, _)| l).filter(|l| index % l != 0).collect();
    }
    if cands.contains(&first_p) {
        first_p
    } else if let Some(&l) = cands.choose(rng) {
        l
    } else {
        [first_p, 2, 3, 5, 7].into_iter().find(|l| index % l != 0).unwrap_or(11)
    }
}

/// Characters of G trivial on the rec images that R (or its extension) can
/// hold.
fn admissible_characters(g: &FiniteAbelian, rec_images: &[Elem], ell: u64, n: u32) -> Vec<Vec<u64>> {
    let ring = CoeffRing::new(ell, n).unwrap();
    FiniteAbelian::new(g.orders.clone())
        .elements()
        .filter(|a| {
            let ok = |r: &CoeffRing| Character::new(r, g, a).map(|c| c.is_trivial_on(g, rec_images));
            match ok(&ring) {
                Ok(t) => t,
                Err(crate::iwasawa::IwasawaError::RootsUnavailable { order, .. }) => {
                    CoeffRing::with_roots(ell, n, order).ok().and_then(|r| ok(&r).ok()).unwrap_or(false)
                }
                Err(_) => false,
            }
        })
        .collect()
}

/// A seeded random instance: r non-split primes from {2, 3, 5, 7}, |cl| at
/// most `max_class`, exact unit data, χ trivial on the rec images and the
/// correct reciprocity maps rec_p = ρ ∘ ι_p.
pub fn random_instance<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Result<GZInstance, GzError> {
    'outer: for attempt in 0..200 {
        let ps = match &spec.primes {
            Some(ps) => ps.clone(),
            None => {
                let mut ps = vec![2u64, 3, 5, 7];
                ps.shuffle(rng);
                ps.truncate(spec.r);
                ps
            }
        };
        let mut primes = Vec::new();
        for &p in &ps {
            primes.push(random_prime_data(rng, p, spec)?);
        }
        let extra: Vec<u64> = if rng.gen_bool(0.5) { vec![rng.gen_range(2..=3)] } else { vec![] };
        let (a, locals) = idele_group(&primes, &extra);
        // P₊ generated by random elements until cl is small enough
        let mut pplus: Vec<Elem> = Vec::new();
        let model = loop {
            let m = IdeleClassModel::new(a.clone(), pplus.clone(), locals.clone())?;
            if m.cl_reps().len() <= spec.max_class {
                break m;
            }
            if pplus.len() > 6 {
                continue 'outer;
            }
            pplus.push(a.orders.iter().map(|&n| rng.gen_range(0..n)).collect());
        };
        let o_plus = FiniteAbelian::new(vec![rng.gen_range(1..=2)]);
        let units = exact_units(&model, o_plus);
        let index = units.hs_order();

        let clg = ClGroup(&model);
        let basis = abelian_basis(&clg);
        let coords = basis_coordinates(&clg, &basis);
        let g = FiniteAbelian::new(basis.orders.clone());
        let rho: Vec<Elem> = (0..a.rank()).map(|k| coords[model.cl_class(&a.generator(k))].clone()).collect();
        let h: Vec<Elem> = (0..g.rank()).map(|k| g.generator(k)).collect();
        let mut rec = Vec::new();
        let mut off = 0;
        for p in &primes {
            let n = p.tq.basis().orders.len();
            rec.push((off..off + n).map(|j| rho[j].clone()).collect::<Vec<Elem>>());
            off += n;
        }
        let rec_images: Vec<Elem> = rec.iter().flatten().cloned().collect();

        let image_orders: Vec<u64> = rec.iter().map(|imgs| g.span(imgs).len() as u64).collect();
        // for r >= 2 the product class dies unless some ℓ prime to the index
        // divides every local image; spend most of the budget looking for one
        let shared = image_orders.iter().fold(0, |acc, &n| gcd(acc, n));
        if primes.len() >= 2 && attempt < 150 && factorize(shared).iter().all(|&(l, _)| index % l == 0) {
            continue;
        }
        let ell = pick_coeff_prime(rng, g.order(), &image_orders, index, primes[0].p());
        let cn = spec.precision - 2;
        let chars = admissible_characters(&g, &g.span(&rec_images), ell, cn);
        let chi_exps = chars.choose(rng).cloned().unwrap_or_else(|| vec![0; g.rank()]);

        let mut minus = Vec::new();
        if spec.with_minus {
            let q = *[11i64, 13, 17, 19].iter().find(|&&q| q as u64 != ell).unwrap();
            let mut opts = vec![1i64, 4];
            if ell != 2 {
                opts.push(q);
            }
            let eps2 = *opts.choose(rng).unwrap();
            let l_half = (rng.gen_range(1..=3), 1);
            let rep = LocalRepCase::Generic { l_ad: (eps2 * l_half.0, 1), l_half };
            let ch = LocalCharCase { torus: TorusKind::Inert, chi_omega: (1, 0), conductor: 0, q, l_half: None };
            let ext = CoeffRing::extended(ell, cn)?;
            let base = CoeffRing::new(ell, cn)?;
            let local_value = match eps2 {
                1 => base.one(),
                4 => base.from_int(2),
                _ => match ring_sqrt(&base, base.from_int(q as i128)).or_else(|| ring_sqrt(&ext, ext.from_int(q as i128))) {
                    Some(v) => v,
                    None => continue 'outer,
                },
            };
            let local_value = if rng.gen_bool(0.5) { local_value } else { ext.neg(local_value) };
            minus.push(MinusPrime { rep, ch, local_value });
        }

        let mut measures = Vec::new();
        for _ in 0..model.cl_reps().len() {
            let nt = rng.gen_range(1..=spec.max_tensors);
            let mut class = Vec::new();
            for _ in 0..nt {
                let tensor = primes
                    .iter()
                    .map(|p| random_measure(rng, p.qctx.base(), p.depth))
                    .collect::<Result<Vec<_>, _>>()?;
                class.push(tensor);
            }
            measures.push(class);
        }

        let parts = InstanceParts {
            primes,
            extra,
            pplus,
            units,
            g_orders: g.orders.clone(),
            h,
            rho,
            rec,
            coeff_prime: ell,
            coeff_precision: cn,
            chi_exps,
            minus,
            measures,
        };
        let inst = GZInstance::new(parts)?;
        if build_measure_int(&inst).is_err() {
            continue;
        }
        return Ok(inst);
    }
    Err(GzError::Invalid { invariant: "generator_budget", detail: "no admissible instance in 200 draws".into() })
}

/// The rec mutation: add to one generator image of rec_p the first nonzero
/// g ∈ G with n·g = 0 and χ(g) = 1, keeping rec_p a homomorphism and χ
/// unramified.  The μ side still uses ρ ∘ ι_p, so the two sides disagree
/// unless the change is invisible in the graded piece.
pub fn corrupt_rec(inst: &GZInstance) -> Option<GZInstance> {
    let g = &inst.galois.g;
    let ring = inst.ring;
    for (k, r) in inst.galois.rec.iter().enumerate() {
        for j in 0..r.src.rank() {
            let n = r.src.orders[j];
            for idx in 1..g.order() as usize {
                let x = g.elem(idx);
                if !g.is_zero(&g.scale(&x, n as i64)) || inst.chi.value(idx) != ring.one() {
                    continue;
                }
                // only ℓ-primary changes can show up in the graded pieces
                if gcd(g.elem_order(&x), ring.ell()) == 1 {
                    continue;
                }
                let mut recs = inst.galois.rec.clone();
                recs[k].hom.images[j] = g.add(&recs[k].hom.images[j], &x);
                let galois = GaloisModel::new(g.clone(), inst.galois.h.clone(), recs).ok()?;
                let mut out = inst.clone();
                out.galois = galois;
                return Some(out);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sqrt_in_extension() {
        let base = CoeffRing::new(3, 8).unwrap();
        assert!(ring_sqrt(&base, base.from_int(2)).is_none());
        let ext = CoeffRing::extended(3, 8).unwrap();
        let s = ring_sqrt(&ext, ext.from_int(2)).unwrap();
        assert_eq!(ext.mul(s, s), ext.from_int(2));
        let s = ring_sqrt(&base, base.from_int(13)).unwrap();
        assert_eq!(base.mul(s, s), base.from_int(13));
    }

    #[test]
    fn generated_instances_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
            assert!(inst.model.cl_reps().len() <= 6);
            assert!(inst.ring.inv(inst.ring.from_int(inst.unit_index() as i128)).is_some());
            // rec_p = ρ ∘ ι_p
            for (k, r) in inst.galois.rec.iter().enumerate() {
                for c in 0..inst.primes[k].tq.size() {
                    let x = inst.primes[k].tq.coords(c).to_vec();
                    let via_rho = inst.rho.apply(inst.a(), &inst.galois.g, &inst.iota(k, c));
                    assert_eq!(r.hom.apply(&r.src, &inst.galois.g, &x), via_rho);
                }
            }
        }
    }
}
