use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::groups::{Elem, EnumGroup, FiniteAbelian};
use crate::padic::{PadicScalar, PrimeContext, QuadContext};
use crate::projline::{BoundaryMeasure, DiscAddress, Sampler};
use crate::tate::TatePoint;
use crate::torus::exact_units;

/// p = 5 inert, τ = √2, A = G = T(Q_5)/U_1 = Z/2 x Z/3, ρ = rec = id.
fn z6_instance(measures: Vec<ClassMeasures>) -> GZInstance {
    let k = PrimeContext::new(5, 12).unwrap();
    let q = QuadContext::new(k, 2).unwrap();
    let p = PrimeData::new(q, q.from_ints(0, 1), PadicScalar::from_int(k, 5), 1, 3).unwrap();
    assert_eq!(p.tq.basis().orders, vec![2, 3]);
    let (a, locals) = idele_group(std::slice::from_ref(&p), &[]);
    let model = crate::torus::IdeleClassModel::new(a, vec![], locals).unwrap();
    let units = exact_units(&model, FiniteAbelian::new(vec![]));
    GZInstance::new(InstanceParts {
        primes: vec![p],
        extra: vec![],
        pplus: vec![],
        units,
        g_orders: vec![2, 3],
        h: vec![],
        rho: vec![vec![1, 0], vec![0, 1]],
        rec: vec![vec![vec![1, 0], vec![0, 1]]],
        coeff_prime: 2,
        coeff_precision: 10,
        chi_exps: vec![0, 0],
        minus: vec![],
        measures,
    })
    .unwrap()
}

fn k5() -> PrimeContext {
    PrimeContext::new(5, 12).unwrap()
}

fn dipole(c1: u64, c2: u64) -> BoundaryMeasure {
    BoundaryMeasure::from_leaves(k5(), 3, [(DiscAddress::std(3, c1), 1), (DiscAddress::std(3, c2), -1)]).unwrap()
}

#[test]
fn zero_instance() {
    let inst = z6_instance(vec![vec![]; 6]);
    assert_eq!(darmon_point(&inst).unwrap(), TatePoint::Zero);
    assert!(darmon_difference(&inst).unwrap().is_zero());
    assert!(build_measure_int(&inst).unwrap().iter().all(|&m| m == 0));
    let v = verify_thm71(&inst).unwrap();
    assert!(v.passed && v.lhs.iter().all(|&x| x == 0));
}

#[test]
fn dipole_cross_ratio() {
    let mut measures = vec![vec![]; 6];
    measures[0] = vec![vec![dipole(1, 7)]];
    let inst = z6_instance(measures);
    let tau = inst.primes[0].tau;
    let s = Sampler::new(k5());
    let x = |c| crate::padic::QuadScalar::from_base(tau.ctx(), s.sample(&DiscAddress::std(3, c)));
    let (x1, x2) = (x(1), x(7));
    let tb = tau.conj();
    let cross = x1.sub(&tb).mul(&x2.sub(&tau)).div(&x1.sub(&tau).mul(&x2.sub(&tb))).unwrap();
    let j = class_integrals(&inst).unwrap()[0][0][0];
    assert!(j.value.agreement(&cross) >= 11);
    // the measure side is δ_{c(x1 - τ̄)} - δ_{c(x2 - τ̄)}
    let tq = &inst.primes[0].tq;
    let c1 = tq.label(&x1.sub(&tb)).unwrap();
    let c2 = tq.label(&x2.sub(&tb)).unwrap();
    let mu = build_measure_int(&inst).unwrap();
    let g = &inst.galois.g;
    let mut want = vec![0i64; 6];
    want[g.index(tq.coords(c1))] += 1;
    want[g.index(tq.coords(c2))] -= 1;
    assert_eq!(mu, want);
    let v = verify_thm71(&inst).unwrap();
    assert!(v.passed, "{v:?}");
}

#[test]
fn norm_one_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        for class in class_integrals(&inst).unwrap() {
            for tensor in class {
                let j = tensor[0].value;
                let one = crate::padic::QuadScalar::one(j.ctx());
                assert!(j.mul(&j.conj()).agreement(&one) >= 10, "{j}");
            }
        }
    }
}

#[test]
fn darmon_point_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        let inst = inst.with_character(&vec![0; inst.galois.g.rank()]).unwrap();
        let p = &inst.primes[0];
        let curve = crate::tate::make_curve(p.qctx, p.tate_q).unwrap();
        let pt = darmon_point(&inst).unwrap();
        assert!(curve.residual_digits(&pt) >= 9);
        // P̄ - P corresponds to Π J under the uniformization
        let mut u = crate::padic::QuadScalar::one(p.qctx);
        let mut j = crate::padic::QuadScalar::one(p.qctx);
        for (class, ints) in inst.measures.iter().zip(class_integrals(&inst).unwrap()) {
            for (tensor, jt) in class.iter().zip(ints) {
                u = u.mul(&crate::projline::period_product(&tensor[0], &p.tau).unwrap());
                j = j.mul(&jt[0].value);
            }
        }
        assert!(u.conj().div(&u).unwrap().agreement(&j) >= 9);
    }
}

#[test]
fn transversal_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut shifted_any = false;
    for _ in 0..10 {
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        let v = verify_thm71(&inst).unwrap();
        let a = inst.a().clone();
        let span: Vec<Elem> = a.span(inst.model.pplus());
        let shifts: Vec<Elem> = (0..inst.reps.len()).map(|_| span.choose(&mut rng).unwrap().clone()).collect();
        shifted_any |= shifts.iter().any(|x| !a.is_zero(x));
        let mut moved = inst.clone();
        moved.shift_transversal(&shifts).unwrap();
        let w = verify_thm71(&moved).unwrap();
        assert_eq!((v.passed, &v.lhs, &v.rhs), (w.passed, &w.lhs, &w.rhs));
        assert_eq!(darmon_difference(&inst).unwrap(), darmon_difference(&moved).unwrap());
    }
    assert!(shifted_any);
}

#[test]
fn plectic_degenerates_and_is_multilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
    assert_eq!(plectic_q(&inst).unwrap(), darmon_difference(&inst).unwrap());

    let spec = RandomSpec { r: 2, max_class: 4, max_depth: 3, ..RandomSpec::default() };
    let base = random_instance(&mut rng, &spec).unwrap();
    let pick = |rng: &mut ChaCha8Rng, k: usize| -> BoundaryMeasure {
        let all: Vec<&BoundaryMeasure> = base.measures.iter().flatten().map(|t| &t[k]).collect();
        (*all.choose(rng).unwrap()).clone()
    };
    let (m1, m2, n) = (pick(&mut rng, 0), pick(&mut rng, 0), pick(&mut rng, 1));
    let with = |tensors: ClassMeasures| {
        let mut inst = base.clone();
        inst.measures = vec![vec![]; inst.reps.len()];
        inst.measures[0] = tensors;
        inst
    };
    let qa = plectic_q(&with(vec![vec![m1.clone(), n.clone()], vec![m2.clone(), n.clone()]])).unwrap();
    let b = with(vec![vec![m1.clone(), n.clone()]]);
    let qb = plectic_q(&b).unwrap();
    let qc = plectic_q(&with(vec![vec![m2, n]])).unwrap();
    assert_eq!(qa, qb.add(&qc).unwrap());
    // a pure tensor gives (multiplicity) · d_μ ⊗ d_ν
    let ints = &class_integrals(&b).unwrap()[0][0];
    let factors: Vec<Elem> = ints
        .iter()
        .zip(&b.primes)
        .map(|(j, p)| {
            let t = crate::padic::norm_one_to_torus(&j.value).unwrap();
            p.tq.coords(p.tq.label(t.rep()).unwrap()).to_vec()
        })
        .collect();
    let ring = b.ring;
    let mut weight = ring.zero();
    let a = b.a();
    for s in b.model.cls_reps() {
        for l0 in 0..b.primes[0].tq.size() {
            for l1 in 0..b.primes[1].tq.size() {
                let x = a.add(&a.add(s, &b.iota(0, l0)), &b.iota(1, l1));
                if b.model.cl_class(&x) == 0 {
                    weight = ring.add(weight, b.chi.value(b.rho_index(&x)));
                }
            }
        }
    }
    let mut want = PlecticElement::zero(qb.group());
    want.add_pure(weight, &factors).unwrap();
    assert_eq!(qb, want);
}

#[test]
fn shape_flags_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = RandomSpec { primes: Some(vec![3, 5]), r: 2, max_class: 4, max_depth: 3, ..RandomSpec::default() };
    for _ in 0..3 {
        let inst = random_instance(&mut rng, &spec).unwrap();
        assert_eq!(inst.primes.iter().map(|p| p.p()).collect::<Vec<_>>(), vec![3, 5]);
        assert!(inst.reps.len() <= 4);
        assert!(inst.primes.iter().all(|p| p.depth <= 3));
        assert!(inst.measures.iter().flatten().flatten().all(|m| m.maxdepth() <= 3));
    }
}
