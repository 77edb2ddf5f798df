use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_gz::format::{instance_to_toml, parse_instance, DEFAULT_MAX_DEPTH};
use padic_gz::gz::{random_instance, verify_thm71, verify_thm91, RandomSpec};
use padic_gz::padic::{PadicScalar, PrimeContext, QuadContext, QuadScalar};
use padic_gz::projline::{cover, mult_integral, BoundaryMeasure, MoebiusMap};
use padic_gz::tate::make_curve;
use padic_gz::torus::{check_seq13, lemma34_sides, random_model, LocalWeights};

fn tau(q: QuadContext, a: i128, b: i128) -> QuadScalar {
    let k = q.base();
    q.from_ints(a, 0).add(&q.omega().scale(&PadicScalar::from_int(k, b)))
}

fn mass_zero(k: PrimeContext, depth: u32, seed: u64) -> BoundaryMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let discs = cover(k.p(), depth);
    let mut leaves: Vec<_> = (0..4).map(|_| (*discs.choose(&mut rng).unwrap(), rng.gen_range(-3..4))).collect();
    let tot: i64 = leaves.iter().map(|l| l.1).sum();
    leaves.push((*discs.choose(&mut rng).unwrap(), -tot));
    BoundaryMeasure::from_leaves(k, depth, leaves).unwrap()
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integral_endpoint_cocycle(p in odd_prime(), seed in any::<u64>(), a in 0i128..49, b in 1i128..7, c in 0i128..49) {
        let k = PrimeContext::new(p, 12).unwrap();
        let q = QuadContext::inert(k);
        prop_assume!(b % p as i128 != 0);
        let mu = mass_zero(k, 3, seed);
        let (t1, t2, t3) = (tau(q, a, b), tau(q, c, b), tau(q, a + c + 1, 1));
        prop_assume!(!t1.sub(&t2).is_zero() && !t2.sub(&t3).is_zero() && !t1.sub(&t3).is_zero());
        let i12 = mult_integral(&mu, &t1, &t2, None).unwrap();
        let i23 = mult_integral(&mu, &t2, &t3, None).unwrap();
        let i13 = mult_integral(&mu, &t1, &t3, None).unwrap();
        let prec = i12.precision.min(i23.precision).min(i13.precision);
        prop_assert!(i12.value.mul(&i23.value).agreement(&i13.value) >= prec);
    }

    #[test]
    fn integral_equivariance(p in odd_prime(), seed in any::<u64>(), e in prop::array::uniform4(-9i64..10), a in 0i128..49) {
        let k = PrimeContext::new(p, 12).unwrap();
        let q = QuadContext::inert(k);
        let g = MoebiusMap::from_ints(k, e[0], e[1], e[2], e[3]);
        prop_assume!(g.as_ref().is_ok_and(|g| g.is_level_preserving()));
        let g = g.unwrap();
        let mu = mass_zero(k, 3, seed);
        let (t1, t2) = (tau(q, a, 1), tau(q, a + 1, 2));
        let before = mult_integral(&mu, &t1, &t2, None).unwrap();
        let after = mult_integral(&mu.act(&g).unwrap(), &g.apply(&t1).unwrap(), &g.apply(&t2).unwrap(), None).unwrap();
        prop_assert!(before.value.agreement(&after.value) >= before.precision.min(after.precision));
    }

    #[test]
    fn tate_homomorphism(p in odd_prime(), a in -20i128..20, b in -20i128..20, c in -20i128..20, d in -20i128..20) {
        prop_assume!((a, b) != (0, 0) && (c, d) != (0, 0));
        let k = PrimeContext::new(p, 20).unwrap();
        let q = QuadContext::inert(k);
        let curve = make_curve(q, PadicScalar::from_int(k, p as i128)).unwrap();
        let (u1, u2) = (q.from_ints(a, b), q.from_ints(c, d));
        let lhs = curve.uniformize(&u1.mul(&u2)).unwrap();
        let rhs = curve.point_add(&curve.uniformize(&u1).unwrap(), &curve.uniformize(&u2).unwrap()).unwrap();
        prop_assert!(lhs.agreement(&rhs) >= lhs.rel_prec().min(rhs.rel_prec()).min(18) - 2);
    }

    #[test]
    fn counting_identity_is_exact(seed in any::<u64>(), f_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, u) = random_model(&mut rng, 48);
        check_seq13(&m, &u).unwrap();
        let weights: Vec<LocalWeights> = m
            .locals()
            .iter()
            .map(|l| if l.split { LocalWeights::box_weights(l.group.orders[0]) } else { LocalWeights::NonSplit })
            .collect();
        let mut frng = ChaCha8Rng::seed_from_u64(f_seed);
        let f: Vec<i64> = (0..m.cl_reps().len()).map(|_| frng.gen_range(-9..10)).collect();
        let (lhs, rhs) = lemma34_sides(&m, &u, &weights, &f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn single_identity_survives_file_round_trip(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &RandomSpec::default()).unwrap();
        let v = verify_thm71(&inst).unwrap();
        prop_assert!(v.passed);
        let text = instance_to_toml(&inst);
        let back = parse_instance(&text, DEFAULT_MAX_DEPTH).unwrap();
        prop_assert_eq!(verify_thm71(&back).unwrap(), v);
        prop_assert_eq!(instance_to_toml(&back), text);
    }

    #[test]
    fn plectic_identity_holds(seed in any::<u64>(), with_minus in any::<bool>()) {
        let spec = RandomSpec { r: 2, max_class: 4, max_depth: 3, with_minus, ..RandomSpec::default() };
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &spec).unwrap();
        let v = verify_thm91(&inst).unwrap();
        prop_assert!(v.passed, "{:?}", v);
    }
}
