use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::padic::{PadicScalar, PrimeContext};
use crate::projline::{cover, ord_component_sides, BoundaryMeasure, FixedPair};

use super::GzError;

/// Both sides of the ord-component identity at a split prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrdCheck {
    pub p: u64,
    pub ord_t: i64,
    pub lhs: i64,
    pub rhs: i64,
    pub passed: bool,
}

pub fn ord_component_check(phi: &BoundaryMeasure, fp: &FixedPair, t: &PadicScalar) -> Result<OrdCheck, GzError> {
    let (lhs, rhs) = ord_component_sides(phi, fp, t)?;
    Ok(OrdCheck {
        p: phi.ctx().p(),
        ord_t: t.val().unwrap_or(0),
        lhs,
        rhs,
        passed: lhs == rhs,
    })
}

/// A random (Φ, split fixed pair, t) with p ∈ {2, 3, 5, 7}, Φ of depth 4 and
/// |ord t| <= 3.
pub fn random_split_case<R: Rng>(rng: &mut R, precision: u32) -> Result<(BoundaryMeasure, FixedPair, PadicScalar), GzError> {
    let p = *[2u64, 3, 5, 7].choose(rng).unwrap();
    let k = PrimeContext::new(p, precision)?;
    let tau = rng.gen_range(-50i64..50);
    let taubar = loop {
        let x = rng.gen_range(-50i64..50);
        if (x - tau).rem_euclid(p as i64) != 0 {
            break x;
        }
    };
    let fp = FixedPair::split(k.scalar(tau), k.scalar(taubar))?;
    let depth = 4;
    let discs = cover(p, depth);
    let leaves: Vec<_> = (0..6).map(|_| (discs[rng.gen_range(0..discs.len())], rng.gen_range(-3..4))).collect();
    let phi = BoundaryMeasure::from_leaves(k, depth, leaves)?;
    let unit = loop {
        let u = rng.gen_range(1..p * p);
        if u % p != 0 {
            break u;
        }
    };
    let t = PadicScalar::from_parts(k, rng.gen_range(-3..=3), unit, precision)?;
    Ok((phi, fp, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_cases_balance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let (phi, fp, t) = random_split_case(&mut rng, 10).unwrap();
            assert!(ord_component_check(&phi, &fp, &t).unwrap().passed);
        }
    }
}
