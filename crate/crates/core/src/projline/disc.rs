use serde::{Deserialize, Serialize};

use crate::padic::{PadicScalar, PrimeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// {x : |x - c| <= p^-n} inside Z_p
    Std,
    /// {x : |1/x - c| <= p^-n} outside Z_p
    Inf,
}

/// A level-n disc of P¹(Q_p).  Level-n discs are the fibers of
/// P¹(Z_p) -> P¹(Z/p^n); on the `Inf` chart the level-0 disc is the whole
/// complement of Z_p and deeper centers are multiples of p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscAddress {
    pub chart: Chart,
    pub depth: u32,
    pub center: u64,
}

impl std::fmt::Display for DiscAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let chart = match self.chart {
            Chart::Std => "std",
            Chart::Inf => "inf",
        };
        write!(f, "{chart} {} {}", self.depth, self.center)
    }
}

impl DiscAddress {
    pub fn std(depth: u32, center: u64) -> Self {
        DiscAddress { chart: Chart::Std, depth, center }
    }

    pub fn inf(depth: u32, center: u64) -> Self {
        DiscAddress { chart: Chart::Inf, depth, center }
    }

    pub fn is_valid(&self, p: u64) -> bool {
        let Some(m) = p.checked_pow(self.depth) else { return false };
        self.center < m && (self.chart == Chart::Std || self.depth == 0 || self.center % p == 0)
    }

    pub fn parent(&self, p: u64) -> Option<Self> {
        match (self.chart, self.depth) {
            (_, 0) => None,
            (Chart::Inf, 1) => Some(Self::inf(0, 0)),
            (chart, n) => Some(DiscAddress { chart, depth: n - 1, center: self.center % p.pow(n - 1) }),
        }
    }

    /// Ancestor at depth `n` (which must not exceed the own depth).
    pub fn ancestor(&self, p: u64, n: u32) -> Self {
        if self.chart == Chart::Inf && n == 0 {
            return Self::inf(0, 0);
        }
        DiscAddress { chart: self.chart, depth: n, center: self.center % p.pow(n) }
    }

    pub fn children(&self, p: u64) -> Vec<Self> {
        if self.chart == Chart::Inf && self.depth == 0 {
            return vec![Self::inf(1, 0)];
        }
        let step = p.pow(self.depth);
        (0..p)
            .map(|k| DiscAddress { chart: self.chart, depth: self.depth + 1, center: self.center + k * step })
            .collect()
    }
}

/// The level-n partition of P¹(Q_p): p^n + p^max(n-1,0) discs.
pub fn cover(p: u64, n: u32) -> Vec<DiscAddress> {
    let m = p.pow(n);
    let mut out: Vec<DiscAddress> = (0..m).map(|c| DiscAddress::std(n, c)).collect();
    if n == 0 {
        out.push(DiscAddress::inf(0, 0));
    } else {
        out.extend((0..m).step_by(p as usize).map(|c| DiscAddress::inf(n, c)));
    }
    out
}

/// Teichmüller-digit sample points, stable under refinement.
#[derive(Clone, Debug)]
pub struct Sampler {
    ctx: PrimeContext,
    teich: Vec<u64>,
}

impl Sampler {
    pub fn new(ctx: PrimeContext) -> Self {
        let teich = (0..ctx.p()).map(|d| ctx.teichmuller(d)).collect();
        Sampler { ctx, teich }
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    /// The point Σ ω(e_i) p^i (i < depth) where the e_i are the Teichmüller
    /// digits of the center, as an integer mod p^N.  It lies in the disc.
    pub fn digits_point(&self, depth: u32, center: u64) -> u64 {
        let p = self.ctx.p() as i128;
        let modulus = self.ctx.modulus() as i128;
        let mut acc: i128 = 0;
        let mut r = center as i128;
        for i in 0..depth.min(self.ctx.precision()) {
            let e = r.rem_euclid(p) as usize;
            let w = self.teich[e] as i128;
            acc = (acc + w * self.ctx.pow(i) as i128) % modulus;
            r = (r - w) / p;
        }
        acc as u64
    }

    /// The sample coordinate of a disc (x on `Std`, y = 1/x on `Inf`).
    pub fn sample(&self, d: &DiscAddress) -> PadicScalar {
        PadicScalar::from_int(self.ctx, self.digits_point(d.depth, d.center) as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_counts() {
        assert_eq!(cover(5, 0).len(), 2);
        assert_eq!(cover(5, 2).len(), 30);
        assert_eq!(cover(2, 4).len(), 24);
    }

    #[test]
    fn children_partition_parent() {
        for p in [2u64, 3, 5] {
            for n in 0..3 {
                let lvl = cover(p, n);
                let next = cover(p, n + 1);
                let mut kids: Vec<DiscAddress> = lvl.iter().flat_map(|d| d.children(p)).collect();
                kids.sort();
                let mut want = next.clone();
                want.sort();
                assert_eq!(kids, want);
                for k in &next {
                    assert!(k.is_valid(p));
                    assert!(lvl.contains(&k.parent(p).unwrap()));
                }
            }
        }
    }

    #[test]
    fn sample_points_refine() {
        let ctx = PrimeContext::new(5, 8).unwrap();
        let s = Sampler::new(ctx);
        assert_eq!(s.digits_point(3, 0), 0);
        assert_eq!(s.digits_point(3, 1), 1);
        let x = s.sample(&DiscAddress::std(3, 7));
        assert_eq!(x.residue(3), Some(7));
        let child = s.sample(&DiscAddress::std(4, 7 + 3 * 125));
        assert!(child.sub(&x).val().unwrap() >= 3);
    }
}
