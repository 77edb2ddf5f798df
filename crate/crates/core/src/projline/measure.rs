use std::collections::BTreeMap;

use crate::padic::{PadicScalar, PrimeContext, QuadScalar};

use super::disc::{Chart, DiscAddress};
use super::ProjlineError;

/// Finitely additive Z-valued measure on the level-`maxdepth` disc algebra.
///
/// Stored sparsely: every nonzero value at every depth, derived from the leaf
/// layer.  `measure_of` is therefore a lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMeasure {
    ctx: PrimeContext,
    maxdepth: u32,
    table: BTreeMap<DiscAddress, i64>,
    total: i64,
}

impl BoundaryMeasure {
    pub fn zero(ctx: PrimeContext, maxdepth: u32) -> Self {
        BoundaryMeasure { ctx, maxdepth, table: BTreeMap::new(), total: 0 }
    }

    /// Build from masses on depth-`maxdepth` discs (repeated addresses add up).
    pub fn from_leaves(
        ctx: PrimeContext,
        maxdepth: u32,
        leaves: impl IntoIterator<Item = (DiscAddress, i64)>,
    ) -> Result<Self, ProjlineError> {
        let p = ctx.p();
        let mut table: BTreeMap<DiscAddress, i64> = BTreeMap::new();
        for (d, m) in leaves {
            if d.depth != maxdepth || !d.is_valid(p) {
                return Err(ProjlineError::BadAddress(d));
            }
            let mut cur = Some(d);
            while let Some(a) = cur {
                *table.entry(a).or_insert(0) += m;
                cur = a.parent(p);
            }
        }
        table.retain(|_, v| *v != 0);
        let total = table.get(&DiscAddress::std(0, 0)).copied().unwrap_or(0)
            + table.get(&DiscAddress::inf(0, 0)).copied().unwrap_or(0);
        Ok(BoundaryMeasure { ctx, maxdepth, table, total })
    }

    /// Build from records at arbitrary depths, checking additivity: every
    /// listed value must equal the sum of the leaves below it and every nonzero
    /// aggregate must be listed.
    pub fn from_records(
        ctx: PrimeContext,
        maxdepth: u32,
        records: &[(DiscAddress, i64)],
    ) -> Result<Self, ProjlineError> {
        let p = ctx.p();
        let mut given: BTreeMap<DiscAddress, i64> = BTreeMap::new();
        for &(d, m) in records {
            if d.depth > maxdepth || !d.is_valid(p) {
                return Err(ProjlineError::BadAddress(d));
            }
            if given.insert(d, m).is_some() {
                return Err(ProjlineError::DuplicateRecord(d));
            }
        }
        let leaves: Vec<(DiscAddress, i64)> =
            given.iter().filter(|(d, _)| d.depth == maxdepth).map(|(d, m)| (*d, *m)).collect();
        let built = Self::from_leaves(ctx, maxdepth, leaves)?;
        let mut keys: Vec<DiscAddress> = given.keys().chain(built.table.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for d in keys {
            let want = built.measure_of(&d).unwrap_or(0);
            let have = given.get(&d).copied().unwrap_or(0);
            if want != have {
                return Err(ProjlineError::Additivity { disc: d, listed: have, children: want });
            }
        }
        Ok(built)
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn maxdepth(&self) -> u32 {
        self.maxdepth
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn measure_of(&self, d: &DiscAddress) -> Result<i64, ProjlineError> {
        if d.depth > self.maxdepth {
            return Err(ProjlineError::DepthExceeded { depth: d.depth, maxdepth: self.maxdepth });
        }
        Ok(self.table.get(d).copied().unwrap_or(0))
    }

    /// Nonzero values at one depth, in address order.
    pub fn level(&self, n: u32) -> impl Iterator<Item = (DiscAddress, i64)> + '_ {
        self.table.iter().filter(move |(d, _)| d.depth == n).map(|(d, m)| (*d, *m))
    }

    pub fn leaves(&self) -> impl Iterator<Item = (DiscAddress, i64)> + '_ {
        self.level(self.maxdepth)
    }

    /// All nonzero records, shallow first.
    pub fn records(&self) -> Vec<(DiscAddress, i64)> {
        let mut v: Vec<(DiscAddress, i64)> = self.table.iter().map(|(d, m)| (*d, *m)).collect();
        v.sort_by_key(|(d, _)| (d.depth, d.chart, d.center));
        v
    }

    pub fn add(&self, o: &Self) -> Result<Self, ProjlineError> {
        if self.maxdepth != o.maxdepth || self.ctx != o.ctx {
            return Err(ProjlineError::Incompatible);
        }
        Self::from_leaves(self.ctx, self.maxdepth, self.leaves().chain(o.leaves()))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = self.clone();
        for v in out.table.values_mut() {
            *v *= k;
        }
        out.table.retain(|_, v| *v != 0);
        out.total *= k;
        out
    }

    /// Re-express on a finer layer by giving each leaf's mass to its first child.
    pub fn refine_to(&self, depth: u32) -> Result<Self, ProjlineError> {
        if depth < self.maxdepth {
            return Err(ProjlineError::DepthExceeded { depth, maxdepth: self.maxdepth });
        }
        let p = self.ctx.p();
        let leaves = self.leaves().map(|(mut d, m)| {
            while d.depth < depth {
                d = d.children(p)[0];
            }
            (d, m)
        });
        Self::from_leaves(self.ctx, depth, leaves.collect::<Vec<_>>())
    }

    /// (γμ)(γU) = μ(U) for γ in GL₂(Z_p); needs maxdepth >= 1.
    pub fn act(&self, g: &MoebiusMap) -> Result<Self, ProjlineError> {
        let d = self.maxdepth;
        if d == 0 {
            return Err(ProjlineError::Unresolvable("maxdepth 0 is not preserved by GL2(Z_p)".into()));
        }
        let r = g.residues(d)?;
        let mut leaves = Vec::new();
        for (u, m) in self.leaves() {
            leaves.push((r.image(self.ctx.p(), d, &u)?, m));
        }
        Self::from_leaves(self.ctx, d, leaves)
    }
}

/// x -> (ax + b)/(cx + d) with entries in Q_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoebiusMap {
    pub a: PadicScalar,
    pub b: PadicScalar,
    pub c: PadicScalar,
    pub d: PadicScalar,
}

struct ResidueMatrix {
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl ResidueMatrix {
    fn image(&self, p: u64, n: u32, u: &DiscAddress) -> Result<DiscAddress, ProjlineError> {
        let m = p.pow(n);
        let mm = |x: u64, y: u64| ((x as u128 * y as u128) % m as u128) as u64;
        let (x0, x1) = match u.chart {
            Chart::Std => (u.center, 1),
            Chart::Inf => (1, u.center),
        };
        let y0 = (mm(self.a, x0) + mm(self.b, x1)) % m;
        let y1 = (mm(self.c, x0) + mm(self.d, x1)) % m;
        if y1 % p != 0 {
            let inv = crate::padic::inv_mod(y1, m).expect("unit");
            Ok(DiscAddress::std(n, mm(y0, inv)))
        } else {
            let inv = crate::padic::inv_mod(y0, m).ok_or(ProjlineError::Unresolvable("degenerate image".into()))?;
            Ok(DiscAddress::inf(n, mm(y1, inv)))
        }
    }
}

impl MoebiusMap {
    pub fn new(a: PadicScalar, b: PadicScalar, c: PadicScalar, d: PadicScalar) -> Result<Self, ProjlineError> {
        let g = MoebiusMap { a, b, c, d };
        if g.det().is_zero() {
            return Err(ProjlineError::Singular);
        }
        Ok(g)
    }

    pub fn from_ints(ctx: PrimeContext, a: i64, b: i64, c: i64, d: i64) -> Result<Self, ProjlineError> {
        let s = |x: i64| PadicScalar::from_int(ctx, x as i128);
        Self::new(s(a), s(b), s(c), s(d))
    }

    pub fn det(&self) -> PadicScalar {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn compose(&self, o: &Self) -> Self {
        MoebiusMap {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn is_level_preserving(&self) -> bool {
        let integral = [self.a, self.b, self.c, self.d].iter().all(|x| x.val().map_or(true, |v| v >= 0));
        integral && self.det().val() == Some(0)
    }

    fn residues(&self, n: u32) -> Result<ResidueMatrix, ProjlineError> {
        if !self.is_level_preserving() {
            return Err(ProjlineError::Unresolvable("map is not in GL2(Z_p)".into()));
        }
        let r = |x: &PadicScalar| x.residue(n).ok_or(ProjlineError::Unresolvable("entry precision".into()));
        Ok(ResidueMatrix { a: r(&self.a)?, b: r(&self.b)?, c: r(&self.c)?, d: r(&self.d)? })
    }

    /// Image of a point of K_p (or Q_p embedded).
    pub fn apply(&self, x: &QuadScalar) -> Result<QuadScalar, ProjlineError> {
        let q = x.ctx();
        let lift = |s: &PadicScalar| QuadScalar::from_base(q, *s);
        let num = lift(&self.a).mul(x).add(&lift(&self.b));
        let den = lift(&self.c).mul(x).add(&lift(&self.d));
        Ok(num.div(&den)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projline::disc::cover;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 10).unwrap()
    }

    fn random_measure(seed: u64, depth: u32) -> BoundaryMeasure {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let discs = cover(5, depth);
        let leaves: Vec<_> = (0..6).map(|_| (discs[rng.gen_range(0..discs.len())], rng.gen_range(-4..5))).collect();
        BoundaryMeasure::from_leaves(ctx(), depth, leaves).unwrap()
    }

    #[test]
    fn parents_are_sums() {
        for seed in 0..20 {
            let mu = random_measure(seed, 3);
            for n in 0..3 {
                for d in cover(5, n) {
                    let s: i64 = d.children(5).iter().map(|c| mu.measure_of(c).unwrap()).sum();
                    assert_eq!(mu.measure_of(&d).unwrap(), s);
                }
            }
            let recs = mu.records();
            assert_eq!(BoundaryMeasure::from_records(ctx(), 3, &recs).unwrap(), mu);
        }
    }

    #[test]
    fn broken_additivity_is_reported() {
        let mu = random_measure(3, 2);
        let mut recs = mu.records();
        let last = recs.len() - 1;
        recs[last].1 += 1;
        assert!(matches!(BoundaryMeasure::from_records(ctx(), 2, &recs), Err(ProjlineError::Additivity { .. })));
    }

    #[test]
    fn translation_permutes_std_discs() {
        let mu = BoundaryMeasure::from_leaves(ctx(), 2, [(DiscAddress::std(2, 7), 3)]).unwrap();
        let t = MoebiusMap::from_ints(ctx(), 1, 1, 0, 1).unwrap();
        let img = mu.act(&t).unwrap();
        assert_eq!(img.measure_of(&DiscAddress::std(2, 8)).unwrap(), 3);
        assert_eq!(mu.act(&MoebiusMap::from_ints(ctx(), 1, 0, 0, 1).unwrap()).unwrap(), mu);
    }

    #[test]
    fn action_composes() {
        let g1 = MoebiusMap::from_ints(ctx(), 2, 1, 5, 3).unwrap();
        let g2 = MoebiusMap::from_ints(ctx(), 0, 1, 1, 7).unwrap();
        for seed in 0..10 {
            let mu = random_measure(seed, 3);
            let lhs = mu.act(&g1.compose(&g2)).unwrap();
            let rhs = mu.act(&g2).unwrap().act(&g1).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(lhs.total(), mu.total());
        }
    }
}
