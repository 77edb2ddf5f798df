//! Finite idele-class bookkeeping in homology degree zero: cl(T)₊, cl(T)₊^S,
//! the kernel W, the unit exact sequence and the S-counting identity.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::groups::{subgroup_basis, Cosets, Elem, FiniteAbelian, Hom};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TorusError {
    #[error("generator {0} lies outside its group")]
    BadGenerator(String),
    #[error("map {0} is not a homomorphism")]
    BadHom(&'static str),
    #[error("exact sequence fails at {0}")]
    Exactness(Seq13Stage),
    #[error("counting identity fails: {lhs} != {rhs}")]
    Counting { lhs: i64, rhs: i64 },
    #[error("split weights for local factor {0} do not sum to 1 over translates")]
    BadWeights(usize),
    #[error("weights given for {got} local factors, model has {want}")]
    WeightCount { got: usize, want: usize },
    #[error("test function has {got} values, cl has {want} classes")]
    TestFunctionSize { got: usize, want: usize },
    #[error("homology degree {0} unsupported (only degree 0)")]
    UnsupportedDegree(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seq13Stage {
    /// O₊ -> O₊^S injective
    UnitInclusion,
    /// image O₊ = kernel of O₊^S -> T(F_S)/T(o_S)
    SUnits,
    /// image of S-units = kernel of the local group -> cl
    LocalGroup,
    /// image of the local group = kernel of cl -> cl^S
    ClassGroup,
}

impl std::fmt::Display for Seq13Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Seq13Stage::UnitInclusion => "O+ -> O+^S",
            Seq13Stage::SUnits => "O+^S",
            Seq13Stage::LocalGroup => "T(F_S)/T(o_S)",
            Seq13Stage::ClassGroup => "cl",
        };
        f.write_str(s)
    }
}

/// T(F_p)/T(o_p) for one p ∈ S, with its map into A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub group: FiniteAbelian,
    pub to_a: Hom,
    pub split: bool,
}

#[derive(Clone, Debug)]
pub struct IdeleClassModel {
    a: FiniteAbelian,
    pplus: Vec<Elem>,
    locals: Vec<LocalFactor>,
    loc: FiniteAbelian,
    cl: Cosets,
    cls: Cosets,
}

impl IdeleClassModel {
    pub fn new(a: FiniteAbelian, pplus: Vec<Elem>, locals: Vec<LocalFactor>) -> Result<Self, TorusError> {
        for x in &pplus {
            if x.len() != a.rank() || !a.contains(x) {
                return Err(TorusError::BadGenerator(format!("{x:?}")));
            }
        }
        for l in &locals {
            if !l.to_a.is_well_defined(&l.group, &a) {
                return Err(TorusError::BadHom("local -> A"));
            }
        }
        let loc = FiniteAbelian::new(locals.iter().flat_map(|l| l.group.orders.iter().copied()).collect());
        let cl = a.cosets(&pplus);
        let mut big = pplus.clone();
        for l in &locals {
            big.extend(l.to_a.images.iter().cloned());
        }
        let cls = a.cosets(&big);
        Ok(IdeleClassModel { a, pplus, locals, loc, cl, cls })
    }

    pub fn a(&self) -> &FiniteAbelian {
        &self.a
    }

    pub fn pplus(&self) -> &[Elem] {
        &self.pplus
    }

    pub fn locals(&self) -> &[LocalFactor] {
        &self.locals
    }

    /// The product of the local groups.
    pub fn local_group(&self) -> &FiniteAbelian {
        &self.loc
    }

    pub fn cl_reps(&self) -> &[Elem] {
        &self.cl.reps
    }

    pub fn cls_reps(&self) -> &[Elem] {
        &self.cls.reps
    }

    pub fn cl_class(&self, x: &[u64]) -> usize {
        self.cl.class_of[self.a.index(x)]
    }

    pub fn cls_class(&self, x: &[u64]) -> usize {
        self.cls.class_of[self.a.index(x)]
    }

    /// Classes of cl mapping to the trivial class of cl^S.
    pub fn w_classes(&self) -> Vec<usize> {
        (0..self.cl.count()).filter(|&c| self.cls_class(&self.cl.reps[c]) == self.cls_class(&self.a.zero())).collect()
    }

    /// The local group -> A, on the concatenated coordinates.
    pub fn local_to_a(&self, l: &[u64]) -> Elem {
        let mut acc = self.a.zero();
        let mut off = 0;
        for f in &self.locals {
            let k = f.group.rank();
            acc = self.a.add(&acc, &f.to_a.apply(&f.group, &self.a, &l[off..off + k]));
            off += k;
        }
        acc
    }

    /// The fundamental class as weights on cl representatives.
    pub fn eta(&self, degree: u32) -> Result<Vec<i64>, TorusError> {
        if degree > 0 {
            return Err(TorusError::UnsupportedDegree(degree));
        }
        Ok(vec![1; self.cl.count()])
    }
}

/// O₊ ⊆ O₊^S with the map to the local group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitData {
    pub o_plus: FiniteAbelian,
    pub o_plus_s: FiniteAbelian,
    pub incl: Hom,
    pub to_local: Hom,
}

impl UnitData {
    /// Trivial units; exact only when the local group embeds in cl.
    pub fn trivial() -> Self {
        UnitData {
            o_plus: FiniteAbelian::new(vec![]),
            o_plus_s: FiniteAbelian::new(vec![]),
            incl: Hom { images: vec![] },
            to_local: Hom { images: vec![] },
        }
    }

    /// #(O₊^S/O₊).
    pub fn hs_order(&self) -> u64 {
        self.o_plus_s.order() / self.o_plus.order()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Seq13Report {
    pub o_plus: u64,
    pub o_plus_s: u64,
    pub local: u64,
    pub cl: u64,
    pub cls: u64,
    pub w: u64,
    pub hs: u64,
}

fn same_set(mut x: Vec<Elem>, mut y: Vec<Elem>) -> bool {
    x.sort();
    y.sort();
    x == y
}

/// 0 -> O₊ -> O₊^S -> T(F_S)/T(o_S) -> cl -> cl^S -> 0.
pub fn check_seq13(model: &IdeleClassModel, units: &UnitData) -> Result<Seq13Report, TorusError> {
    let loc = model.local_group();
    if !units.incl.is_well_defined(&units.o_plus, &units.o_plus_s) {
        return Err(TorusError::BadHom("O+ -> O+^S"));
    }
    if !units.to_local.is_well_defined(&units.o_plus_s, loc) {
        return Err(TorusError::BadHom("O+^S -> local"));
    }
    if units.incl.kernel(&units.o_plus, &units.o_plus_s).len() != 1 {
        return Err(TorusError::Exactness(Seq13Stage::UnitInclusion));
    }
    if !same_set(units.incl.image(&units.o_plus_s), units.to_local.kernel(&units.o_plus_s, loc)) {
        return Err(TorusError::Exactness(Seq13Stage::SUnits));
    }
    let zero_class = model.cl_class(&model.a.zero());
    let loc_kernel: Vec<Elem> = loc.elements().filter(|l| model.cl_class(&model.local_to_a(l)) == zero_class).collect();
    if !same_set(units.to_local.image(loc), loc_kernel) {
        return Err(TorusError::Exactness(Seq13Stage::LocalGroup));
    }
    let mut hit: Vec<usize> = loc.elements().map(|l| model.cl_class(&model.local_to_a(&l))).collect();
    hit.sort();
    hit.dedup();
    if hit != model.w_classes() {
        return Err(TorusError::Exactness(Seq13Stage::ClassGroup));
    }
    Ok(Seq13Report {
        o_plus: units.o_plus.order(),
        o_plus_s: units.o_plus_s.order(),
        local: loc.order(),
        cl: model.cl_reps().len() as u64,
        cls: model.cls_reps().len() as u64,
        w: hit.len() as u64,
        hs: units.hs_order(),
    })
}

/// Local weights: z_p = 1 at non-split primes; at split primes a finitely
/// supported function on the valuation line whose translates by the local
/// period sum to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalWeights {
    NonSplit,
    Split(BTreeMap<i64, i64>),
}

impl LocalWeights {
    /// The indicator of [0, period).
    pub fn box_weights(period: u64) -> Self {
        LocalWeights::Split((0..period as i64).map(|v| (v, 1)).collect())
    }
}

/// Both sides of #H^S·⟨η, f⟩ = ⟨η^S ∩ Π z_p, f⟩ for f a function on cl.
pub fn lemma34_sides(
    model: &IdeleClassModel,
    units: &UnitData,
    weights: &[LocalWeights],
    f: &[i64],
) -> Result<(i64, i64), TorusError> {
    check_seq13(model, units)?;
    if weights.len() != model.locals().len() {
        return Err(TorusError::WeightCount { got: weights.len(), want: model.locals().len() });
    }
    if f.len() != model.cl_reps().len() {
        return Err(TorusError::TestFunctionSize { got: f.len(), want: model.cl_reps().len() });
    }
    // per local factor: weight of each element
    let mut local_w: Vec<Vec<(Elem, i64)>> = Vec::new();
    for (k, (lf, w)) in model.locals().iter().zip(weights).enumerate() {
        match w {
            LocalWeights::NonSplit => local_w.push(lf.group.elements().map(|x| (x, 1)).collect()),
            LocalWeights::Split(z) => {
                if lf.group.rank() != 1 {
                    return Err(TorusError::BadWeights(k));
                }
                let period = lf.group.orders[0] as i64;
                let mut acc = vec![0i64; period as usize];
                for (&v, &c) in z {
                    acc[v.rem_euclid(period) as usize] += c;
                }
                if acc.iter().any(|&s| s != 1) {
                    return Err(TorusError::BadWeights(k));
                }
                local_w.push(acc.into_iter().enumerate().map(|(i, c)| (vec![i as u64], c)).collect());
            }
        }
    }
    let lhs = units.hs_order() as i64 * f.iter().sum::<i64>();
    let mut rhs = 0i64;
    for s in model.cls_reps() {
        let mut stack: Vec<(usize, Elem, i64)> = vec![(0, vec![], 1)];
        while let Some((k, coords, w)) = stack.pop() {
            if k == local_w.len() {
                let x = model.a.add(s, &model.local_to_a(&coords));
                rhs += w * f[model.cl_class(&x)];
                continue;
            }
            for (e, c) in &local_w[k] {
                if *c != 0 {
                    let mut cc = coords.clone();
                    cc.extend_from_slice(e);
                    stack.push((k + 1, cc, w * c));
                }
            }
        }
    }
    Ok((lhs, rhs))
}

pub fn lemma34_pairing_check(
    model: &IdeleClassModel,
    units: &UnitData,
    weights: &[LocalWeights],
    f: &[i64],
) -> Result<i64, TorusError> {
    let (lhs, rhs) = lemma34_sides(model, units, weights, f)?;
    if lhs != rhs {
        return Err(TorusError::Counting { lhs, rhs });
    }
    Ok(lhs)
}

/// Unit data making the sequence exact: O₊ arbitrary, O₊^S = O₊ ⊕ K with
/// K the kernel of the local group -> cl.
pub fn exact_units(model: &IdeleClassModel, o_plus: FiniteAbelian) -> UnitData {
    let loc = model.local_group();
    let zero_class = model.cl_class(&model.a.zero());
    let kernel: Vec<Elem> = loc.elements().filter(|l| model.cl_class(&model.local_to_a(l)) == zero_class).collect();
    let (k_orders, k_gens) = subgroup_basis(loc, &kernel);
    let r = o_plus.rank();
    let mut orders = o_plus.orders.clone();
    orders.extend(&k_orders);
    let o_plus_s = FiniteAbelian::new(orders);
    let incl = Hom {
        images: (0..r)
            .map(|i| {
                let mut e = o_plus_s.zero();
                e[i] = 1 % o_plus_s.orders[i];
                e
            })
            .collect(),
    };
    let mut images: Vec<Elem> = (0..r).map(|_| loc.zero()).collect();
    images.extend(k_gens);
    UnitData { o_plus, o_plus_s, incl, to_local: Hom { images } }
}

/// A random model with |A| <= max_a, together with exact unit data.
pub fn random_model<R: Rng>(rng: &mut R, max_a: u64) -> (IdeleClassModel, UnitData) {
    let a = loop {
        let rank = rng.gen_range(1..=2);
        let orders: Vec<u64> = (0..rank).map(|_| rng.gen_range(1..=8)).collect();
        if orders.iter().product::<u64>() <= max_a {
            break FiniteAbelian::new(orders);
        }
    };
    let pplus: Vec<Elem> =
        (0..rng.gen_range(0..=1)).map(|_| a.orders.iter().map(|&n| rng.gen_range(0..n)).collect()).collect();
    let locals: Vec<LocalFactor> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let split = rng.gen_bool(0.5);
            let k = rng.gen_range(1..=6);
            // the image must be killed by k
            let cands: Vec<Elem> = a.elements().filter(|x| a.is_zero(&a.scale(x, k as i64))).collect();
            let img = cands[rng.gen_range(0..cands.len())].clone();
            LocalFactor { group: FiniteAbelian::new(vec![k]), to_a: Hom { images: vec![img] }, split }
        })
        .collect();
    let model = IdeleClassModel::new(a, pplus, locals).expect("generated model is consistent");
    let o_plus = FiniteAbelian::new(vec![rng.gen_range(1..=2)]);
    let units = exact_units(&model, o_plus);
    (model, units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z4_model() -> IdeleClassModel {
        let a = FiniteAbelian::new(vec![4]);
        let lf = LocalFactor { group: FiniteAbelian::new(vec![2]), to_a: Hom { images: vec![vec![2]] }, split: false };
        IdeleClassModel::new(a, vec![], vec![lf]).unwrap()
    }

    #[test]
    fn z4_example() {
        let m = z4_model();
        assert_eq!(m.cl_reps().len(), 4);
        assert_eq!(m.cls_reps().len(), 2);
        assert_eq!(m.w_classes().len(), 2);
        let u = exact_units(&m, FiniteAbelian::new(vec![]));
        let rep = check_seq13(&m, &u).unwrap();
        assert_eq!(rep.hs, 1);
        assert_eq!(rep.cl, rep.w * rep.cls);
    }

    #[test]
    fn trivial_model() {
        let m = IdeleClassModel::new(FiniteAbelian::new(vec![1]), vec![], vec![]).unwrap();
        let u = UnitData::trivial();
        let rep = check_seq13(&m, &u).unwrap();
        assert_eq!((rep.cl, rep.cls, rep.w), (1, 1, 1));
        assert_eq!(lemma34_pairing_check(&m, &u, &[], &[5]).unwrap(), 5);
        assert!(matches!(m.eta(1), Err(TorusError::UnsupportedDegree(1))));
    }

    #[test]
    fn nontrivial_hs() {
        // local Z/4 -> Z/4 by 2: kernel {0, 2} gives |H^S| = 2 and |W| = 2
        let a = FiniteAbelian::new(vec![4]);
        let lf = LocalFactor { group: FiniteAbelian::new(vec![4]), to_a: Hom { images: vec![vec![2]] }, split: false };
        let m = IdeleClassModel::new(a, vec![], vec![lf]).unwrap();
        let u = exact_units(&m, FiniteAbelian::new(vec![2]));
        let rep = check_seq13(&m, &u).unwrap();
        assert_eq!((rep.hs, rep.w), (2, 2));
        let f = [3, -1, 4, 7];
        let (lhs, rhs) = lemma34_sides(&m, &u, &[LocalWeights::NonSplit], &f).unwrap();
        assert_eq!(lhs, 2 * 13);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn corrupted_maps_are_located() {
        let a = FiniteAbelian::new(vec![4]);
        let lf = LocalFactor { group: FiniteAbelian::new(vec![4]), to_a: Hom { images: vec![vec![2]] }, split: false };
        let m = IdeleClassModel::new(a, vec![], vec![lf]).unwrap();
        let mut u = exact_units(&m, FiniteAbelian::new(vec![2]));
        u.to_local.images[1] = vec![0];
        assert!(matches!(check_seq13(&m, &u), Err(TorusError::Exactness(Seq13Stage::SUnits))));
        let mut u = exact_units(&m, FiniteAbelian::new(vec![2]));
        u.incl.images[0] = vec![0, 0];
        assert_eq!(check_seq13(&m, &u), Err(TorusError::Exactness(Seq13Stage::UnitInclusion)));
    }

    #[test]
    fn split_weights() {
        let a = FiniteAbelian::new(vec![6]);
        let lf = LocalFactor { group: FiniteAbelian::new(vec![3]), to_a: Hom { images: vec![vec![2]] }, split: true };
        let m = IdeleClassModel::new(a, vec![], vec![lf]).unwrap();
        let u = exact_units(&m, FiniteAbelian::new(vec![]));
        let f = [1, 2, 3, 4, 5, 6];
        // z = [v >= 0] - [v >= 3] shifted and with a cancelling pair
        let z = LocalWeights::Split([(-1, 1), (0, 1), (1, 1), (2, -1), (5, 1), (8, -1), (11, 1)].into_iter().collect());
        assert_eq!(lemma34_pairing_check(&m, &u, &[z], &f).unwrap(), 21);
        let bad = LocalWeights::Split([(0, 1), (1, 1)].into_iter().collect());
        assert_eq!(lemma34_sides(&m, &u, &[bad], &f), Err(TorusError::BadWeights(0)));
        assert_eq!(lemma34_pairing_check(&m, &u, &[LocalWeights::box_weights(3)], &f).unwrap(), 21);
    }

    #[test]
    fn random_models_satisfy_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut saw_w = false;
        let mut saw_hs = false;
        for _ in 0..60 {
            let (m, u) = random_model(&mut rng, 48);
            let rep = check_seq13(&m, &u).unwrap();
            saw_w |= rep.w > 1;
            saw_hs |= rep.hs > 1;
            assert_eq!(rep.cl, rep.w * rep.cls);
            let weights: Vec<LocalWeights> = m
                .locals()
                .iter()
                .map(|l| if l.split { LocalWeights::box_weights(l.group.orders[0]) } else { LocalWeights::NonSplit })
                .collect();
            let f: Vec<i64> = (0..m.cl_reps().len()).map(|_| rng.gen_range(-5..=5)).collect();
            lemma34_pairing_check(&m, &u, &weights, &f).unwrap();
        }
        assert!(saw_w && saw_hs);
    }
}
