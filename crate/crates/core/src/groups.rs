//! Finite abelian group utilities shared by the torus quotients, the idele-class
//! models and the Galois models.

use serde::{Deserialize, Serialize};

/// A finite abelian group whose elements are the indices `0..size()`.
pub trait EnumGroup {
    fn size(&self) -> usize;
    fn identity(&self) -> usize;
    fn op(&self, a: usize, b: usize) -> usize;

    fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut r = self.identity();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.op(r, b);
            }
            b = self.op(b, b);
            e >>= 1;
        }
        r
    }

    fn inverse(&self, a: usize) -> usize {
        self.pow(a, self.size() as u64 - 1)
    }

    fn order_of(&self, a: usize) -> u64 {
        let mut ord = self.size() as u64;
        for (l, _) in factorize(ord) {
            while ord % l == 0 && self.pow(a, ord / l) == self.identity() {
                ord /= l;
            }
        }
        ord
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Prime-power cyclic factors of a product of cyclic groups, sorted.
pub fn elementary_divisors(orders: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = orders
        .iter()
        .flat_map(|&n| factorize(n).into_iter().map(|(l, e)| l.pow(e)))
        .collect();
    out.sort_unstable();
    out
}

/// A cyclic decomposition: generators (as element indices) with their orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicBasis {
    pub gens: Vec<usize>,
    pub orders: Vec<u64>,
}

/// Greedy basis of each Sylow subgroup, primes ascending, orders non-increasing
/// within a prime.  Ties go to the smallest element index, so the result is
/// deterministic.
pub fn abelian_basis<G: EnumGroup>(g: &G) -> CyclicBasis {
    let n = g.size();
    let id = g.identity();
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for (l, a) in factorize(n as u64) {
        let la = l.pow(a);
        let sylow: Vec<usize> = (0..n).filter(|&x| g.pow(x, la) == id).collect();
        let mut in_h = vec![false; n];
        in_h[id] = true;
        let mut h_elems = vec![id];
        while h_elems.len() < sylow.len() {
            // element of maximal order modulo the current subgroup
            let mut best: Option<(u32, usize)> = None;
            for &x in &sylow {
                if in_h[x] {
                    continue;
                }
                let mut k = 0;
                let mut y = x;
                while !in_h[y] {
                    y = g.pow(y, l);
                    k += 1;
                }
                if best.map_or(true, |(bk, _)| k > bk) {
                    best = Some((k, x));
                }
            }
            let (k, x) = best.expect("proper subgroup leaves an element");
            let lk = l.pow(k);
            let target = g.pow(x, lk);
            let h = *h_elems
                .iter()
                .find(|&&h| g.pow(h, lk) == target)
                .expect("divisibility inside a finite abelian p-group");
            let gen = g.op(x, g.inverse(h));
            let mut next = Vec::with_capacity(h_elems.len() * lk as usize);
            let mut pw = id;
            for _ in 0..lk {
                for &e in &h_elems {
                    let z = g.op(e, pw);
                    if !in_h[z] {
                        in_h[z] = true;
                    }
                    next.push(z);
                }
                pw = g.op(pw, gen);
            }
            h_elems = next;
            gens.push(gen);
            orders.push(lk);
        }
    }
    CyclicBasis { gens, orders }
}

/// Coordinates of every element with respect to a basis, indexed by element.
pub fn basis_coordinates<G: EnumGroup>(g: &G, basis: &CyclicBasis) -> Vec<Vec<u64>> {
    let n = g.size();
    let mut coords: Vec<Option<Vec<u64>>> = vec![None; n];
    let mut frontier = vec![(g.identity(), vec![0u64; basis.gens.len()])];
    for (k, (&gen, &ord)) in basis.gens.iter().zip(&basis.orders).enumerate() {
        let mut next = Vec::with_capacity(frontier.len() * ord as usize);
        for (e, c) in frontier {
            let mut z = e;
            for j in 0..ord {
                let mut cc = c.clone();
                cc[k] = j;
                next.push((z, cc));
                z = g.op(z, gen);
            }
        }
        frontier = next;
    }
    for (e, c) in frontier {
        coords[e] = Some(c);
    }
    coords.into_iter().map(|c| c.expect("basis generates the group")).collect()
}

/// Direct product of cyclic groups Z/n_1 x ... x Z/n_k with the first
/// coordinate most significant in the index encoding, so index order is
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelian {
    pub orders: Vec<u64>,
}

pub type Elem = Vec<u64>;

impl FiniteAbelian {
    pub fn new(orders: Vec<u64>) -> Self {
        assert!(orders.iter().all(|&n| n >= 1), "cyclic orders are positive");
        FiniteAbelian { orders }
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn generator(&self, k: usize) -> Elem {
        let mut e = self.zero();
        e[k] = 1 % self.orders[k];
        e
    }

    pub fn reduce(&self, e: &[i64]) -> Elem {
        e.iter().zip(&self.orders).map(|(&x, &n)| x.rem_euclid(n as i64) as u64).collect()
    }

    pub fn contains(&self, e: &[u64]) -> bool {
        e.len() == self.rank() && e.iter().zip(&self.orders).all(|(x, n)| x < n)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), n)| (x + y) % n).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        a.iter().zip(&self.orders).map(|(x, n)| (n - x) % n).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &[u64], k: i64) -> Elem {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
            .collect()
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn index(&self, a: &[u64]) -> usize {
        a.iter().zip(&self.orders).fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn elem(&self, mut idx: usize) -> Elem {
        let mut out = vec![0; self.rank()];
        for k in (0..self.rank()).rev() {
            let n = self.orders[k] as usize;
            out[k] = (idx % n) as u64;
            idx /= n;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order() as usize).map(|i| self.elem(i))
    }

    pub fn elem_order(&self, a: &[u64]) -> u64 {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &n)| n / gcd(x, n))
            .fold(1, num_integer::lcm)
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn span_mask(&self, gens: &[Elem]) -> Vec<bool> {
        let n = self.order() as usize;
        let mut mask = vec![false; n];
        let z = self.zero();
        mask[self.index(&z)] = true;
        let mut stack = vec![z];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = self.add(&x, g);
                let i = self.index(&y);
                if !mask[i] {
                    mask[i] = true;
                    stack.push(y);
                }
            }
        }
        mask
    }

    pub fn span(&self, gens: &[Elem]) -> Vec<Elem> {
        let mask = self.span_mask(gens);
        mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| self.elem(i)).collect()
    }

    /// Coset decomposition modulo a subgroup: lexicographically minimal
    /// representatives and the class index of every element.
    pub fn cosets(&self, sub_gens: &[Elem]) -> Cosets {
        let sub = self.span(sub_gens);
        let n = self.order() as usize;
        let mut class_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let x = self.elem(i);
            let c = reps.len();
            for h in &sub {
                class_of[self.index(&self.add(&x, h))] = c;
            }
            reps.push(x);
        }
        Cosets { reps, class_of }
    }
}

impl EnumGroup for FiniteAbelian {
    fn size(&self) -> usize {
        self.order() as usize
    }
    fn identity(&self) -> usize {
        0
    }
    fn op(&self, a: usize, b: usize) -> usize {
        self.index(&self.add(&self.elem(a), &self.elem(b)))
    }
}

#[derive(Clone, Debug)]
pub struct Cosets {
    pub reps: Vec<Elem>,
    pub class_of: Vec<usize>,
}

impl Cosets {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// Cyclic decomposition of the subgroup with the given elements (which must
/// be closed under addition): orders and generators.
pub fn subgroup_basis(g: &FiniteAbelian, elems: &[Elem]) -> (Vec<u64>, Vec<Elem>) {
    struct View<'a> {
        g: &'a FiniteAbelian,
        elems: &'a [Elem],
        pos: std::collections::HashMap<usize, usize>,
    }
    impl EnumGroup for View<'_> {
        fn size(&self) -> usize {
            self.elems.len()
        }
        fn identity(&self) -> usize {
            self.pos[&self.g.index(&self.g.zero())]
        }
        fn op(&self, a: usize, b: usize) -> usize {
            self.pos[&self.g.index(&self.g.add(&self.elems[a], &self.elems[b]))]
        }
    }
    let pos = elems.iter().enumerate().map(|(i, x)| (g.index(x), i)).collect();
    let view = View { g, elems, pos };
    let b = abelian_basis(&view);
    (b.orders, b.gens.iter().map(|&i| elems[i].clone()).collect())
}

/// A homomorphism between products of cyclic groups, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hom {
    pub images: Vec<Elem>,
}

impl Hom {
    pub fn apply(&self, src: &FiniteAbelian, dst: &FiniteAbelian, x: &[u64]) -> Elem {
        debug_assert_eq!(x.len(), src.rank());
        let mut acc = dst.zero();
        for (k, &c) in x.iter().enumerate() {
            acc = dst.add(&acc, &dst.scale(&self.images[k], c as i64));
        }
        acc
    }

    /// The images are elements of `dst` and respect the generator orders of `src`.
    pub fn is_well_defined(&self, src: &FiniteAbelian, dst: &FiniteAbelian) -> bool {
        self.images.len() == src.rank()
            && self.images.iter().all(|im| dst.contains(im))
            && self
                .images
                .iter()
                .zip(&src.orders)
                .all(|(im, &n)| dst.is_zero(&dst.scale(im, n as i64)))
    }

    pub fn image(&self, dst: &FiniteAbelian) -> Vec<Elem> {
        dst.span(&self.images)
    }

    pub fn kernel(&self, src: &FiniteAbelian, dst: &FiniteAbelian) -> Vec<Elem> {
        src.elements().filter(|x| dst.is_zero(&self.apply(src, dst, x))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroup_basis_generates() {
        let g = FiniteAbelian::new(vec![4, 6]);
        let sub = g.span(&[vec![2, 0], vec![0, 3], vec![2, 2]]);
        let (orders, gens) = subgroup_basis(&g, &sub);
        assert_eq!(orders.iter().product::<u64>(), sub.len() as u64);
        assert_eq!(g.span(&gens).len(), sub.len());
    }

    #[test]
    fn basis_of_product_matches_elementary_divisors() {
        for orders in [vec![4, 6], vec![12], vec![2, 2, 3], vec![8, 4, 9], vec![1, 5]] {
            let g = FiniteAbelian::new(orders.clone());
            let b = abelian_basis(&g);
            let mut got = b.orders.clone();
            got.sort_unstable();
            assert_eq!(got, elementary_divisors(&orders), "{orders:?}");
            let coords = basis_coordinates(&g, &b);
            assert_eq!(coords.len(), g.size());
        }
    }

    #[test]
    fn coset_reps_are_lex_minimal() {
        let g = FiniteAbelian::new(vec![4, 6]);
        let c = g.cosets(&[vec![2, 3]]);
        assert_eq!(c.count(), 12);
        assert_eq!(c.reps[0], vec![0, 0]);
        for i in 0..g.size() {
            let r = &c.reps[c.class_of[i]];
            assert!(g.index(r) <= i);
        }
    }

    #[test]
    fn hom_well_definedness() {
        let z4 = FiniteAbelian::new(vec![4]);
        let z6 = FiniteAbelian::new(vec![6]);
        assert!(!Hom { images: vec![vec![1]] }.is_well_defined(&z4, &z6));
        assert!(Hom { images: vec![vec![3]] }.is_well_defined(&z4, &z6));
        assert!(Hom { images: vec![vec![0]] }.is_well_defined(&z4, &z6));
        let z2 = FiniteAbelian::new(vec![2]);
        let h = Hom { images: vec![vec![3]] };
        assert!(h.is_well_defined(&z2, &z6));
        assert_eq!(h.kernel(&z2, &z6).len(), 1);
    }

    proptest::proptest! {
        #[test]
        fn order_via_trait_matches_direct(a in 1u64..10, b in 1u64..10, x in 0usize..100) {
            let g = FiniteAbelian::new(vec![a, b]);
            let i = x % g.size();
            proptest::prop_assert_eq!(g.order_of(i), g.elem_order(&g.elem(i)));
        }
    }
}
