//! Howell normal form over Z/ℓ^N: a unique echelon basis for submodules of
//! (Z/ℓ^N)^k, giving canonical coset representatives.

/// A submodule of (Z/ℓ^N)^cols in Howell form.  Pivots are powers of ℓ,
/// entries above a pivot ℓ^v lie in [0, ℓ^v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Howell {
    ell: u64,
    n: u32,
    modulus: u64,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
}

fn val(x: u64, ell: u64) -> u32 {
    let mut v = 0;
    let mut x = x;
    while x % ell == 0 {
        x /= ell;
        v += 1;
    }
    v
}

impl Howell {
    pub fn new(ell: u64, n: u32, cols: usize, gens: Vec<Vec<u64>>) -> Self {
        let modulus = ell.pow(n);
        let mm = modulus as u128;
        let axpy = |row: &mut Vec<u64>, q: u64, piv: &[u64]| {
            // row -= q·piv
            for (x, &y) in row.iter_mut().zip(piv) {
                let t = (q as u128 * y as u128) % mm;
                *x = ((*x as u128 + mm - t) % mm) as u64;
            }
        };
        let mut pool: Vec<Vec<u64>> = gens
            .into_iter()
            .map(|g| g.into_iter().map(|x| x % modulus).collect::<Vec<_>>())
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..cols {
            let Some(best) = (0..pool.len()).filter(|&i| pool[i][c] != 0).min_by_key(|&i| val(pool[i][c], ell)) else {
                continue;
            };
            let mut piv = pool.swap_remove(best);
            let v = val(piv[c], ell);
            let pv = ell.pow(v);
            let unit = piv[c] / pv;
            let ui = crate::padic::inv_mod(unit, modulus).expect("unit part is invertible");
            for x in piv.iter_mut() {
                *x = ((*x as u128 * ui as u128) % mm) as u64;
            }
            for row in pool.iter_mut() {
                if row[c] != 0 {
                    let q = row[c] / pv;
                    axpy(row, q, &piv);
                }
            }
            pool.retain(|r| r.iter().any(|&x| x != 0));
            // ℓ^{N-v}·piv kills the pivot but may survive elsewhere
            let scale = ell.pow(n - v);
            let extra: Vec<u64> = piv.iter().map(|&x| ((x as u128 * scale as u128) % mm) as u64).collect();
            if extra.iter().any(|&x| x != 0) {
                pool.push(extra);
            }
            rows.push(piv);
            pivots.push((c, v));
        }
        for i in 0..rows.len() {
            let (c, v) = pivots[i];
            let pv = ell.pow(v);
            let (head, tail) = rows.split_at_mut(i);
            for r in head.iter_mut() {
                let q = r[c] / pv;
                if q != 0 {
                    axpy(r, q, &tail[0]);
                }
            }
        }
        Howell { ell, n, modulus, cols, rows, pivots }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Canonical representative of v modulo the submodule.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mm = self.modulus as u128;
        let mut w: Vec<u64> = v.iter().map(|&x| x % self.modulus).collect();
        for (row, &(c, v)) in self.rows.iter().zip(&self.pivots) {
            let q = w[c] / self.ell.pow(v);
            if q != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    let t = (q as u128 * y as u128) % mm;
                    *x = ((*x as u128 + mm - t) % mm) as u64;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// log_ℓ of the number of elements.
    pub fn log_size(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| self.n - v).sum()
    }

    pub fn is_submodule_of(&self, o: &Howell) -> bool {
        self.rows.iter().all(|r| o.contains(r))
    }

    /// Elementary divisors (as powers of ℓ, ascending) of self / sub, where
    /// `sub` must be contained in self.
    pub fn quotient_divisors(&self, sub: &Howell) -> Vec<u64> {
        let mm = self.modulus as u128;
        let base = sub.log_size();
        // s_j = log |ℓ^j Q|
        let s: Vec<u32> = (0..=self.n)
            .map(|j| {
                let f = self.ell.pow(j);
                let mut gens: Vec<Vec<u64>> =
                    self.rows.iter().map(|r| r.iter().map(|&x| ((x as u128 * f as u128) % mm) as u64).collect()).collect();
                gens.extend(sub.rows.iter().cloned());
                Howell::new(self.ell, self.n, self.cols, gens).log_size() - base
            })
            .collect();
        let mut out = Vec::new();
        for j in 0..self.n as usize {
            // factors of order >= ℓ^{j+1} number s_j - s_{j+1}; of order exactly ℓ^{j+1}:
            let ge = s[j] - s[j + 1];
            let ge_next = if j + 1 < self.n as usize { s[j + 1] - s[j + 2] } else { 0 };
            for _ in 0..(ge - ge_next) {
                out.push(self.ell.pow(j as u32 + 1));
            }
        }
        out
    }
}
