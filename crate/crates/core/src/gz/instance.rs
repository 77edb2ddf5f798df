use crate::groups::{Elem, FiniteAbelian, Hom};
use crate::iwasawa::{Character, Coeff, CoeffRing, GaloisModel, IwasawaError, RecMap};
use crate::lfactors::{LocalCharCase, LocalRepCase};
use crate::padic::{PadicScalar, QuadContext, QuadScalar, TorusQuotient};
use crate::projline::{BoundaryMeasure, FixedPair};
use crate::torus::{check_seq13, IdeleClassModel, LocalFactor, UnitData};

use super::GzError;

/// A non-split Steinberg prime of S.
#[derive(Clone, Debug)]
pub struct PrimeData {
    pub qctx: QuadContext,
    pub tau: QuadScalar,
    pub tate_q: PadicScalar,
    pub tq: TorusQuotient,
    pub depth: u32,
}

impl PrimeData {
    pub fn new(qctx: QuadContext, tau: QuadScalar, tate_q: PadicScalar, level: u32, depth: u32) -> Result<Self, GzError> {
        FixedPair::nonsplit(tau)?;
        if tate_q.val().map_or(true, |v| v < 1) {
            return Err(GzError::Invalid { invariant: "tate_period_small", detail: "v(q) must be positive".into() });
        }
        if depth < level {
            return Err(GzError::Invalid { invariant: "depth_covers_level", detail: format!("depth {depth} < level {level}") });
        }
        let tq = TorusQuotient::new(qctx, level)?;
        Ok(PrimeData { qctx, tau, tate_q, tq, depth })
    }

    pub fn p(&self) -> u64 {
        self.qctx.base().p()
    }

    pub fn fixed_pair(&self) -> FixedPair {
        FixedPair::NonSplit { tau: self.tau }
    }

    pub fn torus_group(&self) -> FiniteAbelian {
        FiniteAbelian::new(self.tq.basis().orders.clone())
    }
}

/// A prime of S₋, entering only through its ε-factor.
#[derive(Clone, Debug)]
pub struct MinusPrime {
    pub rep: LocalRepCase,
    pub ch: LocalCharCase,
    /// the local scalar carried by the measure; its square should be ε²
    pub local_value: Coeff,
}

/// Per class of cl: a sum of pure tensors, each with one boundary measure per
/// prime of S.
pub type ClassMeasures = Vec<Vec<BoundaryMeasure>>;

#[derive(Clone, Debug)]
pub struct GZInstance {
    pub primes: Vec<PrimeData>,
    pub extra: Vec<u64>,
    pub model: IdeleClassModel,
    pub units: UnitData,
    pub galois: GaloisModel,
    /// the global reciprocity map A -> G
    pub rho: Hom,
    pub ring: CoeffRing,
    pub chi: Character,
    pub minus: Vec<MinusPrime>,
    pub measures: Vec<ClassMeasures>,
    /// representatives t_i of cl, one per class in class-index order
    pub reps: Vec<Elem>,
}

/// Everything needed to assemble an instance.
#[derive(Clone, Debug)]
pub struct InstanceParts {
    pub primes: Vec<PrimeData>,
    pub extra: Vec<u64>,
    pub pplus: Vec<Elem>,
    pub units: UnitData,
    pub g_orders: Vec<u64>,
    pub h: Vec<Elem>,
    pub rho: Vec<Elem>,
    pub rec: Vec<Vec<Elem>>,
    pub coeff_prime: u64,
    pub coeff_precision: u32,
    pub chi_exps: Vec<u64>,
    pub minus: Vec<MinusPrime>,
    pub measures: Vec<ClassMeasures>,
}

/// A = ⊕_p T(Q_p)/U_p ⊕ extra; the local factors sit in the leading blocks.
pub fn idele_group(primes: &[PrimeData], extra: &[u64]) -> (FiniteAbelian, Vec<LocalFactor>) {
    let mut orders: Vec<u64> = Vec::new();
    let mut locals = Vec::new();
    let total: usize = primes.iter().map(|p| p.tq.basis().orders.len()).sum::<usize>() + extra.len();
    for p in primes {
        let g = p.torus_group();
        let off = orders.len();
        let images = (0..g.rank())
            .map(|k| {
                let mut e = vec![0; total];
                e[off + k] = 1 % g.orders[k];
                e
            })
            .collect();
        orders.extend(&g.orders);
        locals.push(LocalFactor { group: g, to_a: Hom { images }, split: false });
    }
    orders.extend(extra);
    (FiniteAbelian::new(orders), locals)
}

impl GZInstance {
    pub fn new(parts: InstanceParts) -> Result<Self, GzError> {
        let InstanceParts {
            primes,
            extra,
            pplus,
            units,
            g_orders,
            h,
            rho,
            rec,
            coeff_prime,
            coeff_precision,
            chi_exps,
            minus,
            measures,
        } = parts;
        if primes.is_empty() {
            return Err(GzError::Invalid { invariant: "nonempty_s", detail: "no primes".into() });
        }
        let (a, locals) = idele_group(&primes, &extra);
        let model = IdeleClassModel::new(a.clone(), pplus, locals)?;
        check_seq13(&model, &units)?;
        let g = FiniteAbelian::new(g_orders);
        let rho = Hom { images: rho };
        if !rho.is_well_defined(&a, &g) {
            return Err(GzError::Invalid { invariant: "rho_homomorphism", detail: "A -> G images".into() });
        }
        if model.pplus().iter().any(|x| !g.is_zero(&rho.apply(&a, &g, x))) {
            return Err(GzError::Invalid { invariant: "rho_kills_global", detail: "rho(P+) != 0".into() });
        }
        if rec.len() != primes.len() {
            return Err(GzError::Invalid { invariant: "rec_per_prime", detail: format!("{} maps for {} primes", rec.len(), primes.len()) });
        }
        let recs = rec
            .into_iter()
            .zip(&primes)
            .map(|(images, p)| RecMap { src: p.torus_group(), hom: Hom { images } })
            .collect();
        let galois = GaloisModel::new(g, h, recs)?;
        let base = CoeffRing::new(coeff_prime, coeff_precision)?;
        let mut ring = match Character::new(&base, &galois.g, &chi_exps) {
            Ok(_) => base,
            Err(IwasawaError::RootsUnavailable { order, .. }) => CoeffRing::with_roots(coeff_prime, coeff_precision, order)?,
            Err(e) => return Err(e.into()),
        };
        // S₋ scalars may need the extension too
        if minus.iter().any(|m| m.local_value.b != 0) && !ring.is_extended() {
            ring = CoeffRing::extended(coeff_prime, coeff_precision)?;
        }
        Self::finish(primes, extra, model, units, galois, rho, ring, &chi_exps, minus, measures)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        primes: Vec<PrimeData>,
        extra: Vec<u64>,
        model: IdeleClassModel,
        units: UnitData,
        galois: GaloisModel,
        rho: Hom,
        ring: CoeffRing,
        chi_exps: &[u64],
        minus: Vec<MinusPrime>,
        measures: Vec<ClassMeasures>,
    ) -> Result<Self, GzError> {
        let chi = Character::new(&ring, &galois.g, chi_exps)?;
        if measures.len() != model.cl_reps().len() {
            return Err(GzError::Invalid {
                invariant: "measures_per_class",
                detail: format!("{} measures for {} classes", measures.len(), model.cl_reps().len()),
            });
        }
        for (i, class) in measures.iter().enumerate() {
            for tensor in class {
                if tensor.len() != primes.len() {
                    return Err(GzError::Invalid { invariant: "tensor_arity", detail: format!("class {i}") });
                }
                for (mu, p) in tensor.iter().zip(&primes) {
                    if mu.ctx() != p.qctx.base() {
                        return Err(GzError::Invalid { invariant: "measure_prime", detail: format!("class {i}") });
                    }
                    if mu.total() != 0 {
                        return Err(GzError::Invalid { invariant: "total_mass_zero", detail: format!("class {i}: total {}", mu.total()) });
                    }
                }
            }
        }
        let reps = model.cl_reps().to_vec();
        Ok(GZInstance { primes, extra, model, units, galois, rho, ring, chi, minus, measures, reps })
    }

    pub fn r(&self) -> usize {
        self.primes.len()
    }

    pub fn a(&self) -> &FiniteAbelian {
        self.model.a()
    }

    /// ρ(x) as an index of G.
    pub fn rho_index(&self, x: &[u64]) -> usize {
        self.galois.g.index(&self.rho.apply(self.model.a(), &self.galois.g, x))
    }

    /// ι_p(c) ∈ A for a torus-quotient element c of prime k.
    pub fn iota(&self, k: usize, c: usize) -> Elem {
        let lf = &self.model.locals()[k];
        lf.to_a.apply(&lf.group, self.model.a(), self.primes[k].tq.coords(c))
    }

    /// [O₊^S : O₊].
    pub fn unit_index(&self) -> u64 {
        self.units.hs_order()
    }

    /// Replace t_i by t_i + x_i with x_i ∈ P₊.
    pub fn shift_transversal(&mut self, shifts: &[Elem]) -> Result<(), GzError> {
        let a = self.model.a();
        if shifts.len() != self.reps.len() {
            return Err(GzError::Invalid { invariant: "transversal_size", detail: format!("{} shifts", shifts.len()) });
        }
        let reps: Vec<Elem> = self.reps.iter().zip(shifts).map(|(t, x)| a.add(t, x)).collect();
        for (i, t) in reps.iter().enumerate() {
            if self.model.cl_class(t) != i {
                return Err(GzError::Invalid { invariant: "transversal_classes", detail: format!("shift {i} leaves its class") });
            }
        }
        self.reps = reps;
        Ok(())
    }

    pub fn with_character(&self, exps: &[u64]) -> Result<Self, GzError> {
        let mut out = self.clone();
        out.chi = Character::new(&self.ring, &self.galois.g, exps)?;
        Ok(out)
    }
}
