//! Measures on a finite abelian Galois group: the convolution algebra,
//! characters, augmentation filtrations and reciprocity maps.

mod algebra;
mod howell;
mod ring;

pub use algebra::{unflatten, Character, Filtration, GroupAlgebra, Measure};
pub use howell::Howell;
pub use ring::{Coeff, CoeffRing};

use crate::groups::{Elem, FiniteAbelian, Hom};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IwasawaError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coefficient precision {ell}^{n} out of range")]
    PrecisionOutOfRange { ell: u64, n: u32 },
    #[error("no primitive {order}-th root of unity over Z/{ell}^N or its unramified quadratic extension")]
    RootsUnavailable { ell: u64, order: u64 },
    #[error("measures belong to different models")]
    ModelMismatch,
    #[error("bad character: {0}")]
    BadCharacter(String),
    #[error("measure is not in I^{r}")]
    NotInPower { r: usize, residual: Vec<u64> },
    #[error("power I^{0} was not computed")]
    PowerNotComputed(usize),
    #[error("{0} is not invertible in the coefficient ring")]
    NotInvertible(u64),
    #[error("rec map {index} is not a homomorphism into G")]
    BadRecMap { index: usize },
    #[error("H and the rec images do not generate G")]
    NotGenerated,
    #[error("H generator outside G")]
    BadSubgroup,
    #[error("torus element has {got} coordinates, rec map {index} expects {want}")]
    LevelMismatch { index: usize, got: usize, want: usize },
}

/// A reciprocity map from a local torus quotient (in its cyclic coordinates)
/// into G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecMap {
    pub src: FiniteAbelian,
    pub hom: Hom,
}

/// G with a distinguished subgroup H and the local reciprocity maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisModel {
    pub g: FiniteAbelian,
    pub h: Vec<Elem>,
    pub rec: Vec<RecMap>,
}

impl GaloisModel {
    pub fn new(g: FiniteAbelian, h: Vec<Elem>, rec: Vec<RecMap>) -> Result<Self, IwasawaError> {
        if !h.iter().all(|x| x.len() == g.rank() && g.contains(x)) {
            return Err(IwasawaError::BadSubgroup);
        }
        for (index, r) in rec.iter().enumerate() {
            if !r.hom.is_well_defined(&r.src, &g) {
                return Err(IwasawaError::BadRecMap { index });
            }
        }
        let mut gens = h.clone();
        for r in &rec {
            gens.extend(r.hom.images.iter().cloned());
        }
        if g.span(&gens).len() as u64 != g.order() {
            return Err(IwasawaError::NotGenerated);
        }
        Ok(GaloisModel { g, h, rec })
    }

    pub fn rec_apply(&self, index: usize, x: &[u64]) -> Result<Elem, IwasawaError> {
        let r = &self.rec[index];
        if x.len() != r.src.rank() {
            return Err(IwasawaError::LevelMismatch { index, got: x.len(), want: r.src.rank() });
        }
        Ok(r.hom.apply(&r.src, &self.g, x))
    }

    /// All rec images together.
    pub fn rec_images(&self) -> Vec<Elem> {
        let gens: Vec<Elem> = self.rec.iter().flat_map(|r| r.hom.images.iter().cloned()).collect();
        self.g.span(&gens)
    }

    /// Representative of Π_k φ(rec_{p_k}(x_k)) ∈ I_χ^r: the convolution of the
    /// χ(σ_k)⁻¹δ_{σ_k} - δ₁.
    pub fn phi_rec_rep(&self, alg: &GroupAlgebra, chi: &Character, terms: &[(usize, Elem)]) -> Result<Measure, IwasawaError> {
        let mut acc = alg.delta(0);
        for (index, x) in terms {
            let sigma = self.rec_apply(*index, x)?;
            acc = alg.convolve(&acc, &alg.aug_gen(chi, self.g.index(&sigma)))?;
        }
        Ok(acc)
    }
}
