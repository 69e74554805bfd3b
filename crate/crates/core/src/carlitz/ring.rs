use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::text::format_elem;
use crate::algebra::units::{unit_group_bounded, DEFAULT_ENUMERATION_BOUND};
use crate::algebra::{euler_phi, factor, is_irreducible, mult_order, FieldCtx, FieldElem, Poly, Var};
use crate::residue::{ResidueRing, RingElem};

use super::cyclotomic::specialized_cyclotomic;
use super::galois::{apply_columns, columns_from_image, permutation_of_components, GaloisAction};
use super::qpoly::{carlitz_poly, specialize};
use super::CarlitzError;

/// Above this group order the per-unit images of X are built on demand.
const EAGER_TABLE_LIMIT: usize = 4096;

/// Predicted decomposition of Q in the Carlitz extension K_M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPrediction {
    pub ramified: bool,
    pub e: u64,
    pub f: u64,
    pub r: u64,
}

/// Writes M = Q^a·N with Q ∤ N; then e = Φ(Q^a), f = ord of Q mod N, r = Φ(N)/f.
pub fn predict_splitting(m: &Poly, q_mod: &Poly) -> Result<SplitPrediction, CarlitzError> {
    if m.is_zero() {
        return Err(CarlitzError::ZeroConductor);
    }
    if !is_irreducible(q_mod)? {
        return Err(CarlitzError::ReducibleModulus);
    }
    let q_mod = q_mod.monic();
    let mut rest = m.monic();
    let mut q_power = Poly::one(m.field(), Var::T);
    while let Ok(quotient) = rest.exact_div(&q_mod) {
        rest = quotient;
        q_power = &q_power * &q_mod;
    }
    let e = euler_phi(&q_power)?;
    let f = if rest.is_constant() { 1 } else { mult_order(&q_mod.rem(&rest)?, &rest)? };
    Ok(SplitPrediction { ramified: !q_power.is_one(), e, f, r: euler_phi(&rest)? / f })
}

#[derive(Clone, Copy, Debug)]
pub struct CarlitzOptions {
    /// Allows deg Q > 1 (T specialized into F_{q^{deg Q}}); prime q only.
    pub allow_higher_degree_modulus: bool,
    pub enumeration_bound: u64,
}

impl Default for CarlitzOptions {
    fn default() -> Self {
        CarlitzOptions { allow_higher_degree_modulus: false, enumeration_bound: DEFAULT_ENUMERATION_BOUND }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CarlitzDescriptor {
    pub q: u32,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "Q")]
    pub q_mod: String,
    pub c: String,
    pub n: usize,
    pub e: u64,
    pub f: u64,
    pub r: u64,
    pub phi_m_specialized: String,
    pub galois_order: usize,
}

/// O_M/QO_M ≅ F_{q'}[X]/(Φ_M(c, X)) with the action of (F_q[T]/(M))^×,
/// σ_A(X) = [A](c, X).
pub struct CarlitzRing {
    base_field: Arc<FieldCtx>,
    conductor: Poly,
    modulus: Poly,
    t_image: FieldElem,
    ring: ResidueRing,
    units: Vec<Poly>,
    unit_lookup: HashMap<u64, usize>,
    prediction: SplitPrediction,
    /// X^{q^i} mod Φ_M(c, X) for i < deg M.
    frobenius: Vec<RingElem>,
    images: Vec<OnceLock<RingElem>>,
    columns: Vec<OnceLock<Vec<RingElem>>>,
    perms: Vec<OnceLock<Vec<usize>>>,
}

impl std::fmt::Debug for CarlitzRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CarlitzRing(M = {}, Q = {})", self.conductor, self.modulus)
    }
}

impl CarlitzRing {
    pub fn new(m: &Poly, q_mod: &Poly) -> Result<CarlitzRing, CarlitzError> {
        Self::with_options(m, q_mod, CarlitzOptions::default())
    }

    pub fn with_options(m: &Poly, q_mod: &Poly, opts: CarlitzOptions) -> Result<CarlitzRing, CarlitzError> {
        if m.is_zero() {
            return Err(CarlitzError::ZeroConductor);
        }
        if !m.is_monic() {
            return Err(CarlitzError::NonMonicConductor);
        }
        let m = m.clone().with_var(Var::T);
        let q_mod = q_mod.monic().with_var(Var::T);
        let prediction = predict_splitting(&m, &q_mod)?;
        if prediction.ramified {
            return Err(CarlitzError::RamifiedModulus);
        }
        let base_field = m.field().clone();
        let deg_q = q_mod.degree().unwrap_or(0);
        let (ring_field, t_image) = if deg_q == 1 {
            (base_field.clone(), base_field.neg(q_mod.coeff(0)))
        } else {
            if !opts.allow_higher_degree_modulus || !base_field.is_prime_field() {
                return Err(CarlitzError::UnsupportedModulusDegree(deg_q));
            }
            let ext = Arc::new(FieldCtx::new(base_field.characteristic(), deg_q as u32, None)?);
            let root = ext
                .elements()
                .find(|&x| specialize(&q_mod, &ext, x).is_zero())
                .expect("an irreducible of degree d has a root in F_{q^d}");
            (ext, root)
        };
        let phi = specialized_cyclotomic(&m, &ring_field, t_image)?;
        let factorization = factor(&phi)?;
        let degrees = factorization.degrees();
        let consistent = factorization.is_squarefree()
            && degrees.len() as u64 == prediction.r
            && degrees.iter().all(|&d| d as u64 == prediction.f);
        if !consistent {
            return Err(CarlitzError::SplittingMismatch { predicted: prediction, observed: degrees });
        }
        let ring = ResidueRing::with_factorization(&phi, factorization);
        let units = unit_group_bounded(&m, opts.enumeration_bound)?;
        if units.len() != ring.degree() {
            return Err(CarlitzError::SplittingMismatch { predicted: prediction, observed: vec![units.len()] });
        }
        let unit_lookup = units.iter().enumerate().map(|(i, u)| (u.index(), i)).collect();
        let q = base_field.order() as u64;
        let mut frobenius = Vec::new();
        let mut cur = ring.x();
        for _ in 0..m.degree().unwrap_or(0).max(1) {
            frobenius.push(cur.clone());
            cur = ring.pow(&cur, q);
        }
        let count = units.len();
        let out = CarlitzRing {
            base_field,
            conductor: m,
            modulus: q_mod,
            t_image,
            ring,
            units,
            unit_lookup,
            prediction,
            frobenius,
            images: (0..count).map(|_| OnceLock::new()).collect(),
            columns: (0..count).map(|_| OnceLock::new()).collect(),
            perms: (0..count).map(|_| OnceLock::new()).collect(),
        };
        if count <= EAGER_TABLE_LIMIT {
            for g in 0..count {
                out.image_of_x(g);
            }
        }
        Ok(out)
    }

    pub fn base_field(&self) -> &Arc<FieldCtx> {
        &self.base_field
    }

    pub fn conductor(&self) -> &Poly {
        &self.conductor
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Image c of T in the residue field of Q.
    pub fn t_image(&self) -> FieldElem {
        self.t_image
    }

    pub fn units(&self) -> &[Poly] {
        &self.units
    }

    pub fn prediction(&self) -> SplitPrediction {
        self.prediction
    }

    /// (e, f, r, n).
    pub fn splitting(&self) -> (u64, u64, u64, usize) {
        (self.prediction.e, self.prediction.f, self.prediction.r, self.ring.degree())
    }

    /// Position of A mod M in the unit list.
    pub fn unit_index(&self, a: &Poly) -> Result<usize, CarlitzError> {
        if self.conductor.is_constant() {
            return Ok(0);
        }
        let reduced = a.rem(&self.conductor)?;
        self.unit_lookup.get(&reduced.index()).copied().ok_or(CarlitzError::NotAUnit)
    }

    /// [A](c, X) mod Φ_M(c, X) for the unit at position g.
    pub fn image_of_x(&self, g: usize) -> &RingElem {
        self.images[g].get_or_init(|| {
            let qp = carlitz_poly(&self.units[g]).expect("units are nonzero");
            let mut acc = self.ring.zero();
            for (i, c) in qp.coeffs().iter().enumerate() {
                let ci = specialize(c, self.ring.field(), self.t_image);
                acc = self.ring.add(&acc, &self.ring.scale(&self.frobenius[i], ci));
            }
            acc
        })
    }

    fn columns(&self, g: usize) -> &[RingElem] {
        self.columns[g].get_or_init(|| columns_from_image(&self.ring, self.image_of_x(g)))
    }

    /// σ_A(x) for a unit A given as a polynomial.
    pub fn galois_apply(&self, a: &Poly, x: &RingElem) -> Result<RingElem, CarlitzError> {
        Ok(self.apply(self.unit_index(a)?, x))
    }

    pub fn prime_permutation(&self, a: &Poly) -> Result<Vec<usize>, CarlitzError> {
        Ok(self.permutation(self.unit_index(a)?))
    }

    /// Decomposition group of component i, as unit polynomials.
    pub fn decomposition_units(&self, i: usize) -> Vec<Poly> {
        self.decomposition_group(i).into_iter().map(|g| self.units[g].clone()).collect()
    }

    pub fn descriptor(&self) -> CarlitzDescriptor {
        CarlitzDescriptor {
            q: self.base_field.order(),
            m: self.conductor.to_string(),
            q_mod: self.modulus.to_string(),
            c: format_elem(self.ring.field(), self.t_image),
            n: self.ring.degree(),
            e: self.prediction.e,
            f: self.prediction.f,
            r: self.prediction.r,
            phi_m_specialized: self.ring.modulus().to_string(),
            galois_order: self.units.len(),
        }
    }
}

impl GaloisAction for CarlitzRing {
    fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    fn group_order(&self) -> usize {
        self.units.len()
    }

    fn identity(&self) -> usize {
        self.unit_lookup.get(&1).copied().unwrap_or(0)
    }

    fn apply(&self, g: usize, x: &RingElem) -> RingElem {
        apply_columns(&self.ring, self.columns(g), x)
    }

    fn compose(&self, g: usize, h: usize) -> usize {
        if self.conductor.is_constant() {
            return 0;
        }
        let prod = (&self.units[g] * &self.units[h]).rem(&self.conductor).expect("nonzero conductor");
        self.unit_lookup[&prod.index()]
    }

    fn inverse(&self, g: usize) -> usize {
        if self.conductor.is_constant() {
            return g;
        }
        let inv = self.units[g].inv_mod(&self.conductor).expect("units are invertible");
        self.unit_lookup[&inv.index()]
    }

    fn permutation(&self, g: usize) -> Vec<usize> {
        self.perms[g].get_or_init(|| permutation_of_components(&self.ring, |x| self.apply(g, x))).clone()
    }

    fn label(&self, g: usize) -> String {
        self.units[g].to_string()
    }
}
