//! Categorical layer: conjugate objects, the compact structure carried by
//! the ambient *-algebras, the left-regular dagger, and the morphism
//! validators behind the CQM / RSE / URUE / InvQM distinctions.
//!
//! Everything here is phrased against the left-regular trace
//! `Tr(a) = tr(L_a)` (block `b` weighs its matrix trace by the block size)
//! and its inner product `⟨a, b⟩ = Tr(ab*)`, linear in the first slot.
//! The conjugate algebra is realized inside the original one through
//! entry-wise conjugation, which is a complex-linear *-isomorphism of the
//! abstract conjugate onto the same block algebra; tensor associativity is
//! then literal equality of flattened entries, so associators never appear
//! explicitly.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composites::canonical_tensor;
use crate::config::Config;
use crate::constructors::{build_spec, parse_spec, BuiltAlgebra, EmbeddingKind};
use crate::error::{Error, Result};
use crate::jordan_core::EjcAlgebra;
use crate::linalg::{rmat_from_rows, standard_normal, CMatrix, RealSubspace};
use crate::star_algebra::{
    tensor_algebras, tensor_elements, vec_entries, AlgElement, Involution, LinearMap, StarAlgebra,
};

/// Left-regular weight of each complex entry: the size of its block.
fn lr_weights(alg: &StarAlgebra) -> Vec<f64> {
    let mut w = Vec::with_capacity(alg.complex_dim());
    for &n in &alg.blocks {
        for _ in 0..n * n {
            w.push(n as f64);
        }
    }
    w
}

/// Orthonormal basis of the whole algebra for `⟨a, b⟩ = Tr(ab*)`.
///
/// The Hermitian basis is Frobenius-orthonormal and block-diagonal, and on
/// block `b` the left-regular inner product is `n_b` times the Frobenius
/// one, so scaling by `1/√n_b` orthonormalizes it. A real basis of the
/// Hermitian part with real pairwise inner products is automatically a
/// complex basis of the full algebra.
pub fn lr_orthonormal_basis(alg: &StarAlgebra) -> Vec<AlgElement> {
    let mut out = Vec::with_capacity(alg.herm_dim());
    let mut block = 0;
    let mut left = alg.blocks[0] * alg.blocks[0];
    for h in alg.hermitian_basis() {
        while left == 0 {
            block += 1;
            left = alg.blocks[block] * alg.blocks[block];
        }
        left -= 1;
        out.push(h.scale_re(1.0 / (alg.blocks[block] as f64).sqrt()));
    }
    out
}

/// `Σ_e e ⊗ ē` over the given left-regular-orthonormal basis, with `ē` the
/// entry-wise conjugate. Independent of the basis choice because the
/// second factor is conjugated.
pub fn compact_unit_from_basis(alg: &StarAlgebra, basis: &[AlgElement]) -> AlgElement {
    let tensor = tensor_algebras(alg, alg);
    let mut f = tensor.zero();
    for e in basis {
        f = f.add(&tensor_elements(e, &e.conj()));
    }
    f
}

/// A second left-regular-orthonormal basis: a random complex mix of the
/// canonical one, re-orthonormalized by modified Gram–Schmidt.
pub fn rotated_lr_basis(alg: &StarAlgebra, rng: &mut impl Rng) -> Vec<AlgElement> {
    let base = lr_orthonormal_basis(alg);
    let mut out: Vec<AlgElement> = Vec::with_capacity(base.len());
    for _ in 0..base.len() {
        let mut v = alg.zero();
        for e in &base {
            v = v.add(&e.scale(C64::new(standard_normal(rng), standard_normal(rng))));
        }
        for _ in 0..2 {
            for o in &out {
                let c = v.lr_inner(o);
                v = v.sub(&o.scale(c));
            }
        }
        // a random mix is degenerate only on a measure-zero set
        let n = v.lr_inner(&v).re.sqrt();
        out.push(v.scale_re(1.0 / n));
    }
    out
}

/// The compact structure of a *-algebra: the unit vector
/// `f = Σ_e e ⊗ ē ∈ M ⊗ M̄` and the counit `η(x) = ⟨x, f⟩`.
#[derive(Clone, Debug)]
pub struct CompactStructure {
    pub algebra: StarAlgebra,
    /// `M ⊗ M̄` under the conjugation model (blocks of `M` squared).
    pub tensor: StarAlgebra,
    /// Unit `f_M`.
    pub f: AlgElement,
    /// Unit of the conjugate object, `f_M̄ = Σ ē ⊗ e` in `M̄ ⊗ M`.
    pub f_bar: AlgElement,
}

impl CompactStructure {
    pub fn new(alg: &StarAlgebra) -> CompactStructure {
        let basis = lr_orthonormal_basis(alg);
        let tensor = tensor_algebras(alg, alg);
        let mut f = tensor.zero();
        let mut f_bar = tensor.zero();
        for e in &basis {
            f = f.add(&tensor_elements(e, &e.conj()));
            f_bar = f_bar.add(&tensor_elements(&e.conj(), e));
        }
        CompactStructure { algebra: alg.clone(), tensor, f, f_bar }
    }

    /// Counit `η(x) = ⟨x, f⟩ = Tr(x f*)`.
    pub fn eta(&self, x: &AlgElement) -> Result<C64> {
        if x.parent != self.tensor {
            return Err(Error::ParentMismatch);
        }
        Ok(x.lr_inner(&self.f))
    }

    /// `η` as a linear map into `M₁(ℂ)`.
    pub fn eta_map(&self) -> Result<LinearMap> {
        let scalars = StarAlgebra::new(vec![1])?;
        let w = lr_weights(&self.tensor);
        let fv = vec_entries(&self.f);
        let mat = CMatrix::from_fn(1, self.tensor.complex_dim(), |_, j| {
            fv[j].conj() * C64::new(w[j], 0.0)
        });
        LinearMap::from_matrix(&self.tensor, &scalars, mat)
    }

    /// Max deviation of `f` built from a random second orthonormal basis,
    /// relative to `‖f‖`.
    pub fn basis_independence_defect(&self, config: &Config) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xb0a5);
        let other = rotated_lr_basis(&self.algebra, &mut rng);
        let f2 = compact_unit_from_basis(&self.algebra, &other);
        f2.sub(&self.f).frob_norm() / self.f.frob_norm()
    }

    /// Smallest ambient eigenvalue of `f`.
    pub fn min_f_eigenvalue(&self, config: &Config) -> Result<f64> {
        let vals = self.f.eigenvalues(config.tol_herm)?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Evaluate both snake identities on random `(functional, element)`
    /// pairs and return the largest `|lhs − rhs|`.
    ///
    /// With functionals written as `α = ⟨·, w⟩`, the identity
    /// `(η ⊗ α)(a ⊗ f̄) = α(a)` becomes an inner product of a pure tensor
    /// in `M ⊗ (M̄ ⊗ M)` against one in `(M ⊗ M̄) ⊗ M` — the two sides are
    /// assembled with different bracketings, so the check exercises the
    /// (implicit, index-level) associator along with `f` itself.
    pub fn snake_check(&self, pairs: usize, config: &Config) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5aa6);
        let m = &self.algebra;
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let a = m.random_element(&mut rng);
            let w = m.random_element(&mut rng);
            // (η ⊗ α)(a ⊗ f̄) = α(a)
            let lhs = tensor_elements(&a, &self.f_bar).lr_inner(&tensor_elements(&self.f, &w));
            let rhs = a.lr_inner(&w);
            worst = worst.max((lhs - rhs).norm());
            // (ᾱ ⊗ η)(f̄ ⊗ ā) = ᾱ(ā), with ᾱ = ⟨·, v⟩ on the conjugate copy
            let y = m.random_element(&mut rng).conj();
            let v = m.random_element(&mut rng).conj();
            let lhs2 = tensor_elements(&self.f_bar, &y).lr_inner(&tensor_elements(&v, &self.f));
            let rhs2 = y.lr_inner(&v);
            worst = worst.max((lhs2 - rhs2).norm());
        }
        worst
    }

    /// `‖η† (1) − f‖ / ‖f‖` for the left-regular adjoint: zero exactly when
    /// the structure is dagger-compact.
    pub fn dagger_compact_defect(&self, config: &Config) -> Result<f64> {
        let eta = self.eta_map()?;
        let back = eta.lr_dagger();
        let one = back.source.unit();
        let _ = config;
        let img = back.apply(&one)?;
        Ok(img.sub(&self.f).frob_norm() / self.f.frob_norm())
    }
}

/// The conjugate EJC-algebra `(Ā, M̄)`: entry-wise conjugates of the
/// subspace, same ambient under the conjugation model.
pub fn conjugate_algebra(a: &EjcAlgebra, config: &Config) -> Result<EjcAlgebra> {
    let rows: Vec<Vec<f64>> = (0..a.dim())
        .map(|i| a.basis_element(i).value.conj().flatten_herm())
        .collect();
    // conjugation preserves Frobenius orthonormality on Hermitian elements
    let subspace = RealSubspace::from_orthonormal_rows(rmat_from_rows(&rows), config.tol_orth * 1e2)?;
    let unit = a.unit().value.conj();
    let label = a.label().map(|l| format!("conj({l})"));
    EjcAlgebra::with_unit(a.ambient().clone(), subspace, unit, label, config)
}

/// An involutive EJC-algebra: the subspace is exactly the Hermitian fixed
/// set of the involution.
#[derive(Clone, Debug)]
pub struct InvQmObject {
    pub algebra: EjcAlgebra,
    pub involution: Involution,
}

impl InvQmObject {
    pub fn new(algebra: EjcAlgebra, involution: Involution, config: &Config) -> Result<InvQmObject> {
        if involution.parent() != algebra.ambient() {
            return Err(Error::ParentMismatch);
        }
        let fixed = involution.fixed_hermitian_subspace(config)?;
        if fixed.dim() != algebra.dim()
            || algebra.subspace().max_residual_of(&fixed) > config.tol_member * 1e2
        {
            return Err(Error::NotInvolutiveObject);
        }
        Ok(InvQmObject { algebra, involution })
    }

    /// Promote a constructed algebra; it must carry its involution.
    pub fn from_built(built: &BuiltAlgebra, config: &Config) -> Result<InvQmObject> {
        let involution = built.involution.clone().ok_or(Error::NotInvolutiveObject)?;
        InvQmObject::new(built.algebra.clone(), involution, config)
    }

    pub fn conjugate(&self, config: &Config) -> Result<InvQmObject> {
        InvQmObject::new(
            conjugate_algebra(&self.algebra, config)?,
            self.involution.conjugate(config)?,
            config,
        )
    }

    /// Monoidal product: the fixed-point composite under `Φ_A ⊗ Φ_B`.
    pub fn tensor(&self, other: &InvQmObject, config: &Config) -> Result<InvQmObject> {
        let composite = crate::composites::fixed_point_composite(
            &self.algebra,
            &self.involution,
            &other.algebra,
            &other.involution,
            config,
        )?;
        let involution = Involution::tensor(&self.involution, &other.involution, config)?;
        InvQmObject::new(composite.algebra, involution, config)
    }
}

/// The involution as a complex-linear map (it is *-linear, so the
/// Hermitian images determine it).
pub fn involution_map(phi: &Involution) -> LinearMap {
    let alg = phi.parent();
    let images: Vec<AlgElement> = alg.hermitian_basis().iter().map(|h| phi.apply(h)).collect();
    LinearMap::from_hermitian_images(alg, alg, &images).expect("one image per basis vector")
}

/// `‖Φ_B ∘ φ − φ ∘ Φ_A‖_F` on the representing matrices.
pub fn intertwiner_defect(phi: &LinearMap, phi_a: &Involution, phi_b: &Involution) -> Result<f64> {
    if phi_a.parent() != &phi.source || phi_b.parent() != &phi.target {
        return Err(Error::ParentMismatch);
    }
    let lhs = involution_map(phi_b).compose(phi)?;
    let rhs = phi.compose(&involution_map(phi_a))?;
    Ok(lhs.mat.sub(&rhs.mat).frob_norm())
}

/// InvQM morphism test: completely positive and intertwining the
/// involutions. Errors only on malformed inputs; a non-*-linear map is
/// simply not a morphism.
pub fn is_invqm_morphism(
    phi: &LinearMap,
    a: &InvQmObject,
    b: &InvQmObject,
    config: &Config,
) -> Result<bool> {
    if &phi.source != a.algebra.ambient() || &phi.target != b.algebra.ambient() {
        return Err(Error::DimensionMismatch(
            "morphism endpoints must be the objects' ambient algebras".into(),
        ));
    }
    let cp = match phi.is_completely_positive(config) {
        Ok(v) => v,
        Err(Error::NotStarLinear { .. }) => false,
        Err(e) => return Err(e),
    };
    if !cp {
        return Ok(false);
    }
    let defect = intertwiner_defect(phi, &a.involution, &b.involution)?;
    Ok(defect <= config.tol_comm * (1.0 + phi.frob_norm()))
}

/// Random CP map intertwining the object's involution: a two-operator
/// Kraus map averaged with its `Φ`-conjugate (also CP — its Kraus
/// operators are the conjugated ones).
pub fn random_intertwiner(obj: &InvQmObject, rng: &mut impl Rng) -> Result<LinearMap> {
    let alg = obj.algebra.ambient();
    let k1 = alg.random_element(rng);
    let k2 = alg.random_element(rng);
    let images: Vec<AlgElement> = alg
        .hermitian_basis()
        .iter()
        .map(|h| {
            k1.mul(h).mul(&k1.adjoint()).add(&k2.mul(h).mul(&k2.adjoint())).scale_re(0.5)
        })
        .collect();
    let psi = LinearMap::from_hermitian_images(alg, alg, &images)?;
    let m = involution_map(&obj.involution);
    let flipped = m.compose(&psi)?.compose(&m)?;
    let mat = psi.mat.add(&flipped.mat).scale(C64::new(0.5, 0.0));
    LinearMap::from_matrix(alg, alg, mat)
}

/// Composition in InvQM is inherited from the underlying linear maps;
/// morphism-hood of the result is a theorem, verified in the suites.
pub fn invqm_compose(phi: &LinearMap, psi: &LinearMap) -> Result<LinearMap> {
    phi.compose(psi)
}

/// Monoidal product of morphisms.
pub fn invqm_tensor(phi: &LinearMap, psi: &LinearMap) -> LinearMap {
    phi.tensor(psi)
}

/// `φ(A) ⊆ B`, tested on the basis of `A`.
pub fn is_jordan_preserving(
    phi: &LinearMap,
    a: &EjcAlgebra,
    b: &EjcAlgebra,
    config: &Config,
) -> Result<bool> {
    if &phi.source != a.ambient() || &phi.target != b.ambient() {
        return Err(Error::DimensionMismatch(
            "morphism endpoints must be the ambient algebras".into(),
        ));
    }
    for i in 0..a.dim() {
        let img = phi.apply(&a.basis_element(i).value)?;
        let scale = 1.0 + img.frob_norm();
        if img.hermitian_defect() > config.tol_herm * scale {
            return Ok(false);
        }
        if b.subspace().residual(&img.hermitize().flatten_herm()) > config.tol_member * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One relative-CJP test object with its composites against both
/// endpoints.
pub struct RelCjpCase {
    pub label: String,
    pub test_object: EjcAlgebra,
    /// `A ⊙ C`.
    pub left: EjcAlgebra,
    /// `B ⊙ C`.
    pub right: EjcAlgebra,
}

/// Pre-built composites for testing several maps `A → B` against the same
/// test objects.
pub struct RelCjpTester {
    source: EjcAlgebra,
    target: EjcAlgebra,
    pub cases: Vec<RelCjpCase>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelCjpOutcome {
    pub holds: bool,
    pub test_objects: Vec<String>,
    /// Labels of the test objects that rejected the map.
    pub failures: Vec<String>,
    /// Worst relative subspace residual among basis images.
    pub membership_residual: f64,
    /// Smallest eigenvalue seen among images of sampled cone points.
    pub min_image_eigenvalue: f64,
}

impl RelCjpTester {
    pub fn new(
        a: &EjcAlgebra,
        b: &EjcAlgebra,
        test_objects: &[EjcAlgebra],
        config: &Config,
    ) -> Result<RelCjpTester> {
        let mut cases = Vec::with_capacity(test_objects.len());
        for (k, c) in test_objects.iter().enumerate() {
            let left = canonical_tensor(a, c, config)?.algebra;
            let right = canonical_tensor(b, c, config)?.algebra;
            let label = c.label().map_or_else(|| format!("test-{k}"), str::to_string);
            cases.push(RelCjpCase { label, test_object: c.clone(), left, right });
        }
        Ok(RelCjpTester { source: a.clone(), target: b.clone(), cases })
    }

    pub fn test(&self, phi: &LinearMap, config: &Config) -> Result<RelCjpOutcome> {
        if &phi.source != self.source.ambient() || &phi.target != self.target.ambient() {
            return Err(Error::DimensionMismatch(
                "map endpoints do not match the tester's objects".into(),
            ));
        }
        let mut worst_resid: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        let mut failures = Vec::new();
        for case in &self.cases {
            let big = phi.tensor(&LinearMap::identity(case.test_object.ambient()));
            let mut ok = true;
            for i in 0..case.left.dim() {
                let img = big.apply(&case.left.basis_element(i).value)?;
                let scale = 1.0 + img.frob_norm();
                if img.hermitian_defect() > config.tol_herm * scale {
                    ok = false;
                    continue;
                }
                let resid = case.right.subspace().residual(&img.hermitize().flatten_herm());
                worst_resid = worst_resid.max(resid / scale);
                if resid > config.tol_member * scale {
                    ok = false;
                }
            }
            // cone points: spectral projections of random elements are the
            // sharp (extremal) witnesses for k-positivity
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xcf01);
            for _ in 0..4 {
                let z = case.left.random_element(&mut rng);
                let Ok(dec) = case.left.spectral(&z, config) else { continue };
                for p in &dec.projections {
                    let img = big.apply(&p.value)?;
                    let scale = 1.0 + p.value.frob_norm();
                    if img.hermitian_defect() > config.tol_herm * scale {
                        ok = false;
                        continue;
                    }
                    let vals = img.hermitize().eigenvalues(config.tol_herm)?;
                    let lo = vals.into_iter().fold(f64::INFINITY, f64::min);
                    min_eig = min_eig.min(lo);
                    if lo < -config.tol_psd * scale * 1e2 {
                        ok = false;
                    }
                }
            }
            if !ok {
                failures.push(case.label.clone());
            }
        }
        Ok(RelCjpOutcome {
            holds: failures.is_empty(),
            test_objects: self.cases.iter().map(|c| c.label.clone()).collect(),
            failures,
            membership_residual: worst_resid,
            min_image_eigenvalue: min_eig,
        })
    }
}

/// One-shot relative-CJP check against a finite test set.
pub fn is_relatively_cjp(
    phi: &LinearMap,
    a: &EjcAlgebra,
    b: &EjcAlgebra,
    test_objects: &[EjcAlgebra],
    config: &Config,
) -> Result<RelCjpOutcome> {
    RelCjpTester::new(a, b, test_objects, config)?.test(phi, config)
}

/// Which category's default test objects to use for relative CJP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismCategory {
    Cqm,
    Rse,
    Urue,
    InvQm,
}

impl MorphismCategory {
    pub fn parse(s: &str) -> Result<MorphismCategory> {
        match s.to_ascii_lowercase().as_str() {
            "cqm" => Ok(MorphismCategory::Cqm),
            "rse" => Ok(MorphismCategory::Rse),
            "urue" => Ok(MorphismCategory::Urue),
            "invqm" => Ok(MorphismCategory::InvQm),
            _ => Err(Error::ParseError(format!(
                "unknown category '{s}' (expected cqm, rse, urue or invqm)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MorphismCategory::Cqm => "cqm",
            MorphismCategory::Rse => "rse",
            MorphismCategory::Urue => "urue",
            MorphismCategory::InvQm => "invqm",
        }
    }
}

/// Default finite test sets. The universal quantifier in the CJP
/// definition is not finitely checkable; these sets witness the known
/// counterexamples for each category.
pub fn default_test_objects(cat: MorphismCategory, config: &Config) -> Result<Vec<BuiltAlgebra>> {
    let specs: &[(&str, EmbeddingKind)] = match cat {
        MorphismCategory::Cqm => &[
            ("C1", EmbeddingKind::Standard),
            ("C2", EmbeddingKind::Standard),
            ("C3", EmbeddingKind::Standard),
        ],
        MorphismCategory::Rse => &[
            ("R2", EmbeddingKind::Standard),
            ("C2", EmbeddingKind::Standard),
            ("Q2", EmbeddingKind::Standard),
        ],
        MorphismCategory::Urue => {
            &[("R2", EmbeddingKind::Universal), ("C2", EmbeddingKind::Universal)]
        }
        MorphismCategory::InvQm => &[
            ("R2", EmbeddingKind::Universal),
            ("C2", EmbeddingKind::Universal),
            ("Q2", EmbeddingKind::Standard),
        ],
    };
    specs.iter().map(|(s, k)| build_spec(&parse_spec(s, *k)?, config)).collect()
}

/// Everything the validators can say about one map.
#[derive(Clone, Debug, Serialize)]
pub struct MorphismVerdict {
    pub jordan_preserving: bool,
    pub completely_positive: bool,
    /// Present when both endpoints carry involutions.
    pub intertwiner: Option<bool>,
    pub relatively_cjp: bool,
    pub test_objects: Vec<String>,
    pub failures: Vec<String>,
}

/// Run all applicable validators for `φ : A → B` with the category's
/// default test objects.
pub fn assess_morphism(
    phi: &LinearMap,
    a: &BuiltAlgebra,
    b: &BuiltAlgebra,
    category: MorphismCategory,
    config: &Config,
) -> Result<MorphismVerdict> {
    let jordan_preserving = is_jordan_preserving(phi, &a.algebra, &b.algebra, config)?;
    let completely_positive = match phi.is_completely_positive(config) {
        Ok(v) => v,
        Err(Error::NotStarLinear { .. }) => false,
        Err(e) => return Err(e),
    };
    let intertwiner = match (&a.involution, &b.involution) {
        (Some(pa), Some(pb)) => {
            Some(intertwiner_defect(phi, pa, pb)? <= config.tol_comm * (1.0 + phi.frob_norm()))
        }
        _ => None,
    };
    let tests = default_test_objects(category, config)?;
    let objects: Vec<EjcAlgebra> = tests.into_iter().map(|t| t.algebra).collect();
    let outcome = is_relatively_cjp(phi, &a.algebra, &b.algebra, &objects, config)?;
    Ok(MorphismVerdict {
        jordan_preserving,
        completely_positive,
        intertwiner,
        relatively_cjp: outcome.holds,
        test_objects: outcome.test_objects,
        failures: outcome.failures,
    })
}

/// The block swap `x ⊕ y ↦ y ⊕ x` on a two-block algebra with equal
/// blocks (a *-isomorphism).
pub fn summand_swap(alg: &StarAlgebra) -> Result<LinearMap> {
    if alg.num_blocks() != 2 || alg.blocks[0] != alg.blocks[1] {
        return Err(Error::InvalidSpec("summand swap needs two equal blocks".into()));
    }
    let images: Vec<AlgElement> = alg
        .hermitian_basis()
        .iter()
        .map(|h| {
            let mut s = alg.zero();
            s.blocks[0] = h.blocks[1].clone();
            s.blocks[1] = h.blocks[0].clone();
            s
        })
        .collect();
    LinearMap::from_hermitian_images(alg, alg, &images)
}

/// The functional `x ↦ tr(xρ)` into `M₁(ℂ)`; a state when `ρ` is a
/// density matrix.
pub fn state_functional(alg: &StarAlgebra, rho: &AlgElement) -> Result<LinearMap> {
    if &rho.parent != alg {
        return Err(Error::ParentMismatch);
    }
    let scalars = StarAlgebra::new(vec![1])?;
    let images: Vec<AlgElement> = alg
        .hermitian_basis()
        .iter()
        .map(|h| {
            let mut o = scalars.zero();
            o.blocks[0].set(0, 0, h.mul(rho).trace());
            o
        })
        .collect();
    LinearMap::from_hermitian_images(alg, &scalars, &images)
}

/// The ambient form of the quadratic map: `x ↦ a x a` for Hermitian `a`.
pub fn u_map(a: &AlgElement) -> Result<LinearMap> {
    a.check_hermitian(1e-10)?;
    let alg = &a.parent;
    let images: Vec<AlgElement> =
        alg.hermitian_basis().iter().map(|h| a.mul(h).mul(a)).collect();
    LinearMap::from_hermitian_images(alg, alg, &images)
}

/// JSON form of a linear map for the CLI: block sizes plus the dense
/// matrix on flattened entries, `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearMapJson {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl LinearMapJson {
    pub fn from_map(map: &LinearMap) -> LinearMapJson {
        let rows = (0..map.mat.nrows())
            .map(|i| {
                (0..map.mat.ncols())
                    .map(|j| {
                        let v = map.mat.get(i, j);
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect();
        LinearMapJson {
            source: map.source.blocks.clone(),
            target: map.target.blocks.clone(),
            matrix: rows,
        }
    }

    pub fn to_map(&self) -> Result<LinearMap> {
        let source = StarAlgebra::new(self.source.clone())?;
        let target = StarAlgebra::new(self.target.clone())?;
        if self.matrix.len() != target.complex_dim()
            || self.matrix.iter().any(|r| r.len() != source.complex_dim())
        {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be {}×{} for these blocks",
                target.complex_dim(),
                source.complex_dim()
            )));
        }
        let mat = CMatrix::from_fn(target.complex_dim(), source.complex_dim(), |i, j| {
            C64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        LinearMap::from_matrix(&source, &target, mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build, Family, SimpleSpec};

    fn cfg() -> Config {
        Config::default()
    }

    fn built(spec: &str, kind: EmbeddingKind) -> BuiltAlgebra {
        build_spec(&parse_spec(spec, kind).unwrap(), &cfg()).unwrap()
    }

    #[test]
    fn compact_unit_is_basis_independent() {
        for blocks in [vec![2], vec![2, 1], vec![3]] {
            let alg = StarAlgebra::new(blocks).unwrap();
            let cs = CompactStructure::new(&alg);
            assert!(cs.basis_independence_defect(&cfg()) < 1e-12);
        }
    }

    #[test]
    fn compact_unit_of_scalars_is_one_tensor_one() {
        let alg = StarAlgebra::new(vec![1]).unwrap();
        let cs = CompactStructure::new(&alg);
        assert!(cs.f.sub(&cs.tensor.unit()).frob_norm() < 1e-14);
        assert_eq!(cs.snake_check(10, &cfg()), 0.0);
    }

    #[test]
    fn snake_identities_hold() {
        for blocks in [vec![2], vec![3], vec![2, 1], vec![2, 2]] {
            let alg = StarAlgebra::new(blocks.clone()).unwrap();
            let cs = CompactStructure::new(&alg);
            let worst = cs.snake_check(50, &cfg());
            assert!(worst < 1e-10, "blocks {blocks:?}: residual {worst:.3e}");
        }
    }

    #[test]
    fn f_is_positive_and_eta_dagger_gives_f() {
        for blocks in [vec![2], vec![2, 1], vec![3]] {
            let alg = StarAlgebra::new(blocks).unwrap();
            let cs = CompactStructure::new(&alg);
            assert!(cs.min_f_eigenvalue(&cfg()).unwrap() > -1e-10);
            assert!(cs.dagger_compact_defect(&cfg()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn eta_of_pure_tensor_is_the_trace_pairing() {
        let alg = StarAlgebra::new(vec![2, 1]).unwrap();
        let cs = CompactStructure::new(&alg);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = alg.random_element(&mut rng);
            let b = alg.random_element(&mut rng);
            let got = cs.eta(&tensor_elements(&a, &b.conj())).unwrap();
            let want = a.lr_inner(&b);
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn compact_unit_lies_in_composite_with_conjugate() {
        // involutive objects: f_A ∈ A ⊙ Ā
        for (spec, kind) in [("R2", EmbeddingKind::Standard), ("C2", EmbeddingKind::Universal)] {
            let a = built(spec, kind);
            let conj = conjugate_algebra(&a.algebra, &cfg()).unwrap();
            let comp = canonical_tensor(&a.algebra, &conj, &cfg()).unwrap();
            let cs = CompactStructure::new(a.algebra.ambient());
            assert!(
                comp.algebra.contains_value(&cs.f, &cfg()),
                "{spec}: f escapes A ⊙ Ā"
            );
        }
    }

    #[test]
    fn eta_is_an_invqm_morphism_on_the_conjugate_composite() {
        let a = InvQmObject::from_built(&built("R2", EmbeddingKind::Standard), &cfg()).unwrap();
        let bar = a.conjugate(&cfg()).unwrap();
        let pair = a.tensor(&bar, &cfg()).unwrap();
        let cs = CompactStructure::new(a.algebra.ambient());
        let eta = cs.eta_map().unwrap();
        let scalars = StarAlgebra::new(vec![1]).unwrap();
        let unit_obj = InvQmObject::new(
            EjcAlgebra::new(
                scalars.clone(),
                RealSubspace::span(&[vec![1.0]], cfg().tol_rank).unwrap(),
                Some("R1".into()),
                &cfg(),
            )
            .unwrap(),
            Involution::identity(&scalars, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap();
        assert!(is_invqm_morphism(&eta, &pair, &unit_obj, &cfg()).unwrap());
    }

    #[test]
    fn conjugate_algebra_is_closed() {
        let a = built("Q2", EmbeddingKind::Standard);
        let conj = conjugate_algebra(&a.algebra, &cfg()).unwrap();
        assert_eq!(conj.dim(), 6);
        conj.validate_closed(&cfg()).unwrap();
    }

    #[test]
    fn involution_map_matches_apply() {
        let cfg = cfg();
        let alg = StarAlgebra::new(vec![2, 2]).unwrap();
        let phi = Involution::swap_transpose(&alg, &cfg).unwrap();
        let m = involution_map(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let x = alg.random_element(&mut rng);
            let d = m.apply(&x).unwrap().sub(&phi.apply(&x)).frob_norm();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        let alg = StarAlgebra::new(vec![2]).unwrap();
        let t = involution_map(&Involution::transpose(&alg, &cfg()).unwrap());
        assert!(!t.is_completely_positive(&cfg()).unwrap());
    }

    #[test]
    fn summand_swap_is_invqm_and_acts_as_transpose() {
        let cfg = cfg();
        let obj = InvQmObject::from_built(&built("C2", EmbeddingKind::Universal), &cfg).unwrap();
        let swap = summand_swap(obj.algebra.ambient()).unwrap();
        assert!(is_invqm_morphism(&swap, &obj, &obj, &cfg).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..6 {
            let x = obj.algebra.random_element(&mut rng);
            let y = swap.apply(&x.value).unwrap();
            assert!(obj.algebra.contains_value(&y, &cfg));
            let d = y.blocks[0].sub(&x.value.blocks[0].transpose()).frob_norm();
            assert!(d < 1e-10, "swap is not the transpose on the embedded factor");
        }
    }

    #[test]
    fn state_functional_fails_relcjp_exactly_against_r2() {
        let cfg = cfg();
        let c2 = built("C2", EmbeddingKind::Standard);
        let r1 = built("R1", EmbeddingKind::Standard);
        let alg = c2.algebra.ambient();
        let mut rho = alg.zero();
        rho.blocks[0].set(0, 0, C64::new(0.6, 0.0));
        rho.blocks[0].set(1, 1, C64::new(0.4, 0.0));
        let omega = state_functional(alg, &rho).unwrap();
        assert!(is_jordan_preserving(&omega, &c2.algebra, &r1.algebra, &cfg).unwrap());
        let pass = is_relatively_cjp(
            &omega,
            &c2.algebra,
            &r1.algebra,
            &[built("C2", EmbeddingKind::Standard).algebra],
            &cfg,
        )
        .unwrap();
        assert!(pass.holds, "the C2 test should accept a state functional");
        let fail = is_relatively_cjp(
            &omega,
            &c2.algebra,
            &r1.algebra,
            &[built("R2", EmbeddingKind::Standard).algebra],
            &cfg,
        )
        .unwrap();
        assert!(!fail.holds, "the R2 test must reject a state functional");
        assert_eq!(fail.failures, vec!["R2@std".to_string()]);
    }

    #[test]
    fn u_map_is_a_morphism() {
        let cfg = cfg();
        let q2 = built("Q2", EmbeddingKind::Standard);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = q2.algebra.random_element(&mut rng);
        let u = u_map(&a.value).unwrap();
        assert!(is_jordan_preserving(&u, &q2.algebra, &q2.algebra, &cfg).unwrap());
        assert!(u.is_completely_positive(&cfg).unwrap());
        let outcome = is_relatively_cjp(
            &u,
            &q2.algebra,
            &q2.algebra,
            &[
                built("R2", EmbeddingKind::Standard).algebra,
                built("C2", EmbeddingKind::Standard).algebra,
            ],
            &cfg,
        )
        .unwrap();
        assert!(outcome.holds, "failures: {:?}", outcome.failures);
    }

    #[test]
    fn star_homomorphism_passes_all_rse_tests() {
        let cfg = cfg();
        let c2 = built("C2", EmbeddingKind::Standard);
        let double = crate::constructors::direct_sum_ejc(&c2.algebra, &c2.algebra, &cfg).unwrap();
        let src = c2.algebra.ambient();
        let dst = double.ambient();
        let images: Vec<AlgElement> = src
            .hermitian_basis()
            .iter()
            .map(|h| crate::star_algebra::direct_sum_elements(h, h))
            .collect();
        let hom = LinearMap::from_hermitian_images(src, dst, &images).unwrap();
        assert!(is_jordan_preserving(&hom, &c2.algebra, &double, &cfg).unwrap());
        let tests = default_test_objects(MorphismCategory::Rse, &cfg).unwrap();
        let objects: Vec<EjcAlgebra> = tests.into_iter().map(|t| t.algebra).collect();
        let outcome = is_relatively_cjp(&hom, &c2.algebra, &double, &objects, &cfg).unwrap();
        assert!(outcome.holds, "failures: {:?}", outcome.failures);
    }

    #[test]
    fn cqm_equivalence_relcjp_equals_cp() {
        let cfg = cfg();
        let c2 = built("C2", EmbeddingKind::Standard);
        let tests = default_test_objects(MorphismCategory::Cqm, &cfg).unwrap();
        let objects: Vec<EjcAlgebra> = tests.into_iter().map(|t| t.algebra).collect();
        let tester = RelCjpTester::new(&c2.algebra, &c2.algebra, &objects, &cfg).unwrap();
        let alg = c2.algebra.ambient();
        let basis = alg.hermitian_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc9e0);
        let mut agreements = 0;
        for t in 0..10 {
            let phi = if t % 2 == 0 {
                // Kraus map: CP by construction
                let k = alg.random_element(&mut rng);
                let images: Vec<AlgElement> =
                    basis.iter().map(|h| k.mul(h).mul(&k.adjoint())).collect();
                LinearMap::from_hermitian_images(alg, alg, &images).unwrap()
            } else {
                // random *-preserving map: generically not CP
                let images: Vec<AlgElement> = basis
                    .iter()
                    .map(|_| alg.random_element(&mut rng).hermitize())
                    .collect();
                LinearMap::from_hermitian_images(alg, alg, &images).unwrap()
            };
            let cp = phi.is_completely_positive(&cfg).unwrap();
            let rel = tester.test(&phi, &cfg).unwrap();
            assert_eq!(cp, rel.holds, "map {t}: CP {cp} but relCJP {}", rel.holds);
            agreements += 1;
        }
        assert_eq!(agreements, 10);
    }

    #[test]
    fn intertwiners_are_relatively_cjp() {
        let cfg = cfg();
        let obj = InvQmObject::from_built(&built("C2", EmbeddingKind::Universal), &cfg).unwrap();
        let tests = default_test_objects(MorphismCategory::InvQm, &cfg).unwrap();
        let objects: Vec<EjcAlgebra> = tests.into_iter().map(|t| t.algebra).collect();
        let tester = RelCjpTester::new(&obj.algebra, &obj.algebra, &objects, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1e77);
        for t in 0..5 {
            let phi = random_intertwiner(&obj, &mut rng).unwrap();
            assert!(is_invqm_morphism(&phi, &obj, &obj, &cfg).unwrap(), "draw {t} not InvQM");
            let outcome = tester.test(&phi, &cfg).unwrap();
            assert!(outcome.holds, "draw {t} failed: {:?}", outcome.failures);
        }
    }

    #[test]
    fn dagger_is_involutive_and_monoidal() {
        let a = StarAlgebra::new(vec![2]).unwrap();
        let b = StarAlgebra::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let phi = LinearMap::from_matrix(
                &a,
                &b,
                CMatrix::from_fn(b.complex_dim(), a.complex_dim(), |_, _| {
                    C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
                }),
            )
            .unwrap();
            let psi = LinearMap::from_matrix(
                &b,
                &a,
                CMatrix::from_fn(a.complex_dim(), b.complex_dim(), |_, _| {
                    C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
                }),
            )
            .unwrap();
            let dd = phi.lr_dagger().lr_dagger();
            assert!(dd.mat.sub(&phi.mat).frob_norm() < 1e-10 * (1.0 + phi.mat.frob_norm()));
            let lhs = phi.tensor(&psi).lr_dagger();
            let rhs = phi.lr_dagger().tensor(&psi.lr_dagger());
            assert!(lhs.mat.sub(&rhs.mat).frob_norm() < 1e-9 * (1.0 + lhs.mat.frob_norm()));
        }
    }

    #[test]
    fn dagger_of_intertwiner_intertwines() {
        let cfg = cfg();
        let obj = InvQmObject::from_built(&built("C2", EmbeddingKind::Universal), &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let phi = random_intertwiner(&obj, &mut rng).unwrap();
        let defect = intertwiner_defect(&phi.lr_dagger(), &obj.involution, &obj.involution).unwrap();
        assert!(defect < 1e-9 * (1.0 + phi.frob_norm()));
    }

    #[test]
    fn invqm_closed_under_compose_and_tensor() {
        let cfg = cfg();
        let obj = InvQmObject::from_built(&built("R2", EmbeddingKind::Universal), &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let phi = random_intertwiner(&obj, &mut rng).unwrap();
        let psi = random_intertwiner(&obj, &mut rng).unwrap();
        let comp = invqm_compose(&phi, &psi).unwrap();
        assert!(is_invqm_morphism(&comp, &obj, &obj, &cfg).unwrap());
        let pair = obj.tensor(&obj, &cfg).unwrap();
        let prod = invqm_tensor(&phi, &psi);
        assert!(is_invqm_morphism(&prod, &pair, &pair, &cfg).unwrap());
    }

    #[test]
    fn swap_tensor_swap_fixes_the_classical_bit() {
        let cfg = cfg();
        let obj = InvQmObject::from_built(&built("C2", EmbeddingKind::Universal), &cfg).unwrap();
        let pair = obj.tensor(&obj, &cfg).unwrap();
        let report = crate::classify::classify(&pair.algebra, &cfg).unwrap();
        assert_eq!(report.canonical_label, "C4 ⊕ C4");
        let swap = summand_swap(obj.algebra.ambient()).unwrap();
        let both = invqm_tensor(&swap, &swap);
        assert!(is_invqm_morphism(&both, &pair, &pair, &cfg).unwrap());
        for c in &report.central_idempotents {
            let moved = both.apply(&c.value).unwrap();
            let d = moved.sub(&c.value).frob_norm();
            assert!(d < 1e-8, "central idempotent moved by {d:.3e}");
        }
    }

    #[test]
    fn linear_map_json_round_trips() {
        let a = StarAlgebra::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = LinearMap::from_matrix(
            &a,
            &a,
            CMatrix::from_fn(a.complex_dim(), a.complex_dim(), |_, _| {
                C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
            }),
        )
        .unwrap();
        let json = serde_json::to_string(&LinearMapJson::from_map(&phi)).unwrap();
        let back: LinearMapJson = serde_json::from_str(&json).unwrap();
        let phi2 = back.to_map().unwrap();
        assert!(phi2.mat.sub(&phi.mat).frob_norm() < 1e-12);
    }

    #[test]
    fn verdict_collects_the_expected_flags() {
        let cfg = cfg();
        let q2 = build(&SimpleSpec::new(Family::Q, 2).unwrap(), EmbeddingKind::Standard, &cfg)
            .unwrap();
        let ident = LinearMap::identity(q2.algebra.ambient());
        let verdict =
            assess_morphism(&ident, &q2, &q2, MorphismCategory::Rse, &cfg).unwrap();
        assert!(verdict.jordan_preserving);
        assert!(verdict.completely_positive);
        assert_eq!(verdict.intertwiner, Some(true));
        assert!(verdict.relatively_cjp);
        assert_eq!(verdict.test_objects.len(), 3);
    }
}
