//! Composites of embedded Jordan algebras: the canonical tensor product
//! `A ⊙ B` as the Jordan closure of pure tensors, the fixed-point route
//! through a tensor involution, universal composites of spec-described
//! factors, and the randomized axiom battery that certifies a composite.

use faer::complex_native::c64;
use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::constructors::{build_spec, EmbeddingKind, ParsedSpec};
use crate::error::{Error, Result};
use crate::jordan_core::{AutoTag, EjcAlgebra, JordanElement, OrderAutomorphism};
use crate::linalg::{rmat_from_rows, rmat_inverse, RealSubspace, SQRT_2};
use crate::star_algebra::{tensor_algebras, tensor_elements, AlgElement, Involution, StarAlgebra};

/// How a composite subspace was obtained.
#[derive(Clone, Debug)]
pub enum Provenance {
    Closure,
    FixedPoint(Involution),
}

/// A composite `A ⊙ B` inside the tensor ambient, remembering its factors.
#[derive(Clone, Debug)]
pub struct CompositeResult {
    pub left: EjcAlgebra,
    pub right: EjcAlgebra,
    pub algebra: EjcAlgebra,
    pub provenance: Provenance,
    pub iterations: usize,
}

impl CompositeResult {
    /// Pure tensor `a ⊗ b` as an element of the composite.
    pub fn embed(
        &self,
        a: &JordanElement,
        b: &JordanElement,
        config: &Config,
    ) -> Result<JordanElement> {
        if !a.parent.same_algebra(&self.left) || !b.parent.same_algebra(&self.right) {
            return Err(Error::ParentMismatch);
        }
        self.algebra
            .element_from_value(tensor_elements(&a.value, &b.value), config)
    }
}

/// Rows of basis values stacked per block for bulk products.
struct BlockStack {
    per_block: Vec<Mat<c64>>,
    sizes: Vec<usize>,
}

impl BlockStack {
    fn new(values: &[AlgElement], sizes: &[usize]) -> BlockStack {
        let count = values.len();
        let per_block = sizes
            .iter()
            .enumerate()
            .map(|(b, &m)| {
                Mat::from_fn(count * m, m, |r, c| {
                    let v = values[r / m].blocks[b].get(r % m, c);
                    c64::new(v.re, v.im)
                })
            })
            .collect();
        BlockStack { per_block, sizes: sizes.to_vec() }
    }

    /// Per-block products `S_b · e_b`: row band `s` of the result is
    /// `values[s] · e` in that block.
    fn mul_right(&self, e: &AlgElement) -> Vec<Mat<c64>> {
        self.per_block
            .iter()
            .enumerate()
            .map(|(b, s)| {
                let eb = e.blocks[b].to_faer();
                s * &eb
            })
            .collect()
    }

    /// Flatten the Jordan product `½(e_s e_j + e_j e_s)` from the product
    /// bands, using that `e_j e_s = (e_s e_j)*` for Hermitian factors.
    fn jordan_flat(&self, bands: &[Mat<c64>], s: usize, out: &mut Vec<f64>) {
        out.clear();
        for (b, &m) in self.sizes.iter().enumerate() {
            let p = &bands[b];
            let base = s * m;
            for r in 0..m {
                for c in r..m {
                    let re = 0.5 * (p[(base + r, c)].re + p[(base + c, r)].re);
                    out.push(if r == c { re } else { re * SQRT_2 });
                }
            }
            for r in 0..m {
                for c in (r + 1)..m {
                    let im = 0.5 * (p[(base + r, c)].im - p[(base + c, r)].im);
                    out.push(im * SQRT_2);
                }
            }
        }
        debug_assert_eq!(out.len(), self.count_flat_len());
    }

    fn count_flat_len(&self) -> usize {
        self.sizes.iter().map(|&m| m * m).sum()
    }
}

/// Outcome of a closure run.
pub struct ClosureOutcome {
    pub subspace: RealSubspace,
    pub iterations: usize,
}

const CLOSURE_CHUNK: usize = 4096;
/// Explicit post-hoc all-pairs verification is run when the pair count is
/// at most this; above it the round structure already covers every pair
/// (each unordered pair is membership-tested, against a subspace contained
/// in the final one, in the round where its later element entered).
const VERIFY_PAIR_LIMIT: usize = 65536;

/// Smallest Jordan-closed subspace of the ambient Hermitian part containing
/// the generators and the unit.
///
/// Breadth-first rounds: each round forms the Jordan products of the
/// directions added last round with everything present, in chunks, and
/// extends the span by whatever escapes. Bilinearity makes new×all per
/// round equivalent to the all-pairs iteration.
pub fn jordan_closure(
    ambient: &StarAlgebra,
    generators: &[AlgElement],
    config: &Config,
) -> Result<ClosureOutcome> {
    let n_flat = ambient.herm_dim();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(generators.len() + 1);
    rows.push(ambient.unit().flatten_herm());
    for g in rows_check(ambient, generators, config)? {
        rows.push(g);
    }
    let mut sub = RealSubspace::span(&rows, config.tol_rank)?;
    let mut values: Vec<AlgElement> = (0..sub.dim())
        .map(|i| ambient.unflatten_herm(&sub.basis_row(i)))
        .collect();

    let mut new_start = 0usize;
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > n_flat + 2 {
            return Err(Error::NoConvergence);
        }
        let k0 = values.len();
        let stack = BlockStack::new(&values[new_start..k0], &ambient.blocks);
        let mut chunk: Vec<Vec<f64>> = Vec::new();
        let mut scratch: Vec<f64> = Vec::with_capacity(n_flat);
        for j in 0..k0 {
            let bands = stack.mul_right(&values[j]);
            for i in j.max(new_start)..k0 {
                stack.jordan_flat(&bands, i - new_start, &mut scratch);
                chunk.push(scratch.clone());
                if chunk.len() == CLOSURE_CHUNK {
                    sub.extend_with_rows(&rmat_from_rows(&chunk), config.tol_rank, config.tol_member);
                    chunk.clear();
                }
            }
        }
        if !chunk.is_empty() {
            sub.extend_with_rows(&rmat_from_rows(&chunk), config.tol_rank, config.tol_member);
        }
        let k1 = sub.dim();
        if k1 > n_flat {
            return Err(Error::NoConvergence);
        }
        if k1 == k0 {
            break;
        }
        for i in k0..k1 {
            values.push(ambient.unflatten_herm(&sub.basis_row(i)));
        }
        new_start = k0;
    }

    let k = values.len();
    if k * (k + 1) / 2 <= VERIFY_PAIR_LIMIT {
        let stack = BlockStack::new(&values, &ambient.blocks);
        let mut worst: f64 = 0.0;
        let mut chunk: Vec<Vec<f64>> = Vec::new();
        let mut scratch: Vec<f64> = Vec::with_capacity(n_flat);
        for j in 0..k {
            let bands = stack.mul_right(&values[j]);
            for i in j..k {
                stack.jordan_flat(&bands, i, &mut scratch);
                chunk.push(scratch.clone());
                if chunk.len() == CLOSURE_CHUNK {
                    worst = worst.max(sub.max_relative_residual(&rmat_from_rows(&chunk)));
                    chunk.clear();
                }
            }
        }
        if !chunk.is_empty() {
            worst = worst.max(sub.max_relative_residual(&rmat_from_rows(&chunk)));
        }
        if worst > config.tol_member {
            return Err(Error::ClosureViolation { residual: worst });
        }
    }
    Ok(ClosureOutcome { subspace: sub, iterations })
}

fn rows_check(
    ambient: &StarAlgebra,
    generators: &[AlgElement],
    config: &Config,
) -> Result<Vec<Vec<f64>>> {
    if generators.is_empty() {
        return Err(Error::EmptyInput("jordan_closure needs generators"));
    }
    let mut out = Vec::with_capacity(generators.len());
    for g in generators {
        if g.parent != *ambient {
            return Err(Error::ParentMismatch);
        }
        let defect = g.hermitian_defect();
        if defect > config.tol_herm * (1.0 + g.frob_norm()) {
            return Err(Error::NotHermitian { defect });
        }
        out.push(g.flatten_herm());
    }
    Ok(out)
}

fn guardrail(ambient: &StarAlgebra, config: &Config) -> Result<()> {
    let dim = ambient.herm_dim();
    if dim > config.guardrail_dim && !config.force {
        return Err(Error::GuardrailExceeded { dim, limit: config.guardrail_dim });
    }
    Ok(())
}

fn composite_label(a: &EjcAlgebra, b: &EjcAlgebra) -> Option<String> {
    match (a.label(), b.label()) {
        (Some(x), Some(y)) => Some(format!("{x}⊙{y}")),
        _ => None,
    }
}

/// The generating set kept on composite algebras: `e_i ⊗ u_B` and
/// `u_A ⊗ f_j`. Their pairwise products recover all pure tensors, so this
/// set Jordan-generates the composite at dim A + dim B size.
fn marginal_generators(a: &EjcAlgebra, b: &EjcAlgebra) -> Vec<AlgElement> {
    let ua = a.unit().value;
    let ub = b.unit().value;
    let mut gens = Vec::with_capacity(a.dim() + b.dim());
    for i in 0..a.dim() {
        gens.push(tensor_elements(&a.basis_element(i).value, &ub));
    }
    for j in 0..b.dim() {
        gens.push(tensor_elements(&ua, &b.basis_element(j).value));
    }
    gens
}

/// Canonical tensor product: the Jordan subalgebra of the tensor ambient
/// generated by all pure tensors of basis elements.
pub fn canonical_tensor(
    a: &EjcAlgebra,
    b: &EjcAlgebra,
    config: &Config,
) -> Result<CompositeResult> {
    let ambient = tensor_algebras(a.ambient(), b.ambient());
    guardrail(&ambient, config)?;
    let mut gens = Vec::with_capacity(a.dim() * b.dim());
    for i in 0..a.dim() {
        let av = a.basis_element(i).value;
        for j in 0..b.dim() {
            gens.push(tensor_elements(&av, &b.basis_element(j).value));
        }
    }
    let out = jordan_closure(&ambient, &gens, config)?;
    let algebra = EjcAlgebra::with_generators(
        ambient,
        out.subspace,
        composite_label(a, b),
        marginal_generators(a, b),
        config,
    )?;
    Ok(CompositeResult {
        left: a.clone(),
        right: b.clone(),
        algebra,
        provenance: Provenance::Closure,
        iterations: out.iterations,
    })
}

/// Fixed-point composite: the Hermitian fixed points of `Φ_A ⊗ Φ_B`.
///
/// Both involutions must fix their factor pointwise. The result is
/// verified against a closure run (the fixed subspace of a *-involution is
/// Jordan-closed, but minimality is a theorem about the inputs, not a
/// property of the construction, so it is checked rather than assumed).
pub fn fixed_point_composite(
    a: &EjcAlgebra,
    phi_a: &Involution,
    b: &EjcAlgebra,
    phi_b: &Involution,
    config: &Config,
) -> Result<CompositeResult> {
    for (alg, phi) in [(a, phi_a), (b, phi_b)] {
        for i in 0..alg.dim() {
            let v = alg.basis_element(i).value;
            let moved = phi.apply(&v);
            let residual = moved.sub(&v).frob_norm();
            if residual > config.tol_member * (1.0 + v.frob_norm()) {
                return Err(Error::InvolutionDoesNotFix { residual });
            }
        }
    }
    let ambient = tensor_algebras(a.ambient(), b.ambient());
    guardrail(&ambient, config)?;
    let big = Involution::tensor(phi_a, phi_b, config)?;
    let fixed = big.fixed_hermitian_subspace(config)?;

    let closure = canonical_tensor(a, b, config)?;
    let worst = fixed
        .max_residual_of(closure.algebra.subspace())
        .max(closure.algebra.subspace().max_residual_of(&fixed));
    if fixed.dim() != closure.algebra.dim() || worst > config.tol_member * 1e2 {
        return Err(Error::ClosureViolation { residual: worst });
    }
    let algebra = EjcAlgebra::with_generators(
        ambient,
        fixed,
        composite_label(a, b),
        marginal_generators(a, b),
        config,
    )?;
    Ok(CompositeResult {
        left: a.clone(),
        right: b.clone(),
        algebra,
        provenance: Provenance::FixedPoint(big),
        iterations: closure.iterations,
    })
}

/// Universal tensor product of two spec-described algebras: both factors
/// are built at the universal embedding regardless of spec suffixes, then
/// composed canonically.
pub fn universal_tensor(
    a_spec: &ParsedSpec,
    b_spec: &ParsedSpec,
    config: &Config,
) -> Result<CompositeResult> {
    let force = |p: &ParsedSpec| ParsedSpec {
        terms: p.terms.iter().map(|(s, _)| (*s, EmbeddingKind::Universal)).collect(),
    };
    let a = build_spec(&force(a_spec), config)?;
    let b = build_spec(&force(b_spec), config)?;
    canonical_tensor(&a.algebra, &b.algebra, config)
}

/// One named check in the axiom battery.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
}

/// Result of [`composite_axiom_suite`].
#[derive(Clone, Debug, Serialize)]
pub struct CompositeAxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub locally_tomographic: bool,
    pub samples: usize,
}

impl CompositeAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Randomized battery over the composite axioms: unit condition, pure
/// tensor membership, sampled closure, positivity of product elements,
/// product states with factorizing marginals, product projections, the
/// inner-product factorization, operator commutation of the two marginal
/// multiplications, the left-factor action identity, and the quadratic
/// action on pure tensors. All residuals are relative.
pub fn composite_axiom_suite(
    c: &CompositeResult,
    a: &EjcAlgebra,
    b: &EjcAlgebra,
    samples: usize,
    tol: f64,
    config: &Config,
) -> Result<CompositeAxiomReport> {
    if !a.same_algebra(&c.left) || !b.same_algebra(&c.right) {
        return Err(Error::ParentMismatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0a51);
    let sub = c.algebra.subspace();
    let ua = a.unit().value;
    let ub = b.unit().value;
    let mut checks = Vec::new();
    let rel = |resid: f64, scale: f64| resid / (1.0 + scale);

    // Def. 2.1(b): the composite unit is the tensor of the factor units.
    let unit_resid = tensor_elements(&ua, &ub).sub(&c.algebra.unit().value).frob_norm();
    push(&mut checks, "unit_condition", rel(unit_resid, 1.0), tol);

    // Def. 4.1(c), half of it: every pure tensor lies in the composite.
    let mut worst = 0.0f64;
    let mut chunk: Vec<Vec<f64>> = Vec::new();
    for i in 0..a.dim() {
        let av = a.basis_element(i).value;
        for j in 0..b.dim() {
            chunk.push(tensor_elements(&av, &b.basis_element(j).value).flatten_herm());
            if chunk.len() == CLOSURE_CHUNK {
                worst = worst.max(sub.max_relative_residual(&rmat_from_rows(&chunk)));
                chunk.clear();
            }
        }
    }
    if !chunk.is_empty() {
        worst = worst.max(sub.max_relative_residual(&rmat_from_rows(&chunk)));
    }
    push(&mut checks, "pure_tensor_membership", worst, config.tol_member);

    // sampled Jordan closure of the composite subspace
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = c.algebra.random_element(&mut rng);
        let y = c.algebra.random_element(&mut rng);
        let prod = x.value.jordan(&y.value);
        let r = sub.residual(&prod.flatten_herm());
        worst = worst.max(rel(r, prod.frob_norm()));
    }
    push(&mut checks, "closure_sampled", worst, config.tol_member);

    // positivity of a₊ ⊗ b₊ in the ambient order
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = a.random_positive(&mut rng);
        let y = b.random_positive(&mut rng);
        let t = tensor_elements(&x.value, &y.value);
        let min = *t
            .eigenvalues(config.tol_herm * 1e2)?
            .last()
            .ok_or(Error::EmptyInput("eigenvalues"))?;
        worst = worst.max(rel((-min).max(0.0), t.frob_norm()));
    }
    push(&mut checks, "product_positivity", worst, config.tol_psd);

    // product states: membership and factorizing marginals
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let wa = normalized_density(a, &mut rng)?;
        let wb = normalized_density(b, &mut rng)?;
        let w = tensor_elements(&wa.value, &wb.value);
        let r = sub.residual(&w.flatten_herm());
        worst = worst.max(rel(r, w.frob_norm()));
        let x = a.random_element(&mut rng);
        let lhs = tensor_elements(&x.value, &ub).frob_inner(&w).re;
        let rhs = x.value.frob_inner(&wa.value).re;
        worst = worst.max(rel((lhs - rhs).abs(), rhs.abs()));
        let y = b.random_element(&mut rng);
        let lhs = tensor_elements(&ua, &y.value).frob_inner(&w).re;
        let rhs = y.value.frob_inner(&wb.value).re;
        worst = worst.max(rel((lhs - rhs).abs(), rhs.abs()));
    }
    push(&mut checks, "product_states", worst, tol.max(config.tol_member));

    // Lemma 4.2: p ⊗ q is a projection
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = random_spectral_projection(a, &mut rng, config)?;
        let q = random_spectral_projection(b, &mut rng, config)?;
        let t = tensor_elements(&p, &q);
        let defect = t.mul(&t).sub(&t).frob_norm();
        worst = worst.max(rel(defect, t.frob_norm()));
    }
    push(&mut checks, "product_projections", worst, tol);

    // Prop. 4.3 (Appendix D form): ⟨a⊗b, x⊗y⟩ = ⟨a,x⟩⟨b,y⟩
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (p, x) = (a.random_element(&mut rng), a.random_element(&mut rng));
        let (q, y) = (b.random_element(&mut rng), b.random_element(&mut rng));
        let lhs = tensor_elements(&p.value, &q.value)
            .frob_inner(&tensor_elements(&x.value, &y.value))
            .re;
        let rhs = p.value.frob_inner(&x.value).re * q.value.frob_inner(&y.value).re;
        worst = worst.max(rel((lhs - rhs).abs(), rhs.abs()));
    }
    push(&mut checks, "inner_product_factorization", worst, tol);

    // Prop. 4.4: L_{a⊗u} and L_{u⊗b} commute, sample-wise
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = a.random_element(&mut rng);
        let y = b.random_element(&mut rng);
        let z = c.algebra.random_element(&mut rng);
        let xa = tensor_elements(&x.value, &ub);
        let yb = tensor_elements(&ua, &y.value);
        let w1 = xa.jordan(&yb.jordan(&z.value));
        let w2 = yb.jordan(&xa.jordan(&z.value));
        let resid = w1.sub(&w2).frob_norm();
        worst = worst.max(rel(resid, w1.frob_norm() + w2.frob_norm()));
    }
    push(&mut checks, "operator_commutation", worst, tol);

    // Prop. 4.5: (a⊗u)•(x⊗y) = (a•x)⊗y
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = a.random_element(&mut rng);
        let x = a.random_element(&mut rng);
        let y = b.random_element(&mut rng);
        let lhs = tensor_elements(&p.value, &ub).jordan(&tensor_elements(&x.value, &y.value));
        let rhs = tensor_elements(&p.value.jordan(&x.value), &y.value);
        worst = worst.max(rel(lhs.sub(&rhs).frob_norm(), rhs.frob_norm()));
    }
    push(&mut checks, "left_factor_action", worst, tol);

    // Cor. 4.6: U_{a⊗u}(x⊗y) = U_a(x)⊗y
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = a.random_element(&mut rng);
        let x = a.random_element(&mut rng);
        let y = b.random_element(&mut rng);
        let pa = tensor_elements(&p.value, &ub);
        let lhs = pa.mul(&tensor_elements(&x.value, &y.value)).mul(&pa);
        let rhs = tensor_elements(&p.value.mul(&x.value).mul(&p.value), &y.value);
        worst = worst.max(rel(lhs.sub(&rhs).frob_norm(), rhs.frob_norm()));
    }
    push(&mut checks, "quadratic_action", worst, tol);

    Ok(CompositeAxiomReport {
        checks,
        locally_tomographic: c.algebra.dim() == a.dim() * b.dim(),
        samples,
    })
}

fn push(checks: &mut Vec<AxiomCheck>, name: &'static str, worst: f64, tolerance: f64) {
    checks.push(AxiomCheck { name, passed: worst <= tolerance, worst, tolerance });
}

fn normalized_density(
    alg: &EjcAlgebra,
    rng: &mut impl rand::Rng,
) -> Result<JordanElement> {
    for _ in 0..16 {
        let w = alg.random_positive(rng);
        let mass = alg.unit().inner(&w);
        if mass > 1e-8 {
            return Ok(w.scale(1.0 / mass));
        }
    }
    Err(Error::DegenerateDraw { retries: 16 })
}

fn random_spectral_projection(
    alg: &EjcAlgebra,
    rng: &mut impl rand::Rng,
    config: &Config,
) -> Result<AlgElement> {
    let x = alg.random_element(rng);
    let spec = alg.spectral(&x, config)?;
    let pick = (rng.next_u32() as usize) % spec.projections.len();
    Ok(spec.projections[pick].value.clone())
}

/// Ambient order automorphism `φ ⊗ ψ` of a composite.
///
/// Every supported automorphism acts as a sandwich `x ↦ w x w*` (Hermitian
/// interior `w` for quadratic representations, unitary `w` for Jordan
/// automorphisms, products for compositions), so the tensor acts by
/// `w_φ ⊗ w_ψ`.
pub fn automorphism_product(
    phi: &OrderAutomorphism,
    psi: &OrderAutomorphism,
    c: &CompositeResult,
    config: &Config,
) -> Result<OrderAutomorphism> {
    if !phi.parent.same_algebra(&c.left) || !psi.parent.same_algebra(&c.right) {
        return Err(Error::ParentMismatch);
    }
    let wa = sandwich_witness(&phi.tag, c.left.ambient())?;
    let wb = sandwich_witness(&psi.tag, c.right.ambient())?;
    let w = tensor_elements(&wa, &wb);
    let wst = w.adjoint();

    let k = c.algebra.dim();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let img = w.mul(&c.algebra.basis_element(j).value).mul(&wst);
        let coords = c.algebra.element_from_value(img, config)?;
        rows.push(coords.coords);
    }
    // rows[j] holds column j of the action
    let action = rmat_from_rows(&rows).transpose().to_owned();
    let action_inv = rmat_inverse(&action);

    // Def. 2.2(a) on sampled pure tensors
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x2a2a);
    for _ in 0..16 {
        let x = c.left.random_element(&mut rng);
        let y = c.right.random_element(&mut rng);
        let lhs = w.mul(&tensor_elements(&x.value, &y.value)).mul(&wst);
        let rhs = tensor_elements(&phi.apply(&x).value, &psi.apply(&y).value);
        let resid = lhs.sub(&rhs).frob_norm();
        if resid > 1e-7 * (1.0 + rhs.frob_norm()) {
            return Err(Error::NotComposable(format!(
                "tensor automorphism fails the pure-tensor law, residual {resid:.3e}"
            )));
        }
    }

    Ok(OrderAutomorphism {
        parent: c.algebra.clone(),
        action,
        action_inv,
        tag: AutoTag::Sandwich(Box::new(w)),
    })
}

fn sandwich_witness(tag: &AutoTag, ambient: &StarAlgebra) -> Result<AlgElement> {
    match tag {
        AutoTag::QuadraticRep(el) => Ok(el.value.clone()),
        AutoTag::JordanAuto(u) => Ok(u.as_ref().clone()),
        AutoTag::Sandwich(w) => Ok(w.as_ref().clone()),
        AutoTag::Composite(tags) => {
            let mut acc = ambient.unit();
            for t in tags {
                acc = acc.mul(&sandwich_witness(t, ambient)?);
            }
            Ok(acc)
        }
    }
}

/// Appendix E invariance: restricting any composite that contains the image
/// of `A ⊗ B` to the Jordan closure of the pure tensors again yields a
/// composite.
pub fn weak_composite_restriction_check(
    c_big: &EjcAlgebra,
    a: &EjcAlgebra,
    b: &EjcAlgebra,
    config: &Config,
) -> Result<bool> {
    let ambient = tensor_algebras(a.ambient(), b.ambient());
    if *c_big.ambient() != ambient {
        return Err(Error::NotComposable(
            "carrier is not an algebra in the tensor ambient".into(),
        ));
    }
    // precondition sampling: pure tensors inside, carrier Jordan-closed
    let mut gens = Vec::with_capacity(a.dim() * b.dim());
    for i in 0..a.dim() {
        let av = a.basis_element(i).value;
        for j in 0..b.dim() {
            let t = tensor_elements(&av, &b.basis_element(j).value);
            if !c_big.subspace().contains(&t.flatten_herm(), config.tol_member) {
                return Ok(false);
            }
            gens.push(t);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0e0e);
    for _ in 0..32 {
        let x = c_big.random_element(&mut rng);
        let y = c_big.random_element(&mut rng);
        let prod = x.value.jordan(&y.value);
        if !c_big.subspace().contains(&prod.flatten_herm(), config.tol_member) {
            return Ok(false);
        }
    }

    let closure = jordan_closure(&ambient, &gens, config)?;
    if c_big.subspace().max_residual_of(&closure.subspace) > config.tol_member {
        return Ok(false);
    }
    let algebra = EjcAlgebra::with_generators(
        ambient,
        closure.subspace,
        composite_label(a, b),
        marginal_generators(a, b),
        config,
    )?;
    let restricted = CompositeResult {
        left: a.clone(),
        right: b.clone(),
        algebra,
        provenance: Provenance::Closure,
        iterations: closure.iterations,
    };
    let report = composite_axiom_suite(&restricted, a, b, 32, 1e-8, config)?;
    Ok(report.all_pass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build, parse_spec, Family, SimpleSpec};
    use crate::linalg::CMatrix;
    use crate::linalg::C64;

    fn cfg() -> Config {
        Config::default()
    }

    fn simple(fam: Family, n: usize, kind: EmbeddingKind) -> crate::constructors::BuiltAlgebra {
        build(&SimpleSpec::new(fam, n).unwrap(), kind, &cfg()).unwrap()
    }

    #[test]
    fn closure_of_full_hermitian_basis_is_everything() {
        let amb = StarAlgebra::single(3);
        let out = jordan_closure(&amb, &amb.hermitian_basis(), &cfg()).unwrap();
        assert_eq!(out.subspace.dim(), 9);
    }

    #[test]
    fn closure_of_one_projection_adjoins_unit_only() {
        let amb = StarAlgebra::single(2);
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 0, C64::new(1.0, 0.0));
        let e11 = amb.inject(0, m).unwrap();
        let out = jordan_closure(&amb, &[e11], &cfg()).unwrap();
        assert_eq!(out.subspace.dim(), 2);
    }

    #[test]
    fn r2_tensor_r2_is_r4() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        assert_eq!(c.algebra.dim(), 10);
        assert_eq!(c.algebra.rank(&cfg()).unwrap(), 4);
        let u = c.embed(&r2.unit(), &r2.unit(), &cfg()).unwrap();
        assert!(u.sub(&c.algebra.unit()).norm() < 1e-12);
    }

    #[test]
    fn c2_tensor_c2_is_c4_and_locally_tomographic() {
        let c2 = simple(Family::C, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&c2, &c2, &cfg()).unwrap();
        assert_eq!(c.algebra.dim(), 16);
        let report = composite_axiom_suite(&c, &c2, &c2, 20, 1e-9, &cfg()).unwrap();
        assert!(report.locally_tomographic);
        assert!(report.all_pass(), "{:#?}", report.checks);
    }

    #[test]
    fn fixed_point_route_matches_closure_for_r2() {
        let built = simple(Family::R, 2, EmbeddingKind::Standard);
        let r2 = built.algebra;
        let phi = built.involution.unwrap();
        let fp = fixed_point_composite(&r2, &phi, &r2, &phi, &cfg()).unwrap();
        assert_eq!(fp.algebra.dim(), 10);
        assert!(matches!(fp.provenance, Provenance::FixedPoint(_)));
        let cl = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        assert!(fp.algebra.subspace().equals(cl.algebra.subspace(), 1e-8));
    }

    #[test]
    fn fixed_point_rejects_non_fixing_involution() {
        let built = simple(Family::R, 2, EmbeddingKind::Standard);
        let r2 = built.algebra;
        let c2 = simple(Family::C, 2, EmbeddingKind::Standard).algebra;
        let phi = built.involution.unwrap();
        // transpose does not fix C₂ (σ_y flips sign)
        let err = fixed_point_composite(&c2, &phi, &r2, &phi, &cfg()).unwrap_err();
        assert!(matches!(err, Error::InvolutionDoesNotFix { .. }));
    }

    #[test]
    fn axiom_suite_passes_on_r2_r3() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let r3 = simple(Family::R, 3, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r3, &cfg()).unwrap();
        assert_eq!(c.algebra.dim(), 21); // R₆
        let report = composite_axiom_suite(&c, &r2, &r3, 20, 1e-9, &cfg()).unwrap();
        assert!(report.all_pass(), "{:#?}", report.checks);
        assert!(!report.locally_tomographic); // 21 < 3·6
    }

    #[test]
    fn truncated_composite_fails_the_closure_check() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        // keep the unit direction, orthogonalize the rest against it, and
        // drop one of the remaining directions
        let sub = c.algebra.subspace();
        let uflat = c.algebra.unit().value.flatten_herm();
        let unorm = uflat.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = uflat.iter().map(|x| x / unorm).collect();
        let mut rest = Vec::new();
        for i in 0..sub.dim() {
            let r = sub.basis_row(i);
            let dot: f64 = r.iter().zip(&u).map(|(a, b)| a * b).sum();
            rest.push(r.iter().zip(&u).map(|(a, b)| a - dot * b).collect::<Vec<f64>>());
        }
        let complement = RealSubspace::span(&rest, cfg().tol_rank).unwrap();
        assert_eq!(complement.dim(), sub.dim() - 1);
        let mut truncated_rows = vec![u];
        for i in 0..complement.dim() - 1 {
            truncated_rows.push(complement.basis_row(i));
        }
        let truncated = RealSubspace::span(&truncated_rows, cfg().tol_rank).unwrap();
        assert_eq!(truncated.dim(), sub.dim() - 1);
        let algebra =
            EjcAlgebra::new(c.algebra.ambient().clone(), truncated, None, &cfg()).unwrap();
        let broken = CompositeResult {
            left: r2.clone(),
            right: r2.clone(),
            algebra,
            provenance: Provenance::Closure,
            iterations: 0,
        };
        let report = composite_axiom_suite(&broken, &r2, &r2, 20, 1e-9, &cfg()).unwrap();
        assert!(!report.all_pass());
        let closure_check = report.checks.iter().find(|c| c.name == "closure_sampled").unwrap();
        let membership = report
            .checks
            .iter()
            .find(|c| c.name == "pure_tensor_membership")
            .unwrap();
        assert!(!closure_check.passed || !membership.passed);
    }

    #[test]
    fn quadratic_autos_tensor_to_the_pure_tensor_quadratic() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = interior_point(&r2, &mut rng);
        let b = interior_point(&r2, &mut rng);
        let phi = r2.quadratic_automorphism(&a, &cfg()).unwrap();
        let psi = r2.quadratic_automorphism(&b, &cfg()).unwrap();
        let prod = automorphism_product(&phi, &psi, &c, &cfg()).unwrap();
        // against U_{a⊗b} on the composite
        let ab = c.embed(&a, &b, &cfg()).unwrap();
        let u = c.algebra.quadratic_automorphism(&ab, &cfg()).unwrap();
        for _ in 0..10 {
            let x = c.algebra.random_element(&mut rng);
            let d = prod.apply(&x).sub(&u.apply(&x)).norm();
            assert!(d < 1e-8 * (1.0 + x.norm()), "{d:.3e}");
        }
        assert!(prod.check_cone_preserving(&cfg(), 10));
    }

    #[test]
    fn identity_autos_tensor_to_identity() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        let id = OrderAutomorphism::identity(&r2);
        let prod = automorphism_product(&id, &id, &c, &cfg()).unwrap();
        let k = c.algebra.dim();
        let mut defect = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((prod.action[(i, j)] - want).abs());
            }
        }
        assert!(defect < 1e-10);
    }

    #[test]
    fn weak_composite_restriction_from_full_hermitian_part() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let amb = tensor_algebras(r2.ambient(), r2.ambient());
        let rows: Vec<Vec<f64>> =
            amb.hermitian_basis().iter().map(|e| e.flatten_herm()).collect();
        let full = RealSubspace::span(&rows, cfg().tol_rank).unwrap();
        let c_big = EjcAlgebra::new(amb, full, Some("full".into()), &cfg()).unwrap();
        assert!(weak_composite_restriction_check(&c_big, &r2, &r2, &cfg()).unwrap());
    }

    #[test]
    fn weak_composite_restriction_is_idempotent_on_composites() {
        let r2 = simple(Family::R, 2, EmbeddingKind::Standard).algebra;
        let c = canonical_tensor(&r2, &r2, &cfg()).unwrap();
        assert!(weak_composite_restriction_check(&c.algebra, &r2, &r2, &cfg()).unwrap());
    }

    #[test]
    fn universal_c2_c2_has_doubled_dimension() {
        let spec = parse_spec("C2", EmbeddingKind::Universal).unwrap();
        let c = universal_tensor(&spec, &spec, &cfg()).unwrap();
        assert_eq!(c.algebra.dim(), 32); // C₄ ⊕ C₄
        assert_eq!(c.algebra.ambient().blocks, vec![4, 4, 4, 4]);
    }

    #[test]
    fn guardrail_blocks_oversized_composites() {
        let mut tight = cfg();
        tight.guardrail_dim = 64;
        let q2 = simple(Family::Q, 2, EmbeddingKind::Standard).algebra;
        let err = canonical_tensor(&q2, &q2, &tight).unwrap_err();
        assert!(matches!(err, Error::GuardrailExceeded { dim: 256, limit: 64 }));
        tight.force = true;
        assert!(canonical_tensor(&q2, &q2, &tight).is_ok());
    }

    fn interior_point(
        alg: &EjcAlgebra,
        rng: &mut impl rand::Rng,
    ) -> JordanElement {
        let x = alg.random_positive(rng);
        // shift safely into the interior
        let u = alg.unit();
        x.scale(0.5).add(&u)
    }
}
