//! Named verification suites: the runnable form of the checkable claims,
//! shared by the CLI `verify` command and the acceptance tests.
//!
//! Every suite is deterministic given the `Config` seed and reports one
//! line per check; a suite passes when every line does.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::category::{
    conjugate_algebra, default_test_objects, intertwiner_defect, invqm_compose, invqm_tensor,
    involution_map, is_invqm_morphism, is_jordan_preserving, is_relatively_cjp,
    random_intertwiner, state_functional, summand_swap, u_map, CompactStructure, InvQmObject,
    MorphismCategory, RelCjpTester,
};
use crate::classify::{classify, verify_table, WhichTable};
use crate::composites::{canonical_tensor, composite_axiom_suite, fixed_point_composite};
use crate::config::Config;
use crate::constructors::{
    build, kron_chain, parse_spec, pauli_0, pauli_x, pauli_y, pauli_z,
    quaternionic_pauli_matrices, build_spec, EmbeddingKind, Family, SimpleSpec,
};
use crate::error::{Error, Result};
use crate::jordan_core::EjcAlgebra;
use crate::linalg::{rmat_frob, rmat_identity, standard_normal, CMatrix};
use crate::star_algebra::{direct_sum_elements, AlgElement, Involution, LinearMap, StarAlgebra};

/// One named check with its outcome.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A suite run: its checks in a deterministic order plus the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
    pub all_passed: bool,
    pub elapsed_seconds: f64,
}

fn line(checks: &mut Vec<CheckLine>, name: impl Into<String>, passed: bool, detail: String) {
    checks.push(CheckLine { name: name.into(), passed, detail });
}

/// Residual-style line: passes iff `value ≤ bound`.
fn bounded(checks: &mut Vec<CheckLine>, name: impl Into<String>, value: f64, bound: f64) {
    line(checks, name, value <= bound, format!("{value:.3e} (bound {bound:.1e})"));
}

fn finish(suite: &str, checks: Vec<CheckLine>, started: Instant) -> SuiteReport {
    let all_passed = checks.iter().all(|c| c.passed);
    SuiteReport {
        suite: suite.to_string(),
        checks,
        all_passed,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    }
}

/// All three table verifications, flattened to one line per cell.
pub fn run_tables(max_param: usize, config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    for which in [WhichTable::Table1, WhichTable::Table2, WhichTable::Table3] {
        let report = verify_table(which, max_param, config)?;
        for cell in &report.cells {
            let passed = cell.verdict != "fail";
            let note = cell.detail.clone().unwrap_or_default();
            let detail = match (&cell.expected, &cell.computed) {
                (Some(e), Some(c)) => format!("{}: expected {e}, computed {c}", cell.verdict),
                (Some(e), None) => format!("{}: expected {e}; {note}", cell.verdict),
                (None, Some(c)) => format!("{}: computed {c}", cell.verdict),
                (None, None) => format!("{}: {note}", cell.verdict),
            };
            line(&mut checks, format!("{} {}", report.table, cell.cell), passed, detail);
        }
        line(
            &mut checks,
            format!("{} summary", report.table),
            report.all_passed,
            format!("{} cells in {:.1}s", report.cells.len(), report.elapsed_seconds),
        );
    }
    Ok(finish("tables", checks, started))
}

/// Spin factors V_n for n = 2…7: generator relations at both embeddings
/// and the classifier's identification, including the rank-2 aliases.
pub fn run_spin(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    for n in 2..=7usize {
        for kind in [EmbeddingKind::Standard, EmbeddingKind::Universal] {
            let spec = SimpleSpec::new(Family::V, n)?;
            let built = build(&spec, kind, config)?;
            let a = &built.algebra;
            let gens = a.generators().ok_or(Error::EmptyInput("spin generators"))?;
            let unit = a.unit().value;
            let mut worst = 0.0f64;
            for (p, g) in gens.iter().enumerate() {
                for (q, h) in gens.iter().enumerate() {
                    let want = if p == q { unit.clone() } else { g.parent.zero() };
                    worst = worst.max(g.jordan(h).sub(&want).frob_norm());
                }
            }
            bounded(
                &mut checks,
                format!("spin V{n}@{} relations", kind.suffix()),
                worst,
                1e-10,
            );
            line(
                &mut checks,
                format!("spin V{n}@{} dimension", kind.suffix()),
                a.dim() == n + 1,
                format!("dim {} (want {})", a.dim(), n + 1),
            );
        }
        let built = build(&SimpleSpec::new(Family::V, n)?, EmbeddingKind::Standard, config)?;
        let got = classify(&built.algebra, config)?.canonical_label;
        let want = match n {
            2 => "R2".to_string(),
            3 => "C2".to_string(),
            5 => "Q2".to_string(),
            _ => format!("V{n}"),
        };
        line(
            &mut checks,
            format!("spin V{n} classification"),
            got == want,
            format!("classified {got} (want {want})"),
        );
    }
    Ok(finish("spin", checks, started))
}

/// The two-quabit composite: Pauli-product identities in `M₁₆`, the
/// closure dimension/rank/type of `Q₂ ⊙ Q₂`, and agreement between the
/// closure and fixed-point constructions.
pub fn run_quabit(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    let s = quaternionic_pauli_matrices();
    let i = C64::new(0.0, 1.0);

    let want = pauli_x().kron(&pauli_0()).scale(-i);
    bounded(&mut checks, "quabit s3·s4 = -i σx⊗σ0", s[3].mul(&s[4]).sub(&want).frob_norm(), 1e-12);

    // tensor-squared products against the single-site generators of M₁₆
    let x_site = |site: usize, p: &CMatrix| -> CMatrix {
        let mut fs = vec![pauli_0(), pauli_0(), pauli_0(), pauli_0()];
        fs[site] = p.clone();
        kron_chain(&fs)
    };
    let t = |p: usize, q: usize| s[p].kron(&s[q]);
    let cases: [(usize, usize, usize, usize, usize, CMatrix, C64, &str); 6] = [
        (3, 4, 4, 4, 0, pauli_x(), -i, "(s3⊗s4)(s4⊗s4) = -i x1(x)"),
        (3, 5, 5, 5, 0, pauli_y(), i, "(s3⊗s5)(s5⊗s5) = i x1(y)"),
        (4, 5, 5, 5, 0, pauli_z(), -i, "(s4⊗s5)(s5⊗s5) = -i x1(z)"),
        (3, 3, 3, 4, 2, pauli_x(), -i, "(s3⊗s3)(s3⊗s4) = -i x3(x)"),
        (3, 3, 3, 5, 2, pauli_y(), i, "(s3⊗s3)(s3⊗s5) = i x3(y)"),
        (4, 4, 4, 5, 2, pauli_z(), -i, "(s4⊗s4)(s4⊗s5) = -i x3(z)"),
    ];
    for (a1, a2, b1, b2, site, p, phase, name) in cases {
        let got = t(a1, a2).mul(&t(b1, b2));
        let want = x_site(site, &p).scale(phase);
        bounded(&mut checks, format!("quabit {name}"), got.sub(&want).frob_norm(), 1e-12);
    }

    let q2 = build(&SimpleSpec::new(Family::Q, 2)?, EmbeddingKind::Standard, config)?;
    let comp = canonical_tensor(&q2.algebra, &q2.algebra, config)?;
    line(
        &mut checks,
        "quabit dim(Q2⊙Q2)",
        comp.algebra.dim() == 136,
        format!("dim {}", comp.algebra.dim()),
    );
    let report = classify(&comp.algebra, config)?;
    line(
        &mut checks,
        "quabit classification",
        report.canonical_label == "R16" && report.rank == 16,
        format!("{} rank {}", report.canonical_label, report.rank),
    );
    let inv = q2.involution.as_ref().ok_or(Error::NotInvolutiveObject)?;
    let fixed = fixed_point_composite(&q2.algebra, inv, &q2.algebra, inv, config)?;
    let agree = fixed
        .algebra
        .subspace()
        .equals(comp.algebra.subspace(), config.tol_member * 1e2);
    line(
        &mut checks,
        "quabit fixed-point route",
        agree,
        format!("fixed-point dim {} vs closure dim {}", fixed.algebra.dim(), comp.algebra.dim()),
    );
    Ok(finish("quabit", checks, started))
}

/// Block patterns used for the compact-structure sweeps: every shape with
/// Hermitian dimension ≤ 256 that adds coverage (all single blocks up to
/// the bound's edge, plus mixed patterns).
fn snake_shapes() -> Vec<Vec<usize>> {
    let mut shapes: Vec<Vec<usize>> = (1..=8).map(|n| vec![n]).collect();
    shapes.extend([vec![10], vec![12], vec![14], vec![16]]);
    shapes.extend([
        vec![1, 1],
        vec![2, 1],
        vec![2, 2],
        vec![3, 2],
        vec![3, 3],
        vec![2, 2, 2],
        vec![1, 2, 3],
        vec![4, 4],
        vec![4, 2, 1],
        vec![2, 2, 2, 2],
        vec![6, 6],
        vec![8, 8],
        vec![10, 6],
        vec![12, 4],
    ]);
    shapes
}

/// Snake identities and the properties of the compact unit `f` across the
/// shape sweep.
pub fn run_snake(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    for shape in snake_shapes() {
        let alg = StarAlgebra::new(shape.clone())?;
        let cs = CompactStructure::new(&alg);
        bounded(&mut checks, format!("snake {shape:?}"), cs.snake_check(50, config), 1e-9);
        let min = cs.min_f_eigenvalue(config)?;
        line(
            &mut checks,
            format!("snake {shape:?} f ⪰ 0"),
            min >= -1e-10,
            format!("min eigenvalue {min:.3e}"),
        );
        if alg.herm_dim() <= 64 {
            bounded(
                &mut checks,
                format!("snake {shape:?} basis independence"),
                cs.basis_independence_defect(config),
                1e-10,
            );
        }
    }
    Ok(finish("snake", checks, started))
}

/// The left-regular dagger: `η† = f` across the shape sweep, involutivity
/// and monoidality on random maps, self-adjointness of quadratic maps,
/// and stability of intertwiners under the dagger.
pub fn run_dagger(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    for shape in snake_shapes() {
        let alg = StarAlgebra::new(shape.clone())?;
        let cs = CompactStructure::new(&alg);
        bounded(
            &mut checks,
            format!("dagger η† = f {shape:?}"),
            cs.dagger_compact_defect(config)?,
            1e-10,
        );
    }

    let shapes: [(Vec<usize>, Vec<usize>); 5] = [
        (vec![2], vec![2, 1]),
        (vec![2, 1], vec![3]),
        (vec![3], vec![2]),
        (vec![1, 2], vec![2, 2]),
        (vec![2, 2], vec![1]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xda66);
    let mut worst_inv = 0.0f64;
    let mut worst_mono = 0.0f64;
    for k in 0..20 {
        let (sa, sb) = &shapes[k % shapes.len()];
        let a = StarAlgebra::new(sa.clone())?;
        let b = StarAlgebra::new(sb.clone())?;
        let mut rand_map = |src: &StarAlgebra, dst: &StarAlgebra| -> Result<LinearMap> {
            let m = CMatrix::from_fn(dst.complex_dim(), src.complex_dim(), |_, _| {
                C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
            });
            LinearMap::from_matrix(src, dst, m)
        };
        let phi = rand_map(&a, &b)?;
        let psi = rand_map(&b, &a)?;
        let dd = phi.lr_dagger().lr_dagger();
        worst_inv = worst_inv.max(dd.mat.sub(&phi.mat).frob_norm() / (1.0 + phi.frob_norm()));
        let lhs = phi.tensor(&psi).lr_dagger();
        let rhs = phi.lr_dagger().tensor(&psi.lr_dagger());
        worst_mono = worst_mono.max(lhs.mat.sub(&rhs.mat).frob_norm() / (1.0 + lhs.frob_norm()));
    }
    bounded(&mut checks, "dagger φ†† = φ (20 maps)", worst_inv, 1e-10);
    bounded(&mut checks, "dagger (φ⊗ψ)† = φ†⊗ψ† (20 pairs)", worst_mono, 1e-10);

    let q2 = build(&SimpleSpec::new(Family::Q, 2)?, EmbeddingKind::Standard, config)?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let a = q2.algebra.random_element(&mut rng);
        let u = u_map(&a.value)?;
        let d = u.lr_dagger().mat.sub(&u.mat).frob_norm() / (1.0 + u.frob_norm());
        worst = worst.max(d);
    }
    bounded(&mut checks, "dagger (U_a)† = U_a", worst, 1e-10);

    let mut worst = 0.0f64;
    for spec in ["R2", "C2"] {
        let obj = InvQmObject::from_built(
            &build_spec(&parse_spec(spec, EmbeddingKind::Universal)?, config)?,
            config,
        )?;
        for _ in 0..10 {
            let phi = random_intertwiner(&obj, &mut rng)?;
            let d = intertwiner_defect(&phi.lr_dagger(), &obj.involution, &obj.involution)?;
            worst = worst.max(d / (1.0 + phi.frob_norm()));
        }
    }
    bounded(&mut checks, "dagger of intertwiner intertwines (20 draws)", worst, 1e-9);
    Ok(finish("dagger", checks, started))
}

/// Morphism-level distinctions: CQM = CP, intertwiners are relatively
/// CJP, InvQM is closed under composition and tensor, the summand swap,
/// the state-functional counterexample, and the compact unit's membership
/// in `A ⊙ Ā`.
pub fn run_categories(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xca7e);

    // CQM: relative CJP against standard C_k, k ≤ 3, coincides with CP
    let c2 = build_spec(&parse_spec("C2", EmbeddingKind::Standard)?, config)?;
    let cqm_objects: Vec<EjcAlgebra> = default_test_objects(MorphismCategory::Cqm, config)?
        .into_iter()
        .map(|b| b.algebra)
        .collect();
    let tester = RelCjpTester::new(&c2.algebra, &c2.algebra, &cqm_objects, config)?;
    let alg = c2.algebra.ambient().clone();
    let basis = alg.hermitian_basis();
    let mut agree = 0usize;
    let mut cp_seen = 0usize;
    for k in 0..20 {
        let phi = if k % 2 == 0 {
            let op = alg.random_element(&mut rng);
            let images: Vec<AlgElement> =
                basis.iter().map(|h| op.mul(h).mul(&op.adjoint())).collect();
            LinearMap::from_hermitian_images(&alg, &alg, &images)?
        } else {
            let images: Vec<AlgElement> =
                basis.iter().map(|_| alg.random_element(&mut rng).hermitize()).collect();
            LinearMap::from_hermitian_images(&alg, &alg, &images)?
        };
        let cp = phi.is_completely_positive(config)?;
        cp_seen += usize::from(cp);
        if cp == tester.test(&phi, config)?.holds {
            agree += 1;
        }
    }
    line(
        &mut checks,
        "categories CQM: relCJP == CP (20 maps)",
        agree == 20,
        format!("{agree}/20 agree ({cp_seen} CP)"),
    );

    // InvQM: random intertwiners are relatively CJP over the default set
    let c2u = InvQmObject::from_built(
        &build_spec(&parse_spec("C2", EmbeddingKind::Universal)?, config)?,
        config,
    )?;
    let invqm_objects: Vec<EjcAlgebra> = default_test_objects(MorphismCategory::InvQm, config)?
        .into_iter()
        .map(|b| b.algebra)
        .collect();
    let tester = RelCjpTester::new(&c2u.algebra, &c2u.algebra, &invqm_objects, config)?;
    let mut intertwiners = Vec::with_capacity(20);
    let mut ok = 0usize;
    for _ in 0..20 {
        let phi = random_intertwiner(&c2u, &mut rng)?;
        if is_invqm_morphism(&phi, &c2u, &c2u, config)? && tester.test(&phi, config)?.holds {
            ok += 1;
        }
        intertwiners.push(phi);
    }
    line(
        &mut checks,
        "categories intertwiner ⇒ relCJP (20 draws)",
        ok == 20,
        format!("{ok}/20"),
    );

    // closure of InvQM under composition and tensor on those same draws
    let mut comp_ok = 0usize;
    for pair in intertwiners.chunks(2) {
        let comp = invqm_compose(&pair[0], &pair[1])?;
        comp_ok += usize::from(is_invqm_morphism(&comp, &c2u, &c2u, config)?);
    }
    line(&mut checks, "categories InvQM ∘-closure (10 pairs)", comp_ok == 10, format!("{comp_ok}/10"));
    let pair_obj = c2u.tensor(&c2u, config)?;
    let mut tens_ok = 0usize;
    for pair in intertwiners.chunks(2) {
        let prod = invqm_tensor(&pair[0], &pair[1]);
        tens_ok += usize::from(is_invqm_morphism(&prod, &pair_obj, &pair_obj, config)?);
    }
    line(&mut checks, "categories InvQM ⊗-closure (10 pairs)", tens_ok == 10, format!("{tens_ok}/10"));

    // functoriality: (φ∘φ')⊗(ψ∘ψ') = (φ⊗ψ)∘(φ'⊗ψ')
    let mut worst = 0.0f64;
    for quad in intertwiners.chunks(4) {
        if quad.len() < 4 {
            continue;
        }
        let lhs = invqm_tensor(&invqm_compose(&quad[0], &quad[1])?, &invqm_compose(&quad[2], &quad[3])?);
        let rhs = invqm_compose(&invqm_tensor(&quad[0], &quad[2]), &invqm_tensor(&quad[1], &quad[3]))?;
        worst = worst.max(lhs.mat.sub(&rhs.mat).frob_norm() / (1.0 + lhs.frob_norm()));
    }
    bounded(&mut checks, "categories (φ∘φ')⊗(ψ∘ψ') = (φ⊗ψ)∘(φ'⊗ψ')", worst, 1e-10);

    // the summand swap is an InvQM endomorphism acting as the transpose
    let swap = summand_swap(c2u.algebra.ambient())?;
    let mut is_transpose = true;
    for _ in 0..8 {
        let x = c2u.algebra.random_element(&mut rng);
        let y = swap.apply(&x.value)?;
        is_transpose &= c2u.algebra.contains_value(&y, config);
        is_transpose &=
            y.blocks[0].sub(&x.value.blocks[0].transpose()).frob_norm() < 1e-10;
    }
    line(
        &mut checks,
        "categories summand swap ∈ InvQM, acts as transpose",
        is_invqm_morphism(&swap, &c2u, &c2u, config)? && is_transpose,
        "swap on C*(C2)".into(),
    );

    // (swap ⊗ swap) fixes the classical bit of C2 ⊙ C2
    let both = invqm_tensor(&swap, &swap);
    let report = classify(&pair_obj.algebra, config)?;
    let mut fixed = is_invqm_morphism(&both, &pair_obj, &pair_obj, config)?;
    let mut worst = 0.0f64;
    for c in &report.central_idempotents {
        let moved = both.apply(&c.value)?.sub(&c.value).frob_norm();
        worst = worst.max(moved);
        fixed &= moved < 1e-8;
    }
    line(
        &mut checks,
        "categories swap⊗swap fixes the classical bit",
        fixed,
        format!("{} summands, max move {worst:.3e}", report.summands.len()),
    );

    // negative controls
    let m2 = StarAlgebra::new(vec![2])?;
    let transpose = involution_map(&Involution::transpose(&m2, config)?);
    line(
        &mut checks,
        "categories transpose on M2 is not CP",
        !transpose.is_completely_positive(config)?,
        "Choi has a negative eigenvalue".into(),
    );
    let r1 = build_spec(&parse_spec("R1", EmbeddingKind::Standard)?, config)?;
    let mut rho = alg.zero();
    rho.blocks[0].set(0, 0, C64::new(0.6, 0.0));
    rho.blocks[0].set(1, 1, C64::new(0.4, 0.0));
    let omega = state_functional(&alg, &rho)?;
    let r2 = build_spec(&parse_spec("R2", EmbeddingKind::Standard)?, config)?;
    let against_r2 =
        is_relatively_cjp(&omega, &c2.algebra, &r1.algebra, &[r2.algebra.clone()], config)?;
    let against_c2 =
        is_relatively_cjp(&omega, &c2.algebra, &r1.algebra, &[c2.algebra.clone()], config)?;
    line(
        &mut checks,
        "categories state on C2 fails relCJP against R2@std",
        !against_r2.holds && against_c2.holds,
        format!(
            "R2 test holds: {}, C2 test holds: {}",
            against_r2.holds, against_c2.holds
        ),
    );

    // positive controls: U_a and a *-homomorphism pass the RSE test set
    let rse_objects: Vec<EjcAlgebra> = default_test_objects(MorphismCategory::Rse, config)?
        .into_iter()
        .map(|b| b.algebra)
        .collect();
    let q2 = build(&SimpleSpec::new(Family::Q, 2)?, EmbeddingKind::Standard, config)?;
    let a = q2.algebra.random_element(&mut rng);
    let u = u_map(&a.value)?;
    let u_ok = is_jordan_preserving(&u, &q2.algebra, &q2.algebra, config)?
        && is_relatively_cjp(&u, &q2.algebra, &q2.algebra, &rse_objects, config)?.holds;
    line(&mut checks, "categories U_a passes the RSE test set", u_ok, "U_a ⊗ id = U_{a⊗1}".into());
    let double = crate::constructors::direct_sum_ejc(&c2.algebra, &c2.algebra, config)?;
    let images: Vec<AlgElement> =
        basis.iter().map(|h| direct_sum_elements(h, h)).collect();
    let hom = LinearMap::from_hermitian_images(&alg, double.ambient(), &images)?;
    let hom_ok = is_jordan_preserving(&hom, &c2.algebra, &double, config)?
        && is_relatively_cjp(&hom, &c2.algebra, &double, &rse_objects, config)?.holds;
    line(&mut checks, "categories *-homomorphism passes the RSE test set", hom_ok, "x ↦ x ⊕ x".into());

    // compact structure descends: f_A ∈ A ⊙ Ā for involutive objects
    for (spec, kind) in [
        ("R2", EmbeddingKind::Universal),
        ("C2", EmbeddingKind::Universal),
        ("Q2", EmbeddingKind::Standard),
    ] {
        let obj = build_spec(&parse_spec(spec, kind)?, config)?;
        let conj = conjugate_algebra(&obj.algebra, config)?;
        let comp = canonical_tensor(&obj.algebra, &conj, config)?;
        let cs = CompactStructure::new(obj.algebra.ambient());
        line(
            &mut checks,
            format!("categories f ∈ A⊙Ā for {spec}@{}", kind.suffix()),
            comp.algebra.contains_value(&cs.f, config),
            format!("composite dim {}", comp.algebra.dim()),
        );
    }
    Ok(finish("categories", checks, started))
}

/// Jordan-algebra identities on one constructed simple algebra.
fn jordan_battery(
    checks: &mut Vec<CheckLine>,
    label: &str,
    a: &EjcAlgebra,
    config: &Config,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa2b4);

    // Jordan identity (x²•y)•x = x²•(y•x)
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let x = a.random_element(&mut rng);
        let y = a.random_element(&mut rng);
        let x2 = x.value.jordan(&x.value);
        let lhs = x2.jordan(&y.value).jordan(&x.value);
        let rhs = x2.jordan(&y.value.jordan(&x.value));
        worst = worst.max(lhs.sub(&rhs).frob_norm() / (1.0 + lhs.frob_norm()));
    }
    bounded(checks, format!("axioms {label} jordan identity"), worst, 1e-9);

    // euclidean property ⟨x•y, z⟩ = ⟨y, x•z⟩
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let x = a.random_element(&mut rng);
        let y = a.random_element(&mut rng);
        let z = a.random_element(&mut rng);
        let lhs = x.value.jordan(&y.value).frob_inner(&z.value).re;
        let rhs = y.value.frob_inner(&x.value.jordan(&z.value)).re;
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    bounded(checks, format!("axioms {label} euclidean"), worst, 1e-9);

    // U_a maps the cone into itself
    let mut positive = true;
    let mut most_negative = f64::INFINITY;
    for _ in 0..50 {
        let x = a.random_element(&mut rng);
        let p = a.random_positive(&mut rng);
        let img = x.u_apply(&p, config)?;
        let min = img
            .eigenvalues(config)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        most_negative = most_negative.min(min);
        positive &= min >= -config.tol_psd * (1.0 + img.norm()) * 1e2;
    }
    line(
        checks,
        format!("axioms {label} U_a positivity (50 samples)"),
        positive,
        format!("min eigenvalue {most_negative:.3e}"),
    );

    // U_a U_{a⁻¹} = id for invertible a
    let mut worst = 0.0f64;
    let mut tried = 0usize;
    let id = rmat_identity(a.dim());
    for _ in 0..50 {
        if tried == 5 {
            break;
        }
        let x = a.random_element(&mut rng);
        let Ok(inv) = a.inverse(&x, config) else { continue };
        tried += 1;
        let ua = a.u_matrix(&x, config)?;
        let ui = a.u_matrix(&inv, config)?;
        let prod = &ua * &ui;
        worst = worst.max(rmat_frob(&(&prod - &id)) / (a.dim() as f64).sqrt());
    }
    bounded(checks, format!("axioms {label} U_a U_a⁻¹ = id"), worst, 1e-8);

    // e^{L_a} = U_{e^{a/2}}
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = a.random_element(&mut rng).scale(0.5);
        let exp_l = a.exp_l(&x, 1.0, config)?;
        let half = a.exp_jordan(&x.scale(0.5), config)?;
        let quad = a.quadratic_automorphism(&half, config)?;
        for _ in 0..4 {
            let y = a.random_element(&mut rng);
            let d = exp_l.apply(&y).sub(&quad.apply(&y)).norm();
            worst = worst.max(d / (1.0 + y.norm()));
        }
    }
    bounded(checks, format!("axioms {label} e^La = U_e^(a/2)"), worst, 1e-8);
    Ok(())
}

/// Factor list for the composite axiom battery: the criteria-1/2 pairs.
fn axiom_factors() -> Vec<SimpleSpec> {
    let mut out = Vec::new();
    for fam in [Family::R, Family::C, Family::Q] {
        for p in [2, 3] {
            out.push(SimpleSpec::new(fam, p).expect("valid family parameters"));
        }
    }
    out
}

/// Jordan identities on each simple algebra with parameter ≤ 3, then the
/// composite axiom battery on every ⊙ and ⊗̃ composite from the table
/// criteria (unordered pairs; the mirror composite is isomorphic by the
/// swap).
pub fn run_axioms(config: &Config) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut checks = Vec::new();

    let mut simples = Vec::new();
    for fam in [Family::R, Family::C, Family::Q] {
        for p in 1..=3usize {
            simples.push(SimpleSpec::new(fam, p)?);
        }
    }
    simples.push(SimpleSpec::new(Family::V, 2)?);
    simples.push(SimpleSpec::new(Family::V, 3)?);
    for spec in &simples {
        let built = build(spec, EmbeddingKind::Standard, config)?;
        jordan_battery(&mut checks, &spec.label(), &built.algebra, config)?;
    }

    let factors = axiom_factors();
    for kind in [EmbeddingKind::Standard, EmbeddingKind::Universal] {
        let built: Vec<_> = factors
            .iter()
            .map(|s| build(s, kind, config))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..built.len() {
            for j in i..built.len() {
                let a = &built[i];
                let b = &built[j];
                let name = format!(
                    "axioms {}@{k} ⊙ {}@{k}",
                    factors[i].label(),
                    factors[j].label(),
                    k = kind.suffix()
                );
                let comp = canonical_tensor(&a.algebra, &b.algebra, config)?;
                let report =
                    composite_axiom_suite(&comp, &a.algebra, &b.algebra, 100, 1e-9, config)?;
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                line(
                    &mut checks,
                    name,
                    report.all_pass(),
                    if failed.is_empty() {
                        format!("{} checks, 100 samples", report.checks.len())
                    } else {
                        format!("failed: {failed:?}")
                    },
                );
            }
        }
    }
    Ok(finish("axioms", checks, started))
}

/// Run a suite by CLI name; `all` concatenates every suite.
pub fn run_suite(name: &str, max_param: usize, config: &Config) -> Result<SuiteReport> {
    match name {
        "tables" => run_tables(max_param, config),
        "spin" => run_spin(config),
        "quabit" => run_quabit(config),
        "snake" => run_snake(config),
        "dagger" => run_dagger(config),
        "categories" => run_categories(config),
        "axioms" => run_axioms(config),
        "all" => {
            let started = Instant::now();
            let mut checks = Vec::new();
            for sub in ["tables", "spin", "quabit", "snake", "dagger", "categories", "axioms"] {
                let report = run_suite(sub, max_param, config)?;
                checks.extend(report.checks);
            }
            Ok(finish("all", checks, started))
        }
        _ => Err(Error::ParseError(format!(
            "unknown suite '{name}' (expected tables, spin, quabit, snake, dagger, categories, axioms or all)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_suite_passes() {
        let report = run_spin(&Config::default()).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn quabit_identities_pass() {
        let report = run_quabit(&Config::default()).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn snake_suite_passes_on_small_shapes() {
        // full sweep runs in the verify suite; exercise the plumbing here
        let cfg = Config::default();
        for shape in [vec![2], vec![2, 1]] {
            let alg = StarAlgebra::new(shape).unwrap();
            let cs = CompactStructure::new(&alg);
            assert!(cs.snake_check(50, &cfg) < 1e-9);
            assert!(cs.dagger_compact_defect(&cfg).unwrap() < 1e-10);
        }
    }

    #[test]
    fn jordan_battery_accepts_q2() {
        let cfg = Config::default();
        let built = build(&SimpleSpec::new(Family::Q, 2).unwrap(), EmbeddingKind::Standard, &cfg)
            .unwrap();
        let mut checks = Vec::new();
        jordan_battery(&mut checks, "Q2", &built.algebra, &cfg).unwrap();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn unknown_suite_is_a_parse_error() {
        match run_suite("nope", 2, &Config::default()) {
            Err(Error::ParseError(_)) => {}
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
