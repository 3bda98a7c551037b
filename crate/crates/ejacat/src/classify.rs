//! JNW classification: central decomposition and type fingerprints.
//!
//! A euclidean Jordan algebra splits along its minimal central idempotents;
//! each summand is identified by its (rank, dimension) pair. The pair
//! separates all simple families except the rank-2 coincidences, which are
//! resolved by dimension: V₂ = R₂ (dim 3), V₃ = C₂ (dim 4), V₅ = Q₂ (dim 6).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::composites::canonical_tensor;
use crate::config::Config;
use crate::constructors::{build, EmbeddingKind, Family as SpecFamily, SimpleSpec};
use crate::error::{Error, Result};
use crate::jordan_core::{EjcAlgebra, JordanElement};
use crate::linalg::{standard_normal, sym_eig, RMat, RealSubspace, C64};
use crate::star_algebra::AlgElement;

/// Simple-summand family. `Trivial` is the one-dimensional algebra ℝ,
/// printed as `R1`; `Exceptional` flags the (rank 3, dim 27) fingerprint,
/// which cannot arise from the special constructions here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SummandFamily {
    Trivial,
    R,
    C,
    Q,
    V,
    Exceptional,
}

/// One simple direct summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub family: SummandFamily,
    pub parameter: usize,
    pub dimension: usize,
    pub rank: usize,
}

impl Summand {
    pub fn label(&self) -> String {
        match self.family {
            SummandFamily::Trivial => "R1".into(),
            SummandFamily::R => format!("R{}", self.parameter),
            SummandFamily::C => format!("C{}", self.parameter),
            SummandFamily::Q => format!("Q{}", self.parameter),
            SummandFamily::V => format!("V{}", self.parameter),
            SummandFamily::Exceptional => "H3(O)".into(),
        }
    }

    fn sort_key(&self) -> (u8, usize, usize) {
        let fam = match self.family {
            SummandFamily::Trivial => 1, // sorts as R1
            SummandFamily::R => 1,
            SummandFamily::C => 2,
            SummandFamily::Q => 3,
            SummandFamily::V => 4,
            SummandFamily::Exceptional => 5,
        };
        (fam, self.parameter, self.dimension)
    }
}

/// Full decomposition of an algebra into simple summands.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub summands: Vec<Summand>,
    pub canonical_label: String,
    pub dimension: usize,
    pub rank: usize,
    #[serde(skip)]
    pub central_idempotents: Vec<JordanElement>,
}

/// `(rank, dim)` to family; errors on impossible pairs, which signal a
/// closure or tolerance failure upstream.
pub fn fingerprint(rank: usize, dim: usize) -> Result<(SummandFamily, usize)> {
    match rank {
        1 if dim == 1 => Ok((SummandFamily::Trivial, 1)),
        2 => match dim {
            3 => Ok((SummandFamily::R, 2)),
            4 => Ok((SummandFamily::C, 2)),
            6 => Ok((SummandFamily::Q, 2)),
            d if d >= 3 => Ok((SummandFamily::V, d - 1)),
            _ => Err(Error::UnknownFingerprint { rank, dim }),
        },
        r if r >= 3 && dim == r * (r + 1) / 2 => Ok((SummandFamily::R, r)),
        r if r >= 3 && dim == r * r => Ok((SummandFamily::C, r)),
        r if r >= 3 && dim == r * (2 * r - 1) => Ok((SummandFamily::Q, r)),
        3 if dim == 27 => Ok((SummandFamily::Exceptional, 3)),
        _ => Err(Error::UnknownFingerprint { rank, dim }),
    }
}

fn times_i(x: &AlgElement) -> AlgElement {
    x.scale(C64::new(0.0, 1.0))
}

/// Center of the algebra as a subspace of coordinate space.
///
/// `z` is central iff it operator-commutes with every element; for an
/// embedded JC-algebra this is equivalent to the ambient commutator
/// `[z, g]` vanishing on a Jordan generating set (the commutant of the
/// generators is an associative subalgebra containing the unit, hence
/// contains the whole Jordan closure). The kernel is read off a
/// normal-equations matrix, whose spectral gap at zero is many orders wide.
pub fn center(a: &EjcAlgebra, config: &Config) -> Result<RealSubspace> {
    let k = a.dim();
    let n_flat = a.ambient().herm_dim();
    let gens: Vec<AlgElement> = match a.generators() {
        Some(g) if !g.is_empty() => g.to_vec(),
        _ => (0..k).map(|i| a.basis_element(i).value).collect(),
    };
    let basis: Vec<AlgElement> = (0..k).map(|i| a.basis_element(i).value).collect();
    let mut normal = RMat::zeros(k, k);
    for g in &gens {
        let mut cg = RMat::zeros(n_flat, k);
        for (j, e) in basis.iter().enumerate() {
            // i[e_j, g] is Hermitian
            let comm = times_i(&e.mul(g).sub(&g.mul(e)));
            for (r, v) in comm.flatten_herm().iter().enumerate() {
                cg[(r, j)] = *v;
            }
        }
        normal = normal + cg.transpose() * &cg;
    }
    let (vals, vecs) = sym_eig(&normal);
    let lam_max = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cut = lam_max * config.tol_rank;
    let kernel: Vec<usize> = (0..k).filter(|&i| vals[i] <= cut).collect();
    let basis_rows = RMat::from_fn(kernel.len(), k, |i, j| vecs[(j, kernel[i])]);
    RealSubspace::from_orthonormal_rows(basis_rows, config.tol_orth * 1e2)
}

/// Minimal central idempotents: spectral projections of a random regular
/// central element. Regularity is certified by the projection count
/// matching the center dimension.
pub fn minimal_central_idempotents(
    a: &EjcAlgebra,
    config: &Config,
) -> Result<Vec<JordanElement>> {
    let z_space = center(a, config)?;
    let c = z_space.dim();
    if c <= 1 {
        return Ok(vec![a.unit()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xce27);
    for _ in 0..config.max_retries {
        let coeffs: Vec<f64> = (0..c).map(|_| standard_normal(&mut rng)).collect();
        let z = a.element_from_coords(&z_space.from_coords(&coeffs));
        let dec = match a.spectral(&z, config) {
            Ok(d) => d,
            Err(_) => continue,
        };
        if dec.projections.len() != c {
            continue;
        }
        let mut sum = a.ambient().zero();
        for p in &dec.projections {
            sum = sum.add(&p.value);
        }
        let unit = a.unit().value;
        if sum.sub(&unit).frob_norm() > config.tol_member * 1e2 * (1.0 + unit.frob_norm()) {
            continue;
        }
        return Ok(dec.projections);
    }
    Err(Error::DegenerateDraw { retries: config.max_retries })
}

/// Rank of a summand: the number of spectral groups of a generic element.
/// Collisions only undercount, so the maximum over a few draws converges.
fn summand_rank(a: &EjcAlgebra, config: &Config) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9a5c);
    let mut best = 0usize;
    let draws = 5usize.max(config.max_retries / 4);
    for _ in 0..draws {
        let z = a.random_element(&mut rng);
        if let Ok(dec) = a.spectral(&z, config) {
            best = best.max(dec.projections.len());
        }
    }
    if best == 0 {
        return Err(Error::FrameSearchFailed { retries: draws });
    }
    Ok(best)
}

/// Canonical label of a sorted summand list: `R16`, `C4 ⊕ C4`; runs of
/// three or more collapse to `4×R16` style.
pub fn canonical_label(summands: &[Summand]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < summands.len() {
        let lbl = summands[i].label();
        let mut j = i + 1;
        while j < summands.len() && summands[j].label() == lbl {
            j += 1;
        }
        let run = j - i;
        if run >= 3 {
            parts.push(format!("{run}×{lbl}"));
        } else {
            for _ in 0..run {
                parts.push(lbl.clone());
            }
        }
        i = j;
    }
    parts.join(" ⊕ ")
}

/// Decompose and identify. Summands are sorted family-then-parameter; the
/// central idempotent list is kept aligned with the summand order.
pub fn classify(a: &EjcAlgebra, config: &Config) -> Result<ClassificationReport> {
    let centrals = minimal_central_idempotents(a, config)?;
    let mut tagged: Vec<(Summand, JordanElement)> = Vec::with_capacity(centrals.len());
    for p in centrals {
        let sub = a.peirce_subalgebra(&p, config)?;
        let dimension = sub.dim();
        let rank = summand_rank(&sub, config)?;
        let (family, parameter) = fingerprint(rank, dimension)?;
        tagged.push((Summand { family, parameter, dimension, rank }, p));
    }
    tagged.sort_by_key(|(s, _)| s.sort_key());
    let total: usize = tagged.iter().map(|(s, _)| s.dimension).sum();
    if total != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "summand dimensions sum to {total}, algebra has dim {}",
            a.dim()
        )));
    }
    let rank = tagged.iter().map(|(s, _)| s.rank).sum();
    let (summands, central_idempotents): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
    let label = canonical_label(&summands);
    Ok(ClassificationReport {
        summands,
        canonical_label: label,
        dimension: a.dim(),
        rank,
        central_idempotents,
    })
}

/// Which table of expected results to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WhichTable {
    Table1,
    Table2,
    Table3,
}

impl WhichTable {
    fn name(&self) -> &'static str {
        match self {
            WhichTable::Table1 => "table1",
            WhichTable::Table2 => "table2",
            WhichTable::Table3 => "table3",
        }
    }
}

/// One verified cell. `expected == None` marks cells computed but not
/// printed in the source tables ("unverified"); they never fail the run.
#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cell: String,
    pub expected: Option<String>,
    pub computed: Option<String>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: String,
    pub max_param: usize,
    pub cells: Vec<CellReport>,
    pub all_passed: bool,
    pub elapsed_seconds: f64,
}

fn simple_label(family: SpecFamily, param: usize) -> String {
    // rank-2 aliases collapse to their matrix names; parameter 1 is ℝ
    match (family, param) {
        (_, 1) => "R1".into(),
        (SpecFamily::V, 2) => "R2".into(),
        (SpecFamily::V, 3) => "C2".into(),
        (SpecFamily::V, 5) => "Q2".into(),
        (f, p) => format!("{}{}", f.letter(), p),
    }
}

/// Expected standard-embedding composite F_m ⊙ G_n, defined for all m, n.
fn table3_expected(f: SpecFamily, m: usize, g: SpecFamily, n: usize) -> Option<String> {
    use SpecFamily::{C, Q, R};
    let lbl = |fam: SpecFamily, p: usize| Some(simple_label(fam, p));
    match (f, g) {
        (R, R) => lbl(R, m * n),
        (R, C) | (C, R) => lbl(C, m * n),
        (R, Q) | (Q, R) => lbl(Q, m * n),
        (C, C) => lbl(C, m * n),
        (C, Q) | (Q, C) => lbl(C, 2 * m * n),
        (Q, Q) => lbl(R, 4 * m * n),
        _ => None,
    }
}

/// Expected universal-embedding composite F_m ⊗̃ G_n for the cells the
/// source prints: quaternionic factors need parameter > 2 except for the
/// worked-out Q₂ ⊗̃ Q₂.
fn table2_expected(f: SpecFamily, m: usize, g: SpecFamily, n: usize) -> Option<String> {
    use SpecFamily::{C, Q, R};
    if (f == Q && m == 2) || (g == Q && n == 2) {
        if f == Q && g == Q && m == 2 && n == 2 {
            return Some("4×R16".into());
        }
        return None;
    }
    match (f, g) {
        (R, R) => Some(simple_label(R, m * n)),
        (R, C) | (C, R) => Some(simple_label(C, m * n)),
        (R, Q) | (Q, R) => Some(simple_label(Q, m * n)),
        (C, C) => {
            let s = simple_label(C, m * n);
            Some(format!("{s} ⊕ {s}"))
        }
        (C, Q) | (Q, C) => Some(simple_label(C, 2 * m * n)),
        (Q, Q) => Some(simple_label(R, 4 * m * n)),
        _ => None,
    }
}

/// Ambient block sizes of the two embeddings.
fn expected_blocks(family: SpecFamily, n: usize, kind: EmbeddingKind) -> Vec<usize> {
    let two_pow = |k: u32| 1usize << k;
    match (family, kind) {
        (SpecFamily::R, _) => vec![n],
        (SpecFamily::C, EmbeddingKind::Standard) => vec![n],
        (SpecFamily::C, EmbeddingKind::Universal) => vec![n, n],
        // Q₂ = V₅ has the Clifford universal algebra, not M₄
        (SpecFamily::Q, EmbeddingKind::Universal) if n == 2 => vec![4, 4],
        (SpecFamily::Q, _) => vec![2 * n],
        (SpecFamily::V, EmbeddingKind::Standard) => vec![two_pow((n / 2) as u32)],
        (SpecFamily::V, EmbeddingKind::Universal) => {
            if n % 2 == 0 {
                vec![two_pow((n / 2) as u32)]
            } else {
                let h = two_pow((n / 2) as u32);
                vec![h, h]
            }
        }
    }
}

fn push_cell(
    cells: &mut BTreeMap<String, CellReport>,
    cell: String,
    expected: Option<String>,
    computed: Result<String>,
) {
    let report = match computed {
        Ok(label) => {
            let verdict = match &expected {
                Some(e) if *e == label => "pass",
                Some(_) => "fail",
                None => "unverified",
            };
            CellReport {
                cell: cell.clone(),
                expected,
                computed: Some(label),
                verdict: verdict.into(),
                detail: None,
            }
        }
        Err(Error::GuardrailExceeded { dim, limit }) => CellReport {
            cell: cell.clone(),
            expected,
            computed: None,
            verdict: "skipped-guardrail".into(),
            detail: Some(format!("ambient dim {dim} over limit {limit}")),
        },
        Err(e) => CellReport {
            cell: cell.clone(),
            // unverified cells cannot fail the run, even when the
            // computation itself breaks down; the detail still records it
            verdict: if expected.is_some() { "fail" } else { "error" }.into(),
            expected,
            computed: None,
            detail: Some(e.to_string()),
        },
    };
    cells.insert(cell, report);
}

fn families() -> [SpecFamily; 3] {
    [SpecFamily::R, SpecFamily::C, SpecFamily::Q]
}

fn composite_cells(
    kind: EmbeddingKind,
    max_param: usize,
    expected_of: impl Fn(SpecFamily, usize, SpecFamily, usize) -> Option<String>,
    config: &Config,
) -> Result<BTreeMap<String, CellReport>> {
    let mut cells = BTreeMap::new();
    // compute each unordered pair once, emit both ordered cells
    let mut cache: BTreeMap<String, Result<String>> = BTreeMap::new();
    let sep = match kind {
        EmbeddingKind::Standard => "⊙",
        EmbeddingKind::Universal => "⊗̃",
    };
    for (fi, f) in families().iter().enumerate() {
        for m in 2..=max_param {
            for (gi, g) in families().iter().enumerate() {
                for n in 2..=max_param {
                    if (gi, n) < (fi, m) {
                        continue;
                    }
                    let key = format!("{}{}{}{}{}", f.letter(), m, sep, g.letter(), n);
                    let computed = compose_and_classify(*f, m, *g, n, kind, config);
                    cache.insert(key, computed);
                }
            }
        }
    }
    for (fi, f) in families().iter().enumerate() {
        for m in 2..=max_param {
            for (gi, g) in families().iter().enumerate() {
                for n in 2..=max_param {
                    let (a, b) = if (gi, n) < (fi, m) {
                        ((*g, n), (*f, m))
                    } else {
                        ((*f, m), (*g, n))
                    };
                    let key = format!("{}{}{}{}{}", a.0.letter(), a.1, sep, b.0.letter(), b.1);
                    let cell = format!("{}{}{}{}{}", f.letter(), m, sep, g.letter(), n);
                    let computed = match cache.get(&key).expect("cell computed above") {
                        Ok(s) => Ok(s.clone()),
                        Err(Error::GuardrailExceeded { dim, limit }) => {
                            Err(Error::GuardrailExceeded { dim: *dim, limit: *limit })
                        }
                        Err(e) => Err(Error::InvalidSpec(e.to_string())),
                    };
                    push_cell(&mut cells, cell, expected_of(*f, m, *g, n), computed);
                }
            }
        }
    }
    Ok(cells)
}

fn compose_and_classify(
    f: SpecFamily,
    m: usize,
    g: SpecFamily,
    n: usize,
    kind: EmbeddingKind,
    config: &Config,
) -> Result<String> {
    let a = build(&SimpleSpec::new(f, m)?, kind, config)?;
    let b = build(&SimpleSpec::new(g, n)?, kind, config)?;
    let comp = canonical_tensor(&a.algebra, &b.algebra, config)?;
    Ok(classify(&comp.algebra, config)?.canonical_label)
}

fn table1_cells(max_param: usize, config: &Config) -> BTreeMap<String, CellReport> {
    let mut cells = BTreeMap::new();
    let mut specs: Vec<(SpecFamily, usize)> = Vec::new();
    for f in families() {
        for n in 1..=max_param {
            specs.push((f, n));
        }
    }
    for n in 2..=(2 * max_param).max(2) {
        specs.push((SpecFamily::V, n));
    }
    for (f, n) in specs {
        for kind in [EmbeddingKind::Standard, EmbeddingKind::Universal] {
            if f == SpecFamily::Q && n == 1 && kind == EmbeddingKind::Universal {
                continue; // Q₁ = ℝ has no universal quaternionic form
            }
            let spec = match SimpleSpec::new(f, n) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let cell = format!("{}{}@{}", f.letter(), n, kind.suffix());
            let expected_shape = expected_blocks(f, n, kind);
            let expected_label = simple_label(f, n);
            let computed = build(&spec, kind, config).and_then(|built| {
                let got = built.algebra.ambient().blocks.clone();
                if got != expected_shape {
                    return Err(Error::InvalidSpec(format!(
                        "ambient blocks {got:?}, expected {expected_shape:?}"
                    )));
                }
                if let Some(phi) = &built.involution {
                    let fixed = phi.fixed_hermitian_subspace(config)?;
                    let sub = built.algebra.subspace();
                    if fixed.dim() != sub.dim()
                        || fixed.max_residual_of(sub) > config.tol_member * 1e2
                    {
                        return Err(Error::InvolutionDoesNotFix {
                            residual: fixed.max_residual_of(sub),
                        });
                    }
                }
                Ok(classify(&built.algebra, config)?.canonical_label)
            });
            push_cell(&mut cells, cell, Some(expected_label), computed);
        }
    }
    cells
}

/// Build, compose, classify, and compare against a table. Cells the source
/// does not print are reported as `unverified` and never count as failures;
/// guardrail refusals are `skipped-guardrail`.
pub fn verify_table(which: WhichTable, max_param: usize, config: &Config) -> Result<TableReport> {
    let start = Instant::now();
    let cells = match which {
        WhichTable::Table1 => table1_cells(max_param, config),
        WhichTable::Table2 => {
            composite_cells(EmbeddingKind::Universal, max_param, table2_expected, config)?
        }
        WhichTable::Table3 => {
            composite_cells(EmbeddingKind::Standard, max_param, table3_expected, config)?
        }
    };
    let cells: Vec<CellReport> = cells.into_values().collect();
    let all_passed = cells.iter().all(|c| c.verdict != "fail");
    Ok(TableReport {
        table: which.name().into(),
        max_param,
        cells,
        all_passed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composites::fixed_point_composite;
    use crate::constructors::{build_spec, parse_spec};

    fn cfg() -> Config {
        Config::default()
    }

    fn built(spec: &str, kind: EmbeddingKind) -> EjcAlgebra {
        let parsed = parse_spec(spec, kind).unwrap();
        build_spec(&parsed, &cfg()).unwrap().algebra
    }

    #[test]
    fn centers_of_simples_are_one_dimensional() {
        for spec in ["R3", "C2", "Q2", "V4"] {
            let a = built(spec, EmbeddingKind::Standard);
            let z = center(&a, &cfg()).unwrap();
            assert_eq!(z.dim(), 1, "{spec}");
        }
    }

    #[test]
    fn center_of_direct_sum_counts_summands() {
        let a = built("R2+C2", EmbeddingKind::Standard);
        assert_eq!(center(&a, &cfg()).unwrap().dim(), 2);
        let idems = minimal_central_idempotents(&a, &cfg()).unwrap();
        assert_eq!(idems.len(), 2);
        let sum = idems[0].value.add(&idems[1].value);
        assert!(sum.sub(&a.unit().value).frob_norm() < 1e-9);
        for p in &idems {
            assert!(p.check_projection(&cfg()).is_ok());
        }
    }

    #[test]
    fn classify_names_the_standard_simples() {
        for (spec, want) in [
            ("R3", "R3"),
            ("C3", "C3"),
            ("Q2", "Q2"),
            ("Q3", "Q3"),
            ("V4", "V4"),
            ("V5", "Q2"),
            ("V2", "R2"),
            ("V3", "C2"),
        ] {
            let a = built(spec, EmbeddingKind::Standard);
            let rep = classify(&a, &cfg()).unwrap();
            assert_eq!(rep.canonical_label, want, "{spec}");
        }
    }

    #[test]
    fn classify_direct_sum_merges_labels() {
        let a = built("C2+R2+R2", EmbeddingKind::Standard);
        let rep = classify(&a, &cfg()).unwrap();
        assert_eq!(rep.canonical_label, "R2 ⊕ R2 ⊕ C2");
        assert_eq!(rep.dimension, 3 + 3 + 4);
        assert_eq!(rep.rank, 6);
    }

    #[test]
    fn label_collapses_long_runs() {
        let s = |p: usize| Summand {
            family: SummandFamily::R,
            parameter: p,
            dimension: p * (p + 1) / 2,
            rank: p,
        };
        assert_eq!(canonical_label(&vec![s(16); 4]), "4×R16");
        assert_eq!(canonical_label(&[s(4), s(4)]), "R4 ⊕ R4");
        assert_eq!(canonical_label(&[s(2), s(2), s(2), s(3)]), "3×R2 ⊕ R3");
    }

    #[test]
    fn fingerprint_rejects_impossible_pairs() {
        assert!(matches!(
            fingerprint(2, 2),
            Err(Error::UnknownFingerprint { rank: 2, dim: 2 })
        ));
        assert!(matches!(fingerprint(4, 11), Err(Error::UnknownFingerprint { .. })));
        assert_eq!(fingerprint(3, 27).unwrap(), (SummandFamily::Exceptional, 3));
        assert_eq!(fingerprint(16, 136).unwrap(), (SummandFamily::R, 16));
    }

    #[test]
    fn q2_tensor_q2_standard_classifies_as_r16() {
        let c = cfg();
        let q2 = built("Q2", EmbeddingKind::Standard);
        let comp = canonical_tensor(&q2, &q2, &c).unwrap();
        let rep = classify(&comp.algebra, &c).unwrap();
        assert_eq!(rep.canonical_label, "R16");
        assert_eq!(rep.dimension, 136);
        assert_eq!(rep.rank, 16);
    }

    #[test]
    fn c2_universal_tensor_has_two_summands() {
        let c = cfg();
        let a = built("C2", EmbeddingKind::Universal);
        let comp = canonical_tensor(&a, &a, &c).unwrap();
        let rep = classify(&comp.algebra, &c).unwrap();
        assert_eq!(rep.canonical_label, "C4 ⊕ C4");
        assert_eq!(center(&comp.algebra, &c).unwrap().dim(), 2);
    }

    #[test]
    fn fixed_point_and_closure_classifications_agree_for_r2() {
        let c = cfg();
        let parsed = parse_spec("R2", EmbeddingKind::Universal).unwrap();
        let a = build_spec(&parsed, &c).unwrap();
        let phi = a.involution.as_ref().unwrap();
        let fp = fixed_point_composite(&a.algebra, phi, &a.algebra, phi, &c).unwrap();
        let cl = canonical_tensor(&a.algebra, &a.algebra, &c).unwrap();
        let lf = classify(&fp.algebra, &c).unwrap().canonical_label;
        let lc = classify(&cl.algebra, &c).unwrap().canonical_label;
        assert_eq!(lf, "R4");
        assert_eq!(lc, "R4");
    }

    #[test]
    fn q2_universal_tensor_splits_into_four_r16() {
        let c = cfg();
        let q2 = built("Q2", EmbeddingKind::Universal);
        assert_eq!(q2.ambient().blocks, vec![4, 4]);
        let comp = canonical_tensor(&q2, &q2, &c).unwrap();
        assert_eq!(comp.algebra.dim(), 4 * 136);
        let rep = classify(&comp.algebra, &c).unwrap();
        assert_eq!(rep.canonical_label, "4×R16");
        assert_eq!(rep.rank, 64);
    }

    #[test]
    fn table2_at_two_passes() {
        let rep = verify_table(WhichTable::Table2, 2, &cfg()).unwrap();
        assert!(rep.all_passed, "{:?}", rep.cells);
        let get = |cell: &str| {
            rep.cells
                .iter()
                .find(|c| c.cell == cell)
                .unwrap_or_else(|| panic!("missing {cell}"))
        };
        assert_eq!(get("C2⊗̃C2").computed.as_deref(), Some("C4 ⊕ C4"));
        assert_eq!(get("Q2⊗̃Q2").computed.as_deref(), Some("4×R16"));
        assert_eq!(get("Q2⊗̃Q2").verdict, "pass");
        assert_eq!(get("R2⊗̃Q2").verdict, "unverified");
    }

    #[test]
    fn table3_at_two_matches_the_nine_cells() {
        let rep = verify_table(WhichTable::Table3, 2, &cfg()).unwrap();
        assert!(rep.all_passed, "{:?}", rep.cells);
        assert_eq!(rep.cells.len(), 9);
        let labels: Vec<(&str, &str)> = rep
            .cells
            .iter()
            .map(|c| (c.cell.as_str(), c.computed.as_deref().unwrap()))
            .collect();
        for (cell, want) in [
            ("R2⊙R2", "R4"),
            ("R2⊙C2", "C4"),
            ("R2⊙Q2", "Q4"),
            ("C2⊙C2", "C4"),
            ("C2⊙Q2", "C8"),
            ("Q2⊙Q2", "R16"),
        ] {
            assert!(labels.contains(&(cell, want)), "{cell} → {want} missing: {labels:?}");
        }
    }

    #[test]
    fn table1_at_two_passes() {
        let rep = verify_table(WhichTable::Table1, 2, &cfg()).unwrap();
        assert!(rep.all_passed, "{:?}", rep.cells);
    }
}
