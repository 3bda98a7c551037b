//! Concrete simple EJC-algebras at their standard and universal embeddings:
//! real symmetric `R_n`, complex Hermitian `C_n`, quaternionic Hermitian
//! `Q_n` via the symplectic block pattern, and spin factors `V_n` from
//! Pauli/Clifford generator chains. Plus direct sums and the spec parser.
//!
//! Quaternions never appear as a scalar type: `Q_n` is the space of
//! matrices `[[Γ₁, Γ₂], [−Γ̄₂, Γ̄₁]]` with `Γ₁` Hermitian and `Γ₂`
//! antisymmetric.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jordan_core::{EjcAlgebra, JordanElement};
use crate::linalg::{CMatrix, RealSubspace, C64, SQRT_2};
use crate::star_algebra::{
    direct_sum_algebras, direct_sum_elements, Involution, StarAlgebra,
};

/// Which embedding of the simple algebra to construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingKind {
    Standard,
    Universal,
}

impl EmbeddingKind {
    pub fn suffix(&self) -> &'static str {
        match self {
            EmbeddingKind::Standard => "std",
            EmbeddingKind::Universal => "universal",
        }
    }
}

/// One simple JNW family member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimpleSpec {
    pub family: Family,
    pub param: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    R,
    C,
    Q,
    V,
}

impl Family {
    pub fn letter(&self) -> char {
        match self {
            Family::R => 'R',
            Family::C => 'C',
            Family::Q => 'Q',
            Family::V => 'V',
        }
    }
}

impl SimpleSpec {
    pub fn new(family: Family, param: usize) -> Result<SimpleSpec> {
        let ok = match family {
            Family::R | Family::C | Family::Q => param >= 1,
            Family::V => param >= 2,
        };
        if !ok {
            return Err(Error::InvalidSpec(format!(
                "{}{} is out of range",
                family.letter(),
                param
            )));
        }
        Ok(SimpleSpec { family, param })
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.family.letter(), self.param)
    }

    /// Real dimension of the simple algebra.
    pub fn dim(&self) -> usize {
        let n = self.param;
        match self.family {
            Family::R => n * (n + 1) / 2,
            Family::C => n * n,
            Family::Q => n * (2 * n - 1),
            Family::V => n + 1,
        }
    }
}

/// Result of a build: the algebra plus its canonical involution when the
/// embedding has one.
pub struct BuiltAlgebra {
    pub algebra: EjcAlgebra,
    pub involution: Option<Involution>,
}

/// Parsed CLI-style spec: a direct sum of embedded simples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSpec {
    pub terms: Vec<(SimpleSpec, EmbeddingKind)>,
}

impl ParsedSpec {
    pub fn label(&self) -> String {
        self.terms
            .iter()
            .map(|(s, k)| format!("{}@{}", s.label(), k.suffix()))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Grammar: terms joined by `+`; each term is a family letter, a positive
/// integer, and an optional `@std` / `@universal` suffix. Case-insensitive.
pub fn parse_spec(text: &str, default_kind: EmbeddingKind) -> Result<ParsedSpec> {
    let mut terms = Vec::new();
    for raw in text.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(Error::ParseError(format!("empty term in spec '{text}'")));
        }
        let (core, kind) = match term.split_once('@') {
            None => (term, default_kind),
            Some((c, k)) => {
                let kind = match k.trim().to_ascii_lowercase().as_str() {
                    "std" | "standard" => EmbeddingKind::Standard,
                    "universal" | "univ" => EmbeddingKind::Universal,
                    other => {
                        return Err(Error::ParseError(format!("unknown embedding '{other}'")))
                    }
                };
                (c.trim(), kind)
            }
        };
        let mut chars = core.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('R') => Family::R,
            Some('C') => Family::C,
            Some('Q') => Family::Q,
            Some('V') => Family::V,
            _ => return Err(Error::ParseError(format!("unknown family in '{term}'"))),
        };
        let digits: String = chars.collect();
        let param: usize = digits
            .parse()
            .map_err(|_| Error::ParseError(format!("bad parameter in '{term}'")))?;
        let spec =
            SimpleSpec::new(fam, param).map_err(|e| Error::ParseError(e.to_string()))?;
        terms.push((spec, kind));
    }
    Ok(ParsedSpec { terms })
}

/// Standard Pauli matrices. `σ_z = diag(1, −1)`, `σ_x` the bit flip, and
/// `σ_y = [[0, −i], [i, 0]]`.
pub fn pauli_0() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).expect("shape")
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("shape")
}

pub fn pauli_y() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    m
}

pub fn kron_chain(factors: &[CMatrix]) -> CMatrix {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kron(f);
    }
    out
}

/// Clifford generator `t_p`: `⌈p/2⌉−1` copies of `σ_y`, then `σ_z` for odd
/// `p` or `σ_x` for even, padded with identities to `⌊n/2⌋` factors for
/// even `n` and `⌈n/2⌉` for odd `n`.
fn t_generator(n: usize, p: usize) -> CMatrix {
    let lead = p.div_ceil(2) - 1;
    let total = if n % 2 == 0 { n / 2 } else { n.div_ceil(2) };
    let tail = total - p.div_ceil(2);
    let mut factors = Vec::with_capacity(total);
    for _ in 0..lead {
        factors.push(pauli_y());
    }
    factors.push(if p % 2 == 1 { pauli_z() } else { pauli_x() });
    for _ in 0..tail {
        factors.push(pauli_0());
    }
    kron_chain(&factors)
}

/// Standard generator `v_p` for odd `n`: as `t_p` but with `⌊n/2⌋` factors,
/// and `v_n = σ_y^{⊗⌊n/2⌋}`.
fn v_generator_odd(n: usize, p: usize) -> CMatrix {
    let half = n / 2;
    if p == n {
        return kron_chain(&vec![pauli_y(); half]);
    }
    let lead = p.div_ceil(2) - 1;
    let tail = half - p.div_ceil(2);
    let mut factors = Vec::with_capacity(half);
    for _ in 0..lead {
        factors.push(pauli_y());
    }
    factors.push(if p % 2 == 1 { pauli_z() } else { pauli_x() });
    for _ in 0..tail {
        factors.push(pauli_0());
    }
    kron_chain(&factors)
}

/// Spin generators for `V_n`. Standard: `n` anticommuting Hermitian
/// unitaries in `M_{2^{⌊n/2⌋}}`. Universal: the Clifford generators, split
/// into `M_{2^k} ⊕ M_{2^k}` along the central volume element when `n` is
/// odd.
pub fn spin_generators(n: usize, kind: EmbeddingKind) -> Result<Vec<crate::star_algebra::AlgElement>> {
    if n < 2 {
        return Err(Error::InvalidSpec("spin factors need n ≥ 2".into()));
    }
    if n % 2 == 0 || kind == EmbeddingKind::Standard {
        let mats: Vec<CMatrix> = if n % 2 == 0 {
            (1..=n).map(|p| t_generator(n, p)).collect()
        } else {
            (1..=n).map(|p| v_generator_odd(n, p)).collect()
        };
        let amb = StarAlgebra::single(mats[0].nrows());
        return mats.into_iter().map(|m| amb.inject(0, m)).collect();
    }
    // odd n at the universal embedding
    let k = n / 2;
    let ts: Vec<CMatrix> = (1..=n).map(|p| t_generator(n, p)).collect();
    let dim = ts[0].nrows(); // 2^{k+1}
    let mut vol = ts[0].clone();
    for t in &ts[1..] {
        vol = vol.mul(t);
    }
    // phase making the volume element Hermitian with square one
    if (n * (n - 1) / 2) % 2 == 1 {
        vol = vol.scale(C64::new(0.0, 1.0));
    }
    let herm_defect = vol.hermitian_defect();
    let sq_defect = vol.mul(&vol).sub(&CMatrix::identity(dim)).frob_norm();
    let central = ts
        .iter()
        .map(|t| vol.mul(t).sub(&t.mul(&vol)).frob_norm())
        .fold(0.0f64, f64::max);
    if herm_defect > 1e-10 || sq_defect > 1e-10 || central > 1e-10 {
        return Err(Error::InvalidSpec(format!(
            "volume element failed checks: herm {herm_defect:.1e} sq {sq_defect:.1e} central {central:.1e}"
        )));
    }
    let (vals, vecs) = vol.eig_hermitian(1e-10)?;
    let half = dim / 2;
    if !(vals[half - 1] > 0.5 && vals[half] < -0.5) {
        return Err(Error::InvalidSpec("volume element is not balanced ±1".into()));
    }
    // columns 0..half span the +1 eigenspace, half..dim the −1 eigenspace
    let plus = CMatrix::from_fn(dim, half, |i, j| vecs.get(i, j));
    let minus = CMatrix::from_fn(dim, half, |i, j| vecs.get(i, half + j));
    let amb = StarAlgebra::new(vec![half, half])?;
    let mut out = Vec::with_capacity(n);
    for t in &ts {
        let bp = plus.adjoint().mul(t).mul(&plus);
        let bm = minus.adjoint().mul(t).mul(&minus);
        let mut e = amb.zero();
        e.blocks[0] = bp;
        e.blocks[1] = bm;
        out.push(e);
    }
    let _ = k;
    Ok(out)
}

/// Build one simple algebra at the requested embedding, with its canonical
/// involution where one exists.
pub fn build(spec: &SimpleSpec, kind: EmbeddingKind, config: &Config) -> Result<BuiltAlgebra> {
    let n = spec.param;
    let label = format!("{}@{}", spec.label(), kind.suffix());
    match (spec.family, kind) {
        (Family::R, _) => {
            let ambient = StarAlgebra::single(n);
            let mut rows = Vec::new();
            for i in 0..n {
                for j in i..n {
                    let mut m = CMatrix::zeros(n, n);
                    if i == j {
                        m.set(i, i, C64::new(1.0, 0.0));
                    } else {
                        let v = C64::new(1.0 / SQRT_2, 0.0);
                        m.set(i, j, v);
                        m.set(j, i, v);
                    }
                    rows.push(ambient.inject(0, m)?.flatten_herm());
                }
            }
            let sub = RealSubspace::span(&rows, config.tol_rank)?;
            let algebra = EjcAlgebra::new(ambient.clone(), sub, Some(label), config)?;
            let involution = Some(Involution::transpose(&ambient, config)?);
            Ok(BuiltAlgebra { algebra, involution })
        }
        (Family::C, EmbeddingKind::Standard) => {
            let ambient = StarAlgebra::single(n);
            let rows: Vec<Vec<f64>> =
                ambient.hermitian_basis().iter().map(|e| e.flatten_herm()).collect();
            let sub = RealSubspace::span(&rows, config.tol_rank)?;
            let algebra = EjcAlgebra::new(ambient, sub, Some(label), config)?;
            Ok(BuiltAlgebra { algebra, involution: None })
        }
        (Family::C, EmbeddingKind::Universal) => {
            let ambient = StarAlgebra::new(vec![n, n])?;
            let single = StarAlgebra::single(n);
            let mut rows = Vec::new();
            for h in single.hermitian_basis() {
                let m = &h.blocks[0];
                let mut e = ambient.zero();
                e.blocks[0] = m.scale(C64::new(1.0 / SQRT_2, 0.0));
                e.blocks[1] = m.transpose().scale(C64::new(1.0 / SQRT_2, 0.0));
                rows.push(e.flatten_herm());
            }
            let sub = RealSubspace::span(&rows, config.tol_rank)?;
            let algebra = EjcAlgebra::new(ambient.clone(), sub, Some(label), config)?;
            let involution = Some(Involution::swap_transpose(&ambient, config)?);
            Ok(BuiltAlgebra { algebra, involution })
        }
        (Family::Q, EmbeddingKind::Standard) => build_q_sympl(n, label, config),
        (Family::Q, EmbeddingKind::Universal) => {
            if n > 2 {
                // the standard symplectic image is already universal
                build_q_sympl(n, label, config)
            } else if n == 2 {
                // transport the V₅ universal construction; the generators
                // match the quaternionic Paulis s₁…s₅
                let gens = spin_generators(5, EmbeddingKind::Universal)?;
                let algebra = spin_algebra_from(gens, label, config)?;
                Ok(BuiltAlgebra { algebra, involution: None })
            } else {
                Err(Error::InvalidSpec("universal Q_n needs n ≥ 2".into()))
            }
        }
        (Family::V, k) => {
            let gens = spin_generators(n, k)?;
            let algebra = spin_algebra_from(gens, label, config)?;
            Ok(BuiltAlgebra { algebra, involution: None })
        }
    }
}

/// Symplectic image of quaternionic Hermitian matrices in `M_{2n}` with the
/// canonical involution `a ↦ −J aᵀ J`.
fn build_q_sympl(n: usize, label: String, config: &Config) -> Result<BuiltAlgebra> {
    let ambient = StarAlgebra::single(2 * n);
    let single = StarAlgebra::single(n);
    let mut rows = Vec::new();
    let s = C64::new(1.0 / SQRT_2, 0.0);
    // Γ₁ Hermitian: [[h, 0], [0, h̄]]
    for h in single.hermitian_basis() {
        let m = &h.blocks[0];
        let mut big = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                big.set(i, j, m.get(i, j) * s);
                big.set(n + i, n + j, m.get(i, j).conj() * s);
            }
        }
        rows.push(ambient.inject(0, big)?.flatten_herm());
    }
    // Γ₂ antisymmetric: [[0, g], [−ḡ, 0]] with g = (E_pq − E_qp)/√2 and
    // i(E_pq − E_qp)/√2
    for p in 0..n {
        for q in (p + 1)..n {
            for &imag in &[false, true] {
                let val = if imag { C64::new(0.0, 1.0 / SQRT_2) } else { C64::new(1.0 / SQRT_2, 0.0) };
                let mut g = CMatrix::zeros(n, n);
                g.set(p, q, val);
                g.set(q, p, -val);
                let mut big = CMatrix::zeros(2 * n, 2 * n);
                for i in 0..n {
                    for j in 0..n {
                        big.set(i, n + j, g.get(i, j) * s);
                        big.set(n + i, j, -g.get(i, j).conj() * s);
                    }
                }
                rows.push(ambient.inject(0, big)?.flatten_herm());
            }
        }
    }
    let sub = RealSubspace::span(&rows, config.tol_rank)?;
    let algebra = EjcAlgebra::new(ambient.clone(), sub, Some(label), config)?;
    let involution = Some(Involution::symplectic(&ambient, config)?);
    Ok(BuiltAlgebra { algebra, involution })
}

/// Wrap spin generators into the algebra `span{u, s_1, …, s_n}`.
fn spin_algebra_from(
    gens: Vec<crate::star_algebra::AlgElement>,
    label: String,
    config: &Config,
) -> Result<EjcAlgebra> {
    let ambient = gens[0].parent.clone();
    let unit = ambient.unit();
    let mut rows = vec![unit.flatten_herm()];
    for g in &gens {
        rows.push(g.flatten_herm());
    }
    let sub = RealSubspace::span(&rows, config.tol_rank)?;
    EjcAlgebra::with_generators(ambient, sub, Some(label), gens, config)
}

/// The six quaternionic Pauli matrices in their symplectic image, as
/// elements of `Q₂` at the standard embedding:
/// `s₀ = 1`, `s₁ = σ₀⊗σ_z`, `s₂ = σ₀⊗σ_x`, `s₃ = σ_z⊗σ_y`,
/// `s₄ = σ_y⊗σ_y`, `s₅ = σ_x⊗σ_y` (block form `[[0, σ_y], [σ_y, 0]]`).
pub fn quaternionic_pauli(config: &Config) -> Result<Vec<JordanElement>> {
    let built = build(&SimpleSpec::new(Family::Q, 2)?, EmbeddingKind::Standard, config)?;
    let alg = built.algebra;
    let mats = quaternionic_pauli_matrices();
    let mut out = Vec::with_capacity(6);
    for m in mats {
        let e = alg.ambient().inject(0, m)?;
        out.push(alg.element_from_value(e, config)?);
    }
    Ok(out)
}

/// Raw 4×4 matrices of `s₀ … s₅`.
pub fn quaternionic_pauli_matrices() -> Vec<CMatrix> {
    vec![
        pauli_0().kron(&pauli_0()),
        pauli_0().kron(&pauli_z()),
        pauli_0().kron(&pauli_x()),
        pauli_z().kron(&pauli_y()),
        pauli_y().kron(&pauli_y()),
        pauli_x().kron(&pauli_y()),
    ]
}

/// Direct sum of two embedded algebras.
pub fn direct_sum_ejc(a: &EjcAlgebra, b: &EjcAlgebra, config: &Config) -> Result<EjcAlgebra> {
    let ambient = direct_sum_algebras(a.ambient(), b.ambient());
    let zero_a = a.ambient().zero();
    let zero_b = b.ambient().zero();
    let mut rows = Vec::with_capacity(a.dim() + b.dim());
    for i in 0..a.dim() {
        let e = a.basis_element(i).value;
        rows.push(direct_sum_elements(&e, &zero_b).flatten_herm());
    }
    for i in 0..b.dim() {
        let e = b.basis_element(i).value;
        rows.push(direct_sum_elements(&zero_a, &e).flatten_herm());
    }
    let sub = RealSubspace::span(&rows, config.tol_rank)?;
    let label = match (a.label(), b.label()) {
        (Some(x), Some(y)) => Some(format!("{x}+{y}")),
        _ => None,
    };
    EjcAlgebra::new(ambient, sub, label, config)
}

/// Build a full parsed spec (direct sums included). The involution is the
/// direct sum of the canonical ones and present only if every summand has
/// one.
pub fn build_spec(parsed: &ParsedSpec, config: &Config) -> Result<BuiltAlgebra> {
    if parsed.terms.is_empty() {
        return Err(Error::EmptyInput("spec has no terms"));
    }
    let mut built = build(&parsed.terms[0].0, parsed.terms[0].1, config)?;
    for (spec, kind) in &parsed.terms[1..] {
        let next = build(spec, *kind, config)?;
        let algebra = direct_sum_ejc(&built.algebra, &next.algebra, config)?;
        let involution = match (&built.involution, &next.involution) {
            (Some(p), Some(q)) => Some(Involution::direct_sum(p, q, config)?),
            _ => None,
        };
        built = BuiltAlgebra { algebra, involution };
    }
    Ok(built)
}
