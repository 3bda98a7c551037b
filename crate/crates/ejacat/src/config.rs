/// Numerical tolerances and limits shared by every routine.
///
/// All comparisons are relative to the scale of the operands unless a field
/// says otherwise; `t.scaled(s)` is the absolute threshold for data of
/// Frobenius scale `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Hermiticity test: `‖m − m*‖ ≤ tol_herm · max(1, ‖m‖)`.
    pub tol_herm: f64,
    /// Orthonormality drift allowed in cached bases.
    pub tol_orth: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub tol_rank: f64,
    /// Subspace membership: residual `≤ tol_member · (1 + ‖v‖)`.
    pub tol_member: f64,
    /// Gap used when grouping eigenvalues into spectral projections.
    pub tol_spec: f64,
    /// Positivity slack: eigenvalues `≥ −tol_psd · ‖a‖` count as nonnegative.
    pub tol_psd: f64,
    /// Operator-commutation test threshold.
    pub tol_comm: f64,
    /// Refuse composites whose ambient Hermitian dimension exceeds this
    /// unless `force` is set.
    pub guardrail_dim: usize,
    /// Override the guardrail.
    pub force: bool,
    /// Random draws attempted before frame / central-element search gives up.
    pub max_retries: usize,
    /// Seed for every randomized routine; same seed, same output bytes.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_herm: 1e-10,
            tol_orth: 1e-10,
            tol_rank: 1e-8,
            tol_member: 1e-8,
            tol_spec: 1e-7,
            tol_psd: 1e-9,
            tol_comm: 1e-8,
            guardrail_dim: 4096,
            force: false,
            max_retries: 32,
            seed: 7,
        }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Config { seed, ..Config::default() }
    }
}
