//! Independent field-only oracle: evolves a truncated number-basis density
//! matrix under the squeeze generator G = (a†² − a²)/2, i.e. ρ̇ = λ[G, ρ],
//! to validate the hyperbolic closed forms by an entirely different method.
//!
//! The commutator is applied through its band structure (G couples n ↔ n+2),
//! so one right-hand-side evaluation costs O(D²), not O(D³).

use nalgebra::DMatrix;

use crate::params::require_finite_nonneg;
use crate::{Error, Result, C64};

/// Trace drift beyond this aborts an evolution; drift is flagged, never
/// silently renormalized.
pub const TRACE_TOL: f64 = 1e-10;
/// Largest accepted Hermiticity deviation max|ρ − ρ†|.
pub const HERM_TOL: f64 = 1e-10;
/// Eigenvalue slack for the positivity check: the smallest eigenvalue of ρ
/// may dip this far below zero before the state is rejected.
pub const PSD_SHIFT: f64 = 1e-8;
/// Population allowed in the top 10% of levels before truncation is declared
/// unreliable.
pub const TAIL_TOL: f64 = 1e-6;
/// Convergence declaration threshold on |⟨N⟩_D − ⟨N⟩_{D'}| between adjacent
/// scanned dimensions.
pub const CONVERGENCE_DELTA_N: f64 = 1e-8;
/// Fixed-step phase increment bound: steps are chosen so each covers at most
/// this much squeeze phase λt.
pub const MAX_STEP_PHASE: f64 = 1e-3;
/// Largest squeeze phase λt the truncated oracle accepts; photon number grows
/// like sinh², so larger phases need impractical dimensions.
pub const MAX_FOCK_SQUEEZE: f64 = 2.0;
/// Truncation dimension bounds; the ceiling caps the O(D²) memory and the
/// O(D²·steps) runtime of an evolution.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 1024;
/// Default truncation dimension, adequate for λt ≲ 0.5 at n_th ≲ 1;
/// convergence scans raise it as needed.
pub const DEFAULT_DIM: usize = 60;

/// Truncated number-basis density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    pub dim: usize,
    pub rho: DMatrix<C64>,
}

/// Photon observables of a [`FockDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    /// ⟨a†a⟩.
    pub mean_n: f64,
    /// ⟨a²⟩; real for the squeezed thermal states produced here.
    pub mean_a_sq: C64,
    /// Var(a†a).
    pub var_n: f64,
}

/// Per-dimension entry of a truncation convergence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub dim: usize,
    /// ⟨N⟩ after evolution at this dimension (trustworthy only when the tail
    /// is small; the scan reports it regardless).
    pub mean_n: f64,
    /// Largest top-10%-of-levels population seen during the evolution.
    pub tail_mass: f64,
    /// True for the smallest dimension whose ⟨N⟩ agrees with the next
    /// scanned dimension to within [`CONVERGENCE_DELTA_N`], with a clean tail.
    pub converged: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::Validation {
            field: "dim",
            message: format!("truncation dimension {dim} outside [{MIN_DIM}, {MAX_DIM}]"),
        });
    }
    Ok(())
}

/// Geometric thermal populations p_k ∝ (n_th/(1+n_th))^k, renormalized over
/// the truncation.
fn thermal_populations(n_th: f64, dim: usize) -> Vec<f64> {
    if n_th == 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return p;
    }
    let q = n_th / (1.0 + n_th);
    let mut p = Vec::with_capacity(dim);
    let mut w = 1.0 / (1.0 + n_th);
    for _ in 0..dim {
        p.push(w);
        w *= q;
    }
    let total: f64 = p.iter().sum();
    for w in &mut p {
        *w /= total;
    }
    p
}

/// Population in the top 10% of levels of a diagonal; always at least two
/// levels, so parity-sparse states (squeezing populates even levels only)
/// cannot hide growth in a single always-empty top slot.
fn tail_of(populations: &[f64]) -> f64 {
    let count = populations
        .len()
        .div_ceil(10)
        .max(2)
        .min(populations.len() - 1);
    populations[populations.len() - count..].iter().sum()
}

impl FockDensity {
    /// Vacuum projector |0⟩⟨0| at the given truncation.
    pub fn vacuum(dim: usize) -> Result<Self> {
        thermal_density(0.0, dim)
    }

    /// ⟨a†a⟩ from the diagonal.
    pub fn mean_n(&self) -> f64 {
        self.rho
            .diagonal()
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p.re)
            .sum()
    }

    /// Diagonal populations (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|p| p.re).collect()
    }

    /// Population in the top 10% of levels.
    pub fn tail_mass(&self) -> f64 {
        tail_of(&self.populations())
    }

    /// Check trace normalization, Hermiticity, and positivity (the latter up
    /// to a −[`PSD_SHIFT`] slack on the smallest eigenvalue).
    pub fn validate(&self) -> Result<()> {
        let trace: C64 = self.rho.diagonal().iter().sum();
        let trace_err = (trace - C64::new(1.0, 0.0)).norm();
        if trace_err > TRACE_TOL {
            return Err(Error::StateIntegrity(format!(
                "trace deviates from 1 by {trace_err:e} (bound {TRACE_TOL:e})"
            )));
        }
        let herm_err = (&self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_err > HERM_TOL {
            return Err(Error::StateIntegrity(format!(
                "Hermiticity deviation {herm_err:e} exceeds {HERM_TOL:e}"
            )));
        }
        // Complex Cholesky cannot flag indefiniteness (every pivot has a
        // complex square root), so positivity needs the Hermitian spectrum.
        let min_eig = self
            .rho
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_SHIFT {
            return Err(Error::StateIntegrity(format!(
                "density matrix has eigenvalue {min_eig:e}, below -{PSD_SHIFT:e}"
            )));
        }
        Ok(())
    }
}

/// Thermal state at occupancy n_th, truncated and renormalized at `dim`
/// levels. Rejects truncations whose discarded geometric tail is already
/// above [`TAIL_TOL`].
pub fn thermal_density(n_th: f64, dim: usize) -> Result<FockDensity> {
    require_finite_nonneg("n_th", n_th)?;
    check_dim(dim)?;
    let p = thermal_populations(n_th, dim);
    let tail = tail_of(&p);
    if tail > TAIL_TOL {
        return Err(Error::Truncation(format!(
            "thermal tail mass {tail:e} at dim {dim} exceeds {TAIL_TOL:e}; raise dim for n_th = {n_th}"
        )));
    }
    let mut rho = DMatrix::zeros(dim, dim);
    for (k, w) in p.into_iter().enumerate() {
        rho[(k, k)] = C64::new(w, 0.0);
    }
    Ok(FockDensity { dim, rho })
}

/// Ladder factors of the squeeze generator: G|n⟩ picks up
/// g2[n] = √((n+1)(n+2))/2 on the n ↔ n+2 couplings.
fn squeeze_band(dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|n| ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt() / 2.0)
        .collect()
}

/// out = [G, ρ] with G = (a†² − a²)/2, applied bandwise column by column.
fn apply_commutator(g2: &[f64], rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
    let d = rho.nrows();
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    for j in 0..d {
        let (col, s) = (&mut dst[j * d..(j + 1) * d], &src[j * d..(j + 1) * d]);
        // Row couplings: (Gρ)_ij = g2[i−2]ρ_{i−2,j} − g2[i]ρ_{i+2,j},
        // split into the two boundary bands and the two-sided interior.
        for i in 0..2.min(d) {
            col[i] = if i + 2 < d {
                -s[i + 2] * g2[i]
            } else {
                C64::new(0.0, 0.0)
            };
        }
        for i in 2..d.saturating_sub(2) {
            col[i] = s[i - 2] * g2[i - 2] - s[i + 2] * g2[i];
        }
        for i in d.saturating_sub(2).max(2)..d {
            col[i] = s[i - 2] * g2[i - 2];
        }
        // Column couplings: −(ρG)_ij = g2[j−2]ρ_{i,j−2} − g2[j]ρ_{i,j+2}.
        if j >= 2 {
            let left = &src[(j - 2) * d..(j - 1) * d];
            let g = g2[j - 2];
            for (c, l) in col.iter_mut().zip(left) {
                *c += l * g;
            }
        }
        if j + 2 < d {
            let right = &src[(j + 2) * d..(j + 3) * d];
            let g = g2[j];
            for (c, r) in col.iter_mut().zip(right) {
                *c -= r * g;
            }
        }
    }
}

fn add_scaled(dst: &mut [C64], src: &[C64], factor: f64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s * factor;
    }
}

fn set_base_plus_scaled(dst: &mut [C64], base: &[C64], src: &[C64], factor: f64) {
    for ((d, b), s) in dst.iter_mut().zip(base).zip(src) {
        *d = b + s * factor;
    }
}

/// Classic fourth-order fixed-step integration of ρ̇ = [G, ρ] over a squeeze
/// phase `r_theta`, monitoring trace and tail each step. Returns the evolved
/// matrix and the largest tail mass observed. When `enforce_tail` is set, a
/// tail breach aborts with the phase at which it happened.
fn evolve_inner(
    state: &FockDensity,
    r_theta: f64,
    steps: usize,
    enforce_tail: bool,
) -> Result<(DMatrix<C64>, f64)> {
    let d = state.dim;
    let g2 = squeeze_band(d);
    let mut rho = state.rho.clone();
    let mut k1 = DMatrix::zeros(d, d);
    let mut k2 = DMatrix::zeros(d, d);
    let mut k3 = DMatrix::zeros(d, d);
    let mut k4 = DMatrix::zeros(d, d);
    let mut tmp = DMatrix::zeros(d, d);
    let h = r_theta / steps as f64;
    let mut max_tail: f64 = tail_of(&state.populations());
    for step in 0..steps {
        apply_commutator(&g2, &rho, &mut k1);
        set_base_plus_scaled(tmp.as_mut_slice(), rho.as_slice(), k1.as_slice(), 0.5 * h);
        apply_commutator(&g2, &tmp, &mut k2);
        set_base_plus_scaled(tmp.as_mut_slice(), rho.as_slice(), k2.as_slice(), 0.5 * h);
        apply_commutator(&g2, &tmp, &mut k3);
        set_base_plus_scaled(tmp.as_mut_slice(), rho.as_slice(), k3.as_slice(), h);
        apply_commutator(&g2, &tmp, &mut k4);
        add_scaled(rho.as_mut_slice(), k1.as_slice(), h / 6.0);
        add_scaled(rho.as_mut_slice(), k2.as_slice(), h / 3.0);
        add_scaled(rho.as_mut_slice(), k3.as_slice(), h / 3.0);
        add_scaled(rho.as_mut_slice(), k4.as_slice(), h / 6.0);

        let phase = (step + 1) as f64 * h;
        let populations: Vec<f64> = rho.diagonal().iter().map(|p| p.re).collect();
        let trace: f64 = populations.iter().sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::StateIntegrity(format!(
                "trace drifted to 1 {:+e} at squeeze phase {phase:.6}",
                trace - 1.0
            )));
        }
        let tail = tail_of(&populations);
        max_tail = max_tail.max(tail);
        if enforce_tail && tail > TAIL_TOL {
            return Err(Error::Truncation(format!(
                "tail mass {tail:e} exceeds {TAIL_TOL:e} at squeeze phase {phase:.6}; raise dim above {d}"
            )));
        }
    }
    Ok((rho, max_tail))
}

/// Step count meeting the fixed-step policy (phase per step ≤ 10⁻³).
pub fn default_steps(r_theta: f64) -> usize {
    ((r_theta / MAX_STEP_PHASE).ceil() as usize).max(1)
}

/// Evolve a state through squeeze phase λt = `r_theta` in `steps` fixed
/// steps; the result is checked for trace, Hermiticity, and positivity.
pub fn evolve_squeeze(state: &FockDensity, r_theta: f64, steps: usize) -> Result<FockDensity> {
    require_finite_nonneg("r_theta", r_theta)?;
    if r_theta > MAX_FOCK_SQUEEZE {
        return Err(Error::Range(format!(
            "squeeze phase {r_theta:e} exceeds the truncated-oracle limit {MAX_FOCK_SQUEEZE}"
        )));
    }
    if steps == 0 {
        return Err(Error::Validation {
            field: "steps",
            message: "step count must be at least 1".into(),
        });
    }
    state.validate()?;
    if r_theta == 0.0 {
        return Ok(state.clone());
    }
    let (rho, _) = evolve_inner(state, r_theta, steps, true)?;
    let evolved = FockDensity {
        dim: state.dim,
        rho,
    };
    evolved.validate()?;
    Ok(evolved)
}

/// ⟨a†a⟩, ⟨a²⟩, and Var(a†a) of a state.
pub fn photon_stats(state: &FockDensity) -> PhotonStats {
    let d = state.dim;
    let mut mean_n = 0.0;
    let mut mean_n_sq = 0.0;
    for (k, p) in state.rho.diagonal().iter().enumerate() {
        mean_n += k as f64 * p.re;
        mean_n_sq += (k as f64) * (k as f64) * p.re;
    }
    // tr(a²ρ) picks up the second subdiagonal: Σ √((n+1)(n+2))·ρ_{n+2,n}.
    let mut mean_a_sq = C64::new(0.0, 0.0);
    for n in 0..d.saturating_sub(2) {
        let w = ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt();
        mean_a_sq += state.rho[(n + 2, n)] * w;
    }
    PhotonStats {
        mean_n,
        mean_a_sq,
        var_n: mean_n_sq - mean_n * mean_n,
    }
}

/// Evolve a thermal state at each dimension in `dims` (ascending) and report
/// ⟨N⟩ and tail mass per dimension. The scan stops early at the first
/// dimension whose ⟨N⟩ matches the next one to [`CONVERGENCE_DELTA_N`] with
/// tails under [`TAIL_TOL`]; that dimension is flagged converged. Dimensions
/// too small for the state are reported with their (unreliable) numbers
/// rather than failing the scan.
pub fn convergence_scan(n_th: f64, r_theta: f64, dims: &[usize]) -> Result<Vec<TruncationReport>> {
    require_finite_nonneg("n_th", n_th)?;
    require_finite_nonneg("r_theta", r_theta)?;
    if r_theta > MAX_FOCK_SQUEEZE {
        return Err(Error::Range(format!(
            "squeeze phase {r_theta:e} exceeds the truncated-oracle limit {MAX_FOCK_SQUEEZE}"
        )));
    }
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation {
            field: "dims",
            message: "dimension list must be non-empty and strictly ascending".into(),
        });
    }
    for &dim in dims {
        check_dim(dim)?;
    }
    let steps = default_steps(r_theta);
    let mut reports: Vec<TruncationReport> = Vec::with_capacity(dims.len());
    for &dim in dims {
        let populations = thermal_populations(n_th, dim);
        let mut rho = DMatrix::zeros(dim, dim);
        for (k, w) in populations.into_iter().enumerate() {
            rho[(k, k)] = C64::new(w, 0.0);
        }
        let state = FockDensity { dim, rho };
        let (evolved, max_tail) = if r_theta == 0.0 {
            let tail = state.tail_mass();
            (state.rho, tail)
        } else {
            evolve_inner(&state, r_theta, steps, false)?
        };
        let mean_n = FockDensity { dim, rho: evolved }.mean_n();
        reports.push(TruncationReport {
            dim,
            mean_n,
            tail_mass: max_tail,
            converged: false,
        });
        let n = reports.len();
        if n >= 2 {
            let (prev, curr) = (reports[n - 2], reports[n - 1]);
            if (curr.mean_n - prev.mean_n).abs() < CONVERGENCE_DELTA_N
                && prev.tail_mass < TAIL_TOL
                && curr.tail_mass < TAIL_TOL
            {
                reports[n - 2].converged = true;
                break;
            }
        }
    }
    Ok(reports)
}
