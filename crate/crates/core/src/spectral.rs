//! Spectral gaps of the simple and non-backtracking walks, the explicit
//! lower bound `c(D, β)` relating them, and certificates that check the
//! bound, the induced decay of `‖Sⁿ‖` on mean-zero edge functions, and the
//! converse inequality `β ≥ D⁻² (1 - λmax(S*²S²))`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};
use crate::graph::{validate, Graph};
use crate::linalg;
use crate::operators::{adjacency, nb_s};

/// Slack allowed when comparing measured quantities with their bounds.
pub const CERT_TOL: f64 = 1e-10;

/// `β = 1 - λmax(P² on π-mean-zero functions)`.
///
/// Works on `N = D^{-1/2} A D^{-1/2}`, which is symmetric and similar to
/// `P`, after deflating its top eigenvector `D^{1/2} 1`. Bipartite graphs
/// return exactly 0.
pub fn beta(g: &Graph) -> Result<f64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.is_bipartite() {
        return Ok(0.0);
    }
    let n = g.vertex_count();
    let sqrt_d: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
    let a = adjacency(g).to_dense();
    let mut sym = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / (sqrt_d[i] * sqrt_d[j]));
    let norm_sq: f64 = sqrt_d.iter().map(|x| x * x).sum();
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] -= sqrt_d[i] * sqrt_d[j] / norm_sq;
        }
    }
    let top = sym
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l * l)
        .fold(0.0, f64::max);
    Ok((1.0 - top).clamp(0.0, 1.0))
}

/// The constant `c(D, β)`, with `Q = D - 1`:
///
/// ```text
/// min( Q⁻⁴β / (2 (1 + Q⁻⁴β/6)²),  Q⁻⁴β / (1 + 6Q⁴/β)² )
/// ```
pub fn c_bound(dmax: usize, beta: f64) -> Result<f64> {
    if dmax < 3 {
        return Err(Error::BoundDegreeTooSmall(dmax));
    }
    if beta <= 0.0 {
        return Ok(0.0);
    }
    let q4 = ((dmax - 1) as f64).powi(4);
    let a = beta / q4;
    let first = a / (2.0 * (1.0 + a / 6.0).powi(2));
    let second = a / (1.0 + 6.0 * q4 / beta).powi(2);
    Ok(first.min(second))
}

/// λmax of `Π (S²)ᵀ S² Π`, with `Π` the projection off constant edge functions.
fn nb_top_eigenvalue(s: &DMatrix<f64>) -> f64 {
    let nb = s.nrows();
    let s2 = s * s;
    let proj = linalg::mean_zero_projector(nb);
    let m = &proj * (s2.transpose() * &s2) * &proj;
    linalg::max_symmetric_eigenvalue(m)
}

/// `1 - λmax(S*²S²)` on mean-zero edge functions. Bipartite graphs still get a
/// value; the gap hypotheses are reported by [`validate`].
pub fn nb_gap(g: &Graph) -> Result<f64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let s = nb_s(g).to_dense();
    Ok(1.0 - nb_top_eigenvalue(&s))
}

fn restricted_norm(power: &DMatrix<f64>) -> f64 {
    let proj = linalg::mean_zero_projector(power.nrows());
    linalg::spectral_norm(&proj * power * &proj)
}

fn check_connected_nonbipartite(g: &Graph) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.is_bipartite() {
        return Err(Error::Bipartite);
    }
    Ok(())
}

/// Largest singular value of `Π Sⁿ Π`.
pub fn restricted_norm_sn(g: &Graph, n: usize) -> Result<f64> {
    check_connected_nonbipartite(g)?;
    assert!(n >= 1, "power must be positive");
    let s = nb_s(g).to_dense();
    let mut power = s.clone();
    for _ in 1..n {
        power = &power * &s;
    }
    Ok(restricted_norm(&power))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryEntry {
    pub n: usize,
    pub norm: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCertificate {
    pub beta: f64,
    pub nb_gap: f64,
    pub c_bound: f64,
    pub dmax: usize,
    pub qmax: usize,
    /// `nb_gap >= c_bound`.
    pub theorem1_holds: bool,
    pub corollary_norms: Vec<CorollaryEntry>,
    /// `beta >= nb_gap / Dmax²`.
    pub remark22_holds: bool,
}

impl SpectralCertificate {
    pub fn all_hold(&self) -> bool {
        self.theorem1_holds && self.remark22_holds && self.corollary_norms.iter().all(|c| c.holds)
    }
}

/// Checks the gap bound, the `‖Sⁿ‖ ≤ (1 - c)^⌊n/4⌋` decay for each `n` in
/// `powers`, and the converse inequality on a graph meeting the hypotheses
/// (connected, non-bipartite, all degrees at least 3).
pub fn certify(g: &Graph, powers: &[usize]) -> Result<SpectralCertificate> {
    let report = validate(g);
    if !report.meets_gap_hypotheses {
        let mut failed = Vec::new();
        if !report.is_connected {
            failed.push(Hypothesis::Connected);
        }
        if report.is_bipartite {
            failed.push(Hypothesis::NonBipartite);
        }
        if report.min_degree < 3 {
            failed.push(Hypothesis::MinDegree3);
        }
        return Err(Error::HypothesesNotMet(failed));
    }

    let dmax = g.max_degree();
    let beta = beta(g)?;
    let c = c_bound(dmax, beta)?;
    let s = nb_s(g).to_dense();
    let gap = 1.0 - nb_top_eigenvalue(&s);

    let top = powers.iter().copied().max().unwrap_or(0);
    let mut corollary_norms = Vec::with_capacity(powers.len());
    let mut norms = vec![0.0; top + 1];
    let mut power = DMatrix::identity(s.nrows(), s.nrows());
    for (n, slot) in norms.iter_mut().enumerate().skip(1) {
        power = &power * &s;
        if powers.contains(&n) {
            *slot = restricted_norm(&power);
        }
    }
    for &n in powers {
        assert!(n >= 1, "power must be positive");
        let bound = (1.0 - c).powi((n / 4) as i32);
        corollary_norms.push(CorollaryEntry {
            n,
            norm: norms[n],
            bound,
            holds: norms[n] <= bound + CERT_TOL,
        });
    }

    Ok(SpectralCertificate {
        beta,
        nb_gap: gap,
        c_bound: c,
        dmax,
        qmax: dmax - 1,
        theorem1_holds: gap >= c - CERT_TOL,
        corollary_norms,
        remark22_holds: beta >= gap / (dmax * dmax) as f64 - CERT_TOL,
    })
}
