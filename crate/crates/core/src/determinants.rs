//! Determinant identities between the non-backtracking matrix and vertex
//! operators.
//!
//! * Green-function identity at `z` in the upper half-plane:
//!   `Π_{E} (-G(e)/p(e)) · det(ζ⁻¹ I - B_p) = det(z I - A_p - W) · Π_{V} (-G(x))`.
//! * Ihara–Bass: `det(I - uB) = (1 - u²)^{r-1} det(I - uA + u²Q)`.
//! * The intertwining relation `H (ζ⁻¹ I - Bᵀ) = (A - z) L` and the
//!   block-diagonal operator `K = (2m₂)⁻¹(ιζ - I)` with `det K = Π_E (-G(e))`.
//!
//! Determinants are taken as complex log-determinants from an LU
//! factorisation, so products over a few hundred edges neither overflow
//! nor underflow.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Weights};
use crate::green::{solve_zeta, ZetaField, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::linalg::{self, C64};
use crate::operators::{adjacency, lifts_and_projector, nb_b, reversal, schrodinger};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Pass threshold on relative errors and residuals.
    pub identity: f64,
    /// Stopping rule for the ζ fixed point.
    pub fixed_point: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            fixed_point: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl Tolerances {
    pub fn with_identity(identity: f64) -> Self {
        Self {
            identity,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Thm13,
    Thm13Weighted,
    IharaRegular,
    IharaGeneral,
    RegularReduction,
    Intertwining,
    #[serde(rename = "detK")]
    DetK,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Thm13 => "thm13",
            Identity::Thm13Weighted => "thm13_weighted",
            Identity::IharaRegular => "ihara_regular",
            Identity::IharaGeneral => "ihara_general",
            Identity::RegularReduction => "regular_reduction",
            Identity::Intertwining => "intertwining",
            Identity::DetK => "detK",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sample {
    /// The `z` or `u` at which both sides were evaluated.
    pub point: C64,
    pub lhs: C64,
    pub rhs: C64,
    pub rel_error: f64,
}

impl Sample {
    fn from_logs(point: C64, log_lhs: C64, log_rhs: C64) -> Self {
        Self {
            point,
            lhs: log_lhs.exp(),
            rhs: log_rhs.exp(),
            rel_error: linalg::rel_error_logs(log_lhs, log_rhs),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetReport {
    pub identity: Identity,
    pub samples: Vec<Sample>,
    pub max_rel_error: f64,
    pub tol: f64,
    pub passed: bool,
}

impl DetReport {
    fn new(identity: Identity, samples: Vec<Sample>, tol: f64) -> Self {
        let max_rel_error = samples.iter().map(|s| s.rel_error).fold(0.0, f64::max);
        Self {
            identity,
            samples,
            max_rel_error,
            tol,
            passed: max_rel_error < tol,
        }
    }

    /// The sample with the largest relative error.
    pub fn worst(&self) -> Option<&Sample> {
        self.samples
            .iter()
            .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
    }
}

fn shifted(m: &DMatrix<f64>, z: C64) -> DMatrix<C64> {
    // z I - m
    let mut out = -linalg::to_complex(m);
    for i in 0..out.nrows() {
        out[(i, i)] += z;
    }
    out
}

/// Both sides of the Green-function determinant identity, as logarithms,
/// from an already-solved field.
pub fn thm13_logs(g: &Graph, zf: &ZetaField) -> Result<(C64, C64)> {
    let weights = zf.weights.clone().unwrap_or_else(|| Weights::unit(g));
    let (a, b) = schrodinger(g, &weights)?;
    let mut lhs_matrix = -b.to_complex();
    for (e, zeta) in zf.zeta.iter().enumerate() {
        lhs_matrix[(e, e)] += zeta.inv();
    }
    let log_lhs = linalg::log_det(lhs_matrix)?
        + linalg::log_product(zf.ge.iter().zip(weights.p()).map(|(ge, p)| -ge / *p));
    let log_rhs = linalg::log_det(shifted(&a.to_dense(), zf.z))?
        + linalg::log_product(zf.gv.iter().map(|gv| -gv));
    Ok((log_lhs, log_rhs))
}

pub fn thm13_check(
    g: &Graph,
    weights: Option<&Weights>,
    z: C64,
    tol: &Tolerances,
) -> Result<DetReport> {
    let zf = solve_zeta(g, weights, z, tol.fixed_point, tol.max_iter)?;
    let (l, r) = thm13_logs(g, &zf)?;
    let tag = if weights.is_some() {
        Identity::Thm13Weighted
    } else {
        Identity::Thm13
    };
    Ok(DetReport::new(
        tag,
        vec![Sample::from_logs(z, l, r)],
        tol.identity,
    ))
}

/// `count` equally spaced points on the circle `|u| = 1/2`, offset from the
/// real axis.
pub fn u_circle(count: usize) -> Vec<C64> {
    (0..count)
        .map(|k| C64::from_polar(0.5, 2.0 * PI * (k as f64 + 0.5) / count as f64))
        .collect()
}

/// `2|B| + 1` points, more than the degree of either side.
pub fn default_u_samples(g: &Graph) -> Vec<C64> {
    u_circle(2 * g.directed_count() + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct IharaReport {
    pub general: DetReport,
    /// Present for regular graphs.
    pub regular: Option<DetReport>,
}

impl IharaReport {
    pub fn passed(&self) -> bool {
        self.general.passed && self.regular.as_ref().is_none_or(|r| r.passed)
    }
}

pub fn ihara_check(g: &Graph, u_samples: &[C64], tol: &Tolerances) -> Result<IharaReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let exponent = g.rank() - 1;
    if exponent < 0 {
        if let Some(u) = u_samples
            .iter()
            .find(|u| (C64::new(1.0, 0.0) - *u * *u).norm() == 0.0)
        {
            return Err(Error::SampleAtPole { re: u.re, im: u.im });
        }
    }
    let n = g.vertex_count();
    let nb = g.directed_count();
    let a = adjacency(g).to_complex();
    let b = nb_b(g).to_complex();
    let q: Vec<f64> = (0..n).map(|x| g.q(x) as f64).collect();
    let regular_q = g.regular_degree().map(|d| d as f64 - 1.0);
    let one = C64::new(1.0, 0.0);

    let mut general = Vec::with_capacity(u_samples.len());
    let mut regular = Vec::new();
    for &u in u_samples {
        let log_lhs = linalg::log_det(DMatrix::identity(nb, nb) - &b * u)?;
        let prefactor = (one - u * u).ln() * exponent as f64;
        let mut rhs = -&a * u;
        for x in 0..n {
            rhs[(x, x)] += one + u * u * q[x];
        }
        general.push(Sample::from_logs(
            u,
            log_lhs,
            prefactor + linalg::log_det(rhs)?,
        ));
        if let Some(qr) = regular_q {
            let mut rhs = -&a * u;
            for x in 0..n {
                rhs[(x, x)] += one + u * u * qr;
            }
            regular.push(Sample::from_logs(
                u,
                log_lhs,
                prefactor + linalg::log_det(rhs)?,
            ));
        }
    }
    Ok(IharaReport {
        general: DetReport::new(Identity::IharaGeneral, general, tol.identity),
        regular: regular_q.map(|_| DetReport::new(Identity::IharaRegular, regular, tol.identity)),
    })
}

/// On a `(q+1)`-regular graph, evaluates the left side of the Green-function
/// identity by substituting the constant `u = ζ` into the regular Ihara
/// formula, with `G(x) = ζ/(ζ²-1)` and `G(e) = ζ²/(ζ²-1)`. Compared with the
/// right side `det(zI - A) Π(-G(x))` and with the left side evaluated
/// directly from `det(ζ⁻¹ I - B)`.
pub fn regular_reduction_check(g: &Graph, z: C64, tol: &Tolerances) -> Result<DetReport> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let q = d as f64 - 1.0;
    let zf = solve_zeta(g, None, z, tol.fixed_point, tol.max_iter)?;
    let zeta = zf.zeta[0];
    let one = C64::new(1.0, 0.0);
    let gv = zeta / (zeta * zeta - one);
    let ge = zeta * zeta / (zeta * zeta - one);
    let n = g.vertex_count() as f64;
    let edges = g.edge_count() as f64;
    let nb = g.directed_count();
    let a = adjacency(g).to_complex();

    let mut ihara_rhs = -&a * zeta;
    for x in 0..g.vertex_count() {
        ihara_rhs[(x, x)] += one + zeta * zeta * q;
    }
    let log_det_i_minus_ub =
        (one - zeta * zeta).ln() * (g.rank() - 1) as f64 + linalg::log_det(ihara_rhs)?;
    // det(ζ⁻¹ I - B) = ζ^{-|B|} det(I - ζB)
    let via_ihara = (-ge).ln() * edges - zeta.ln() * nb as f64 + log_det_i_minus_ub;

    let rhs = linalg::log_det(shifted(&adjacency(g).to_dense(), z))? + (-gv).ln() * n;

    let mut direct = -nb_b(g).to_complex();
    for i in 0..nb {
        direct[(i, i)] += zeta.inv();
    }
    let direct = (-ge).ln() * edges + linalg::log_det(direct)?;

    Ok(DetReport::new(
        Identity::RegularReduction,
        vec![
            Sample::from_logs(z, via_ihara, rhs),
            Sample::from_logs(z, via_ihara, direct),
        ],
        tol.identity,
    ))
}

/// `H`, the |V| x |B| matrix of
/// `Hg(x) = Σ_{y~x} (1/2m(y)) (ζ(y,x) g(y,x) - g(x,y))`.
fn h_matrix(g: &Graph, zf: &ZetaField) -> DMatrix<C64> {
    let mut h = DMatrix::zeros(g.vertex_count(), g.directed_count());
    for e in 0..g.directed_count() {
        let (y, x) = g.directed(e);
        // e = (y, x) enters x with coefficient ζ(y,x)/2m(y) ...
        h[(x, e)] += zf.zeta[e] / (2.0 * zf.m[y]);
        // ... and leaves y, contributing -1/2m(x) to row y.
        h[(y, e)] -= (2.0 * zf.m[x]).inv();
    }
    h
}

/// `ζ⁻¹ I - Bᵀ` from a solved field. The operator relations below act with
/// the successor sum `Bᵀf(e) = Σ_{e ⇝ e'} f(e')`, which equals `ιBι`.
fn nb_resolvent_matrix(g: &Graph, zf: &ZetaField) -> DMatrix<C64> {
    let mut m = -nb_b(g).to_complex().transpose();
    for (e, zeta) in zf.zeta.iter().enumerate() {
        m[(e, e)] += zeta.inv();
    }
    m
}

/// Max-norm of `H (ζ⁻¹ I - Bᵀ) - (A - z) L` with `L = D (2m₁)⁻¹ P_o`, where
/// `P_o` averages over edges leaving a vertex.
pub fn intertwining_residual_of(g: &Graph, zf: &ZetaField) -> f64 {
    let n = g.vertex_count();
    let lifts = lifts_and_projector(g);
    let avg = lifts.origin_average.to_complex();
    let degree = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        g.degrees().iter().map(|&d| C64::new(d as f64, 0.0)),
    ));
    let inv_2m1 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        g.directed_count(),
        (0..g.directed_count()).map(|e| (2.0 * zf.m[g.origin(e)]).inv()),
    ));
    let l = degree * avg * inv_2m1;
    let left = h_matrix(g, zf) * nb_resolvent_matrix(g, zf);
    let right = -shifted(&adjacency(g).to_dense(), zf.z) * l;
    (left - right).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn intertwining_residual(g: &Graph, z: C64, tol: &Tolerances) -> Result<f64> {
    let zf = solve_zeta(g, None, z, tol.fixed_point, tol.max_iter)?;
    Ok(intertwining_residual_of(g, &zf))
}

/// `K = (2m₂)⁻¹(ιζ - I)`: `K δ_e = -δ_e / 2m(y) + ζ(x,y) δ_ι(e) / 2m(x)` for
/// `e = (x, y)`.
pub fn k_matrix(g: &Graph, zf: &ZetaField) -> DMatrix<C64> {
    let nb = g.directed_count();
    let mut k = DMatrix::zeros(nb, nb);
    for e in 0..nb {
        let (x, y) = g.directed(e);
        k[(e, e)] = -(2.0 * zf.m[y]).inv();
        k[(g.reversal(e), e)] = zf.zeta[e] / (2.0 * zf.m[x]);
    }
    k
}

/// Per undirected edge, the determinant of the 2x2 block of `K` and the
/// value `-G(e)` it should equal.
pub fn k_block_determinants(g: &Graph, zf: &ZetaField) -> Vec<(C64, C64)> {
    let k = k_matrix(g, zf);
    (0..g.edge_count())
        .map(|j| {
            let (e, f) = (2 * j, 2 * j + 1);
            let det = k[(e, e)] * k[(f, f)] - k[(e, f)] * k[(f, e)];
            (det, -zf.ge[j])
        })
        .collect()
}

pub fn det_k_check(g: &Graph, z: C64, tol: &Tolerances) -> Result<DetReport> {
    let zf = solve_zeta(g, None, z, tol.fixed_point, tol.max_iter)?;
    let lhs = linalg::log_det(k_matrix(g, &zf))?;
    let rhs = linalg::log_product(zf.ge.iter().map(|ge| -ge));
    Ok(DetReport::new(
        Identity::DetK,
        vec![Sample::from_logs(z, lhs, rhs)],
        tol.identity,
    ))
}

/// Orthonormal basis of edge functions whose sum over the edges leaving
/// each vertex vanishes.
pub fn origin_sum_kernel(g: &Graph) -> DMatrix<f64> {
    let avg = lifts_and_projector(g).origin_average.to_dense();
    linalg::null_space(&avg, 1e-12)
}

/// Max-norm of `Bᵀ f + ι f` over the kernel basis.
pub fn kernel_reversal_residual(g: &Graph) -> f64 {
    let kernel = origin_sum_kernel(g);
    let b = nb_b(g).to_dense().transpose();
    let iota = reversal(g).to_dense();
    (&b * &kernel + &iota * &kernel).amax()
}

/// Max-norm of `K (ζ⁻¹ I - Bᵀ) f + f` over the kernel basis.
pub fn kernel_action_residual(g: &Graph, zf: &ZetaField) -> f64 {
    let kernel = linalg::to_complex(&origin_sum_kernel(g));
    let image = k_matrix(g, zf) * nb_resolvent_matrix(g, zf) * &kernel;
    (image + kernel)
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::operators::laplacian_p;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn green_determinant_identity_small_graphs() {
        let tri = generate(Family::Cycle(3), 0).unwrap();
        let r = thm13_check(&tri, None, c(0.0, 2.0), &tol()).unwrap();
        assert!(r.max_rel_error < 1e-10, "{r:?}");
        let k4 = generate(Family::Complete(4), 0).unwrap();
        let r = thm13_check(&k4, None, c(1.0, 1.0), &tol()).unwrap();
        assert!(r.max_rel_error < 1e-10, "{r:?}");
        assert_eq!(r.identity, Identity::Thm13);
    }

    #[test]
    fn green_determinant_identity_random_walk_weights() {
        let k4 = generate(Family::Complete(4), 0).unwrap();
        let w = Weights::random_walk(&k4);
        let z = c(0.0, 2.0);
        let r = thm13_check(&k4, Some(&w), z, &tol()).unwrap();
        assert!(r.passed && r.max_rel_error < 1e-10, "{r:?}");
        assert_eq!(r.identity, Identity::Thm13Weighted);
        // det(z - A_p) = det(z - P) by similarity.
        let (ap, _) = schrodinger(&k4, &w).unwrap();
        let lhs = linalg::log_det(shifted(&ap.to_dense(), z)).unwrap();
        let rhs = linalg::log_det(shifted(&laplacian_p(&k4).to_dense(), z)).unwrap();
        assert!(linalg::rel_error_logs(lhs, rhs) < 1e-12);
    }

    fn poly_triangle(u: C64) -> (C64, C64) {
        let one = c(1.0, 0.0);
        let lhs = (one - u * u * u).powi(2);
        let rhs = (one - u).powi(2) * (one + u + u * u).powi(2);
        (lhs, rhs)
    }

    #[test]
    fn ihara_closed_forms() {
        let tri = generate(Family::Cycle(3), 0).unwrap();
        let us = default_u_samples(&tri);
        assert_eq!(us.len(), 13);
        let r = ihara_check(&tri, &us, &Tolerances::with_identity(1e-9)).unwrap();
        assert!(r.passed());
        for s in &r.general.samples {
            let (a, b) = poly_triangle(s.point);
            assert!(linalg::rel_error(s.lhs, a) < 1e-12);
            assert!(linalg::rel_error(s.rhs, b) < 1e-12);
        }

        let c4 = generate(Family::Cycle(4), 0).unwrap();
        let r = ihara_check(
            &c4,
            &default_u_samples(&c4),
            &Tolerances::with_identity(1e-9),
        )
        .unwrap();
        assert!(r.passed());
        let one = c(1.0, 0.0);
        for s in &r.general.samples {
            let u = s.point;
            let lhs = (one - u.powi(4)).powi(2);
            let rhs = (one - 2.0 * u + u * u) * (one + u * u).powi(2) * (one + 2.0 * u + u * u);
            assert!(linalg::rel_error(s.lhs, lhs) < 1e-12);
            assert!(linalg::rel_error(s.rhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn ihara_k4_and_irregular() {
        let k4 = generate(Family::Complete(4), 0).unwrap();
        let us: Vec<C64> = (0..25)
            .map(|k| C64::from_polar(0.5, 0.3 + k as f64 * 0.25))
            .collect();
        let r = ihara_check(&k4, &us, &Tolerances::with_identity(1e-9)).unwrap();
        assert!(r.passed() && r.regular.is_some());
        assert!(r.general.max_rel_error < 1e-9);

        let g = generate(
            Family::RandomMinDegree {
                n: 12,
                dmin: 2,
                dmax: 5,
            },
            4,
        )
        .unwrap();
        if g.is_connected() {
            let r = ihara_check(&g, &default_u_samples(&g), &tol()).unwrap();
            assert!(r.general.max_rel_error < 1e-9, "{:?}", r.general.worst());
        }
    }

    #[test]
    fn ihara_rejects_pole_on_trees() {
        let t = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            ihara_check(&t, &[c(1.0, 0.0)], &tol()),
            Err(Error::SampleAtPole { .. })
        ));
    }

    #[test]
    fn regular_reduction_examples() {
        for (fam, z) in [
            (Family::Complete(4), c(0.0, 2.0)),
            (Family::Petersen, c(1.0, 1.0)),
            (Family::Cycle(3), c(0.0, 2.0)),
        ] {
            let g = generate(fam, 0).unwrap();
            let r = regular_reduction_check(&g, z, &Tolerances::with_identity(1e-9)).unwrap();
            assert!(r.passed, "{fam}: {r:?}");
        }
        let g = generate(
            Family::RandomMinDegree {
                n: 10,
                dmin: 2,
                dmax: 4,
            },
            2,
        )
        .unwrap();
        if g.regular_degree().is_none() {
            assert!(matches!(
                regular_reduction_check(&g, c(0.0, 1.0), &tol()),
                Err(Error::NotRegular)
            ));
        }
    }

    #[test]
    fn intertwining_and_sensitivity() {
        let tri = generate(Family::Cycle(3), 0).unwrap();
        assert!(intertwining_residual(&tri, c(0.0, 2.0), &tol()).unwrap() < 1e-9);
        let k4 = generate(Family::Complete(4), 0).unwrap();
        let mut zf = solve_zeta(&k4, None, c(1.0, 1.0), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(intertwining_residual_of(&k4, &zf) < 1e-9);
        zf.zeta[5] = -zf.zeta[5];
        assert!(intertwining_residual_of(&k4, &zf) > 1e-2);
    }

    #[test]
    fn det_k_examples() {
        for fam in [Family::Cycle(3), Family::Complete(4)] {
            let g = generate(fam, 0).unwrap();
            let r = det_k_check(&g, c(0.0, 2.0), &tol()).unwrap();
            assert!(r.max_rel_error < 1e-10, "{r:?}");
            let zf = solve_zeta(&g, None, c(0.0, 2.0), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            for (j, (block, expect)) in k_block_determinants(&g, &zf).into_iter().enumerate() {
                let (x, y) = g.edges()[j];
                let e = 2 * j;
                let formula = (C64::new(1.0, 0.0) - zf.zeta[e] * zf.zeta[e + 1])
                    / (2.0 * zf.m[x] * 2.0 * zf.m[y]);
                assert!(linalg::rel_error(block, formula) < 1e-12);
                assert!(linalg::rel_error(block, expect) < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_characterization() {
        let g = generate(
            Family::RandomMinDegree {
                n: 9,
                dmin: 3,
                dmax: 5,
            },
            11,
        )
        .unwrap();
        let kernel = origin_sum_kernel(&g);
        assert_eq!(kernel.ncols(), g.directed_count() - g.vertex_count());
        assert!(kernel_reversal_residual(&g) < 1e-9);
        // The predecessor-sum B itself does not act as -ι on this kernel.
        let b = nb_b(&g).to_dense();
        let iota = reversal(&g).to_dense();
        assert!((&b * &kernel + &iota * &kernel).amax() > 1e-3);
        let zf = solve_zeta(&g, None, c(-0.5, 0.8), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(kernel_action_residual(&g, &zf) < 1e-9);
    }
}
