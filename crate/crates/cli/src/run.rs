use std::fs;

use nonback::determinants::{
    default_u_samples, det_k_check, ihara_check, intertwining_residual, thm13_check, u_circle,
    DetReport, Tolerances,
};
use nonback::green::{solve_zeta, DEFAULT_MAX_ITER, DEFAULT_TOL};
use nonback::linalg::eigenvalues;
use nonback::operators::{adjacency, decomposition_report, laplacian_p, nb_b, nb_s};
use nonback::spectral::{beta, nb_gap};
use nonback::{
    certify, generate, parse_edge_list, to_edge_list, validate, Error, Graph, Weights, C64,
};
use serde_json::{json, Value};

use crate::config::{Command, GraphSource, RunConfig};

/// Failure modes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verification(String),
    NonConvergence(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Verification(m) | Failure::NonConvergence(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            Error::InconsistentEdgeGreen { .. } | Error::SingularMatrix => {
                Failure::Verification(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// One CSV row per (identity, sample).
#[derive(Debug, Clone)]
pub struct SampleRow {
    pub identity: String,
    pub point: C64,
    pub lhs: Option<C64>,
    pub rhs: Option<C64>,
    pub error: f64,
    pub passed: bool,
}

#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub graph_summary: Value,
    pub results: Value,
    pub passed: bool,
    /// Populated for identity checks; other commands flatten `results`.
    pub rows: Vec<SampleRow>,
    /// Worst failing identity, for the error message.
    pub failure: Option<String>,
}

impl Report {
    pub fn document(&self) -> Value {
        json!({
            "command": self.command,
            "graph_summary": self.graph_summary,
            "results": self.results,
            "verdict": if self.passed { "pass" } else { "fail" },
        })
    }
}

pub enum Outcome {
    Report(Report),
    /// `generate` without `--out` prints the edge list itself.
    EdgeList(String),
}

fn load_graph(source: &GraphSource) -> Result<(Graph, String), Failure> {
    match source {
        GraphSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok((parse_edge_list(&text)?, path.display().to_string()))
        }
        GraphSource::Generated { family, seed } => {
            Ok((generate(*family, *seed)?, format!("{family} (seed {seed})")))
        }
    }
}

fn load_weights(cfg: &RunConfig, g: &Graph) -> Result<Option<Weights>, Failure> {
    let Some(path) = &cfg.weights else {
        return Ok(None);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(Some(Weights::from_json(g, &text)?))
}

fn summary(g: &Graph, source: &str) -> Value {
    json!({
        "source": source,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "directed_edges": g.directed_count(),
        "min_degree": g.min_degree(),
        "max_degree": g.max_degree(),
        "rank": g.rank(),
        "connected": g.is_connected(),
        "bipartite": g.is_bipartite(),
        "regular_degree": g.regular_degree(),
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (g, source) = load_graph(&cfg.source)?;
    let graph_summary = summary(&g, &source);
    let mut report = Report {
        command: cfg.command.name(),
        graph_summary,
        results: Value::Null,
        passed: true,
        rows: Vec::new(),
        failure: None,
    };
    match cfg.command {
        Command::Generate => {
            let text = to_edge_list(&g);
            let Some(path) = &cfg.out else {
                return Ok(Outcome::EdgeList(text));
            };
            fs::write(path, text)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
            report.results = json!({ "edge_list": path.display().to_string() });
        }
        Command::Analyze => analyze(&g, &mut report),
        Command::Certify => {
            let powers: Vec<usize> = (1..=cfg.max_power).collect();
            let cert = certify(&g, &powers)?;
            report.passed = cert.all_hold();
            if !report.passed {
                report.failure = Some(certificate_failure(&cert));
            }
            report.results = json!(cert);
        }
        Command::DetCheck => det_check(&g, cfg, &mut report)?,
        Command::IharaCheck => {
            let us = cfg.samples.map_or_else(|| default_u_samples(&g), u_circle);
            let r = ihara_check(&g, &us, &Tolerances::with_identity(cfg.tol))?;
            report.passed = r.passed();
            for dr in std::iter::once(&r.general).chain(&r.regular) {
                push_rows(&mut report, dr);
            }
            report.results = json!(r);
        }
        Command::Zeta => zeta(&g, cfg, &mut report)?,
        Command::Decompose => {
            let d = decomposition_report(&g);
            report.passed = d.max_orthogonality_residual < cfg.tol;
            if !report.passed {
                report.failure = Some(format!(
                    "decomposition: orthogonality residual {:.3e} exceeds tol {:e}",
                    d.max_orthogonality_residual, cfg.tol
                ));
            }
            report.results = json!(d);
        }
    }
    Ok(Outcome::Report(report))
}

fn certificate_failure(cert: &nonback::SpectralCertificate) -> String {
    if !cert.theorem1_holds {
        return format!(
            "gap bound: nb_gap {:.6e} < c {:.6e}",
            cert.nb_gap, cert.c_bound
        );
    }
    if let Some(c) = cert.corollary_norms.iter().find(|c| !c.holds) {
        return format!(
            "norm decay at n = {}: {:.6e} > {:.6e}",
            c.n, c.norm, c.bound
        );
    }
    format!(
        "converse inequality: beta {:.6e} < nb_gap / Dmax^2",
        cert.beta
    )
}

fn analyze(g: &Graph, report: &mut Report) {
    let spectrum = |m: nonback::OperatorMatrix| json!(eigenvalues(m.to_dense()));
    let connected = g.is_connected();
    report.results = json!({
        "validation": validate(g),
        "beta": if connected { beta(g).ok() } else { None },
        "nb_gap": if connected { nb_gap(g).ok() } else { None },
        "spectra": {
            "A": spectrum(adjacency(g)),
            "P": spectrum(laplacian_p(g)),
            "S": spectrum(nb_s(g)),
            "B": spectrum(nb_b(g)),
        },
    });
}

fn push_rows(report: &mut Report, dr: &DetReport) {
    for s in &dr.samples {
        report.rows.push(SampleRow {
            identity: dr.identity.name().to_string(),
            point: s.point,
            lhs: Some(s.lhs),
            rhs: Some(s.rhs),
            error: s.rel_error,
            passed: s.rel_error < dr.tol,
        });
    }
    if !dr.passed && report.failure.is_none() {
        let worst = dr.worst().expect("reports have samples");
        report.failure = Some(format!(
            "{}: worst sample at {} has relative error {:.3e} (tol {:e})",
            dr.identity.name(),
            worst.point,
            worst.rel_error,
            dr.tol
        ));
    }
    report.passed &= dr.passed;
}

fn det_check(g: &Graph, cfg: &RunConfig, report: &mut Report) -> Result<(), Failure> {
    let weights = load_weights(cfg, g)?;
    let tol = Tolerances::with_identity(cfg.tol);
    let mut reports = Vec::new();
    let mut intertwining = Vec::new();
    for &z in &cfg.z {
        let r = thm13_check(g, None, z, &tol)?;
        push_rows(report, &r);
        reports.push(json!(r));
        if let Some(w) = &weights {
            let r = thm13_check(g, Some(w), z, &tol)?;
            push_rows(report, &r);
            reports.push(json!(r));
        }
        let residual = intertwining_residual(g, z, &tol)?;
        let ok = residual < cfg.tol;
        report.rows.push(SampleRow {
            identity: "intertwining".into(),
            point: z,
            lhs: None,
            rhs: None,
            error: residual,
            passed: ok,
        });
        if !ok && report.failure.is_none() {
            report.failure = Some(format!(
                "intertwining: residual {residual:.3e} at {z} (tol {:e})",
                cfg.tol
            ));
        }
        report.passed &= ok;
        intertwining.push(json!({ "point": z, "residual": residual, "passed": ok }));
        let r = det_k_check(g, z, &tol)?;
        push_rows(report, &r);
        reports.push(json!(r));
    }
    let max_residual = report
        .rows
        .iter()
        .filter(|r| r.identity == "intertwining")
        .map(|r| r.error)
        .fold(0.0, f64::max);
    reports.push(json!({
        "identity": "intertwining",
        "samples": intertwining,
        "max_residual": max_residual,
        "tol": cfg.tol,
        "passed": max_residual < cfg.tol,
    }));
    report.results = json!({ "reports": reports });
    Ok(())
}

fn zeta(g: &Graph, cfg: &RunConfig, report: &mut Report) -> Result<(), Failure> {
    let weights = load_weights(cfg, g)?;
    let mut fields = Vec::new();
    for &z in &cfg.z {
        let zf = solve_zeta(g, weights.as_ref(), z, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        let ok = zf.residual < cfg.tol && zf.herglotz_ok();
        if !ok && report.failure.is_none() {
            report.failure = Some(format!(
                "zeta at {z}: residual {:.3e}, Herglotz signs {}",
                zf.residual,
                if zf.herglotz_ok() { "ok" } else { "violated" }
            ));
        }
        report.passed &= ok;
        let directed: Vec<Value> = (0..g.directed_count())
            .map(|e| {
                let (u, v) = g.directed(e);
                json!({ "from": u, "to": v, "zeta": zf.zeta[e] })
            })
            .collect();
        let vertices: Vec<Value> = (0..g.vertex_count())
            .map(|v| json!({ "vertex": v, "m": zf.m[v], "green": zf.gv[v] }))
            .collect();
        let edges: Vec<Value> = g
            .edges()
            .iter()
            .zip(&zf.ge)
            .map(|(&(u, v), ge)| json!({ "u": u, "v": v, "green": ge }))
            .collect();
        fields.push(json!({
            "z": z,
            "iterations": zf.iterations,
            "final_update_norm": zf.final_update_norm,
            "residual": zf.residual,
            "herglotz_ok": zf.herglotz_ok(),
            "directed_edges": directed,
            "vertices": vertices,
            "edges": edges,
        }));
    }
    report.results = json!({ "fields": fields });
    Ok(())
}
