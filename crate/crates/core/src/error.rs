use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which of the spectral-gap hypotheses a graph failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Connected,
    NonBipartite,
    MinDegree3,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hypothesis::Connected => "connected",
            Hypothesis::NonBipartite => "non-bipartite",
            Hypothesis::MinDegree3 => "min degree",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },
    #[error("line {line}: edge {{{u}, {v}}} appears more than once")]
    MultiEdge { line: usize, u: u64, v: u64 },
    #[error("line {line}: malformed edge `{content}`")]
    Malformed { line: usize, content: String },
    #[error("edge list contains no edges")]
    Empty,
    #[error("vertex {vertex} has degree {degree}; every vertex needs degree >= 2")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("vertex id {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("generator gave up after {attempts} attempts")]
    GenerationFailure { attempts: usize },

    #[error("weights do not match the graph: {0}")]
    WeightMismatch(String),
    #[error("cannot parse weights document: {0}")]
    WeightsFormat(String),

    #[error("the O/T decomposition needs a non-bipartite graph")]
    BipartiteInput,
    #[error("edge function is not mean-zero: |<f,1>| = {inner:.3e} > tol {tol:.3e}")]
    NotMeanZero { inner: f64, tol: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is bipartite")]
    Bipartite,
    #[error("spectral-gap hypotheses not met: {}", list(.0))]
    HypothesesNotMet(Vec<Hypothesis>),
    #[error("c(D, beta) needs D >= 3, got {0}")]
    BoundDegreeTooSmall(usize),

    #[error("spectral parameter {re}{im:+}i is not in the upper half-plane")]
    SpectralParameterNotInUpperHalfPlane { re: f64, im: f64 },
    #[error(
        "fixed point did not converge in {iterations} iterations (last update {update_norm:.3e})"
    )]
    NonConvergence { iterations: usize, update_norm: f64 },
    #[error("edge ({u}, {v}): the two directed Green evaluations differ by {gap:.3e}")]
    InconsistentEdgeGreen { u: usize, v: usize, gap: f64 },
    #[error("input graph is not a tree")]
    NotATree,
    #[error("edges {edge} and {prior} do not lie at the ends of a common geodesic")]
    InadmissibleEdgePair { edge: usize, prior: usize },
    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("sample u = {re}{im:+}i sits on a pole of (1-u^2)^(r-1)")]
    SampleAtPole { re: f64, im: f64 },
    #[error("graph is not regular")]
    NotRegular,

    #[error("cannot parse complex number `{0}`")]
    ComplexFormat(String),
}

fn list(items: &[Hypothesis]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
