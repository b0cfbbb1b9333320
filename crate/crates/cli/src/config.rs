use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nonback::{Error, Family, C64};

pub const DEFAULT_Z: [C64; 4] = [
    C64::new(0.5, 0.5),
    C64::new(1.0, 1.0),
    C64::new(0.0, 2.0),
    C64::new(-1.3, 0.7),
];

#[derive(Debug, Parser)]
#[command(
    name = "nonback",
    version,
    about = "Verify spectral and determinant identities for non-backtracking walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Edge-list file ("u v" per line, '#' comments).
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "generate")]
    pub graph: Option<PathBuf>,

    /// Generator spec: cycle:N, complete:N, petersen, random_regular:N:D,
    /// random_min_degree:N:DMIN:DMAX.
    #[arg(long, global = true, value_name = "SPEC", value_parser = parse_family)]
    pub generate: Option<Family>,

    /// JSON weights: {"p": [[u, v, value], ...], "W": [...]}.
    #[arg(long, global = true, value_name = "PATH")]
    pub weights: Option<PathBuf>,

    /// Comma-separated spectral parameters, e.g. "0.5+0.5i,2i,-1.3+0.7i".
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub z: Vec<C64>,

    /// Number of u sample points for ihara-check (default 2|B| + 1).
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,

    /// Pass threshold for identities and residuals.
    #[arg(long, global = true, value_name = "X", default_value_t = 1e-8)]
    pub tol: f64,

    /// Seed for --generate.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub seed: u64,

    /// Largest power n checked by certify.
    #[arg(long, global = true, value_name = "N", default_value_t = 12)]
    pub max_power: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output path (stdout if absent). For `generate`, the edge list goes here.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Spectra of A, P, S and B plus structural checks.
    Analyze,
    /// Gap bound, norm decay and converse inequality.
    Certify,
    /// Green-function determinant identity, intertwining relation and det K.
    DetCheck,
    /// Ihara determinant formulas on a circle of u values.
    IharaCheck,
    /// Solve the ζ recursion and report Green functions.
    Zeta,
    /// Write a generated graph as an edge list.
    Generate,
    /// Dimensions of the origin/terminus/balanced decomposition.
    Decompose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Certify => "certify",
            Command::DetCheck => "det-check",
            Command::IharaCheck => "ihara-check",
            Command::Zeta => "zeta",
            Command::Generate => "generate",
            Command::Decompose => "decompose",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub enum GraphSource {
    File(PathBuf),
    Generated { family: Family, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub source: GraphSource,
    pub weights: Option<PathBuf>,
    pub z: Vec<C64>,
    pub samples: Option<usize>,
    pub tol: f64,
    pub max_power: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        if cli.tol.is_nan() || cli.tol <= 0.0 {
            return Err(format!("--tol must be positive, got {}", cli.tol));
        }
        if cli.max_power == 0 {
            return Err("--max-power must be at least 1".into());
        }
        let source = match (cli.graph, cli.generate) {
            (Some(path), None) => GraphSource::File(path),
            (None, Some(family)) => GraphSource::Generated {
                family,
                seed: cli.seed,
            },
            _ => return Err("exactly one of --graph or --generate is required".into()),
        };
        if cli.command == Command::Generate && !matches!(source, GraphSource::Generated { .. }) {
            return Err("generate needs --generate".into());
        }
        Ok(Self {
            command: cli.command,
            source,
            weights: cli.weights,
            z: if cli.z.is_empty() {
                DEFAULT_Z.to_vec()
            } else {
                cli.z
            },
            samples: cli.samples,
            tol: cli.tol,
            max_power: cli.max_power,
            format: cli.format,
            out: cli.out,
        })
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `a+bi`, `a-bi`, `bi`, `i` or `a`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned
        .parse::<C64>()
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| Error::ComplexFormat(s.to_string()).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5+0.5i").unwrap(), C64::new(0.5, 0.5));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-1.3+0.7i").unwrap(), C64::new(-1.3, 0.7));
        assert_eq!(parse_complex(" 1 - 2i ").unwrap(), C64::new(1.0, -2.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1e-3+1e1i").unwrap(), C64::new(1e-3, 10.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn z_list_and_sources() {
        let cli = Cli::try_parse_from([
            "nonback",
            "det-check",
            "--generate",
            "cycle:3",
            "--z",
            "-1.3+0.7i,2i",
        ])
        .unwrap();
        let cfg = RunConfig::from_cli(cli).unwrap();
        assert_eq!(cfg.z, vec![C64::new(-1.3, 0.7), C64::new(0.0, 2.0)]);

        let cli = Cli::try_parse_from(["nonback", "certify"]).unwrap();
        assert!(RunConfig::from_cli(cli).is_err());
        let cli =
            Cli::try_parse_from(["nonback", "certify", "--generate", "petersen", "--tol", "0"])
                .unwrap();
        assert!(RunConfig::from_cli(cli).is_err());
        let cli = Cli::try_parse_from(["nonback", "zeta", "--generate", "petersen"]).unwrap();
        assert_eq!(RunConfig::from_cli(cli).unwrap().z, DEFAULT_Z.to_vec());
    }
}
