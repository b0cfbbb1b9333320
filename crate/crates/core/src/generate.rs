//! Deterministic graph families used as test inputs.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

const RESTART_BUDGET: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycle(usize),
    Complete(usize),
    Petersen,
    RandomRegular { n: usize, d: usize },
    RandomMinDegree { n: usize, dmin: usize, dmax: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Petersen => write!(f, "petersen"),
            Family::RandomRegular { n, d } => write!(f, "random_regular:{n}:{d}"),
            Family::RandomMinDegree { n, dmin, dmax } => {
                write!(f, "random_min_degree:{n}:{dmin}:{dmax}")
            }
        }
    }
}

/// Parses `cycle:N`, `complete:N`, `petersen`, `random_regular:N:D` and
/// `random_min_degree:N:DMIN:DMAX`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Infeasible(format!("unrecognised family `{s}`"));
        let mut parts = s.trim().split(':');
        let name = parts.next().ok_or_else(bad)?;
        let nums = parts
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(match (name, nums.as_slice()) {
            ("cycle", &[n]) => Family::Cycle(n),
            ("complete", &[n]) => Family::Complete(n),
            ("petersen", &[]) => Family::Petersen,
            ("random_regular", &[n, d]) => Family::RandomRegular { n, d },
            ("random_min_degree", &[n, dmin, dmax]) => Family::RandomMinDegree { n, dmin, dmax },
            _ => return Err(bad()),
        })
    }
}

pub fn generate(family: Family, seed: u64) -> Result<Graph> {
    match family {
        Family::Cycle(n) => {
            if n < 3 {
                return Err(Error::Infeasible(format!("cycle needs n >= 3, got {n}")));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::new(n, &edges)
        }
        Family::Complete(n) => {
            if n < 3 {
                return Err(Error::Infeasible(format!(
                    "complete graph needs n >= 3, got {n}"
                )));
            }
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            Graph::new(n, &edges)
        }
        Family::Petersen => {
            let mut edges = Vec::with_capacity(15);
            for i in 0..5 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((5 + i, 5 + (i + 2) % 5));
            }
            Graph::new(10, &edges)
        }
        Family::RandomRegular { n, d } => {
            if d < 2 || d >= n {
                return Err(Error::Infeasible(format!(
                    "need 2 <= d < n, got n = {n}, d = {d}"
                )));
            }
            if n * d % 2 == 1 {
                return Err(Error::Infeasible(format!("n * d = {} is odd", n * d)));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pair_stubs(&vec![d; n], &mut rng)
        }
        Family::RandomMinDegree { n, dmin, dmax } => {
            if dmin < 2 || dmin > dmax || dmax >= n {
                return Err(Error::Infeasible(format!(
                    "need 2 <= dmin <= dmax < n, got n = {n}, window [{dmin}, {dmax}]"
                )));
            }
            if dmin == dmax && n * dmin % 2 == 1 {
                return Err(Error::Infeasible(format!("n * d = {} is odd", n * dmin)));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut degrees: Vec<usize> = (0..n).map(|_| rng.random_range(dmin..=dmax)).collect();
            if degrees.iter().sum::<usize>() % 2 == 1 {
                // Repair parity by moving one vertex inside the window.
                let i = degrees
                    .iter()
                    .position(|&d| d < dmax)
                    .or_else(|| degrees.iter().position(|&d| d > dmin))
                    .expect("window has width >= 1 when parity is odd");
                if degrees[i] < dmax {
                    degrees[i] += 1;
                } else {
                    degrees[i] -= 1;
                }
            }
            pair_stubs(&degrees, &mut rng)
        }
    }
}

/// Configuration-model pairing. Each stub is matched to a uniformly chosen
/// remaining stub that creates neither a loop nor a repeated edge; a dead
/// end discards the partial graph and starts over.
/// Uniform random recursive tree: vertex `i` attaches to a uniform earlier
/// vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Infeasible(format!("tree needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    Graph::from_edges(n, &edges)
}

fn pair_stubs(degrees: &[usize], rng: &mut ChaCha8Rng) -> Result<Graph> {
    let n = degrees.len();
    for _ in 0..RESTART_BUDGET {
        let mut stubs: Vec<usize> = degrees
            .iter()
            .enumerate()
            .flat_map(|(x, &d)| std::iter::repeat_n(x, d))
            .collect();
        stubs.shuffle(rng);
        let mut present: HashSet<(usize, usize)> = HashSet::new();
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        let mut stuck = false;
        while let Some(a) = stubs.pop() {
            let candidates: Vec<usize> = stubs
                .iter()
                .enumerate()
                .filter(|&(_, &b)| b != a && !present.contains(&(a.min(b), a.max(b))))
                .map(|(i, _)| i)
                .collect();
            if candidates.is_empty() {
                stuck = true;
                break;
            }
            let b = stubs.swap_remove(candidates[rng.random_range(0..candidates.len())]);
            present.insert((a.min(b), a.max(b)));
            edges.push((a.min(b), a.max(b)));
        }
        if !stuck {
            edges.sort_unstable();
            return Graph::new(n, &edges);
        }
    }
    Err(Error::GenerationFailure {
        attempts: RESTART_BUDGET,
    })
}
