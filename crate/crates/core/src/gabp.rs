//! Gaussian belief propagation for `N u = v` on the pairwise graph whose
//! nodes are the rows of `A` (the checks) and whose edges join rows that
//! share a column.
//!
//! Messages are kept in information form: the message `i -> j` stands for
//! the factor `exp(-precision/2 * u_j^2 + potential * u_j)`. If the flooding
//! schedule reaches a fixed point, the marginal means solve the system.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, InnerSystem};

/// Default convex damping of the flooding schedule.
pub const DEFAULT_DAMPING: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFactorGraph {
    diag: Vec<f64>,
    /// Undirected edges `(j, k, N_jk)` with `j < k`.
    edges: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    /// Per node: `(incoming directed edge, outgoing directed edge)` pairs.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl GaussianFactorGraph {
    pub fn new(diag: Vec<f64>, edges: Vec<(usize, usize, f64)>, rhs: Vec<f64>) -> Result<Self> {
        let h = diag.len();
        if rhs.len() != h {
            return Err(Error::DimensionMismatch {
                context: "GaussianFactorGraph right-hand side",
                expected: h,
                got: rhs.len(),
            });
        }
        if let Some(j) = diag.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::ZeroDiagonal(j));
        }
        let mut adjacency = vec![Vec::new(); h];
        let mut normalized = Vec::with_capacity(edges.len());
        for (e, &(a, b, w)) in edges.iter().enumerate() {
            if a == b || a >= h || b >= h {
                return Err(Error::InvalidMatrix(format!("bad edge ({a}, {b})")));
            }
            let (j, k) = (a.min(b), a.max(b));
            // Directed edge 2e is j -> k, 2e + 1 is k -> j.
            adjacency[j].push((2 * e + 1, 2 * e));
            adjacency[k].push((2 * e, 2 * e + 1));
            normalized.push((j, k, w));
        }
        Ok(Self {
            diag,
            edges: normalized,
            rhs,
            adjacency,
        })
    }

    /// Graph of a dense symmetric row-major matrix.
    pub fn from_dense(mat: &[f64], h: usize, rhs: Vec<f64>) -> Result<Self> {
        let diag = (0..h).map(|j| mat[j * h + j]).collect();
        let mut edges = Vec::new();
        for j in 0..h {
            for k in j + 1..h {
                if mat[j * h + k] != mat[k * h + j] {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric coupling ({j}, {k})"
                    )));
                }
                if mat[j * h + k] != 0.0 {
                    edges.push((j, k, mat[j * h + k]));
                }
            }
        }
        Self::new(diag, edges, rhs)
    }

    pub fn node_count(&self) -> usize {
        self.diag.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn set_rhs(&mut self, rhs: Vec<f64>) -> Result<()> {
        if rhs.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                context: "GaussianFactorGraph::set_rhs",
                expected: self.node_count(),
                got: rhs.len(),
            });
        }
        self.rhs = rhs;
        Ok(())
    }

    /// `N u` using the stored couplings.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diag.iter().zip(u).map(|(d, x)| d * x).collect();
        for &(j, k, w) in &self.edges {
            out[j] += w * u[k];
            out[k] += w * u[j];
        }
        out
    }

    fn coupling(&self, directed: usize) -> f64 {
        self.edges[directed / 2].2
    }

    fn source(&self, directed: usize) -> usize {
        let (j, k, _) = self.edges[directed / 2];
        if directed.is_multiple_of(2) {
            j
        } else {
            k
        }
    }
}

/// Per directed edge: precision and potential of the message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageState {
    pub precision: Vec<f64>,
    pub potential: Vec<f64>,
}

impl MessageState {
    pub fn zeros(graph: &GaussianFactorGraph) -> Self {
        let d = 2 * graph.edges.len();
        Self {
            precision: vec![0.0; d],
            potential: vec![0.0; d],
        }
    }

    pub fn fits(&self, graph: &GaussianFactorGraph) -> bool {
        self.precision.len() == 2 * graph.edges.len()
            && self.potential.len() == self.precision.len()
    }
}

/// Verdict of [`gabp_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GabpVerdict {
    Converged,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GabpOutcome {
    pub verdict: GabpVerdict,
    /// Marginal means after the last sweep.
    pub means: Vec<f64>,
    pub sweeps: usize,
    /// `||N u - v||_inf` of the returned means.
    pub residual_inf: f64,
    pub state: MessageState,
}

impl GabpOutcome {
    pub fn solution(&self) -> Option<&[f64]> {
        (self.verdict == GabpVerdict::Converged).then_some(&self.means[..])
    }
}

/// Nodes are the rows of `A`; couplings `N_jk = sum_i A_ji A_ki d2_i` are
/// accumulated column by column and kept when nonzero.
pub fn build_pairwise_graph(sys: &InnerSystem<'_>) -> Result<GaussianFactorGraph> {
    let a = sys.a;
    let mut couplings: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for c in 0..a.cols() {
        let d = sys.d2[c];
        let entries: Vec<(usize, f64)> = a.col(c).collect();
        for (p, &(j, aj)) in entries.iter().enumerate() {
            for &(k, ak) in &entries[p + 1..] {
                *couplings.entry((j.min(k), j.max(k))).or_insert(0.0) += aj * ak * d;
            }
        }
    }
    let edges = couplings
        .into_iter()
        .filter(|&(_, w)| w != 0.0)
        .map(|((j, k), w)| (j, k, w))
        .collect();
    GaussianFactorGraph::new(sys.diagonal(), edges, sys.v.to_vec())
}

/// Node beliefs `(precision, potential)` from the incoming messages.
fn beliefs(graph: &GaussianFactorGraph, state: &MessageState) -> (Vec<f64>, Vec<f64>) {
    let mut prec = graph.diag.clone();
    let mut pot = graph.rhs.clone();
    for (node, adj) in graph.adjacency.iter().enumerate() {
        for &(incoming, _) in adj {
            prec[node] += state.precision[incoming];
            pot[node] += state.potential[incoming];
        }
    }
    (prec, pot)
}

pub fn marginal_means(graph: &GaussianFactorGraph, state: &MessageState) -> Vec<f64> {
    let (prec, pot) = beliefs(graph, state);
    pot.iter().zip(&prec).map(|(h, p)| h / p).collect()
}

/// One synchronous update of every directed message, damped towards the
/// previous state by `damping`.
pub fn gabp_sweep(
    graph: &GaussianFactorGraph,
    state: &MessageState,
    damping: f64,
) -> Result<MessageState> {
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidParameter(format!(
            "damping {damping} must lie in [0, 1)"
        )));
    }
    if !state.fits(graph) {
        return Err(Error::DimensionMismatch {
            context: "gabp_sweep message state",
            expected: 2 * graph.edges.len(),
            got: state.precision.len(),
        });
    }
    let (prec, pot) = beliefs(graph, state);
    let mut next = state.clone();
    for out in 0..state.precision.len() {
        let from = graph.source(out);
        // The reverse message is the one arriving at `from` along this edge.
        let back = out ^ 1;
        let cavity_prec = prec[from] - state.precision[back];
        let cavity_pot = pot[from] - state.potential[back];
        let w = graph.coupling(out);
        let p = -w * w / cavity_prec;
        let h = -w * cavity_pot / cavity_prec;
        next.precision[out] = (1.0 - damping) * p + damping * state.precision[out];
        next.potential[out] = (1.0 - damping) * h + damping * state.potential[out];
        if !next.precision[out].is_finite() || !next.potential[out].is_finite() {
            return Err(Error::NonFinite("gaussian belief propagation message"));
        }
    }
    Ok(next)
}

/// Sweeps until the marginal means move less than `tol` (infinity norm) or
/// `max_sweeps` is reached. Divergence is reported as `NotConverged`.
fn residual_inf(graph: &GaussianFactorGraph, u: &[f64]) -> f64 {
    let nu = graph.apply(u);
    nu.iter()
        .zip(&graph.rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

pub fn gabp_solve(
    graph: &GaussianFactorGraph,
    tol: f64,
    max_sweeps: usize,
    damping: f64,
    warm: Option<MessageState>,
) -> Result<GabpOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gabp tolerance {tol} must be positive"
        )));
    }
    let mut state = match warm {
        Some(s) if s.fits(graph) => s,
        _ => MessageState::zeros(graph),
    };
    let mut means = marginal_means(graph, &state);
    let mut verdict = GabpVerdict::NotConverged;
    let residual_target = 100.0 * tol * norm_inf(&graph.rhs);
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let next = match gabp_sweep(graph, &state, damping) {
            Ok(s) => s,
            Err(Error::NonFinite(_)) => break,
            Err(e) => return Err(e),
        };
        let next_means = marginal_means(graph, &next);
        if next_means.iter().any(|m| !m.is_finite()) {
            break;
        }
        let change = next_means
            .iter()
            .zip(&means)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        state = next;
        means = next_means;
        // A stalled damped iteration can look converged; confirm on the residual.
        if change < tol && residual_inf(graph, &means) <= residual_target {
            verdict = GabpVerdict::Converged;
            break;
        }
    }
    Ok(GabpOutcome {
        verdict,
        residual_inf: residual_inf(graph, &means),
        means,
        sweeps,
        state,
    })
}
