//! Interior-point drivers for the decoding LP.
//!
//! Two families are implemented on the standard form `min <c,x>, Ax = b,
//! x >= 0`:
//!
//! * primal affine scaling (long-step and short-step), which rescales the
//!   problem around the current point and steps along the projected
//!   steepest-descent direction;
//! * primal-dual path following, started either from a feasible pair or
//!   from an infeasible positive point.
//!
//! Each iteration solves one system `(A D^2 A^T) u = v`; [`NormalSolver`]
//! dispatches it to conjugate gradients, dense Cholesky or Gaussian BP.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codes::{is_codeword, BinaryWord, LlrVector, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::gabp::{build_pairwise_graph, gabp_solve, gabp_sweep, marginal_means, MessageState};
use crate::linalg::{
    cg_solve_from, cholesky_factor, cholesky_substitute, dot, jacobi_precond, norm2, norm_inf,
    InnerSystem, SparseRealMatrix, MAX_DENSE_DIMENSION,
};
use crate::polytope::{
    build_polytope, decompose_checks, round_iterate, to_standard_form, DecompositionMap, RowKind,
    StandardFormLP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    AffineLong,
    AffineShort,
    PdipFeasible,
    PdipInfeasible,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::AffineLong,
        Algorithm::AffineShort,
        Algorithm::PdipFeasible,
        Algorithm::PdipInfeasible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AffineLong => "affine-long",
            Algorithm::AffineShort => "affine-short",
            Algorithm::PdipFeasible => "pdip",
            Algorithm::PdipInfeasible => "pdip-infeasible",
        }
    }

    fn is_affine(self) -> bool {
        matches!(self, Algorithm::AffineLong | Algorithm::AffineShort)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine-long" | "affine" => Ok(Algorithm::AffineLong),
            "affine-short" => Ok(Algorithm::AffineShort),
            "pdip" | "pdip-feasible" => Ok(Algorithm::PdipFeasible),
            "pdip-infeasible" => Ok(Algorithm::PdipInfeasible),
            other => Err(Error::InvalidParameter(format!("unknown solver `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolverKind {
    Cg,
    Dense,
    Gabp,
    GabpWarm,
}

impl InnerSolverKind {
    pub const ALL: [InnerSolverKind; 4] = [
        InnerSolverKind::Cg,
        InnerSolverKind::Dense,
        InnerSolverKind::Gabp,
        InnerSolverKind::GabpWarm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InnerSolverKind::Cg => "cg",
            InnerSolverKind::Dense => "dense",
            InnerSolverKind::Gabp => "gabp",
            InnerSolverKind::GabpWarm => "gabp-warm",
        }
    }
}

impl fmt::Display for InnerSolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InnerSolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(InnerSolverKind::Cg),
            "dense" => Ok(InnerSolverKind::Dense),
            "gabp" => Ok(InnerSolverKind::Gabp),
            "gabp-warm" => Ok(InnerSolverKind::GabpWarm),
            other => Err(Error::InvalidParameter(format!(
                "unknown inner solver `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub inner: InnerSolverKind,
    /// Outer stopping threshold on the duality gap.
    pub gap_tol: f64,
    /// Accepted gap when affine scaling stalls on an ill-conditioned system.
    pub stall_gap_tol: f64,
    /// Stopping threshold on primal and dual residuals (infinity norm).
    pub feas_tol: f64,
    pub max_outer: usize,
    /// Long-step fraction of the distance to the boundary.
    pub beta: f64,
    /// Short-step radius in the scaled space.
    pub short_radius: f64,
    /// Centering parameter of path following.
    pub sigma: f64,
    /// Fraction-to-boundary factor of path following.
    pub eta: f64,
    pub inner_tol_floor: f64,
    pub inner_tol_factor: f64,
    pub inner_tol_cap: f64,
    /// Defaults to `4 k` when unset.
    pub cg_max_iter: Option<usize>,
    pub gabp_damping: f64,
    pub gabp_max_sweeps: usize,
    /// Sweeps per outer iteration in the warm-started mode.
    pub warm_sweeps: usize,
    /// Round-and-check every this many outer iterations; 0 disables.
    pub rounding_cadence: usize,
    pub tau_round: f64,
    /// Distance to {0, 1} under which a converged coordinate is integral.
    pub integrality_tol: f64,
    /// Decompose checks above this degree before building the polytope.
    pub decompose: Option<usize>,
    pub record_trajectory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::PdipFeasible,
            inner: InnerSolverKind::Cg,
            gap_tol: 1e-8,
            stall_gap_tol: 1e-6,
            feas_tol: 1e-8,
            max_outer: 200,
            beta: 0.66,
            short_radius: 0.25,
            sigma: 0.3,
            eta: 0.995,
            inner_tol_floor: 1e-10,
            inner_tol_factor: 0.01,
            inner_tol_cap: 1e-3,
            cg_max_iter: None,
            gabp_damping: crate::gabp::DEFAULT_DAMPING,
            gabp_max_sweeps: 500,
            warm_sweeps: 1,
            rounding_cadence: 1,
            tau_round: crate::polytope::DEFAULT_TAU_ROUND,
            integrality_tol: 1e-6,
            decompose: None,
            record_trajectory: false,
        }
    }
}

impl SolverConfig {
    /// Defaults for the given pair; short-step affine scaling gets a larger
    /// iteration budget since its gap shrinks by a fixed small factor per step.
    pub fn new(algorithm: Algorithm, inner: InnerSolverKind) -> Self {
        Self {
            algorithm,
            inner,
            max_outer: Self::default_max_outer(algorithm),
            inner_tol_cap: Self::default_inner_tol_cap(algorithm),
            ..Self::default()
        }
    }

    /// Affine scaling stalls on loosely solved directions, so its inner
    /// solves stay tight throughout.
    pub fn default_inner_tol_cap(algorithm: Algorithm) -> f64 {
        if algorithm.is_affine() {
            1e-12
        } else {
            1e-3
        }
    }

    pub fn default_max_outer(algorithm: Algorithm) -> usize {
        match algorithm {
            Algorithm::AffineShort => 2000,
            _ => 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {v} must lie in (0, 1)"
                )))
            }
        };
        open_unit("beta", self.beta)?;
        open_unit("sigma", self.sigma)?;
        open_unit("eta", self.eta)?;
        open_unit("short_radius", self.short_radius)?;
        for (name, v) in [
            ("gap_tol", self.gap_tol),
            ("stall_gap_tol", self.stall_gap_tol),
            ("feas_tol", self.feas_tol),
            ("inner_tol_floor", self.inner_tol_floor),
            ("inner_tol_factor", self.inner_tol_factor),
            ("inner_tol_cap", self.inner_tol_cap),
            ("tau_round", self.tau_round),
            ("integrality_tol", self.integrality_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.gabp_damping) {
            return Err(Error::InvalidParameter(
                "gabp_damping must lie in [0, 1)".into(),
            ));
        }
        if self.max_outer == 0 || self.gabp_max_sweeps == 0 || self.warm_sweeps == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be positive".into(),
            ));
        }
        if let Some(d) = self.decompose {
            if d < 3 {
                return Err(Error::InvalidParameter(
                    "decompose degree must be >= 3".into(),
                ));
            }
        }
        Ok(())
    }

    fn inner_tol(&self, gap: f64) -> f64 {
        (self.inner_tol_factor * gap)
            .max(self.inner_tol_floor)
            .min(self.inner_tol_cap)
    }
}

/// Primal-dual state `(x, lambda, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTriple {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub s: Vec<f64>,
}

impl IterateTriple {
    pub fn gap(&self) -> f64 {
        dot(&self.x, &self.s)
    }

    pub fn is_interior(&self) -> bool {
        self.x
            .iter()
            .chain(&self.s)
            .all(|&v| v > 0.0 && v.is_finite())
    }

    pub fn primal_residual(&self, lp: &StandardFormLP) -> Vec<f64> {
        let ax = lp.a.mul(&self.x);
        lp.b.iter().zip(&ax).map(|(b, a)| b - a).collect()
    }

    pub fn dual_residual(&self, lp: &StandardFormLP) -> Vec<f64> {
        let atl = lp.a.mul_t(&self.lambda);
        (0..lp.cols())
            .map(|i| lp.c[i] - atl[i] - self.s[i])
            .collect()
    }
}

/// Counters accumulated over the inner solves of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InnerStats {
    pub solves: usize,
    /// CG iterations plus GaBP sweeps.
    pub iterations: usize,
    /// CG solves that missed the tolerance within the iteration limit.
    pub cg_unconverged: usize,
    /// Solves done densely after CG first missed its tolerance.
    pub dense_fallbacks: usize,
    pub gabp_fallbacks: usize,
    pub dense_shifts: usize,
    /// Largest `||v - N u|| / ||v||` over the solves.
    pub max_relative_residual: f64,
}

/// Solves the per-iteration normal equations with the configured method.
#[derive(Debug, Clone)]
pub struct NormalSolver {
    kind: InnerSolverKind,
    cg_max_iter: Option<usize>,
    damping: f64,
    max_sweeps: usize,
    warm_sweeps: usize,
    warm: Option<MessageState>,
    /// Previous CG solution, reused as the next starting point.
    last: Option<Vec<f64>>,
    cg_gave_up: bool,
    gabp_gave_up: bool,
    pub stats: InnerStats,
}

impl NormalSolver {
    pub fn new(kind: InnerSolverKind, cfg: &SolverConfig) -> Self {
        Self {
            kind,
            cg_max_iter: cfg.cg_max_iter,
            damping: cfg.gabp_damping,
            max_sweeps: cfg.gabp_max_sweeps,
            warm_sweeps: cfg.warm_sweeps,
            warm: None,
            last: None,
            cg_gave_up: false,
            gabp_gave_up: false,
            stats: InnerStats::default(),
        }
    }

    pub fn kind(&self) -> InnerSolverKind {
        self.kind
    }

    pub fn solve(
        &mut self,
        a: &SparseRealMatrix,
        d2: &[f64],
        v: &[f64],
        tol: f64,
    ) -> Result<Vec<f64>> {
        let sys = InnerSystem::new(a, d2, v)?;
        self.stats.solves += 1;
        let u = match self.kind {
            InnerSolverKind::Dense => self.dense(&sys)?,
            InnerSolverKind::Cg => self.cg(&sys, tol)?,
            InnerSolverKind::Gabp if self.gabp_gave_up => {
                self.stats.gabp_fallbacks += 1;
                self.cg(&sys, tol)?
            }
            InnerSolverKind::Gabp => {
                let graph = build_pairwise_graph(&sys)?;
                let out = gabp_solve(&graph, tol, self.max_sweeps, self.damping, None)?;
                self.stats.iterations += out.sweeps;
                match out.solution() {
                    Some(u) => u.to_vec(),
                    None => {
                        // Later systems of the run are no easier; stop trying.
                        self.gabp_gave_up = true;
                        self.stats.gabp_fallbacks += 1;
                        self.cg(&sys, tol)?
                    }
                }
            }
            InnerSolverKind::GabpWarm => {
                let graph = build_pairwise_graph(&sys)?;
                let mut state = match self.warm.take() {
                    Some(s) if s.fits(&graph) => s,
                    _ => MessageState::zeros(&graph),
                };
                let mut diverged = false;
                for _ in 0..self.warm_sweeps {
                    match gabp_sweep(&graph, &state, self.damping) {
                        Ok(next) => state = next,
                        Err(Error::NonFinite(_)) => {
                            diverged = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                self.stats.iterations += self.warm_sweeps;
                let means = marginal_means(&graph, &state);
                // Means worse than the zero vector mean the messages are diverging.
                let diverged = diverged
                    || means.iter().any(|m| !m.is_finite())
                    || sys.residual_norm(&means) > norm2(sys.v);
                if diverged {
                    self.stats.gabp_fallbacks += 1;
                    self.cg(&sys, tol)?
                } else {
                    self.warm = Some(state);
                    means
                }
            }
        };
        let vn = norm2(v);
        if vn > 0.0 {
            let rel = sys.residual_norm(&u) / vn;
            self.stats.max_relative_residual = self.stats.max_relative_residual.max(rel);
        }
        Ok(u)
    }

    /// Tight solve for corrections outside the main iteration: dense when
    /// the run has gone dense, otherwise cold-started CG.
    pub fn solve_accurate(
        &mut self,
        a: &SparseRealMatrix,
        d2: &[f64],
        v: &[f64],
    ) -> Result<Vec<f64>> {
        let sys = InnerSystem::new(a, d2, v)?;
        if self.kind == InnerSolverKind::Dense || self.cg_gave_up {
            return self.dense(&sys);
        }
        let last = self.last.take();
        let out = self.cg(&sys, 1e-13);
        self.last = last;
        out
    }

    fn cg(&mut self, sys: &InnerSystem<'_>, tol: f64) -> Result<Vec<f64>> {
        if self.cg_gave_up {
            self.stats.dense_fallbacks += 1;
            return self.dense(sys);
        }
        let pre = jacobi_precond(sys)?;
        let max_iter = self.cg_max_iter.unwrap_or(4 * sys.dim()).max(1);
        let initial = self.last.as_deref().filter(|u| u.len() == sys.dim());
        let (u, rep) = cg_solve_from(sys, &pre, initial, tol, max_iter)?;
        self.stats.iterations += rep.iterations;
        if rep.converged {
            self.last = Some(u.clone());
            return Ok(u);
        }
        self.stats.cg_unconverged += 1;
        if sys.dim() <= MAX_DENSE_DIMENSION {
            // Conditioning only gets worse from here; stay dense for the run.
            self.cg_gave_up = true;
            self.stats.dense_fallbacks += 1;
            return self.dense(sys);
        }
        Ok(u)
    }

    /// Dense Cholesky; a pivot lost to cancellation late in a run is
    /// absorbed by a small diagonal shift, escalated until the factorisation
    /// succeeds.
    fn dense(&mut self, sys: &InnerSystem<'_>) -> Result<Vec<f64>> {
        let k = sys.dim();
        if k > MAX_DENSE_DIMENSION {
            return Err(Error::GuardExceeded {
                what: "dense system dimension",
                limit: MAX_DENSE_DIMENSION,
                got: k,
            });
        }
        let mut mat = sys.materialize();
        let scale = (0..k).map(|j| mat[j * k + j]).fold(0.0f64, f64::max);
        let mut shift = 0.0;
        loop {
            match cholesky_factor(&mat, k) {
                Ok(l) => return Ok(cholesky_substitute(&l, k, sys.v)),
                Err(Error::NotPositiveDefinite { .. }) if shift < 1e-6 * scale => {
                    self.stats.dense_shifts += 1;
                    let next = if shift == 0.0 {
                        1e-15 * scale
                    } else {
                        shift * 100.0
                    };
                    for j in 0..k {
                        mat[j * k + j] += next - shift;
                    }
                    shift = next;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Result of one affine-scaling iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineStep {
    pub x_new: Vec<f64>,
    pub direction: Vec<f64>,
    /// Largest step along `direction` keeping `x >= 0` (infinite if none).
    pub step_to_boundary: f64,
    /// Dual estimate `lambda` and reduced cost `s = c - A^T lambda` at `x`.
    pub dual: Vec<f64>,
    pub reduced_cost: Vec<f64>,
    /// `sum_i x_i max(s_i, 0)` at `x`.
    pub gap_estimate: f64,
    /// `max_i max(-s_i, 0)` at `x`.
    pub dual_infeasibility: f64,
}

pub fn affine_scaling_step(
    lp: &StandardFormLP,
    x: &[f64],
    cfg: &SolverConfig,
    inner_tol: f64,
    solver: &mut NormalSolver,
) -> Result<AffineStep> {
    let n = lp.cols();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "affine_scaling_step",
            expected: n,
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::LostPositivity(format!("x[{i}] = {}", x[i])));
    }
    let ax = lp.a.mul(x);
    let infeas =
        lp.b.iter()
            .zip(&ax)
            .fold(0.0f64, |m, (b, a)| m.max((b - a).abs()));
    if infeas > 1e-8 * (1.0 + norm_inf(&lp.b)) {
        return Err(Error::InvalidParameter(format!(
            "affine scaling needs a primal feasible point (residual {infeas:e})"
        )));
    }

    let d2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let d2c: Vec<f64> = d2.iter().zip(&lp.c).map(|(d, c)| d * c).collect();
    let v = lp.a.mul(&d2c);
    let dual = if norm_inf(&v) == 0.0 {
        vec![0.0; lp.rows()]
    } else {
        solver.solve(&lp.a, &d2, &v, inner_tol)?
    };
    let atl = lp.a.mul_t(&dual);
    let reduced_cost: Vec<f64> = lp.c.iter().zip(&atl).map(|(c, a)| c - a).collect();
    let direction: Vec<f64> = d2.iter().zip(&reduced_cost).map(|(d, s)| -d * s).collect();

    let gap_estimate = x
        .iter()
        .zip(&reduced_cost)
        .fold(0.0, |acc, (xi, si)| acc + xi * si.max(0.0));
    let dual_infeasibility = reduced_cost.iter().fold(0.0f64, |m, s| m.max(-s));

    let step_to_boundary = x
        .iter()
        .zip(&direction)
        .filter(|(_, &d)| d < 0.0)
        .map(|(xi, d)| -xi / d)
        .fold(f64::INFINITY, f64::min);

    let moving = direction.iter().any(|&d| d != 0.0);
    let x_new = if !moving {
        x.to_vec()
    } else {
        if step_to_boundary.is_infinite() {
            return Err(Error::Unbounded);
        }
        let alpha = match cfg.algorithm {
            Algorithm::AffineShort => {
                // ||D^{-1} dx|| = alpha ||D s||.
                let scaled = norm2(
                    &x.iter()
                        .zip(&reduced_cost)
                        .map(|(a, b)| a * b)
                        .collect::<Vec<_>>(),
                );
                (cfg.short_radius / scaled).min(cfg.beta * step_to_boundary)
            }
            _ => cfg.beta * step_to_boundary,
        };
        x.iter()
            .zip(&direction)
            .map(|(xi, d)| xi + alpha * d)
            .collect()
    };

    Ok(AffineStep {
        x_new,
        direction,
        step_to_boundary,
        dual,
        reduced_cost,
        gap_estimate,
        dual_infeasibility,
    })
}

/// Gap estimate and dual infeasibility at `x` from an accurately solved dual.
fn affine_certificate(
    lp: &StandardFormLP,
    x: &[f64],
    solver: &mut NormalSolver,
) -> Result<(f64, f64)> {
    let d2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let d2c: Vec<f64> = d2.iter().zip(&lp.c).map(|(d, c)| d * c).collect();
    let lambda = solver.solve_accurate(&lp.a, &d2, &lp.a.mul(&d2c))?;
    let atl = lp.a.mul_t(&lambda);
    let mut gap = 0.0;
    let mut dual_inf = 0.0f64;
    for i in 0..x.len() {
        let s = lp.c[i] - atl[i];
        gap += x[i] * s.max(0.0);
        dual_inf = dual_inf.max(-s);
    }
    Ok((gap, dual_inf))
}

/// Pulls `x` back onto `A x = b` with a least-change step in the metric of
/// `diag(x)^{-2}`, shortened if needed to stay interior.
fn restore_feasibility(
    lp: &StandardFormLP,
    x: &mut [f64],
    solver: &mut NormalSolver,
    tol: f64,
) -> Result<()> {
    for _ in 0..3 {
        let ax = lp.a.mul(x);
        let r: Vec<f64> = lp.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        if norm_inf(&r) <= tol {
            break;
        }
        let d2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let y = solver.solve_accurate(&lp.a, &d2, &r)?;
        let aty = lp.a.mul_t(&y);
        let delta: Vec<f64> = d2.iter().zip(&aty).map(|(d, a)| d * a).collect();
        let limit = x
            .iter()
            .zip(&delta)
            .filter(|(_, &d)| d < 0.0)
            .map(|(xi, d)| -xi / d)
            .fold(f64::INFINITY, f64::min);
        let theta = if limit > 1.0 { 1.0 } else { 0.9 * limit };
        for (xi, d) in x.iter_mut().zip(&delta) {
            *xi += theta * d;
        }
    }
    Ok(())
}

/// One path-following step with target `sigma * <x,s> / N` and a common
/// primal/dual step length.
pub fn pdip_step(
    lp: &StandardFormLP,
    t: &IterateTriple,
    cfg: &SolverConfig,
    inner_tol: f64,
    solver: &mut NormalSolver,
) -> Result<IterateTriple> {
    let n = lp.cols();
    if !t.is_interior() {
        return Err(Error::LostPositivity(
            "pdip_step needs x > 0 and s > 0".into(),
        ));
    }
    let rp = t.primal_residual(lp);
    let rd = t.dual_residual(lp);
    let mu = t.gap() / n as f64;
    let target = cfg.sigma * mu;

    let d2: Vec<f64> = t.x.iter().zip(&t.s).map(|(x, s)| x / s).collect();
    // Centering correction sigma*mu/s - x and the dual-residual term.
    let corr: Vec<f64> = t.x.iter().zip(&t.s).map(|(x, s)| target / s - x).collect();
    let d2rd: Vec<f64> = d2.iter().zip(&rd).map(|(d, r)| d * r).collect();
    let a_corr = lp.a.mul(&corr);
    let a_d2rd = lp.a.mul(&d2rd);
    let v: Vec<f64> = (0..lp.rows())
        .map(|r| rp[r] - a_corr[r] + a_d2rd[r])
        .collect();

    let dlambda = solver.solve(&lp.a, &d2, &v, inner_tol)?;
    let atdl = lp.a.mul_t(&dlambda);
    let ds: Vec<f64> = rd.iter().zip(&atdl).map(|(r, a)| r - a).collect();
    let dx: Vec<f64> = (0..n).map(|i| corr[i] - d2[i] * ds[i]).collect();

    let max_step = |v: &[f64], dv: &[f64]| {
        v.iter()
            .zip(dv)
            .filter(|(_, &d)| d < 0.0)
            .map(|(a, d)| -a / d)
            .fold(f64::INFINITY, f64::min)
    };
    let alpha = (cfg.eta * max_step(&t.x, &dx).min(max_step(&t.s, &ds))).min(1.0);

    let next = IterateTriple {
        x: t.x.iter().zip(&dx).map(|(a, d)| a + alpha * d).collect(),
        lambda: t
            .lambda
            .iter()
            .zip(&dlambda)
            .map(|(a, d)| a + alpha * d)
            .collect(),
        s: t.s.iter().zip(&ds).map(|(a, d)| a + alpha * d).collect(),
    };
    if !next.is_interior() {
        return Err(Error::LostPositivity(
            "path-following step left the interior".into(),
        ));
    }
    Ok(next)
}

/// `x = s = theta 1`, `lambda = 0` with `theta = max(1, ||b||_inf, ||c||_inf)`.
pub fn infeasible_start(lp: &StandardFormLP) -> IterateTriple {
    let theta = 1.0f64.max(norm_inf(&lp.b)).max(norm_inf(&lp.c));
    IterateTriple {
        x: vec![theta; lp.cols()],
        lambda: vec![0.0; lp.rows()],
        s: vec![theta; lp.cols()],
    }
}

/// Centre point `x = 1/2` on the polytope coordinates with slacks filled in
/// so that `A x = b` holds exactly.
pub fn feasible_primal_start(lp: &StandardFormLP) -> Result<Vec<f64>> {
    let n = lp.original_n;
    let mut x = vec![0.0; lp.cols()];
    for v in x.iter_mut().take(n) {
        *v = 0.5;
    }
    for (r, kind) in lp.row_kinds.iter().enumerate() {
        let lhs =
            lp.a.row(r)
                .filter(|&(c, _)| c < n)
                .fold(0.0, |acc, (c, a)| acc + a * x[c]);
        let slack = lp.b[r] - lhs;
        match *kind {
            RowKind::Facet { slack: col } | RowKind::Box { slack: col, .. } => {
                if !(slack > 0.0) {
                    return Err(Error::Formulation(format!(
                        "row {r} has slack {slack} at the centre point (check of degree < 2?)"
                    )));
                }
                x[col] = slack;
            }
            RowKind::Equality => {
                if slack.abs() > 1e-12 {
                    return Err(Error::Formulation(format!(
                        "equality row {r} fails at the centre point"
                    )));
                }
            }
        }
    }
    Ok(x)
}

/// Strictly feasible dual pair for the slack embedding: facet rows get
/// `lambda = -1`, box rows are lowered until every reduced cost is >= 1.
pub fn feasible_dual_start(lp: &StandardFormLP) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lambda: Vec<f64> = lp
        .row_kinds
        .iter()
        .map(|k| match k {
            RowKind::Equality => 0.0,
            _ => -1.0,
        })
        .collect();
    let box_rows = lp.box_rows();
    if box_rows.contains(&usize::MAX) {
        return Err(Error::Formulation(
            "every coordinate needs a box row".into(),
        ));
    }
    let atl = lp.a.mul_t(&lambda);
    for j in 0..lp.original_n {
        let s = lp.c[j] - atl[j];
        if s < 1.0 {
            lambda[box_rows[j]] -= 1.0 - s;
        }
    }
    let atl = lp.a.mul_t(&lambda);
    let s: Vec<f64> = lp.c.iter().zip(&atl).map(|(c, a)| c - a).collect();
    if s.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Formulation(
            "could not build an interior dual point".into(),
        ));
    }
    Ok((lambda, s))
}

/// Per-iteration log of an outer run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub cost: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Outcome of running an outer algorithm on a standard-form LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub cost: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the monitor stopped the run.
    pub stopped_early: bool,
    pub history: Vec<IterationLog>,
    pub stats: InnerStats,
}

/// Called after every outer iteration with `(iteration, x, primal residual)`;
/// returning `true` stops the run.
pub type Monitor<'a> = dyn FnMut(usize, &[f64], f64) -> bool + 'a;

pub fn solve_lp(
    lp: &StandardFormLP,
    cfg: &SolverConfig,
    monitor: Option<&mut Monitor<'_>>,
) -> Result<LpSolution> {
    cfg.validate()?;
    let mut solver = NormalSolver::new(cfg.inner, cfg);
    if cfg.algorithm.is_affine() {
        run_affine(lp, cfg, &mut solver, monitor)
    } else {
        run_pdip(lp, cfg, &mut solver, monitor)
    }
}

fn run_affine(
    lp: &StandardFormLP,
    cfg: &SolverConfig,
    solver: &mut NormalSolver,
    mut monitor: Option<&mut Monitor<'_>>,
) -> Result<LpSolution> {
    let mut x = feasible_primal_start(lp)?;
    let restore_tol = 1e-11 * (1.0 + norm_inf(&lp.b));
    let drift_tol = 1e-8 * (1.0 + norm_inf(&lp.b));
    let mut history = Vec::new();
    let mut gap = f64::INFINITY;
    let mut dual_inf = f64::INFINITY;
    let mut converged = false;
    let mut stopped_early = false;
    let mut iterations = 0;
    // Iterate with the smallest gap estimate seen so far.
    let mut certified: Option<(Vec<f64>, f64, f64)> = None;
    let mut broke_down = false;

    loop {
        let step = match affine_scaling_step(lp, &x, cfg, cfg.inner_tol(gap), solver) {
            Ok(step) => step,
            Err(
                Error::NotPositiveDefinite { .. } | Error::ZeroDiagonal(_) | Error::NonFinite(_),
            ) if certified.is_some() => {
                broke_down = true;
                break;
            }
            Err(e) => return Err(e),
        };
        gap = step.gap_estimate;
        dual_inf = step.dual_infeasibility;
        let trusted = cfg.inner != InnerSolverKind::GabpWarm;
        if trusted && certified.as_ref().is_none_or(|c| gap <= c.1) {
            certified = Some((x.clone(), gap, dual_inf));
        }
        if gap <= cfg.gap_tol {
            if cfg.inner != InnerSolverKind::GabpWarm {
                converged = true;
                break;
            }
            // Single-sweep duals are too rough to certify anything.
            let (g, d) = affine_certificate(lp, &x, solver)?;
            if g <= cfg.gap_tol {
                gap = g;
                dual_inf = d;
                converged = true;
                break;
            }
        }
        if step.direction.iter().all(|&d| d == 0.0) {
            // No descent direction: the cost is constant on the polytope.
            converged = true;
            break;
        }
        if step.x_new == x {
            broke_down = true;
            break;
        }
        if iterations >= cfg.max_outer {
            break;
        }
        let cost_before = lp.cost(&x);
        let mut next = step.x_new;
        restore_feasibility(lp, &mut next, solver, restore_tol)?;
        let pres = primal_residual_inf(lp, &next);
        let cost = lp.cost(&next);
        // Single-sweep directions are not descent directions, so only the
        // exact solvers are held to a monotone cost.
        let ascent = cfg.inner != InnerSolverKind::GabpWarm
            && cost > cost_before + 1e-12 * (1.0 + cost.abs());
        if pres > drift_tol || next.iter().any(|&v| !(v > 0.0)) || ascent {
            // The scaled system has become too ill-conditioned to follow.
            broke_down = true;
            break;
        }
        x = next;
        iterations += 1;
        history.push(IterationLog {
            iteration: iterations,
            cost,
            gap,
            primal_residual: pres,
            dual_residual: dual_inf,
        });
        if let Some(m) = monitor.as_deref_mut() {
            if m(iterations, &x, pres) {
                stopped_early = true;
                break;
            }
        }
    }
    if !converged && !stopped_early {
        if let Some((xc, g, d)) = certified {
            if g <= cfg.stall_gap_tol && (broke_down || iterations >= cfg.max_outer) {
                x = xc;
                gap = g;
                dual_inf = d;
                converged = true;
            }
        }
    }
    Ok(LpSolution {
        cost: lp.cost(&x),
        primal_residual: primal_residual_inf(lp, &x),
        dual_residual: dual_inf,
        x,
        gap,
        iterations,
        converged,
        stopped_early,
        history,
        stats: solver.stats.clone(),
    })
}

fn run_pdip(
    lp: &StandardFormLP,
    cfg: &SolverConfig,
    solver: &mut NormalSolver,
    mut monitor: Option<&mut Monitor<'_>>,
) -> Result<LpSolution> {
    let mut t = match cfg.algorithm {
        Algorithm::PdipFeasible => {
            let x = feasible_primal_start(lp)?;
            let (lambda, s) = feasible_dual_start(lp)?;
            IterateTriple { x, lambda, s }
        }
        _ => infeasible_start(lp),
    };
    let mut history = Vec::new();
    let mut converged = false;
    let mut stopped_early = false;
    let mut iterations = 0;
    loop {
        let gap = t.gap();
        let pres = norm_inf(&t.primal_residual(lp));
        let dres = norm_inf(&t.dual_residual(lp));
        if gap <= cfg.gap_tol && pres <= cfg.feas_tol && dres <= cfg.feas_tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_outer {
            break;
        }
        t = pdip_step(lp, &t, cfg, cfg.inner_tol(gap), solver)?;
        iterations += 1;
        let pres = norm_inf(&t.primal_residual(lp));
        history.push(IterationLog {
            iteration: iterations,
            cost: lp.cost(&t.x),
            gap: t.gap(),
            primal_residual: pres,
            dual_residual: norm_inf(&t.dual_residual(lp)),
        });
        if let Some(m) = monitor.as_deref_mut() {
            if m(iterations, &t.x, pres) {
                stopped_early = true;
                break;
            }
        }
    }
    Ok(LpSolution {
        cost: lp.cost(&t.x),
        gap: t.gap(),
        primal_residual: norm_inf(&t.primal_residual(lp)),
        dual_residual: norm_inf(&t.dual_residual(lp)),
        x: t.x,
        iterations,
        converged,
        stopped_early,
        history,
        stats: solver.stats.clone(),
    })
}

fn primal_residual_inf(lp: &StandardFormLP, x: &[f64]) -> f64 {
    let ax = lp.a.mul(x);
    lp.b.iter()
        .zip(&ax)
        .fold(0.0f64, |m, (b, a)| m.max((b - a).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecodeStatus {
    /// Converged to an integral optimum: the output is the ML codeword.
    Integral,
    /// Converged to a non-integral optimum (pseudocodeword).
    Fractional,
    /// An intermediate iterate rounded to a codeword.
    EarlyRounded,
    /// No convergence within the iteration budget, or a numerical breakdown.
    Failure,
}

impl DecodeStatus {
    pub fn name(self) -> &'static str {
        match self {
            DecodeStatus::Integral => "Integral",
            DecodeStatus::Fractional => "Fractional",
            DecodeStatus::EarlyRounded => "EarlyRounded",
            DecodeStatus::Failure => "Failure",
        }
    }
}

impl fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub x: Vec<f64>,
    pub cost: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Rounded output over {0, 1/2, 1} on the code coordinates.
    pub output: Vec<f64>,
    /// Final iterate on the code coordinates.
    pub x: Vec<f64>,
    /// `<gamma, x>` of the final iterate; for `EarlyRounded`, of the emitted word.
    pub cost: f64,
    pub ml_certificate: bool,
    pub outer_iterations: usize,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub inner: InnerStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TracePoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl DecodeResult {
    /// The output as a binary word when it has no 1/2 entries.
    pub fn word(&self) -> Option<BinaryWord> {
        if self.output.contains(&0.5) {
            return None;
        }
        BinaryWord::new(self.output.iter().map(|&v| v as u8).collect()).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Trajectory as CSV: `iteration,cost,gap,x0,...`.
    pub fn trajectory_csv(&self) -> Option<String> {
        let traj = self.trajectory.as_ref()?;
        let n = self.x.len();
        let mut out = String::from("iteration,cost,gap");
        for i in 0..n {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for p in traj {
            out.push_str(&format!("{},{:e},{:e}", p.iteration, p.cost, p.gap));
            for v in &p.x {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        Some(out)
    }
}

/// Polytope and embedding for one code, reused across received words.
#[derive(Debug, Clone)]
pub struct Decoder {
    h: SparseBinaryMatrix,
    map: DecompositionMap,
    template: StandardFormLP,
    cfg: SolverConfig,
}

impl Decoder {
    pub fn new(h: &SparseBinaryMatrix, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let (work, map) = match cfg.decompose {
            Some(d) => decompose_checks(h, d)?,
            None => (h.clone(), DecompositionMap::identity(h.n())),
        };
        let polytope = build_polytope(&work)?;
        let template = to_standard_form(&polytope, &LlrVector::new(vec![0.0; work.n()])?)?;
        Ok(Self {
            h: h.clone(),
            map,
            template,
            cfg: cfg.clone(),
        })
    }

    pub fn code(&self) -> &SparseBinaryMatrix {
        &self.h
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn decomposition(&self) -> &DecompositionMap {
        &self.map
    }

    pub fn template(&self) -> &StandardFormLP {
        &self.template
    }

    /// The embedded LP for `gamma` (auxiliary coordinates cost nothing).
    pub fn lp_for(&self, gamma: &LlrVector) -> Result<StandardFormLP> {
        if gamma.len() != self.h.n() {
            return Err(Error::DimensionMismatch {
                context: "decode",
                expected: self.h.n(),
                got: gamma.len(),
            });
        }
        let mut extended = gamma.values().to_vec();
        extended.resize(self.map.decomposed_n(), 0.0);
        self.template.with_cost(&LlrVector::new(extended)?)
    }

    pub fn decode(&self, gamma: &LlrVector) -> Result<DecodeResult> {
        let lp = self.lp_for(gamma)?;
        let n = self.h.n();
        let cfg = &self.cfg;
        let mut trajectory = cfg.record_trajectory.then(Vec::new);
        let mut early: Option<BinaryWord> = None;
        let feas_gate = 1e-6 * (1.0 + norm_inf(&lp.b));

        let mut monitor = |it: usize, x: &[f64], pres: f64| -> bool {
            if let Some(tr) = trajectory.as_mut() {
                tr.push(TracePoint {
                    iteration: it,
                    x: x[..n].to_vec(),
                    cost: dot(&lp.c[..n], &x[..n]),
                    gap: f64::NAN,
                });
            }
            if cfg.rounding_cadence == 0
                || !it.is_multiple_of(cfg.rounding_cadence)
                || pres > feas_gate
            {
                return false;
            }
            let clamped: Vec<f64> = x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
            let Ok(r) = round_iterate(&clamped, cfg.tau_round) else {
                return false;
            };
            if r.contains(&0.5) {
                return false;
            }
            let word = BinaryWord::new(r.iter().map(|&v| v as u8).collect()).expect("binary");
            if is_codeword(&self.h, &word).unwrap_or(false) {
                early = Some(word);
                return true;
            }
            false
        };

        let outcome = solve_lp(&lp, cfg, Some(&mut monitor));
        let sol = match outcome {
            Ok(sol) => sol,
            Err(
                e @ (Error::LostPositivity(_)
                | Error::NonFinite(_)
                | Error::NotPositiveDefinite { .. }
                | Error::ZeroDiagonal(_)
                | Error::Unbounded),
            ) => {
                return Ok(DecodeResult {
                    status: DecodeStatus::Failure,
                    output: vec![0.5; n],
                    x: vec![f64::NAN; n],
                    cost: f64::NAN,
                    ml_certificate: false,
                    outer_iterations: 0,
                    gap: f64::NAN,
                    primal_residual: f64::NAN,
                    dual_residual: f64::NAN,
                    inner: InnerStats::default(),
                    trajectory: None,
                    message: Some(e.to_string()),
                })
            }
            Err(e) => return Err(e),
        };

        // Fill the gap column of the trajectory from the iteration log.
        if let Some(tr) = trajectory.as_mut() {
            for (p, log) in tr.iter_mut().zip(&sol.history) {
                p.gap = log.gap;
            }
        }

        let x: Vec<f64> = self.map.project(&sol.x[..self.map.decomposed_n()]).to_vec();
        let clamped: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let mut result = DecodeResult {
            status: DecodeStatus::Failure,
            output: Vec::new(),
            x: x.clone(),
            cost: sol.cost,
            ml_certificate: false,
            outer_iterations: sol.iterations,
            gap: sol.gap,
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
            inner: sol.stats.clone(),
            trajectory,
            message: None,
        };

        if let Some(word) = early.filter(|_| sol.stopped_early) {
            result.status = DecodeStatus::EarlyRounded;
            result.cost = gamma.cost(&word);
            result.output = word.bits().iter().map(|&b| f64::from(b)).collect();
            return Ok(result);
        }

        if !sol.converged {
            result.output = round_iterate(&clamped, cfg.tau_round)?;
            result.message = Some(format!(
                "no convergence after {} iterations (gap {:e}, residuals {:e}/{:e})",
                sol.iterations, sol.gap, sol.primal_residual, sol.dual_residual
            ));
            return Ok(result);
        }

        let near_binary = x
            .iter()
            .all(|&v| (v - v.round()).abs() <= cfg.integrality_tol);
        if near_binary {
            let word = BinaryWord::new(clamped.iter().map(|v| v.round() as u8).collect())?;
            if is_codeword(&self.h, &word)? {
                result.status = DecodeStatus::Integral;
                result.ml_certificate = true;
                result.output = word.bits().iter().map(|&b| f64::from(b)).collect();
                return Ok(result);
            }
        }
        result.status = DecodeStatus::Fractional;
        result.output = round_iterate(&clamped, cfg.tau_round.max(cfg.integrality_tol))?;
        Ok(result)
    }
}

/// Decodes one received word; builds the polytope on every call, see
/// [`Decoder`] to reuse it.
pub fn decode(
    h: &SparseBinaryMatrix,
    gamma: &LlrVector,
    cfg: &SolverConfig,
) -> Result<DecodeResult> {
    Decoder::new(h, cfg)?.decode(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{enumerate_codewords, ml_decode_exhaustive};
    use crate::polytope::lp_oracle_dense;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn llr(v: &[f64]) -> LlrVector {
        LlrVector::new(v.to_vec()).unwrap()
    }

    fn toy_lp() -> StandardFormLP {
        // min x1  s.t.  x1 + x2 = 1.
        StandardFormLP {
            a: Arc::new(SparseRealMatrix::from_dense(1, 2, &[1.0, 1.0]).unwrap()),
            b: vec![1.0],
            c: vec![1.0, 0.0],
            original_n: 2,
            row_kinds: vec![RowKind::Equality],
        }
    }

    fn segment_lp(gamma: &[f64]) -> StandardFormLP {
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        to_standard_form(&build_polytope(&h).unwrap(), &llr(gamma)).unwrap()
    }

    #[test]
    fn affine_step_hand_example() {
        let cfg = SolverConfig::new(Algorithm::AffineLong, InnerSolverKind::Dense);
        let mut solver = NormalSolver::new(InnerSolverKind::Dense, &cfg);
        let step = affine_scaling_step(&toy_lp(), &[0.5, 0.5], &cfg, 1e-12, &mut solver).unwrap();
        // N = 1/2, v = 1/4 -> lambda = 1/2, s = (1/2, -1/2), dx = (-1/8, 1/8).
        assert!((step.dual[0] - 0.5).abs() < 1e-15);
        assert!((step.reduced_cost[0] - 0.5).abs() < 1e-15);
        assert!((step.reduced_cost[1] + 0.5).abs() < 1e-15);
        assert!((step.direction[0] + 0.125).abs() < 1e-15);
        assert!((step.direction[1] - 0.125).abs() < 1e-15);
        assert!((step.step_to_boundary - 4.0).abs() < 1e-12);
        assert!((step.x_new[0] - 0.17).abs() < 1e-12);
        assert!((step.x_new[1] - 0.83).abs() < 1e-12);
    }

    #[test]
    fn affine_step_with_zero_cost_stays_put() {
        let mut lp = toy_lp();
        lp.c = vec![0.0, 0.0];
        let cfg = SolverConfig::new(Algorithm::AffineLong, InnerSolverKind::Cg);
        let mut solver = NormalSolver::new(InnerSolverKind::Cg, &cfg);
        let step = affine_scaling_step(&lp, &[0.5, 0.5], &cfg, 1e-12, &mut solver).unwrap();
        assert_eq!(step.direction, vec![0.0, 0.0]);
        assert_eq!(step.x_new, vec![0.5, 0.5]);

        let h = SparseBinaryMatrix::hamming_7_4();
        let res = decode(&h, &llr(&[0.0; 7]), &cfg).unwrap();
        assert_eq!(res.status, DecodeStatus::Fractional);
        assert_eq!(res.output, vec![0.5; 7]);
    }

    #[test]
    fn affine_step_requires_feasible_point() {
        let cfg = SolverConfig::new(Algorithm::AffineLong, InnerSolverKind::Dense);
        let mut solver = NormalSolver::new(InnerSolverKind::Dense, &cfg);
        assert!(affine_scaling_step(&toy_lp(), &[0.5, 0.6], &cfg, 1e-12, &mut solver).is_err());
        assert!(affine_scaling_step(&toy_lp(), &[1.0, 0.0], &cfg, 1e-12, &mut solver).is_err());
    }

    #[test]
    fn short_step_has_fixed_scaled_length() {
        let cfg = SolverConfig::new(Algorithm::AffineShort, InnerSolverKind::Dense);
        let mut solver = NormalSolver::new(InnerSolverKind::Dense, &cfg);
        let x = [0.5, 0.5];
        let step = affine_scaling_step(&toy_lp(), &x, &cfg, 1e-12, &mut solver).unwrap();
        let scaled: f64 = x
            .iter()
            .zip(&step.x_new)
            .map(|(a, b)| ((b - a) / a).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((scaled - 0.25).abs() < 1e-12);
    }

    #[test]
    fn affine_cost_decreases_monotonically() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for alg in [Algorithm::AffineLong, Algorithm::AffineShort] {
            for _ in 0..5 {
                let g: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
                let mut cfg = SolverConfig::new(alg, InnerSolverKind::Dense);
                cfg.rounding_cadence = 0;
                cfg.max_outer = 2000;
                let lp = Decoder::new(&h, &cfg).unwrap().lp_for(&llr(&g)).unwrap();
                let sol = solve_lp(&lp, &cfg, None).unwrap();
                assert!(
                    sol.converged,
                    "{alg}: {} its, gap {:e}",
                    sol.iterations, sol.gap
                );
                let mut prev = lp.cost(&feasible_primal_start(&lp).unwrap());
                for log in &sol.history {
                    assert!(log.cost <= prev + 1e-12, "{alg}: {} > {prev}", log.cost);
                    prev = log.cost;
                }
            }
        }
    }

    #[test]
    fn pdip_halves_gap_from_unit_start() {
        let lp = segment_lp(&[1.0, -0.5, 0.25]);
        let mut cfg = SolverConfig::new(Algorithm::PdipFeasible, InnerSolverKind::Dense);
        cfg.sigma = 0.5;
        // Build a feasible point with x = s = 1 on a rescaled problem: use the
        // infeasible start on a problem where residuals vanish instead.
        let n = lp.cols();
        let x = vec![1.0; n];
        let s = vec![1.0; n];
        // Choose b and c so that (x, 0, s) is feasible.
        let b = lp.a.mul(&x);
        let lp = StandardFormLP {
            b,
            c: s.clone(),
            ..lp
        };
        let t = IterateTriple {
            x,
            lambda: vec![0.0; lp.rows()],
            s,
        };
        assert!((t.gap() / n as f64 - 1.0).abs() < 1e-15);
        let mut solver = NormalSolver::new(InnerSolverKind::Cg, &cfg);
        let next = pdip_step(&lp, &t, &cfg, 1e-3, &mut solver).unwrap();
        let mu = next.gap() / n as f64;
        assert!((mu - 0.5).abs() <= 0.05, "mu = {mu}");
    }

    #[test]
    fn pdip_step_is_fixed_at_optimum() {
        let lp = segment_lp(&[1.0, 1.0, 1.0]);
        let mut cfg = SolverConfig::new(Algorithm::PdipFeasible, InnerSolverKind::Dense);
        cfg.rounding_cadence = 0;
        cfg.gap_tol = 1e-12;
        cfg.feas_tol = 1e-12;
        let sol = solve_lp(&lp, &cfg, None).unwrap();
        assert!(sol.converged);
        let x = sol.x.clone();
        // Re-run one more step from a near-optimal point: the change is tiny.
        let (lambda, s) = {
            let mut solver = NormalSolver::new(InnerSolverKind::Dense, &cfg);
            let step = affine_scaling_step(&lp, &x, &cfg, 1e-14, &mut solver).unwrap();
            (
                step.dual,
                step.reduced_cost
                    .iter()
                    .map(|v| v.max(1e-14))
                    .collect::<Vec<_>>(),
            )
        };
        let t = IterateTriple {
            x: x.clone(),
            lambda,
            s,
        };
        let mut solver = NormalSolver::new(InnerSolverKind::Dense, &cfg);
        let next = pdip_step(&lp, &t, &cfg, 1e-14, &mut solver).unwrap();
        let moved = next
            .x
            .iter()
            .zip(&x)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(moved < 1e-6, "moved {moved}");
    }

    #[test]
    fn infeasible_start_examples() {
        let lp = segment_lp(&[0.5, 0.5, 0.5]);
        let t = infeasible_start(&lp);
        assert!(t.is_interior());
        assert!(t.x.iter().all(|&v| v == 1.0));

        let h = SparseBinaryMatrix::hamming_7_4();
        let lp = Decoder::new(&h, &SolverConfig::default())
            .unwrap()
            .lp_for(&llr(&[0.5; 7]))
            .unwrap();
        let t = infeasible_start(&lp);
        assert!(t.x.iter().all(|&v| v == 2.0));
    }

    #[test]
    fn infeasible_pdip_clears_residuals_on_segment() {
        let lp = segment_lp(&[-1.0, 0.5, 0.25]);
        let mut cfg = SolverConfig::new(Algorithm::PdipInfeasible, InnerSolverKind::Dense);
        cfg.rounding_cadence = 0;
        cfg.max_outer = 30;
        cfg.gap_tol = 1e-300;
        let sol = solve_lp(&lp, &cfg, None).unwrap();
        assert!(sol.primal_residual <= 1e-8 && sol.dual_residual <= 1e-8);
    }

    #[test]
    fn feasible_start_on_hamming() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let lp = Decoder::new(&h, &SolverConfig::default())
            .unwrap()
            .lp_for(&llr(&[1.0; 7]))
            .unwrap();
        let x = feasible_primal_start(&lp).unwrap();
        for (r, kind) in lp.row_kinds.iter().enumerate() {
            if let RowKind::Facet { slack } = *kind {
                assert!((x[slack] - 1.0).abs() < 1e-15, "row {r}");
            }
        }
        let ax = lp.a.mul(&x);
        assert!(ax.iter().zip(&lp.b).all(|(a, b)| (a - b).abs() <= 1e-12));
        let (lambda, s) = feasible_dual_start(&lp).unwrap();
        assert!(s.iter().all(|&v| v > 0.0));
        let t = IterateTriple { x, lambda, s };
        assert!(norm_inf(&t.dual_residual(&lp)) < 1e-12);
    }

    #[test]
    fn feasible_start_on_segment_uses_equalities() {
        let lp = segment_lp(&[1.0; 3]);
        let x = feasible_primal_start(&lp).unwrap();
        assert_eq!(&x[..3], &[0.5; 3]);
        assert!(x.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn degree_one_check_has_no_interior() {
        let h = SparseBinaryMatrix::new(2, vec![vec![0], vec![0, 1]]).unwrap();
        let cfg = SolverConfig::new(Algorithm::AffineLong, InnerSolverKind::Dense);
        assert!(matches!(
            decode(&h, &llr(&[1.0, 1.0]), &cfg),
            Err(Error::Formulation(_))
        ));
    }

    #[test]
    fn pdip_gap_decreases_on_hamming() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut cfg = SolverConfig::new(Algorithm::PdipFeasible, InnerSolverKind::Dense);
        cfg.rounding_cadence = 0;
        let dec = Decoder::new(&h, &cfg).unwrap();
        for _ in 0..20 {
            let g: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lp = dec.lp_for(&llr(&g)).unwrap();
            let sol = solve_lp(&lp, &cfg, None).unwrap();
            assert!(sol.converged);
            for w in sol.history.windows(2) {
                assert!(w[1].gap < w[0].gap);
            }
            let (_, oracle) = lp_oracle_dense(&lp).unwrap();
            assert!((sol.cost - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn decode_hamming_examples() {
        let h = SparseBinaryMatrix::hamming_7_4();
        for alg in Algorithm::ALL {
            for inner in [InnerSolverKind::Cg, InnerSolverKind::Dense] {
                let cfg = SolverConfig::new(alg, inner);
                let g = llr(&[-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
                let res = decode(&h, &g, &cfg).unwrap();
                let (ml, _) = ml_decode_exhaustive(&h, &g).unwrap();
                assert_eq!(res.word(), Some(ml), "{alg}/{inner}: {:?}", res.status);
                assert!(matches!(
                    res.status,
                    DecodeStatus::Integral | DecodeStatus::EarlyRounded
                ));

                let mut cfg_full = cfg.clone();
                cfg_full.rounding_cadence = 0;
                let dec = Decoder::new(&h, &cfg_full).unwrap();
                for cw in enumerate_codewords(&h).unwrap() {
                    let g = llr(&cw
                        .bits()
                        .iter()
                        .map(|&b| 1.0 - 2.0 * f64::from(b))
                        .collect::<Vec<_>>());
                    let res = dec.decode(&g).unwrap();
                    assert_eq!(res.status, DecodeStatus::Integral, "{alg}/{inner}: {res:?}");
                    assert!(res.ml_certificate);
                    assert_eq!(res.word(), Some(cw));
                }
            }
        }
    }

    #[test]
    fn decode_is_deterministic() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let g = llr(&[0.3, -0.2, 0.9, -1.1, 0.4, 0.2, -0.1]);
        for inner in InnerSolverKind::ALL {
            let cfg = SolverConfig::new(Algorithm::PdipFeasible, inner);
            assert_eq!(decode(&h, &g, &cfg).unwrap(), decode(&h, &g, &cfg).unwrap());
        }
    }

    #[test]
    fn trajectory_is_recorded() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let mut cfg = SolverConfig::new(Algorithm::AffineLong, InnerSolverKind::Dense);
        cfg.record_trajectory = true;
        cfg.rounding_cadence = 0;
        let res = decode(&h, &llr(&[0.3, -0.2, 0.9, -1.1, 0.4, 0.2, -0.1]), &cfg).unwrap();
        let tr = res.trajectory.as_ref().unwrap();
        assert_eq!(tr.len(), res.outer_iterations);
        let csv = res.trajectory_csv().unwrap();
        assert_eq!(csv.lines().count(), tr.len() + 1);
        assert!(csv.starts_with("iteration,cost,gap,x0,"));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        cfg.beta = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::default();
        cfg.decompose = Some(2);
        assert!(cfg.validate().is_err());
        assert_eq!(
            "pdip".parse::<Algorithm>().unwrap(),
            Algorithm::PdipFeasible
        );
        assert_eq!(
            "gabp-warm".parse::<InnerSolverKind>().unwrap(),
            InnerSolverKind::GabpWarm
        );
        assert!("simplex".parse::<Algorithm>().is_err());
    }
}
