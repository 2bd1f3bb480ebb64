//! The fundamental polytope of a parity-check matrix and its embedding as a
//! standard-form linear program `min <c, x>  s.t.  A x = b, x >= 0`.
//!
//! Each check with support `N(j)` contributes the odd-subset facets of the
//! even-weight polytope on `N(j)`:
//! `sum_{i in S} x_i - sum_{i in N(j) \ S} x_i <= |S| - 1` for odd `|S|`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::{LlrVector, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, SparseRealMatrix};

/// Largest check degree whose facets are enumerated directly.
pub const MAX_CHECK_DEGREE: usize = 31;
/// Default half-width of the band that rounds to 1/2.
pub const DEFAULT_TAU_ROUND: f64 = 1e-9;
/// Pivot threshold for redundant-row pruning.
pub const PRUNE_PIVOT_TOL: f64 = 1e-10;
/// Size guard of [`lp_oracle_dense`] (rows and columns).
pub const MAX_ORACLE_DIMENSION: usize = 400;
/// Dimension guard of [`enumerate_vertices`].
pub const MAX_VERTEX_ENUMERATION_N: usize = 8;

/// `<coeffs, x> <= rhs`, coefficients sorted by variable index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &(i, a)| acc + a * x[i])
    }

    /// `rhs - <coeffs, x>`; non-negative when satisfied.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.rhs - self.eval(x)
    }

    fn is_negation_of(&self, other: &Self) -> bool {
        self.rhs == -other.rhs
            && self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.0 == b.0 && a.1 == -b.1)
    }
}

/// Inequality description of the fundamental polytope; the unit box
/// `0 <= x_i <= 1` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqSystem {
    pub n: usize,
    pub inequalities: Vec<LinearInequality>,
}

impl IneqSystem {
    /// Largest violation over all inequalities and the box (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let ineq = self
            .inequalities
            .iter()
            .map(|q| -q.slack(x))
            .fold(0.0f64, f64::max);
        let boxed = x.iter().map(|&v| (-v).max(v - 1.0)).fold(0.0f64, f64::max);
        ineq.max(boxed)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n && self.max_violation(x) <= tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Where the columns of a decomposed code come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionMap {
    pub original_n: usize,
    pub aux_count: usize,
}

impl DecompositionMap {
    pub fn identity(n: usize) -> Self {
        Self {
            original_n: n,
            aux_count: 0,
        }
    }

    pub fn decomposed_n(&self) -> usize {
        self.original_n + self.aux_count
    }

    pub fn project<'a, T>(&self, x: &'a [T]) -> &'a [T] {
        &x[..self.original_n]
    }
}

/// Role of a row of the standard-form matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    /// Check facet with its own slack column.
    Facet { slack: usize },
    /// Pair of opposite facets merged into an equality (degree-2 checks).
    Equality,
    /// Upper bound `x_var + slack = 1`.
    Box { var: usize, slack: usize },
}

/// `min <c, x>  s.t.  A x = b, x >= 0`, with the polytope coordinates in the
/// first `original_n` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLP {
    pub a: Arc<SparseRealMatrix>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub original_n: usize,
    pub row_kinds: Vec<RowKind>,
}

impl StandardFormLP {
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.c, x)
    }

    /// Same constraints, different cost on the polytope coordinates.
    pub fn with_cost(&self, gamma: &LlrVector) -> Result<Self> {
        if gamma.len() != self.original_n {
            return Err(Error::DimensionMismatch {
                context: "StandardFormLP::with_cost",
                expected: self.original_n,
                got: gamma.len(),
            });
        }
        let mut c = vec![0.0; self.cols()];
        c[..self.original_n].copy_from_slice(gamma.values());
        Ok(Self { c, ..self.clone() })
    }

    /// Box row of each polytope coordinate.
    pub fn box_rows(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.original_n];
        for (r, kind) in self.row_kinds.iter().enumerate() {
            if let RowKind::Box { var, .. } = *kind {
                out[var] = r;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            rows: usize,
            cols: usize,
            original_n: usize,
            triplets: Vec<(usize, usize, f64)>,
            b: &'a [f64],
            c: &'a [f64],
        }
        serde_json::to_string(&Dump {
            rows: self.rows(),
            cols: self.cols(),
            original_n: self.original_n,
            triplets: self.a.triplets(),
            b: &self.b,
            c: &self.c,
        })
        .expect("serializable")
    }
}

/// Odd-subset facets of one check, in increasing subset-mask order.
pub fn check_inequalities(support: &[usize]) -> Result<Vec<LinearInequality>> {
    let d = support.len();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "check support must be non-empty".into(),
        ));
    }
    if d > MAX_CHECK_DEGREE {
        return Err(Error::GuardExceeded {
            what: "check degree",
            limit: MAX_CHECK_DEGREE,
            got: d,
        });
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    let out = (1u32..(1u32 << d))
        .filter(|mask| mask.count_ones() % 2 == 1)
        .map(|mask| LinearInequality {
            coeffs: sorted
                .iter()
                .enumerate()
                .map(|(k, &i)| (i, if mask >> k & 1 == 1 { 1.0 } else { -1.0 }))
                .collect(),
            rhs: f64::from(mask.count_ones()) - 1.0,
        })
        .collect();
    Ok(out)
}

pub fn build_polytope(h: &SparseBinaryMatrix) -> Result<IneqSystem> {
    let mut inequalities = Vec::new();
    for row in h.rows() {
        inequalities.extend(check_inequalities(row)?);
    }
    Ok(IneqSystem {
        n: h.n(),
        inequalities,
    })
}

/// Replaces every check of degree above `max_degree` by a chain of
/// degree-3 checks joined through fresh auxiliary variables.
pub fn decompose_checks(
    h: &SparseBinaryMatrix,
    max_degree: usize,
) -> Result<(SparseBinaryMatrix, DecompositionMap)> {
    if max_degree < 3 {
        return Err(Error::InvalidParameter(format!(
            "max_degree must be at least 3, got {max_degree}"
        )));
    }
    let mut rows = Vec::new();
    let mut next_aux = h.n();
    for row in h.rows() {
        let k = row.len();
        if k <= max_degree {
            rows.push(row.clone());
            continue;
        }
        // {v0, v1, a1}, {a1, v2, a2}, ..., {a_{k-3}, v_{k-2}, v_{k-1}}
        let mut prev = next_aux;
        next_aux += 1;
        rows.push(vec![row[0], row[1], prev]);
        for &v in &row[2..k - 2] {
            let aux = next_aux;
            next_aux += 1;
            rows.push(vec![prev, v, aux]);
            prev = aux;
        }
        rows.push(vec![prev, row[k - 2], row[k - 1]]);
    }
    let map = DecompositionMap {
        original_n: h.n(),
        aux_count: next_aux - h.n(),
    };
    Ok((SparseBinaryMatrix::new(next_aux, rows)?, map))
}

/// Embeds `min <gamma, x>` over `p` as a standard-form LP.
///
/// Columns are `[x | facet slacks | box slacks]`; rows are the facets
/// followed by the box rows `x_i + u_i = 1`. Opposite facet pairs
/// (`q` and `-q`) become a single slack-free equality row, and linearly
/// dependent equality rows are dropped.
pub fn to_standard_form(p: &IneqSystem, gamma: &LlrVector) -> Result<StandardFormLP> {
    if gamma.len() != p.n {
        return Err(Error::DimensionMismatch {
            context: "to_standard_form",
            expected: p.n,
            got: gamma.len(),
        });
    }
    let n = p.n;

    // Find opposite pairs; the earlier member of a pair becomes the equality.
    let key = |q: &LinearInequality| -> Vec<(usize, u64)> {
        q.coeffs
            .iter()
            .map(|&(i, a)| (i, a.abs().to_bits()))
            .collect()
    };
    let mut buckets: HashMap<Vec<(usize, u64)>, Vec<usize>> = HashMap::new();
    for (idx, q) in p.inequalities.iter().enumerate() {
        buckets.entry(key(q)).or_default().push(idx);
    }
    let mut partner: Vec<Option<usize>> = vec![None; p.inequalities.len()];
    for (idx, q) in p.inequalities.iter().enumerate() {
        if partner[idx].is_some() {
            continue;
        }
        if let Some(&other) = buckets[&key(q)]
            .iter()
            .find(|&&o| o > idx && partner[o].is_none() && q.is_negation_of(&p.inequalities[o]))
        {
            partner[idx] = Some(other);
            partner[other] = Some(idx);
        }
    }

    enum Pending {
        Facet(usize),
        Equality(usize),
    }
    let mut pending = Vec::new();
    for (idx, _) in p.inequalities.iter().enumerate() {
        match partner[idx] {
            Some(o) if o < idx => {}
            Some(_) => pending.push(Pending::Equality(idx)),
            None => pending.push(Pending::Facet(idx)),
        }
    }

    // Drop dependent equality rows (facet and box rows own private slacks,
    // so they can never be part of a dependency).
    let eq_rows: Vec<usize> = pending
        .iter()
        .filter_map(|r| match r {
            Pending::Equality(i) => Some(*i),
            Pending::Facet(_) => None,
        })
        .collect();
    let keep_eq = independent_rows(
        &eq_rows
            .iter()
            .map(|&i| (&p.inequalities[i].coeffs, p.inequalities[i].rhs))
            .collect::<Vec<_>>(),
        n,
    )?;
    let mut kept_eq = std::collections::HashSet::new();
    for (pos, &i) in eq_rows.iter().enumerate() {
        if keep_eq[pos] {
            kept_eq.insert(i);
        }
    }

    let facet_count = pending
        .iter()
        .filter(|r| matches!(r, Pending::Facet(_)))
        .count();
    let cols = n + facet_count + n;
    let mut triplets = Vec::new();
    let mut b = Vec::new();
    let mut row_kinds = Vec::new();
    let mut next_slack = n;
    for item in &pending {
        let (idx, kind) = match *item {
            Pending::Facet(idx) => {
                let s = next_slack;
                next_slack += 1;
                (idx, RowKind::Facet { slack: s })
            }
            Pending::Equality(idx) if kept_eq.contains(&idx) => (idx, RowKind::Equality),
            Pending::Equality(_) => continue,
        };
        let r = row_kinds.len();
        let q = &p.inequalities[idx];
        triplets.extend(q.coeffs.iter().map(|&(i, a)| (r, i, a)));
        if let RowKind::Facet { slack } = kind {
            triplets.push((r, slack, 1.0));
        }
        b.push(q.rhs);
        row_kinds.push(kind);
    }
    for var in 0..n {
        let r = row_kinds.len();
        let slack = next_slack;
        next_slack += 1;
        triplets.push((r, var, 1.0));
        triplets.push((r, slack, 1.0));
        b.push(1.0);
        row_kinds.push(RowKind::Box { var, slack });
    }
    debug_assert_eq!(next_slack, cols);

    let a = SparseRealMatrix::from_triplets(row_kinds.len(), cols, &triplets)?;
    let mut c = vec![0.0; cols];
    c[..n].copy_from_slice(gamma.values());
    Ok(StandardFormLP {
        a: Arc::new(a),
        b,
        c,
        original_n: n,
        row_kinds,
    })
}

/// Rank-revealing elimination over the given sparse rows; returns which
/// rows to keep. Dropped rows must be consistent (`rhs` reduces to 0).
fn independent_rows(rows: &[(&Vec<(usize, f64)>, f64)], n: usize) -> Result<Vec<bool>> {
    let mut basis: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut keep = Vec::with_capacity(rows.len());
    for (coeffs, rhs) in rows {
        let mut dense = vec![0.0; n];
        for &(i, a) in coeffs.iter() {
            dense[i] = a;
        }
        let mut r = *rhs;
        for (piv, brow, brhs) in &basis {
            let f = dense[*piv];
            if f != 0.0 {
                for (d, bv) in dense.iter_mut().zip(brow) {
                    *d -= f * bv;
                }
                r -= f * brhs;
            }
        }
        let (piv, mag) = dense
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag > PRUNE_PIVOT_TOL {
            let scale = dense[piv];
            for d in dense.iter_mut() {
                *d /= scale;
            }
            basis.push((piv, dense, r / scale));
            keep.push(true);
        } else {
            if r.abs() > 1e-9 {
                return Err(Error::Infeasible);
            }
            keep.push(false);
        }
    }
    Ok(keep)
}

/// Rounds each coordinate to 0, 1/2 or 1: below `1/2 - tau` to 0, above
/// `1/2 + tau` to 1, otherwise to 1/2.
pub fn round_iterate(x: &[f64], tau_round: f64) -> Result<Vec<f64>> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if !(v >= -tau_round && v <= 1.0 + tau_round) {
                return Err(Error::OutOfRange(format!(
                    "coordinate {i} = {v} outside [0, 1]"
                )));
            }
            Ok(if v < 0.5 - tau_round {
                0.0
            } else if v > 0.5 + tau_round {
                1.0
            } else {
                0.5
            })
        })
        .collect()
}

/// Reference LP solver: dense two-phase simplex with Bland's rule on the
/// standard form, followed by a fresh solve of the final basis.
pub fn lp_oracle_dense(lp: &StandardFormLP) -> Result<(Vec<f64>, f64)> {
    let (k, n) = (lp.rows(), lp.cols());
    if k > MAX_ORACLE_DIMENSION || n > MAX_ORACLE_DIMENSION {
        return Err(Error::GuardExceeded {
            what: "oracle LP size",
            limit: MAX_ORACLE_DIMENSION,
            got: k.max(n),
        });
    }
    let a = lp.a.to_dense();
    let (basis, rows, tableau_values) = Simplex::new(&a, &lp.b, k, n).solve(&lp.c)?;

    // Recompute the basic solution from the original data.
    let m = basis.len();
    let mut bmat = vec![0.0; m * m];
    for (ri, &r) in rows.iter().enumerate() {
        for (bi, &col) in basis.iter().enumerate() {
            bmat[ri * m + bi] = a[r * n + col];
        }
    }
    let rhs: Vec<f64> = rows.iter().map(|&r| lp.b[r]).collect();
    let xb = lu_solve(&bmat, m, &rhs, 1e-12).unwrap_or(tableau_values);
    let mut x = vec![0.0; n];
    for (bi, &col) in basis.iter().enumerate() {
        x[col] = xb[bi].max(0.0);
    }
    let cost = lp.cost(&x);
    Ok((x, cost))
}

struct Simplex {
    k: usize,
    n: usize,
    width: usize,
    // (k + 1) x (n + k + 1): constraint rows, then the objective row; the
    // last column is the right-hand side.
    t: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
}

const SIMPLEX_EPS: f64 = 1e-9;

impl Simplex {
    fn new(a: &[f64], b: &[f64], k: usize, n: usize) -> Self {
        let width = n + k + 1;
        let mut t = vec![0.0; (k + 1) * width];
        for r in 0..k {
            let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
            for c in 0..n {
                t[r * width + c] = sign * a[r * n + c];
            }
            t[r * width + n + r] = 1.0;
            t[r * width + width - 1] = sign * b[r];
        }
        Self {
            k,
            n,
            width,
            t,
            basis: (n..n + k).collect(),
            active: vec![true; k],
        }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.k {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.t[r * w + c] -= f * prow[c];
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Sets the objective row to reduced costs of `cost` (length `width-1`).
    fn load_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let obj = self.k * w;
        for c in 0..w {
            self.t[obj + c] = if c < w - 1 { cost[c] } else { 0.0 };
        }
        for r in 0..self.k {
            if !self.active[r] {
                continue;
            }
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.t[obj + c] -= cb * self.t[r * w + c];
                }
            }
        }
    }

    /// Bland's rule iterations over columns `0..allowed`.
    fn run(&mut self, allowed: usize) -> Result<()> {
        let w = self.width;
        let obj = self.k * w;
        let max_pivots = 50_000;
        for _ in 0..max_pivots {
            let Some(enter) = (0..allowed).find(|&c| self.t[obj + c] < -SIMPLEX_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.k {
                if !self.active[r] {
                    continue;
                }
                let coef = self.at(r, enter);
                if coef > SIMPLEX_EPS {
                    let ratio = self.at(r, w - 1) / coef;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12
                                || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(pr, enter);
        }
        Err(Error::InvalidParameter(
            "simplex pivot limit reached".into(),
        ))
    }

    /// Returns the optimal basis (one structural column per non-redundant
    /// row), those rows, and the basic values read off the tableau.
    fn solve(mut self, c: &[f64]) -> Result<(Vec<usize>, Vec<usize>, Vec<f64>)> {
        let (k, n) = (self.k, self.n);
        // Phase 1: minimise the sum of artificials.
        let mut phase1 = vec![0.0; n + k];
        for v in phase1.iter_mut().skip(n) {
            *v = 1.0;
        }
        self.load_objective(&phase1);
        self.run(n + k)?;
        let infeas: f64 = (0..k)
            .filter(|&r| self.basis[r] >= n)
            .map(|r| self.at(r, self.width - 1))
            .sum();
        if infeas > 1e-7 {
            return Err(Error::Infeasible);
        }
        // Drive zero-level artificials out; rows with no pivot are redundant.
        for r in 0..k {
            if self.basis[r] < n {
                continue;
            }
            match (0..n).find(|&col| self.at(r, col).abs() > SIMPLEX_EPS) {
                Some(col) => self.pivot(r, col),
                None => self.active[r] = false,
            }
        }
        // Phase 2.
        let mut phase2 = c.to_vec();
        phase2.extend(std::iter::repeat_n(0.0, k));
        self.load_objective(&phase2);
        self.run(n)?;
        let rows: Vec<usize> = (0..k).filter(|&r| self.active[r]).collect();
        let basis = rows.iter().map(|&r| self.basis[r]).collect();
        let values = rows.iter().map(|&r| self.at(r, self.width - 1)).collect();
        Ok((basis, rows, values))
    }
}

/// All vertices of a small polytope (box included), by enumerating sets of
/// `n` linearly independent tight constraints. Vertices are deduplicated and
/// returned in lexicographic order.
pub fn enumerate_vertices(p: &IneqSystem) -> Result<Vec<Vec<f64>>> {
    let n = p.n;
    if n > MAX_VERTEX_ENUMERATION_N {
        return Err(Error::GuardExceeded {
            what: "vertex enumeration dimension",
            limit: MAX_VERTEX_ENUMERATION_N,
            got: n,
        });
    }
    let mut cons: Vec<(Vec<f64>, f64)> = p
        .inequalities
        .iter()
        .map(|q| {
            let mut row = vec![0.0; n];
            for &(i, a) in &q.coeffs {
                row[i] = a;
            }
            (row, q.rhs)
        })
        .collect();
    for i in 0..n {
        let mut lo = vec![0.0; n];
        lo[i] = -1.0;
        cons.push((lo, 0.0));
        let mut hi = vec![0.0; n];
        hi[i] = 1.0;
        cons.push((hi, 1.0));
    }

    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut state = Rref::new(n);
    vertex_dfs(&cons, 0, &mut state, p, &mut found, &mut seen);
    found.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
    Ok(found)
}

#[derive(Clone)]
struct Rref {
    n: usize,
    rows: Vec<(usize, Vec<f64>, f64)>,
}

impl Rref {
    fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::with_capacity(n),
        }
    }

    /// Adds a row if it is independent; keeps the system fully reduced.
    fn push(&mut self, row: &[f64], rhs: f64) -> bool {
        let mut r = row.to_vec();
        let mut b = rhs;
        for (piv, prow, pb) in &self.rows {
            let f = r[*piv];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(prow) {
                    *x -= f * y;
                }
                b -= f * pb;
            }
        }
        let (piv, mag) = r
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 1e-9 {
            return false;
        }
        let s = r[piv];
        for x in r.iter_mut() {
            *x /= s;
        }
        b /= s;
        for (_, prow, pb) in self.rows.iter_mut() {
            let f = prow[piv];
            if f != 0.0 {
                for (x, y) in prow.iter_mut().zip(&r) {
                    *x -= f * y;
                }
                *pb -= f * b;
            }
        }
        self.rows.push((piv, r, b));
        true
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (piv, _, b) in &self.rows {
            x[*piv] = *b;
        }
        x
    }
}

fn vertex_dfs(
    cons: &[(Vec<f64>, f64)],
    start: usize,
    state: &mut Rref,
    p: &IneqSystem,
    found: &mut Vec<Vec<f64>>,
    seen: &mut std::collections::HashSet<Vec<i64>>,
) {
    let n = state.n;
    if state.rows.len() == n {
        let x = state.solution();
        if p.contains(&x, 1e-9) {
            let key: Vec<i64> = x.iter().map(|v| (v * 1e8).round() as i64).collect();
            if seen.insert(key) {
                found.push(x);
            }
        }
        return;
    }
    let need = n - state.rows.len();
    for i in start..cons.len() {
        if cons.len() - i < need {
            break;
        }
        let mut next = state.clone();
        if next.push(&cons[i].0, cons[i].1) {
            vertex_dfs(cons, i + 1, &mut next, p, found, seen);
        }
    }
}
