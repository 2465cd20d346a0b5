//! Dense linear programs `max c·x s.t. A x ≤ b` with free variables.
//!
//! The solver runs a two-phase revised simplex on the dual
//! `min b·y s.t. Aᵀy = c, y ≥ 0`, whose basis has only `n_vars` rows, so
//! problems with many more constraints than variables stay cheap. The primal
//! optimum is read off the simplex multipliers of the final basis.
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots is seen, after
//! which the solver switches to Bland's rule for the rest of the solve.
//! Phase two runs on a slightly shifted right-hand side to avoid stalling on
//! degenerate vertices; the shift is then removed and any resulting
//! infeasibility is repaired with dual simplex pivots.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_STREAK: usize = 50;
const PERTURBATION: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    /// Row-major, `rows × n_vars`.
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Result<Self> {
        if objective.is_empty() {
            return Err(Error::InvalidArgument("LP needs at least one variable".into()));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        Ok(LinearProgram {
            n_vars: objective.len(),
            objective,
            a: Vec::new(),
            b: Vec::new(),
        })
    }

    pub fn with_constraints(objective: Vec<f64>, rows: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: rhs.len(),
            });
        }
        let mut lp = Self::new(objective)?;
        for (r, &v) in rows.iter().zip(rhs) {
            lp.add_constraint(r, v)?;
        }
        Ok(lp)
    }

    /// Appends `row · x ≤ rhs`.
    pub fn add_constraint(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        if row.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: row.len(),
            });
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite constraint".into()));
        }
        self.a.extend_from_slice(row);
        self.b.push(rhs);
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    /// Largest `row_i · x - b_i` (positive means violated).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        (0..self.n_constraints())
            .map(|i| dot(self.row(i), x) - self.b[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    /// Dual multipliers `y ≥ 0` with `Aᵀy = c` (one per constraint) when optimal.
    pub dual: Vec<f64>,
    /// Tableau dump when the solve broke down.
    pub diagnostics: Option<String>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        dot(&self.dual, lp.rhs())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Basis of a previous optimal solve, reusable when only the objective
/// changes: the old basis stays dual feasible and a few dual simplex pivots
/// restore primal feasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    basis: Vec<usize>,
    sign: Vec<f64>,
}

/// Revised simplex state for the dual standard-form problem.
struct Dual<'a> {
    lp: &'a LinearProgram,
    n: usize,
    m: usize,
    /// Column `j < m` is constraint row `j`; column `m + i` is the artificial
    /// `sign_i e_i`.
    sign: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    tol: f64,
    iterations: usize,
    max_iterations: usize,
    bland: bool,
    degenerate_run: usize,
    since_refactor: usize,
}

#[derive(Clone, Copy)]
enum Phase {
    One,
    Two,
}

enum StepOutcome {
    Optimal,
    /// The dual is unbounded: the primal is infeasible.
    DualUnbounded,
    /// The dual is infeasible: the primal is unbounded or infeasible.
    DualInfeasible,
    Breakdown(String),
}

impl<'a> Dual<'a> {
    fn cold(lp: &'a LinearProgram, c: &[f64], tol: f64) -> Self {
        let n = lp.n_vars;
        let m = lp.n_constraints();
        let sign: Vec<f64> = c.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut binv = vec![0.0; n * n];
        for i in 0..n {
            binv[i * n + i] = sign[i];
        }
        let mut in_basis = vec![false; m + n];
        in_basis[m..].fill(true);
        Dual {
            lp,
            n,
            m,
            basis: (m..m + n).collect(),
            in_basis,
            xb: c.iter().map(|v| v.abs()).collect(),
            sign,
            binv,
            tol,
            iterations: 0,
            max_iterations: 50 * (m + n) + 1000,
            bland: false,
            degenerate_run: 0,
            since_refactor: 0,
        }
    }

    fn warm(lp: &'a LinearProgram, ws: &WarmStart, c: &[f64], tol: f64) -> Option<Self> {
        let n = lp.n_vars;
        let m = lp.n_constraints();
        if ws.basis.len() != n || ws.basis.iter().any(|&j| j >= m + n) {
            return None;
        }
        let mut d = Dual::cold(lp, c, tol);
        d.sign = ws.sign.clone();
        d.basis = ws.basis.clone();
        d.in_basis.fill(false);
        for &j in &d.basis {
            d.in_basis[j] = true;
        }
        d.refactor(c).ok()?;
        Some(d)
    }

    fn warm_start(&self) -> WarmStart {
        WarmStart {
            basis: self.basis.clone(),
            sign: self.sign.clone(),
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.m
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        if j < self.m {
            out.copy_from_slice(self.lp.row(j));
        } else {
            out.fill(0.0);
            out[j - self.m] = self.sign[j - self.m];
        }
    }

    fn cost(&self, phase: Phase, j: usize) -> f64 {
        match (phase, self.is_artificial(j)) {
            (Phase::One, true) => 1.0,
            (Phase::One, false) => 0.0,
            (Phase::Two, true) => 0.0,
            (Phase::Two, false) => self.lp.b[j],
        }
    }

    /// Simplex multipliers `π = c_B B⁻¹`.
    fn multipliers(&self, phase: Phase) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = self.cost(phase, j);
            if cb != 0.0 {
                for (k, p) in pi.iter_mut().enumerate() {
                    *p += cb * self.binv[r * n + k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, phase: Phase, j: usize, pi: &[f64]) -> f64 {
        self.cost(phase, j) - dot(self.lp.row(j), pi)
    }

    fn price_tol(&self, j: usize) -> f64 {
        self.tol * (1.0 + self.lp.b[j].abs())
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|r| dot(&self.binv[r * n..(r + 1) * n], col)).collect()
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[f64]) {
        let n = self.n;
        let piv = u[r];
        let theta = self.xb[r] / piv;
        for i in 0..n {
            if i != r {
                self.xb[i] -= theta * u[i];
            }
        }
        self.xb[r] = theta;
        let (before, rest) = self.binv.split_at_mut(r * n);
        let (prow, after) = rest.split_at_mut(n);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (i, row) in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = u[i];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[entering] = true;
        self.basis[r] = entering;
        self.since_refactor += 1;
        self.iterations += 1;
    }

    /// Recomputes `B⁻¹` and `x_B = B⁻¹ rhs` by Gauss-Jordan elimination.
    fn refactor(&mut self, rhs: &[f64]) -> std::result::Result<(), String> {
        let n = self.n;
        let mut mat = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for (r, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..n {
                mat[i * n + r] = col[i];
            }
        }
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| mat[a * n + k].abs().total_cmp(&mat[b * n + k].abs()))
                .expect("non-empty range");
            if mat[p * n + k].abs() < 1e-13 {
                return Err(format!("singular basis at column {k}"));
            }
            if p != k {
                for c in 0..n {
                    mat.swap(p * n + c, k * n + c);
                    inv.swap(p * n + c, k * n + c);
                }
            }
            let d = mat[k * n + k];
            for c in 0..n {
                mat[k * n + c] /= d;
                inv[k * n + c] /= d;
            }
            for i in 0..n {
                if i != k {
                    let f = mat[i * n + k];
                    if f != 0.0 {
                        for c in 0..n {
                            mat[i * n + c] -= f * mat[k * n + c];
                            inv[i * n + c] -= f * inv[k * n + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.xb = self.ftran(rhs);
        self.since_refactor = 0;
        Ok(())
    }

    fn check_budget(&mut self, rhs: &[f64]) -> std::result::Result<(), String> {
        if self.iterations >= self.max_iterations {
            return Err(format!("iteration limit {} reached", self.max_iterations));
        }
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor(rhs)?;
        }
        Ok(())
    }

    /// Harris two-pass ratio test: the bound is relaxed by the feasibility
    /// tolerance, then the largest pivot within it is taken (smallest basic
    /// index in Bland mode). A zero-level artificial with a usable pivot is
    /// always chosen first so it cannot move off zero.
    fn leaving_row(&self, u: &[f64]) -> Option<(usize, f64)> {
        let n = self.n;
        let feas = self.tol * (1.0 + self.xb.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        if let Some(r) = (0..n)
            .filter(|&r| self.is_artificial(self.basis[r]) && self.xb[r].abs() <= feas && u[r].abs() > PIVOT_TOL)
            .max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()).then(b.cmp(&a)))
        {
            return Some((r, 0.0));
        }
        let mut bound = f64::INFINITY;
        for r in 0..n {
            if u[r] > PIVOT_TOL {
                bound = bound.min((self.xb[r].max(0.0) + feas) / u[r]);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut pick: Option<usize> = None;
        for r in 0..n {
            if u[r] <= PIVOT_TOL || self.xb[r].max(0.0) / u[r] > bound {
                continue;
            }
            pick = match pick {
                None => Some(r),
                Some(p) if self.bland => {
                    let (rp, rr) = (self.xb[p].max(0.0) / u[p], self.xb[r].max(0.0) / u[r]);
                    if rr < rp - 1e-12 || (rr <= rp + 1e-12 && self.basis[r] < self.basis[p]) {
                        Some(r)
                    } else {
                        Some(p)
                    }
                }
                Some(p) => Some(if u[r] > u[p] { r } else { p }),
            };
        }
        pick.map(|r| (r, self.xb[r].max(0.0) / u[r]))
    }

    /// Primal simplex on the dual problem; `rhs` is the current (possibly
    /// perturbed) right-hand side, used for periodic refactorization.
    fn primal(&mut self, phase: Phase, rhs: &[f64]) -> StepOutcome {
        let n = self.n;
        let mut col = vec![0.0; n];
        loop {
            if let Err(e) = self.check_budget(rhs) {
                return StepOutcome::Breakdown(e);
            }
            let pi = self.multipliers(phase);
            // artificials never re-enter
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.m {
                if self.in_basis[j] {
                    continue;
                }
                let d = self.reduced_cost(phase, j, &pi);
                let scale = 1.0 + self.lp.b[j].abs();
                if d < -self.tol * scale {
                    if self.bland {
                        entering = Some(j);
                        break;
                    }
                    if d / scale < best {
                        best = d / scale;
                        entering = Some(j);
                    }
                }
            }
            let Some(j) = entering else {
                return StepOutcome::Optimal;
            };
            self.column(j, &mut col);
            let u = self.ftran(&col);
            let leave = self.leaving_row(&u);
            let Some((r, ratio)) = leave else {
                return StepOutcome::DualUnbounded;
            };
            if ratio <= self.tol {
                self.degenerate_run += 1;
                if self.degenerate_run >= DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, j, &u);
        }
    }

    /// Dual simplex pivots until `x_B ≥ 0` (and basic artificials are zero),
    /// keeping the reduced costs nonnegative.
    fn dual_cleanup(&mut self, rhs: &[f64]) -> StepOutcome {
        let n = self.n;
        let feas = self.tol * (1.0 + rhs.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let mut col = vec![0.0; n];
        loop {
            if let Err(e) = self.check_budget(rhs) {
                return StepOutcome::Breakdown(e);
            }
            let mut leave = None;
            let mut worst = feas;
            for r in 0..n {
                let v = if self.is_artificial(self.basis[r]) {
                    self.xb[r].abs()
                } else {
                    -self.xb[r]
                };
                if v > worst {
                    worst = v;
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                return StepOutcome::Optimal;
            };
            let want = if self.xb[r] < 0.0 { -1.0 } else { 1.0 };
            let rho = self.binv[r * n..(r + 1) * n].to_vec();
            let pi = self.multipliers(Phase::Two);
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            let mut bound = f64::INFINITY;
            for j in 0..self.m {
                if self.in_basis[j] {
                    continue;
                }
                let alpha = dot(&rho, self.lp.row(j));
                if want * alpha <= PIVOT_TOL {
                    continue;
                }
                let d = self.reduced_cost(Phase::Two, j, &pi).max(0.0);
                bound = bound.min((d + self.price_tol(j)) / alpha.abs());
                cands.push((j, d / alpha.abs(), alpha.abs()));
            }
            let enter = cands
                .iter()
                .filter(|c| c.1 <= bound)
                .fold(None::<(usize, f64, f64)>, |acc, &c| match acc {
                    Some(a) if a.2 >= c.2 => Some(a),
                    _ => Some(c),
                });
            let Some((j, _, _)) = enter else {
                return StepOutcome::DualInfeasible;
            };
            self.column(j, &mut col);
            let u = self.ftran(&col);
            self.pivot(r, j, &u);
        }
    }

    fn is_dual_optimal(&self) -> bool {
        let pi = self.multipliers(Phase::Two);
        (0..self.m).all(|j| self.in_basis[j] || self.reduced_cost(Phase::Two, j, &pi) >= -self.price_tol(j))
    }

    /// `c + B ε` for small deterministic `ε > 0` on structural basic rows; the
    /// shifted problem has the current basis feasible and is nondegenerate
    /// with probability one.
    fn perturb(&mut self, c: &[f64], round: usize) -> Vec<f64> {
        let scale = 1.0 + self.xb.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut rhs = c.to_vec();
        let mut col = vec![0.0; self.n];
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ round as u64;
        for r in 0..self.n {
            state = crate::rng::derive_seed(state, r as u64);
            let j = self.basis[r];
            if self.is_artificial(j) {
                continue;
            }
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let eps = PERTURBATION * scale * (1.0 + u);
            self.xb[r] += eps;
            self.column(j, &mut col);
            for (ri, ci) in rhs.iter_mut().zip(&col) {
                *ri += eps * ci;
            }
        }
        rhs
    }

    /// Phase two from a dual-feasible or primal-feasible basis.
    fn optimize(&mut self, c: &[f64]) -> StepOutcome {
        for round in 0..4 {
            match self.dual_cleanup(c) {
                StepOutcome::Optimal => {}
                other => return other,
            }
            if self.is_dual_optimal() {
                return StepOutcome::Optimal;
            }
            let shifted = self.perturb(c, round);
            match self.primal(Phase::Two, &shifted) {
                StepOutcome::Optimal => {}
                other => return other,
            }
            if let Err(e) = self.refactor(c) {
                return StepOutcome::Breakdown(e);
            }
        }
        StepOutcome::Breakdown("perturbation rounds exhausted".into())
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self) {
        let n = self.n;
        let mut col = vec![0.0; n];
        for r in 0..n {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row = self.binv[r * n..(r + 1) * n].to_vec();
            let mut pick = None;
            let mut best = 1e-7;
            for j in 0..self.m {
                if self.in_basis[j] {
                    continue;
                }
                let v = dot(&row, self.lp.row(j)).abs();
                if v > best {
                    best = v;
                    pick = Some(j);
                }
            }
            if let Some(j) = pick {
                self.column(j, &mut col);
                let u = self.ftran(&col);
                self.pivot(r, j, &u);
            }
        }
    }

    fn dump(&self, reason: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "lpsolve breakdown: {reason}");
        let _ = writeln!(s, "n_vars={} rows={} iterations={} bland={}", self.n, self.m, self.iterations, self.bland);
        let _ = writeln!(s, "basis={:?}", self.basis);
        let _ = writeln!(s, "x_B={:?}", self.xb);
        for r in 0..self.n {
            let _ = writeln!(s, "Binv[{r}]={:?}", &self.binv[r * self.n..(r + 1) * self.n]);
        }
        s
    }
}

/// Solves `lp`; `tol` is the absolute feasibility/optimality tolerance.
pub fn solve(lp: &LinearProgram, tol: f64) -> LpSolution {
    solve_with_objective(lp, &lp.objective, tol)
}

/// Solves `lp` with its objective replaced by `c`; lets callers sweep many
/// objectives over one constraint set without copying it.
pub fn solve_with_objective(lp: &LinearProgram, c: &[f64], tol: f64) -> LpSolution {
    solve_warm(lp, c, tol, &mut None)
}

/// Like [`solve_with_objective`], starting from `warm` when present and
/// leaving the final optimal basis in it.
pub fn solve_warm(lp: &LinearProgram, c: &[f64], tol: f64, warm: &mut Option<WarmStart>) -> LpSolution {
    assert_eq!(c.len(), lp.n_vars, "objective length must equal n_vars");
    if let Some(ws) = warm.as_ref() {
        if let Some(mut d) = Dual::warm(lp, ws, c, tol) {
            if let StepOutcome::Optimal = d.optimize(c) {
                if let Some(sol) = extract(&mut d, c) {
                    *warm = Some(d.warm_start());
                    return sol;
                }
            }
        }
    }
    let (mut out, ws) = solve_cold(lp, c, tol);
    *warm = ws;
    if out.status == LpStatus::Unbounded {
        // dual infeasible: the primal is either unbounded or infeasible
        let (probe, _) = solve_cold(lp, &vec![0.0; lp.n_vars], tol);
        match probe.status {
            LpStatus::Optimal => out.x = probe.x,
            LpStatus::Infeasible => out.status = LpStatus::Infeasible,
            _ => {
                out.status = probe.status;
                out.diagnostics = probe.diagnostics;
            }
        }
        out.objective_value = match out.status {
            LpStatus::Unbounded => f64::INFINITY,
            _ => f64::NAN,
        };
        out.iterations += probe.iterations;
    }
    out
}

fn failure(lp: &LinearProgram, d: &Dual, status: LpStatus, diag: Option<String>) -> LpSolution {
    LpSolution {
        status,
        x: vec![0.0; lp.n_vars],
        objective_value: f64::NAN,
        iterations: d.iterations,
        dual: Vec::new(),
        diagnostics: diag,
    }
}

fn outcome_failure(lp: &LinearProgram, d: &Dual, o: StepOutcome) -> LpSolution {
    match o {
        StepOutcome::Optimal => unreachable!("not a failure"),
        StepOutcome::DualUnbounded => failure(lp, d, LpStatus::Infeasible, None),
        // resolved by the caller's feasibility probe
        StepOutcome::DualInfeasible => failure(lp, d, LpStatus::Unbounded, None),
        StepOutcome::Breakdown(e) => failure(lp, d, LpStatus::NumericalFailure, Some(d.dump(&e))),
    }
}

fn solve_cold(lp: &LinearProgram, c: &[f64], tol: f64) -> (LpSolution, Option<WarmStart>) {
    let mut d = Dual::cold(lp, c, tol);
    let c_scale = 1.0 + c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    match d.primal(Phase::One, c) {
        StepOutcome::Optimal => {}
        StepOutcome::DualUnbounded => {
            let diag = d.dump("phase one cannot be unbounded");
            return (failure(lp, &d, LpStatus::NumericalFailure, Some(diag)), None);
        }
        other => return (outcome_failure(lp, &d, other), None),
    }
    if let Err(e) = d.refactor(c) {
        let diag = d.dump(&e);
        return (failure(lp, &d, LpStatus::NumericalFailure, Some(diag)), None);
    }
    let infeas: f64 = d
        .basis
        .iter()
        .zip(&d.xb)
        .filter(|(&j, _)| d.is_artificial(j))
        .map(|(_, &v)| v.abs())
        .sum();
    if infeas > 1e3 * tol * c_scale {
        // Aᵀy = c has no nonnegative solution
        return (outcome_failure(lp, &d, StepOutcome::DualInfeasible), None);
    }
    d.drive_out_artificials();
    match d.optimize(c) {
        StepOutcome::Optimal => {}
        other => return (outcome_failure(lp, &d, other), None),
    }
    match extract(&mut d, c) {
        Some(sol) => {
            let ws = d.warm_start();
            (sol, Some(ws))
        }
        None => {
            let x = d.multipliers(Phase::Two);
            let reason = format!("final point violates a constraint by {:e}", lp.max_violation(&x));
            let diag = d.dump(&reason);
            (failure(lp, &d, LpStatus::NumericalFailure, Some(diag)), None)
        }
    }
}

fn extract(d: &mut Dual, c: &[f64]) -> Option<LpSolution> {
    d.refactor(c).ok()?;
    let lp = d.lp;
    let x = d.multipliers(Phase::Two);
    let b_scale = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if lp.max_violation(&x) > 1e3 * d.tol * b_scale {
        return None;
    }
    let mut dual = vec![0.0; d.m];
    for (&j, &v) in d.basis.iter().zip(&d.xb) {
        if j < d.m {
            dual[j] = v.max(0.0);
        }
    }
    Some(LpSolution {
        status: LpStatus::Optimal,
        objective_value: dot(c, &x),
        x,
        iterations: d.iterations,
        dual,
        diagnostics: None,
    })
}

/// Convenience wrapper turning non-optimal outcomes into errors.
pub fn solve_optimal(lp: &LinearProgram, tol: f64) -> Result<LpSolution> {
    let s = solve(lp, tol);
    match s.status {
        LpStatus::Optimal => Ok(s),
        other => Err(Error::LpFailure {
            x_star: Vec::new(),
            status: format!("{other:?}{}", s.diagnostics.map(|d| format!("\n{d}")).unwrap_or_default()),
        }),
    }
}
