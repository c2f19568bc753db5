//! Dense two-phase primal simplex over the slack form.
//!
//! The solver returns vertex (basic) optimal solutions, not merely optimal
//! values: the number of strictly positive variables in an optimal result
//! never exceeds the number of constraint rows. Row prices (duals) are read
//! off the final objective row, with signs normalized so that the dual
//! objective `sum duals[i] * rhs[i]` equals the primal objective.
//!
//! Pivoting uses the largest-coefficient rule and switches to Bland's rule
//! after a stall, so the solver terminates on degenerate inputs.

use crate::PIVOT_TOL;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Constraint comparison operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOp {
    Le,
    Ge,
    Eq,
}

/// One constraint row: `coeffs . x (op) rhs`.
#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub op: RowOp,
    pub rhs: f64,
}

/// A linear program over nonnegative variables.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        LpProblem {
            sense,
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, op: RowOp, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(LpRow { coeffs, op, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    /// Pivot magnitudes fell below the tolerance; the caller may rescale and
    /// retry.
    NumericallyUnstable,
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "problem is infeasible"),
            LpError::Unbounded => write!(f, "problem is unbounded"),
            LpError::NumericallyUnstable => write!(f, "pivot magnitudes below tolerance"),
        }
    }
}

impl std::error::Error for LpError {}

/// An optimal basic solution.
#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Structural variable values.
    pub values: Vec<f64>,
    /// Objective value in the problem's own sense.
    pub objective: f64,
    /// One price per row; `sum duals[i] * rhs[i]` equals `objective` at an
    /// optimum.
    pub duals: Vec<f64>,
    /// Identifiers of basic variables: structural variables are `0..n`,
    /// auxiliary (slack, surplus, artificial) variables follow.
    pub basis: Vec<usize>,
    pub num_structural: usize,
}

impl LpSolution {
    /// Number of strictly positive structural variables (the basic-support
    /// size witness).
    pub fn positive_support(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }
}

const RC_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Surplus,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    zrow: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
    active: Vec<bool>,
    col_kind: Vec<ColKind>,
    /// Column whose tableau entries equal `+e_row` in the original system,
    /// used to read the dual of each row.
    unit_col: Vec<usize>,
    row_flipped: Vec<bool>,
    num_structural: usize,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Self {
        let n = problem.num_vars();
        let m = problem.rows.len();

        let mut row_flipped = vec![false; m];
        let mut ops = Vec::with_capacity(m);
        for (i, row) in problem.rows.iter().enumerate() {
            if row.rhs < 0.0 {
                row_flipped[i] = true;
                ops.push(match row.op {
                    RowOp::Le => RowOp::Ge,
                    RowOp::Ge => RowOp::Le,
                    RowOp::Eq => RowOp::Eq,
                });
            } else {
                ops.push(row.op);
            }
        }

        let num_slack = ops
            .iter()
            .filter(|op| matches!(op, RowOp::Le | RowOp::Ge))
            .count();
        let num_art = ops
            .iter()
            .filter(|op| matches!(op, RowOp::Ge | RowOp::Eq))
            .count();
        let total = n + num_slack + num_art;

        let mut col_kind = vec![ColKind::Structural; n];
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = vec![0usize; m];
        let mut unit_col = vec![0usize; m];

        for (i, row) in problem.rows.iter().enumerate() {
            let sign = if row_flipped[i] { -1.0 } else { 1.0 };
            let mut r = vec![0.0; total];
            for (j, &c) in row.coeffs.iter().enumerate() {
                r[j] = sign * c;
            }
            rows.push(r);
            rhs.push(sign * row.rhs);
        }

        let mut next = n;
        for (i, op) in ops.iter().enumerate() {
            match op {
                RowOp::Le => {
                    rows[i][next] = 1.0;
                    col_kind.push(ColKind::Slack);
                    basis[i] = next;
                    unit_col[i] = next;
                    next += 1;
                }
                RowOp::Ge => {
                    rows[i][next] = -1.0;
                    col_kind.push(ColKind::Surplus);
                    next += 1;
                }
                RowOp::Eq => {}
            }
        }
        for (i, op) in ops.iter().enumerate() {
            if matches!(op, RowOp::Ge | RowOp::Eq) {
                rows[i][next] = 1.0;
                col_kind.push(ColKind::Artificial);
                basis[i] = next;
                unit_col[i] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next, total);

        Tableau {
            rows,
            rhs,
            zrow: vec![0.0; total],
            obj: 0.0,
            basis,
            active: vec![true; m],
            col_kind,
            unit_col,
            row_flipped,
            num_structural: n,
        }
    }

    fn num_cols(&self) -> usize {
        self.col_kind.len()
    }

    /// Rebuilds the reduced-cost row for the given cost vector over the
    /// current basis.
    fn reset_objective(&mut self, cost: &[f64]) {
        let total = self.num_cols();
        self.zrow = cost.iter().map(|&c| -c).collect();
        self.obj = 0.0;
        for r in 0..self.rows.len() {
            if !self.active[r] {
                continue;
            }
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                self.obj += cb * self.rhs[r];
                for j in 0..total {
                    self.zrow[j] += cb * self.rows[r][j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        self.rhs[row] *= inv;
        // Snap the pivot column to exact unit form.
        self.rows[row][col] = 1.0;

        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows.len() {
            if r == row || !self.active[r] {
                continue;
            }
            let factor = self.rows[r][col];
            if factor != 0.0 {
                for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                self.rows[r][col] = 0.0;
                self.rhs[r] -= factor * pivot_rhs;
                if self.rhs[r] < 0.0 && self.rhs[r] > -1e-11 {
                    self.rhs[r] = 0.0;
                }
            }
        }
        let factor = self.zrow[col];
        if factor != 0.0 {
            for (v, p) in self.zrow.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.zrow[col] = 0.0;
            self.obj -= factor * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Primal simplex iterations until optimality for the current objective.
    /// `allow` filters columns that may enter the basis.
    fn optimize(&mut self, allow: impl Fn(&Tableau, usize) -> bool) -> Result<(), LpError> {
        let m = self.rows.len();
        let total = self.num_cols();
        let stall_limit = 2 * (m + total);
        let hard_limit = 1000 + 100 * (m + total);

        let mut bland = false;
        let mut stall = 0usize;
        let mut best_obj = self.obj;

        for _ in 0..hard_limit {
            // Entering column: reduced cost below -RC_TOL.
            let mut enter = None;
            if bland {
                for j in 0..total {
                    if self.zrow[j] < -RC_TOL && allow(self, j) {
                        enter = Some(j);
                        break;
                    }
                }
            } else {
                let mut best = -RC_TOL;
                for j in 0..total {
                    if self.zrow[j] < best && allow(self, j) {
                        best = self.zrow[j];
                        enter = Some(j);
                    }
                }
            }
            let enter = match enter {
                Some(j) => j,
                None => return Ok(()),
            };

            // Ratio test.
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut tiny_positive = false;
            for r in 0..m {
                if !self.active[r] {
                    continue;
                }
                let a = self.rows[r][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[r] / a;
                    let better = match leave {
                        None => true,
                        Some(cur) => {
                            ratio < best_ratio - 1e-12
                                || (ratio < best_ratio + 1e-12
                                    && if bland {
                                        self.basis[r] < self.basis[cur]
                                    } else {
                                        r < cur
                                    })
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                } else if a > 0.0 {
                    tiny_positive = true;
                }
            }
            let leave = match leave {
                Some(r) => r,
                None if tiny_positive => return Err(LpError::NumericallyUnstable),
                None => return Err(LpError::Unbounded),
            };

            self.pivot(leave, enter);

            if self.obj > best_obj + 1e-12 * (1.0 + best_obj.abs()) {
                best_obj = self.obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > stall_limit {
                    bland = true;
                }
            }
        }
        Err(LpError::NumericallyUnstable)
    }
}

/// Solves the program, returning an optimal basic solution or classifying it
/// as infeasible or unbounded. Deterministic for a fixed input.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    for row in &problem.rows {
        assert_eq!(
            row.coeffs.len(),
            problem.objective.len(),
            "row length must match objective length"
        );
    }

    let mut tab = Tableau::build(problem);
    let total = tab.num_cols();
    let n = tab.num_structural;
    let m = problem.rows.len();

    // Phase 1: drive artificial variables to zero.
    let has_artificial = tab.col_kind.contains(&ColKind::Artificial);
    if has_artificial {
        let mut cost = vec![0.0; total];
        for (j, kind) in tab.col_kind.iter().enumerate() {
            if *kind == ColKind::Artificial {
                cost[j] = -1.0;
            }
        }
        tab.reset_objective(&cost);
        tab.optimize(|_, _| true)?;
        if tab.obj < -PHASE1_TOL {
            return Err(LpError::Infeasible);
        }
        // Pivot remaining basic artificials out; drop redundant rows.
        for r in 0..m {
            if !tab.active[r] || tab.col_kind[tab.basis[r]] != ColKind::Artificial {
                continue;
            }
            let mut pivoted = false;
            for j in 0..total {
                if tab.col_kind[j] != ColKind::Artificial && tab.rows[r][j].abs() > 1e-9 {
                    tab.pivot(r, j);
                    pivoted = true;
                    break;
                }
            }
            if !pivoted {
                tab.active[r] = false;
            }
        }
    }

    // Phase 2: the user's objective, artificial columns barred.
    let sense_sign = match problem.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut cost = vec![0.0; total];
    for (c, &obj) in cost.iter_mut().zip(&problem.objective) {
        *c = sense_sign * obj;
    }
    tab.reset_objective(&cost);
    tab.optimize(|t, j| t.col_kind[j] != ColKind::Artificial)?;

    let mut values = vec![0.0; n];
    for r in 0..m {
        if tab.active[r] && tab.basis[r] < n {
            let v = tab.rhs[r];
            values[tab.basis[r]] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
    }
    let objective: f64 = values
        .iter()
        .zip(&problem.objective)
        .map(|(x, c)| x * c)
        .sum();

    let mut duals = vec![0.0; m];
    for (r, dual) in duals.iter_mut().enumerate() {
        if !tab.active[r] {
            continue;
        }
        let mut y = tab.zrow[tab.unit_col[r]];
        if tab.row_flipped[r] {
            y = -y;
        }
        *dual = sense_sign * y;
    }

    let basis: Vec<usize> = (0..m)
        .filter(|&r| tab.active[r])
        .map(|r| tab.basis[r])
        .collect();

    Ok(LpSolution {
        values,
        objective,
        duals,
        basis,
        num_structural: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LP_TOL;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= LP_TOL * (1.0 + b.abs()), "{a} != {b}");
    }

    /// Independent vertex oracle for two-variable problems: enumerate all
    /// pairwise intersections of the constraint lines (including the axes),
    /// keep the feasible points, and take the best objective.
    fn best_vertex_2d(objective: [f64; 2], rows: &[([f64; 2], f64)]) -> f64 {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], 0.0));
        lines.push(([0.0, 1.0], 0.0));
        let mut best = f64::NEG_INFINITY;
        for a in 0..lines.len() {
            for b in (a + 1)..lines.len() {
                let (la, ra) = lines[a];
                let (lb, rb) = lines[b];
                let det = la[0] * lb[1] - la[1] * lb[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (ra * lb[1] - la[1] * rb) / det;
                let y = (la[0] * rb - ra * lb[0]) / det;
                if x < -1e-9 || y < -1e-9 {
                    continue;
                }
                if rows.iter().all(|(l, r)| l[0] * x + l[1] * y <= r + 1e-9) {
                    best = best.max(objective[0] * x + objective[1] * y);
                }
            }
        }
        best
    }

    #[test]
    fn box_problem() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![1.0, 0.0], RowOp::Le, 1.0);
        p.add_row(vec![0.0, 1.0], RowOp::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 2.0);
        assert_close(s.values[0], 1.0);
        assert_close(s.values[1], 1.0);
        assert_close(s.duals[0], 1.0);
        assert_close(s.duals[1], 1.0);
    }

    #[test]
    fn two_var_vertex_matches_enumeration() {
        let rows = [([0.6, 0.5], 1.0), ([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0)];
        let oracle = best_vertex_2d([5.0, 4.0], &rows);
        assert_close(oracle, 8.2);

        let mut p = LpProblem::new(Sense::Maximize, vec![5.0, 4.0]);
        for (coeffs, rhs) in rows {
            p.add_row(coeffs.to_vec(), RowOp::Le, rhs);
        }
        let s = solve(&p).unwrap();
        assert_close(s.objective, 8.2);
        assert_close(s.values[0], 1.0);
        assert_close(s.values[1], 0.8);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.add_row(vec![-1.0], RowOp::Le, -2.0);
        p.add_row(vec![1.0], RowOp::Le, 1.0);
        assert_eq!(solve(&p).unwrap_err(), LpError::Infeasible);
    }

    #[test]
    fn unbounded_is_detected() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 0.0]);
        p.add_row(vec![0.0, 1.0], RowOp::Le, 1.0);
        assert_eq!(solve(&p).unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn slack_constraint_has_zero_dual() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.add_row(vec![1.0], RowOp::Le, 1.0);
        p.add_row(vec![1.0], RowOp::Le, 5.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 1.0);
        assert_close(s.duals[0], 1.0);
        assert_close(s.duals[1], 0.0);
    }

    #[test]
    fn covering_dual_prices() {
        // Minimal covering master: one singleton column per item, unit costs.
        let n = 4;
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0; n]);
        for i in 0..n {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = 1.0;
            p.add_row(coeffs, RowOp::Ge, 1.0);
        }
        let s = solve(&p).unwrap();
        assert_close(s.objective, 4.0);
        for i in 0..n {
            assert_close(s.values[i], 1.0);
            assert_close(s.duals[i], 1.0);
            assert!(s.duals[i] <= 1.0 + LP_TOL);
        }
    }

    #[test]
    fn equality_rows_are_respected() {
        // max x + y s.t. x + y = 1, x - y = 0 -> x = y = 0.5.
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![1.0, 1.0], RowOp::Eq, 1.0);
        p.add_row(vec![1.0, -1.0], RowOp::Eq, 0.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 1.0);
        assert_close(s.values[0], 0.5);
        assert_close(s.values[1], 0.5);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![1.0, 1.0], RowOp::Eq, 1.0);
        p.add_row(vec![2.0, 2.0], RowOp::Eq, 2.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 1.0);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling-prone example (Beale); Bland's rule must save us.
        let mut p = LpProblem::new(Sense::Maximize, vec![0.75, -150.0, 0.02, -6.0]);
        p.add_row(vec![0.25, -60.0, -0.04, 9.0], RowOp::Le, 0.0);
        p.add_row(vec![0.5, -90.0, -0.02, 3.0], RowOp::Le, 0.0);
        p.add_row(vec![0.0, 0.0, 1.0, 0.0], RowOp::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 0.05);
    }

    #[test]
    fn minimize_with_mixed_rows() {
        // min 2x + 3y s.t. x + y >= 2, x <= 1.5 -> x = 1.5, y = 0.5, obj 4.5.
        let mut p = LpProblem::new(Sense::Minimize, vec![2.0, 3.0]);
        p.add_row(vec![1.0, 1.0], RowOp::Ge, 2.0);
        p.add_row(vec![1.0, 0.0], RowOp::Le, 1.5);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 4.5);
        assert_close(s.values[0], 1.5);
        assert_close(s.values[1], 0.5);
        // Strong duality.
        let dual_obj = s.duals[0] * 2.0 + s.duals[1] * 1.5;
        assert_close(dual_obj, 4.5);
    }

    #[test]
    fn negative_rhs_ge_row() {
        // x >= -1 is vacuous for x >= 0.
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.add_row(vec![1.0], RowOp::Ge, -1.0);
        p.add_row(vec![1.0], RowOp::Le, 2.0);
        let s = solve(&p).unwrap();
        assert_close(s.objective, 2.0);
    }

    #[test]
    fn zero_variable_problem() {
        let p = LpProblem::new(Sense::Maximize, vec![]);
        let s = solve(&p).unwrap();
        assert_eq!(s.values.len(), 0);
        assert_close(s.objective, 0.0);
    }

    fn check_certificates(p: &LpProblem, s: &LpSolution) {
        // Primal feasibility.
        for row in &p.rows {
            let lhs: f64 = row.coeffs.iter().zip(&s.values).map(|(c, x)| c * x).sum();
            let ok = match row.op {
                RowOp::Le => lhs <= row.rhs + LP_TOL * (1.0 + row.rhs.abs()),
                RowOp::Ge => lhs >= row.rhs - LP_TOL * (1.0 + row.rhs.abs()),
                RowOp::Eq => (lhs - row.rhs).abs() <= LP_TOL * (1.0 + row.rhs.abs()),
            };
            assert!(ok, "row violated: {lhs} vs {:?} {}", row.op, row.rhs);
        }
        // Basic support: positive structural count bounded by row count.
        assert!(s.positive_support(LP_TOL) <= p.rows.len());
        // Strong duality.
        let dual_obj: f64 = s.duals.iter().zip(&p.rows).map(|(y, r)| y * r.rhs).sum();
        assert!(
            (dual_obj - s.objective).abs() <= LP_TOL * (1.0 + s.objective.abs()),
            "duality gap: {dual_obj} vs {}",
            s.objective
        );
        // Complementary slackness on rows.
        for (row, y) in p.rows.iter().zip(&s.duals) {
            let lhs: f64 = row.coeffs.iter().zip(&s.values).map(|(c, x)| c * x).sum();
            let slack = (row.rhs - lhs).abs();
            assert!(
                y.abs() * slack <= 1e-5 * (1.0 + s.objective.abs()),
                "complementary slackness: dual {y} with slack {slack}"
            );
        }
    }

    #[test]
    fn randomized_certificates() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut solved = 0;
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=6);
            let mut p = LpProblem::new(
                if rng.gen_bool(0.5) {
                    Sense::Maximize
                } else {
                    Sense::Minimize
                },
                (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            );
            for _ in 0..m {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
                let op = match rng.gen_range(0..3) {
                    0 => RowOp::Le,
                    1 => RowOp::Ge,
                    _ => RowOp::Eq,
                };
                let rhs = rng.gen_range(0.0..4.0);
                p.add_row(coeffs, op, rhs);
            }
            if let Ok(s) = solve(&p) {
                check_certificates(&p, &s);
                solved += 1;
            }
        }
        assert!(solved > 50, "too few solvable random programs: {solved}");
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let mut p = LpProblem::new(Sense::Maximize, vec![5.0, 4.0, 3.0]);
        p.add_row(vec![2.0, 3.0, 1.0], RowOp::Le, 5.0);
        p.add_row(vec![4.0, 1.0, 2.0], RowOp::Le, 11.0);
        p.add_row(vec![3.0, 4.0, 2.0], RowOp::Le, 8.0);
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.duals, b.duals);
        assert_eq!(a.basis, b.basis);
        assert_close(a.objective, 13.0);
    }
}
