//! Dense primal simplex on a dictionary: Dantzig's rule, with Bland's rule
//! after a run of degenerate pivots.

use crate::error::{Error, Result};
use crate::par::{self, Execution};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const PIVOT_TOL: f64 = 1e-12;

/// Below this many tableau entries a pivot is done on one thread.
const PARALLEL_PIVOT_MIN: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Unbounded => "unbounded",
            LpStatus::Infeasible => "infeasible",
        }
    }
}

/// `maximize c·x  subject to  G x ≤ h,  x ≥ 0`. `rows` is row-major with
/// `objective.len()` columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<f64>,
    pub bounds: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        Self { objective, rows: Vec::new(), bounds: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.bounds.len()
    }

    pub fn add_constraint(&mut self, row: &[f64], bound: f64) {
        assert_eq!(row.len(), self.num_vars(), "constraint has wrong length");
        self.rows.extend_from_slice(row);
        self.bounds.push(bound);
    }

    fn validate(&self) -> Result<()> {
        if self.rows.len() != self.num_vars() * self.num_constraints() {
            return Err(Error::Shape("constraint matrix does not match bounds".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective) || !finite(&self.rows) || !finite(&self.bounds) {
            return Err(Error::Shape("linear program has non-finite entries".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal vertex (zeros unless `status` is optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Right-hand sides below `-DUAL_TOL` are repaired by dual pivots.
const DUAL_TOL: f64 = 1e-11;

/// Relative size of the right-hand-side perturbation used against degeneracy.
const PERTURBATION: f64 = 1e-10;

/// Variables `0..n` are structural, `n..n+rows` slacks, [`ARTIFICIAL`] the
/// phase-one artificial. Row `i` reads `x_{basis[i]} = b_i − Σ_j a_ij x_{nonbasis[j]}`,
/// stored as `[a_i0 … a_i(w−1), b̃_i, b_i]`: the pivots are chosen on the
/// perturbed right-hand side `b̃`, while `b` carries the original one through
/// the same row operations.
struct Dictionary {
    width: usize,
    tab: Vec<f64>,
    cost: Vec<f64>,
    value: f64,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
    exec: Execution,
    pivots: usize,
    /// Consecutive pivots that left the objective unchanged.
    degenerate_run: usize,
}

const ARTIFICIAL: usize = usize::MAX;

/// Degenerate pivots tolerated before switching to Bland's rule.
const BLAND_AFTER: usize = 50;

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Dictionary {
    fn stride(&self) -> usize {
        self.width + 2
    }

    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self, i: usize) -> f64 {
        self.tab[i * self.stride() + self.width]
    }

    fn original_rhs(&self, i: usize) -> f64 {
        self.tab[i * self.stride() + self.width + 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.stride() + j]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let stride = self.stride();
        let mut prow = self.tab[r * stride..(r + 1) * stride].to_vec();
        let a = prow[e];
        for (j, v) in prow.iter_mut().enumerate() {
            *v = if j == e { 1.0 / a } else { *v / a };
        }
        let update = |i: usize, row: &mut [f64]| {
            if i == r {
                row.copy_from_slice(&prow);
                return;
            }
            let f = row[e];
            if f == 0.0 {
                return;
            }
            for (j, v) in row.iter_mut().enumerate() {
                if j == e {
                    *v = -f * prow[e];
                } else {
                    *v -= f * prow[j];
                }
            }
        };
        let exec = if self.tab.len() >= PARALLEL_PIVOT_MIN { self.exec } else { Execution::Sequential };
        par::for_each_row(exec, &mut self.tab, stride, update);
        let ce = self.cost[e];
        self.value += ce * prow[w];
        for j in 0..w {
            self.cost[j] = if j == e { -ce * prow[e] } else { self.cost[j] - ce * prow[j] };
        }
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[e]);
        self.pivots += 1;
    }

    /// Largest improving reduced cost enters (the lowest index once pivots
    /// stall); the minimum-ratio row leaves, ties to the lowest basic index.
    fn step(&mut self) -> Step {
        let improving = (0..self.width).filter(|&j| self.cost[j] > FEASIBILITY_TOL);
        let entering = if self.degenerate_run >= BLAND_AFTER {
            improving.min_by_key(|&j| self.nonbasis[j])
        } else {
            improving.max_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]).then(self.nonbasis[b].cmp(&self.nonbasis[a])))
        };
        let Some(e) = entering else {
            return Step::Optimal;
        };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows() {
            let a = self.at(i, e);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            best = match best {
                Some((bi, br)) if br < ratio || br == ratio && self.basis[bi] < self.basis[i] => Some((bi, br)),
                _ => Some((i, ratio)),
            };
        }
        match best {
            None => Step::Unbounded,
            Some((r, ratio)) => {
                if ratio > 0.0 {
                    self.degenerate_run = 0;
                } else {
                    self.degenerate_run += 1;
                }
                self.pivot(r, e);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self) -> LpStatus {
        loop {
            match self.step() {
                Step::Optimal => return LpStatus::Optimal,
                Step::Unbounded => return LpStatus::Unbounded,
                Step::Pivoted => {}
            }
        }
    }

    /// Re-expresses `Σ c(v) x_v` over the current nonbasic variables.
    fn set_objective(&mut self, c: impl Fn(usize) -> f64) {
        self.cost = vec![0.0; self.width];
        self.value = 0.0;
        for (j, &v) in self.nonbasis.iter().enumerate() {
            self.cost[j] += c(v);
        }
        for i in 0..self.rows() {
            let cv = c(self.basis[i]);
            if cv != 0.0 {
                self.value += cv * self.rhs(i);
                for j in 0..self.width {
                    self.cost[j] -= cv * self.at(i, j);
                }
            }
        }
    }

    /// Appends `Σ_v r_v x_v ≤ h` (structural `v < n`) with slack `slack`,
    /// rewritten over the current nonbasic variables.
    fn append_row(&mut self, r: &[f64], h: f64, slack: usize) {
        let (w, stride) = (self.width, self.stride());
        let mut row = vec![0.0; stride];
        for (j, &v) in self.nonbasis.iter().enumerate() {
            if v < r.len() {
                row[j] = r[v];
            }
        }
        row[w] = perturbed(slack - r.len(), h);
        row[w + 1] = h;
        for i in 0..self.rows() {
            let v = self.basis[i];
            if v >= r.len() || r[v] == 0.0 {
                continue;
            }
            let f = r[v];
            let src = &self.tab[i * stride..(i + 1) * stride];
            for j in 0..w {
                row[j] -= f * src[j];
            }
            row[w] -= f * src[w];
            row[w + 1] -= f * src[w + 1];
        }
        self.tab.extend_from_slice(&row);
        self.basis.push(slack);
    }

    /// Dual simplex from a dual-feasible dictionary until every right-hand
    /// side is nonnegative, then primal clean-up. `false` when it gives up.
    fn restore(&mut self) -> bool {
        let limit = 10 * (self.rows() + self.width) + 100;
        for _ in 0..limit {
            let leaving = (0..self.rows())
                .filter(|&i| self.rhs(i) < -DUAL_TOL)
                .min_by(|&a, &b| self.rhs(a).total_cmp(&self.rhs(b)).then(self.basis[a].cmp(&self.basis[b])));
            let Some(r) = leaving else {
                return self.run() == LpStatus::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.width {
                let a = self.at(r, j);
                if a >= -PIVOT_TOL {
                    continue;
                }
                let ratio = (-self.cost[j]).max(0.0) / -a;
                best = match best {
                    Some((bj, br)) if br < ratio || br == ratio && self.nonbasis[bj] < self.nonbasis[j] => {
                        Some((bj, br))
                    }
                    _ => Some((j, ratio)),
                };
            }
            let Some((e, _)) = best else {
                return false;
            };
            self.pivot(r, e);
        }
        false
    }

    fn solution(&self, objective: &[f64], status: LpStatus) -> LpSolution {
        let n = objective.len();
        let mut x = vec![0.0; n];
        for (i, &v) in self.basis.iter().enumerate() {
            if v < n {
                x[v] = self.original_rhs(i).max(0.0);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpSolution { status, x, objective: value, pivots: self.pivots }
    }

    fn drop_column(&mut self, e: usize) {
        let stride = self.stride();
        let mut tab = Vec::with_capacity(self.rows() * (stride - 1));
        for row in self.tab.chunks(stride) {
            tab.extend(row.iter().enumerate().filter(|&(j, _)| j != e).map(|(_, v)| *v));
        }
        self.tab = tab;
        self.cost.remove(e);
        self.nonbasis.remove(e);
        self.width -= 1;
    }
}

/// Deterministic perturbation in `[1, 2)·PERTURBATION·max(1, |h|)`, distinct
/// per row so that no two ratios tie.
fn perturbed(i: usize, h: f64) -> f64 {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let u = ((i as f64 + 1.0) * GOLDEN).fract();
    h + (1.0 + u) * PERTURBATION * h.abs().max(1.0)
}

pub fn lp_solve(problem: &LpProblem) -> Result<LpSolution> {
    lp_solve_with(problem, Execution::default())
}

/// Two-phase simplex. Phase one (only when some bound is negative) minimizes
/// a single artificial variable subtracted from every row.
///
/// Pivots run on right-hand sides perturbed by about
/// `1e-10` relative, which removes degenerate ties; the returned vertex is the
/// final basis evaluated on the unperturbed right-hand side.
pub fn lp_solve_with(problem: &LpProblem, exec: Execution) -> Result<LpSolution> {
    problem.validate()?;
    Ok(solve_fresh(problem, exec).1)
}

/// Solves from scratch; the dictionary is returned when the status is optimal.
fn solve_fresh(problem: &LpProblem, exec: Execution) -> (Option<Dictionary>, LpSolution) {
    let n = problem.num_vars();
    let rows = problem.num_constraints();
    let needs_phase_one = problem.bounds.iter().any(|&h| h < -FEASIBILITY_TOL);
    let width = n + usize::from(needs_phase_one);
    let mut tab = Vec::with_capacity(rows * (width + 2));
    for (i, &h) in problem.bounds.iter().enumerate() {
        tab.extend_from_slice(&problem.rows[i * n..(i + 1) * n]);
        if needs_phase_one {
            tab.push(-1.0);
        }
        tab.push(perturbed(i, h));
        tab.push(h);
    }
    let mut nonbasis: Vec<usize> = (0..n).collect();
    if needs_phase_one {
        nonbasis.push(ARTIFICIAL);
    }
    let mut dict = Dictionary {
        width,
        tab,
        cost: vec![0.0; width],
        value: 0.0,
        basis: (n..n + rows).collect(),
        nonbasis,
        exec,
        pivots: 0,
        degenerate_run: 0,
    };
    let fail = |status, pivots| (None, LpSolution { status, x: vec![0.0; n], objective: 0.0, pivots });

    if needs_phase_one {
        dict.set_objective(|v| if v == ARTIFICIAL { -1.0 } else { 0.0 });
        let worst = (0..rows)
            .min_by(|&a, &b| dict.rhs(a).total_cmp(&dict.rhs(b)).then(a.cmp(&b)))
            .expect("a negative bound exists");
        dict.pivot(worst, n);
        dict.run();
        if dict.value < -FEASIBILITY_TOL {
            return fail(LpStatus::Infeasible, dict.pivots);
        }
        if let Some(r) = dict.basis.iter().position(|&v| v == ARTIFICIAL) {
            let e = (0..dict.width)
                .filter(|&j| dict.at(r, j).abs() > PIVOT_TOL)
                .max_by(|&a, &b| dict.at(r, a).abs().total_cmp(&dict.at(r, b).abs()))
                .expect("artificial row has a nonzero entry");
            dict.pivot(r, e);
        }
        let e = dict.nonbasis.iter().position(|&v| v == ARTIFICIAL).expect("artificial is nonbasic");
        dict.drop_column(e);
    }

    let c = &problem.objective;
    dict.set_objective(|v| c.get(v).copied().unwrap_or(0.0));
    let status = dict.run();
    if status != LpStatus::Optimal {
        return fail(status, dict.pivots);
    }
    let sol = dict.solution(c, status);
    (Some(dict), sol)
}

/// A linear program that grows by constraints between solves. After an
/// optimal solve, new rows are added to the final dictionary and repaired by
/// dual simplex pivots; anything else solves from scratch.
pub struct IncrementalLp {
    problem: LpProblem,
    exec: Execution,
    dict: Option<Dictionary>,
    pivots: usize,
}

impl IncrementalLp {
    pub fn new(objective: Vec<f64>, exec: Execution) -> Self {
        Self { problem: LpProblem::new(objective), exec, dict: None, pivots: 0 }
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn add_constraint(&mut self, row: &[f64], bound: f64) {
        let slack = self.problem.num_vars() + self.problem.num_constraints();
        self.problem.add_constraint(row, bound);
        if let Some(dict) = self.dict.as_mut() {
            dict.append_row(row, bound, slack);
        }
    }

    pub fn solve(&mut self) -> Result<LpSolution> {
        self.problem.validate()?;
        if let Some(mut dict) = self.dict.take() {
            let before = dict.pivots;
            if dict.restore() {
                self.pivots += dict.pivots - before;
                let mut sol = dict.solution(&self.problem.objective, LpStatus::Optimal);
                sol.pivots = self.pivots;
                self.dict = Some(dict);
                return Ok(sol);
            }
            self.pivots += dict.pivots - before;
        }
        let (dict, mut sol) = solve_fresh(&self.problem, self.exec);
        self.pivots += sol.pivots;
        sol.pivots = self.pivots;
        self.dict = dict;
        Ok(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(objective: &[f64], rows: &[&[f64]], bounds: &[f64]) -> LpProblem {
        let mut p = LpProblem::new(objective.to_vec());
        for (r, &h) in rows.iter().zip(bounds) {
            p.add_constraint(r, h);
        }
        p
    }

    #[test]
    fn examples() {
        let s = lp_solve(&lp(&[1.0], &[&[1.0]], &[3.0])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);

        let s = lp_solve(&lp(&[1.0, 1.0], &[&[1.0, 0.0], &[0.0, 1.0]], &[1.0, 2.0])).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 2.0).abs() < 1e-12);

        let s = lp_solve(&LpProblem::new(vec![1.0])).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn phase_one() {
        // x ≥ 1 written as −x ≤ −1; maximize −x
        let s = lp_solve(&lp(&[-1.0], &[&[-1.0], &[1.0]], &[-1.0, 5.0])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);

        let s = lp_solve(&lp(&[1.0], &[&[1.0], &[-1.0]], &[1.0, -2.0])).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // several constraints tight at the optimum
        let s = lp_solve(&lp(
            &[1.0, 1.0, 1.0],
            &[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]],
            &[1.0, 1.0, 1.0, 1.5, 3.0],
        ))
        .unwrap();
        assert!((s.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(lp_solve(&lp(&[f64::NAN], &[], &[])).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut p = LpProblem::new(vec![1.0, 2.0, -0.5, 0.25]);
        for k in 0..12_000 {
            let t = k as f64 * 0.001;
            p.add_constraint(&[t.cos(), t.sin(), (2.0 * t).cos(), (3.0 * t).sin()], 1.0 + 0.1 * t.sin().abs());
        }
        let a = lp_solve_with(&p, Execution::Sequential).unwrap();
        let b = lp_solve_with(&p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incremental_matches_fresh() {
        let cons: Vec<([f64; 3], f64)> = (0..60)
            .map(|k| {
                let t = k as f64 * 0.37;
                ([t.cos(), t.sin(), (0.5 * t).cos()], 1.0 + 0.2 * (1.3 * t).sin().abs())
            })
            .collect();
        let objective = vec![1.0, 0.7, 0.3];
        let mut inc = IncrementalLp::new(objective.clone(), Execution::Sequential);
        for chunk in cons.chunks(7) {
            for (r, h) in chunk {
                inc.add_constraint(r, *h);
            }
            let a = inc.solve().unwrap();
            let b = lp_solve(inc.problem()).unwrap();
            assert_eq!(a.status, b.status);
            if a.status == LpStatus::Optimal {
                assert!((a.objective - b.objective).abs() <= 1e-9 * b.objective.abs().max(1.0));
            }
        }
        // the problem stays bounded once the first chunk is in
        assert_eq!(inc.solve().unwrap().status, LpStatus::Optimal);
    }
}
