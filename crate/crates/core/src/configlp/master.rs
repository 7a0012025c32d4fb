//! Phase-1 restricted master LP for the configuration LP.
//!
//! Rows `0..n` are job coverage rows `sum x + a_j - e_j = 1`, rows
//! `n..n+m` are machine rows `sum x + t_i = 1`. The artificial variables
//! `a_j` carry cost 1 and start basic together with the machine slacks
//! `t_i`, so the columns of those variables in the tableau always hold
//! the basis inverse. New configuration columns are priced in through it.

use crate::configlp::knapsack::Configuration;

const PIVOT_EPS: f64 = 1e-11;
/// Reduced-cost tolerance for entering columns.
pub(crate) const REDUCED_COST_EPS: f64 = 1e-9;
/// Switch to Bland's rule after this many consecutive degenerate pivots.
const DEGENERATE_LIMIT: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct Master {
    jobs: usize,
    machines: usize,
    /// Row-major tableau, `rows x cols`.
    tableau: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Reduced costs, one per column.
    reduced: Vec<f64>,
    objective: f64,
    basis: Vec<usize>,
    configs: Vec<Configuration>,
}

impl Master {
    pub fn new(jobs: usize, machines: usize) -> Self {
        let rows = jobs + machines;
        let cols = 2 * jobs + machines;
        let mut tableau = vec![vec![0.0; cols]; rows];
        for j in 0..jobs {
            tableau[j][j] = 1.0; // a_j
            tableau[j][jobs + j] = -1.0; // e_j
        }
        for i in 0..machines {
            tableau[jobs + i][2 * jobs + i] = 1.0; // t_i
        }
        // reduced costs for the starting basis {a_j, t_i}
        let mut reduced = vec![0.0; cols];
        for j in 0..jobs {
            reduced[jobs + j] = 1.0; // e_j: 0 - (1)(-1)
        }
        let basis = (0..jobs).chain(2 * jobs..2 * jobs + machines).collect();
        Self {
            jobs,
            machines,
            tableau,
            rhs: vec![1.0; rows],
            reduced,
            objective: jobs as f64,
            basis,
            configs: Vec::new(),
        }
    }

    fn rows(&self) -> usize {
        self.jobs + self.machines
    }

    fn first_config_col(&self) -> usize {
        2 * self.jobs + self.machines
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Coverage duals `pi_j` (clamped at 0) and machine duals `mu_i >= 0`.
    pub fn duals(&self) -> (Vec<f64>, Vec<f64>) {
        let pi = (0..self.jobs).map(|j| (1.0 - self.reduced[j]).max(0.0)).collect();
        let mu = (0..self.machines)
            .map(|i| self.reduced[2 * self.jobs + i].max(0.0))
            .collect();
        (pi, mu)
    }

    /// Adds a configuration column, expressed in the current basis.
    pub fn add_column(&mut self, config: Configuration) {
        let t_col = 2 * self.jobs + config.machine;
        let rows = self.rows();
        let mut column = vec![0.0; rows];
        for (r, value) in column.iter_mut().enumerate() {
            let mut v = self.tableau[r][t_col];
            for &j in &config.jobs {
                v += self.tableau[r][j];
            }
            *value = v;
        }
        let pi = self.raw_duals();
        let mut d = -(pi[self.jobs + config.machine]);
        for &j in &config.jobs {
            d -= pi[j];
        }
        for (r, v) in column.into_iter().enumerate() {
            self.tableau[r].push(v);
        }
        self.reduced.push(d);
        self.configs.push(config);
    }

    /// Row duals `y_r` before sign conventions.
    fn raw_duals(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.rows()];
        for j in 0..self.jobs {
            y[j] = 1.0 - self.reduced[j];
        }
        for i in 0..self.machines {
            y[self.jobs + i] = -self.reduced[2 * self.jobs + i];
        }
        y
    }

    /// Runs primal simplex to optimality. Returns the number of pivots, or
    /// `None` when `max_pivots` is hit.
    pub fn optimize(&mut self, max_pivots: usize) -> Option<usize> {
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_LIMIT;
            let Some(entering) = self.choose_entering(bland) else {
                return Some(pivots);
            };
            let leaving = match self.ratio_test(entering) {
                Some(r) => r,
                // phase-1 is bounded below by 0; treat as converged
                None => return Some(pivots),
            };
            if self.rhs[leaving].abs() <= PIVOT_EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(leaving, entering);
            pivots += 1;
            if pivots >= max_pivots {
                return None;
            }
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (c, &d) in self.reduced.iter().enumerate() {
            if d >= -REDUCED_COST_EPS {
                continue;
            }
            if bland {
                return Some(c);
            }
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        best.map(|(c, _)| c)
    }

    fn ratio_test(&self, entering: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows() {
            let a = self.tableau[r][entering];
            if a > PIVOT_EPS {
                let ratio = self.rhs[r] / a;
                let replace = match best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < bv - PIVOT_EPS
                            || (ratio <= bv + PIVOT_EPS && self.basis[r] < self.basis[br])
                    }
                };
                if replace {
                    best = Some((r, ratio));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tableau[row][col];
        for v in self.tableau[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.tableau[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows() {
            if r == row {
                continue;
            }
            let f = self.tableau[r][col];
            if f != 0.0 {
                for (v, pv) in self.tableau[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rhs[r] -= f * pivot_rhs;
                if self.rhs[r].abs() < PIVOT_EPS {
                    self.rhs[r] = 0.0;
                }
            }
        }
        let f = self.reduced[col];
        for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        self.objective += f * pivot_rhs;
        self.basis[row] = col;
    }

    /// Weights of configuration columns in the current basic solution.
    pub fn config_weights(&self) -> Vec<(Configuration, f64)> {
        let first = self.first_config_col();
        let mut out = Vec::new();
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= first && self.rhs[r] > 0.0 {
                out.push((self.configs[b - first].clone(), self.rhs[r]));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Objective recomputed from the artificial values in the basis.
    #[cfg(test)]
    pub fn shortfall(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&b, _)| b < self.jobs)
            .map(|(_, &v)| v)
            .sum()
    }
}
