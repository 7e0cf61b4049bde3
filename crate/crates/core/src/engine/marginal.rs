//! One-time marginals `P^{xy}_{su}(X_t = z)` on the ladder.

use std::io::Write;

use super::chain::{linear_step, Coefficients, LogChain};
use super::grid::{TimeGrid, TERMINAL_STEP};
use super::hfield::{HField, MAX_H_STEP};
use super::BridgeSpec;
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::io::fmt17;
use crate::scalar::Scalar;

/// Largest tolerated `|1 − row sum|` before renormalization.
pub const DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MarginalTable<T> {
    spec: BridgeSpec<T>,
    grid: TimeGrid<T>,
    /// `probs[row][z − x]`
    probs: Vec<Vec<T>>,
    drift: T,
}

impl<T: Scalar> MarginalTable<T> {
    pub fn spec(&self) -> &BridgeSpec<T> {
        &self.spec
    }

    pub fn times(&self) -> &[T] {
        self.grid.nodes()
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.probs
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.probs[i]
    }

    /// Largest `|1 − row sum|` seen before renormalization.
    pub fn drift(&self) -> T {
        self.drift
    }

    /// Row index closest to `t`.
    pub fn nearest_row(&self, t: T) -> usize {
        self.grid.nearest(t)
    }

    /// `P(X_t ≥ x + i)` at row `r`, summed from the top of the ladder.
    pub fn tail(&self, r: usize, i: u64) -> T {
        self.probs[r][i as usize..].iter().rev().copied().sum()
    }

    /// `P(X_t < x + i)` at row `r`.
    pub fn lower_tail(&self, r: usize, i: u64) -> T {
        self.probs[r][..i as usize].iter().copied().sum()
    }

    /// Keeps only the rows nearest to `times` (duplicates removed).
    pub fn subsample(&self, times: &[T]) -> Self {
        let mut idx: Vec<usize> = times.iter().map(|&t| self.grid.nearest(t)).collect();
        idx.dedup();
        Self {
            spec: self.spec,
            grid: TimeGrid::from_nodes(idx.iter().map(|&i| self.grid.nodes()[i]).collect()),
            probs: idx.iter().map(|&i| self.probs[i].clone()).collect(),
            drift: self.drift,
        }
    }

    /// Verifies that every tail `P(X_t ≥ x+i)` is non-decreasing in `t`
    /// (up to `slack`), returning the first violation.
    pub fn check_tail_monotone(&self, slack: T) -> std::result::Result<(), (usize, u64)> {
        let n = self.spec.height();
        for i in 1..=n {
            let mut prev = T::zero();
            for r in 0..self.probs.len() {
                let cur = self.tail(r, i);
                if cur + slack < prev {
                    return Err((r, i));
                }
                prev = prev.max(cur);
            }
        }
        Ok(())
    }

    /// CSV with header `t,z,prob`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,z,prob")?;
        for (t, row) in self.grid.nodes().iter().zip(&self.probs) {
            for (j, p) in row.iter().enumerate() {
                writeln!(w, "{},{},{}", fmt17(t.as_f64()), self.spec.x + j as u64, fmt17(p.as_f64()))?;
            }
        }
        Ok(())
    }
}

fn table_grid<T: Scalar>(spec: &BridgeSpec<T>, h_step: T) -> Result<TimeGrid<T>> {
    spec.validate()?;
    let window = spec.length();
    if !(h_step > T::zero() && h_step < window && h_step <= T::lit(MAX_H_STEP)) {
        return Err(Error::BadStep { step: h_step.as_f64(), window: window.as_f64() });
    }
    Ok(TimeGrid::bridge(spec.s, spec.u, h_step, T::lit(TERMINAL_STEP)))
}

fn point_mass<T: Scalar>(m: usize, at: usize) -> Vec<T> {
    let mut row = vec![T::zero(); m];
    row[at] = T::one();
    row
}

fn normalize<T: Scalar>(row: &mut [T], drift: &mut T) {
    let total: T = row.iter().copied().sum();
    *drift = drift.max((T::one() - total).abs());
    for p in row.iter_mut() {
        *p = p.max(T::zero()) / total;
    }
}

/// Forward Kolmogorov pass of the h-transformed process.
///
/// The h-function is solved on a grid four times finer than the table and
/// the forward RK4 takes two steps per table cell, so every stage reads the
/// bridge intensity at a node. The last row is the pin mass at `y`.
pub fn marginal_table<T: Scalar>(
    model: &IntensityModel<T>,
    spec: &BridgeSpec<T>,
    h_step: T,
) -> Result<MarginalTable<T>> {
    let grid = table_grid(spec, h_step)?;
    let fine = grid.refined().refined();
    let h = HField::solve_on_grid(model, spec, fine.clone())?;
    let m = (spec.height() + 1) as usize;
    let rows = grid.len();
    let nodes = fine.nodes();

    let coeffs = |node: usize| -> Result<Coefficients<T>> {
        let mut c = Coefficients::zeros(m);
        for j in 0..m {
            c.decay[j] = h.node_intensity(model, node, spec.x + j as u64)?;
        }
        for j in 1..m {
            c.feed[j] = c.decay[j - 1];
        }
        Ok(c)
    };

    let mut probs = Vec::with_capacity(rows);
    let mut q = point_mass(m, 0);
    probs.push(q.clone());
    let mut drift = T::zero();
    let mut start = coeffs(0)?;
    for r in 1..rows - 1 {
        for sub in [4 * r - 2, 4 * r] {
            let mid = coeffs(sub - 1)?;
            let end = coeffs(sub)?;
            linear_step(&mut q, nodes[sub] - nodes[sub - 2], &start, &mid, &end);
            start = end;
        }
        normalize(&mut q, &mut drift);
        probs.push(q.clone());
    }
    if rows > 1 {
        probs.push(point_mass(m, m - 1));
    }
    if drift > T::lit(DRIFT_LIMIT) {
        return Err(Error::ConservationLoss { drift: drift.as_f64(), limit: DRIFT_LIMIT });
    }
    Ok(MarginalTable { spec: *spec, grid, probs, drift })
}

/// Same table from the two-sided formula
/// `q(t, z) = p_{s,t}(x, z) h(t, z) / h(s, x)`, which needs no handling of
/// the pinning singularity.
pub fn marginal_table_two_sided<T: Scalar>(
    model: &IntensityModel<T>,
    spec: &BridgeSpec<T>,
    h_step: T,
) -> Result<MarginalTable<T>> {
    let grid = table_grid(spec, h_step)?;
    let fine = grid.refined().refined();
    let h = HField::solve_on_grid(model, spec, fine.clone())?;
    let m = (spec.height() + 1) as usize;
    let nodes = fine.nodes();

    let coeffs = |t: T| -> Result<Coefficients<T>> {
        let mut c = Coefficients::zeros(m);
        for j in 0..m {
            c.decay[j] = model.eval(t, spec.x + j as u64)?;
        }
        for j in 1..m {
            c.feed[j] = c.decay[j - 1];
        }
        Ok(c)
    };

    let log_norm = h.log_transition();
    let mut chain = LogChain::new(m);
    let mut log_p = vec![T::neg_infinity(); m];
    log_p[0] = T::zero();
    let mut probs = vec![point_mass(m, 0)];
    let mut drift = T::zero();
    let mut start = coeffs(nodes[0])?;
    let last = nodes.len() - 1;
    for i in 1..last {
        let mid = coeffs((nodes[i - 1] + nodes[i]) / T::lit(2.0))?;
        let end = coeffs(nodes[i])?;
        chain.step(&mut log_p, nodes[i] - nodes[i - 1], &start, &mid, &end);
        start = end;
        if i % 4 == 0 {
            let mut row: Vec<T> = (0..m)
                .map(|j| {
                    let lh = h.log_h_node(i, spec.x + j as u64);
                    if log_p[j].is_finite() && lh.is_finite() {
                        (log_p[j] + lh - log_norm).exp()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            normalize(&mut row, &mut drift);
            probs.push(row);
        }
    }
    probs.push(point_mass(m, m - 1));
    if drift > T::lit(DRIFT_LIMIT) {
        return Err(Error::ConservationLoss { drift: drift.as_f64(), limit: DRIFT_LIMIT });
    }
    Ok(MarginalTable { spec: *spec, grid, probs, drift })
}

/// `(t, E[X_t])` for every row of the table.
pub fn mean_curve<T: Scalar>(table: &MarginalTable<T>) -> Vec<(T, T)> {
    let x = table.spec.x;
    table
        .times()
        .iter()
        .zip(&table.probs)
        .map(|(&t, row)| {
            let mean = row
                .iter()
                .enumerate()
                .map(|(j, &p)| T::from_u64(x + j as u64) * p)
                .sum();
            (t, mean)
        })
        .collect()
}

/// Three-point second differences at the interior nodes of `curve`.
/// On a uniform grid this is `(f_{i+1} − 2 f_i + f_{i−1}) / step²`.
pub fn second_differences<T: Scalar>(curve: &[(T, T)]) -> Result<Vec<(T, T)>> {
    if curve.len() < 3 {
        return Err(Error::GridTooCoarse(curve.len()));
    }
    Ok(curve
        .windows(3)
        .map(|w| {
            let (t0, f0) = w[0];
            let (t1, f1) = w[1];
            let (t2, f2) = w[2];
            let (h0, h1) = (t1 - t0, t2 - t1);
            let d = T::lit(2.0) * ((f2 - f1) / h1 - (f1 - f0) / h0) / (h0 + h1);
            (t1, d)
        })
        .collect())
}

/// CSV with header `t,mean,second_diff`; the endpoints have no second
/// difference and leave the column empty.
pub fn write_mean_csv<T: Scalar, W: Write>(curve: &[(T, T)], mut w: W) -> Result<()> {
    let second = second_differences(curve)?;
    writeln!(w, "t,mean,second_diff")?;
    for (k, (t, mean)) in curve.iter().enumerate() {
        let d = if k == 0 || k + 1 == curve.len() {
            String::new()
        } else {
            fmt17(second[k - 1].1.as_f64())
        };
        writeln!(w, "{},{},{}", fmt17(t.as_f64()), fmt17(mean.as_f64()), d)?;
    }
    Ok(())
}
