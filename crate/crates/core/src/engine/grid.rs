use crate::scalar::Scalar;

/// Width of each end layer, as a fraction of the bridge length, that is
/// resolved with the fine step.
pub const TERMINAL_FRACTION: f64 = 0.01;
/// Step used inside the end layers.
pub const TERMINAL_STEP: f64 = 1e-5;

/// Strictly increasing time nodes covering `[s, u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    nodes: Vec<T>,
}

fn cells<T: Scalar>(span: T, step: T) -> usize {
    let raw = (span / step).as_f64();
    let near = raw.round();
    let n = if (raw - near).abs() < 1e-7 * near.max(1.0) { near } else { raw.ceil() };
    (n as usize).max(1)
}

impl<T: Scalar> TimeGrid<T> {
    /// Cells of `min(step, fine)` on the first and last 1% of the window
    /// (the initial power-law layer and the pinning singularity), uniform
    /// cells of about `step` in between.
    pub fn bridge(s: T, u: T, step: T, fine: T) -> Self {
        let layer = (u - s) * T::lit(TERMINAL_FRACTION);
        let fine = fine.min(step);
        let a = s + layer;
        let b = u - layer;
        let n_layer = cells(layer, fine);
        let n_coarse = cells(b - a, step);
        let mut nodes = Vec::with_capacity(2 * n_layer + n_coarse + 1);
        let mut push = |from: T, to: T, n: usize| {
            for k in 0..n {
                nodes.push(from + (to - from) * T::from_usize(k) / T::from_usize(n));
            }
        };
        push(s, a, n_layer);
        push(a, b, n_coarse);
        push(b, u, n_layer);
        nodes.push(u);
        Self { nodes }
    }

    pub fn from_nodes(nodes: Vec<T>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Self { nodes }
    }

    /// Inserts the midpoint of every cell.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push((w[0] + w[1]) / T::lit(2.0));
        }
        nodes.push(*self.nodes.last().unwrap());
        Self { nodes }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index `i` of the cell `[t_i, t_{i+1}]` containing `t` (clamped).
    pub fn cell(&self, t: T) -> usize {
        self.nodes.partition_point(|&g| g <= t).clamp(1, self.nodes.len() - 1) - 1
    }

    /// Index of the node closest to `t`.
    pub fn nearest(&self, t: T) -> usize {
        let i = self.cell(t);
        if (t - self.nodes[i]).abs() <= (self.nodes[i + 1] - t).abs() {
            i
        } else {
            i + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_grid_hits_hundredths() {
        let g = TimeGrid::<f64>::bridge(0.0, 1.0, 1e-3, 1e-5);
        assert_eq!(g.len(), 1000 + 980 + 1000 + 1);
        for k in 0..=99 {
            let t = k as f64 / 100.0;
            let i = g.nearest(t);
            assert!((g.nodes()[i] - t).abs() < 1e-14, "t={t}");
        }
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
        let r = g.refined();
        assert_eq!(r.len(), 2 * g.len() - 1);
        assert_eq!(r.nodes()[2], g.nodes()[1]);
    }
}
