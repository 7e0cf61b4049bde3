//! Classical RK4 for bidiagonal linear systems
//!
//! ```text
//! dv_k/dτ = −d_k(τ) v_k + f_k(τ) v_{k−1},   k = 0..m   (v_{−1} = 0)
//! ```
//!
//! carried in log space. Every step rescales each component by a reference
//! exponent, so values spanning thousands of orders of magnitude (bridge
//! h-functions of tall ladders) integrate without underflow. Components
//! that are exactly zero are stored as `−∞`.

use crate::scalar::Scalar;

/// Per-step coefficient snapshot: `decay[k] = d_k`, `feed[k] = f_k`
/// (`feed[0]` is ignored).
#[derive(Debug, Clone)]
pub(crate) struct Coefficients<T> {
    pub decay: Vec<T>,
    pub feed: Vec<T>,
}

impl<T: Scalar> Coefficients<T> {
    pub fn zeros(m: usize) -> Self {
        Self { decay: vec![T::zero(); m], feed: vec![T::zero(); m] }
    }
}

fn rhs<T: Scalar>(c: &Coefficients<T>, ratio: &[T], g: &[T], out: &mut [T]) {
    out[0] = -c.decay[0] * g[0];
    for k in 1..g.len() {
        out[k] = -c.decay[k] * g[k] + c.feed[k] * ratio[k] * g[k - 1];
    }
}

/// Workspace for repeated log-space RK4 steps on an `m`-component chain.
pub(crate) struct LogChain<T> {
    refs: Vec<T>,
    ratio: Vec<T>,
    g: Vec<T>,
    tmp: Vec<T>,
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    gap: T,
}

impl<T: Scalar> LogChain<T> {
    pub fn new(m: usize) -> Self {
        // Largest admissible reference gap: four RK stages may compound it.
        let gap = T::max_value().ln() / T::lit(5.0);
        Self {
            refs: vec![T::zero(); m],
            ratio: vec![T::zero(); m],
            g: vec![T::zero(); m],
            tmp: vec![T::zero(); m],
            k1: vec![T::zero(); m],
            k2: vec![T::zero(); m],
            k3: vec![T::zero(); m],
            k4: vec![T::zero(); m],
            gap,
        }
    }

    /// Advances `log_v` by `dt` with coefficients sampled at the start,
    /// midpoint and end of the step.
    pub fn step(
        &mut self,
        log_v: &mut [T],
        dt: T,
        start: &Coefficients<T>,
        mid: &Coefficients<T>,
        end: &Coefficients<T>,
    ) {
        let m = log_v.len();
        let mut prev_ref = T::neg_infinity();
        for k in 0..m {
            let r = if prev_ref.is_finite() {
                log_v[k].max(prev_ref - self.gap)
            } else {
                log_v[k]
            };
            self.refs[k] = r;
            self.g[k] = if r.is_finite() { (log_v[k] - r).exp() } else { T::zero() };
            self.ratio[k] = if k > 0 && prev_ref.is_finite() && r.is_finite() {
                (prev_ref - r).exp()
            } else {
                T::zero()
            };
            prev_ref = r;
        }

        let half = dt / T::lit(2.0);
        rhs(start, &self.ratio, &self.g, &mut self.k1);
        for k in 0..m {
            self.tmp[k] = self.g[k] + half * self.k1[k];
        }
        rhs(mid, &self.ratio, &self.tmp, &mut self.k2);
        for k in 0..m {
            self.tmp[k] = self.g[k] + half * self.k2[k];
        }
        rhs(mid, &self.ratio, &self.tmp, &mut self.k3);
        for k in 0..m {
            self.tmp[k] = self.g[k] + dt * self.k3[k];
        }
        rhs(end, &self.ratio, &self.tmp, &mut self.k4);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for k in 0..m {
            let g = self.g[k]
                + sixth * (self.k1[k] + two * self.k2[k] + two * self.k3[k] + self.k4[k]);
            log_v[k] = if g > T::zero() && self.refs[k].is_finite() {
                self.refs[k] + g.ln()
            } else {
                T::neg_infinity()
            };
        }
    }
}

/// Plain linear-space RK4 step for the same chain structure.
pub(crate) fn linear_step<T: Scalar>(
    v: &mut [T],
    dt: T,
    start: &Coefficients<T>,
    mid: &Coefficients<T>,
    end: &Coefficients<T>,
) {
    let m = v.len();
    let ones = vec![T::one(); m];
    let mut k1 = vec![T::zero(); m];
    let mut k2 = vec![T::zero(); m];
    let mut k3 = vec![T::zero(); m];
    let mut k4 = vec![T::zero(); m];
    let mut tmp = vec![T::zero(); m];
    let half = dt / T::lit(2.0);
    rhs(start, &ones, v, &mut k1);
    for k in 0..m {
        tmp[k] = v[k] + half * k1[k];
    }
    rhs(mid, &ones, &tmp, &mut k2);
    for k in 0..m {
        tmp[k] = v[k] + half * k2[k];
    }
    rhs(mid, &ones, &tmp, &mut k3);
    for k in 0..m {
        tmp[k] = v[k] + dt * k3[k];
    }
    rhs(end, &ones, &tmp, &mut k4);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    for k in 0..m {
        v[k] += sixth * (k1[k] + two * k2[k] + two * k3[k] + k4[k]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(m: usize, rate: f64) -> Coefficients<f64> {
        Coefficients { decay: vec![rate; m], feed: vec![rate; m] }
    }

    #[test]
    fn poisson_chain_matches_closed_form_in_log_space() {
        // v_k(τ) = e^{−τ} τ^k / k!  starting from a point mass at k = 0
        let m = 400;
        let c = constant(m, 1.0);
        let mut chain = LogChain::new(m);
        let mut v = vec![f64::NEG_INFINITY; m];
        v[0] = 0.0;
        let dt = 1e-4;
        for _ in 0..10_000 {
            chain.step(&mut v, dt, &c, &c, &c);
        }
        for k in [0usize, 1, 5, 50] {
            let exact = -1.0 + 0.0 - crate::scalar::ln_factorial::<f64>(k as u64);
            assert!((v[k] - exact).abs() < 1e-8, "k={k}: {} vs {exact}", v[k]);
        }
        // deep components are astronomically small but still finite
        assert!(v[300].is_finite() && v[300] < -1000.0);
    }

    #[test]
    fn linear_step_conserves_mass_when_feed_matches_decay() {
        let m = 6;
        let rates: Vec<f64> = (0..m).map(|k| if k + 1 == m { 0.0 } else { 1.0 + k as f64 }).collect();
        let mut feed = vec![0.0; m];
        feed[1..m].copy_from_slice(&rates[..m - 1]);
        let c = Coefficients { decay: rates, feed };
        let mut v = vec![0.0; m];
        v[0] = 1.0;
        for _ in 0..500 {
            linear_step(&mut v, 0.01, &c, &c, &c);
        }
        let total: f64 = v.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
