//! Monte-Carlo form of the iterated L-integral,
//! `J^m y(t) = t^m E[U_2 U_3^2 ... U_m^(m-1) y(t U_1 ... U_m)]` with
//! i.i.d. `U_i ~ Beta(2-alpha, alpha)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::series::FracOrder;
use crate::{Error, Result};

const CHUNK: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub std_error: f64,
}

/// Running mean and sum of squared deviations for both parts.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl Moments {
    fn push(&mut self, x: Complex64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        let d2 = x - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = self.n * other.n / n;
        Moments {
            n,
            mean: self.mean + d * (other.n / n),
            m2_re: self.m2_re + other.m2_re + d.re * d.re * w,
            m2_im: self.m2_im + other.m2_im + d.im * d.im * w,
        }
    }
}

/// Beta(p, q) as `G1 / (G1 + G2)` from two gamma variates.
struct BetaSampler {
    g1: Gamma<f64>,
    g2: Gamma<f64>,
}

impl BetaSampler {
    fn new(p: f64, q: f64) -> Result<Self> {
        let mk = |s| Gamma::new(s, 1.0).map_err(|e| Error::domain(format!("gamma sampler: {e}")));
        Ok(BetaSampler { g1: mk(p)?, g2: mk(q)? })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let x = self.g1.sample(rng);
        let y = self.g2.sample(rng);
        x / (x + y)
    }
}

/// Estimate `J^m y(t)`; chunk `i` uses stream `i` of the seeded generator,
/// so the result does not depend on thread scheduling.
pub fn mc_lj_oracle(
    y: impl Fn(f64) -> Complex64 + Sync,
    order: FracOrder,
    t: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if cfg.depth == 0 {
        return Err(Error::domain("Monte-Carlo depth must be at least one"));
    }
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::domain(format!("need at least {MIN_SAMPLES} samples")));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("Monte-Carlo oracle at t = {t}")));
    }
    let alpha = order.alpha();
    let beta = BetaSampler::new(2.0 - alpha, alpha)?;
    let m = cfg.depth;
    let n_chunks = cfg.samples.div_ceil(CHUNK);

    let parts: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK.min(cfg.samples - chunk * CHUNK);
            let mut mom = Moments::default();
            for _ in 0..len {
                let mut prod = 1.0;
                let mut weight = 1.0;
                for i in 1..=m {
                    let u = beta.sample(&mut rng);
                    prod *= u;
                    weight *= u.powi(i as i32 - 1);
                }
                mom.push(y(t * prod) * weight);
            }
            mom
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);

    let scale = t.powi(m as i32);
    let var = (total.m2_re + total.m2_im) / (total.n - 1.0);
    Ok(McEstimate {
        estimate: total.mean * scale,
        std_error: scale * (var.max(0.0) / total.n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::lj_iterated_power;
    use crate::special::gamma_fn;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn cfg(samples: usize, seed: u64, depth: usize) -> McConfig {
        McConfig { samples, seed, depth }
    }

    fn within(est: &McEstimate, exact: f64) -> bool {
        (est.estimate.re - exact).abs() <= 3.0 * est.std_error + 1e-12 * exact.abs()
            && est.estimate.im == 0.0
    }

    #[test]
    fn constant_at_depth_one() {
        let e = mc_lj_oracle(|_| Complex64::new(1.0, 0.0), order(0.4), 1.3, &cfg(5000, 1, 1)).unwrap();
        assert!(within(&e, 1.3));
    }

    #[test]
    fn linear_at_depth_one_and_two() {
        let a = 0.55;
        let t = 0.8;
        let lin = |s: f64| Complex64::new(s, 0.0);
        let e1 = mc_lj_oracle(lin, order(a), t, &cfg(200_000, 7, 1)).unwrap();
        let exact1 = t * t * gamma_fn(3.0 - a).unwrap() / (gamma_fn(2.0 - a).unwrap() * 2.0);
        assert!(within(&e1, exact1));
        let e2 = mc_lj_oracle(lin, order(a), t, &cfg(200_000, 7, 2)).unwrap();
        let (coef, p) = lj_iterated_power(order(a), 2, 1.0).unwrap();
        assert!(within(&e2, coef * t.powf(p)));
    }

    #[test]
    fn deterministic_and_scaling() {
        let y = |s: f64| Complex64::new(s.sin(), s * s);
        let a = mc_lj_oracle(y, order(0.7), 1.0, &cfg(100_000, 42, 2)).unwrap();
        let b = mc_lj_oracle(y, order(0.7), 1.0, &cfg(100_000, 42, 2)).unwrap();
        assert_eq!(a, b);
        let d = mc_lj_oracle(y, order(0.7), 1.0, &cfg(200_000, 42, 2)).unwrap();
        let ratio = d.std_error / a.std_error;
        assert!((ratio * 2f64.sqrt() - 1.0).abs() < 0.2);
    }

    #[test]
    fn rejects_bad_config() {
        let y = |_| Complex64::new(1.0, 0.0);
        assert!(mc_lj_oracle(y, order(0.5), 1.0, &cfg(10, 1, 1)).is_err());
        assert!(mc_lj_oracle(y, order(0.5), 1.0, &cfg(5000, 1, 0)).is_err());
    }
}
