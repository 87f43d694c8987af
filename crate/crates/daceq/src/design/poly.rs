//! Cosine-polynomial machinery shared by the design engines.
//!
//! Both engines solve for a polynomial `P(w) = sum p_k cos(kw)` of degree
//! n-1 in `x = cos(w)`. During iteration the polynomial is represented
//! without explicit coefficients (barycentric node form for the exchange
//! engine, local Chebyshev coefficients for the LP engine); the global
//! `cos(kw)` coefficients are only recovered at export time by sampling at
//! DCT-I nodes and inverting.

use crate::fir::LinearPhaseType;

/// Affine map between the band's `x = cos(w)` interval and the local
/// Chebyshev domain [-1, 1].
#[derive(Clone, Copy, Debug)]
pub struct ChebDomain {
    pub x_lo: f64,
    pub x_hi: f64,
}

impl ChebDomain {
    pub fn from_points(xs: &[f64]) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        Self { x_lo: lo, x_hi: hi }
    }

    pub fn to_local(self, x: f64) -> f64 {
        (2.0 * x - self.x_lo - self.x_hi) / (self.x_hi - self.x_lo)
    }
}

/// Chebyshev polynomials of the first kind evaluated by Clenshaw's
/// recurrence. Valid for any real argument, including |u| > 1.
pub fn clenshaw_chebyshev(coeffs: &[f64], u: f64) -> f64 {
    match coeffs.len() {
        0 => 0.0,
        1 => coeffs[0],
        _ => {
            let mut b2 = 0.0;
            let mut b1 = *coeffs.last().unwrap();
            let two_u = 2.0 * u;
            for &c in coeffs[1..coeffs.len() - 1].iter().rev() {
                let t = two_u * b1 - b2 + c;
                b2 = b1;
                b1 = t;
            }
            u * b1 - b2 + coeffs[0]
        }
    }
}

/// Barycentric Lagrange interpolant through distinct nodes.
///
/// Weights are computed through log-magnitudes so that tightly clustered
/// node sets neither overflow nor underflow; any common scale cancels in
/// the evaluation ratio.
#[derive(Clone, Debug)]
pub struct Barycentric {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

/// Normalized barycentric weights `w_i = 1/prod_{j!=i}(u_i - u_j)`, computed
/// through log-magnitudes and rescaled so that `max |w_i| = 1`.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut log_w = vec![0.0f64; n];
    let mut sign = vec![1.0f64; n];
    for i in 0..n {
        let mut acc = 0.0;
        let mut s = 1.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = nodes[i] - nodes[j];
            acc -= d.abs().ln();
            if d < 0.0 {
                s = -s;
            }
        }
        log_w[i] = acc;
        sign[i] = s;
    }
    let max_log = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..n)
        .map(|i| sign[i] * (log_w[i] - max_log).exp())
        .collect()
}

impl Barycentric {
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), values.len());
        assert_eq!(nodes.len(), weights.len());
        Self {
            nodes,
            weights,
            values,
        }
    }

    /// Second-form barycentric evaluation; exact at the nodes.
    pub fn eval(&self, u: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.nodes.len() {
            let d = u - self.nodes[i];
            if d.abs() < 1e-300 {
                return self.values[i];
            }
            let c = self.weights[i] / d;
            num += c * self.values[i];
            den += c;
        }
        num / den
    }
}

/// Recovers the coefficients of `P(w) = sum_{k=0}^{K} p_k cos(kw)` from its
/// values at the DCT-I nodes `w_m = pi m / K`, `m = 0..=K`.
pub fn cosine_coeffs_from_dct_samples(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 1 {
        return vec![values[0]];
    }
    let k_max = n - 1;
    let kf = k_max as f64;
    let mut p = vec![0.0; n];
    for (k, pk) in p.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (m, &v) in values.iter().enumerate() {
            let c_m = if m == 0 || m == k_max { 0.5 } else { 1.0 };
            acc += c_m * v * (std::f64::consts::PI * (k * m) as f64 / kf).cos();
        }
        let c_k = if k == 0 || k == k_max { 0.5 } else { 1.0 };
        *pk = 2.0 / kf * c_k * acc;
    }
    p
}

/// The fixed trigonometric factor of each filter type: the zero-phase
/// response is `H_R(w) = q(w) * P(w)` with `P` a cosine polynomial.
pub fn fixed_trig_factor(t: LinearPhaseType, w: f64) -> f64 {
    match t {
        LinearPhaseType::I => 1.0,
        LinearPhaseType::II => (w / 2.0).cos(),
        LinearPhaseType::III => w.sin(),
        LinearPhaseType::IV => (w / 2.0).sin(),
    }
}

/// Converts the cosine-polynomial coefficients `p` of `P` into the
/// type-specific expansion coefficients of `H_R = q * P`, using the
/// product-to-sum identities for the fixed factor `q`.
pub fn cosine_to_expansion(t: LinearPhaseType, p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let at = |j: usize| if j < m { p[j] } else { 0.0 };
    match t {
        LinearPhaseType::I => p.to_vec(),
        LinearPhaseType::II => (1..=m)
            .map(|k| {
                if k == 1 {
                    p[0] + at(1) / 2.0
                } else {
                    (p[k - 1] + at(k)) / 2.0
                }
            })
            .collect(),
        LinearPhaseType::III => (1..=m)
            .map(|k| {
                if k == 1 {
                    p[0] - at(2) / 2.0
                } else {
                    (p[k - 1] - at(k + 1)) / 2.0
                }
            })
            .collect(),
        LinearPhaseType::IV => (1..=m)
            .map(|k| {
                if k == 1 {
                    p[0] - at(1) / 2.0
                } else {
                    (p[k - 1] - at(k)) / 2.0
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fir::FirFilter;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn eval_cosine(p: &[f64], w: f64) -> f64 {
        p.iter()
            .enumerate()
            .map(|(k, &c)| c * (k as f64 * w).cos())
            .sum()
    }

    #[test]
    fn dct_round_trip() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [1usize, 2, 3, 5, 17, 64] {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let k = (n - 1).max(1) as f64;
            let vals: Vec<f64> = (0..n).map(|m| eval_cosine(&p, PI * m as f64 / k)).collect();
            let back = cosine_coeffs_from_dct_samples(&vals);
            for (a, b) in p.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn barycentric_reproduces_polynomial() {
        let mut rng = StdRng::seed_from_u64(23);
        // The engines interpolate from reference nodes that settle into a
        // near-Chebyshev distribution over the band's local [-1, 1] domain
        // and extrapolate a few domain widths out at export time; mirror
        // that configuration here (jittered Chebyshev nodes).
        for n in [2usize, 5, 8, 24, 61] {
            let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let poly = |u: f64| clenshaw_chebyshev(&coeffs, u);
            let nodes: Vec<f64> = (0..n)
                .map(|i| {
                    let jitter = if i == 0 || i == n - 1 {
                        0.0
                    } else {
                        0.35 * (12.9 * i as f64).sin()
                    };
                    let theta = PI * (i as f64 + jitter) / (n - 1) as f64;
                    -theta.cos()
                })
                .collect();
            let values: Vec<f64> = nodes.iter().map(|&u| poly(u)).collect();
            let weights = barycentric_weights(&nodes);
            let b = Barycentric::from_parts(nodes.clone(), weights, values);
            for u in [-0.97, -0.41, 0.083, 0.655, 0.99] {
                let want = poly(u);
                assert!(
                    (b.eval(u) - want).abs() < 1e-11 * want.abs().max(1.0),
                    "interp n={n} u={u}"
                );
            }
            // Export-time extrapolation distance shrinks as the degree
            // grows (wide bands carry the high orders), keeping the
            // amplification factor exp(n*acosh|u|) bounded; scale the test
            // points the same way.
            let reach = 1.0 + 2.5 / n as f64;
            for u in [-reach, -1.0 - 1.0 / n as f64, 1.0 + 1.7 / n as f64, reach] {
                let want = poly(u);
                assert!(
                    (b.eval(u) - want).abs() < 1e-6 * want.abs().max(1.0),
                    "extrap n={n} u={u}: {} vs {want}",
                    b.eval(u)
                );
            }
        }
    }

    #[test]
    fn clenshaw_matches_cos_k_acos() {
        let coeffs = [0.3, -1.2, 0.7, 0.05, -0.4];
        for u in [-0.99f64, -0.5, 0.0, 0.77, 1.0] {
            let direct: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k as f64 * u.acos()).cos())
                .sum();
            assert!((clenshaw_chebyshev(&coeffs, u) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_conversion_matches_product() {
        let mut rng = StdRng::seed_from_u64(37);
        for t in LinearPhaseType::ALL {
            for m in [1usize, 2, 3, 7, 19] {
                let p: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let e = cosine_to_expansion(t, &p);
                assert_eq!(e.len(), m);
                let filter = FirFilter::from_expansion(t, &e);
                for _ in 0..16 {
                    let w = rng.gen_range(0.0..6.0 * PI);
                    let want = fixed_trig_factor(t, w) * eval_cosine(&p, w);
                    let got = filter.zero_phase_response(w);
                    assert!(
                        (got - want).abs() < 1e-11 * want.abs().max(1.0),
                        "type {t} m={m} w={w}: {got} vs {want}"
                    );
                }
            }
        }
    }
}
