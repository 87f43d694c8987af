//! Linear-phase FIR filter types, zero-phase expansions and delays.
//!
//! A causal order-N FIR filter with real, (anti)symmetric impulse response
//! factors as
//!
//! ```text
//! H(e^{jw}) = e^{-jwN/2} * H_R(w)        Types I, II
//! H(e^{jw}) = j e^{-jwN/2} * H_R(w)      Types III, IV
//! ```
//!
//! where the real zero-phase response `H_R` expands in a cosine or sine
//! basis. The expansion-coefficient vector is the canonical representation
//! used by the design engine; `h(n)` is derived from it on export.

use crate::error::{Error, Result};
use crate::pulses::PulseKind;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Maximum asymmetry tolerated when validating imported impulse responses.
const SYMMETRY_TOL: f64 = 1e-12;

/// The four linear-phase FIR filter types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinearPhaseType {
    I,
    II,
    III,
    IV,
}

impl LinearPhaseType {
    pub const ALL: [LinearPhaseType; 4] = [
        LinearPhaseType::I,
        LinearPhaseType::II,
        LinearPhaseType::III,
        LinearPhaseType::IV,
    ];

    /// Types I and III take even orders, II and IV odd orders.
    pub fn order_is_even(self) -> bool {
        matches!(self, LinearPhaseType::I | LinearPhaseType::III)
    }

    /// Types I and II have symmetric impulse responses, III and IV
    /// antisymmetric ones.
    pub fn symmetric(self) -> bool {
        matches!(self, LinearPhaseType::I | LinearPhaseType::II)
    }

    pub fn order_parity_ok(self, order: u32) -> bool {
        order.is_multiple_of(2) == self.order_is_even()
    }

    /// Frequencies at which the type forces a zero regardless of the
    /// coefficients.
    pub fn structural_zeros(self) -> &'static [f64] {
        match self {
            LinearPhaseType::I => &[],
            LinearPhaseType::II => &[PI],
            LinearPhaseType::III => &[0.0, PI],
            LinearPhaseType::IV => &[0.0],
        }
    }

    /// Smallest order of correct parity with at least one free parameter.
    pub fn smallest_order(self) -> u32 {
        match self {
            LinearPhaseType::I => 0,
            LinearPhaseType::II => 1,
            LinearPhaseType::III => 2,
            LinearPhaseType::IV => 1,
        }
    }
}

/// Number of distinct multipliers (= free expansion coefficients) of an
/// order-N filter of the given type.
pub fn multiplier_count(t: LinearPhaseType, order: u32) -> Result<usize> {
    if !t.order_parity_ok(order) {
        return Err(Error::ParityMismatch {
            filter_type: t,
            order,
        });
    }
    let n = order as usize;
    Ok(match t {
        LinearPhaseType::I => n / 2 + 1,
        LinearPhaseType::II => n.div_ceil(2),
        LinearPhaseType::III => n / 2,
        LinearPhaseType::IV => n.div_ceil(2),
    })
}

/// Delay of the equalized system, in samples. Non-integer offsets are
/// quarter- or half-sample depending on the pulse/type pairing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delay(pub f64);

impl Delay {
    pub fn samples(self) -> f64 {
        self.0
    }
}

/// True when the pulse's j factor matches the filter type's: Types I/II
/// pair with NRTZ/RTZ, Types III/IV with RTC/RTCZ.
pub fn compatible(kind: PulseKind, t: LinearPhaseType) -> bool {
    kind.has_j_factor() != t.symmetric()
}

/// Equalized-system delay `K` for a compatible pulse/type pairing.
pub fn delay_k(t: LinearPhaseType, order: u32, kind: PulseKind) -> Result<Delay> {
    if !compatible(kind, t) {
        return Err(Error::IncompatibleType {
            pulse: kind,
            filter_type: t,
        });
    }
    if !t.order_parity_ok(order) {
        return Err(Error::ParityMismatch {
            filter_type: t,
            order,
        });
    }
    let int = if order.is_multiple_of(2) {
        (order / 2) as f64
    } else {
        order.div_ceil(2) as f64
    };
    let offset = match (kind, t) {
        (PulseKind::Nrtz, LinearPhaseType::I) => 0.5,
        (PulseKind::Nrtz, LinearPhaseType::II) => 0.0,
        (PulseKind::Rtz, LinearPhaseType::I) => 0.25,
        (PulseKind::Rtz, LinearPhaseType::II) => -0.25,
        (PulseKind::Rtc, LinearPhaseType::III) => 0.5,
        (PulseKind::Rtc, LinearPhaseType::IV) => 0.0,
        (PulseKind::Rtcz, LinearPhaseType::III) => 0.25,
        (PulseKind::Rtcz, LinearPhaseType::IV) => -0.25,
        _ => unreachable!("compatibility checked above"),
    };
    Ok(Delay(int + offset))
}

/// A linear-phase FIR filter: type plus impulse response `h(0..=N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirFilter {
    filter_type: LinearPhaseType,
    coefficients: Vec<f64>,
}

impl FirFilter {
    /// Builds a filter from an impulse response, validating length, parity
    /// and (anti)symmetry.
    pub fn new(filter_type: LinearPhaseType, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::BadCoefficients("empty impulse response".into()));
        }
        let order = (coefficients.len() - 1) as u32;
        if !filter_type.order_parity_ok(order) {
            return Err(Error::ParityMismatch { filter_type, order });
        }
        let n = coefficients.len() - 1;
        let sign = if filter_type.symmetric() { 1.0 } else { -1.0 };
        for i in 0..=n / 2 {
            let lhs = coefficients[i];
            let rhs = sign * coefficients[n - i];
            if (lhs - rhs).abs() > SYMMETRY_TOL {
                return Err(Error::BadCoefficients(format!(
                    "h({i}) = {lhs} does not mirror h({}) within {SYMMETRY_TOL}",
                    n - i
                )));
            }
        }
        if !filter_type.symmetric() && n.is_multiple_of(2) {
            let mid = coefficients[n / 2];
            if mid.abs() > SYMMETRY_TOL {
                return Err(Error::BadCoefficients(format!(
                    "antisymmetric center tap h({}) = {mid} must be zero",
                    n / 2
                )));
            }
        }
        Ok(Self {
            filter_type,
            coefficients,
        })
    }

    /// Builds the impulse response from the zero-phase expansion
    /// coefficients (a/b/c/d depending on type). Exact by construction.
    pub fn from_expansion(filter_type: LinearPhaseType, expansion: &[f64]) -> Self {
        let m = expansion.len();
        assert!(m >= 1, "expansion must have at least one coefficient");
        let (order, mut h);
        match filter_type {
            LinearPhaseType::I => {
                // H_R = e0 + sum e_k cos(kw); N = 2(m-1)
                order = 2 * (m - 1);
                h = vec![0.0; order + 1];
                let mid = m - 1;
                h[mid] = expansion[0];
                for k in 1..m {
                    h[mid - k] = expansion[k] / 2.0;
                    h[mid + k] = expansion[k] / 2.0;
                }
            }
            LinearPhaseType::II => {
                // H_R = sum_{k=1..m} e_{k-1} cos((k-1/2)w); N = 2m-1
                order = 2 * m - 1;
                h = vec![0.0; order + 1];
                for k in 1..=m {
                    let v = expansion[k - 1] / 2.0;
                    h[m - k] = v;
                    h[m + k - 1] = v;
                }
            }
            LinearPhaseType::III => {
                // H_R = sum_{k=1..m} e_{k-1} sin(kw); N = 2m
                order = 2 * m;
                h = vec![0.0; order + 1];
                let mid = m;
                for k in 1..=m {
                    let v = expansion[k - 1] / 2.0;
                    h[mid - k] = v;
                    h[mid + k] = -v;
                }
            }
            LinearPhaseType::IV => {
                // H_R = sum_{k=1..m} e_{k-1} sin((k-1/2)w); N = 2m-1
                order = 2 * m - 1;
                h = vec![0.0; order + 1];
                for k in 1..=m {
                    let v = expansion[k - 1] / 2.0;
                    h[m - k] = v;
                    h[m + k - 1] = -v;
                }
            }
        }
        Self {
            filter_type,
            coefficients: h,
        }
    }

    pub fn filter_type(&self) -> LinearPhaseType {
        self.filter_type
    }

    pub fn order(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Zero-phase expansion coefficients derived from the impulse response.
    pub fn expansion(&self) -> Vec<f64> {
        let h = &self.coefficients;
        let n = h.len() - 1;
        match self.filter_type {
            LinearPhaseType::I => {
                let mid = n / 2;
                let mut e = vec![0.0; mid + 1];
                e[0] = h[mid];
                for k in 1..=mid {
                    e[k] = 2.0 * h[mid - k];
                }
                e
            }
            LinearPhaseType::II => {
                let m = n.div_ceil(2);
                (1..=m).map(|k| 2.0 * h[m - k]).collect()
            }
            LinearPhaseType::III => {
                let m = n / 2;
                (1..=m).map(|k| 2.0 * h[m - k]).collect()
            }
            LinearPhaseType::IV => {
                let m = n.div_ceil(2);
                (1..=m).map(|k| 2.0 * h[m - k]).collect()
            }
        }
    }

    /// Real zero-phase response `H_R(w)`, evaluated directly from the
    /// trigonometric expansion at the unfolded frequency.
    pub fn zero_phase_response(&self, wt: f64) -> f64 {
        let e = self.expansion();
        match self.filter_type {
            LinearPhaseType::I => {
                let mut acc = e[0];
                for (k, &c) in e.iter().enumerate().skip(1) {
                    acc += c * (k as f64 * wt).cos();
                }
                acc
            }
            LinearPhaseType::II => e
                .iter()
                .enumerate()
                .map(|(i, &c)| c * ((i as f64 + 0.5) * wt).cos())
                .sum(),
            LinearPhaseType::III => e
                .iter()
                .enumerate()
                .map(|(i, &c)| c * ((i as f64 + 1.0) * wt).sin())
                .sum(),
            LinearPhaseType::IV => e
                .iter()
                .enumerate()
                .map(|(i, &c)| c * ((i as f64 + 0.5) * wt).sin())
                .sum(),
        }
    }

    /// Direct evaluation of `H(e^{jw}) = sum h(n) e^{-jwn}`.
    pub fn frequency_response(&self, wt: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &hn) in self.coefficients.iter().enumerate() {
            acc += hn * Complex64::from_polar(1.0, -wt * n as f64);
        }
        acc
    }

    /// The linear-phase factor of the type: `e^{-jwN/2}`, times j for
    /// Types III/IV.
    pub fn phase_factor(&self, wt: f64) -> Complex64 {
        let base = Complex64::from_polar(1.0, -wt * self.order() as f64 / 2.0);
        if self.filter_type.symmetric() {
            base
        } else {
            Complex64::new(0.0, 1.0) * base
        }
    }
}

impl fmt::Display for LinearPhaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LinearPhaseType::I => "I",
            LinearPhaseType::II => "II",
            LinearPhaseType::III => "III",
            LinearPhaseType::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for LinearPhaseType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(LinearPhaseType::I),
            "II" | "2" => Ok(LinearPhaseType::II),
            "III" | "3" => Ok(LinearPhaseType::III),
            "IV" | "4" => Ok(LinearPhaseType::IV),
            other => Err(format!(
                "unknown filter type '{other}' (expected I, II, III or IV)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_filter(rng: &mut StdRng, t: LinearPhaseType, m: usize) -> FirFilter {
        let e: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        FirFilter::from_expansion(t, &e)
    }

    #[test]
    fn structural_zero_table() {
        assert_eq!(LinearPhaseType::I.structural_zeros(), &[] as &[f64]);
        assert_eq!(LinearPhaseType::II.structural_zeros(), &[PI]);
        assert_eq!(LinearPhaseType::III.structural_zeros(), &[0.0, PI]);
        assert_eq!(LinearPhaseType::IV.structural_zeros(), &[0.0]);
    }

    #[test]
    fn multiplier_count_table() {
        assert_eq!(multiplier_count(LinearPhaseType::I, 12).unwrap(), 7);
        assert_eq!(multiplier_count(LinearPhaseType::III, 38).unwrap(), 19);
        assert_eq!(multiplier_count(LinearPhaseType::II, 37).unwrap(), 19);
        assert_eq!(multiplier_count(LinearPhaseType::IV, 37).unwrap(), 19);
        assert!(multiplier_count(LinearPhaseType::I, 7).is_err());
    }

    #[test]
    fn delay_table() {
        assert_eq!(
            delay_k(LinearPhaseType::I, 12, PulseKind::Rtz).unwrap(),
            Delay(6.25)
        );
        assert_eq!(
            delay_k(LinearPhaseType::II, 37, PulseKind::Nrtz).unwrap(),
            Delay(19.0)
        );
        assert_eq!(
            delay_k(LinearPhaseType::III, 38, PulseKind::Rtcz).unwrap(),
            Delay(19.25)
        );
        assert!(delay_k(LinearPhaseType::II, 37, PulseKind::Rtc).is_err());
    }

    #[test]
    fn compatibility_table() {
        assert!(compatible(PulseKind::Nrtz, LinearPhaseType::I));
        assert!(!compatible(PulseKind::Rtc, LinearPhaseType::II));
        assert!(compatible(PulseKind::Rtcz, LinearPhaseType::IV));
        assert!(compatible(PulseKind::Rtc, LinearPhaseType::III));
        assert!(!compatible(PulseKind::Nrtz, LinearPhaseType::III));
    }

    #[test]
    fn zero_phase_simple_cases() {
        let f = FirFilter::new(LinearPhaseType::I, vec![0.25, 0.5, 0.25]).unwrap();
        assert!((f.zero_phase_response(0.0) - 1.0).abs() < 1e-15);

        // Identity filter.
        let f = FirFilter::new(LinearPhaseType::I, vec![1.0]).unwrap();
        for w in [0.0, 0.3, 2.5] {
            let r = f.frequency_response(w);
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }

        // Type IV, N=1, h=[0.5,-0.5] at w=pi: 0.5 - 0.5 e^{-j pi} = 1.
        let f = FirFilter::new(LinearPhaseType::IV, vec![0.5, -0.5]).unwrap();
        let r = f.frequency_response(PI);
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn frequency_response_matches_factorization() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for t in LinearPhaseType::ALL {
            for _ in 0..1000 {
                let m = rng.gen_range(1..=12);
                let f = random_filter(&mut rng, t, m);
                for _ in 0..8 {
                    let w = rng.gen_range(0.0..6.0 * PI);
                    let direct = f.frequency_response(w);
                    let factored = f.phase_factor(w) * f.zero_phase_response(w);
                    let scale = direct.norm().max(1.0);
                    assert!(
                        (direct - factored).norm() <= 1e-10 * scale,
                        "type {t} N={} w={w}: {direct} vs {factored}",
                        f.order()
                    );
                    assert!(
                        (direct.norm() - f.zero_phase_response(w).abs()).abs() <= 1e-10 * scale
                    );
                }
            }
        }
    }

    #[test]
    fn structural_zeros_hold_for_random_filters() {
        let mut rng = StdRng::seed_from_u64(42);
        for t in LinearPhaseType::ALL {
            for _ in 0..50 {
                let m = rng.gen_range(1..=20);
                let f = random_filter(&mut rng, t, m);
                for &w in t.structural_zeros() {
                    assert!(
                        f.zero_phase_response(w).abs() < 1e-12,
                        "type {t} at w={w}"
                    );
                    assert!(f.frequency_response(w).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn expansion_round_trip() {
        let mut rng = StdRng::seed_from_u64(7);
        for t in LinearPhaseType::ALL {
            for m in [1usize, 2, 3, 9, 24] {
                let e: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let f = FirFilter::from_expansion(t, &e);
                assert!(t.order_parity_ok(f.order()));
                assert_eq!(multiplier_count(t, f.order()).unwrap(), m);
                let back = f.expansion();
                for (a, b) in e.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-15);
                }
                // Validation accepts what construction produces.
                FirFilter::new(t, f.coefficients().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn validation_rejects_asymmetry() {
        assert!(FirFilter::new(LinearPhaseType::I, vec![0.25, 0.5, 0.2501]).is_err());
        assert!(FirFilter::new(LinearPhaseType::III, vec![0.5, 0.1, -0.5]).is_err());
        assert!(FirFilter::new(LinearPhaseType::II, vec![0.5, 0.5, 0.5]).is_err());
    }
}
