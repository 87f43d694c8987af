//! Closed-form filter-order estimates.
//!
//! The basic two-term form
//!
//! ```text
//! N_est(B, d) = c + a log10(d)/(pi - B) + b [log10(d)]^2/(pi - B)^2
//! ```
//!
//! generalizes to the refined form with free scales and powers,
//!
//! ```text
//! N_est(B, d) = c + a1 [log10(a2 d)]^{a3} / (pi - B)^{a4}
//!                 + b1 [log10(b2 d)]^{b3} / (pi - B)^{b4}
//! ```
//!
//! with built-in parameter sets for all 22 pulse/band/type combinations.
//!
//! Since `log10(a2 d)` is negative over most of the domain and the powers
//! are non-integer, bracketed powers are evaluated sign-preserving:
//! `x^p := sign(x) |x|^p`. This is the unique continuous real extension
//! that reduces to the basic form at integer powers.

use crate::error::{Error, Result};
use crate::fir::LinearPhaseType;
use crate::pulses::PulseKind;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sign-preserving real power: `sign(x) * |x|^p`, with `0^p = 0`.
pub fn signed_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        if p == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        x.signum() * x.abs().powf(p)
    }
}

/// Where a parameter set came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    Builtin {
        pulse: PulseKind,
        nb: u32,
        filter_type: LinearPhaseType,
    },
    Fitted(FitProvenance),
}

/// Metadata attached to fitted parameter sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitProvenance {
    pub pulse: PulseKind,
    pub nb: u32,
    pub filter_type: LinearPhaseType,
    pub b_over_pi_range: (f64, f64),
    pub n_b: usize,
    pub delta_range: (f64, f64),
    pub n_delta: usize,
    pub seed: u64,
    pub timestamp: u64,
}

/// Parameters of the refined order estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub c: f64,
    pub provenance: Provenance,
}

impl EstimateParams {
    /// Evaluates the refined estimate at bandwidth `b` (rad) and accuracy
    /// `delta`.
    pub fn evaluate(&self, b: f64, delta: f64) -> Result<f64> {
        check_domain(b, delta)?;
        let gap = PI - b;
        let term_a = self.a1 * signed_pow((self.a2 * delta).log10(), self.a3) / gap.powf(self.a4);
        let term_b = self.b1 * signed_pow((self.b2 * delta).log10(), self.b3) / gap.powf(self.b4);
        Ok(self.c + term_a + term_b)
    }
}

/// Direct evaluation of the basic two-term estimate.
pub fn basic_estimate(a: f64, b: f64, c: f64, bandwidth: f64, delta: f64) -> Result<f64> {
    check_domain(bandwidth, delta)?;
    let gap = PI - bandwidth;
    let l = delta.log10();
    Ok(c + a * l / gap + b * l * l / (gap * gap))
}

fn check_domain(b: f64, delta: f64) -> Result<()> {
    if !(b > 0.0 && b < PI) || !b.is_finite() {
        return Err(Error::InvalidBandwidth(b));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    Ok(())
}

/// One published table row: pulse, NB, type, a1..a4, b1..b4, c, eps_max.
type Row = (PulseKind, u32, LinearPhaseType, [f64; 9], f64);

// Published constants verbatim; a few coincide with math constants to
// four digits, which is accidental.
#[allow(clippy::approx_constant)]
#[rustfmt::skip]
const BUILTIN_TABLE: [Row; 22] = {
    use LinearPhaseType::{I, II, III, IV};
    use PulseKind::{Nrtz, Rtc, Rtcz, Rtz};
    [
        (Nrtz, 1, I,   [-1.8860, 1.6994, 1.3380, 1.2150, 1.1523, 3.1189,  0.8861, 1.5646,  1.6565], 2.07),
        (Nrtz, 1, II,  [-2.5636, 0.0419, 1.1841, 1.0280, 1.3290, 5.3295, -0.0435, 1.5107, -2.1359], 2.15),
        (Rtc,  2, III, [-6.5450, 0.2535, 1.1020, 1.0592, 0.7124, 0.0144,  0.5291, 1.6930, -3.3270], 4.26),
        (Rtc,  2, IV,  [-6.1858, 0.1881, 1.1211, 1.0690, 0.6163, 0.0004,  0.6623, 1.6317, -3.7629], 3.42),
        (Rtc,  3, III, [-7.3009, 0.3264, 1.0470, 1.0729, 0.6768, 0.0041,  0.5926, 1.6951, -2.2454], 4.08),
        (Rtc,  3, IV,  [-7.1187, 0.4480, 1.0525, 1.0798, 0.4598, 0.0088,  0.6708, 1.7778, -3.7050], 3.48),
        (Rtz,  1, I,   [-0.6989, 0.6444, 1.7687, 0.9841, 0.7326, 8.3996,  0.5998, 1.5167, -0.8796], 1.86),
        (Rtz,  1, II,  [-3.9194, 0.3509, 1.0213, 1.0540, 0.8643, 2.1014,  0.2251, 1.6100, -1.7900], 2.10),
        (Rtz,  2, I,   [-1.1636, 0.8492, 1.8549, 0.9878, 0.7606, 7.2968,  0.6346, 1.6906, -0.8305], 3.06),
        (Rtz,  2, II,  [-6.9405, 0.3777, 1.0652, 1.0618, 0.9325, 1.0444,  0.2408, 1.7705, -3.8064], 3.39),
        (Rtz,  3, I,   [-1.7681, 0.6155, 1.6327, 1.0472, 1.1094, 4.3515,  0.6212, 1.6716, -0.4518], 3.32),
        (Rtz,  3, II,  [-6.9420, 0.2634, 1.0710, 1.0583, 0.6337, 0.0005,  0.5543, 1.6732, -3.5774], 3.44),
        (Rtcz, 2, III, [-6.3698, 0.2626, 1.1139, 1.0794, 0.8666, 0.1547,  0.5521, 1.7007, -2.5299], 4.13),
        (Rtcz, 2, IV,  [-7.1531, 0.3382, 1.0594, 1.0830, 1.1192, 0.1113,  0.5253, 1.6354, -3.7004], 3.32),
        (Rtcz, 3, III, [-7.2104, 0.2296, 1.0769, 1.0881, 1.0376, 0.0064,  0.7990, 1.5220, -3.1565], 4.08),
        (Rtcz, 3, IV,  [-7.0696, 0.3242, 1.0603, 1.0572, 0.8060, 0.0103,  0.4343, 1.6757, -3.7246], 3.33),
        (Rtcz, 4, III, [-6.8575, 0.3248, 1.0796, 1.0511, 0.8774, 0.2604,  0.3911, 1.6827, -3.2172], 4.21),
        (Rtcz, 4, IV,  [-5.9339, 0.1883, 1.1421, 1.0649, 0.2773, 4.35e-6, 0.9005, 1.6442, -3.7037], 3.29),
        (Rtcz, 5, III, [-8.2560, 0.4653, 0.9947, 1.0665, 1.7552, 1.9704,  0.2600, 1.5930, -2.8293], 4.14),
        (Rtcz, 5, IV,  [-4.0270, 0.0326, 1.2657, 1.0245, 2.4171, 0.8344, -0.2982, 1.5100, -4.5747], 3.34),
        (Rtcz, 6, III, [-5.6443, 0.1462, 1.1504, 1.0669, 0.8911, 0.0042,  0.3929, 1.6808, -2.5730], 4.13),
        (Rtcz, 6, IV,  [-3.8103, 0.0329, 1.3015, 1.0127, 1.7109, 0.4613, -0.4411, 1.6626, -4.2685], 3.41),
    ]
};

fn row_params(row: &Row) -> (EstimateParams, f64) {
    let (pulse, nb, filter_type, v, eps_max) = *row;
    (
        EstimateParams {
            a1: v[0],
            a2: v[1],
            a3: v[2],
            a4: v[3],
            b1: v[4],
            b2: v[5],
            b3: v[6],
            b4: v[7],
            c: v[8],
            provenance: Provenance::Builtin {
                pulse,
                nb,
                filter_type,
            },
        },
        eps_max,
    )
}

/// Published parameters and maximal estimation error for one of the 22
/// pulse/band/type combinations.
pub fn builtin_params(
    kind: PulseKind,
    nb: u32,
    t: LinearPhaseType,
) -> Result<(EstimateParams, f64)> {
    BUILTIN_TABLE
        .iter()
        .find(|(p, b, ft, _, _)| *p == kind && *b == nb && *ft == t)
        .map(row_params)
        .ok_or(Error::UnknownTableRow {
            pulse: kind,
            nb,
            filter_type: t,
        })
}

/// All 22 built-in rows as `(pulse, nb, type, params, eps_max)`.
pub fn builtin_rows() -> impl Iterator<Item = (PulseKind, u32, LinearPhaseType, EstimateParams, f64)>
{
    BUILTIN_TABLE.iter().map(|row| {
        let (params, eps) = row_params(row);
        (row.0, row.1, row.2, params, eps)
    })
}

/// Rounds a real-valued estimate to a usable order: nearest integer, bumped
/// up one when the parity mismatches the type, never below the smallest
/// valid order.
pub fn usable_order(t: LinearPhaseType, n_est: f64) -> u32 {
    let rounded = n_est.round().max(0.0) as u32;
    let with_parity = if t.order_parity_ok(rounded) {
        rounded
    } else {
        rounded + 1
    };
    with_parity.max(t.smallest_order())
}

/// Built-in estimate evaluated and converted to a usable filter order.
pub fn estimate_order(
    kind: PulseKind,
    nb: u32,
    t: LinearPhaseType,
    bandwidth: f64,
    delta: f64,
) -> Result<u32> {
    let (params, _) = builtin_params(kind, nb, t)?;
    let n_est = params.evaluate(bandwidth, delta)?;
    Ok(usable_order(t, n_est))
}
