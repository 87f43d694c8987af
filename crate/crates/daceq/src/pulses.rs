//! The four DAC reconstruction pulses and their frequency responses.
//!
//! Each pulse is characterized by the normalized response `P(jw)/T`, which
//! factors into a real amplitude `A(wT)`, an optional imaginary unit, and a
//! fractional-delay exponential:
//!
//! ```text
//! P(jw)/T = j^[has_j] * A(wT) * exp(-j * wT * delay_fraction)
//! ```
//!
//! The amplitude keeps its sign; on every valid design band it is strictly
//! positive, which the design engine asserts at run time instead of folding
//! signs silently.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Switch to a series/limit branch near removable singularities.
const SMALL_ARG: f64 = 1e-8;

/// DAC reconstruction pulse shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    /// Non-return-to-zero (zero-order hold): flat over the full period.
    Nrtz,
    /// Return-to-zero: active for the first half period, then zero.
    Rtz,
    /// Return-to-complement (mixed mode / RF): second half inverts the first.
    Rtc,
    /// Return-to-complement-to-zero (RFZ): quarter-period active/inverted.
    Rtcz,
}

/// Static description of a pulse: scale, delay and band validity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseTraits {
    pub amplitude_scale: f64,
    pub delay_fraction: f64,
    pub has_j_factor: bool,
    pub valid_bands: &'static [u32],
}

impl PulseKind {
    pub const ALL: [PulseKind; 4] = [
        PulseKind::Nrtz,
        PulseKind::Rtz,
        PulseKind::Rtc,
        PulseKind::Rtcz,
    ];

    pub fn traits(self) -> PulseTraits {
        match self {
            PulseKind::Nrtz => PulseTraits {
                amplitude_scale: 1.0,
                delay_fraction: 0.5,
                has_j_factor: false,
                valid_bands: &[1],
            },
            PulseKind::Rtz => PulseTraits {
                amplitude_scale: 0.5,
                delay_fraction: 0.25,
                has_j_factor: false,
                valid_bands: &[1, 2, 3],
            },
            PulseKind::Rtc => PulseTraits {
                amplitude_scale: 1.0,
                delay_fraction: 0.5,
                has_j_factor: true,
                valid_bands: &[2, 3],
            },
            PulseKind::Rtcz => PulseTraits {
                amplitude_scale: 0.5,
                delay_fraction: 0.25,
                has_j_factor: true,
                valid_bands: &[2, 3, 4, 5, 6],
            },
        }
    }

    pub fn delay_fraction(self) -> f64 {
        self.traits().delay_fraction
    }

    pub fn has_j_factor(self) -> bool {
        self.traits().has_j_factor
    }

    /// Nyquist bands over which the pulse response stays usable for
    /// equalization.
    pub fn valid_bands(self) -> &'static [u32] {
        self.traits().valid_bands
    }

    pub fn is_valid_band(self, nb: u32) -> bool {
        self.valid_bands().contains(&nb)
    }

    /// Real amplitude `A(wT)` of the normalized pulse response, with the
    /// delay exponential, the j factor and the overall factor T removed.
    ///
    /// Removable singularities are evaluated by their limits.
    pub fn amplitude(self, wt: f64) -> f64 {
        match self {
            PulseKind::Nrtz => sinc(wt / 2.0),
            PulseKind::Rtz => 0.5 * sinc(wt / 4.0),
            PulseKind::Rtc => versine_over(wt / 2.0),
            PulseKind::Rtcz => 0.5 * versine_over(wt / 4.0),
        }
    }

    /// Full normalized response `P(jw)/T` including the delay term and the
    /// j factor.
    pub fn frequency_response(self, wt: f64) -> Complex64 {
        let t = self.traits();
        let front = if t.has_j_factor {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        front * self.amplitude(wt) * Complex64::from_polar(1.0, -wt * t.delay_fraction)
    }

    /// Piecewise-constant time-domain waveform over one sample period,
    /// `t_over_period` in [0, 1).
    pub fn waveform(self, t_over_period: f64) -> f64 {
        let t = t_over_period;
        match self {
            PulseKind::Nrtz => 1.0,
            PulseKind::Rtz => {
                if t < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            PulseKind::Rtc => {
                if t < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            PulseKind::Rtcz => {
                if t < 0.25 {
                    1.0
                } else if t < 0.5 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// sin(x)/x with the limit value at x = 0.
fn sinc(x: f64) -> f64 {
    if x.abs() < SMALL_ARG {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// (1 - cos(x))/x with the limit value at x = 0.
fn versine_over(x: f64) -> f64 {
    if x.abs() < SMALL_ARG {
        0.5 * x
    } else {
        (1.0 - x.cos()) / x
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PulseKind::Nrtz => "NRTZ",
            PulseKind::Rtz => "RTZ",
            PulseKind::Rtc => "RTC",
            PulseKind::Rtcz => "RTCZ",
        };
        f.write_str(name)
    }
}

impl FromStr for PulseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nrtz" | "zoh" => Ok(PulseKind::Nrtz),
            "rtz" => Ok(PulseKind::Rtz),
            "rtc" | "rf" => Ok(PulseKind::Rtc),
            "rtcz" | "rfz" => Ok(PulseKind::Rtcz),
            other => Err(format!(
                "unknown pulse '{other}' (expected nrtz, rtz, rtc or rtcz)"
            )),
        }
    }
}
