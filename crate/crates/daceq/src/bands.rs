//! Design-band geometry: Nyquist-band intervals and frequency grids.
//!
//! The design region is a single interval: `[0, B]` in the first Nyquist
//! band, or a band of width `B` centered at `(NB - 1/2)pi` in higher bands.
//! Only positive frequencies are gridded.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of grid points per free coefficient.
pub const DEFAULT_GRID_DENSITY: u32 = 16;

/// Lower bound on the total number of grid points.
pub const MIN_GRID_POINTS: usize = 256;

/// A Nyquist-band index plus bandwidth, defining the design region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    nb: u32,
    bandwidth: f64,
}

impl BandSpec {
    /// `bandwidth` is the normalized bandwidth B in rad, strictly inside
    /// (0, pi).
    pub fn new(nb: u32, bandwidth: f64) -> Result<Self> {
        if nb < 1 {
            return Err(Error::InvalidConfig(format!(
                "Nyquist band index must be >= 1, got {nb}"
            )));
        }
        if !(bandwidth > 0.0 && bandwidth < PI) || !bandwidth.is_finite() {
            return Err(Error::InvalidBandwidth(bandwidth));
        }
        Ok(Self { nb, bandwidth })
    }

    pub fn nb(self) -> u32 {
        self.nb
    }

    /// Bandwidth B in rad.
    pub fn bandwidth(self) -> f64 {
        self.bandwidth
    }

    /// The design interval `[lo, hi]` in rad.
    pub fn interval(self) -> (f64, f64) {
        if self.nb == 1 {
            (0.0, self.bandwidth)
        } else {
            let center = (self.nb as f64 - 0.5) * PI;
            (center - self.bandwidth / 2.0, center + self.bandwidth / 2.0)
        }
    }
}

/// A discrete frequency grid over a design band.
#[derive(Clone, Debug)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    density: u32,
}

impl FrequencyGrid {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn density(&self) -> u32 {
        self.density
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Uniform grid over the band with `max(density * n_free, 256)` points,
/// endpoints included.
pub fn make_grid(spec: BandSpec, n_free_params: usize, density: u32) -> Result<FrequencyGrid> {
    if n_free_params < 1 {
        return Err(Error::DegenerateProblem);
    }
    if density < 8 {
        return Err(Error::InvalidConfig(format!(
            "grid density must be >= 8, got {density}"
        )));
    }
    let (lo, hi) = spec.interval();
    if hi <= lo {
        return Err(Error::EmptyGrid(format!("degenerate interval [{lo}, {hi}]")));
    }
    let count = (density as usize * n_free_params).max(MIN_GRID_POINTS);
    let step = (hi - lo) / (count - 1) as f64;
    let mut points: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    points[0] = lo;
    *points.last_mut().unwrap() = hi;
    Ok(FrequencyGrid { points, density })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let (lo, hi) = BandSpec::new(1, 0.5 * PI).unwrap().interval();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.5 * PI).abs() < 1e-15);

        let (lo, hi) = BandSpec::new(2, 0.8 * PI).unwrap().interval();
        assert!((lo - 1.1 * PI).abs() < 1e-12);
        assert!((hi - 1.9 * PI).abs() < 1e-12);

        let (lo, hi) = BandSpec::new(3, 0.5 * PI).unwrap().interval();
        assert!((lo - 2.25 * PI).abs() < 1e-12);
        assert!((hi - 2.75 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_bandwidth() {
        assert!(BandSpec::new(1, PI).is_err());
        assert!(BandSpec::new(1, 0.0).is_err());
        assert!(BandSpec::new(1, -0.1).is_err());
        assert!(BandSpec::new(0, 0.5).is_err());
        assert!(BandSpec::new(2, f64::NAN).is_err());
    }

    #[test]
    fn grid_size_rule() {
        let spec = BandSpec::new(1, 0.5 * PI).unwrap();
        let g = make_grid(spec, 8, 16).unwrap();
        assert_eq!(g.len(), 256); // max(128, 256)
        assert_eq!(g.lo(), 0.0);
        assert!((g.hi() - 0.5 * PI).abs() < 1e-15);

        let spec = BandSpec::new(2, 0.8 * PI).unwrap();
        let g = make_grid(spec, 20, 16).unwrap();
        assert_eq!(g.len(), 320);
        assert!((g.lo() - 1.1 * PI).abs() < 1e-12);
        assert!((g.hi() - 1.9 * PI).abs() < 1e-12);

        assert!(make_grid(spec, 0, 16).is_err());
        assert!(make_grid(spec, 8, 4).is_err());
    }

    #[test]
    fn grid_strictly_increasing_within_band() {
        let spec = BandSpec::new(3, 0.9 * PI).unwrap();
        let g = make_grid(spec, 11, 16).unwrap();
        let (lo, hi) = spec.interval();
        for w in g.points().windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(g.points().iter().all(|&w| w >= lo && w <= hi));
    }

    #[test]
    fn higher_bands_centered_and_avoid_pi_multiples() {
        for nb in 2..=6 {
            for b_over_pi in [0.04, 0.5, 0.96, 0.999] {
                let spec = BandSpec::new(nb, b_over_pi * PI).unwrap();
                let (lo, hi) = spec.interval();
                let center = (nb as f64 - 0.5) * PI;
                assert!((0.5 * (lo + hi) - center).abs() < 1e-14);
                // No integer multiple of pi inside the band.
                let k_lo = (lo / PI).ceil() as i64;
                let k_hi = (hi / PI).floor() as i64;
                assert!(k_lo > k_hi, "NB{nb} B={b_over_pi}pi contains k*pi");
            }
        }
    }
}
