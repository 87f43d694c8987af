//! Minimax equalizer design.
//!
//! Given a pulse, a Nyquist band, a linear-phase filter type and an order,
//! the engines find coefficients minimizing the peak modulus of the complex
//! error
//!
//! ```text
//! E(jw) = H(e^{jw}) P(jw)/T - e^{-jwK}
//! ```
//!
//! over the design band. Factoring the delay term, the j factors and the
//! type's fixed trigonometric term reduces every case to one real weighted
//! Chebyshev problem in a cosine basis: minimize `max W'|D' - P|` with
//! `D = 1/A` and `W = A`. Two engines solve the discretized problem: a
//! multiple-exchange Remez iteration and an LP on the same grid; the LP is
//! the reference oracle and the fallback when the exchange stalls.

mod lp;
mod poly;
mod remez;

pub use lp::{design_lp, linear_minimax_fit};
pub use remez::design_remez;

use crate::bands::{make_grid, BandSpec, FrequencyGrid, DEFAULT_GRID_DENSITY};
use crate::error::{Error, Result};
use crate::fir::{compatible, delay_k, multiplier_count, Delay, FirFilter, LinearPhaseType};
use crate::pulses::PulseKind;
use num_complex::Complex64;
use poly::{cosine_coeffs_from_dct_samples, cosine_to_expansion, fixed_trig_factor, ChebDomain};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Engine tuning knobs with the defaults used throughout.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Grid points per free coefficient (floor of 256 points total).
    pub grid_density: u32,
    /// Remez convergence: stop when (max ripple - min ripple)/max < tol.
    pub tol: f64,
    /// Remez iteration cap.
    pub max_iter: usize,
    /// Order-search cap.
    pub order_cap: u32,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            grid_density: DEFAULT_GRID_DENSITY,
            tol: 1e-6,
            max_iter: 250,
            order_cap: 400,
        }
    }
}

/// Which engine produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Remez,
    Lp,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::Remez => f.write_str("remez"),
            Engine::Lp => f.write_str("lp"),
        }
    }
}

/// A validated equalizer design configuration.
#[derive(Clone, Copy, Debug)]
pub struct DesignProblem {
    kind: PulseKind,
    band: BandSpec,
    filter_type: LinearPhaseType,
    order: u32,
}

impl DesignProblem {
    pub fn new(
        kind: PulseKind,
        band: BandSpec,
        filter_type: LinearPhaseType,
        order: u32,
    ) -> Result<Self> {
        if !compatible(kind, filter_type) {
            return Err(Error::IncompatibleType {
                pulse: kind,
                filter_type,
            });
        }
        if !kind.is_valid_band(band.nb()) {
            return Err(Error::InvalidBand {
                pulse: kind,
                nb: band.nb(),
            });
        }
        if !filter_type.order_parity_ok(order) {
            return Err(Error::ParityMismatch { filter_type, order });
        }
        Ok(Self {
            kind,
            band,
            filter_type,
            order,
        })
    }

    pub fn kind(&self) -> PulseKind {
        self.kind
    }

    pub fn band(&self) -> BandSpec {
        self.band
    }

    pub fn filter_type(&self) -> LinearPhaseType {
        self.filter_type
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of free expansion coefficients.
    pub fn n_free(&self) -> usize {
        multiplier_count(self.filter_type, self.order).expect("parity validated at construction")
    }

    /// Equalized-system delay K.
    pub fn delay(&self) -> Delay {
        delay_k(self.filter_type, self.order, self.kind).expect("validated at construction")
    }

    /// Design grid for this problem under the given density.
    pub fn grid(&self, density: u32) -> Result<FrequencyGrid> {
        if self.n_free() == 0 {
            return Err(Error::DegenerateProblem);
        }
        make_grid(self.band, self.n_free(), density)
    }
}

/// The real weighted-Chebyshev restatement of a design problem.
///
/// With K from the delay table, the error factors as
/// `E = (A * G - 1) e^{-jwK}` where `G = sign * H_R` and `sign` is -1 for
/// the RTC/RTCZ cases (the two j factors multiply to -1) and +1 otherwise.
/// The engines approximate `D = 1/A` with `G = Q * P` under weight `W = A`,
/// where `Q = sign * q` carries the type's fixed trigonometric term `q`.
#[derive(Clone, Copy, Debug)]
pub struct ReducedProblem {
    problem: DesignProblem,
    sign: f64,
}

impl ReducedProblem {
    /// Desired function `D(w) = 1/A(w)`.
    pub fn desired(&self, wt: f64) -> f64 {
        1.0 / self.problem.kind.amplitude(wt)
    }

    /// Weight `W(w) = A(w)`.
    pub fn weight(&self, wt: f64) -> f64 {
        self.problem.kind.amplitude(wt)
    }

    /// The fixed factor `Q(w)` multiplying the cosine-basis polynomial;
    /// its absolute value joins the weight and its sign joins the desired
    /// function.
    pub fn fixed_factor(&self, wt: f64) -> f64 {
        self.sign * fixed_trig_factor(self.problem.filter_type, wt)
    }

    /// k-th basis function of the reduced approximation, `Q(w) cos(kw)`.
    pub fn basis(&self, k: usize, wt: f64) -> f64 {
        self.fixed_factor(wt) * (k as f64 * wt).cos()
    }

    pub fn n_free(&self) -> usize {
        self.problem.n_free()
    }

    pub fn problem(&self) -> &DesignProblem {
        &self.problem
    }
}

/// Restates the design problem as a weighted Chebyshev approximation,
/// checking that the pulse amplitude is strictly positive on the band.
pub fn reduce_to_chebyshev(problem: &DesignProblem) -> Result<ReducedProblem> {
    let (lo, hi) = problem.band.interval();
    for i in 0..=2048 {
        let w = lo + (hi - lo) * i as f64 / 2048.0;
        let a = problem.kind.amplitude(w);
        if a <= 0.0 {
            return Err(Error::AmplitudeNotPositive { wt: w, value: a });
        }
    }
    let sign = if problem.kind.has_j_factor() { -1.0 } else { 1.0 };
    Ok(ReducedProblem {
        problem: *problem,
        sign,
    })
}

/// Result of a minimax design.
#[derive(Clone, Debug)]
pub struct DesignResult {
    pub filter: FirFilter,
    /// Peak weighted error over the design grid.
    pub delta: f64,
    /// Frequencies (rad) where the error attains its ripple.
    pub extremal_frequencies: Vec<f64>,
    pub iterations: usize,
    pub engine: Engine,
    /// False when the exchange stalled; the best iterate is still reported.
    pub converged: bool,
}

/// Per-grid-point data of the reduced problem, in the cosine-basis form
/// actually iterated on: `minimize max wprime * |dprime - P(u)|`.
pub(crate) struct ChebyshevData {
    pub omega: Vec<f64>,
    pub u: Vec<f64>,
    pub dprime: Vec<f64>,
    pub wprime: Vec<f64>,
    pub domain: ChebDomain,
}

pub(crate) fn chebyshev_data(
    reduced: &ReducedProblem,
    grid: &FrequencyGrid,
) -> Result<ChebyshevData> {
    let m = grid.len();
    let mut omega = Vec::with_capacity(m);
    let mut xs = Vec::with_capacity(m);
    let mut dprime = Vec::with_capacity(m);
    let mut wprime = Vec::with_capacity(m);
    for &w in grid.points() {
        let a = reduced.problem.kind.amplitude(w);
        if a <= 0.0 {
            return Err(Error::AmplitudeNotPositive { wt: w, value: a });
        }
        let q = reduced.fixed_factor(w);
        if q.abs() < 1e-14 {
            return Err(Error::InvalidConfig(format!(
                "fixed trigonometric factor vanishes at w = {w} on the design band"
            )));
        }
        omega.push(w);
        xs.push(w.cos());
        dprime.push(1.0 / (a * q));
        wprime.push(a * q.abs());
    }
    let domain = ChebDomain::from_points(&xs);
    let u = xs.iter().map(|&x| domain.to_local(x)).collect();
    Ok(ChebyshevData {
        omega,
        u,
        dprime,
        wprime,
        domain,
    })
}

/// Builds the impulse response from an evaluator of the solved cosine
/// polynomial `P(w)`; exact up to rounding because `P` has degree
/// `n_free - 1`.
pub(crate) fn export_filter(problem: &DesignProblem, eval_p: impl Fn(f64) -> f64) -> FirFilter {
    let n = problem.n_free();
    let values: Vec<f64> = if n == 1 {
        vec![eval_p(0.0)]
    } else {
        (0..n)
            .map(|m| eval_p(PI * m as f64 / (n - 1) as f64))
            .collect()
    };
    let p = cosine_coeffs_from_dct_samples(&values);
    let expansion = cosine_to_expansion(problem.filter_type, &p);
    FirFilter::from_expansion(problem.filter_type, &expansion)
}

/// Designs with the exchange engine and falls back to the LP oracle when
/// the exchange fails to converge.
pub fn design(problem: &DesignProblem, opts: &EngineOptions) -> Result<DesignResult> {
    let grid = problem.grid(opts.grid_density)?;
    match design_remez(problem, &grid, opts.tol, opts.max_iter) {
        Ok(r) if r.converged => Ok(r),
        _ => design_lp(problem, &grid),
    }
}

/// Independent check of a design: evaluates the full complex error on a
/// grid `dense_factor` times denser than the design grid and returns its
/// peak modulus together with the frequency attaining it.
///
/// This path uses the direct frequency response and pulse response, not the
/// real-valued reduction.
pub fn verify_design(
    result: &DesignResult,
    problem: &DesignProblem,
    dense_factor: usize,
) -> (f64, f64) {
    let base = (DEFAULT_GRID_DENSITY as usize * problem.n_free()).max(crate::bands::MIN_GRID_POINTS);
    let m = base * dense_factor.max(1);
    let (lo, hi) = problem.band.interval();
    let k = delay_k(
        result.filter.filter_type(),
        result.filter.order(),
        problem.kind,
    )
    .map(|d| d.samples())
    .unwrap_or_else(|_| problem.delay().samples());
    let mut peak = 0.0;
    let mut worst = lo;
    for i in 0..m {
        let w = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        let e = complex_error(&result.filter, problem.kind, k, w);
        if e > peak {
            peak = e;
            worst = w;
        }
    }
    (peak, worst)
}

/// |H(e^{jw}) P(jw)/T - e^{-jwK}| at one frequency.
pub fn complex_error(filter: &FirFilter, kind: PulseKind, delay_samples: f64, wt: f64) -> f64 {
    let h = filter.frequency_response(wt);
    let p = kind.frequency_response(wt);
    let target = Complex64::from_polar(1.0, -wt * delay_samples);
    (h * p - target).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(
        kind: PulseKind,
        nb: u32,
        b_over_pi: f64,
        t: LinearPhaseType,
        order: u32,
    ) -> DesignProblem {
        DesignProblem::new(kind, BandSpec::new(nb, b_over_pi * PI).unwrap(), t, order).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(DesignProblem::new(
            PulseKind::Rtc,
            BandSpec::new(1, 0.5 * PI).unwrap(),
            LinearPhaseType::III,
            10,
        )
        .is_err());
        assert!(DesignProblem::new(
            PulseKind::Rtc,
            BandSpec::new(2, 0.5 * PI).unwrap(),
            LinearPhaseType::I,
            10,
        )
        .is_err());
        assert!(DesignProblem::new(
            PulseKind::Rtz,
            BandSpec::new(2, 0.5 * PI).unwrap(),
            LinearPhaseType::I,
            11,
        )
        .is_err());
        problem(PulseKind::Rtz, 2, 0.5, LinearPhaseType::I, 12);
    }

    #[test]
    fn zero_free_parameters_is_rejected() {
        // Type III at order 0 has no expansion coefficients at all.
        let p = problem(PulseKind::Rtc, 2, 0.5, LinearPhaseType::III, 0);
        assert_eq!(p.n_free(), 0);
        assert!(matches!(p.grid(16), Err(Error::DegenerateProblem)));
        assert!(matches!(
            crate::design::design(&p, &EngineOptions::default()),
            Err(Error::DegenerateProblem)
        ));
    }

    #[test]
    fn reduction_values() {
        // NRTZ/NB1/Type I: D(0) = 1, W(0) = 1.
        let p = problem(PulseKind::Nrtz, 1, 0.5, LinearPhaseType::I, 4);
        let r = reduce_to_chebyshev(&p).unwrap();
        assert!((r.desired(0.0) - 1.0).abs() < 1e-15);
        assert!((r.weight(0.0) - 1.0).abs() < 1e-15);

        // RTZ/NB1/Type I: D(0) = 2, W(0) = 0.5.
        let p = problem(PulseKind::Rtz, 1, 0.5, LinearPhaseType::I, 4);
        let r = reduce_to_chebyshev(&p).unwrap();
        assert!((r.desired(0.0) - 2.0).abs() < 1e-15);
        assert!((r.weight(0.0) - 0.5).abs() < 1e-15);

        // RTC/NB2/Type III at w = 1.5 pi: W = (1 - cos(0.75 pi))/(0.75 pi)
        // = 1.70711/2.35619 = 0.72452.
        let p = problem(PulseKind::Rtc, 2, 0.8, LinearPhaseType::III, 10);
        let r = reduce_to_chebyshev(&p).unwrap();
        let w = 1.5 * PI;
        let want = (1.0 - (0.75 * PI).cos()) / (0.75 * PI);
        assert!((r.weight(w) - want).abs() < 1e-12);
        assert!((want - 0.72452).abs() < 5e-6);
        // j^2 = -1 joins the fixed factor for RTC.
        assert!((r.fixed_factor(w) + w.sin()).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_data_is_well_formed() {
        for (kind, nb, t, order) in [
            (PulseKind::Nrtz, 1, LinearPhaseType::I, 8),
            (PulseKind::Nrtz, 1, LinearPhaseType::II, 9),
            (PulseKind::Rtz, 3, LinearPhaseType::II, 15),
            (PulseKind::Rtc, 2, LinearPhaseType::III, 12),
            (PulseKind::Rtcz, 6, LinearPhaseType::IV, 21),
        ] {
            let p = problem(kind, nb, 0.9, t, order);
            let r = reduce_to_chebyshev(&p).unwrap();
            let grid = p.grid(16).unwrap();
            let data = chebyshev_data(&r, &grid).unwrap();
            assert_eq!(data.omega.len(), grid.len());
            // Positive weights, finite desired values, u covering [-1, 1].
            assert!(data.wprime.iter().all(|&w| w > 0.0 && w.is_finite()));
            assert!(data.dprime.iter().all(|&d| d.is_finite()));
            assert!(data.u.iter().all(|&u| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&u)));
            // u strictly monotone in grid order.
            let increasing = data.u[1] > data.u[0];
            for w in data.u.windows(2) {
                assert!(if increasing { w[1] > w[0] } else { w[1] < w[0] });
            }
        }
    }
}
