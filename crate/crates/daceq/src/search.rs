//! Minimal-order search and (B, delta) sweep grids.
//!
//! The minimal order for a specification is found by solving designs of
//! increasing order until `delta_N <= delta`; convexity of the design
//! problem makes `delta_N` nonincreasing in N, so a bracket plus
//! parity-consistent bisection certifies minimality: the returned N passes
//! and N-2 fails (unless N is the smallest valid order).

use crate::bands::BandSpec;
use crate::design::{design, DesignProblem, DesignResult, EngineOptions};
use crate::error::{Error, Result};
use crate::estimate;
use crate::fir::{compatible, LinearPhaseType};
use crate::pulses::PulseKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sentinel for sweep cells whose search failed (order cap exceeded or
/// engines did not converge).
pub const SWEEP_SENTINEL: i64 = -1;

/// A minimal-order specification: meet accuracy `delta` over bandwidth
/// `bandwidth` with the given pulse, band and filter type.
#[derive(Clone, Copy, Debug)]
pub struct OrderSpec {
    pub kind: PulseKind,
    pub nb: u32,
    pub filter_type: LinearPhaseType,
    /// Bandwidth B in rad.
    pub bandwidth: f64,
    pub delta: f64,
}

impl OrderSpec {
    pub fn new(
        kind: PulseKind,
        nb: u32,
        filter_type: LinearPhaseType,
        bandwidth: f64,
        delta: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidDelta(delta));
        }
        if !compatible(kind, filter_type) {
            return Err(Error::IncompatibleType {
                pulse: kind,
                filter_type,
            });
        }
        // Validates the bandwidth range.
        BandSpec::new(nb, bandwidth)?;
        if !kind.is_valid_band(nb) {
            return Err(Error::InvalidBand { pulse: kind, nb });
        }
        Ok(Self {
            kind,
            nb,
            filter_type,
            bandwidth,
            delta,
        })
    }

    pub fn problem(&self, order: u32) -> Result<DesignProblem> {
        DesignProblem::new(
            self.kind,
            BandSpec::new(self.nb, self.bandwidth)?,
            self.filter_type,
            order,
        )
    }
}

struct OrderScanner<'a> {
    spec: &'a OrderSpec,
    opts: &'a EngineOptions,
    memo: BTreeMap<u32, DesignResult>,
}

impl<'a> OrderScanner<'a> {
    fn new(spec: &'a OrderSpec, opts: &'a EngineOptions) -> Self {
        Self {
            spec,
            opts,
            memo: BTreeMap::new(),
        }
    }

    fn delta_at(&mut self, order: u32) -> Result<f64> {
        if !self.memo.contains_key(&order) {
            let problem = self.spec.problem(order)?;
            let result = design(&problem, self.opts)?;
            self.memo.insert(order, result);
        }
        Ok(self.memo[&order].delta)
    }

    fn passes(&mut self, order: u32) -> Result<bool> {
        Ok(self.delta_at(order)? <= self.spec.delta)
    }

    fn take(&mut self, order: u32) -> DesignResult {
        self.memo.remove(&order).expect("design cached")
    }
}

fn parity_floor(t: LinearPhaseType, n: u32) -> u32 {
    let n = if t.order_parity_ok(n) { n } else { n.saturating_sub(1) };
    n.max(t.smallest_order())
}

/// Smallest order of correct parity with `delta_N <= delta`, together with
/// the design at that order.
///
/// `search_hint` seeds the scan (a warm start from a neighboring cell or an
/// estimate); without one, the built-in order estimate seeds it when the
/// combination has a published row. The answer is independent of the seed.
pub fn minimal_order(
    spec: &OrderSpec,
    search_hint: Option<u32>,
    opts: &EngineOptions,
) -> Result<(u32, DesignResult)> {
    let t = spec.filter_type;
    let smallest = t.smallest_order();
    let cap = parity_floor(t, opts.order_cap.max(smallest));

    let start = search_hint
        .or_else(|| {
            estimate::estimate_order(spec.kind, spec.nb, t, spec.bandwidth, spec.delta).ok()
        })
        .map(|n| parity_floor(t, n).min(cap))
        .unwrap_or(smallest);

    let mut scan = OrderScanner::new(spec, opts);

    if scan.passes(start)? {
        // Walk down with doubling stride until a failure brackets the answer.
        let mut pass = start;
        let mut stride = 2u32;
        loop {
            if pass == smallest {
                return Ok((pass, scan.take(pass)));
            }
            let below = pass.saturating_sub(stride).max(smallest);
            if scan.passes(below)? {
                pass = below;
                stride = stride.saturating_mul(2);
            } else {
                return bisect(&mut scan, below, pass);
            }
        }
    } else {
        // Walk up with doubling stride until a pass brackets the answer.
        let mut fail = start;
        let mut stride = 2u32;
        loop {
            if fail >= cap {
                let best = scan.delta_at(cap)?;
                return Err(Error::OrderCapExceeded {
                    cap,
                    best_delta: best,
                });
            }
            let above = fail.saturating_add(stride).min(cap);
            if scan.passes(above)? {
                return bisect(&mut scan, fail, above);
            }
            fail = above;
            stride = stride.saturating_mul(2);
        }
    }
}

/// Parity-consistent bisection on a certified (fail, pass) bracket.
fn bisect(
    scan: &mut OrderScanner<'_>,
    mut fail: u32,
    mut pass: u32,
) -> Result<(u32, DesignResult)> {
    debug_assert!(pass > fail && (pass - fail).is_multiple_of(2));
    while pass - fail > 2 {
        let steps = (pass - fail) / 2;
        let mid = fail + 2 * (steps / 2).max(1);
        if scan.passes(mid)? {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok((pass, scan.take(pass)))
}

/// Axes and results of a minimal-order sweep over a (B, delta) rectangle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepMeta {
    pub pulse: PulseKind,
    pub nb: u32,
    pub filter_type: LinearPhaseType,
    pub grid_density: u32,
    pub tol: f64,
    pub max_iter: usize,
    pub order_cap: u32,
    /// Unix seconds at creation.
    pub timestamp: u64,
}

#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub meta: SweepMeta,
    /// Bandwidths in rad, linearly spaced, ascending.
    pub b_values: Vec<f64>,
    /// Accuracies, logarithmically spaced, ascending.
    pub delta_values: Vec<f64>,
    /// Row-major `[i_b * n_delta + j_delta]`; `SWEEP_SENTINEL` marks failures.
    pub n_min: Vec<i64>,
    /// Achieved delta at `n_min` (NaN on sentinel cells).
    pub delta_achieved: Vec<f64>,
    /// Engine iterations of the accepted design (0 on sentinel cells).
    pub iterations: Vec<u32>,
}

impl SweepGrid {
    pub fn idx(&self, i_b: usize, j_delta: usize) -> usize {
        i_b * self.delta_values.len() + j_delta
    }

    pub fn n_min_at(&self, i_b: usize, j_delta: usize) -> i64 {
        self.n_min[self.idx(i_b, j_delta)]
    }

    pub fn is_complete(&self) -> bool {
        self.n_min.iter().all(|&n| n != SWEEP_SENTINEL)
    }

    pub fn cells(&self) -> usize {
        self.b_values.len() * self.delta_values.len()
    }
}

/// Sweep configuration: inclusive axis ranges and point counts.
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    /// Bandwidth range in rad.
    pub b_range: (f64, f64),
    pub n_b: usize,
    pub delta_range: (f64, f64),
    pub n_delta: usize,
}

impl SweepConfig {
    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        let (b1, b2) = self.b_range;
        let b_values = (0..self.n_b)
            .map(|i| b1 + (b2 - b1) * i as f64 / (self.n_b - 1) as f64)
            .collect();
        let (d1, d2) = self.delta_range;
        let (l1, l2) = (d1.log10(), d2.log10());
        let delta_values = (0..self.n_delta)
            .map(|j| 10f64.powf(l1 + (l2 - l1) * j as f64 / (self.n_delta - 1) as f64))
            .collect();
        (b_values, delta_values)
    }

    fn validate(&self, kind: PulseKind, nb: u32, t: LinearPhaseType) -> Result<()> {
        if self.n_b < 2 || self.n_delta < 2 {
            return Err(Error::InvalidConfig(
                "sweep axes need at least 2 points each".into(),
            ));
        }
        if self.b_range.1 < self.b_range.0 || self.delta_range.1 < self.delta_range.0 {
            return Err(Error::InvalidConfig("sweep ranges must be ascending".into()));
        }
        // Constructing the corner specs validates everything else.
        OrderSpec::new(kind, nb, t, self.b_range.0, self.delta_range.0)?;
        OrderSpec::new(kind, nb, t, self.b_range.1, self.delta_range.1)?;
        Ok(())
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Computes `n_min` over the full grid. Cells whose search fails are marked
/// with the sentinel; rows run in parallel, warm-starting each cell from
/// its neighbor (hints affect speed only, never the answer).
///
/// `known` carries already-computed cells (resume): any non-sentinel cell
/// with matching axes is reused without design calls.
pub fn sweep(
    kind: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    config: &SweepConfig,
    opts: &EngineOptions,
    known: Option<&SweepGrid>,
) -> Result<SweepGrid> {
    config.validate(kind, nb, filter_type)?;
    let (b_values, delta_values) = config.axes();
    let n_delta = delta_values.len();

    let reuse = |i: usize, j: usize| -> Option<(i64, f64, u32)> {
        let grid = known?;
        if grid.b_values.len() != b_values.len() || grid.delta_values.len() != delta_values.len() {
            return None;
        }
        if (grid.b_values[i] - b_values[i]).abs() > 1e-12 * b_values[i].max(1.0)
            || (grid.delta_values[j] - delta_values[j]).abs() > 1e-12 * delta_values[j]
        {
            return None;
        }
        let idx = grid.idx(i, j);
        let n = grid.n_min[idx];
        if n == SWEEP_SENTINEL {
            return None;
        }
        Some((n, grid.delta_achieved[idx], grid.iterations[idx]))
    };

    let rows: Vec<Vec<(i64, f64, u32)>> = b_values
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut row = vec![(SWEEP_SENTINEL, f64::NAN, 0u32); n_delta];
            let mut hint: Option<u32> = None;
            // Largest delta first: orders grow as delta shrinks, so the
            // previous answer is a tight lower hint.
            for j in (0..n_delta).rev() {
                if let Some(cell) = reuse(i, j) {
                    row[j] = cell;
                    hint = Some(cell.0 as u32);
                    continue;
                }
                let spec = OrderSpec::new(kind, nb, filter_type, b, delta_values[j])
                    .expect("validated up front");
                match minimal_order(&spec, hint, opts) {
                    Ok((n, result)) => {
                        row[j] = (n as i64, result.delta, result.iterations as u32);
                        hint = Some(n);
                    }
                    Err(Error::OrderCapExceeded { .. })
                    | Err(Error::NonConvergence { .. })
                    | Err(Error::Lp(_)) => {
                        // Marked cell; later cells in this row only get
                        // harder, but keep scanning so partial rows stay
                        // usable.
                    }
                    Err(e) => panic!("sweep cell ({i},{j}) failed unexpectedly: {e}"),
                }
            }
            row
        })
        .collect();

    let mut n_min = Vec::with_capacity(b_values.len() * n_delta);
    let mut delta_achieved = Vec::with_capacity(n_min.capacity());
    let mut iterations = Vec::with_capacity(n_min.capacity());
    for row in rows {
        for (n, d, it) in row {
            n_min.push(n);
            delta_achieved.push(d);
            iterations.push(it);
        }
    }

    Ok(SweepGrid {
        meta: SweepMeta {
            pulse: kind,
            nb,
            filter_type,
            grid_density: opts.grid_density,
            tol: opts.tol,
            max_iter: opts.max_iter,
            order_cap: opts.order_cap,
            timestamp: unix_now(),
        },
        b_values,
        delta_values,
        n_min,
        delta_achieved,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn opts() -> EngineOptions {
        EngineOptions::default()
    }

    #[test]
    fn published_second_band_orders() {
        // Type I and II at 80% bandwidth, delta = 1e-3, second Nyquist band.
        let spec = OrderSpec::new(
            PulseKind::Rtz,
            2,
            LinearPhaseType::I,
            0.8 * PI,
            1e-3,
        )
        .unwrap();
        let (n, result) = minimal_order(&spec, None, &opts()).unwrap();
        assert_eq!(n, 12);
        assert!(result.delta <= 1e-3);

        let spec = OrderSpec::new(
            PulseKind::Rtz,
            2,
            LinearPhaseType::II,
            0.8 * PI,
            1e-3,
        )
        .unwrap();
        let (n, _) = minimal_order(&spec, None, &opts()).unwrap();
        assert_eq!(n, 37);
    }

    #[test]
    fn tiny_band_needs_zero_order() {
        let spec = OrderSpec::new(
            PulseKind::Nrtz,
            1,
            LinearPhaseType::I,
            0.04 * PI,
            0.1,
        )
        .unwrap();
        let (n, result) = minimal_order(&spec, None, &opts()).unwrap();
        assert_eq!(n, 0);
        assert!(result.delta < 1e-3);
    }

    #[test]
    fn hint_independence() {
        let spec = OrderSpec::new(
            PulseKind::Rtc,
            2,
            LinearPhaseType::IV,
            0.6 * PI,
            1e-3,
        )
        .unwrap();
        let (n_cold, _) = minimal_order(&spec, None, &opts()).unwrap();
        for hint in [1, 3, 7, 21, 61, 199] {
            let (n, _) = minimal_order(&spec, Some(hint), &opts()).unwrap();
            assert_eq!(n, n_cold, "hint {hint}");
        }
    }

    #[test]
    fn minimality_certificate() {
        let spec = OrderSpec::new(
            PulseKind::Rtcz,
            3,
            LinearPhaseType::III,
            0.5 * PI,
            1e-3,
        )
        .unwrap();
        let (n, result) = minimal_order(&spec, None, &opts()).unwrap();
        assert!(result.delta <= 1e-3);
        if n > LinearPhaseType::III.smallest_order() {
            let below = design(&spec.problem(n - 2).unwrap(), &opts()).unwrap();
            assert!(below.delta > 1e-3);
        }
    }

    #[test]
    fn order_cap_reported() {
        let spec = OrderSpec::new(
            PulseKind::Rtz,
            2,
            LinearPhaseType::I,
            0.9 * PI,
            1e-4,
        )
        .unwrap();
        let tight = EngineOptions {
            order_cap: 6,
            ..EngineOptions::default()
        };
        match minimal_order(&spec, None, &tight) {
            Err(Error::OrderCapExceeded { cap, best_delta }) => {
                assert_eq!(cap, 6);
                assert!(best_delta > 1e-4);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn small_sweep_matrix() {
        let cfg = SweepConfig {
            b_range: (0.2 * PI, 0.7 * PI),
            n_b: 4,
            delta_range: (1e-3, 1e-1),
            n_delta: 3,
        };
        let grid = sweep(
            PulseKind::Rtz,
            1,
            LinearPhaseType::I,
            &cfg,
            &opts(),
            None,
        )
        .unwrap();
        assert_eq!(grid.n_min.len(), 12);
        assert!(grid.is_complete());
        // Monotone: nondecreasing in B (rows), nonincreasing in delta (cols).
        for j in 0..3 {
            for i in 1..4 {
                assert!(grid.n_min_at(i, j) >= grid.n_min_at(i - 1, j));
            }
        }
        for i in 0..4 {
            for j in 1..3 {
                assert!(grid.n_min_at(i, j) <= grid.n_min_at(i, j - 1));
            }
        }
        // Parity.
        for &n in &grid.n_min {
            assert!(n >= 0 && n % 2 == 0);
        }

        // Resume with itself: everything reused, nothing recomputed.
        let again = sweep(
            PulseKind::Rtz,
            1,
            LinearPhaseType::I,
            &cfg,
            &opts(),
            Some(&grid),
        )
        .unwrap();
        assert_eq!(again.n_min, grid.n_min);

        // Single-threaded evaluation produces the identical matrix.
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sweep(PulseKind::Rtz, 1, LinearPhaseType::I, &cfg, &opts(), None))
            .unwrap();
        assert_eq!(serial.n_min, grid.n_min);
        assert_eq!(serial.delta_achieved, grid.delta_achieved);
    }
}
