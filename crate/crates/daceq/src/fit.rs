//! Minimax curve fitting of the order-estimate parameters to sweep data.
//!
//! Fits the refined estimate to a grid of minimal orders by minimizing the
//! maximum |N_est - N_min| over all grid cells. The problem separates: for
//! fixed scales and powers (a2, a3, a4, b2, b3, b4) the remaining
//! (a1, b1, c) problem is linear minimax and solved exactly by the shared
//! LP; a derivative-free compass search explores the six nonlinear
//! parameters, restarted from perturbed initializations. The optimum is
//! local (the full problem is non-convex) but never worse than the
//! initialization.

use crate::design::linear_minimax_fit;
use crate::error::{Error, Result};
use crate::estimate::{signed_pow, EstimateParams, FitProvenance, Provenance};
use crate::search::{SweepGrid, SWEEP_SENTINEL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Box constraints for the nonlinear parameters; the term-ordering rule
/// `a4 <= b4` keeps the two terms from trading places during optimization.
#[derive(Clone, Copy, Debug)]
pub struct ParamBounds {
    /// Bounds for the log10 arguments' scales a2, b2.
    pub scale: (f64, f64),
    /// Bounds for the bracket powers a3, b3.
    pub exponent: (f64, f64),
    /// Bounds for the (pi - B) powers a4, b4.
    pub power: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            scale: (1e-8, 1e3),
            exponent: (-2.0, 4.0),
            power: (0.5, 3.0),
        }
    }
}

/// A curve-fit task: sweep data, starting parameters, bounds.
#[derive(Clone, Debug)]
pub struct FitProblem<'a> {
    pub grid: &'a SweepGrid,
    pub init: EstimateParams,
    pub bounds: ParamBounds,
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    /// Outer compass-search iterations per restart.
    pub max_iter: usize,
    /// Stop when every step length falls below this fraction of its range.
    pub tol: f64,
    /// Perturbed restarts (the first start is the given initialization).
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 160,
            tol: 1e-4,
            restarts: 5,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub params: EstimateParams,
    /// Achieved max |N_est - N_min| over the fitted cells.
    pub eps: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The published Step-3 starting point: linear/quadratic powers with the
/// basic-form coefficients carried over.
pub fn default_init(
    kind: crate::pulses::PulseKind,
    nb: u32,
    t: crate::fir::LinearPhaseType,
    step2_a: f64,
    step2_b: f64,
    step2_c: f64,
) -> EstimateParams {
    EstimateParams {
        a1: step2_a,
        a2: 1.0,
        a3: 1.0,
        a4: 1.0,
        b1: step2_b,
        b2: 1.0,
        b3: 2.0,
        b4: 2.0,
        c: step2_c,
        provenance: Provenance::Builtin {
            pulse: kind,
            nb,
            filter_type: t,
        },
    }
}

/// Fallback basic-form coefficients when no Step-2 values are available.
pub const FALLBACK_STEP2: (f64, f64, f64) = (-2.0, 1.0, 0.0);

/// Exhaustive maximum of |N_est - N_min| over non-sentinel cells; returns
/// the value and the (i_b, j_delta) cell attaining it.
pub fn max_estimation_error(
    params: &EstimateParams,
    grid: &SweepGrid,
) -> Result<(f64, (usize, usize))> {
    let mut best = -1.0;
    let mut arg = (0, 0);
    for (i, &b) in grid.b_values.iter().enumerate() {
        for (j, &delta) in grid.delta_values.iter().enumerate() {
            let n = grid.n_min_at(i, j);
            if n == SWEEP_SENTINEL {
                continue;
            }
            let est = params.evaluate(b, delta)?;
            let err = (est - n as f64).abs();
            if err > best {
                best = err;
                arg = (i, j);
            }
        }
    }
    if best < 0.0 {
        return Err(Error::EmptyGrid("no usable cells in sweep grid".into()));
    }
    Ok((best, arg))
}

/// Non-sentinel cells flattened to (B, delta, n_min).
struct Cells {
    b: Vec<f64>,
    delta: Vec<f64>,
    n: Vec<f64>,
}

impl Cells {
    fn from_grid(grid: &SweepGrid) -> Result<Self> {
        let mut b = Vec::new();
        let mut delta = Vec::new();
        let mut n = Vec::new();
        for (i, &bv) in grid.b_values.iter().enumerate() {
            for (j, &dv) in grid.delta_values.iter().enumerate() {
                let cell = grid.n_min_at(i, j);
                if cell == SWEEP_SENTINEL {
                    continue;
                }
                b.push(bv);
                delta.push(dv);
                n.push(cell as f64);
            }
        }
        if b.is_empty() {
            return Err(Error::EmptyGrid("no usable cells in sweep grid".into()));
        }
        Ok(Self { b, delta, n })
    }
}

/// The six nonlinear parameters, scales kept in log10.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Theta {
    log_a2: f64,
    a3: f64,
    a4: f64,
    log_b2: f64,
    b3: f64,
    b4: f64,
}

impl Theta {
    fn from_params(p: &EstimateParams) -> Self {
        Self {
            log_a2: p.a2.log10(),
            a3: p.a3,
            a4: p.a4,
            log_b2: p.b2.log10(),
            b3: p.b3,
            b4: p.b4,
        }
    }

    fn coords(&self) -> [f64; 6] {
        [self.log_a2, self.a3, self.a4, self.log_b2, self.b3, self.b4]
    }

    fn from_coords(c: [f64; 6]) -> Self {
        Self {
            log_a2: c[0],
            a3: c[1],
            a4: c[2],
            log_b2: c[3],
            b3: c[4],
            b4: c[5],
        }
    }

    fn feasible(&self, bounds: &ParamBounds) -> bool {
        let (s_lo, s_hi) = (bounds.scale.0.log10(), bounds.scale.1.log10());
        self.log_a2 >= s_lo
            && self.log_a2 <= s_hi
            && self.log_b2 >= s_lo
            && self.log_b2 <= s_hi
            && self.a3 >= bounds.exponent.0
            && self.a3 <= bounds.exponent.1
            && self.b3 >= bounds.exponent.0
            && self.b3 <= bounds.exponent.1
            && self.a4 >= bounds.power.0
            && self.a4 <= bounds.power.1
            && self.b4 >= bounds.power.0
            && self.b4 <= bounds.power.1
            && self.a4 <= self.b4
    }
}

/// Inner exact solve: given the nonlinear parameters, the best (a1, b1, c)
/// by linear minimax over the cells, plus the achieved eps.
fn inner_solve(theta: &Theta, cells: &Cells) -> Result<((f64, f64, f64), f64)> {
    let a2 = 10f64.powf(theta.log_a2);
    let b2 = 10f64.powf(theta.log_b2);
    let m = cells.b.len();
    let mut col_a = Vec::with_capacity(m);
    let mut col_b = Vec::with_capacity(m);
    let col_c = vec![1.0; m];
    for i in 0..m {
        let gap = PI - cells.b[i];
        col_a.push(signed_pow((a2 * cells.delta[i]).log10(), theta.a3) / gap.powf(theta.a4));
        col_b.push(signed_pow((b2 * cells.delta[i]).log10(), theta.b3) / gap.powf(theta.b4));
    }
    if !col_a.iter().chain(&col_b).all(|v| v.is_finite()) {
        return Err(Error::Lp("non-finite estimate term".into()));
    }
    let (coeffs, eps) = linear_minimax_fit(&[col_a, col_b, col_c], &cells.n)?;
    Ok(((coeffs[0], coeffs[1], coeffs[2]), eps))
}

fn objective(theta: &Theta, cells: &Cells, bounds: &ParamBounds) -> f64 {
    if !theta.feasible(bounds) {
        return f64::INFINITY;
    }
    match inner_solve(theta, cells) {
        Ok((_, eps)) => eps,
        Err(_) => f64::INFINITY,
    }
}

/// Nelder-Mead on the six nonlinear parameters; the correlated
/// scale/exponent valleys of the estimate terms defeat axis-aligned
/// steps, so the simplex does the heavy lifting and compass search only
/// polishes.
fn nelder_mead(
    start: Theta,
    cells: &Cells,
    bounds: &ParamBounds,
    max_iter: usize,
    init_scale: f64,
) -> (Theta, f64, usize) {
    const DIM: usize = 6;
    let ranges = [
        bounds.scale.1.log10() - bounds.scale.0.log10(),
        bounds.exponent.1 - bounds.exponent.0,
        bounds.exponent.1 - bounds.exponent.0,
        bounds.scale.1.log10() - bounds.scale.0.log10(),
        bounds.exponent.1 - bounds.exponent.0,
        bounds.exponent.1 - bounds.exponent.0,
    ];
    let f = |c: [f64; DIM]| objective(&Theta::from_coords(c), cells, bounds);

    let mut simplex: Vec<[f64; DIM]> = Vec::with_capacity(DIM + 1);
    simplex.push(start.coords());
    for d in 0..DIM {
        let mut c = start.coords();
        c[d] += init_scale * ranges[d];
        simplex.push(c);
    }
    let mut values: Vec<f64> = simplex.iter().map(|&c| f(c)).collect();
    let mut evals = simplex.len();

    for _ in 0..max_iter {
        // Order best..worst.
        let mut idx: Vec<usize> = (0..=DIM).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let (best, second_worst, worst) = (idx[0], idx[DIM - 1], idx[DIM]);
        if values[worst].is_finite()
            && (values[worst] - values[best]).abs()
                <= 1e-10 * values[best].abs().max(1e-10)
        {
            break;
        }

        let mut centroid = [0.0; DIM];
        for &i in idx.iter().take(DIM) {
            for d in 0..DIM {
                centroid[d] += simplex[i][d] / DIM as f64;
            }
        }
        let dir = |alpha: f64| {
            let mut c = [0.0; DIM];
            for d in 0..DIM {
                c[d] = centroid[d] + alpha * (centroid[d] - simplex[worst][d]);
            }
            c
        };

        let reflected = dir(1.0);
        let fr = f(reflected);
        evals += 1;
        if fr < values[best] {
            let expanded = dir(2.0);
            let fe = f(expanded);
            evals += 1;
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = dir(if fr < values[worst] { 0.5 } else { -0.5 });
            let fc = f(contracted);
            evals += 1;
            if fc < values[worst].min(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[best];
                for i in 0..=DIM {
                    if i == best {
                        continue;
                    }
                    for d in 0..DIM {
                        simplex[i][d] = anchor[d] + 0.5 * (simplex[i][d] - anchor[d]);
                    }
                    values[i] = f(simplex[i]);
                    evals += 1;
                }
            }
        }
    }

    let mut best_i = 0;
    for i in 1..=DIM {
        if values[i] < values[best_i] {
            best_i = i;
        }
    }
    (Theta::from_coords(simplex[best_i]), values[best_i], evals)
}

/// Compass search over the six nonlinear parameters with the exact linear
/// subproblem nested inside each evaluation.
fn compass_search(
    start: Theta,
    cells: &Cells,
    bounds: &ParamBounds,
    max_iter: usize,
    tol: f64,
    step_frac: f64,
) -> (Theta, f64, usize, bool) {
    let ranges = [
        bounds.scale.1.log10() - bounds.scale.0.log10(),
        bounds.exponent.1 - bounds.exponent.0,
        bounds.exponent.1 - bounds.exponent.0,
        bounds.scale.1.log10() - bounds.scale.0.log10(),
        bounds.exponent.1 - bounds.exponent.0,
        bounds.exponent.1 - bounds.exponent.0,
    ];
    let mut steps: Vec<f64> = ranges.iter().map(|r| r * step_frac).collect();
    let mut best = start;
    let mut best_val = objective(&start, cells, bounds);
    let mut iters = 0;
    let mut converged = false;

    for _ in 0..max_iter {
        iters += 1;
        let mut improved = false;
        for dim in 0..6 {
            for dir in [1.0, -1.0] {
                let mut c = best.coords();
                c[dim] += dir * steps[dim];
                let cand = Theta::from_coords(c);
                let val = objective(&cand, cells, bounds);
                if val < best_val - 1e-12 {
                    best = cand;
                    best_val = val;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
            if steps
                .iter()
                .zip(&ranges)
                .all(|(s, r)| *s < tol * r)
            {
                converged = true;
                break;
            }
        }
    }
    (best, best_val, iters, converged)
}

/// Fits the nine estimate parameters to the sweep grid.
///
/// The achieved eps never exceeds the initialization's eps, the ordering
/// constraint `a4 <= b4` holds throughout, and results are deterministic
/// for a fixed seed.
pub fn fit(problem: &FitProblem<'_>, options: &FitOptions) -> Result<FitResult> {
    let cells = Cells::from_grid(problem.grid)?;
    let bounds = &problem.bounds;

    let mut theta0 = Theta::from_params(&problem.init);
    // Clamp the initialization into the box (the published Step-3 start is
    // interior by construction).
    {
        let c = theta0.coords();
        let (s_lo, s_hi) = (bounds.scale.0.log10(), bounds.scale.1.log10());
        let clamped = [
            c[0].clamp(s_lo, s_hi),
            c[1].clamp(bounds.exponent.0, bounds.exponent.1),
            c[2].clamp(bounds.power.0, bounds.power.1),
            c[3].clamp(s_lo, s_hi),
            c[4].clamp(bounds.exponent.0, bounds.exponent.1),
            c[5].clamp(bounds.power.0, bounds.power.1),
        ];
        theta0 = Theta::from_coords(clamped);
        if theta0.a4 > theta0.b4 {
            theta0.b4 = theta0.a4;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![theta0];
    let (s_lo, s_hi) = (bounds.scale.0.log10(), bounds.scale.1.log10());

    // Coarse global scan: the published rows all live in a moderate
    // sub-box (scales within a few decades of 1, powers near 1..2), so a
    // seeded random scan there finds good basins cheaply before the local
    // searches refine them.
    let mut scanned: Vec<(f64, Theta)> = Vec::new();
    for _ in 0..512 {
        let a4 = rng.gen_range(bounds.power.0..bounds.power.1.min(1.6));
        let mut t = Theta {
            log_a2: rng.gen_range(s_lo.max(-3.5)..s_hi.min(1.5)),
            a3: rng.gen_range(0.5..2.2f64.min(bounds.exponent.1)),
            a4,
            log_b2: rng.gen_range(s_lo.max(-3.5)..s_hi.min(1.5)),
            b3: rng.gen_range(bounds.exponent.0.max(-0.6)..2.2f64.min(bounds.exponent.1)),
            b4: rng.gen_range(a4..bounds.power.1.min(2.2)),
        };
        if t.a4 > t.b4 {
            std::mem::swap(&mut t.a4, &mut t.b4);
        }
        let val = objective(&t, &cells, bounds);
        if val.is_finite() {
            scanned.push((val, t));
        }
    }
    scanned.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    starts.extend(scanned.iter().take(4).map(|(_, t)| *t));

    while starts.len() < options.restarts.max(1) + 3 {
        let base = theta0.coords();
        let jitter = [
            0.12 * (s_hi - s_lo),
            0.35,
            0.18,
            0.12 * (s_hi - s_lo),
            0.35,
            0.18,
        ];
        let mut c = [0.0; 6];
        for d in 0..6 {
            c[d] = base[d] + rng.gen_range(-1.0..1.0) * jitter[d];
        }
        let mut t = Theta::from_coords(c);
        t.log_a2 = t.log_a2.clamp(s_lo, s_hi);
        t.log_b2 = t.log_b2.clamp(s_lo, s_hi);
        t.a3 = t.a3.clamp(bounds.exponent.0, bounds.exponent.1);
        t.b3 = t.b3.clamp(bounds.exponent.0, bounds.exponent.1);
        t.a4 = t.a4.clamp(bounds.power.0, bounds.power.1);
        t.b4 = t.b4.clamp(bounds.power.0, bounds.power.1);
        if t.a4 > t.b4 {
            std::mem::swap(&mut t.a4, &mut t.b4);
        }
        starts.push(t);
    }

    let mut best: Option<(Theta, f64)> = None;
    let mut total_iters = 0;
    let mut any_converged = false;
    for start in starts {
        let (theta, val, evals) =
            nelder_mead(start, &cells, bounds, 4 * options.max_iter, 0.06);
        total_iters += evals;
        if best.as_ref().is_none_or(|(_, v)| val < *v) {
            best = Some((theta, val));
        }
    }
    // Basin hopping around the winner: jittered restarts pull the simplex
    // out of shallow neighboring minima.
    if let Some((theta, _)) = best {
        let hop_jitter = [
            0.05 * (s_hi - s_lo),
            0.25,
            0.08,
            0.05 * (s_hi - s_lo),
            0.25,
            0.08,
        ];
        for _ in 0..options.restarts.max(1) {
            let base = theta.coords();
            let mut c = [0.0; 6];
            for d in 0..6 {
                c[d] = base[d] + rng.gen_range(-1.0..1.0) * hop_jitter[d];
            }
            let mut t = Theta::from_coords(c);
            if t.a4 > t.b4 {
                std::mem::swap(&mut t.a4, &mut t.b4);
            }
            let (t2, v2, evals) = nelder_mead(t, &cells, bounds, 2 * options.max_iter, 0.03);
            total_iters += evals;
            if v2 < best.as_ref().unwrap().1 {
                best = Some((t2, v2));
            }
        }
    }
    // Re-run the winner with a fresh small simplex, then polish with an
    // axis-aligned pass.
    if let Some((theta, _)) = best {
        let (t2, v2, evals) = nelder_mead(theta, &cells, bounds, 4 * options.max_iter, 0.01);
        total_iters += evals;
        if v2 < best.as_ref().unwrap().1 {
            best = Some((t2, v2));
        }
        let (t3, v3, iters, converged) = compass_search(
            best.unwrap().0,
            &cells,
            bounds,
            options.max_iter,
            options.tol * 0.25,
            0.01,
        );
        total_iters += iters;
        any_converged |= converged;
        if v3 < best.as_ref().unwrap().1 {
            best = Some((t3, v3));
        }
    }
    let (theta, eps) = best.expect("at least one start");
    if !eps.is_finite() {
        return Err(Error::Lp("curve fit found no finite objective".into()));
    }
    let ((a1, b1, c), _) = inner_solve(&theta, &cells)?;

    let grid = problem.grid;
    let params = EstimateParams {
        a1,
        a2: 10f64.powf(theta.log_a2),
        a3: theta.a3,
        a4: theta.a4,
        b1,
        b2: 10f64.powf(theta.log_b2),
        b3: theta.b3,
        b4: theta.b4,
        c,
        provenance: Provenance::Fitted(FitProvenance {
            pulse: grid.meta.pulse,
            nb: grid.meta.nb,
            filter_type: grid.meta.filter_type,
            b_over_pi_range: (
                grid.b_values[0] / PI,
                grid.b_values[grid.b_values.len() - 1] / PI,
            ),
            n_b: grid.b_values.len(),
            delta_range: (
                grid.delta_values[0],
                grid.delta_values[grid.delta_values.len() - 1],
            ),
            n_delta: grid.delta_values.len(),
            seed: options.seed,
            timestamp: grid.meta.timestamp,
        }),
    };

    // Recompute the achieved error through the public path; this is the
    // value callers can check independently.
    let (eps_check, _) = max_estimation_error(&params, grid)?;
    Ok(FitResult {
        params,
        eps: eps_check,
        iterations: total_iters,
        converged: any_converged,
    })
}
