//! LP-on-grid oracle: the discretized minimax problem in epigraph form.
//!
//! The same reduced Chebyshev data as the exchange engine, solved exactly
//! (up to simplex arithmetic) as a linear program. The approximant is
//! parameterized in Chebyshev polynomials of the band's own `x = cos(w)`
//! interval, which keeps the constraint matrix well conditioned for narrow
//! bands; global `cos(kw)` coefficients are only recovered at export.

use super::poly::clenshaw_chebyshev;
use super::{
    chebyshev_data, export_filter, reduce_to_chebyshev, DesignProblem, DesignResult, Engine,
};
use crate::bands::FrequencyGrid;
use crate::error::{Error, Result};
use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

/// Minimizes `max_i |target_i - sum_j columns[j][i] * x_j|` over `x`.
///
/// Returns the coefficients and the achieved maximum deviation. This is the
/// shared exact linear-Chebyshev solver: the design oracle feeds it weighted
/// basis columns, the curve fitter feeds it estimate-term columns.
///
/// Solved twice when the first optimum comes out far below unit scale: the
/// simplex works to absolute tolerances, so the residuals are rescaled to
/// O(1) and re-solved for full relative accuracy of tiny ripples.
pub fn linear_minimax_fit(columns: &[Vec<f64>], target: &[f64]) -> Result<(Vec<f64>, f64)> {
    if columns.is_empty() || target.is_empty() {
        return Err(Error::EmptyGrid("minimax fit needs data".into()));
    }
    for c in columns {
        if c.len() != target.len() {
            return Err(Error::Lp("column/target length mismatch".into()));
        }
    }
    let (coeffs, eps) = epigraph_solve(columns, target, 1.0)?;
    if !(eps.is_finite() && eps > 0.0 && eps < 1e-3) {
        return Ok((coeffs, eps));
    }
    let (coeffs, eps_scaled) = epigraph_solve(columns, target, 1.0 / eps)?;
    Ok((coeffs, eps_scaled * eps))
}

fn epigraph_solve(columns: &[Vec<f64>], target: &[f64], scale: f64) -> Result<(Vec<f64>, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let xs: Vec<_> = columns
        .iter()
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let eps = lp.add_var(1.0, (0.0, f64::INFINITY));
    for i in 0..target.len() {
        let mut above = LinearExpr::empty();
        let mut below = LinearExpr::empty();
        for (j, &x) in xs.iter().enumerate() {
            above.add(x, scale * columns[j][i]);
            below.add(x, scale * columns[j][i]);
        }
        // scale*(sum - t) <= eps  and  scale*(sum - t) >= -eps
        above.add(eps, -1.0);
        lp.add_constraint(above, ComparisonOp::Le, scale * target[i]);
        below.add(eps, 1.0);
        lp.add_constraint(below, ComparisonOp::Ge, scale * target[i]);
    }
    let solution = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    let coeffs: Vec<f64> = xs.iter().map(|&x| *solution.var_value(x)).collect();
    Ok((coeffs, *solution.var_value(eps)))
}

/// Globally optimal design for the discretized problem.
pub fn design_lp(problem: &DesignProblem, grid: &FrequencyGrid) -> Result<DesignResult> {
    let n = problem.n_free();
    if n == 0 {
        return Err(Error::DegenerateProblem);
    }
    let reduced = reduce_to_chebyshev(problem)?;
    let data = chebyshev_data(&reduced, grid)?;
    let m = data.omega.len();

    // Weighted local-Chebyshev basis columns.
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(m); n];
    for i in 0..m {
        let u = data.u[i];
        let w = data.wprime[i];
        let mut t_prev = 1.0;
        let mut t_cur = u;
        for (k, col) in columns.iter_mut().enumerate() {
            let t_k = match k {
                0 => 1.0,
                1 => t_cur,
                _ => {
                    let t_next = 2.0 * u * t_cur - t_prev;
                    t_prev = t_cur;
                    t_cur = t_next;
                    t_next
                }
            };
            col.push(w * t_k);
        }
    }
    let target: Vec<f64> = (0..m).map(|i| data.wprime[i] * data.dprime[i]).collect();

    let (q, _eps) = linear_minimax_fit(&columns, &target)?;

    let errors: Vec<f64> = (0..m)
        .map(|i| data.wprime[i] * (data.dprime[i] - clenshaw_chebyshev(&q, data.u[i])))
        .collect();
    let delta = errors.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));

    // Ripple frequencies: local maxima of |E| near the peak level.
    let mut extremal_frequencies = Vec::new();
    for i in 0..m {
        let a = errors[i].abs();
        if a < delta * (1.0 - 1e-6) {
            continue;
        }
        let left_ok = i == 0 || a >= errors[i - 1].abs();
        let right_ok = i == m - 1 || a > errors[i + 1].abs();
        if left_ok && right_ok {
            extremal_frequencies.push(data.omega[i]);
        }
    }

    let filter = export_filter(problem, |w| {
        clenshaw_chebyshev(&q, data.domain.to_local(w.cos()))
    });
    Ok(DesignResult {
        filter,
        delta,
        extremal_frequencies,
        iterations: 1,
        engine: Engine::Lp,
        converged: true,
    })
}
