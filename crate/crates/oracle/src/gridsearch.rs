//! Grid-search minimizers for the scalar and 2-D shrinkage objectives.
//!
//! Both objectives are convex, so a coarse-to-fine search (full grid, then a
//! refined grid around the best point, repeated) finds the grid minimizer at
//! the final resolution without enumerating the whole fine grid.

/// Minimizes `t * |d| + 0.5 * (d - x)^2` on a grid of spacing `step`.
/// Returns `(argmin, step)`.
pub fn scalar_shrink(x: f64, t: f64, final_step: f64) -> (f64, f64) {
    let f = |d: f64| t * d.abs() + 0.5 * (d - x) * (d - x);
    let radius = x.abs() + t + 1.0;
    let mut lo = -radius;
    let mut hi = radius;
    let mut step = (hi - lo) / 1000.0;
    loop {
        let count = ((hi - lo) / step).round() as i64;
        let mut best = (f64::INFINITY, lo);
        for k in 0..=count {
            // grid anchored at 0 so that the kink is always a grid point
            let d = ((lo / step).round() + k as f64) * step;
            let v = f(d);
            if v < best.0 {
                best = (v, d);
            }
        }
        if step <= final_step {
            return (best.1, step);
        }
        lo = best.1 - 5.0 * step;
        hi = best.1 + 5.0 * step;
        step = (step / 10.0).max(final_step);
    }
}

/// Minimizes `t * ||d|| + 0.5 * ||d - x||^2` over `d` in the box
/// `[-half_width, half_width]^2` on a grid of spacing `final_step`.
pub fn block_shrink(x: [f64; 2], t: f64, half_width: f64, final_step: f64) -> [f64; 2] {
    let f = |d: [f64; 2]| {
        let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
        t * n + 0.5 * ((d[0] - x[0]).powi(2) + (d[1] - x[1]).powi(2))
    };
    let mut center = [0.0, 0.0];
    let mut reach = half_width;
    let mut step = half_width / 100.0;
    loop {
        let count = (reach / step).round() as i64;
        let mut best = (f64::INFINITY, center);
        for a in -count..=count {
            for b in -count..=count {
                let d = [
                    (center[0] + a as f64 * step).clamp(-half_width, half_width),
                    (center[1] + b as f64 * step).clamp(-half_width, half_width),
                ];
                let v = f(d);
                if v < best.0 {
                    best = (v, d);
                }
            }
        }
        if step <= final_step {
            return best.1;
        }
        center = best.1;
        reach = 3.0 * step;
        step = (step / 10.0).max(final_step);
    }
}
