//! Adaptive Simpson quadrature used by the spectral moment calculations.

/// Adaptive Simpson integration of `f` over uniform panels spanning
/// `[a, b]`; `tol` is an absolute tolerance on the whole interval.
/// Production paths use [`integrate_partitioned`] with scale-aware
/// edges; the uniform wrapper serves the cross-check suites.
#[cfg_attr(not(test), allow(dead_code))]
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let edges: Vec<f64> = (0..=PANELS)
        .map(|i| if i == PANELS { b } else { a + i as f64 * h })
        .collect();
    integrate_partitioned(f, &edges, tol)
}

/// Adaptive Simpson over a caller-supplied partition. Each panel gets an
/// equal share of the tolerance budget, split between halves on
/// recursion in the usual way; recursion depth is capped so a
/// pathological integrand terminates rather than recursing forever.
/// Panel edges should be placed so every panel's structure is visible to
/// its initial three nodes (for a narrow feature inside a wide window, a
/// geometric ladder of edges around the feature).
pub fn integrate_partitioned<F: Fn(f64) -> f64>(f: &F, edges: &[f64], tol: f64) -> f64 {
    let panels = edges.len() - 1;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (pa, pb) = (w[0], w[1]);
        let fa = f(pa);
        let fb = f(pb);
        let m = 0.5 * (pa + pb);
        let fm = f(m);
        let whole = simpson(pa, pb, fa, fm, fb);
        total += adaptive(f, pa, pb, fa, fm, fb, whole, panel_tol, 44);
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        let half = 0.5 * tol;
        adaptive(f, a, m, fa, flm, fm, left, half, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, half, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let f = |x: f64| 3.0 * x * x;
        let v = integrate(&f, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_mass() {
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = integrate(&f, -10.0, 10.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-9, "mass {v}");
    }

    #[test]
    fn narrow_peak_in_wide_window() {
        // Peak of width 1e-3 inside a window of width 2e3.
        let s = 1e-3;
        let f = |x: f64| (-0.5 * (x / s).powi(2)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s);
        let v = integrate(&f, -1e3, 1e3, 1e-10);
        assert!((v - 1.0).abs() < 1e-6, "mass {v}");
    }
}
