//! Small numerical helpers shared by the solvers: finite-difference weights on
//! arbitrary grids and bracketed root finding.

/// Number of nodes in the finite-difference stencils used for residual checks.
pub const STENCIL: usize = 7;

/// Fornberg weights for derivatives of order `0..=m` at `z` from nodes `xs`.
///
/// Returns `w[j][d]`, the weight of node `j` in the `d`-th derivative.
pub fn fornberg_weights(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for d in (1..=mn).rev() {
                    c[i][d] = c1 * (d as f64 * c[i - 1][d - 1] - c5 * c[i - 1][d]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for d in (1..=mn).rev() {
                c[j][d] = (c4 * c[j][d] - d as f64 * c[j][d - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Index range of a `width`-point window around `i`, clamped to `0..len`.
pub fn stencil_window(i: usize, len: usize, width: usize) -> std::ops::Range<usize> {
    let width = width.min(len);
    let start = i.saturating_sub(width / 2).min(len - width);
    start..start + width
}

/// First derivative of tabulated data at node `i`.
pub fn derivative_at(xs: &[f64], ys: &[f64], i: usize, width: usize) -> f64 {
    let win = stencil_window(i, xs.len(), width);
    let w = fornberg_weights(xs[i], &xs[win.clone()], 1);
    win.zip(w).map(|(j, wj)| wj[1] * ys[j]).sum()
}

/// First derivative of tabulated data at every node.
pub fn derivative(xs: &[f64], ys: &[f64], width: usize) -> Vec<f64> {
    (0..xs.len()).map(|i| derivative_at(xs, ys, i, width)).collect()
}

/// Bisection for a sign change of `f` on `[a, b]`.
///
/// Stops when `|f| <= ftol` or the bracket collapses to adjacent floats.
/// Returns `None` when `f(a)` and `f(b)` have the same strict sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, ftol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm.abs() < best.1.abs() {
            best = (m, fm);
        }
        if fm.abs() <= ftol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(best.0)
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
