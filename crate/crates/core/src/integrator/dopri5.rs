//! Dormand-Prince 5(4) with PI step-size control and cubic Hermite dense output.

use crate::error::{Error, Result};

/// An accepted step: time, state and the field evaluated at the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size.
    pub max_step: f64,
}

/// Why [`integrate`] returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finish {
    /// `t_end` was reached.
    End,
    /// The step callback asked to stop.
    Stopped,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let s: f64 = terms.iter().map(|(c, k)| c * k[i]).sum();
        *o += h * s;
    }
    out
}

fn err_norm<const N: usize>(v: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerances) -> f64 {
    let s: f64 = (0..N)
        .map(|i| {
            let sk = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
            (v[i] / sk).powi(2)
        })
        .sum();
    (s / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &F, t0: f64, y0: &[f64; N], f0: &[f64; N], tol: &Tolerances, span: f64) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let zero = [0.0; N];
    let d0 = err_norm(y0, y0, &zero, tol);
    let d1 = err_norm(f0, y0, &zero, tol);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = err_norm(&diff, y0, &zero, tol) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` towards `t_end`.
///
/// `on_step` sees every accepted node (including the initial one) and
/// returns `true` to stop. The returned nodes always include the first and
/// last accepted states.
pub fn integrate<const N: usize, F, C>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances,
    mut on_step: C,
) -> Result<(Vec<Node<N>>, Finish)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(&Node<N>, Option<&Node<N>>) -> bool,
{
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(Error::Domain(format!("empty integration interval [{t0}, {t_end}]")));
    }
    let k1 = f(t0, &y0);
    let first = Node { t: t0, y: y0, dy: k1 };
    let mut nodes = vec![first];
    if on_step(&first, None) {
        return Ok((nodes, Finish::Stopped));
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = k1;
    let mut h = initial_step(&f, t0, &y0, &k1, tol, span).min(tol.max_step);
    let mut fac_old: f64 = 1e-4;
    let mut rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= tol.max_steps {
            return Err(Error::NonConvergence(format!("{steps} steps exhausted at t = {t}")));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::NonConvergence(format!("step size underflow at t = {t}")));
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);
        let err_vec: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = err_norm(&err_vec, &y, &y_new, tol);
        if !err.is_finite() {
            h *= FAC_MIN;
            rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(tol.max_step);
            if rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            rejected = false;

            let t_new = if last { t_end } else { t + h };
            let prev = *nodes.last().unwrap();
            let node = Node { t: t_new, y: y_new, dy: k7 };
            nodes.push(node);
            t = t_new;
            y = y_new;
            k1 = k7;
            h = h_new;
            if on_step(&node, Some(&prev)) {
                return Ok((nodes, Finish::Stopped));
            }
            if last {
                return Ok((nodes, Finish::End));
            }
        } else {
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
            rejected = true;
        }
    }
}

/// Cubic Hermite interpolation between two accepted nodes.
pub fn hermite<const N: usize>(a: &Node<N>, b: &Node<N>, t: f64) -> [f64; N] {
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    std::array::from_fn(|i| h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i])
}

/// Locates the node interval containing `t` and interpolates.
pub fn dense_eval<const N: usize>(nodes: &[Node<N>], t: f64) -> [f64; N] {
    match nodes.len() {
        0 => [f64::NAN; N],
        1 => nodes[0].y,
        len => {
            let i = nodes.partition_point(|n| n.t <= t).clamp(1, len - 1);
            hermite(&nodes[i - 1], &nodes[i], t)
        }
    }
}
