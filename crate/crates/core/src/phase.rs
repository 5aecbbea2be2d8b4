//! The Lotka-Volterra field
//!
//! ```text
//! x' = x (n + sigma - x - q y)
//! y' = y (-(n - 2k)/k + x/k + y)
//! ```
//!
//! and its local structure: critical points in the closed first quadrant,
//! critical points at infinity on the Poincaré sphere, and the slopes with
//! which the orbit leaves `(n + sigma, 0)` and enters the interior point.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{self, Params, Regime};

/// A point of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PhasePoint { x, y }
    }

    /// Builds a point of the region of interest (finite, nonnegative coordinates).
    pub fn in_quadrant(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && x >= 0.0 && y >= 0.0 {
            Ok(PhasePoint { x, y })
        } else {
            Err(Error::Domain(format!("({x}, {y}) is outside the closed first quadrant")))
        }
    }

    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_in_quadrant(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    Saddle,
    Center,
    SpiralSink,
    NodeSink,
    SpiralSource,
    NodeSource,
    /// Zero determinant; not hyperbolic.
    Degenerate,
}

/// A finite critical point with its linearization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: PhasePoint,
    pub jacobian: [[f64; 2]; 2],
    #[serde(skip)]
    pub eigenvalues: [Complex64; 2],
    /// `Lambda(x0, y0)`, the Jacobian determinant of the field.
    pub index_determinant: f64,
    /// `-1` for saddles, `+1` for antisaddles, `0` when degenerate.
    pub poincare_index: i8,
    pub kind: CriticalKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfinityKind {
    Node,
    Saddle,
}

/// A critical point at infinity.
///
/// Points on the `x` end use the chart `z = 1/x`, `u = y/x`. The point at the
/// end of the `y` axis has no finite `u`; it is linearized in the rotated
/// chart `z = 1/y`, `w = x/y` and carries `rotated_chart = true`, with
/// `lambda_z`, `lambda_u` the eigenvalues along `z` and `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfinityPoint {
    pub u: f64,
    pub lambda_z: f64,
    pub lambda_u: f64,
    pub kind: InfinityKind,
    pub rotated_chart: bool,
}

/// Limit slopes `y'/x'` of the orbit entering the interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AsymptoticSlopes {
    /// `gamma_minus <= gamma_plus < 0`.
    Real { gamma_plus: f64, gamma_minus: f64 },
    /// Complex roots: the orbit spirals into the interior point.
    ComplexCase,
}

pub fn vector_field(p: PhasePoint, params: &Params) -> (f64, f64) {
    let n = params.nf();
    let k = params.kf();
    let dx = p.x * (n + params.sigma() - p.x - params.q() * p.y);
    let dy = p.y * (-(n - 2.0 * k) / k + p.x / k + p.y);
    (dx, dy)
}

/// Jacobian matrix of [`vector_field`] at `p`, row-major.
pub fn jacobian(p: PhasePoint, params: &Params) -> [[f64; 2]; 2] {
    let n = params.nf();
    let k = params.kf();
    let q = params.q();
    [
        [n + params.sigma() - 2.0 * p.x - q * p.y, -q * p.x],
        [p.y / k, -(n - 2.0 * k) / k + p.x / k + 2.0 * p.y],
    ]
}

/// Eigenvalues of a 2x2 matrix from its trace and determinant.
pub fn eigenvalues(trace: f64, det: f64) -> [Complex64; 2] {
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(0.5 * (trace + s), 0.0), Complex64::new(0.5 * (trace - s), 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(0.5 * trace, 0.5 * s), Complex64::new(0.5 * trace, -0.5 * s)]
    }
}

fn classify(trace: f64, det: f64) -> CriticalKind {
    let scale = trace.abs().max(det.abs().sqrt()).max(1.0);
    if det.abs() <= 1e-14 * scale * scale {
        CriticalKind::Degenerate
    } else if det < 0.0 {
        CriticalKind::Saddle
    } else if trace.abs() <= 1e-14 * scale {
        CriticalKind::Center
    } else {
        let spiral = trace * trace - 4.0 * det < 0.0;
        match (trace < 0.0, spiral) {
            (true, true) => CriticalKind::SpiralSink,
            (true, false) => CriticalKind::NodeSink,
            (false, true) => CriticalKind::SpiralSource,
            (false, false) => CriticalKind::NodeSource,
        }
    }
}

fn index_of(kind: CriticalKind) -> i8 {
    match kind {
        CriticalKind::Saddle => -1,
        CriticalKind::Degenerate => 0,
        _ => 1,
    }
}

fn critical_point(location: PhasePoint, params: &Params) -> CriticalPoint {
    let j = jacobian(location, params);
    let trace = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let kind = classify(trace, det);
    CriticalPoint {
        location,
        jacobian: j,
        eigenvalues: eigenvalues(trace, det),
        index_determinant: det,
        poincare_index: index_of(kind),
        kind,
    }
}

/// `(x^, y^)` when it lies in the open first quadrant.
pub fn interior_point(params: &Params) -> Option<PhasePoint> {
    if params.q() <= params.interior_threshold() {
        return None;
    }
    let qk = params.q() - params.kf();
    Some(PhasePoint::new(exponents::a_sigma(params) / qk, params.two_k_sigma() / qk))
}

/// The boundary equilibria `(0,0)`, `(n + sigma, 0)`, `(0, (n-2k)/k)`, then the
/// interior point when it exists.
pub fn finite_critical_points(params: &Params) -> Vec<CriticalPoint> {
    let mut pts = vec![
        critical_point(PhasePoint::new(0.0, 0.0), params),
        critical_point(PhasePoint::new(params.nf() + params.sigma(), 0.0), params),
        critical_point(PhasePoint::new(0.0, params.y_axis_height()), params),
    ];
    if params.q() > params.interior_threshold() {
        pts.push(interior_jacobian(params).expect("interior point exists"));
    }
    pts
}

/// Linearization at `(x^, y^)`, built from the closed-form trace and determinant.
pub fn interior_jacobian(params: &Params) -> Result<CriticalPoint> {
    let location = interior_point(params).ok_or_else(|| {
        Error::Domain(format!(
            "interior critical point not in the open quadrant: q = {} ≤ (n+σ)k/(n−2k) = {}",
            params.q(),
            params.interior_threshold()
        ))
    })?;
    let k = params.kf();
    let q = params.q();
    let b = params.two_k_sigma();
    let a = exponents::a_sigma(params);
    let qk = q - k;
    let j = [[-a / qk, -q * a / qk], [b / (k * qk), b / qk]];
    let regime = exponents::regime(params);
    let (trace, det) = if regime == Regime::Center { (0.0, b * a / (k * qk)) } else { ((b - a) / qk, b * a / (k * qk)) };
    let kind = match regime {
        Regime::Center => CriticalKind::Center,
        Regime::Spiral => CriticalKind::SpiralSink,
        Regime::StableNode => CriticalKind::NodeSink,
        Regime::UnstableExcluded => classify(trace, det),
    };
    Ok(CriticalPoint {
        location,
        jacobian: j,
        eigenvalues: eigenvalues(trace, det),
        index_determinant: det,
        poincare_index: index_of(kind),
        kind,
    })
}

/// The field in the chart `z = 1/x`, `u = y/x`, multiplied by `z`.
pub fn chart_field(z: f64, u: f64, params: &Params) -> (f64, f64) {
    let k = params.kf();
    let q = params.q();
    let ns = params.nf() + params.sigma();
    let p = -z * (-1.0 + ns * z - q * u);
    let qq = (k + 1.0) / k * u - (ns + params.y_axis_height()) * z * u + (q + 1.0) * u * u;
    (p, qq)
}

/// The field in the rotated chart `z = 1/y`, `w = x/y`, multiplied by `z`.
pub fn rotated_chart_field(z: f64, w: f64, params: &Params) -> (f64, f64) {
    let k = params.kf();
    let q = params.q();
    let ns = params.nf() + params.sigma();
    let h = params.y_axis_height();
    let p = h * z * z - w * z / k - z;
    let qq = w * ((ns + h) * z - w * (1.0 + 1.0 / k) - (q + 1.0));
    (p, qq)
}

fn infinity_kind(lz: f64, lu: f64) -> InfinityKind {
    if lz * lu > 0.0 {
        InfinityKind::Node
    } else {
        InfinityKind::Saddle
    }
}

/// The three critical points at infinity: `u = 0`, `u = -(k+1)/(k(q+1))`, and
/// the end of the `y` axis.
pub fn infinity_points(params: &Params) -> Vec<InfinityPoint> {
    let k = params.kf();
    let q = params.q();
    let roots = [0.0, -(k + 1.0) / (k * (q + 1.0))];
    let mut pts: Vec<InfinityPoint> = roots
        .iter()
        .map(|&u| {
            // Diagonal entries of the chart Jacobian at (0, u); the off-diagonal
            // d/du of z z' vanishes at z = 0, so these are the eigenvalues.
            let lambda_z = 1.0 + q * u;
            let lambda_u = (k + 1.0) / k + 2.0 * (q + 1.0) * u;
            InfinityPoint { u, lambda_z, lambda_u, kind: infinity_kind(lambda_z, lambda_u), rotated_chart: false }
        })
        .collect();
    let (lz, lw) = (-1.0, -(q + 1.0));
    pts.push(InfinityPoint {
        u: f64::INFINITY,
        lambda_z: lz,
        lambda_u: lw,
        kind: infinity_kind(lz, lw),
        rotated_chart: true,
    });
    pts
}

/// Unstable eigenvalue `(2k + sigma)/k` of the saddle `(n + sigma, 0)`.
pub fn launch_eigenvalue(params: &Params) -> f64 {
    params.two_k_sigma() / params.kf()
}

/// Slope `gamma_s` with which the orbit leaves `(n + sigma, 0)`.
pub fn launch_slope(params: &Params) -> f64 {
    let n = params.nf();
    let k = params.kf();
    -(n - 2.0 * k) * exponents::q_star(params) / (params.q() * k * (n + params.sigma()))
}

/// Unit unstable eigenvector at `(n + sigma, 0)`, pointing into the quadrant
/// (negative `x`, positive `y` component).
pub fn unstable_direction(params: &Params) -> (f64, f64) {
    let slope = launch_slope(params);
    let norm = (1.0 + slope * slope).sqrt();
    (-1.0 / norm, -slope / norm)
}

pub fn asymptotic_slopes(params: &Params) -> Result<AsymptoticSlopes> {
    if params.q() <= params.interior_threshold() {
        return Err(Error::Domain("interior critical point not in the open quadrant".into()));
    }
    let k = params.kf();
    let q = params.q();
    let b = params.two_k_sigma();
    let a = exponents::a_sigma(params);
    let lin = (b + a) / (q * a);
    let con = b / (q * k * a);
    let disc = lin * lin - 4.0 * con;
    if disc < -1e-12 * lin * lin {
        return Ok(AsymptoticSlopes::ComplexCase);
    }
    let s = disc.max(0.0).sqrt();
    Ok(AsymptoticSlopes::Real { gamma_plus: 0.5 * (-lin + s), gamma_minus: 0.5 * (-lin - s) })
}

/// Signed residual of the line through `(n + sigma, 0)` and `(0, (n-2k)/k)`;
/// it is an orbit when `q = q*`.
pub fn invariant_line_residual(p: PhasePoint, params: &Params) -> f64 {
    let h = params.y_axis_height();
    let ns = params.nf() + params.sigma();
    h * p.x + ns * p.y - h * ns
}
