//! Integration of the orbit that leaves the saddle `(n + sigma, 0)` along its
//! unstable manifold.
//!
//! The system is autonomous, so the launch is placed at `t = 0`. The offset
//! between orbit time and `ln s` of the rescaled initial value problem is
//! recovered from the launch point (see [`Orbit::gauge`]).

pub(crate) mod dopri5;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{self, Params, Regime};
use crate::numerics;
use crate::phase::{self, PhasePoint};
use dopri5::{Finish, Node, Tolerances};

/// Integrator settings. Use [`IntegratorConfig::for_params`] for defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    /// Distance from `(n + sigma, 0)` along the unstable eigenvector.
    pub epsilon_launch: f64,
    /// Stop once the orbit is this close to the interior sink.
    pub sink_radius: f64,
    /// Stop once a `q = q*` orbit is this close to `(0, (n-2k)/k)`.
    pub saddle_radius: f64,
    pub max_steps: usize,
}

impl IntegratorConfig {
    pub fn for_params(params: &Params) -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-20,
            t_max: 200.0,
            epsilon_launch: 1e-8 * (params.nf() + params.sigma()),
            sink_radius: 1e-8,
            saddle_radius: 1e-4,
            max_steps: 1_000_000,
        }
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("epsilon_launch", self.epsilon_launch),
            ("sink_radius", self.sink_radius),
            ("saddle_radius", self.saddle_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be positive".into()));
        }
        if self.epsilon_launch > 1e-4 * (params.nf() + params.sigma()) {
            return Err(Error::Domain(format!("epsilon_launch = {} exceeds 1e-4 (n + σ)", self.epsilon_launch)));
        }
        if self.rel_tol > 1e-6 || self.abs_tol > 1e-6 {
            return Err(Error::Domain("rel_tol and abs_tol must not exceed 1e-6".into()));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.rel_tol, atol: self.abs_tol, max_steps: self.max_steps, max_step: f64::INFINITY }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    ReachedSink,
    TimeLimit,
    LeftQuadrant,
    /// `q = q*` launch reached `(0, (n-2k)/k)` along the invariant line.
    ReachedSaddle,
    /// Returned to the launch section within `1e-6` of the start.
    ClosedOrbit,
    /// Returned to the launch section elsewhere.
    SectionReturn,
}

/// A computed trajectory with dense output.
#[derive(Debug, Clone)]
pub struct Orbit {
    params: Params,
    nodes: Vec<Node<2>>,
    terminated: Termination,
    gauge: Option<f64>,
    return_gap: Option<f64>,
}

impl Orbit {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn terminated(&self) -> Termination {
        self.terminated
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.nodes[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].t
    }

    /// Accepted integration steps as `(t, point)`.
    pub fn samples(&self) -> impl ExactSizeIterator<Item = (f64, PhasePoint)> + '_ {
        self.nodes.iter().map(|n| (n.t, PhasePoint::new(n.y[0], n.y[1])))
    }

    pub fn times(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.t).collect()
    }

    pub fn first_point(&self) -> PhasePoint {
        let y = self.nodes[0].y;
        PhasePoint::new(y[0], y[1])
    }

    pub fn last_point(&self) -> PhasePoint {
        let y = self.nodes[self.nodes.len() - 1].y;
        PhasePoint::new(y[0], y[1])
    }

    /// Dense evaluation at `t`, clamped to the computed range.
    pub fn eval(&self, t: f64) -> PhasePoint {
        let t = t.clamp(self.t_start(), self.t_end());
        let y = dopri5::dense_eval(&self.nodes, t);
        PhasePoint::new(y[0], y[1])
    }

    /// `Lambda(t) = c_{n,k} x(t) y(t)^k`.
    pub fn lambda_at(&self, t: f64) -> f64 {
        lambda_of(self.eval(t), &self.params)
    }

    /// Offset `g` with `ln s = t + g`, where `s` is the variable of the rescaled
    /// initial value problem. Only defined for orbits launched from the saddle.
    pub fn gauge(&self) -> Option<f64> {
        self.gauge
    }

    /// Distance between the start and the first return to the launch section.
    pub fn return_gap(&self) -> Option<f64> {
        self.return_gap
    }
}

/// `c_{n,k} x y^k`.
pub fn lambda_of(p: PhasePoint, params: &Params) -> f64 {
    exponents::c_nk(params) * p.x * p.y.powi(params.k() as i32)
}

/// `t -> Lambda(t)` along an orbit.
#[derive(Debug, Clone, Copy)]
pub struct LambdaProfile<'a> {
    orbit: &'a Orbit,
}

impl LambdaProfile<'_> {
    pub fn eval(&self, t: f64) -> f64 {
        self.orbit.lambda_at(t)
    }

    /// Values at the accepted steps.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.orbit.samples().map(|(t, p)| (t, lambda_of(p, &self.orbit.params))).collect()
    }

    /// Largest value over the accepted steps.
    pub fn sup(&self) -> f64 {
        self.samples().iter().map(|s| s.1).fold(0.0, f64::max)
    }
}

pub fn lambda_profile(orbit: &Orbit) -> LambdaProfile<'_> {
    LambdaProfile { orbit }
}

fn field(params: Params) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, y| {
        let (dx, dy) = phase::vector_field(PhasePoint::new(y[0], y[1]), &params);
        [dx, dy]
    }
}

/// `ln s` at the launch point.
///
/// Near the saddle `v = -1 + (k/(2k+sigma)) y` to first order and
/// `Lambda = lambda~ s^(2k+sigma) (-v)^(q-k)`.
fn launch_gauge(p0: PhasePoint, params: &Params) -> f64 {
    let b = params.two_k_sigma();
    let minus_v = 1.0 - params.kf() / b * p0.y;
    let lt = exponents::lambda_tilde(params);
    ((lambda_of(p0, params) / lt).ln() - (params.q() - params.kf()) * minus_v.ln()) / b
}

/// Integrates the orbit leaving `(n + sigma, 0)`.
///
/// Spiral and node regimes stop at the interior sink. At `q = q*` the orbit
/// is the invariant segment and stops near `(0, (n-2k)/k)`.
pub fn integrate_orbit(params: &Params, cfg: &IntegratorConfig) -> Result<Orbit> {
    cfg.validate(params)?;
    let regime = exponents::regime(params);
    if regime == Regime::UnstableExcluded {
        return Err(Error::Regime(format!(
            "q = {} < q* = {}: orbit integration is not defined in this regime",
            params.q(),
            exponents::q_star(params)
        )));
    }
    let (vx, vy) = phase::unstable_direction(params);
    let ns = params.nf() + params.sigma();
    let p0 = PhasePoint::new(ns + cfg.epsilon_launch * vx, cfg.epsilon_launch * vy);
    let (target, radius, hit) = match regime {
        Regime::Center => {
            (PhasePoint::new(0.0, params.y_axis_height()), cfg.saddle_radius, Termination::ReachedSaddle)
        }
        _ => (phase::interior_point(params).expect("q > q*"), cfg.sink_radius, Termination::ReachedSink),
    };

    let mut reason = Termination::TimeLimit;
    let (nodes, finish) = dopri5::integrate(field(*params), 0.0, [p0.x, p0.y], cfg.t_max, &cfg.tolerances(), |n, _| {
        let p = PhasePoint::new(n.y[0], n.y[1]);
        if !p.is_in_quadrant() {
            reason = Termination::LeftQuadrant;
            true
        } else if p.dist(&target) < radius {
            reason = hit;
            true
        } else {
            false
        }
    })?;
    let terminated = if finish == Finish::End { Termination::TimeLimit } else { reason };
    Ok(Orbit { params: *params, nodes, terminated, gauge: Some(launch_gauge(p0, params)), return_gap: None })
}

/// Integrates from an arbitrary `start` until the first return to the ray
/// from the interior point through `start`.
///
/// At `q = q*` the return lands on `start` and the result is a
/// [`Termination::ClosedOrbit`].
pub fn integrate_cycle(params: &Params, start: PhasePoint, cfg: &IntegratorConfig) -> Result<Orbit> {
    cfg.validate(params)?;
    let center = phase::interior_point(params)
        .ok_or_else(|| Error::Domain("no interior critical point to circle".into()))?;
    let d = (start.x - center.x, start.y - center.y);
    let norm = d.0.hypot(d.1);
    if norm == 0.0 {
        return Err(Error::DegenerateInput("start coincides with the interior critical point".into()));
    }
    let side = |y: &[f64; 2]| d.0 * (y[1] - center.y) - d.1 * (y[0] - center.x);
    let ahead = |y: &[f64; 2]| d.0 * (y[0] - center.x) + d.1 * (y[1] - center.y) > 0.0;
    let (fx, fy) = phase::vector_field(start, params);
    let orientation = (d.0 * fy - d.1 * fx).signum();
    if orientation == 0.0 {
        return Err(Error::DegenerateInput("field is tangent to the section at start".into()));
    }

    let mut crossing: Option<(Node<2>, Node<2>)> = None;
    let mut reason = Termination::TimeLimit;
    let (mut nodes, finish) =
        dopri5::integrate(field(*params), 0.0, [start.x, start.y], cfg.t_max, &cfg.tolerances(), |n, prev| {
            if n.y[0] < 0.0 || n.y[1] < 0.0 {
                reason = Termination::LeftQuadrant;
                return true;
            }
            if let Some(prev) = prev {
                let before = orientation * side(&prev.y);
                let after = orientation * side(&n.y);
                if before < 0.0 && after >= 0.0 && ahead(&n.y) {
                    crossing = Some((*prev, *n));
                    return true;
                }
            }
            false
        })?;
    let mut return_gap = None;
    let terminated = match (finish, crossing) {
        (Finish::Stopped, Some((a, b))) => {
            let tc = numerics::bisect(|t| side(&dopri5::hermite(&a, &b, t)), a.t, b.t, 0.0).unwrap_or(b.t);
            let y = dopri5::hermite(&a, &b, tc);
            let f = field(*params);
            nodes.pop();
            if tc > a.t {
                nodes.push(Node { t: tc, y, dy: f(tc, &y) });
            }
            let gap = PhasePoint::new(y[0], y[1]).dist(&start);
            return_gap = Some(gap);
            if gap < 1e-6 {
                Termination::ClosedOrbit
            } else {
                Termination::SectionReturn
            }
        }
        (Finish::Stopped, None) => reason,
        (Finish::End, _) => Termination::TimeLimit,
    };
    Ok(Orbit { params: *params, nodes, terminated, gauge: None, return_gap })
}

/// Times in `(t_start, t_end]` where `Lambda(t) - level` changes sign.
///
/// Each time is refined by bisection on the dense orbit until
/// `|Lambda(t) - level| < 1e-10 max(1, level)`.
pub fn level_crossings(orbit: &Orbit, level: f64) -> Vec<f64> {
    let profile = lambda_profile(orbit);
    let values = profile.samples();
    let ftol = 1e-10 * level.abs().max(1.0);
    let mut out = Vec::new();
    for w in values.windows(2) {
        let (t0, l0) = w[0];
        let (t1, l1) = w[1];
        let g0 = l0 - level;
        let g1 = l1 - level;
        if g0 == 0.0 {
            if out.last() != Some(&t0) {
                out.push(t0);
            }
            continue;
        }
        if g0.signum() != g1.signum() && g1 != 0.0 {
            if let Some(t) = numerics::bisect(|t| profile.eval(t) - level, t0, t1, ftol) {
                out.push(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_a() -> Params {
        Params::new(5, 1, 0.0, 3.0).unwrap()
    }
    fn set_b() -> Params {
        Params::new(12, 1, 0.0, 5.0).unwrap()
    }

    #[test]
    fn config_validation() {
        let p = set_a();
        let cfg = IntegratorConfig::for_params(&p);
        assert!(cfg.validate(&p).is_ok());
        assert!(IntegratorConfig { rel_tol: 1e-5, ..cfg }.validate(&p).is_err());
        assert!(IntegratorConfig { epsilon_launch: 1e-3, ..cfg }.validate(&p).is_err());
        assert!(IntegratorConfig { sink_radius: 0.0, ..cfg }.validate(&p).is_err());
        assert!(IntegratorConfig { max_steps: 0, ..cfg }.validate(&p).is_err());
    }

    #[test]
    fn spiral_orbit_reaches_sink() {
        let p = set_a();
        let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p)).unwrap();
        assert_eq!(orbit.terminated(), Termination::ReachedSink);
        assert!(orbit.last_point().dist(&PhasePoint::new(2.0, 1.0)) < 1e-6);
        assert!(orbit.samples().all(|(_, q)| q.x > 0.0 && q.y > 0.0));
        assert!(orbit.lambda_at(orbit.t_start()) < 1e-3);
        assert!((orbit.lambda_at(orbit.t_end()) - 2.0).abs() < 1e-4);
    }

    #[test]
    fn node_orbit_is_monotone() {
        let p = set_b();
        let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p)).unwrap();
        assert_eq!(orbit.terminated(), Termination::ReachedSink);
        assert!(orbit.last_point().dist(&PhasePoint::new(9.5, 0.5)) < 1e-6);
        let pts: Vec<PhasePoint> = orbit.samples().map(|s| s.1).collect();
        for w in pts.windows(2) {
            assert!(w[1].y > w[0].y, "y not increasing");
            assert!(w[1].x < w[0].x, "x not decreasing");
        }
        assert!((orbit.lambda_at(orbit.t_end()) - 4.75).abs() < 1e-4);
    }

    #[test]
    fn launch_leaves_along_gamma_s() {
        let p = set_b();
        let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p)).unwrap();
        let p0 = orbit.first_point();
        let slope = p0.y / (p0.x - 12.0);
        assert!((slope - phase::launch_slope(&p)).abs() < 1e-6);
    }

    #[test]
    fn unstable_regime_is_refused() {
        let p = Params::new(5, 1, 0.0, 2.0).unwrap();
        let r = integrate_orbit(&p, &IntegratorConfig::for_params(&p));
        assert!(matches!(r, Err(Error::Regime(_))));
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let p = set_a();
        let cfg = IntegratorConfig { max_steps: 5, ..IntegratorConfig::for_params(&p) };
        assert!(matches!(integrate_orbit(&p, &cfg), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn short_window_hits_time_limit() {
        let p = set_a();
        let cfg = IntegratorConfig::for_params(&p).with_t_max(3.0);
        let orbit = integrate_orbit(&p, &cfg).unwrap();
        assert_eq!(orbit.terminated(), Termination::TimeLimit);
        assert_eq!(orbit.t_end(), 3.0);
    }

    #[test]
    fn center_launch_follows_invariant_line() {
        let p = set_a().at_q_star();
        let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p)).unwrap();
        assert_eq!(orbit.terminated(), Termination::ReachedSaddle);
        let worst = orbit.samples().map(|(_, q)| phase::invariant_line_residual(q, &p).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn center_cycle_closes() {
        let p = set_a().at_q_star();
        let c = phase::interior_point(&p).unwrap();
        let orbit = integrate_cycle(&p, PhasePoint::new(c.x + 0.5, c.y), &IntegratorConfig::for_params(&p)).unwrap();
        assert_eq!(orbit.terminated(), Termination::ClosedOrbit);
        assert!(orbit.return_gap().unwrap() < 1e-6);
        // a spiral does not close
        let p = set_a();
        let c = phase::interior_point(&p).unwrap();
        let orbit = integrate_cycle(&p, PhasePoint::new(c.x + 0.5, c.y), &IntegratorConfig::for_params(&p)).unwrap();
        assert_eq!(orbit.terminated(), Termination::SectionReturn);
    }

    #[test]
    fn crossings() {
        let b = set_b();
        let ob = integrate_orbit(&b, &IntegratorConfig::for_params(&b)).unwrap();
        let c = level_crossings(&ob, 2.0);
        assert_eq!(c.len(), 1);
        assert!((ob.lambda_at(c[0]) - 2.0).abs() <= 2e-10);
        assert!(level_crossings(&ob, 5.0).is_empty());

        let a = set_a();
        let oa = integrate_orbit(&a, &IntegratorConfig::for_params(&a)).unwrap();
        let c = level_crossings(&oa, 2.0);
        assert!(c.len() >= 3);
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        for t in c {
            assert!((oa.lambda_at(t) - 2.0).abs() <= 2e-10, "{t}");
        }
    }
}
