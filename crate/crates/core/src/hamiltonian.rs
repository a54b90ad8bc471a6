//! Planar Hamiltonian reduction `x' = -y`, `y' = 2 f(x)` with energy
//! `H = y² + 4 F(x)`, `F(x) = ∫₀ˣ f`.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Feedback nonlinearity `f` of the delay equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Nonlinearity {
    /// `r sin x` on `(-π, π)`.
    SineR { r: f64 },
    /// `r (eˣ - 1)` on the real line. Not odd.
    ExpM1R { r: f64 },
    /// `γ sinh x`, the symmetrised exponential model after shifting by `c/2`.
    SinhGamma { gamma: f64 },
    /// `x`.
    LinearUnit,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Nonlinearity {
    pub fn sine(r: f64) -> Result<Self> {
        positive("r", r).map(|r| Nonlinearity::SineR { r })
    }

    pub fn exp_m1(r: f64) -> Result<Self> {
        positive("r", r).map(|r| Nonlinearity::ExpM1R { r })
    }

    pub fn sinh(gamma: f64) -> Result<Self> {
        positive("gamma", gamma).map(|gamma| Nonlinearity::SinhGamma { gamma })
    }

    /// Open domain interval `D`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Nonlinearity::SineR { .. } => (-PI, PI),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x > lo && x < hi
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(Error::domain(format!("x = {x} outside ({lo}, {hi})")))
        }
    }

    /// Satisfies `f(-x) = -f(x)` and `x f(x) > 0` on its domain.
    pub fn is_odd(&self) -> bool {
        !matches!(self, Nonlinearity::ExpM1R { .. })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Nonlinearity::SineR { r } => r * x.sin(),
            Nonlinearity::ExpM1R { r } => r * x.exp_m1(),
            Nonlinearity::SinhGamma { gamma } => gamma * x.sinh(),
            Nonlinearity::LinearUnit => x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Nonlinearity::SineR { r } => r * x.cos(),
            Nonlinearity::ExpM1R { r } => r * x.exp(),
            Nonlinearity::SinhGamma { gamma } => gamma * x.cosh(),
            Nonlinearity::LinearUnit => 1.0,
        }
    }

    /// `F(x) = ∫₀ˣ f`.
    pub fn potential(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            Nonlinearity::SineR { r } => 2.0 * r * (0.5 * x).sin().powi(2),
            Nonlinearity::ExpM1R { r } => r * (x.exp_m1() - x),
            Nonlinearity::SinhGamma { gamma } => 2.0 * gamma * (0.5 * x).sinh().powi(2),
            Nonlinearity::LinearUnit => 0.5 * x * x,
        })
    }

    /// `F(hi) - F(lo)` in product form, given `gap = hi - lo` computed by
    /// the caller without cancellation.
    fn potential_drop(&self, hi: f64, lo: f64, gap: f64) -> f64 {
        let mean = 0.5 * (hi + lo);
        match *self {
            Nonlinearity::SineR { r } => 2.0 * r * mean.sin() * (0.5 * gap).sin(),
            Nonlinearity::ExpM1R { r } => r * (lo.exp() * gap.exp_m1() - gap),
            Nonlinearity::SinhGamma { gamma } => 2.0 * gamma * mean.sinh() * (0.5 * gap).sinh(),
            Nonlinearity::LinearUnit => mean * gap,
        }
    }
}

/// `F(x)` for `f`.
pub fn potential_f(f: &Nonlinearity, x: f64) -> Result<f64> {
    f.potential(x)
}

/// Point `(x, y)` of the phase plane; `y = -x'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        PhasePoint { x, y }
    }
}

/// `H(x, y) = y² + 4 F(x)`.
pub fn hamiltonian_h(f: &Nonlinearity, p: PhasePoint) -> Result<f64> {
    Ok(p.y * p.y + 4.0 * f.potential(p.x)?)
}

/// Equally spaced RK4 trajectory started from `(a, 0)`.
#[derive(Debug, Clone)]
pub struct Orbit {
    samples: Vec<(f64, PhasePoint)>,
    dt: f64,
    f: Nonlinearity,
    amplitude: f64,
    period: Option<f64>,
    energy_drift: f64,
}

impl Orbit {
    pub fn samples(&self) -> &[(f64, PhasePoint)] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.f
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// First return time to `y = 0` on the starting side, if the run was long
    /// enough to see it.
    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// `max |H(t) - H(0)| / |H(0)|` over the samples.
    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }

    /// `energy_drift / dt⁴`, the constant of the fourth-order drift bound.
    pub fn drift_constant(&self) -> f64 {
        self.energy_drift / self.dt.powi(4)
    }

    /// Cubic Hermite interpolation using the vector field as the slope.
    pub fn interpolate(&self, t: f64) -> Option<PhasePoint> {
        let last = self.samples.len().checked_sub(1)?;
        let pos = t / self.dt;
        if !(0.0..=last as f64).contains(&pos) {
            return None;
        }
        let i = (pos.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return Some(self.samples[0].1);
        }
        let s = pos - i as f64;
        let p0 = self.samples[i].1;
        let p1 = self.samples[i + 1].1;
        let (dx0, dy0) = (-p0.y, 2.0 * self.f.eval(p0.x));
        let (dx1, dy1) = (-p1.y, 2.0 * self.f.eval(p1.x));
        Some(PhasePoint {
            x: hermite(p0.x, p1.x, dx0 * self.dt, dx1 * self.dt, s),
            y: hermite(p0.y, p1.y, dy0 * self.dt, dy1 * self.dt, s),
        })
    }
}

fn hermite(p0: f64, p1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * m1
}

#[inline]
fn field(f: &Nonlinearity, p: PhasePoint) -> (f64, f64) {
    (-p.y, 2.0 * f.eval(p.x))
}

/// Increment of one classical RK4 step of size `h`.
fn rk4_increment(f: &Nonlinearity, p: PhasePoint, h: f64) -> (f64, f64) {
    let k1 = field(f, p);
    let k2 = field(f, PhasePoint::new(p.x + 0.5 * h * k1.0, p.y + 0.5 * h * k1.1));
    let k3 = field(f, PhasePoint::new(p.x + 0.5 * h * k2.0, p.y + 0.5 * h * k2.1));
    let k4 = field(f, PhasePoint::new(p.x + h * k3.0, p.y + h * k3.1));
    (
        h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

fn rk4_step(f: &Nonlinearity, p: PhasePoint, h: f64) -> PhasePoint {
    let (dx, dy) = rk4_increment(f, p, h);
    PhasePoint::new(p.x + dx, p.y + dy)
}

/// Kahan-compensated accumulator for the state.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn new(v: f64) -> Self {
        Compensated { sum: v, carry: 0.0 }
    }

    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Integrates `x' = -y`, `y' = 2 f(x)` from `(a, 0)` with `steps` RK4 steps.
pub fn integrate_orbit(f: &Nonlinearity, a: f64, dt: f64, steps: usize) -> Result<Orbit> {
    f.check_domain(a)?;
    if a == 0.0 {
        return Err(Error::invalid("initial amplitude must be non-zero"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let start = PhasePoint::new(a, 0.0);
    let h0 = hamiltonian_h(f, start)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, start));
    let (mut x, mut y) = (Compensated::new(a), Compensated::new(0.0));
    let mut drift = 0.0_f64;
    let mut period = None;
    let side = a.signum();

    for i in 0..steps {
        let p = PhasePoint::new(x.sum, y.sum);
        let (dx, dy) = rk4_increment(f, p, dt);
        x.add(dx);
        y.add(dy);
        let next = PhasePoint::new(x.sum, y.sum);
        if !f.contains(next.x) || !next.y.is_finite() {
            return Err(Error::domain(format!(
                "trajectory left the domain at t = {}",
                (i + 1) as f64 * dt
            )));
        }
        let t = (i + 1) as f64 * dt;
        drift = drift.max((hamiltonian_h(f, next)? - h0).abs() / h0.abs());
        if period.is_none() && next.x * side > 0.0 && p.y * side < 0.0 && next.y * side >= 0.0 {
            period = Some(i as f64 * dt + locate_crossing(f, p, dt));
        }
        samples.push((t, next));
    }

    Ok(Orbit {
        samples,
        dt,
        f: *f,
        amplitude: a,
        period,
        energy_drift: drift,
    })
}

/// Sub-step `τ ∈ [0, dt]` at which `y` changes sign, by bisection.
fn locate_crossing(f: &Nonlinearity, p: PhasePoint, dt: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, dt);
    let sign_lo = p.y.signum();
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let y = rk4_step(f, p, mid).y;
        if y.signum() == sign_lo && y != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const PERIOD_QUAD_ORDER: usize = 64;

/// Period of the orbit through `(a, 0)` from `T = 2 ∫₀ᵃ dx / √(F(a) - F(x))`.
///
/// Uses `x = a sin θ`, which turns the endpoint singularity into a smooth
/// integrand on `[0, π/2]`.
pub fn period_by_quadrature(f: &Nonlinearity, a: f64) -> Result<f64> {
    if !f.is_odd() {
        return Err(Error::Oddness(
            "the period integral assumes a symmetric potential well".into(),
        ));
    }
    f.check_domain(a)?;
    if !(a > 0.0) {
        return Err(Error::domain(format!("amplitude must be positive, got {a}")));
    }
    let gl = GaussLegendre::new(PERIOD_QUAD_ORDER)?;
    let integral = gl.integrate(0.0, FRAC_PI_2, |theta| {
        let (s, c) = theta.sin_cos();
        let x = a * s;
        let gap = a * c * c / (1.0 + s);
        a * c / f.potential_drop(a, x, gap).sqrt()
    });
    Ok(2.0 * integral)
}

/// Symmetry defects of an orbit started at `(a, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub period: Option<f64>,
    /// `sup |x(t) - x(T - t)|`.
    pub evenness: f64,
    /// `sup |y(t) + y(T - t)|`.
    pub y_oddness: f64,
    /// `sup |x(T/4 + t) + x(T/4 - t)|`.
    pub quarter_oddness: f64,
    /// ODE residuals of `(-x(t), -y(t))`, `(x(-t), -y(-t))`, `(-x(-t), y(-t))`.
    pub reflections: [f64; 3],
}

impl SymmetryReport {
    pub fn max_defect(&self) -> f64 {
        self.reflections
            .iter()
            .copied()
            .fold(self.evenness.max(self.y_oddness).max(self.quarter_oddness), f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.period.is_some() && self.max_defect() <= tol
    }
}

/// Measures the reflection symmetries of `orbit`. An orbit shorter than one
/// period reports infinite defects.
pub fn check_orbit_symmetries(orbit: &Orbit) -> SymmetryReport {
    let failed = SymmetryReport {
        period: orbit.period,
        evenness: f64::INFINITY,
        y_oddness: f64::INFINITY,
        quarter_oddness: f64::INFINITY,
        reflections: [f64::INFINITY; 3],
    };
    let Some(period) = orbit.period else {
        return failed;
    };
    let samples = orbit.samples();
    let n_period = samples.partition_point(|(t, _)| *t <= period);
    if n_period < 5 {
        return failed;
    }

    let mut evenness = 0.0_f64;
    let mut y_oddness = 0.0_f64;
    let mut quarter_oddness = 0.0_f64;
    let quarter = 0.25 * period;
    for &(t, p) in &samples[..n_period] {
        if let Some(q) = orbit.interpolate(period - t) {
            evenness = evenness.max((p.x - q.x).abs());
            y_oddness = y_oddness.max((p.y + q.y).abs());
        }
        if t <= quarter {
            if let (Some(u), Some(v)) = (orbit.interpolate(quarter + t), orbit.interpolate(quarter - t))
            {
                quarter_oddness = quarter_oddness.max((u.x + v.x).abs());
            }
        }
    }

    let f = orbit.nonlinearity();
    let dt = orbit.dt();
    let xs: Vec<f64> = samples.iter().map(|(_, p)| p.x).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, p)| p.y).collect();
    let neg = |v: &[f64]| v.iter().map(|z| -z).collect::<Vec<_>>();
    let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
    let reflected = [
        (neg(&xs), neg(&ys)),
        (rev(&xs), neg(&rev(&ys))),
        (neg(&rev(&xs)), rev(&ys)),
    ];
    let mut reflections = [0.0; 3];
    for (slot, (rx, ry)) in reflections.iter_mut().zip(&reflected) {
        *slot = ode_defect(&f, rx, ry, dt);
    }

    SymmetryReport {
        period: Some(period),
        evenness,
        y_oddness,
        quarter_oddness,
        reflections,
    }
}

/// `sup max(|X' + Y|, |Y' - 2 f(X)|)` with fourth-order central differences.
fn ode_defect(f: &Nonlinearity, xs: &[f64], ys: &[f64], dt: f64) -> f64 {
    let d = |v: &[f64], i: usize| {
        (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * dt)
    };
    (2..xs.len().saturating_sub(2))
        .map(|i| {
            let ex = (d(xs, i) + ys[i]).abs();
            let ey = (d(ys, i) - 2.0 * f.eval(xs[i])).abs();
            ex.max(ey)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn potential_closed_forms() {
        assert_eq!(Nonlinearity::LinearUnit.potential(2.0).unwrap(), 2.0);
        assert_eq!(Nonlinearity::sine(1.0).unwrap().potential(0.0).unwrap(), 0.0);
        let f = Nonlinearity::exp_m1(3.0).unwrap();
        let exact = 3.0 * (std::f64::consts::E - 2.0);
        assert!((f.potential(1.0).unwrap() - exact).abs() < 1e-14);
        // Independent route: quadrature of f itself.
        let gl = GaussLegendre::new(16).unwrap();
        for f in [
            Nonlinearity::sine(2.5).unwrap(),
            Nonlinearity::exp_m1(3.0).unwrap(),
            Nonlinearity::sinh(0.7).unwrap(),
            Nonlinearity::LinearUnit,
        ] {
            let q = gl.integrate(0.0, 1.3, |s| f.eval(s));
            assert!((f.potential(1.3).unwrap() - q).abs() < 1e-13, "{f:?}");
        }
    }

    #[test]
    fn potential_domain_error() {
        let f = Nonlinearity::sine(1.0).unwrap();
        assert!(matches!(f.potential(3.5), Err(Error::Domain(_))));
        assert!(matches!(f.potential(-PI), Err(Error::Domain(_))));
        assert!(Nonlinearity::sine(-1.0).is_err());
    }

    #[test]
    fn hamiltonian_values() {
        let origin = PhasePoint::new(0.0, 0.0);
        for f in [Nonlinearity::sine(3.0).unwrap(), Nonlinearity::LinearUnit] {
            assert_eq!(hamiltonian_h(&f, origin).unwrap(), 0.0);
        }
        assert_eq!(
            hamiltonian_h(&Nonlinearity::LinearUnit, PhasePoint::new(1.0, 0.0)).unwrap(),
            2.0
        );
        let f = Nonlinearity::sine(10.0).unwrap();
        let h = hamiltonian_h(&f, PhasePoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert!((h - 40.0).abs() < 1e-13);
        let a = 1.1;
        let h = hamiltonian_h(&f, PhasePoint::new(a, 0.0)).unwrap();
        assert!((h - 8.0 * 10.0 * (0.5 * a).sin().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn condition_h_holds_for_odd_kinds() {
        for f in [
            Nonlinearity::sine(2.0).unwrap(),
            Nonlinearity::sinh(1.5).unwrap(),
            Nonlinearity::LinearUnit,
        ] {
            assert!(f.is_odd());
            for i in 1..60 {
                let x = -3.1 + 0.105 * i as f64;
                if x.abs() < 1e-12 {
                    continue;
                }
                assert_eq!(f.eval(-x), -f.eval(x));
                assert!(x * f.eval(x) > 0.0);
            }
        }
        assert!(!Nonlinearity::exp_m1(1.0).unwrap().is_odd());
    }

    #[test]
    fn lipschitz_slope_bound_on_compact_grid() {
        for f in [
            Nonlinearity::sine(4.0).unwrap(),
            Nonlinearity::exp_m1(2.0).unwrap(),
            Nonlinearity::sinh(1.0).unwrap(),
        ] {
            let bound = (0..=200)
                .map(|i| f.derivative(-2.0 + 0.02 * i as f64).abs())
                .fold(0.0, f64::max);
            for i in 0..200 {
                let (x0, x1) = (-2.0 + 0.02 * i as f64, -2.0 + 0.02 * (i + 1) as f64);
                let slope = ((f.eval(x1) - f.eval(x0)) / (x1 - x0)).abs();
                assert!(slope <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn harmonic_orbit_matches_cosine() {
        let orbit = integrate_orbit(&Nonlinearity::LinearUnit, 1.0, 1e-4, 100_000).unwrap();
        let w = SQRT_2;
        for &(t, p) in orbit.samples().iter().step_by(997) {
            assert!((p.x - (w * t).cos()).abs() < 1e-8, "x at {t}");
            assert!((p.y - w * (w * t).sin()).abs() < 1e-8, "y at {t}");
        }
        let period = orbit.period().unwrap();
        assert!((period - PI * SQRT_2).abs() < 1e-10, "{period}");
    }

    #[test]
    fn small_amplitude_period_is_linearised() {
        for f in [Nonlinearity::sine(10.0).unwrap(), Nonlinearity::sinh(3.0).unwrap()] {
            let orbit = integrate_orbit(&f, 1e-4, 1e-4, 30_000).unwrap();
            let linear = 2.0 * PI / (2.0 * f.derivative(0.0)).sqrt();
            assert!((orbit.period().unwrap() - linear).abs() < 1e-6);
        }
    }

    #[test]
    fn harmonic_period_by_quadrature_is_isochronous() {
        for &a in &[1e-3, 0.1, 1.0, 7.0, 50.0] {
            let t = period_by_quadrature(&Nonlinearity::LinearUnit, a).unwrap();
            assert!((t - PI * SQRT_2).abs() < 1e-10, "a={a}");
        }
    }

    #[test]
    fn sine_period_increases_with_amplitude() {
        let f = Nonlinearity::sine(10.0).unwrap();
        let periods: Vec<f64> = (1..60)
            .map(|i| period_by_quadrature(&f, i as f64 * PI / 60.0).unwrap())
            .collect();
        assert!(periods.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn period_by_quadrature_rejects_exp_and_bad_amplitude() {
        let f = Nonlinearity::exp_m1(2.0).unwrap();
        assert!(matches!(period_by_quadrature(&f, 1.0), Err(Error::Oddness(_))));
        let s = Nonlinearity::sine(2.0).unwrap();
        assert!(period_by_quadrature(&s, 0.0).is_err());
        assert!(period_by_quadrature(&s, 4.0).is_err());
    }

    #[test]
    fn integrate_orbit_argument_checks() {
        let f = Nonlinearity::sine(1.0).unwrap();
        assert!(integrate_orbit(&f, 0.0, 1e-3, 10).is_err());
        assert!(integrate_orbit(&f, 1.0, 0.0, 10).is_err());
        assert!(integrate_orbit(&f, 4.0, 1e-3, 10).is_err());
    }

    #[test]
    fn harmonic_symmetries_and_negative_control() {
        let orbit = integrate_orbit(&Nonlinearity::LinearUnit, 1.0, 1e-3, 6000).unwrap();
        let report = check_orbit_symmetries(&orbit);
        assert!(report.passes(1e-8), "{report:?}");

        let mut broken = orbit.clone();
        broken.samples[1500].1.x += 1e-3;
        let report = check_orbit_symmetries(&broken);
        assert!(!report.passes(1e-8));
        assert!(report.evenness > 1e-4);
    }

    #[test]
    fn short_orbit_reports_failure() {
        let orbit = integrate_orbit(&Nonlinearity::LinearUnit, 1.0, 1e-3, 100).unwrap();
        assert!(orbit.period().is_none());
        assert!(!check_orbit_symmetries(&orbit).passes(1.0));
    }
}
