//! The demo's three operations as plain Rust, so they test natively.

use ssps_core::dde::{simulate, uniform_grid, HistorySegment, SimulationConfig, SolutionWithDerivative};
use ssps_core::hamiltonian::{integrate_orbit, period_by_quadrature, Nonlinearity};
use ssps_core::solutions::{exp_ssps, sine_ssps, ExpSsps, SineSsps};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Sine,
    Exp,
}

impl Model {
    pub fn parse(name: &str) -> Result<Model, String> {
        match name {
            "sine" => Ok(Model::Sine),
            "exp" => Ok(Model::Exp),
            other => Err(format!("unknown model {other:?} (expected \"sine\" or \"exp\")")),
        }
    }
}

enum Closed {
    Sine(SineSsps),
    Exp(ExpSsps),
}

impl Closed {
    fn build(model: Model, r: f64) -> Result<Closed, String> {
        match model {
            Model::Sine => sine_ssps(r).map(Closed::Sine),
            Model::Exp => exp_ssps(r).map(Closed::Exp),
        }
        .map_err(|e| e.to_string())
    }

    fn sol(&self) -> &dyn SolutionWithDerivative {
        match self {
            Closed::Sine(s) => s,
            Closed::Exp(e) => e,
        }
    }

    fn f(&self) -> Nonlinearity {
        match self {
            Closed::Sine(s) => Nonlinearity::SineR { r: s.r() },
            Closed::Exp(e) => Nonlinearity::ExpM1R { r: e.r },
        }
    }
}

/// One period of the closed form.
#[derive(Debug, Clone)]
pub struct Curve {
    pub modulus: f64,
    pub offset_c: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub dx: Vec<f64>,
}

pub fn sample_curve(model: Model, r: f64, samples: usize) -> Result<Curve, String> {
    let closed = Closed::build(model, r)?;
    let (modulus, offset_c) = match &closed {
        Closed::Sine(s) => (s.modulus().k(), 0.0),
        Closed::Exp(e) => (e.modulus.k(), e.c),
    };
    let t: Vec<f64> = uniform_grid(0.0, 2.0, samples.max(2)).collect();
    let sol = closed.sol();
    Ok(Curve {
        modulus,
        x: t.iter().map(|&t| sol.x(t)).collect(),
        dx: t.iter().map(|&t| sol.dx(t)).collect(),
        offset_c,
        t,
    })
}

/// Closed orbits of `x' = -y, y' = 2f(x)` drawn in `(x, y)`, with the
/// period-2 one marked. For the exponential model the planar system is the
/// `sinh` one in `w = x - c/2`; orbits are shifted back so both views share
/// the `x` axis.
#[derive(Debug, Clone)]
pub struct Portrait {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Start index of each orbit in `x`/`y`; the last entry is the total length.
    pub starts: Vec<usize>,
    pub periods: Vec<f64>,
    /// Which orbit is the period-2 one.
    pub highlight: usize,
}

const POINTS_PER_ORBIT: usize = 400;

pub fn phase_portrait(model: Model, r: f64, orbits: usize) -> Result<Portrait, String> {
    let closed = Closed::build(model, r)?;
    let (f, shift, a_star, a_max) = match &closed {
        Closed::Sine(s) => (
            Nonlinearity::SineR { r },
            0.0,
            s.amplitude(),
            // Stay inside the separatrix at x = π.
            0.97 * std::f64::consts::PI,
        ),
        Closed::Exp(e) => {
            let f = Nonlinearity::sinh(e.gamma).map_err(|e| e.to_string())?;
            (f, 0.5 * e.c, e.amplitude(), 1.5 * e.amplitude())
        }
    };
    let orbits = orbits.clamp(1, 40);
    let mut amps: Vec<f64> = (1..=orbits).map(|i| a_max * i as f64 / orbits as f64).collect();
    amps.push(a_star);
    amps.sort_by(f64::total_cmp);
    let highlight = amps.iter().position(|&a| a == a_star).unwrap_or(0);

    let mut out = Portrait {
        x: Vec::new(),
        y: Vec::new(),
        starts: Vec::new(),
        periods: Vec::new(),
        highlight,
    };
    for a in amps {
        let period = period_by_quadrature(&f, a).map_err(|e| e.to_string())?;
        let dt = period / POINTS_PER_ORBIT as f64;
        let orbit = integrate_orbit(&f, a, dt, POINTS_PER_ORBIT).map_err(|e| e.to_string())?;
        out.starts.push(out.x.len());
        out.periods.push(period);
        for (_, p) in orbit.samples() {
            out.x.push(p.x + shift);
            out.y.push(p.y);
        }
    }
    out.starts.push(out.x.len());
    Ok(out)
}

/// A run of the delay equation from the closed form plus a bump on `[-1, 0]`.
#[derive(Debug, Clone)]
pub struct Run {
    pub t: Vec<f64>,
    pub x_sim: Vec<f64>,
    pub x_closed: Vec<f64>,
    /// Set when the run stopped early (divergence or leaving the domain).
    pub stopped: Option<String>,
}

pub fn perturbed_run(model: Model, r: f64, eps: f64, horizon: f64, intervals: usize) -> Result<Run, String> {
    let closed = Closed::build(model, r)?;
    let sol = closed.sol();
    let f = closed.f();
    let n = intervals.clamp(8, 2000);
    let horizon = horizon.clamp(1.0, 40.0);
    let bump = |t: f64| eps * (std::f64::consts::PI * t).sin();
    let history = HistorySegment::from_fn(n, |t| sol.x(t) + bump(t)).map_err(|e| e.to_string())?;
    let config = SimulationConfig::new(horizon, 1.0 / n as f64);
    match simulate(&f, &history, &config) {
        Ok(traj) => {
            let (t, x_sim): (Vec<f64>, Vec<f64>) = traj.all().unzip();
            let x_closed = t.iter().map(|&t| sol.x(t)).collect();
            Ok(Run { t, x_sim, x_closed, stopped: None })
        }
        Err(e) => Ok(Run {
            t: Vec::new(),
            x_sim: Vec::new(),
            x_closed: Vec::new(),
            stopped: Some(e.to_string()),
        }),
    }
}
