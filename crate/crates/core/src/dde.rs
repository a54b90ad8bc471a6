//! The distributed delay equation `x'(t) = -∫₀¹ f(x(t - s)) ds`.
//!
//! Residuals and symmetry checks for candidate solutions, the `(2n-1)`
//! time-rescaled family, a method-of-steps simulator, and the equivalent
//! formulation `v'(t) = -f(∫₀¹ v(t - s) ds)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::Nonlinearity;
use crate::quadrature::{simpson_samples, GaussLegendre};

/// A function of time together with its exact derivative.
pub trait SolutionWithDerivative {
    fn x(&self, t: f64) -> f64;
    fn dx(&self, t: f64) -> f64;
    fn declared_period(&self) -> f64;

    /// Number of equal panels the memory window `[t - 1, t]` should be split
    /// into for quadrature. Rescaled solutions oscillate faster and need more.
    fn memory_panels(&self) -> usize {
        1
    }
}

impl<S: SolutionWithDerivative + ?Sized> SolutionWithDerivative for &S {
    fn x(&self, t: f64) -> f64 {
        (**self).x(t)
    }
    fn dx(&self, t: f64) -> f64 {
        (**self).dx(t)
    }
    fn declared_period(&self) -> f64 {
        (**self).declared_period()
    }
    fn memory_panels(&self) -> usize {
        (**self).memory_panels()
    }
}

impl<S: SolutionWithDerivative + ?Sized> SolutionWithDerivative for Box<S> {
    fn x(&self, t: f64) -> f64 {
        (**self).x(t)
    }
    fn dx(&self, t: f64) -> f64 {
        (**self).dx(t)
    }
    fn declared_period(&self) -> f64 {
        (**self).declared_period()
    }
    fn memory_panels(&self) -> usize {
        (**self).memory_panels()
    }
}

/// Solution given by a pair of closures.
pub struct FnSolution<X, D> {
    x: X,
    dx: D,
    period: f64,
}

impl<X: Fn(f64) -> f64, D: Fn(f64) -> f64> FnSolution<X, D> {
    pub fn new(x: X, dx: D, period: f64) -> Self {
        FnSolution { x, dx, period }
    }
}

impl<X: Fn(f64) -> f64, D: Fn(f64) -> f64> SolutionWithDerivative for FnSolution<X, D> {
    fn x(&self, t: f64) -> f64 {
        (self.x)(t)
    }
    fn dx(&self, t: f64) -> f64 {
        (self.dx)(t)
    }
    fn declared_period(&self) -> f64 {
        self.period
    }
}

/// The identically zero solution.
pub fn zero_solution() -> FnSolution<fn(f64) -> f64, fn(f64) -> f64> {
    FnSolution::new(|_| 0.0, |_| 0.0, 2.0)
}

pub const MIN_ORDER: usize = 8;
pub const MAX_ORDER: usize = 128;

/// Gauss-Legendre evaluation of the memory integral `∫₀¹ f(x(t - s)) ds`.
#[derive(Debug, Clone)]
pub struct DelayOperator {
    rule: GaussLegendre,
}

impl DelayOperator {
    pub fn new(order: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
            return Err(Error::invalid(format!(
                "quadrature order {order} outside {MIN_ORDER}..={MAX_ORDER}"
            )));
        }
        Ok(DelayOperator {
            rule: GaussLegendre::new(order)?,
        })
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn delay_integral<S: SolutionWithDerivative + ?Sized>(
        &self,
        sol: &S,
        f: &Nonlinearity,
        t: f64,
    ) -> Result<f64> {
        let panels = sol.memory_panels().max(1);
        let width = 1.0 / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = p as f64 * width;
            total += self.rule.try_integrate(lo, lo + width, |s| {
                let x = sol.x(t - s);
                f.check_domain(x)?;
                Ok(f.eval(x))
            })?;
        }
        Ok(total)
    }

    /// `x'(t) + ∫₀¹ f(x(t - s)) ds`.
    pub fn residual<S: SolutionWithDerivative + ?Sized>(
        &self,
        sol: &S,
        f: &Nonlinearity,
        t: f64,
    ) -> Result<f64> {
        self.scaled_residual(sol, f, t, 1.0)
    }

    /// `x'(t) + ρ ∫₀¹ f(x(t - s)) ds`.
    pub fn scaled_residual<S: SolutionWithDerivative + ?Sized>(
        &self,
        sol: &S,
        f: &Nonlinearity,
        t: f64,
        rho: f64,
    ) -> Result<f64> {
        Ok(sol.dx(t) + rho * self.delay_integral(sol, f, t)?)
    }
}

/// One-shot `∫₀¹ f(x(t - s)) ds` with an `order`-point rule.
pub fn delay_integral<S: SolutionWithDerivative + ?Sized>(
    sol: &S,
    f: &Nonlinearity,
    t: f64,
    order: usize,
) -> Result<f64> {
    DelayOperator::new(order)?.delay_integral(sol, f, t)
}

/// One-shot `x'(t) + ∫₀¹ f(x(t - s)) ds`.
pub fn residual<S: SolutionWithDerivative + ?Sized>(
    sol: &S,
    f: &Nonlinearity,
    t: f64,
    order: usize,
) -> Result<f64> {
    DelayOperator::new(order)?.residual(sol, f, t)
}

/// `grid_points` equally spaced times covering `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, grid_points: usize) -> impl Iterator<Item = f64> {
    let n = grid_points.max(2) - 1;
    (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64)
}

/// Pass thresholds for [`verify_ssps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub residual: f64,
    pub antisymmetry: f64,
    pub period: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            residual: tol,
            antisymmetry: tol,
            period: tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            antisymmetry: 1e-10,
            period: 1e-10,
        }
    }
}

/// Outcome of [`verify_ssps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `sup |x'(t) + ∫₀¹ f(x(t - s)) ds|`.
    pub residual_max: f64,
    /// `sup |x(t) + x(t - 1) - c|`, with `c = 0` demanded for odd `f`.
    pub antisymmetry_max: f64,
    /// `sup |x(t + P) - x(t)|` for the declared period `P`.
    pub period_defect_max: f64,
    /// Grid mean of `x(t) + x(t - 1)`.
    pub offset_c: f64,
    pub grid_points: usize,
    pub quad_order: usize,
    pub pass: bool,
}

/// Checks a claimed period-2 solution on `grid_points` times in `[0, 2]`.
///
/// A solution that leaves the domain of `f` gets an infinite residual
/// rather than an error.
pub fn verify_ssps<S: SolutionWithDerivative + ?Sized>(
    sol: &S,
    f: &Nonlinearity,
    grid_points: usize,
    order: usize,
    tol: Tolerances,
) -> Result<ResidualReport> {
    if grid_points < 2 {
        return Err(Error::invalid("verification grid needs at least two points"));
    }
    let op = DelayOperator::new(order)?;
    let period = sol.declared_period();
    let mut residual_max = 0.0_f64;
    let mut period_defect_max = 0.0_f64;
    let mut sums = Vec::with_capacity(grid_points);
    for t in uniform_grid(0.0, 2.0, grid_points) {
        let res = op.residual(sol, f, t).map(f64::abs).unwrap_or(f64::INFINITY);
        residual_max = residual_max.max(if res.is_nan() { f64::INFINITY } else { res });
        period_defect_max = period_defect_max.max((sol.x(t + period) - sol.x(t)).abs());
        sums.push(sol.x(t) + sol.x(t - 1.0));
    }
    let offset_c = sums.iter().sum::<f64>() / sums.len() as f64;
    let target = if f.is_odd() { 0.0 } else { offset_c };
    let antisymmetry_max = sums.iter().map(|s| (s - target).abs()).fold(0.0, f64::max);
    let pass = residual_max <= tol.residual
        && antisymmetry_max <= tol.antisymmetry
        && period_defect_max <= tol.period;
    Ok(ResidualReport {
        residual_max,
        antisymmetry_max,
        period_defect_max,
        offset_c,
        grid_points,
        quad_order: order,
        pass,
    })
}

/// The three equivalent characterisations of a period-2 solution, measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Location of the maximum of `x`, the centre of evenness.
    pub t0: f64,
    /// `sup |x(t0 + t) - x(t0 - t)|`.
    pub evenness_max: f64,
    /// `sup |x(t) + x(t - 1) - c|` with `c` the grid mean.
    pub antisymmetry_max: f64,
    pub offset_c: f64,
    /// `sup |x(t + 2) - x(t)|`.
    pub period_defect_max: f64,
}

impl EquivalenceReport {
    pub fn all_hold(&self, tol: f64) -> bool {
        self.evenness_max <= tol && self.antisymmetry_max <= tol && self.period_defect_max <= tol
    }

    pub fn none_hold(&self, tol: f64) -> bool {
        self.evenness_max > tol && self.antisymmetry_max > tol && self.period_defect_max > tol
    }
}

/// Measures evenness about the argmax, the constant sum `x(t) + x(t - 1)`,
/// and period 2 on a grid over `[0, 2]`.
pub fn equivalence_check<S: SolutionWithDerivative + ?Sized>(
    sol: &S,
    grid_points: usize,
) -> EquivalenceReport {
    let grid: Vec<f64> = uniform_grid(0.0, 2.0, grid_points).collect();
    let h = grid[1] - grid[0];
    let values: Vec<f64> = grid.iter().map(|&t| sol.x(t)).collect();
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    // Parabola through the neighbours of the discrete maximum.
    let ym = sol.x(grid[imax] - h);
    let y0 = values[imax];
    let yp = sol.x(grid[imax] + h);
    let curvature = ym - 2.0 * y0 + yp;
    let shift = if curvature != 0.0 {
        (0.5 * (ym - yp) / curvature).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let t0 = grid[imax] + shift * h;

    let mut evenness_max = 0.0_f64;
    let mut period_defect_max = 0.0_f64;
    let mut sums = Vec::with_capacity(grid.len());
    for &t in &grid {
        evenness_max = evenness_max.max((sol.x(t0 + t) - sol.x(t0 - t)).abs());
        period_defect_max = period_defect_max.max((sol.x(t + 2.0) - sol.x(t)).abs());
        sums.push(sol.x(t) + sol.x(t - 1.0));
    }
    let offset_c = sums.iter().sum::<f64>() / sums.len() as f64;
    let antisymmetry_max = sums.iter().map(|s| (s - offset_c).abs()).fold(0.0, f64::max);
    EquivalenceReport {
        t0,
        evenness_max,
        antisymmetry_max,
        offset_c,
        period_defect_max,
    }
}

/// `x((2n-1) t)` for a period-2 solution `x`.
#[derive(Debug, Clone)]
pub struct Rescaled<S> {
    inner: S,
    n: u32,
    factor: f64,
}

impl<S> Rescaled<S> {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `2n - 1`.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Multiplier `ρ = (2n - 1)²` of the equation this solves.
    pub fn multiplier(&self) -> f64 {
        self.factor * self.factor
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: SolutionWithDerivative> SolutionWithDerivative for Rescaled<S> {
    fn x(&self, t: f64) -> f64 {
        self.inner.x(self.factor * t)
    }
    fn dx(&self, t: f64) -> f64 {
        self.factor * self.inner.dx(self.factor * t)
    }
    fn declared_period(&self) -> f64 {
        self.inner.declared_period() / self.factor
    }
    fn memory_panels(&self) -> usize {
        self.inner.memory_panels() * (2 * self.n as usize - 1)
    }
}

/// Builds `xₙ(t) = x((2n-1) t)`, a solution of
/// `x'(t) = -(2n-1)² ∫₀¹ f(x(t - s)) ds`, and returns it with `ρ = (2n-1)²`.
pub fn rescaled_solution<S: SolutionWithDerivative>(sol: S, n: u32) -> Result<(Rescaled<S>, f64)> {
    if n < 1 {
        return Err(Error::domain("rescaling index n must be at least 1"));
    }
    let factor = (2 * n - 1) as f64;
    let r = Rescaled {
        inner: sol,
        n,
        factor,
    };
    let rho = r.multiplier();
    Ok((r, rho))
}

/// `|∫₀¹ f(x(αt - s)) ds - α ∫₀¹ f(x_n(t - s)) ds|` with `α = 2n - 1`.
pub fn telescoping_defect<S: SolutionWithDerivative>(
    sol: &S,
    f: &Nonlinearity,
    n: u32,
    t: f64,
    op: &DelayOperator,
) -> Result<f64> {
    let (scaled, _) = rescaled_solution(sol, n)?;
    let lhs = op.delay_integral(sol, f, scaled.factor() * t)?;
    let rhs = scaled.factor() * op.delay_integral(&scaled, f, t)?;
    Ok((lhs - rhs).abs())
}

/// Samples of `x` on `[-1, 0]` at spacing `1/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment {
    values: Vec<f64>,
}

pub const MIN_HISTORY_INTERVALS: usize = 8;

impl HistorySegment {
    /// `values[j]` is `x(-1 + j/N)` for `j = 0..=N`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_HISTORY_INTERVALS + 1 {
            return Err(Error::invalid(format!(
                "history needs at least {} samples on [-1, 0], got {}",
                MIN_HISTORY_INTERVALS + 1,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("history contains {bad}")));
        }
        Ok(HistorySegment { values })
    }

    pub fn from_fn(intervals: usize, x: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 1.0 / intervals as f64;
        Self::new((0..=intervals).map(|j| x(-1.0 + j as f64 * h)).collect())
    }

    pub fn zero(intervals: usize) -> Result<Self> {
        Self::from_fn(intervals, |_| 0.0)
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// C¹ piecewise-cubic interpolant (Hermite with fourth-order slopes).
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(-1.0..=0.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside the history [-1, 0]")));
        }
        let n = self.intervals();
        let pos = (t + 1.0) * n as f64;
        let j = (pos.floor() as usize).min(n - 1);
        Ok(hermite_on_grid(&self.values, j, pos - j as f64, self.step(), 0, n))
    }
}

/// Fourth-order finite-difference slope at node `j`, using only nodes in
/// `lo..=hi` (at least five of them).
fn grid_slope(v: &[f64], j: usize, h: f64, lo: usize, hi: usize) -> f64 {
    const LEFT: [[f64; 5]; 2] = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]];
    const RIGHT: [[f64; 5]; 2] = [[3.0, -16.0, 36.0, -48.0, 25.0], [-1.0, 6.0, -18.0, 10.0, 3.0]];
    let (base, w) = if j >= lo + 2 && j + 2 <= hi {
        (j - 2, [1.0, -8.0, 0.0, 8.0, -1.0])
    } else if j < lo + 2 {
        (lo, LEFT[j - lo])
    } else {
        (hi - 4, RIGHT[hi - j])
    };
    w.iter().zip(&v[base..base + 5]).map(|(c, x)| c * x).sum::<f64>() / (12.0 * h)
}

/// Cubic Hermite value at `j + s` on a uniform grid, slopes taken within
/// the smooth piece `lo..=hi` that contains the interval.
fn hermite_on_grid(v: &[f64], j: usize, s: f64, h: f64, lo: usize, hi: usize) -> f64 {
    let (p0, p1) = (v[j], v[j + 1]);
    let m0 = grid_slope(v, j, h, lo, hi) * h;
    let m1 = grid_slope(v, j + 1, h, lo, hi) * h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * m1
}

/// Settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub horizon: f64,
    pub step: f64,
    /// Runs abort with [`Error::Stability`] once `|x|` exceeds this.
    pub divergence_bound: f64,
}

impl SimulationConfig {
    pub fn new(horizon: f64, step: f64) -> Self {
        SimulationConfig {
            horizon,
            step,
            divergence_bound: 1e3,
        }
    }
}

/// Sampled simulation output on `[-1, horizon]` (history included).
#[derive(Debug, Clone)]
pub struct SimulatedTrajectory {
    step: f64,
    history_intervals: usize,
    values: Vec<f64>,
    memory_defect: f64,
}

impl SimulatedTrajectory {
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `(t, x)` for every node with `t ≥ 0`.
    pub fn forward(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values[self.history_intervals..]
            .iter()
            .enumerate()
            .map(move |(i, &x)| (i as f64 * self.step, x))
    }

    /// Every node including the history.
    pub fn all(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.history_intervals as f64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &x)| ((i as f64 - n) * self.step, x))
    }

    /// Largest gap between the carried memory integral and a fresh composite
    /// Simpson sum over the stored window.
    pub fn memory_defect(&self) -> f64 {
        self.memory_defect
    }

    /// `max |x_sim(t) - reference(t)|` over the forward nodes.
    pub fn max_error(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.forward()
            .map(|(t, x)| (x - reference(t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Method of steps with the default divergence bound.
pub fn simulate_method_of_steps(
    f: &Nonlinearity,
    history: &HistorySegment,
    horizon: f64,
    h: f64,
) -> Result<SimulatedTrajectory> {
    simulate(f, history, &SimulationConfig::new(horizon, h))
}

/// Integrates the delay equation forward from `history`.
///
/// The memory integral `I(t) = ∫_{t-1}^{t} f(x)` is initialised by composite
/// Simpson over the history and carried along with `x` as the pair
/// `x' = -I`, `I' = f(x(t)) - f(x(t - 1))`, advanced by classical RK4. The
/// delayed value at half steps comes from the cubic interpolant of the
/// stored past.
pub fn simulate(
    f: &Nonlinearity,
    history: &HistorySegment,
    config: &SimulationConfig,
) -> Result<SimulatedTrajectory> {
    let h = config.step;
    let n = history.intervals();
    if !(h.is_finite() && h > 0.0) || ((1.0 / h) - n as f64).abs() > 1e-9 * n as f64 {
        return Err(Error::invalid(format!(
            "step {h} does not match the history spacing 1/{n}"
        )));
    }
    let h = history.step();
    if !(config.horizon >= 1.0) {
        return Err(Error::invalid(format!(
            "horizon must be at least 1, got {}",
            config.horizon
        )));
    }
    let steps = (config.horizon / h - 1e-9).ceil() as usize;
    let bound = config.divergence_bound;

    let mut xs = Vec::with_capacity(n + steps + 1);
    let mut fx = Vec::with_capacity(n + steps + 1);
    for (j, &x) in history.values().iter().enumerate() {
        let t = -1.0 + j as f64 * h;
        guard(f, x, t, bound)?;
        xs.push(x);
        fx.push(f.eval(x));
    }
    let mut memory = simpson_samples(&fx, h)?;
    let mut memory_defect = 0.0_f64;

    for step in 0..steps {
        // Index of t_step is n + step; index of t_step - 1 is step.
        let x0 = xs[n + step];
        let delayed_start = fx[step];
        // x' generally jumps where the history meets the forward solution.
        let (lo, hi) = if step < n { (0, n) } else { (n, xs.len() - 1) };
        let delayed_mid = f.eval(hermite_on_grid(&xs, step, 0.5, h, lo, hi));
        let delayed_end = fx[step + 1];

        let k1x = -memory;
        let k1i = f.eval(x0) - delayed_start;
        let k2x = -(memory + 0.5 * h * k1i);
        let k2i = f.eval(x0 + 0.5 * h * k1x) - delayed_mid;
        let k3x = -(memory + 0.5 * h * k2i);
        let k3i = f.eval(x0 + 0.5 * h * k2x) - delayed_mid;
        let k4x = -(memory + h * k3i);
        let k4i = f.eval(x0 + h * k3x) - delayed_end;

        let x1 = x0 + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        memory += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
        let t1 = (step + 1) as f64 * h;
        guard(f, x1, t1, bound)?;
        xs.push(x1);
        fx.push(f.eval(x1));

        let window = &fx[step + 1..=n + step + 1];
        memory_defect = memory_defect.max((simpson_samples(window, h)? - memory).abs());
    }

    Ok(SimulatedTrajectory {
        step: h,
        history_intervals: n,
        values: xs,
        memory_defect,
    })
}

fn guard(f: &Nonlinearity, x: f64, t: f64, bound: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > bound {
        return Err(Error::Stability {
            t,
            value: x.abs(),
            bound,
        });
    }
    if !f.contains(x) {
        return Err(Error::domain(format!("state x = {x} left the domain at t = {t}")));
    }
    Ok(())
}

/// `v` with `v' = -f(x)` and `x(0) = ∫₀¹ v(-s) ds`.
pub struct VFunction<'a, S: ?Sized> {
    sol: &'a S,
    f: Nonlinearity,
    rule: GaussLegendre,
    v0: f64,
}

/// Panels per unit length for the cumulative integral `∫₀ᵗ f(x)`.
const V_PANELS_PER_UNIT: f64 = 4.0;

impl<'a, S: SolutionWithDerivative + ?Sized> VFunction<'a, S> {
    pub fn new(sol: &'a S, f: Nonlinearity, order: usize) -> Result<Self> {
        let rule = DelayOperator::new(order)?.rule;
        let mut v = VFunction {
            sol,
            f,
            rule,
            v0: 0.0,
        };
        let mean_cumulative = v.rule.integrate(0.0, 1.0, |s| v.cumulative(-s));
        v.v0 = sol.x(0.0) + mean_cumulative;
        Ok(v)
    }

    /// `∫₀ᵗ f(x(s)) ds`.
    fn cumulative(&self, t: f64) -> f64 {
        let panels = ((t.abs() * V_PANELS_PER_UNIT).ceil() as usize).max(1);
        self.rule
            .integrate_composite(0.0, t, panels, |s| self.f.eval(self.sol.x(s)))
    }

    pub fn value(&self, t: f64) -> f64 {
        self.v0 - self.cumulative(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -self.f.eval(self.sol.x(t))
    }

    /// `∫₀¹ v(t - s) ds`, which should reproduce `x(t)`.
    pub fn window_mean(&self, t: f64) -> f64 {
        self.rule.integrate(0.0, 1.0, |s| self.value(t - s))
    }
}

/// Defects of the equivalent `v` formulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VDefects {
    /// `sup |x(t) - ∫₀¹ v(t - s) ds|`.
    pub reconstruction: f64,
    /// `sup |v'(t) + f(∫₀¹ v(t - s) ds)|`.
    pub equation: f64,
}

/// Builds `v` from `sol` and measures both defects on `grid_points` times in
/// `[0, 2]`.
pub fn v_formulation_check<S: SolutionWithDerivative + ?Sized>(
    sol: &S,
    f: &Nonlinearity,
    order: usize,
    grid_points: usize,
) -> Result<VDefects> {
    let v = VFunction::new(sol, *f, order)?;
    let mut reconstruction = 0.0_f64;
    let mut equation = 0.0_f64;
    for t in uniform_grid(0.0, 2.0, grid_points) {
        let mean = v.window_mean(t);
        reconstruction = reconstruction.max((sol.x(t) - mean).abs());
        equation = equation.max((v.derivative(t) + f.eval(mean)).abs());
    }
    Ok(VDefects {
        reconstruction,
        equation,
    })
}
