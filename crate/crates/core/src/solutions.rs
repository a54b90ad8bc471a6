//! Closed-form special symmetric period-2 solutions and the orbit-level
//! building blocks they are assembled from.

use serde::Serialize;
use std::f64::consts::PI;

use crate::dde::SolutionWithDerivative;
use crate::elliptic::{Jacobi, Modulus};
use crate::error::{Error, Result};
use crate::THRESHOLD;

/// Panels for the memory window: the nearest complex singularity of both
/// closed forms sits `K'/K` of a unit window off the real axis.
fn panels_for(m: Modulus) -> usize {
    let ratio = m.complete_k() / m.complementary().complete_k();
    (ratio.ceil() as usize).max(1)
}

/// Bisection runs on `ln k'` over `[LN_KC_FLOOR, 0]`.
const LN_KC_FLOOR: f64 = -644.7; // ln(1e-280)
const MAX_BISECTIONS: usize = 400;
const MONOTONE_GRID: usize = 200;

fn modulus_at(ln_kc: f64) -> Modulus {
    Modulus::from_complement(ln_kc.exp().min(1.0)).expect("k' in (0, 1]")
}

/// Finds the modulus where the increasing map `g` reaches `target`.
fn bisect_modulus(g: impl Fn(Modulus) -> f64, target: f64, r: f64) -> Result<Modulus> {
    // g increases with k, i.e. decreases with ln k'.
    let (mut lo, mut hi) = (LN_KC_FLOOR, 0.0_f64);
    if g(modulus_at(lo)) < target {
        return Err(Error::invalid(format!(
            "r = {r} needs a modulus closer to one than k' = 1e-280"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(modulus_at(mid)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (m_lo, m_hi) = (modulus_at(lo), modulus_at(hi));
    Ok(if (g(m_lo) - target).abs() <= (g(m_hi) - target).abs() {
        m_lo
    } else {
        m_hi
    })
}

fn check_threshold(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::invalid(format!("r must be finite, got {r}")));
    }
    if r <= THRESHOLD {
        return Err(Error::NoSolution { r });
    }
    Ok(())
}

/// Modulus `m` of the sine-model SSPS: `2 K(m) = √(2r)`.
pub fn solve_sine_modulus(r: f64) -> Result<Modulus> {
    check_threshold(r)?;
    let target = 0.5 * (2.0 * r).sqrt();
    let m = bisect_modulus(|m| m.complete_k(), target, r)?;
    let resid = (m.complete_k() - target).abs();
    if resid > 1e-13 * target.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "sine modulus residual {resid:e} above 1e-13"
        )));
    }
    Ok(m)
}

/// Right-hand side `2K(k)(2E(k) - K(k)(1 - k²))` of the exponential-model
/// modulus equation.
pub fn exp_modulus_rhs(m: Modulus) -> f64 {
    let p = m.complete_pair();
    2.0 * p.k_int * (2.0 * p.e_int - p.k_int * m.complement_sq())
}

/// Checks the exponential-model right-hand side is strictly increasing on
/// a uniform grid of `points` moduli in `(0, 1)`.
pub fn exp_rhs_is_monotone(points: usize) -> bool {
    let vals: Vec<f64> = (1..=points)
        .map(|i| exp_modulus_rhs(Modulus::new(i as f64 / (points + 1) as f64).unwrap()))
        .collect();
    vals.windows(2).all(|w| w[1] > w[0])
}

/// Modulus `k` of the exponential-model SSPS: `r = 2K(2E - K(1 - k²))`.
pub fn solve_exp_modulus(r: f64) -> Result<Modulus> {
    check_threshold(r)?;
    if !exp_rhs_is_monotone(MONOTONE_GRID) {
        return Err(Error::Monotonicity(format!(
            "grid of {MONOTONE_GRID} moduli"
        )));
    }
    let m = bisect_modulus(exp_modulus_rhs, r, r)?;
    let resid = (exp_modulus_rhs(m) - r).abs();
    if resid > 1e-11 * r.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "exp modulus residual {resid:e} above 1e-11"
        )));
    }
    Ok(m)
}

/// SSPS of `x' = -∫₀¹ r sin x(t-s) ds`:
/// `x(t) = 2 arcsin(m sn(√(2r) t, m))`.
#[derive(Debug, Clone)]
pub struct SineSsps {
    r: f64,
    modulus: Modulus,
    omega: f64,
    jacobi: Jacobi,
}

pub fn sine_ssps(r: f64) -> Result<SineSsps> {
    let modulus = solve_sine_modulus(r)?;
    Ok(SineSsps {
        r,
        modulus,
        omega: (2.0 * r).sqrt(),
        jacobi: Jacobi::new(modulus),
    })
}

impl SineSsps {
    pub fn r(&self) -> f64 {
        self.r
    }

    /// The modulus `m` (the square root of the squared-modulus `a`).
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Squared modulus `a = m²`.
    pub fn squared_modulus(&self) -> f64 {
        self.modulus.k() * self.modulus.k()
    }

    pub fn quarter_period(&self) -> f64 {
        self.jacobi.quarter_period()
    }

    /// Peak value `2 arcsin(m)`, reached at `t = 1/2`.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.modulus.k().asin()
    }

    pub fn x(&self, t: f64) -> f64 {
        let (sn, _, _) = self.jacobi.eval(self.omega * t);
        2.0 * (self.modulus.k() * sn).asin()
    }

    /// `x'(t) = 2 m √(2r) cn(√(2r) t, m)`.
    pub fn dx(&self, t: f64) -> f64 {
        let (_, cn, _) = self.jacobi.eval(self.omega * t);
        2.0 * self.modulus.k() * self.omega * cn
    }
}

impl SolutionWithDerivative for SineSsps {
    fn x(&self, t: f64) -> f64 {
        SineSsps::x(self, t)
    }
    fn dx(&self, t: f64) -> f64 {
        SineSsps::dx(self, t)
    }
    fn declared_period(&self) -> f64 {
        2.0
    }
    fn memory_panels(&self) -> usize {
        panels_for(self.modulus)
    }
}

/// Pendulum orbit through `(a, 0)`:
/// `x(t) = 2 arcsin(k sn(√(2r) t + K(k), k))`, `k = sin(a/2)`.
#[derive(Debug, Clone)]
pub struct PendulumOrbit {
    r: f64,
    amplitude: f64,
    omega: f64,
    jacobi: Jacobi,
}

pub fn pendulum_orbit(r: f64, a: f64) -> Result<PendulumOrbit> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("r must be positive, got {r}")));
    }
    if !(a > 0.0 && a < PI) {
        return Err(Error::domain(format!("amplitude a = {a} outside (0, π)")));
    }
    let half = 0.5 * a;
    let modulus = if a <= 0.5 * PI {
        Modulus::new(half.sin())?
    } else {
        Modulus::from_complement(half.cos())?
    };
    Ok(PendulumOrbit {
        r,
        amplitude: a,
        omega: (2.0 * r).sqrt(),
        jacobi: Jacobi::new(modulus),
    })
}

impl PendulumOrbit {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn modulus(&self) -> Modulus {
        self.jacobi.modulus()
    }

    /// `4 K(k) / √(2r)`.
    pub fn period(&self) -> f64 {
        4.0 * self.jacobi.quarter_period() / self.omega
    }

    pub fn x(&self, t: f64) -> f64 {
        let u = self.omega * t + self.jacobi.quarter_period();
        2.0 * (self.modulus().k() * self.jacobi.eval(u).0).asin()
    }

    pub fn dx(&self, t: f64) -> f64 {
        let u = self.omega * t + self.jacobi.quarter_period();
        2.0 * self.modulus().k() * self.omega * self.jacobi.eval(u).1
    }

    /// Conjugate variable `y = -x'`.
    pub fn y(&self, t: f64) -> f64 {
        -self.dx(t)
    }
}

impl SolutionWithDerivative for PendulumOrbit {
    fn x(&self, t: f64) -> f64 {
        PendulumOrbit::x(self, t)
    }
    fn dx(&self, t: f64) -> f64 {
        PendulumOrbit::dx(self, t)
    }
    fn declared_period(&self) -> f64 {
        self.period()
    }
}

/// `ln(dn + k cn)`, switching to `2 ln k' - ln(dn - k cn)` when `cn < 0`
/// to dodge cancellation (the product of the two factors is `k'²`).
fn ln_dn_plus_kcn(m: Modulus, cn: f64, dn: f64) -> f64 {
    if cn >= 0.0 {
        (dn + m.k() * cn).ln()
    } else {
        2.0 * m.complement().ln() - (dn - m.k() * cn).ln()
    }
}

/// SSPS of `x' = -∫₀¹ r (e^{x(t-s)} - 1) ds`, satisfying
/// `x(t) + x(t - 1) = c`.
#[derive(Debug, Clone, Serialize)]
pub struct ExpSsps {
    pub r: f64,
    pub modulus: Modulus,
    /// Conserved sum `x(t) + x(t - 1)`.
    pub c: f64,
    /// `2 K(k)`.
    pub beta: f64,
    /// `r e^{c/2}`.
    pub gamma: f64,
    /// `k / k'`.
    pub alpha: f64,
    pub k_int: f64,
    pub e_int: f64,
    #[serde(skip)]
    log_scale: f64,
    #[serde(skip)]
    jacobi: Jacobi,
}

const CONSISTENCY_TOL: f64 = 1e-10;

pub fn exp_ssps(r: f64) -> Result<ExpSsps> {
    let modulus = solve_exp_modulus(r)?;
    let pair = modulus.complete_pair();
    let (k_int, e_int) = (pair.k_int, pair.e_int);
    let ln_kc = modulus.complement().ln();
    let denom = 2.0 * e_int - k_int * modulus.complement_sq();

    // c/2 from the period-2 condition and from the zero-mean condition.
    let half_c = std::f64::consts::LN_2 + 2.0 * k_int.ln() + 2.0 * ln_kc - r.ln();
    let half_c_alt = k_int.ln() + 2.0 * ln_kc - denom.ln();
    let scale = half_c.abs().max(1.0);
    if (half_c - half_c_alt).abs() > CONSISTENCY_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "offset expressions disagree: c/2 = {half_c} vs {half_c_alt}"
        )));
    }
    // e^{c/2} (2E / ((1 - k²) K) - 1) = 1, in logs.
    let mean_condition = half_c + denom.ln() - 2.0 * ln_kc - k_int.ln();
    if mean_condition.exp_m1().abs() > CONSISTENCY_TOL {
        return Err(Error::Inconsistent(format!(
            "zero-mean condition off by {mean_condition:e}"
        )));
    }

    let beta = 2.0 * k_int;
    let gamma = r * half_c.exp();
    let alpha = modulus.k() / modulus.complement();
    let lhs = beta * modulus.k();
    let rhs = (2.0 * gamma).sqrt() * alpha;
    if (lhs - rhs).abs() > 1e-12 * lhs.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "beta k = {lhs} but sqrt(2 gamma) alpha = {rhs}"
        )));
    }

    Ok(ExpSsps {
        r,
        modulus,
        c: 2.0 * half_c,
        beta,
        gamma,
        alpha,
        k_int,
        e_int,
        log_scale: k_int.ln() - denom.ln(),
        jacobi: Jacobi::new(modulus),
    })
}

impl ExpSsps {
    /// `x(t) = ln(K (dn + k cn)² / (2E - K(1 - k²)))` at argument `2K t`.
    pub fn x(&self, t: f64) -> f64 {
        let (_, cn, dn) = self.jacobi.eval(self.beta * t);
        self.log_scale + 2.0 * ln_dn_plus_kcn(self.modulus, cn, dn)
    }

    /// `x'(t) = -2 β k sn(β t, k)`.
    pub fn dx(&self, t: f64) -> f64 {
        let (sn, _, _) = self.jacobi.eval(self.beta * t);
        -2.0 * self.beta * self.modulus.k() * sn
    }

    /// Half the peak-to-peak range, `ln((1 + k)/(1 - k))`.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.modulus.k().atanh()
    }
}

impl SolutionWithDerivative for ExpSsps {
    fn x(&self, t: f64) -> f64 {
        ExpSsps::x(self, t)
    }
    fn dx(&self, t: f64) -> f64 {
        ExpSsps::dx(self, t)
    }
    fn declared_period(&self) -> f64 {
        2.0
    }
    fn memory_panels(&self) -> usize {
        panels_for(self.modulus)
    }
}

/// Orbit of `w' = -y`, `y' = 2γ sinh w` through `(a, 0)`.
#[derive(Debug, Clone)]
pub struct WyPair {
    pub gamma: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    jacobi: Jacobi,
}

pub fn wy_solution(gamma: f64, a: f64) -> Result<WyPair> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("amplitude must be positive, got {a}")));
    }
    let alpha = (0.5 * a).sinh();
    let root = alpha.hypot(1.0);
    let modulus = if alpha < 1.0 {
        Modulus::new(alpha / root)?
    } else {
        Modulus::from_complement(1.0 / root)?
    };
    Ok(WyPair {
        gamma,
        a,
        alpha,
        beta: (2.0 * gamma).sqrt() * root,
        jacobi: Jacobi::new(modulus),
    })
}

impl WyPair {
    pub fn modulus(&self) -> Modulus {
        self.jacobi.modulus()
    }

    /// `4 K(k) / β`.
    pub fn period(&self) -> f64 {
        4.0 * self.jacobi.quarter_period() / self.beta
    }

    /// `w(t) = ln((dn + k cn)/(dn - k cn))` at argument `β t`.
    pub fn w(&self, t: f64) -> f64 {
        let (_, cn, dn) = self.jacobi.eval(self.beta * t);
        let m = self.modulus();
        2.0 * (ln_dn_plus_kcn(m, cn, dn) - m.complement().ln())
    }

    /// `y(t) = 2 β k sn(β t)`.
    pub fn y(&self, t: f64) -> f64 {
        let (sn, _, _) = self.jacobi.eval(self.beta * t);
        2.0 * self.beta * self.modulus().k() * sn
    }
}
