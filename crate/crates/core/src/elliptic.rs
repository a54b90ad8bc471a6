//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything here takes the **modulus** `k`, never the parameter `m = k²`.
//! A [`Modulus`] carries both `k` and the complementary modulus
//! `k' = √(1 - k²)`, so moduli extremely close to one (where `1 - k` is not
//! representable in `f64`) can still be described exactly through `k'`.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Moduli closer than this to one are rejected by [`Modulus::new`]; use
/// [`Modulus::from_complement`] to go beyond it.
pub const NEAR_ONE: f64 = 1e-12;

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 40;
/// Landen descent stops once the reduced modulus is below this.
const LANDEN_FLOOR: f64 = 1e-8;
const LANDEN_MAX_DEPTH: usize = 24;

/// Elliptic modulus `0 ≤ k < 1`, stored together with its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modulus {
    k: f64,
    kc: f64,
}

impl Modulus {
    pub const ZERO: Modulus = Modulus { k: 0.0, kc: 1.0 };

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || !(0.0..1.0).contains(&k) {
            return Err(Error::domain(format!("modulus k = {k} outside [0, 1)")));
        }
        if 1.0 - k < NEAR_ONE {
            return Err(Error::domain(format!(
                "modulus k = {k} within {NEAR_ONE:e} of 1; construct it from k' instead"
            )));
        }
        Ok(Modulus {
            k,
            kc: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    /// Builds the modulus from `k' ∈ (0, 1]`.
    pub fn from_complement(kc: f64) -> Result<Self> {
        if !kc.is_finite() || kc <= 0.0 || kc > 1.0 {
            return Err(Error::domain(format!(
                "complementary modulus k' = {kc} outside (0, 1]"
            )));
        }
        // Each branch rounds monotonically in k'; the factored form only where
        // 1 - k'² would cancel.
        let k = if kc < 0.5 {
            (1.0 - kc * kc).sqrt()
        } else {
            ((1.0 - kc) * (1.0 + kc)).sqrt()
        };
        Ok(Modulus { k, kc })
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `k' = √(1 - k²)`.
    #[inline]
    pub fn complement(&self) -> f64 {
        self.kc
    }

    /// `1 - k²`, computed from `k'` without cancellation.
    #[inline]
    pub fn complement_sq(&self) -> f64 {
        self.kc * self.kc
    }

    /// The modulus with `k` and `k'` swapped.
    pub fn complementary(&self) -> Modulus {
        Modulus {
            k: self.kc,
            kc: self.k,
        }
    }

    pub fn complete_k(&self) -> f64 {
        agm(self.k, self.kc).0
    }

    pub fn complete_e(&self) -> f64 {
        agm(self.k, self.kc).1
    }

    pub fn complete_pair(&self) -> CompletePair {
        let (k_int, e_int) = agm(self.k, self.kc);
        CompletePair {
            k_int,
            e_int,
            modulus: *self,
        }
    }
}

/// `K(k)` and `E(k)` evaluated together (they share one AGM run).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompletePair {
    /// Quarter period `K(k)`.
    pub k_int: f64,
    /// Complete integral of the second kind `E(k)`.
    pub e_int: f64,
    pub modulus: Modulus,
}

/// Arithmetic-geometric mean of `(1, k')`, returning `(K, E)`.
///
/// `K = π / (2 AGM(1, k'))` and `E = K (1 - Σ 2ⁿ⁻¹ cₙ²)` with `c₀ = k`.
fn agm(k: f64, kc: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = kc;
    let mut weight = 0.5;
    let mut sum = weight * k * k;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let k_int = FRAC_PI_2 / a;
    (k_int, k_int * (1.0 - sum))
}

/// Complete elliptic integral of the first kind `K(k)` for `0 ≤ k < 1`.
pub fn complete_k(k: f64) -> Result<f64> {
    Modulus::new(k).map(|m| m.complete_k())
}

/// Complete elliptic integral of the second kind `E(k)` for `0 ≤ k ≤ 1`.
pub fn complete_e(k: f64) -> Result<f64> {
    if !k.is_finite() || !(0.0..=1.0).contains(&k) {
        return Err(Error::domain(format!("modulus k = {k} outside [0, 1]")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    // E stays finite as k -> 1, so no near-one rejection here.
    let kc = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(agm(k, kc).1)
}

/// Simultaneous values of `sn`, `cn`, `dn` at argument `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub u: f64,
    pub modulus: Modulus,
}

/// Precomputed descending Landen chain for one modulus.
///
/// Building this once and calling [`Jacobi::eval`] repeatedly is what the
/// closed-form solutions do; [`jacobi_snk`] is the one-shot form.
#[derive(Debug, Clone, Copy)]
pub struct Jacobi {
    modulus: Modulus,
    quarter: f64,
    /// Reduced moduli k₁, k₂, … (k₀ is the input modulus).
    chain: [f64; LANDEN_MAX_DEPTH],
    /// 1 - kₙ, kept separately because kₙ can sit within 1e-16 of one.
    gaps: [f64; LANDEN_MAX_DEPTH],
    depth: usize,
    /// Product of (1 + kₙ) over the chain.
    scale: f64,
}

impl Jacobi {
    pub fn new(modulus: Modulus) -> Self {
        let mut chain = [0.0; LANDEN_MAX_DEPTH];
        let mut gaps = [0.0; LANDEN_MAX_DEPTH];
        let mut depth = 0;
        let mut scale = 1.0;
        let (mut k, mut kc) = (modulus.k, modulus.kc);
        while k >= LANDEN_FLOOR && depth < LANDEN_MAX_DEPTH {
            // k₁ = (1 - k')/(1 + k') written as (k/(1 + k'))² to avoid cancellation.
            let ratio = k / (1.0 + kc);
            let next_k = ratio * ratio;
            let next_kc = 2.0 * kc.sqrt() / (1.0 + kc);
            chain[depth] = next_k;
            gaps[depth] = 2.0 * kc / (1.0 + kc);
            depth += 1;
            scale *= 1.0 + next_k;
            k = next_k;
            kc = next_kc;
        }
        Jacobi {
            modulus,
            quarter: modulus.complete_k(),
            chain,
            gaps,
            depth,
            scale,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `K(k)` for this modulus.
    pub fn quarter_period(&self) -> f64 {
        self.quarter
    }

    /// `(sn, cn, dn)` at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        let period = 4.0 * self.quarter;
        let reduced = u - period * (u / period).round();
        let v = reduced / self.scale;

        let (mut s, mut c) = v.sin_cos();
        let k_last = if self.depth == 0 {
            self.modulus.k
        } else {
            self.chain[self.depth - 1]
        };
        let mut d = (1.0 - k_last * k_last * s * s).sqrt();

        // Ascend: (sn, cn, dn) at modulus k_{n-1} from values at k_n.
        for n in (0..self.depth).rev() {
            let (kn, gap) = (self.chain[n], self.gaps[n]);
            let s2 = s * s;
            let denom = 1.0 + kn * s2;
            let s_up = (1.0 + kn) * s / denom;
            let c_up = c * d / denom;
            // 1 - kₙs² = cn² + (1 - kₙ)sn², free of cancellation near sn = ±1.
            let d_up = (c * c + gap * s2) / denom;
            s = s_up;
            c = c_up;
            d = d_up;
        }
        (s, c, d)
    }

    pub fn triple(&self, u: f64) -> EllipticTriple {
        let (sn, cn, dn) = self.eval(u);
        EllipticTriple {
            sn,
            cn,
            dn,
            u,
            modulus: self.modulus,
        }
    }
}

/// One-shot Jacobi elliptic functions `(sn, cn, dn)(u, k)`.
pub fn jacobi_snk(u: f64, modulus: Modulus) -> Result<EllipticTriple> {
    if !u.is_finite() {
        return Err(Error::domain(format!("argument u = {u} is not finite")));
    }
    Ok(Jacobi::new(modulus).triple(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: K and E by composite Simpson on the angular integrals,
    // which are smooth for k bounded away from one.
    fn k_by_simpson(k: f64) -> f64 {
        simpson(|t| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 4000)
    }

    fn e_by_simpson(k: f64) -> f64 {
        simpson(|t| (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 4000)
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn degenerate_circular_case() {
        assert_eq!(complete_k(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_e(0.0).unwrap(), FRAC_PI_2);
        let t = jacobi_snk(1.3, Modulus::ZERO).unwrap();
        assert!((t.sn - 1.3f64.sin()).abs() < 1e-15);
        assert!((t.cn - 1.3f64.cos()).abs() < 1e-15);
        assert_eq!(t.dn, 1.0);
    }

    #[test]
    fn frozen_reference_values() {
        // mpmath, 30 digits: ellipk(0.81), ellipe(0.64)
        let k09 = complete_k(0.9).unwrap();
        assert!((k09 - 2.280_549_138_422_770_3).abs() / k09 < 1e-14);
        let e08 = complete_e(0.8).unwrap();
        assert!((e08 - 1.276_349_943_169_906_4).abs() / e08 < 1e-13);
        assert_eq!(complete_e(1.0).unwrap(), 1.0);
    }

    #[test]
    fn agm_matches_quadrature_oracle() {
        for i in 0..10 {
            let k = i as f64 * 0.095;
            let m = Modulus::new(k).unwrap();
            assert!((m.complete_k() - k_by_simpson(k)).abs() < 1e-10, "K at {k}");
            assert!((m.complete_e() - e_by_simpson(k)).abs() < 1e-10, "E at {k}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(complete_k(1.0), Err(Error::Domain(_))));
        assert!(matches!(complete_k(-0.1), Err(Error::Domain(_))));
        assert!(matches!(complete_k(1.0 - 1e-13), Err(Error::Domain(_))));
        assert!(matches!(complete_e(1.2), Err(Error::Domain(_))));
        assert!(matches!(complete_e(f64::NAN), Err(Error::Domain(_))));
        assert!(Modulus::from_complement(0.0).is_err());
        assert!(jacobi_snk(f64::INFINITY, Modulus::ZERO).is_err());
    }

    #[test]
    fn complement_is_consistent() {
        for &k in &[0.0, 1e-9, 0.3, 0.7, 0.99, 0.999_999] {
            let m = Modulus::new(k).unwrap();
            assert!((m.k() * m.k() + m.complement_sq() - 1.0).abs() < 4.0 * f64::EPSILON);
        }
        let m = Modulus::from_complement(5e-11).unwrap();
        assert_eq!(m.k(), 1.0);
        assert_eq!(m.complement(), 5e-11);
    }

    #[test]
    fn near_one_through_complement_stays_accurate() {
        // K(k) ~ ln(4/k') + O(k'² ln k') for small k'.
        let kc = 1e-9;
        let m = Modulus::from_complement(kc).unwrap();
        let asymptotic = (4.0 / kc).ln();
        assert!((m.complete_k() - asymptotic).abs() < 1e-12);
        assert!((m.complete_e() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_period_values() {
        let m = Modulus::new(0.6).unwrap();
        let t = jacobi_snk(m.complete_k(), m).unwrap();
        assert!((t.sn - 1.0).abs() < 1e-12);
        assert!(t.cn.abs() < 1e-12);
        assert!((t.dn - 0.8).abs() < 1e-12);
        let z = jacobi_snk(0.0, m).unwrap();
        assert_eq!((z.sn, z.cn, z.dn), (0.0, 1.0, 1.0));
    }

    #[test]
    fn frozen_jacobi_values() {
        // mpmath ellipfun at m = k².
        let t = jacobi_snk(0.7, Modulus::new(0.5).unwrap()).unwrap();
        assert!((t.sn - 0.634_293_276_335_112_4).abs() < 1e-13);
        assert!((t.cn - 0.773_092_516_841_334_3).abs() < 1e-13);
        assert!((t.dn - 0.948_376_512_730_580_6).abs() < 1e-13);
        let t = jacobi_snk(5.3, Modulus::new(0.99).unwrap()).unwrap();
        assert!((t.sn - 0.891_088_551_863_988_3).abs() < 1e-12);
        assert!((t.cn + 0.453_829_475_394_602_7).abs() < 1e-12);
        assert!((t.dn - 0.470_916_728_309_236_4).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_sn_is_cn_dn() {
        let h = 1e-5;
        for &k in &[0.2, 0.6, 0.95] {
            let jac = Jacobi::new(Modulus::new(k).unwrap());
            for i in 0..40 {
                let u = -3.0 + 0.17 * i as f64;
                let fd = (jac.eval(u + h).0 - jac.eval(u - h).0) / (2.0 * h);
                let (_, cn, dn) = jac.eval(u);
                assert!((fd - cn * dn).abs() < 1e-7, "k={k} u={u}");
            }
        }
    }

    #[test]
    fn large_arguments_are_reduced() {
        let m = Modulus::new(0.8).unwrap();
        let jac = Jacobi::new(m);
        let four_k = 4.0 * jac.quarter_period();
        let (s0, c0, d0) = jac.eval(0.37);
        let (s1, c1, d1) = jac.eval(0.37 + 25.0 * four_k);
        assert!((s0 - s1).abs() < 1e-11 && (c0 - c1).abs() < 1e-11 && (d0 - d1).abs() < 1e-11);
        assert!((jac.eval(-0.37).0 + s0).abs() < 1e-15);
    }
}
