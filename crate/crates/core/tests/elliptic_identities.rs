use proptest::prelude::*;
use ssps_core::elliptic::{complete_e, complete_k, jacobi_snk, Jacobi, Modulus};
use ssps_core::quadrature::GaussLegendre;

fn moduli() -> impl Strategy<Value = f64> {
    0.0f64..0.999
}

proptest! {
    #[test]
    fn pythagorean_identities(k in moduli(), u in -60.0f64..60.0) {
        let t = jacobi_snk(u, Modulus::new(k).unwrap()).unwrap();
        prop_assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() <= 1e-12);
        prop_assert!((t.dn * t.dn + k * k * t.sn * t.sn - 1.0).abs() <= 1e-12);
        prop_assert!(t.dn >= t.modulus.complement() - 1e-15);
    }

    #[test]
    fn periodicity_and_half_period_antisymmetry(k in moduli(), u in -10.0f64..10.0) {
        let jac = Jacobi::new(Modulus::new(k).unwrap());
        let big_k = jac.quarter_period();
        let (s, c, d) = jac.eval(u);
        let (s4, c4, _) = jac.eval(u + 4.0 * big_k);
        let (s2, c2, d2) = jac.eval(u + 2.0 * big_k);
        prop_assert!((s4 - s).abs() <= 1e-11 && (c4 - c).abs() <= 1e-11);
        prop_assert!((d2 - d).abs() <= 1e-11);
        prop_assert!((s2 + s).abs() <= 1e-11 && (c2 + c).abs() <= 1e-11);
    }

    #[test]
    fn sn_derivative(k in 0.0f64..0.99, u in -8.0f64..8.0) {
        let jac = Jacobi::new(Modulus::new(k).unwrap());
        let h = 1e-5;
        let fd = (jac.eval(u + h).0 - jac.eval(u - h).0) / (2.0 * h);
        let (_, cn, dn) = jac.eval(u);
        prop_assert!((fd - cn * dn).abs() <= 1e-7);
    }
}

#[test]
fn identity_grid_over_full_period() {
    for i in 1..=9 {
        let m = Modulus::new(i as f64 / 10.0).unwrap();
        let jac = Jacobi::new(m);
        for q in 0..=80 {
            let u = 4.0 * jac.quarter_period() * q as f64 / 80.0;
            let (s, c, d) = jac.eval(u);
            assert!((s * s + c * c - 1.0).abs() <= 1e-12);
            assert!((d * d + m.k() * m.k() * s * s - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn complete_integrals_are_monotone_with_circular_limits() {
    let ks: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
    let big_k: Vec<f64> = ks.iter().map(|&k| complete_k(k).unwrap()).collect();
    let big_e: Vec<f64> = ks.iter().map(|&k| complete_e(k).unwrap()).collect();
    assert!(big_k.windows(2).all(|w| w[1] > w[0]));
    assert!(big_e.windows(2).all(|w| w[1] < w[0]));
    let half_pi = std::f64::consts::FRAC_PI_2;
    assert_eq!(big_k[0], half_pi);
    assert_eq!(big_e[0], half_pi);
    assert!(big_k[1..].iter().all(|&v| v > half_pi));
    assert!(big_e[1..].iter().all(|&v| v < half_pi && v > 0.0));
}

#[test]
fn legendre_relation() {
    // E K' + E' K - K K' = π/2, an identity the AGM routes do not share.
    for i in 1..20 {
        let k = i as f64 / 20.0;
        let m = Modulus::new(k).unwrap();
        let mc = Modulus::new(m.complement()).unwrap();
        let (kk, ee) = (m.complete_k(), m.complete_e());
        let (kc, ec) = (mc.complete_k(), mc.complete_e());
        let lhs = ee * kc + ec * kk - kk * kc;
        assert!((lhs - std::f64::consts::FRAC_PI_2).abs() < 1e-13, "k={k}");
    }
}

#[test]
fn mean_of_dn_squared_over_half_period() {
    // (1/L) ∫₀ᴸ dn²(βt, k) dt = E/K with L = 2K/β.
    let gl = GaussLegendre::new(64).unwrap();
    for &k in &[0.1, 0.5, 0.8, 0.946, 0.99] {
        let m = Modulus::new(k).unwrap();
        let jac = Jacobi::new(m);
        let beta = 3.7;
        let len = 2.0 * jac.quarter_period() / beta;
        let mean = gl.integrate_composite(0.0, len, 8, |t| jac.eval(beta * t).2.powi(2)) / len;
        assert!((mean - m.complete_e() / m.complete_k()).abs() <= 1e-9, "k={k}");
    }
}

#[test]
fn dn_at_quarter_period_keeps_relative_accuracy() {
    // dn(K) = k' even when k' is far below machine epsilon relative to k.
    for kc in [1e-3, 1e-6, 1e-9, 5e-11] {
        let m = Modulus::from_complement(kc).unwrap();
        let jac = Jacobi::new(m);
        for q in [1.0, 3.0] {
            let d = jac.eval(q * jac.quarter_period()).2;
            assert!((d / kc - 1.0).abs() < 1e-8, "k'={kc} q={q}: {d}");
        }
    }
}
