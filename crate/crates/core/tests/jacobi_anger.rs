//! Truncation of cos(25 cos t) against the Jacobi-Anger expansion
//! cos(x cos t) = J_0(x) + 2 sum_k (-1)^k J_{2k}(x) cos(2kt).

use qspfac::{approximate, ApproxOptions, Parity};

/// `J_0(x), ..., J_n(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 J_2 + 2 J_4 + ... = 1`.
fn bessel_j(x: f64, n: usize) -> Vec<f64> {
    let start = 2 * (n + x as usize + 40);
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            j.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    j.truncate(n + 1);
    j.iter_mut().for_each(|v| *v /= norm);
    j
}

#[test]
fn bessel_oracle_known_values() {
    let j = bessel_j(1.0, 2);
    assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
    assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
    let j = bessel_j(25.0, 0);
    assert!((j[0] - 0.096_266_783_275_958_17).abs() < 1e-14);
}

#[test]
fn cos_25_cos_t_matches_bessel_coefficients() {
    let res = approximate(&|t: f64| (25.0 * t.cos()).cos(), Parity::Even, &ApproxOptions::default()).unwrap();
    assert!((36..=60).contains(&res.degree), "d = {}", res.degree);
    assert_eq!(res.degree % 2, 0);

    let j = bessel_j(25.0, 2 * res.degree + 2);
    let d = res.degree as isize;
    let mut worst = 0.0f64;
    for k in -d..=d {
        let got = res.a.coeff(k) / res.scale;
        let want = if k % 2 == 0 {
            let m = (k / 2).unsigned_abs();
            if m % 2 == 0 {
                j[2 * m]
            } else {
                -j[2 * m]
            }
        } else {
            0.0
        };
        assert!(got.im.abs() < 1e-14, "k = {k}");
        worst = worst.max((got.re - want).abs());
    }
    assert!(worst < 1e-13, "max coefficient error {worst:e}");
    // The first dropped coefficient is below the threshold.
    assert!(j[res.degree + 2].abs() < 1e-12 * j.iter().fold(0.0f64, |m, v| m.max(v.abs())));
}
