//! Bessel function of the first kind, order one.

use std::f64::consts::PI;

/// Argument of the first maximum of `J1`.
pub const J1_FIRST_MAX: f64 = 1.841_183_781_340_659_3;

/// `J1(x)`. Power series for `|x| <= 8`, Hankel asymptotics beyond.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 8.0 {
        series(ax)
    } else {
        asymptotic(ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

fn series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..60 {
        let k = k as f64;
        term *= -h2 / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    // mu = 4 * nu^2 = 4
    let mu = 4.0;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    for k in 1..12 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * z);
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += sign * term;
        } else {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * term;
        }
    }
    let phase = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}

/// Smallest non-negative `x <= J1_FIRST_MAX` with `J1(x) = target`.
pub fn bessel_j1_inverse(target: f64) -> Option<f64> {
    let peak = bessel_j1(J1_FIRST_MAX);
    if !(0.0..=peak).contains(&target) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, J1_FIRST_MAX);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j1(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from standard tables (Abramowitz & Stegun 9.1).
    const TABLE: [(f64, f64); 6] = [
        (0.5, 0.242_268_457_674_873_9),
        (1.0, 0.440_050_585_744_933_5),
        (2.0, 0.576_724_807_756_873_4),
        (5.0, -0.327_579_137_591_465_2),
        (10.0, 0.043_472_746_168_861_44),
        (20.0, 0.066_833_124_175_850_04),
    ];

    #[test]
    fn matches_table() {
        for (x, want) in TABLE {
            let got = bessel_j1(x);
            assert!((got - want).abs() < 1e-9, "J1({x}) = {got}, want {want}");
            assert!((bessel_j1(-x) + want).abs() < 1e-9);
        }
        assert_eq!(bessel_j1(0.0), 0.0);
    }

    #[test]
    fn small_argument_is_linear() {
        for x in [1e-6, 1e-4, 1e-3] {
            assert!((bessel_j1(x) / (0.5 * x) - 1.0).abs() < x * x);
        }
    }

    #[test]
    fn first_maximum() {
        let peak = bessel_j1(J1_FIRST_MAX);
        assert!((peak - 0.581_865_224_281_596_4).abs() < 1e-12);
        assert!(bessel_j1(J1_FIRST_MAX - 1e-3) < peak);
        assert!(bessel_j1(J1_FIRST_MAX + 1e-3) < peak);
    }

    #[test]
    fn inverse_round_trip() {
        for x in [0.01, 0.1133, 0.5, 1.2, 1.8] {
            let y = bessel_j1(x);
            assert!((bessel_j1_inverse(y).unwrap() - x).abs() < 1e-10);
        }
        assert!(bessel_j1_inverse(0.7).is_none());
    }
}
