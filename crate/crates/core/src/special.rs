//! Faddeeva function and integrals of complex Gaussians over intervals.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::spin::C64;

const TERMS: usize = 40;

struct Weideman {
    scale: f64,
    // highest degree first
    coeffs: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TERMS;
        let m = 2 * n;
        let m2 = 2 * m;
        let scale = (n as f64 / 2f64.sqrt()).sqrt();
        // samples of (L² + t²) e^{-t²} at t = L tan(θ/2), θ = kπ/m, k = -m+1..m-1
        let sample = |k: i64| -> f64 {
            let theta = k as f64 * PI / m as f64;
            let t = scale * (theta / 2.0).tan();
            (-t * t).exp() * (scale * scale + t * t)
        };
        let mut coeffs = vec![0.0; n];
        for (p, coeff) in coeffs.iter_mut().enumerate() {
            let p = p + 1;
            let mut acc = 0.0;
            for k in (-(m as i64) + 1)..(m as i64) {
                acc += sample(k) * (PI * (p as f64) * (k as f64) / m as f64).cos();
            }
            *coeff = acc / m2 as f64;
        }
        coeffs.reverse();
        Weideman { scale, coeffs }
    })
}

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`, relative error ≈ 1e-14.
pub fn faddeeva(z: C64) -> C64 {
    if z.im < 0.0 {
        return 2.0 * (-z * z).exp() - faddeeva(-z);
    }
    let table = weideman();
    let i = C64::i();
    let denom = table.scale - i * z;
    let ratio = (table.scale + i * z) / denom;
    let poly = table.coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &a| acc * ratio + a);
    2.0 * poly / (denom * denom) + 1.0 / (PI.sqrt() * denom)
}

/// `exp(shift) · erfc(z)` with the exponent folded in before exponentiating.
fn scaled_erfc(z: C64, shift: C64) -> C64 {
    if z.re >= 0.0 {
        (shift - z * z).exp() * faddeeva(C64::i() * z)
    } else {
        2.0 * shift.exp() - (shift - z * z).exp() * faddeeva(-C64::i() * z)
    }
}

/// `exp(shift) · (erf(hi) - erf(lo))`, arranged to avoid cancellation in the tails.
pub fn scaled_erf_diff(lo: C64, hi: C64, shift: C64) -> C64 {
    if lo.re <= 0.0 && hi.re <= 0.0 {
        scaled_erfc(-hi, shift) - scaled_erfc(-lo, shift)
    } else {
        scaled_erfc(lo, shift) - scaled_erfc(hi, shift)
    }
}

pub fn erf(z: C64) -> C64 {
    scaled_erf_diff(C64::new(0.0, 0.0), z, C64::new(0.0, 0.0))
}

/// `∫ exp(-a x² + b x + c) dx` over `[lo, hi]` (infinite bounds allowed), `Re a > 0`.
pub fn gaussian_interval_integral(a: C64, b: C64, c: C64, lo: f64, hi: f64) -> C64 {
    debug_assert!(a.re > 0.0, "integrand must decay");
    let center = b / (2.0 * a);
    let peak = c + b * b / (4.0 * a);
    let root = a.sqrt();
    let prefactor = PI.sqrt() / (2.0 * root);
    if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
        return 2.0 * prefactor * peak.exp();
    }
    let map = |x: f64| -> C64 {
        if x.is_infinite() {
            C64::new(x.signum() * f64::INFINITY, 0.0)
        } else {
            root * (x - center)
        }
    };
    let (zl, zh) = (map(lo), map(hi));
    let diff = match (lo.is_infinite(), hi.is_infinite()) {
        (true, false) => {
            // erf(zh) + 1 = erfc(-zh)
            scaled_erfc(-zh, peak)
        }
        (false, true) => scaled_erfc(zl, peak),
        _ => scaled_erf_diff(zl, zh, peak),
    };
    prefactor * diff
}
