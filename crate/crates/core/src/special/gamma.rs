//! Complex log-Gamma and the ratio `l(z) = Gamma(z) / Gamma(1 - z)`.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 671.0 / 128.0;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    // Re z >= 1/2
    let tmp = z + LANCZOS_G;
    let tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS_COF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (SQRT_2PI * ser / z).ln()
}

/// `ln Gamma(z)` for complex `z`, up to an additive multiple of `2 pi i`.
///
/// Poles at the non-positive integers give an infinite real part.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_lanczos(z)
    } else {
        let s = sin_pi(z);
        if s == Complex64::new(0.0, 0.0) {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z)
    }
}

/// Real `ln |Gamma(x)|`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

pub fn gamma_real(x: f64) -> f64 {
    let v = ln_gamma(Complex64::new(x, 0.0));
    // sign from the imaginary part (multiple of pi for real arguments)
    let k = (v.im / PI).round() as i64;
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * v.re.exp()
}

/// `1 / Gamma(z)`, entire; exactly zero at the non-positive integers.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        (-ln_gamma_lanczos(z)).exp()
    } else {
        // 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi
        let s = sin_pi(z);
        ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z).exp() * s / PI
    }
}

/// `sin(pi z)` with exact zeros at the integers.
pub fn sin_pi(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    // reduce the real part to keep the argument small
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (r * PI).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// `ln l(z) = ln Gamma(z) - ln Gamma(1 - z)`.
pub fn ln_l(z: Complex64) -> Complex64 {
    ln_gamma(z) - ln_gamma(Complex64::new(1.0, 0.0) - z)
}

/// `l(z) = Gamma(z) / Gamma(1 - z)`.
pub fn l_ratio(z: Complex64) -> Complex64 {
    ln_l(z).exp()
}
