use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx), with sin(πx) > 0 on (0, 1/2).
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Γ(x) for real x, including negative non-integer arguments.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        return PI / (s * gamma(1.0 - x));
    }
    if x > 171.0 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// ln Γ(z) for complex z with Re z ≥ 1/2. The imaginary part is the continuous
/// branch of arg Γ(z) starting from 0 on the real axis.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.5);
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    let mut a = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += *c / (zm + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + a.ln()
}

/// Coulomb phase η_l = arg Γ(1 + l + iζ), on the continuous branch.
pub fn coulomb_phase(l: usize, eta: f64) -> f64 {
    let mut sigma = ln_gamma_complex(Complex64::new(1.0, eta)).im;
    for j in 1..=l {
        sigma += (eta / j as f64).atan();
    }
    sigma
}
