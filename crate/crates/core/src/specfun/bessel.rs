use crate::error::{HorseError, Result};

/// Spherical Bessel functions and their x-derivatives at one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalBessel {
    pub j: f64,
    pub n: f64,
    pub dj: f64,
    pub dn: f64,
}

/// j_l(x), n_l(x) and derivatives. n_l uses upward recurrence, j_l upward for
/// x > l and Miller's downward recurrence otherwise.
pub fn spherical_bessel(l: usize, x: f64) -> Result<SphericalBessel> {
    if !(x > 0.0) {
        return Err(HorseError::invalid("x", x, "spherical Neumann function needs x > 0"));
    }
    let j = spherical_j_upto(l + 1, x);
    let n = spherical_n_upto(l + 1, x);
    let lf = l as f64;
    Ok(SphericalBessel {
        j: j[l],
        n: n[l],
        dj: lf / x * j[l] - j[l + 1],
        dn: lf / x * n[l] - n[l + 1],
    })
}

/// j_l(x) alone; valid at x = 0.
pub fn spherical_j(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    spherical_j_upto(l, x.abs())[l] * if x < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 }
}

/// j_0 … j_lmax at x > 0.
pub fn spherical_j_upto(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    if x < 1e-3 {
        // Two-term small-argument series, relative error O(x⁶).
        let x2 = x * x;
        let mut lead = 1.0;
        for (l, v) in out.iter_mut().enumerate() {
            if l > 0 {
                lead *= x / (2 * l + 1) as f64;
            }
            let a = (2 * l + 3) as f64;
            let b = (2 * l + 5) as f64;
            *v = lead * (1.0 - x2 / (2.0 * a) + x2 * x2 / (8.0 * a * b));
        }
        return out;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if (lmax as f64) < x {
        out[0] = j0;
        if lmax >= 1 {
            out[1] = s / (x * x) - c / x;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return out;
    }
    // Miller: start well above both lmax and x.
    let start = lmax + 20 + (x as usize) + ((40.0 * (lmax.max(1) as f64)).sqrt() as usize);
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut ratio_ok = vec![0.0; lmax + 1];
    for l in (1..=start).rev() {
        let below = (2 * l + 1) as f64 / x * cur - above;
        above = cur;
        cur = below;
        if l - 1 <= lmax {
            ratio_ok[l - 1] = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            for v in ratio_ok.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // Normalize against whichever of j_0, j_1 is better conditioned.
    let j1 = s / (x * x) - c / x;
    let scale = if j0.abs() >= j1.abs() || lmax == 0 {
        j0 / ratio_ok[0]
    } else {
        j1 / ratio_ok[1]
    };
    for (o, r) in out.iter_mut().zip(ratio_ok) {
        *o = r * scale;
    }
    out
}

/// n_0 … n_lmax at x > 0 by upward recurrence.
pub fn spherical_n_upto(lmax: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = vec![0.0; lmax + 1];
    out[0] = -c / x;
    if lmax >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for l in 1..lmax {
        out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
    }
    out
}
