/// Generalized Laguerre polynomial L_n^α(x) by upward three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + alpha + 1.0 - x) * cur - (m + alpha) * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All values L_0^α(x) … L_n^α(x).
pub fn laguerre_all(n: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + alpha + 1.0 - x) * out[m] - (mf + alpha) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}
