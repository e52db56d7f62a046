use crate::C64;

/// Cutoff large enough that a coherent state of amplitude `alpha_max` loses
/// less than ~1e-10 of its norm to truncation.
pub fn default_cutoff(alpha_max: f64) -> usize {
    let n = alpha_max * alpha_max;
    (n + 10.0 * (n + 1.0).sqrt() + 20.0).ceil() as usize
}

/// `ln(k!)` for `k = 0..=n`, accumulated term by term.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Number-basis amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n = 0..=cutoff`.
///
/// Built by the ratio recurrence `c_n = c_{n-1} a / sqrt(n)`, so no factorial
/// is ever formed. Rotating `a` by a power of `i` permutes the real and
/// imaginary parts exactly, which keeps the compass-state cancellations exact.
pub(crate) fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Reduce an angle to `(-pi, pi]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}
