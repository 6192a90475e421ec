//! Quadrature helpers: adaptive Simpson for smooth integrands and Filon
//! rules for oscillatory cosine/sine integrals whose envelope is smooth.

use num_complex::Complex64;

const MAX_DEPTH: u32 = 48;

fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson rule on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson_step_c<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let h = b - a;
    let left = (fa + 4.0 * flm + fm) * (h / 12.0);
    let right = (fm + 4.0 * frm + fb) * (h / 12.0);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step_c(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step_c(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson rule for complex-valued integrands.
pub fn adaptive_simpson_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    simpson_step_c(&mut f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Filon weights (alpha, beta, gamma) for step phase `theta` = omega * h.
fn filon_weights(theta: f64) -> (f64, f64, f64) {
    if theta.abs() < 0.05 {
        let t2 = theta * theta;
        let alpha = theta * t2 * (2.0 / 45.0 - t2 * (2.0 / 315.0 - t2 * (2.0 / 4725.0)));
        let beta = 2.0 / 3.0 + t2 * (2.0 / 15.0 - t2 * (4.0 / 105.0 - t2 * (2.0 / 567.0)));
        let gamma = 4.0 / 3.0 - t2 * (2.0 / 15.0 - t2 * (1.0 / 210.0 - t2 * (1.0 / 11340.0)));
        (alpha, beta, gamma)
    } else {
        let (s, c) = theta.sin_cos();
        let t3 = theta * theta * theta;
        let alpha = (theta * theta + theta * s * c - 2.0 * s * s) / t3;
        let beta = 2.0 * (theta * (1.0 + c * c) - 2.0 * s * c) / t3;
        let gamma = 4.0 * (s - theta * c) / t3;
        (alpha, beta, gamma)
    }
}

/// Filon rule for `∫_a^b g(k) cos(omega k) dk` with `2 * panels` subintervals.
/// `g` must be smooth; the oscillation is handled exactly for quadratic
/// envelopes, so `panels` only needs to resolve `g`, not the oscillation.
pub fn filon_cos<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, omega: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / (2 * n) as f64;
    let theta = omega * h;
    let (alpha, beta, gamma) = filon_weights(theta);
    let mut c_even = 0.0;
    let mut c_odd = 0.0;
    for i in 0..=(2 * n) {
        let x = a + i as f64 * h;
        let v = g(x) * (omega * x).cos();
        if i % 2 == 0 {
            c_even += v;
        } else {
            c_odd += v;
        }
    }
    let ga = g(a);
    let gb = g(b);
    c_even -= 0.5 * (ga * (omega * a).cos() + gb * (omega * b).cos());
    let boundary = gb * (omega * b).sin() - ga * (omega * a).sin();
    h * (alpha * boundary + beta * c_even + gamma * c_odd)
}

/// Filon rule for `∫_a^b g(k) sin(omega k) dk`.
pub fn filon_sin<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, omega: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / (2 * n) as f64;
    let theta = omega * h;
    let (alpha, beta, gamma) = filon_weights(theta);
    let mut s_even = 0.0;
    let mut s_odd = 0.0;
    for i in 0..=(2 * n) {
        let x = a + i as f64 * h;
        let v = g(x) * (omega * x).sin();
        if i % 2 == 0 {
            s_even += v;
        } else {
            s_odd += v;
        }
    }
    let ga = g(a);
    let gb = g(b);
    s_even -= 0.5 * (ga * (omega * a).sin() + gb * (omega * b).sin());
    let boundary = gb * (omega * b).cos() - ga * (omega * a).cos();
    h * (-alpha * boundary + beta * s_even + gamma * s_odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn simpson_polynomial_is_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        assert_abs_diff_eq!(v, (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn simpson_gaussian_integral() {
        let v = adaptive_simpson(|x| (-x * x).exp(), -8.0, 8.0, 1e-13);
        assert_abs_diff_eq!(v, PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn simpson_handles_scale_separation() {
        // narrow spike on a wide interval
        let v = adaptive_simpson(|x| 1.0 / (1e-4 + (x - 0.3).powi(2)), 0.0, 1.0, 1e-10);
        let exact = 100.0 * ((0.7f64 / 1e-2).atan() + (0.3f64 / 1e-2).atan());
        assert_abs_diff_eq!(v, exact, epsilon = 1e-7 * exact);
    }

    #[test]
    fn simpson_complex_matches_parts() {
        let v = adaptive_simpson_complex(
            |x| Complex64::new((-x * x).exp(), x * (-x).exp()),
            0.0,
            6.0,
            1e-12,
        );
        let re = adaptive_simpson(|x| (-x * x).exp(), 0.0, 6.0, 1e-13);
        let im = adaptive_simpson(|x| x * (-x).exp(), 0.0, 6.0, 1e-13);
        assert_abs_diff_eq!(v.re, re, epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, im, epsilon = 1e-10);
    }

    #[test]
    fn filon_cos_exponential_envelope() {
        // ∫_0^∞ e^{-k} cos(omega k) dk = 1/(1+omega²); truncate at k=40
        for &omega in &[0.0, 0.5, 3.0, 40.0, 300.0] {
            let v = filon_cos(|k| (-k).exp(), 0.0, 40.0, omega, 2000);
            let exact = 1.0 / (1.0 + omega * omega);
            assert_abs_diff_eq!(v, exact, epsilon = 5e-9);
        }
    }

    #[test]
    fn filon_sin_exponential_envelope() {
        // ∫_0^∞ e^{-k} sin(omega k) dk = omega/(1+omega²)
        for &omega in &[0.5, 3.0, 40.0, 300.0] {
            let v = filon_sin(|k| (-k).exp(), 0.0, 40.0, omega, 2000);
            let exact = omega / (1.0 + omega * omega);
            assert_abs_diff_eq!(v, exact, epsilon = 5e-9);
        }
    }

    #[test]
    fn filon_matches_simpson_when_slow() {
        let slow = adaptive_simpson(|k| (-0.3 * k).exp() * (0.7 * k).cos(), 0.0, 20.0, 1e-12);
        let fast = filon_cos(|k| (-0.3 * k).exp(), 0.0, 20.0, 0.7, 1000);
        assert_abs_diff_eq!(slow, fast, epsilon = 1e-10);
    }
}
