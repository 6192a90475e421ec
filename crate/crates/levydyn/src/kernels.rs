//! Transition kernels of Lévy-type semigroups: heat, symmetric-stable,
//! Cauchy and relativistic families in dimensions 1 and 3, plus the harmonic
//! (Mehler) kernel and the Ornstein-Uhlenbeck transition density it induces.

use std::f64::consts::PI;
use thiserror::Error;

use crate::quad::{adaptive_simpson, filon_cos, filon_sin};
use crate::specfun::{bessel_k_scaled, gamma, BesselOrder, SpecFunError};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("stability index must lie in (0, 2), got {0}")]
    InvalidStabilityIndex(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("time ordering violated: {later} <= {earlier}")]
    TimeOrdering { earlier: f64, later: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Spatial dimension the kernels are defined in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Three,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Three => 3,
        }
    }
}

/// Semigroup kernel families k(x, t) = (2 pi)^{-n} ∫ e^{-i p x - t F(p)} dp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// F(p) = D p^2
    Heat { diffusivity: f64 },
    /// F(p) = intensity * |p|^index, index in (0, 2)
    Stable { index: f64, intensity: f64 },
    /// F(p) = c |p|
    Cauchy { speed: f64 },
    /// F(p) = c sqrt(p^2 + m^2 c^2) - m c^2 (Cauchy family when mass = 0)
    Relativistic { mass: f64, speed: f64 },
}

impl KernelFamily {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            KernelFamily::Heat { diffusivity } => {
                if !(diffusivity > 0.0) {
                    return Err(KernelError::NonPositive {
                        name: "diffusivity",
                        value: diffusivity,
                    });
                }
            }
            KernelFamily::Stable { index, intensity } => {
                if !(index > 0.0 && index < 2.0) {
                    return Err(KernelError::InvalidStabilityIndex(index));
                }
                if !(intensity > 0.0) {
                    return Err(KernelError::NonPositive {
                        name: "intensity",
                        value: intensity,
                    });
                }
            }
            KernelFamily::Cauchy { speed } => {
                if !(speed > 0.0) {
                    return Err(KernelError::NonPositive {
                        name: "speed",
                        value: speed,
                    });
                }
            }
            KernelFamily::Relativistic { mass, speed } => {
                if !(speed > 0.0) {
                    return Err(KernelError::NonPositive {
                        name: "speed",
                        value: speed,
                    });
                }
                if mass < 0.0 {
                    return Err(KernelError::Negative {
                        name: "mass",
                        value: mass,
                    });
                }
            }
        }
        Ok(())
    }

    /// Fourier symbol F(p) of the generating operator.
    pub fn symbol(&self, p: f64) -> f64 {
        match *self {
            KernelFamily::Heat { diffusivity } => diffusivity * p * p,
            KernelFamily::Stable { index, intensity } => intensity * p.abs().powf(index),
            KernelFamily::Cauchy { speed } => speed * p.abs(),
            KernelFamily::Relativistic { mass, speed } => {
                let mc = mass * speed;
                speed * (p * p + mc * mc).sqrt() - mass * speed * speed
            }
        }
    }
}

/// Symmetric-stable kernel by Filon synthesis of the cosine transform,
/// (1/pi) ∫_0^∞ e^{-a q^mu} cos(q x) dq with a = t * intensity.
fn stable_kernel_1d(index: f64, a: f64, x: f64) -> Result<f64, KernelError> {
    let mu = index;
    let kmax = (37.0 / a).powf(1.0 / mu);
    if x.abs() < 1e-12 {
        return Ok(gamma(1.0 / mu)? / (mu * a.powf(1.0 / mu) * PI));
    }
    Ok(oscillatory_envelope_integral(|q| (-a * q.powf(mu)).exp(), kmax, x.abs(), false) / PI)
}

/// Radial symmetric-stable kernel in 3D,
/// (1/(2 pi^2 r)) ∫_0^∞ q sin(q r) e^{-a q^mu} dq.
fn stable_kernel_3d(index: f64, a: f64, r: f64) -> Result<f64, KernelError> {
    let mu = index;
    let kmax = (40.0 / a).powf(1.0 / mu);
    if r.abs() < 1e-12 {
        return Ok(gamma(3.0 / mu)? / (mu * a.powf(3.0 / mu) * 2.0 * PI * PI));
    }
    let v = oscillatory_envelope_integral(|q| q * (-a * q.powf(mu)).exp(), kmax, r, true);
    Ok(v / (2.0 * PI * PI * r))
}

/// ∫_0^kmax g(q) cos(omega q) dq (or sin), with geometric refinement towards
/// q = 0 so that the fractional cusp of the envelope is resolved.
fn oscillatory_envelope_integral<F: Fn(f64) -> f64>(
    g: F,
    kmax: f64,
    omega: f64,
    sine: bool,
) -> f64 {
    let segments = ((kmax / 1e-7).log2().ceil() as i64).clamp(16, 64);
    let mut total = 0.0;
    let mut hi = kmax;
    for i in 0..segments {
        let lo = if i == segments - 1 { 0.0 } else { hi * 0.5 };
        total += if sine {
            filon_sin(&g, lo, hi, omega, 256)
        } else {
            filon_cos(&g, lo, hi, omega, 256)
        };
        hi = lo;
    }
    total
}

/// Pointwise semigroup kernel k(x, t); `radius` is |x| in dimension 1 or r in
/// dimension 3.
pub fn semigroup_kernel(
    family: KernelFamily,
    dim: Dim,
    radius: f64,
    t: f64,
) -> Result<f64, KernelError> {
    family.validate()?;
    if !(t > 0.0) {
        return Err(KernelError::NonPositiveTime(t));
    }
    let x = radius.abs();
    let n = dim.n() as f64;
    match family {
        KernelFamily::Heat { diffusivity } => {
            let s = 4.0 * PI * diffusivity * t;
            Ok(s.powf(-0.5 * n) * (-x * x / (4.0 * diffusivity * t)).exp())
        }
        KernelFamily::Stable { index, intensity } => match dim {
            Dim::One => stable_kernel_1d(index, t * intensity, x),
            Dim::Three => stable_kernel_3d(index, t * intensity, x),
        },
        KernelFamily::Cauchy { speed } => cauchy_kernel(speed, dim, x, t),
        KernelFamily::Relativistic { mass, speed } => {
            if mass == 0.0 {
                return cauchy_kernel(speed, dim, x, t);
            }
            let s2 = x * x + speed * speed * t * t;
            let zeta = mass * speed * s2.sqrt();
            let order = BesselOrder::for_dim(dim.n())?;
            let np1 = 0.5 * (n + 1.0);
            // e^{m c^2 t} K(zeta) combined through the scaled Bessel function;
            // the exponent m c^2 t - zeta is always <= 0
            let k_scaled = bessel_k_scaled(order, zeta)?;
            Ok(2.0
                * (mass / (2.0 * PI)).powf(np1)
                * speed.powf(0.5 * (n + 3.0))
                * t
                * s2.powf(-0.5 * np1)
                * (mass * speed * speed * t - zeta).exp()
                * k_scaled)
        }
    }
}

fn cauchy_kernel(speed: f64, dim: Dim, x: f64, t: f64) -> Result<f64, KernelError> {
    let n = dim.n() as f64;
    let np1 = 0.5 * (n + 1.0);
    let ct = speed * t;
    Ok(gamma(np1)? / PI.powf(np1) * ct / (x * x + ct * ct).powf(np1))
}

/// |∫ k(x, t) d^n x - 1|, by adaptive quadrature over a finite ball plus an
/// analytic correction for the algebraic tails of the stable and Cauchy
/// families.
pub fn normalization_defect(family: KernelFamily, dim: Dim, t: f64) -> Result<f64, KernelError> {
    family.validate()?;
    if !(t > 0.0) {
        return Err(KernelError::NonPositiveTime(t));
    }
    let kernel = |r: f64| semigroup_kernel(family, dim, r, t).unwrap_or(0.0);
    let (cutoff, tail) = match family {
        KernelFamily::Heat { diffusivity } => (12.0 * (diffusivity * t).sqrt().max(1.0), 0.0),
        KernelFamily::Relativistic { mass, speed } if mass > 0.0 => {
            (speed * t + 50.0 / (mass * speed) + 10.0, 0.0)
        }
        KernelFamily::Cauchy { speed } | KernelFamily::Relativistic { speed, .. } => {
            let a = speed * t;
            let x = 2000.0 * a.max(1.0);
            let tail = match dim {
                Dim::One => 2.0 / PI * (PI / 2.0 - (x / a).atan()),
                Dim::Three => {
                    4.0 * a / PI
                        * ((PI / 2.0 - (x / a).atan()) / (2.0 * a) + x / (2.0 * (x * x + a * a)))
                }
            };
            (x, tail)
        }
        KernelFamily::Stable { index, intensity } => {
            let a = intensity * t;
            let x = (50.0 * a).powf(1.0 / index).max(50.0);
            (x, stable_tail_mass(index, a, x, dim)?)
        }
    };
    let bulk = match dim {
        Dim::One => 2.0 * adaptive_simpson(kernel, 0.0, cutoff, 1e-11),
        Dim::Three => {
            4.0 * PI * adaptive_simpson(|r| r * r * kernel(r), 0.0, cutoff, 1e-11)
        }
    };
    Ok((bulk + tail - 1.0).abs())
}

/// Mass of the stable kernel outside radius `x`, from the asymptotic series
/// k(r) = (1/pi or 1/(2 pi^2)) sum_j (-1)^{j+1} a^j Gamma(dim-1+j mu+1)
/// sin(pi j mu / 2) / (j! r^{n + j mu}).
fn stable_tail_mass(mu: f64, a: f64, x: f64, dim: Dim) -> Result<f64, KernelError> {
    let mut tail = 0.0;
    let mut sign = 1.0;
    let mut aj = 1.0;
    let mut fact = 1.0;
    for j in 1..=6 {
        let jf = j as f64;
        aj *= a;
        fact *= jf;
        let g = match dim {
            Dim::One => gamma(1.0 + jf * mu)?,
            Dim::Three => gamma(2.0 + jf * mu)?,
        };
        tail += sign * aj * g * (0.5 * PI * jf * mu).sin() / (fact * jf * mu * x.powf(jf * mu));
        sign = -sign;
    }
    Ok(2.0 / PI * tail)
}

/// Harmonic-semigroup (Mehler) kernel in ground-state-reduced form.
pub fn mehler_kernel(x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    if !(t > 0.0) {
        return Err(KernelError::NonPositiveTime(t));
    }
    let e = (-t).exp();
    let w = 1.0 - e * e;
    Ok((PI * w).powf(-0.5) * (-0.5 * (x * x - y * y) - (y - e * x) * (y - e * x) / w).exp())
}

/// The same kernel written with hyperbolic functions; symmetric in x and y.
pub fn mehler_kernel_hyperbolic(x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    if !(t > 0.0) {
        return Err(KernelError::NonPositiveTime(t));
    }
    let sh = t.sinh();
    let ch = t.cosh();
    Ok((0.5 * t).exp() * (2.0 * PI * sh).powf(-0.5)
        * (-((x * x + y * y) * ch - 2.0 * x * y) / (2.0 * sh)).exp())
}

/// Ornstein-Uhlenbeck transition density p(u, s; v, t) with relaxation rate
/// `beta` and noise strength `diffusivity`.
pub fn ou_transition(
    u: f64,
    s: f64,
    v: f64,
    t: f64,
    beta: f64,
    diffusivity: f64,
) -> Result<f64, KernelError> {
    if !(beta > 0.0) {
        return Err(KernelError::NonPositive {
            name: "beta",
            value: beta,
        });
    }
    if !(diffusivity > 0.0) {
        return Err(KernelError::NonPositive {
            name: "diffusivity",
            value: diffusivity,
        });
    }
    if !(t > s) {
        return Err(KernelError::TimeOrdering {
            earlier: s,
            later: t,
        });
    }
    let decay = (-beta * (t - s)).exp();
    let var2 = 2.0 * beta * diffusivity * (1.0 - decay * decay);
    let d = v - u * decay;
    Ok((PI * var2).powf(-0.5) * (-d * d / var2).exp())
}

/// Stationary density of the dimensionless OU process (beta = 1, D = 1/2).
pub fn ou_stationary_density(x: f64) -> f64 {
    PI.powf(-0.5) * (-x * x).exp()
}

/// Stationary covariance of the dimensionless OU process, (1/2) e^{-|t-s|}.
pub fn ou_correlation(s: f64, t: f64) -> f64 {
    0.5 * (-(t - s).abs()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn family_validation() {
        assert!(KernelFamily::Stable {
            index: 2.0,
            intensity: 1.0
        }
        .validate()
        .is_err());
        assert!(KernelFamily::Stable {
            index: 0.0,
            intensity: 1.0
        }
        .validate()
        .is_err());
        assert!(KernelFamily::Heat { diffusivity: -1.0 }.validate().is_err());
        assert!(KernelFamily::Relativistic {
            mass: 0.0,
            speed: 1.0
        }
        .validate()
        .is_ok());
        assert!(semigroup_kernel(KernelFamily::Cauchy { speed: 1.0 }, Dim::One, 0.0, 0.0).is_err());
    }

    #[test]
    fn heat_kernel_matches_gaussian() {
        let k = semigroup_kernel(KernelFamily::Heat { diffusivity: 0.5 }, Dim::One, 1.0, 2.0)
            .unwrap();
        let want = (4.0 * PI).powf(-0.5) * (-0.25f64).exp();
        assert_abs_diff_eq!(k, want, epsilon = 1e-15);
    }

    #[test]
    fn cauchy_kernel_closed_form_1d() {
        // Gamma(1)/pi * ct / (x^2 + c^2 t^2)
        let k = semigroup_kernel(KernelFamily::Cauchy { speed: 1.0 }, Dim::One, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(k, 1.0 / (PI * 5.0), epsilon = 1e-15);
    }

    #[test]
    fn stable_index_one_reproduces_cauchy() {
        let stable = KernelFamily::Stable {
            index: 1.0,
            intensity: 1.0,
        };
        let cauchy = KernelFamily::Cauchy { speed: 1.0 };
        for &t in &[0.1, 1.0, 5.0] {
            for &x in &[0.0, 0.5, 3.0, 20.0] {
                let ks = semigroup_kernel(stable, Dim::One, x, t).unwrap();
                let kc = semigroup_kernel(cauchy, Dim::One, x, t).unwrap();
                assert_abs_diff_eq!(ks, kc, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn stable_index_one_reproduces_cauchy_3d() {
        let stable = KernelFamily::Stable {
            index: 1.0,
            intensity: 1.0,
        };
        let cauchy = KernelFamily::Cauchy { speed: 1.0 };
        for &t in &[0.5, 2.0] {
            for &r in &[0.0, 0.7, 4.0] {
                let ks = semigroup_kernel(stable, Dim::Three, r, t).unwrap();
                let kc = semigroup_kernel(cauchy, Dim::Three, r, t).unwrap();
                assert_abs_diff_eq!(ks, kc, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn relativistic_matches_fourier_synthesis() {
        // oracle: direct damped cosine transform of the symbol
        let family = KernelFamily::Relativistic {
            mass: 1.0,
            speed: 1.0,
        };
        for &(x, t) in &[(0.5, 0.7), (0.0, 1.0), (2.0, 0.5)] {
            let oracle = |q: f64| (-t * family.symbol(q)).exp();
            let v = (filon_cos(oracle, 0.0, 200.0, x, 40000)) / PI;
            let k = semigroup_kernel(family, Dim::One, x, t).unwrap();
            assert_abs_diff_eq!(k, v, epsilon = 1e-8);
        }
    }

    #[test]
    fn relativistic_approaches_cauchy_for_small_mass() {
        let cauchy = semigroup_kernel(KernelFamily::Cauchy { speed: 1.0 }, Dim::One, 1.0, 1.0)
            .unwrap();
        let mut prev = f64::INFINITY;
        for &m in &[1.0, 0.1, 0.01] {
            let k = semigroup_kernel(
                KernelFamily::Relativistic {
                    mass: m,
                    speed: 1.0,
                },
                Dim::One,
                1.0,
                1.0,
            )
            .unwrap();
            let gap = (k - cauchy).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn kernels_normalize_in_both_dimensions() {
        let families = [
            KernelFamily::Heat { diffusivity: 1.0 },
            KernelFamily::Cauchy { speed: 1.0 },
            KernelFamily::Relativistic {
                mass: 1.0,
                speed: 1.0,
            },
            KernelFamily::Stable {
                index: 1.5,
                intensity: 1.0,
            },
        ];
        for family in families {
            for dim in [Dim::One, Dim::Three] {
                let defect = normalization_defect(family, dim, 1.0).unwrap();
                assert!(defect < 1e-8, "{family:?} {dim:?}: defect {defect}");
            }
        }
    }

    #[test]
    fn mehler_forms_agree() {
        for &t in &[0.05, 0.3, 1.0, 4.0] {
            for &x in &[-1.5, 0.0, 0.8] {
                for &y in &[-0.7, 0.4, 2.0] {
                    let a = mehler_kernel(x, y, t).unwrap();
                    let b = mehler_kernel_hyperbolic(x, y, t).unwrap();
                    assert_abs_diff_eq!(a, b, epsilon = 1e-12 * b.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn mehler_long_time_factorizes() {
        // k(x, y, t) -> sqrt(rho(x) rho(y)) with rho the Gaussian ground state
        let k = mehler_kernel(0.7, -0.3, 40.0).unwrap();
        let want = (ou_stationary_density(0.7) * ou_stationary_density(-0.3)).sqrt();
        assert_abs_diff_eq!(k, want, epsilon = 1e-12);
    }

    #[test]
    fn ou_transition_is_normalized() {
        let mass = adaptive_simpson(
            |v| ou_transition(0.8, 0.0, v, 1.3, 2.0, 0.7).unwrap(),
            -30.0,
            30.0,
            1e-12,
        );
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn ou_transition_chapman_kolmogorov() {
        let (u, w) = (0.4, -0.9);
        let (s, r, t) = (0.0, 0.6, 1.7);
        let direct = ou_transition(u, s, w, t, 1.0, 0.5).unwrap();
        let composed = adaptive_simpson(
            |v| {
                ou_transition(u, s, v, r, 1.0, 0.5).unwrap()
                    * ou_transition(v, r, w, t, 1.0, 0.5).unwrap()
            },
            -20.0,
            20.0,
            1e-12,
        );
        assert_abs_diff_eq!(direct, composed, epsilon = 1e-10);
    }

    #[test]
    fn ou_transition_relaxes_to_stationary_density() {
        let p = ou_transition(1.9, 0.0, 0.3, 60.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(p, ou_stationary_density(0.3), epsilon = 1e-12);
    }

    #[test]
    fn ou_transition_reduces_to_mehler_conjugation() {
        // p(u -> v, t) = k(u, v, t) sqrt(rho(v) / rho(u))
        for &(u, v, t) in &[(0.5, -0.2, 0.4), (-1.0, 1.3, 2.0)] {
            let p = ou_transition(u, 0.0, v, t, 1.0, 0.5).unwrap();
            let k = mehler_kernel(u, v, t).unwrap();
            let conj = k * (ou_stationary_density(v) / ou_stationary_density(u)).sqrt();
            assert_abs_diff_eq!(p, conj, epsilon = 1e-13 * p);
        }
    }

    #[test]
    fn ou_correlation_from_double_integral() {
        // E[X(s) X(t)] over the stationary path measure
        let (s, t) = (0.0, 0.8);
        let integrand = |u: f64| {
            // window centered on the transition mean so the bump is sampled
            let mean = u * (-(t - s) as f64).exp();
            let inner = adaptive_simpson(
                |v| v * ou_transition(u, s, v, t, 1.0, 0.5).unwrap(),
                mean - 10.0,
                mean + 10.0,
                1e-11,
            );
            u * ou_stationary_density(u) * inner
        };
        // split at an interior point: the integrand is even and vanishes at 0
        let outer = adaptive_simpson(integrand, -8.0, 1.0, 1e-11)
            + adaptive_simpson(integrand, 1.0, 8.0, 1e-11);
        assert_abs_diff_eq!(outer, ou_correlation(s, t), epsilon = 1e-8);
    }

    #[test]
    fn ou_transition_rejects_bad_times() {
        assert!(ou_transition(0.0, 1.0, 0.0, 1.0, 1.0, 0.5).is_err());
        assert!(ou_transition(0.0, 2.0, 0.0, 1.0, 1.0, 0.5).is_err());
    }
}
