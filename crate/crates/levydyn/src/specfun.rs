//! Self-contained special functions: gamma, Dawson integral / erfi, and the
//! modified Bessel function K_nu for the half-integer and integer orders the
//! kernel formulas need, on both the positive real axis and the closed right
//! complex half-plane.

use num_complex::Complex64;
use thiserror::Error;

use crate::quad::adaptive_simpson_complex;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SQRT_PI: f64 = 1.772_453_850_905_516;
const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6;

#[derive(Debug, Error, PartialEq)]
pub enum SpecFunError {
    #[error("gamma pole at non-positive integer {0}")]
    GammaPole(f64),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("argument must lie in the closed right half-plane, got {0}")]
    LeftHalfPlane(Complex64),
    #[error("unsupported Bessel order {0}")]
    UnsupportedOrder(f64),
}

/// Orders of K_nu needed by the kernel closed forms (dimensions 1 and 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Half,
    One,
    ThreeHalves,
    Two,
}

impl BesselOrder {
    pub fn value(self) -> f64 {
        match self {
            BesselOrder::Half => 0.5,
            BesselOrder::One => 1.0,
            BesselOrder::ThreeHalves => 1.5,
            BesselOrder::Two => 2.0,
        }
    }

    /// Order (n+1)/2 appearing in the closed-form kernels in dimension n.
    pub fn for_dim(dim: usize) -> Result<Self, SpecFunError> {
        match dim {
            1 => Ok(BesselOrder::One),
            3 => Ok(BesselOrder::Two),
            _ => Err(SpecFunError::UnsupportedOrder((dim + 1) as f64 / 2.0)),
        }
    }
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the real line, poles rejected.
pub fn gamma(x: f64) -> Result<f64, SpecFunError> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(SpecFunError::GammaPole(x));
    }
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin();
        return Ok(std::f64::consts::PI / (s * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}

/// Dawson integral D(x) = e^{-x^2} ∫_0^x e^{t^2} dt.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.5 {
        // Maclaurin series, terms shrink fast here
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-30) {
            term *= -2.0 * x2 / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        return sum;
    }
    // Rybicki's sampling expansion with h = 0.25; truncation error ~ e^{-(pi/2h)^2}
    let h = 0.25;
    let lo = ((ax - 7.5) / h).floor() as i64;
    let hi = ((ax + 7.5) / h).ceil() as i64;
    let mut sum = 0.0;
    let mut n = if lo % 2 == 0 { lo + 1 } else { lo };
    while n <= hi {
        if n != 0 {
            let u = ax - n as f64 * h;
            sum += (-u * u).exp() / n as f64;
        }
        n += 2;
    }
    let d = sum / SQRT_PI;
    if x < 0.0 {
        -d
    } else {
        d
    }
}

/// Imaginary error function erfi(x) = (2/sqrt(pi)) e^{x^2} D(x).
pub fn erfi(x: f64) -> f64 {
    FRAC_2_SQRT_PI * (x * x).exp() * dawson(x)
}

/// Overflow-safe product e^{-a^2} erfi(b), evaluated with a combined exponent.
pub fn gaussian_weighted_erfi(a: f64, b: f64) -> f64 {
    FRAC_2_SQRT_PI * (b * b - a * a).exp() * dawson(b)
}

/// K_0 and K_1 by the convergent log series, valid for 0 < z <= 2.
fn k0_k1_series(z: f64) -> (f64, f64) {
    let t = 0.25 * z * z;
    let lg = (0.5 * z).ln();
    let mut term0 = 1.0; // t^k / (k!)^2
    let mut i0 = 1.0;
    let mut s0 = 0.0; // sum H_k t^k / (k!)^2
    let mut term1 = 1.0; // t^k / (k! (k+1)!)
    let mut i1 = 1.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA; // sum (psi(k+1)+psi(k+2)) t^k/(k!(k+1)!), k=0 term
    let mut h = 0.0; // H_k
    for k in 1..64 {
        let kf = k as f64;
        term0 *= t / (kf * kf);
        h += 1.0 / kf;
        i0 += term0;
        s0 += term0 * h;
        term1 *= t / (kf * (kf + 1.0));
        i1 += term1;
        s1 += term1 * (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if term0 < 1e-18 && term1 < 1e-18 {
            break;
        }
    }
    let i1v = 0.5 * z * i1;
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + lg * i1v - 0.25 * z * s1;
    (k0, k1)
}

/// Steed continued fraction for e^z K_0(z), e^z K_1(z); use for z > 2.
fn k0_k1_cf2_scaled(z: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10000 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

fn k0_k1_scaled(z: f64) -> (f64, f64) {
    if z <= 2.0 {
        let (k0, k1) = k0_k1_series(z);
        let e = z.exp();
        (k0 * e, k1 * e)
    } else {
        k0_k1_cf2_scaled(z)
    }
}

/// e^z K_nu(z) for z > 0; never under- or overflows on [1e-308, inf).
pub fn bessel_k_scaled(order: BesselOrder, z: f64) -> Result<f64, SpecFunError> {
    if !(z > 0.0) {
        return Err(SpecFunError::NonPositiveArgument(z));
    }
    let pref = (std::f64::consts::PI / (2.0 * z)).sqrt();
    Ok(match order {
        BesselOrder::Half => pref,
        BesselOrder::ThreeHalves => pref * (1.0 + 1.0 / z),
        BesselOrder::One => k0_k1_scaled(z).1,
        BesselOrder::Two => {
            let (k0, k1) = k0_k1_scaled(z);
            k0 + 2.0 * k1 / z
        }
    })
}

/// K_nu(z) together with an underflow flag (true when e^{-z} drove the
/// result to zero even though the true value is positive).
pub fn bessel_k_flagged(order: BesselOrder, z: f64) -> Result<(f64, bool), SpecFunError> {
    let scaled = bessel_k_scaled(order, z)?;
    let v = scaled * (-z).exp();
    Ok((v, v == 0.0))
}

/// Modified Bessel function K_nu(z), z > 0, nu in {1/2, 1, 3/2, 2}.
pub fn bessel_k(order: BesselOrder, z: f64) -> Result<f64, SpecFunError> {
    Ok(bessel_k_flagged(order, z)?.0)
}

/// Complex K_0 and K_1 by the log series, |z| <= 2, Re z >= 0.
fn k0_k1_series_complex(z: Complex64) -> (Complex64, Complex64) {
    let t = 0.25 * z * z;
    let lg = (0.5 * z).ln();
    let one = Complex64::new(1.0, 0.0);
    let mut term0 = one;
    let mut i0 = one;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut term1 = one;
    let mut i1 = one;
    let mut s1 = Complex64::new(1.0 - 2.0 * EULER_GAMMA, 0.0);
    let mut h = 0.0;
    for k in 1..80 {
        let kf = k as f64;
        term0 *= t / (kf * kf);
        h += 1.0 / kf;
        i0 += term0;
        s0 += term0 * h;
        term1 *= t / (kf * (kf + 1.0));
        i1 += term1;
        s1 += term1 * (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if term0.norm() < 1e-18 && term1.norm() < 1e-18 {
            break;
        }
    }
    let i1v = 0.5 * z * i1;
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + lg * i1v - 0.25 * z * s1;
    (k0, k1)
}

/// K_nu(z) for integer nu via the Laguerre-type integral
/// K_nu(z) = sqrt(pi/2z) e^{-z} / Gamma(nu+1/2) ∫_0^∞ e^{-u} u^{nu-1/2} (1+u/2z)^{nu-1/2} du,
/// substituted u = v^2; valid for Re z > 0 and accurate for |z| > 2.
fn bessel_k_complex_integral(nu: u32, z: Complex64) -> Complex64 {
    let gamma_nu_half = match nu {
        1 => 0.5 * SQRT_PI,
        _ => 0.75 * SQRT_PI, // nu = 2
    };
    let p = nu as f64 - 0.5;
    let inv2z = 0.5 / z;
    let f = |v: f64| -> Complex64 {
        let v2 = v * v;
        let base = Complex64::new(1.0, 0.0) + v2 * inv2z;
        (-v2).exp() * v2.powi(nu as i32) * (p * base.ln()).exp()
    };
    let integral = 2.0 * adaptive_simpson_complex(f, 0.0, 7.5, 1e-14);
    let pref = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp() / gamma_nu_half;
    pref * integral
}

/// K_nu(z) for nu in {1, 2} on the closed right half-plane (z != 0).
pub fn bessel_k_complex(nu: u32, z: Complex64) -> Result<Complex64, SpecFunError> {
    if !(nu == 1 || nu == 2) {
        return Err(SpecFunError::UnsupportedOrder(nu as f64));
    }
    if z.re < 0.0 || z.norm() == 0.0 {
        return Err(SpecFunError::LeftHalfPlane(z));
    }
    if z.norm() <= 2.0 {
        let (k0, k1) = k0_k1_series_complex(z);
        Ok(match nu {
            1 => k1,
            _ => k0 + 2.0 * k1 / z,
        })
    } else {
        Ok(bessel_k_complex_integral(nu, z))
    }
}
