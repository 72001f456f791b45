//! Reference computations that share no code with the library: a Lanczos
//! gamma, double-exponential quadrature, and closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use fracgd::oracle::{Interval, ScalarOracle};

/// Lanczos approximation (g = 7, 9 terms), good to about 1e-15.
pub fn gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
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
    if z < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut a = C[0];
    let t = z + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// `∫_0^d g(r) r^power dr` by tanh-sinh quadrature. The node distance to 0
/// is formed directly, so `power > -1` singularities at 0 are resolved.
pub fn tanh_sinh_weighted<G: Fn(f64) -> f64>(g: G, d: f64, power: f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    // Wide enough that r^power with power near -1 has decayed at the ends.
    let n = (6.5 / h) as i64;
    for k in -n..=n {
        let s = k as f64 * h;
        let u = 0.5 * PI * s.sinh();
        // r = d (1 + tanh u)/2, formed without overflow on either side
        let r = if u < 0.0 {
            let e = (2.0 * u).exp();
            d * e / (1.0 + e)
        } else {
            d / (1.0 + (-2.0 * u).exp())
        };
        if r <= 0.0 || r >= d {
            continue;
        }
        let cosh_u = u.cosh();
        let w = 0.5 * d * 0.5 * PI * s.cosh() / (cosh_u * cosh_u);
        if w == 0.0 || !w.is_finite() {
            continue;
        }
        sum += w * g(r) * r.powf(power);
    }
    sum * h
}

/// Plain `∫_a^b g` by tanh-sinh.
pub fn tanh_sinh<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    sign * tanh_sinh_weighted(|r| g(lo + r), hi - lo, 0.0)
}

/// Unified Caputo derivative from its definition, given `f^(n)`:
/// `sgn(δ)^n / Γ(n-α) ∫_0^{|δ|} f^(n)(x - sgn(δ) r) r^(n-α-1) dr`.
pub fn caputo_reference<F: Fn(f64) -> f64>(fnth: F, alpha: f64, n: u32, c: f64, x: f64) -> f64 {
    let delta = x - c;
    let s = delta.signum();
    let nf = n as f64;
    let integral = tanh_sinh_weighted(|r| fnth(x - s * r), delta.abs(), nf - alpha - 1.0);
    s.powi(n as i32) * integral / gamma(nf - alpha)
}

/// Right Caputo derivative for `x < c`, written as in its own definition:
/// `(-1)^n / Γ(n-α) ∫_x^c f^(n)(t) (t-x)^(n-α-1) dt`.
pub fn right_caputo_reference<F: Fn(f64) -> f64>(
    fnth: F,
    alpha: f64,
    n: u32,
    c: f64,
    x: f64,
) -> f64 {
    assert!(x < c);
    let nf = n as f64;
    let integral = tanh_sinh_weighted(|r| fnth(x + r), c - x, nf - alpha - 1.0);
    (-1f64).powi(n as i32) * integral / gamma(nf - alpha)
}

/// Polynomial with ascending coefficients and its derivatives.
#[derive(Debug, Clone)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
    pub fn deriv(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }
}

/// A polynomial as a `ScalarOracle`, evaluated from its own coefficients.
#[derive(Debug, Clone)]
pub struct PolyOracle {
    pub f: Poly,
    pub d1: Poly,
    pub d2: Poly,
}

impl PolyOracle {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let f = Poly(coeffs);
        let d1 = f.deriv();
        let d2 = d1.deriv();
        Self { f, d1, d2 }
    }
}

impl ScalarOracle for PolyOracle {
    fn value(&self, t: f64) -> f64 {
        self.f.eval(t)
    }
    fn deriv1(&self, t: f64) -> f64 {
        self.d1.eval(t)
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        Some(self.d2.eval(t))
    }
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
}

/// Central difference of `f` at `t`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, t: f64) -> f64 {
    let h = 1e-5 * (1.0 + t.abs());
    (f(t + h) - f(t - h)) / (2.0 * h)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
