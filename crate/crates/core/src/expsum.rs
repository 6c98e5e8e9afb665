//! Real-valued functions on `[0, 1]` written as `Re sum c e^{beta (x - s)}`,
//! with closed-form derivatives and integrals.

use num_complex::Complex64;

/// One exponential term `coef * e^{beta (x - shift)}`; `shift` is 0 or 1 and is
/// chosen so that the exponential never exceeds one in modulus on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coef: Complex64,
    pub beta: Complex64,
    pub shift: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpSum {
    pub terms: Vec<ExpTerm>,
}

/// `(e^z - 1) / z`, with a short series near the removable singularity.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        let mut acc = Complex64::new(1.0 / 720.0, 0.0);
        for d in [120.0, 24.0, 6.0, 2.0, 1.0] {
            acc = acc * z + 1.0 / d;
        }
        acc
    } else {
        expm1(z) / z
    }
}

/// `e^z - 1` without cancellation for small `z`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

/// `u^m` for a complex base and small integer power.
pub fn cpow(u: Complex64, m: u32) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        r *= u;
    }
    r
}

/// `int_0^1 e^{ba (x - sa) + bb (x - sb)} dx` in closed form.
pub fn exp_pair_integral(ba: Complex64, sa: f64, bb: Complex64, sb: f64) -> Complex64 {
    let s = ba + bb;
    let at0 = -(ba * sa + bb * sb);
    if s.norm() <= 1.0 {
        at0.exp() * phi1(s)
    } else {
        let at1 = ba * (1.0 - sa) + bb * (1.0 - sb);
        (at1.exp() - at0.exp()) / s
    }
}

impl ExpTerm {
    #[inline]
    pub fn deriv(&self, x: f64, order: u32) -> Complex64 {
        self.coef * cpow(self.beta, order) * (self.beta * (x - self.shift)).exp()
    }
}

impl ExpSum {
    pub fn new(terms: Vec<ExpTerm>) -> Self {
        ExpSum { terms }
    }

    /// The constant function `value`.
    pub fn constant(value: f64) -> Self {
        ExpSum::new(vec![ExpTerm {
            coef: Complex64::new(value, 0.0),
            beta: Complex64::new(0.0, 0.0),
            shift: 0.0,
        }])
    }

    /// `cos(omega x)`.
    pub fn cosine(omega: f64) -> Self {
        ExpSum::new(vec![ExpTerm {
            coef: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, omega),
            shift: 0.0,
        }])
    }

    /// Complex value of the `order`-th derivative (before taking the real part).
    pub fn eval_complex(&self, x: f64, order: u32) -> Complex64 {
        self.terms.iter().map(|t| t.deriv(x, order)).sum()
    }

    pub fn eval(&self, x: f64, order: u32) -> f64 {
        self.eval_complex(x, order).re
    }

    /// Sum of term magnitudes of the `order`-th derivative at `x`: the
    /// natural scale against which cancellation is judged.
    pub fn magnitude(&self, x: f64, order: u32) -> f64 {
        self.terms.iter().map(|t| t.deriv(x, order).norm()).sum()
    }

    /// `int_0^1 f dx` of the real function.
    pub fn integral(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let z = if t.shift == 0.0 { t.beta } else { -t.beta };
                (t.coef * phi1(z)).re
            })
            .sum()
    }

    /// Non-conjugated `int_0^1 (sum c e^{..})^2 dx` of the complex sum.
    pub(crate) fn complex_square_integral(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &self.terms {
                acc += a.coef * b.coef * exp_pair_integral(a.beta, a.shift, b.beta, b.shift);
            }
        }
        acc
    }

    /// `int_0^1 |sum c e^{..}|^2 dx` of the complex sum.
    pub(crate) fn modulus_square_integral(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &self.terms {
                acc += a.coef
                    * b.coef.conj()
                    * exp_pair_integral(a.beta, a.shift, b.beta.conj(), b.shift);
            }
        }
        acc.re
    }

    pub fn scale(&mut self, f: Complex64) {
        for t in &mut self.terms {
            t.coef *= f;
        }
    }

    fn raw_product_integral(&self, other: &ExpSum, order: u32) -> f64 {
        // Re(a) Re(b) = (a b + a conj(b)) / 2 for the complex sums a, b.
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            let ca = a.coef * cpow(a.beta, order);
            for b in &other.terms {
                let cb = b.coef * cpow(b.beta, order);
                acc += ca * cb * exp_pair_integral(a.beta, a.shift, b.beta, b.shift);
                acc += ca * cb.conj() * exp_pair_integral(a.beta, a.shift, b.beta.conj(), b.shift);
            }
        }
        0.5 * acc.re
    }

    /// `int_0^1 f^(m) g^(m) dx` of the real functions, symmetric bit-for-bit.
    pub fn product_integral(&self, other: &ExpSum, order: u32) -> f64 {
        0.5 * (self.raw_product_integral(other, order) + other.raw_product_integral(self, order))
    }
}
