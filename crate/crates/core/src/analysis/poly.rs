//! Real polynomials in `s`, coefficients stored in ascending powers.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// `coeffs[i]` multiplies `s^i`. Trailing zeros are dropped.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    /// `s`
    pub fn s() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        self.scale(1.0 / self.leading())
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Quotient and remainder of polynomial long division.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (Polynomial::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let n = d.coeffs.len();
        let mut q = vec![0.0; r.len() - n + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + n - 1] / d.leading();
            q[k] = c;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dc;
            }
            r[k + n - 1] = 0.0;
        }
        r.truncate(n - 1);
        (Polynomial::new(q), Polynomial::new(r))
    }

    /// Monic greatest common divisor; remainders below `tol` relative to the
    /// dividend are treated as zero.
    pub fn gcd(&self, other: &Polynomial, tol: f64) -> Polynomial {
        let (mut a, mut b) = if self.degree() >= other.degree() { (self.monic(), other.monic()) } else { (other.monic(), self.monic()) };
        loop {
            if b.is_zero() || b.degree() == 0 && b.max_abs() <= tol * a.max_abs() {
                return a.monic();
            }
            if b.degree() == 0 {
                return Polynomial::constant(1.0);
            }
            let (_, r) = a.div_rem(&b);
            let r = if r.max_abs() <= tol * a.max_abs() { Polynomial::zero() } else { r.monic() };
            a = b;
            b = r;
        }
    }

    /// Complex roots via the eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let m = self.monic();
        let mut c = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            c[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            c[(i, n - 1)] = -m.coeff(i);
        }
        c.complex_eigenvalues().iter().copied().collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, o: Polynomial) -> Polynomial {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1.0, 2.0]);
        let b = p(&[-1.0, 0.0, 3.0]);
        assert_eq!(&a * &b, p(&[-1.0, -2.0, 3.0, 6.0]));
        assert_eq!(&a + &b, p(&[0.0, 2.0, 3.0]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(a.pow(2), p(&[1.0, 4.0, 4.0]));
        assert_eq!(b.eval_real(2.0), 11.0);
    }

    #[test]
    fn division() {
        let a = p(&[1.0, 2.0]);
        let b = p(&[3.0, 0.0, 1.0]);
        let prod = &(&a * &b) + &p(&[0.5]);
        let (q, r) = prod.div_rem(&b);
        assert_relative_eq!(q.coeffs(), a.coeffs());
        assert_relative_eq!(r.coeffs(), [0.5].as_slice());
    }

    #[test]
    fn gcd_finds_common_factor() {
        let common = p(&[35532.25, 266.6, 1.0]);
        let x = &common * &p(&[1.0, 0.02]);
        let y = &common * &p(&[-4.0, 1.0]);
        let g = x.gcd(&y, 1e-10);
        assert_eq!(g.degree(), 2);
        for (gc, cc) in g.coeffs().iter().zip(common.coeffs()) {
            assert_relative_eq!(*gc, *cc, max_relative = 1e-9);
        }
        assert_eq!(p(&[1.0, 1.0]).gcd(&p(&[2.0, 1.0]), 1e-10), Polynomial::constant(1.0));
    }

    #[test]
    fn roots_of_quadratic() {
        let mut r = p(&[6.0, -5.0, 1.0]).roots().iter().map(|c| c.re).collect::<Vec<_>>();
        r.sort_by(f64::total_cmp);
        assert_relative_eq!(r[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(r[1], 3.0, epsilon = 1e-12);
    }
}
