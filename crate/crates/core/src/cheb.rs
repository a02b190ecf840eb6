//! Chebyshev-basis polynomials: Clenshaw evaluation, derivative and
//! antiderivative coefficient recurrences, (1 - x^2) multiplication, and
//! interpolation at Lobatto points. Coefficient recurrences are exact
//! rational operations, which avoids the cancellation of monomial-basis
//! differentiation.

use crate::math;
use alloc::vec;
use alloc::vec::Vec;

/// Polynomial in the Chebyshev basis: sum of coeffs[j] * T_j(x).
#[derive(Debug, Clone, PartialEq)]
pub struct ChebPoly {
    pub coeffs: Vec<f64>,
}

impl ChebPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        ChebPoly { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        ChebPoly { coeffs: vec![0.0; len.max(1)] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x)
    }

    /// Coefficients of the derivative (one degree lower).
    pub fn derivative(&self) -> ChebPoly {
        let a = &self.coeffs;
        let n = a.len();
        if n <= 1 {
            return ChebPoly::zero(1);
        }
        let mut c = vec![0.0; n - 1];
        // c_j = c_{j+2} + 2 (j+1) a_{j+1}, descending
        let mut j = n - 2;
        loop {
            let carry = if j + 2 <= n - 2 { c[j + 2] } else { 0.0 };
            c[j] = carry + 2.0 * (j as f64 + 1.0) * a[j + 1];
            if j == 0 {
                break;
            }
            j -= 1;
        }
        c[0] *= 0.5;
        ChebPoly { coeffs: c }
    }

    pub fn derivative_n(&self, n: u32) -> ChebPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    /// An antiderivative (constant term set to zero).
    pub fn antiderivative(&self) -> ChebPoly {
        let a = &self.coeffs;
        let n = a.len();
        let mut b = vec![0.0; n + 1];
        if n >= 1 {
            b[1] += a[0];
        }
        if n >= 2 {
            b[2] += a[1] / 4.0;
        }
        for j in 2..n {
            b[j + 1] += a[j] / (2.0 * (j as f64 + 1.0));
            b[j - 1] -= a[j] / (2.0 * (j as f64 - 1.0));
        }
        ChebPoly { coeffs: b }
    }

    /// Coefficients of (1 - x^2) * p, two degrees higher.
    pub fn mul_one_minus_x2(&self) -> ChebPoly {
        let a = &self.coeffs;
        let n = a.len();
        let mut out = vec![0.0; n + 2];
        for (j, &aj) in a.iter().enumerate() {
            out[j] += aj;
            // subtract x^2 T_j = (T_{j+2} + 2 T_j + T_{|j-2|}) / 4
            out[j + 2] -= aj / 4.0;
            out[j] -= aj / 2.0;
            let k = if j >= 2 { j - 2 } else { 2 - j };
            out[k] -= aj / 4.0;
        }
        ChebPoly { coeffs: out }
    }

    pub fn scale(&self, c: f64) -> ChebPoly {
        ChebPoly { coeffs: self.coeffs.iter().map(|a| c * a).collect() }
    }

    pub fn sub(&self, other: &ChebPoly) -> ChebPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (j, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(j).copied().unwrap_or(0.0);
            let b = other.coeffs.get(j).copied().unwrap_or(0.0);
            *slot = a - b;
        }
        ChebPoly { coeffs: out }
    }

    /// Pad or truncate to exactly `len` coefficients.
    pub fn resized(&self, len: usize) -> ChebPoly {
        let mut c = self.coeffs.clone();
        c.resize(len.max(1), 0.0);
        ChebPoly { coeffs: c }
    }

    /// Interpolate the given values at the n+1 Lobatto points
    /// cos(pi j / n), j = 0..n (descending in x), as a degree-n polynomial.
    pub fn interpolate_lobatto(values: &[f64]) -> ChebPoly {
        let n = values.len() - 1;
        if n == 0 {
            return ChebPoly { coeffs: vec![values[0]] };
        }
        // DCT-I: a_k = (2/n) sum'' values_j cos(pi j k / n), primes halving
        // the first and last terms; a_0 and a_n halved once more.
        let mut coeffs = vec![0.0; n + 1];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.5 * (values[0] + if k % 2 == 0 { values[n] } else { -values[n] });
            for (j, &v) in values.iter().enumerate().take(n).skip(1) {
                acc += v * math::cos(math::PI * (j * k) as f64 / n as f64);
            }
            *slot = 2.0 * acc / n as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        ChebPoly { coeffs }
    }
}

/// Lobatto points cos(pi j / n), j = 0..n, descending from 1 to -1.
pub fn lobatto_points(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    (0..=n).map(|j| math::cos(math::PI * j as f64 / n as f64)).collect()
}

pub fn clenshaw(a: &[f64], x: f64) -> f64 {
    if a.len() == 1 {
        return a[0];
    }
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let two_x = 2.0 * x;
    for &ak in a.iter().skip(1).rev() {
        let tmp = two_x * b1 - b2 + ak;
        b2 = b1;
        b1 = tmp;
    }
    x * b1 - b2 + a[0]
}

/// Row [T_0(x), ..., T_{m-1}(x)].
pub fn basis_row(x: f64, m: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(m);
    let mut t0 = 1.0;
    let mut t1 = x;
    for j in 0..m {
        match j {
            0 => out.push(1.0),
            1 => out.push(x),
            _ => {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
                out.push(t2);
            }
        }
    }
}

/// T_n as a ChebPoly.
pub fn chebyshev_t(n: usize) -> ChebPoly {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    ChebPoly { coeffs: c }
}
