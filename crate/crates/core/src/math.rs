//! Thin wrappers over `libm` so the crate computes identically with and
//! without `std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}

#[inline]
pub fn atanh(x: f64) -> f64 {
    libm::atanh(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn max(a: f64, b: f64) -> f64 {
    if a > b || b.is_nan() {
        a
    } else {
        b
    }
}

#[inline]
pub fn min(a: f64, b: f64) -> f64 {
    if a < b || b.is_nan() {
        a
    } else {
        b
    }
}

/// Integer power by repeated squaring.
pub fn powi(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi(x, -n);
    }
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n as u32;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Exact binomial coefficient as f64; valid for k <= 20 without rounding.
pub fn binomial(k: u32, i: u32) -> f64 {
    debug_assert!(k <= 20, "binomial table limited to k <= 20");
    if i > k {
        return 0.0;
    }
    let mut num: u64 = 1;
    let i = i.min(k - i);
    for j in 0..i {
        num = num * (k - j) as u64 / (j + 1) as u64;
    }
    num as f64
}

pub const PI: f64 = core::f64::consts::PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_exact_small() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(20, 10), 184756.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn powi_matches_pow() {
        for &x in &[0.3, 1.7, -2.2] {
            for n in 0..8 {
                let a = powi(x, n);
                let b = libm::pow(x, n as f64);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{x}^{n}: {a} vs {b}");
            }
        }
        assert_eq!(powi(2.0, -2), 0.25);
    }
}
