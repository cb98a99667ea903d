//! 2x2 real matrices and their eigenvalues.

use core::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: f64) -> Matrix2 {
        Matrix2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries()
            .iter()
            .fold(0.0, |m, x| libm::fmax(m, libm::fabs(*x)))
    }

    pub fn eigenvalues(&self) -> EigenPair {
        eigenvalues_2x2(self)
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;

    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;

    fn sub(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Matrix2;

    fn mul(self, s: f64) -> Matrix2 {
        self.scale(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re, -self.im)
    }

    /// `1 + h * self`, the eigenvalue of `I + h J` for an eigenvalue of `J`.
    pub fn euler_image(&self, h: f64) -> Complex {
        Complex::new(1.0 + h * self.re, h * self.im)
    }

    pub fn dist(&self, other: &Complex) -> f64 {
        libm::hypot(self.re - other.re, self.im - other.im)
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Eigenvalues of a real 2x2 matrix: two reals or a conjugate pair
/// (`lambda1` carries the non-negative imaginary part).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EigenPair {
    pub lambda1: Complex,
    pub lambda2: Complex,
}

impl EigenPair {
    pub fn real(a: f64, b: f64) -> Self {
        Self {
            lambda1: Complex::real(a),
            lambda2: Complex::real(b),
        }
    }

    pub fn conjugate(re: f64, im: f64) -> Self {
        let im = libm::fabs(im);
        Self {
            lambda1: Complex::new(re, im),
            lambda2: Complex::new(re, -im),
        }
    }

    pub fn is_complex(&self) -> bool {
        self.lambda1.im != 0.0
    }

    pub fn as_array(&self) -> [Complex; 2] {
        [self.lambda1, self.lambda2]
    }

    pub fn sum(&self) -> Complex {
        Complex::new(
            self.lambda1.re + self.lambda2.re,
            self.lambda1.im + self.lambda2.im,
        )
    }

    pub fn product(&self) -> Complex {
        self.lambda1.mul(&self.lambda2)
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> EigenPair {
        EigenPair {
            lambda1: f(self.lambda1),
            lambda2: f(self.lambda2),
        }
    }

    /// Largest distance between the two pairs under the better of the two matchings.
    pub fn set_distance(&self, other: &EigenPair) -> f64 {
        let straight = libm::fmax(
            self.lambda1.dist(&other.lambda1),
            self.lambda2.dist(&other.lambda2),
        );
        let crossed = libm::fmax(
            self.lambda1.dist(&other.lambda2),
            self.lambda2.dist(&other.lambda1),
        );
        libm::fmin(straight, crossed)
    }
}

/// Roots of `lambda^2 - tr(M) lambda + det(M) = 0`.
///
/// The discriminant is formed as `((a11 - a22)/2)^2 + a12 a21`, which avoids
/// the `tr^2 - 4 det` cancellation near repeated roots. For real roots the
/// larger-magnitude root is computed first and the other recovered as
/// `det / root`.
pub fn eigenvalues_2x2(m: &Matrix2) -> EigenPair {
    let half_tr = 0.5 * (m.a11 + m.a22);
    let half_gap = 0.5 * (m.a11 - m.a22);
    let disc = half_gap * half_gap + m.a12 * m.a21;
    if disc < 0.0 {
        return EigenPair::conjugate(half_tr, libm::sqrt(-disc));
    }
    let root = libm::sqrt(disc);
    let big = if half_tr >= 0.0 {
        half_tr + root
    } else {
        half_tr - root
    };
    if big == 0.0 {
        return EigenPair::real(0.0, 0.0);
    }
    let small = m.det() / big;
    EigenPair::real(big, small)
}
