//! Minimal 2×2 complex matrix used for polarization transfers.

use num_complex::Complex;

use crate::float::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn zero() -> Self {
        Self([[Complex::new(T::zero(), T::zero()); 2]; 2])
    }

    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self([[one, zero], [zero, one]])
    }

    pub fn from_diag(a: Complex<T>, b: Complex<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self([[a, zero], [zero, b]])
    }

    pub fn from_real(w: &[[T; 2]; 2]) -> Self {
        Self([
            [
                Complex::new(w[0][0], T::zero()),
                Complex::new(w[0][1], T::zero()),
            ],
            [
                Complex::new(w[1][0], T::zero()),
                Complex::new(w[1][1], T::zero()),
            ],
        ])
    }

    /// `self · other` (apply `other` first).
    pub fn mul(&self, other: &Self) -> Self {
        let a = &self.0;
        let b = &other.0;
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for entry in row.iter_mut() {
                *entry = *entry * factor;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = out.0[i][j] + other.0[i][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Self {
        Self([
            [self.0[0][0], self.0[1][0]],
            [self.0[0][1], self.0[1][1]],
        ])
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        let mut sum = T::zero();
        for row in &self.0 {
            for entry in row {
                sum += entry.norm_sqr();
            }
        }
        sum
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
