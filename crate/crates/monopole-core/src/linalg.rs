//! Small fixed-size complex linear algebra used throughout the crate.
//!
//! Everything here is 2x2 or 3-component, so the types are plain value types
//! with hand-written operations instead of a general matrix library.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex scalar shorthand.
pub type C64 = Complex64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex 2-vector (a state in the two-mode Hilbert space).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2(pub [C64; 2]);

impl Vec2 {
    pub fn new(a: C64, b: C64) -> Self {
        Vec2([a, b])
    }

    /// Pairing `<bra|ket>` where `self` is the stored bra vector: the
    /// conjugate transpose of `self` acts on `ket`.
    pub fn pairing(&self, ket: &Vec2) -> C64 {
        self.0[0].conj() * ket.0[0] + self.0[1].conj() * ket.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, z: C64) -> Vec2 {
        Vec2([self.0[0] * z, self.0[1] * z])
    }

    pub fn normalized(&self) -> Vec2 {
        let n = self.norm();
        self.scale(c64(1.0 / n, 0.0))
    }

    /// Outer product `|self><bra|` (conjugating the stored bra entries).
    pub fn outer(&self, bra: &Vec2) -> Mat2 {
        Mat2([
            [self.0[0] * bra.0[0].conj(), self.0[0] * bra.0[1].conj()],
            [self.0[1] * bra.0[0].conj(), self.0[1] * bra.0[1].conj()],
        ])
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

/// Complex 2x2 matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2::default()
    }

    pub fn identity() -> Self {
        Mat2([[c64(1.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(1.0, 0.0)]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let inv = c64(1.0, 0.0) / d;
        Some(Mat2([
            [self.0[1][1] * inv, -self.0[0][1] * inv],
            [-self.0[1][0] * inv, self.0[0][0] * inv],
        ]))
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        Vec2([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
        ])
    }

    pub fn scale(&self, z: C64) -> Mat2 {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= z;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Columns as vectors.
    pub fn col(&self, j: usize) -> Vec2 {
        Vec2([self.0[0][j], self.0[1][j]])
    }

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Mat2 {
        Mat2([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]]])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        m
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Complex 3-vector (field values over the parameter space).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CVec3 {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl CVec3 {
    pub fn new(x: C64, y: C64, z: C64) -> Self {
        CVec3 { x, y, z }
    }

    pub fn zero() -> Self {
        CVec3::default()
    }

    pub fn from_real(x: f64, y: f64, z: f64) -> Self {
        CVec3::new(c64(x, 0.0), c64(y, 0.0), c64(z, 0.0))
    }

    pub fn conj(&self) -> CVec3 {
        CVec3::new(self.x.conj(), self.y.conj(), self.z.conj())
    }

    pub fn scale(&self, s: C64) -> CVec3 {
        CVec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Componentwise cross product; no conjugation is applied here.
    pub fn cross(&self, other: &CVec3) -> CVec3 {
        CVec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Plain bilinear dot product with a real direction vector.
    pub fn dot_real(&self, n: [f64; 3]) -> C64 {
        self.x * n[0] + self.y * n[1] + self.z * n[2]
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }

    pub fn component(&self, axis: usize) -> C64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Matrix-valued 3-vector, one 2x2 block per parameter direction.
#[derive(Clone, Copy, Debug, Default)]
pub struct MatVec3(pub [Mat2; 3]);

impl MatVec3 {
    pub fn zero() -> Self {
        MatVec3::default()
    }

    /// Cross product of two matrix-valued vectors with matrix products kept
    /// in `self` x `other` order, e.g. `(self x other)_x = A_y B_z - A_z B_y`.
    pub fn cross(&self, other: &MatVec3) -> MatVec3 {
        let a = &self.0;
        let b = &other.0;
        MatVec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    /// Componentwise sandwich `<bra| M_a |ket>`.
    pub fn sandwich(&self, bra: &Vec2, ket: &Vec2) -> CVec3 {
        CVec3::new(
            bra.pairing(&self.0[0].mul_vec(ket)),
            bra.pairing(&self.0[1].mul_vec(ket)),
            bra.pairing(&self.0[2].mul_vec(ket)),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &MatVec3) -> MatVec3 {
        MatVec3([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }

    pub fn scale(&self, z: C64) -> MatVec3 {
        MatVec3([self.0[0].scale(z), self.0[1].scale(z), self.0[2].scale(z)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_pairing() {
        let m = Mat2([[c64(1.0, 1.0), c64(0.5, 0.0)], [c64(0.0, -2.0), c64(3.0, 0.2)]]);
        let inv = m.inverse().unwrap();
        let id = m * inv;
        assert!((id - Mat2::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn cross_matches_hand_expansion() {
        let a = CVec3::from_real(1.0, 2.0, 3.0);
        let b = CVec3::new(c64(0.0, 1.0), c64(1.0, 0.0), c64(0.0, -1.0));
        let c = a.cross(&b);
        assert_eq!(c.x, a.y * b.z - a.z * b.y);
        assert_eq!(c.z, a.x * b.y - a.y * b.x);
    }

    #[test]
    fn outer_product_completeness() {
        let v0 = Vec2::new(c64(1.0, 0.0), c64(0.0, 0.0));
        let v1 = Vec2::new(c64(0.0, 0.0), c64(1.0, 0.0));
        let sum = v0.outer(&v0) + v1.outer(&v1);
        assert!((sum - Mat2::identity()).max_abs() == 0.0);
    }
}
