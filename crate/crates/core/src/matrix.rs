//! Complex 2×2 matrices and two-component spinors.
//!
//! Every operator in the spin sector acts on a two-dimensional fiber, so a
//! dedicated fixed-size type is used instead of a general matrix library.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Two-component spin amplitude `[c_0, c_1]`.
pub type Spinor = [C64; 2];

pub fn spinor_norm_sqr(s: &Spinor) -> f64 {
    s[0].norm_sqr() + s[1].norm_sqr()
}

/// `⟨a|b⟩` for spinors.
pub fn spinor_dot(a: &Spinor, b: &Spinor) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn spinor_scale(s: &Spinor, k: C64) -> Spinor {
    [s[0] * k, s[1] * k]
}

/// Spin state with Bloch angles `(theta, phi)`: `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn bloch_spinor(theta: f64, phi: f64) -> Spinor {
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Mat2::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// `a0·1 + a⃗·σ⃗` for real coefficients.
    pub fn from_pauli(a0: f64, a: [f64; 3]) -> Self {
        Mat2::new(
            C64::new(a0 + a[2], 0.0),
            C64::new(a[0], -a[1]),
            C64::new(a[0], a[1]),
            C64::new(a0 - a[2], 0.0),
        )
    }

    /// Projector onto the `+1` eigenvector of `n̂·σ⃗`.
    pub fn spin_projector(n: [f64; 3]) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        Mat2::from_pauli(0.5, [0.5 * n[0] / len, 0.5 * n[1] / len, 0.5 * n[2] / len])
    }

    /// Real Pauli coefficients `(a0, a⃗)` of the Hermitian part.
    pub fn pauli_coefficients(&self) -> (f64, [f64; 3]) {
        let m = &self.0;
        let a0 = 0.5 * (m[0][0].re + m[1][1].re);
        let az = 0.5 * (m[0][0].re - m[1][1].re);
        let off = 0.5 * (m[1][0] + m[0][1].conj());
        (a0, [off.re, off.im, az])
    }

    pub fn scale(&self, k: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// `‖A − A†‖`.
    pub fn hermitian_residual(&self) -> f64 {
        (*self - self.adjoint()).norm()
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Mat2 {
        (*self + self.adjoint()).scale_re(0.5)
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
    pub fn eigh(&self) -> ([f64; 2], [Spinor; 2]) {
        let (a0, a) = self.pauli_coefficients();
        let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        let vals = [a0 - r, a0 + r];
        if r == 0.0 {
            return (vals, [[ZERO, ONE], [ONE, ZERO]]);
        }
        let up = up_eigenvector([a[0] / r, a[1] / r, a[2] / r]);
        // the −1 eigenvector is orthogonal to the +1 one
        let down = [-up[1].conj(), up[0].conj()];
        (vals, [down, up])
    }

    /// `exp(−i·H·τ)` for Hermitian `H`.
    pub fn unitary_evolution(&self, tau: f64) -> Mat2 {
        let (a0, a) = self.pauli_coefficients();
        let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        let phase = C64::from_polar(1.0, -a0 * tau);
        if r == 0.0 {
            return Mat2::identity().scale(phase);
        }
        let (c, s) = ((r * tau).cos(), (r * tau).sin());
        let axis = Mat2::from_pauli(0.0, [a[0] / r, a[1] / r, a[2] / r]);
        (Mat2::identity().scale_re(c) - axis.scale(I * s)).scale(phase)
    }

    pub fn is_projector(&self, tol: f64) -> std::result::Result<(), f64> {
        let residual = self.hermitian_residual().max((*self * *self - *self).norm());
        if residual <= tol {
            Ok(())
        } else {
            Err(residual)
        }
    }
}

/// `+1` eigenvector of `n̂·σ⃗`, chosen stable near both poles.
fn up_eigenvector(n: [f64; 3]) -> Spinor {
    if n[2] >= 0.0 {
        let norm = (2.0 * (1.0 + n[2])).sqrt();
        [C64::new((1.0 + n[2]) / norm, 0.0), C64::new(n[0], n[1]) / norm]
    } else {
        let norm = (2.0 * (1.0 - n[2])).sqrt();
        [C64::new(n[0], -n[1]) / norm, C64::new((1.0 - n[2]) / norm, 0.0)]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl std::iter::Sum for Mat2 {
    fn sum<It: Iterator<Item = Mat2>>(iter: It) -> Mat2 {
        iter.fold(Mat2::zero(), |acc, m| acc + m)
    }
}
