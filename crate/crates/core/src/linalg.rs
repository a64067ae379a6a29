//! Complex scalars and 2x2 matrix helpers.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn diag(d0: C64, d1: C64) -> Mat2 {
    [[d0, ZERO], [ZERO, d1]]
}

pub fn det(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Largest entrywise deviation of `a` from `b`.
pub fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            m = m.max((a[r][c] - b[r][c]).norm());
        }
    }
    m
}

pub fn is_unitary(a: &Mat2, tol: f64) -> bool {
    max_diff(&mul(a, &adjoint(a)), &identity()) <= tol
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    diag(cis(-theta / 2.0), cis(theta / 2.0))
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn sqrt_x() -> Mat2 {
    [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]
}

/// True when `a` equals `b` up to a global phase.
pub fn equal_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    let (r, col) = (0..4)
        .map(|k| (k / 2, k % 2))
        .max_by(|x, y| b[x.0][x.1].norm().total_cmp(&b[y.0][y.1].norm()))
        .unwrap();
    if a[r][col].norm() < 1e-300 {
        return b[r][col].norm() <= tol;
    }
    let phase = b[r][col] / a[r][col];
    let phase = phase / phase.norm();
    let scaled = [
        [a[0][0] * phase, a[0][1] * phase],
        [a[1][0] * phase, a[1][1] * phase],
    ];
    max_diff(&scaled, b) <= tol
}
