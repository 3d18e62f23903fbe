//! Spin-s matrix algebra in the Condon-Shortley convention (ħ = 1).
//!
//! Basis vectors are ordered by descending projection, `m = s, s-1, ..., -s`,
//! so `Sz = diag(s, ..., -s)` and the row/column index of `m` is `s - m`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Total spin `s`, stored as the integer `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinValue(u32);

impl SpinValue {
    pub const ZERO: SpinValue = SpinValue(0);
    pub const HALF: SpinValue = SpinValue(1);
    pub const ONE: SpinValue = SpinValue(2);

    pub const fn from_twice(twice_s: u32) -> Self {
        SpinValue(twice_s)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2s + 1` of the spin space.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// All projections `m`, from `s` down to `-s`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let s = self.0 as i32;
        (0..=self.0 as i32).map(move |i| HalfInt(s - 2 * i))
    }

    pub fn contains(self, m: HalfInt) -> bool {
        m.0.abs() <= self.0 as i32 && (self.0 as i32 - m.0) % 2 == 0
    }

    /// Basis index of projection `m`.
    pub fn index_of(self, m: HalfInt) -> Option<usize> {
        self.contains(m).then(|| ((self.0 as i32 - m.0) / 2) as usize)
    }

    pub fn projection_at(self, index: usize) -> HalfInt {
        HalfInt(self.0 as i32 - 2 * index as i32)
    }

    pub(crate) fn check(self, m: HalfInt, field: &str) -> Result<usize> {
        self.index_of(m).ok_or_else(|| {
            Error::invalid(
                field,
                format!("projection {m} is not allowed for spin {}", HalfInt(self.0 as i32)),
            )
        })
    }
}

/// A half-integer stored as twice its value (`HalfInt(1)` is 1/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const PLUS_HALF: HalfInt = HalfInt(1);
    pub const MINUS_HALF: HalfInt = HalfInt(-1);

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Unit vector in spherical angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// `theta` in `[0, π]`, `phi` in `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(
                "direction.theta",
                format!("{theta} outside the range [0, pi]"),
            ));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::invalid(
                "direction.phi",
                format!("{phi} outside the range [0, 2pi)"),
            ));
        }
        Ok(Direction { theta, phi })
    }

    /// Any angles; `phi` is wrapped into `[0, 2π)` and `theta` must be in `[0, π]`.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        Self::new(theta, phi.rem_euclid(TAU) % TAU)
    }

    pub fn z() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    pub fn x() -> Self {
        Direction {
            theta: PI / 2.0,
            phi: 0.0,
        }
    }

    pub fn y() -> Self {
        Direction {
            theta: PI / 2.0,
            phi: PI / 2.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Rotation axis `(sin φ, -cos φ, 0)`, orthogonal to [`Direction::unit`].
    pub fn omega(&self) -> [f64; 3] {
        let (sp, cp) = self.phi.sin_cos();
        [sp, -cp, 0.0]
    }

    /// Angle between two directions; the dot product is clamped before `acos`.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let (a, b) = (self.unit(), other.unit());
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// Square complex matrix acting on a spin space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinMatrix(DMatrix<C64>);

impl SpinMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "spin matrices are square");
        SpinMatrix(m)
    }

    pub fn zeros(dim: usize) -> Self {
        SpinMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        SpinMatrix(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        SpinMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> SpinMatrix {
        SpinMatrix(self.0.adjoint())
    }

    pub fn scale(&self, factor: C64) -> SpinMatrix {
        SpinMatrix(&self.0 * factor)
    }

    pub fn commutator(&self, other: &SpinMatrix) -> SpinMatrix {
        SpinMatrix(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpinMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&SpinMatrix::identity(self.dim()))
    }

    /// Real eigenvalues of a Hermitian matrix, in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl Mul for &SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: &SpinMatrix) -> SpinMatrix {
        SpinMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: &SpinMatrix) -> SpinMatrix {
        SpinMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: &SpinMatrix) -> SpinMatrix {
        SpinMatrix(&self.0 - &rhs.0)
    }
}

/// `(Sx, Sy, Sz)` from the ladder operators
/// `S± |m⟩ = √(s(s+1) - m(m±1)) |m±1⟩`.
pub fn spin_generators(s: SpinValue) -> (SpinMatrix, SpinMatrix, SpinMatrix) {
    let dim = s.dim();
    let sv = s.value();
    let mut raise = DMatrix::<C64>::zeros(dim, dim);
    // column j holds m = s - j; S+ maps it to row j - 1
    for j in 1..dim {
        let m = s.projection_at(j).value();
        raise[(j - 1, j)] = C64::new((sv * (sv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * C64::new(0.5, 0.0);
    let sy = (&raise - &lower) * C64::new(0.0, -0.5);
    let sz: Vec<f64> = s.projections().map(HalfInt::value).collect();
    (SpinMatrix(sx), SpinMatrix(sy), SpinMatrix::diagonal(&sz))
}

fn weighted_sum(generators: &(SpinMatrix, SpinMatrix, SpinMatrix), w: [f64; 3]) -> SpinMatrix {
    let (sx, sy, sz) = generators;
    let m = sx.0.map(|z| z * w[0]) + sy.0.map(|z| z * w[1]) + sz.0.map(|z| z * w[2]);
    SpinMatrix(m)
}

/// The component `n·S`.
pub fn spin_component(n: &Direction, s: SpinValue) -> SpinMatrix {
    weighted_sum(&spin_generators(s), n.unit())
}

/// `exp(iθ ω·S)`: column `k` is the eigenvector of `n·S` with eigenvalue
/// `s - k`, i.e. `(n·S) U = U Sz`. Row index is the z-basis projection.
pub fn direction_rotation(n: &Direction, s: SpinValue) -> SpinMatrix {
    let generator = weighted_sum(&spin_generators(s), n.omega());
    let eigen = generator.0.symmetric_eigen();
    let v = &eigen.eigenvectors;
    let phases = DMatrix::from_fn(s.dim(), s.dim(), |i, j| {
        if i == j {
            C64::from_polar(1.0, n.theta() * eigen.eigenvalues[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SpinMatrix(v * phases * v.adjoint())
}

/// Rank-one projector onto the `lambda` eigenvector of `n·S`, in the z basis.
pub fn spin_projector(n: &Direction, s: SpinValue, lambda: HalfInt) -> Result<SpinMatrix> {
    let k = s.check(lambda, "lambda")?;
    let u = direction_rotation(n, s);
    let col = u.0.column(k);
    Ok(SpinMatrix(col * col.adjoint()))
}
