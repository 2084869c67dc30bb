use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::state::{StateVector, C64};
use crate::error::{Error, Result};

/// Admissible residual `max |U^dagger U - I|` for a stored basis.
pub const UNITARY_TOL: f64 = 1e-10;

/// An orthonormal measurement basis stored as a unitary whose column `k`
/// is the state for outcome `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    matrix: DMatrix<C64>,
}

impl Basis {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("basis matrix"));
        }
        let basis = Self { matrix };
        let r = basis.unitarity_residual();
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        Ok(basis)
    }

    /// The computational (standard) basis; for spins this is the `J_z`
    /// eigenbasis ordered `m = +j, ..., -j`.
    pub fn computational(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            matrix: DMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Result<StateVector> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: self.dim(),
            });
        }
        StateVector::new(self.matrix.column(k).iter().copied().collect())
    }

    /// `<column_k | psi>`.
    #[inline]
    pub fn project(&self, k: usize, psi: &[C64]) -> C64 {
        self.matrix.column(k).iter().zip(psi).map(|(u, z)| u.conj() * z).sum()
    }

    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        let gram = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(d, d);
        (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Discrete Fourier basis: column `k` has entries `w^(jk) / sqrt(d)`,
/// `w = exp(2 pi i / d)`. Mutually unbiased with the computational basis.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let matrix = DMatrix::from_fn(d, d, |j, k| {
        // reduce the exponent first so large d keeps full phase accuracy
        let phase = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        C64::from_polar(scale, phase)
    });
    Basis::from_matrix(matrix)
}

/// Spin quantum number of one particle; serialized as `"1/2"`, `"1"`, `"3/2"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpinLabel {
    Half,
    One,
    ThreeHalves,
}

impl SpinLabel {
    pub const ALL: [SpinLabel; 3] = [SpinLabel::Half, SpinLabel::One, SpinLabel::ThreeHalves];

    pub fn from_twice_j(two_j: u32) -> Result<Self> {
        match two_j {
            1 => Ok(SpinLabel::Half),
            2 => Ok(SpinLabel::One),
            3 => Ok(SpinLabel::ThreeHalves),
            other => Err(Error::UnsupportedSpin(other)),
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        Self::from_twice_j(dim.saturating_sub(1) as u32)
    }

    pub fn twice_j(self) -> u32 {
        match self {
            SpinLabel::Half => 1,
            SpinLabel::One => 2,
            SpinLabel::ThreeHalves => 3,
        }
    }

    pub fn j(self) -> f64 {
        self.twice_j() as f64 / 2.0
    }

    /// `2j + 1`.
    pub fn dim(self) -> usize {
        self.twice_j() as usize + 1
    }

    /// Magnetic quantum number of basis index `k` (`m = j - k`).
    pub fn m_of(self, k: usize) -> f64 {
        self.j() - k as f64
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinLabel::Half => "1/2",
            SpinLabel::One => "1",
            SpinLabel::ThreeHalves => "3/2",
        })
    }
}

impl From<SpinLabel> for String {
    fn from(s: SpinLabel) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SpinLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for SpinLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/2" | "0.5" => Ok(SpinLabel::Half),
            "1" | "1.0" => Ok(SpinLabel::One),
            "3/2" | "1.5" => Ok(SpinLabel::ThreeHalves),
            other => Err(Error::config("spin", format!("unsupported spin `{other}`"))),
        }
    }
}

/// The Hermitian `J_y` operator in the `m = +j, ..., -j` ordering.
pub fn angular_momentum_y(spin: SpinLabel) -> DMatrix<C64> {
    let d = spin.dim();
    let j = spin.j();
    let mut jy = DMatrix::<C64>::zeros(d, d);
    for k in 1..d {
        // <m+1| J+ |m> with m = m_of(k); row k-1 holds m+1
        let m = spin.m_of(k);
        let c = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jy[(k - 1, k)] = C64::new(0.0, -c / 2.0);
        jy[(k, k - 1)] = C64::new(0.0, c / 2.0);
    }
    jy
}

/// Basis obtained by rotating the `J_z` eigenbasis about the y axis:
/// columns of `exp(-i theta J_y)`, evaluated through the eigendecomposition
/// of `J_y`.
pub fn spin_rotation_basis(spin: SpinLabel, theta: f64) -> Result<Basis> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("rotation angle"));
    }
    let eig = angular_momentum_y(spin).symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        spin.dim(),
        eig.eigenvalues.iter().map(|&lam| C64::from_polar(1.0, -theta * lam)),
    );
    let matrix = v * DMatrix::from_diagonal(&phases) * v.adjoint();
    Basis::from_matrix(matrix)
}

/// Table of `|<a_i | b_j>|^2`; rows and columns each sum to one.
pub fn overlap_table(a: &Basis, b: &Basis) -> Result<DMatrix<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let g = a.matrix().adjoint() * b.matrix();
    Ok(g.map(|z| z.norm_sqr()))
}
