//! Orthogonal space-time block codes, their real dispersion matrices, a Gray-mapped
//! QPSK modem, and the linear soft detector `s_hat = A^T Heq^T y`.
//!
//! Codes are stored antennas-by-time (`N_t x T`), the transpose of the usual
//! time-slots-as-rows printing, and expanded into the linear form
//! `X = sum_k C_k Re(s_k) + D_k Im(s_k)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::realify::underline;
use crate::{ComplexMat, Error, Real, RealMat, RealVec, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeName {
    /// Alamouti, 2 antennas, rate 1.
    C2,
    /// Half-rate real-orthogonal extension for 4 antennas over 8 slots.
    C4,
}

impl FromStr for CodeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C2" => Ok(CodeName::C2),
            "C4" => Ok(CodeName::C4),
            _ => Err(Error::UnknownCode(s.to_string())),
        }
    }
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeName::C2 => "C2",
            CodeName::C4 => "C4",
        })
    }
}

/// One entry of a printed transmission matrix: `sign * s_k` or `sign * conj(s_k)`.
#[derive(Clone, Copy)]
struct Entry {
    sign: i8,
    symbol: usize,
    conj: bool,
}

const fn e(sign: i8, symbol: usize) -> Entry {
    Entry {
        sign,
        symbol,
        conj: false,
    }
}

const fn ec(sign: i8, symbol: usize) -> Entry {
    Entry {
        sign,
        symbol,
        conj: true,
    }
}

// Rows are time slots, columns antennas.
const C2_TABLE: [[Entry; 2]; 2] = [[e(1, 0), e(1, 1)], [ec(-1, 1), ec(1, 0)]];

const C4_TABLE: [[Entry; 4]; 8] = [
    [e(1, 0), e(1, 1), e(1, 2), e(1, 3)],
    [e(-1, 1), e(1, 0), e(-1, 3), e(1, 2)],
    [e(-1, 2), e(1, 3), e(1, 0), e(-1, 1)],
    [e(-1, 3), e(-1, 2), e(1, 1), e(1, 0)],
    [ec(1, 0), ec(1, 1), ec(1, 2), ec(1, 3)],
    [ec(-1, 1), ec(1, 0), ec(-1, 3), ec(1, 2)],
    [ec(-1, 2), ec(1, 3), ec(1, 0), ec(-1, 1)],
    [ec(-1, 3), ec(-1, 2), ec(1, 1), ec(1, 0)],
];

#[derive(Debug, Clone, PartialEq)]
pub struct OstbcCode<T: Real> {
    pub name: CodeName,
    pub n_t: usize,
    /// Block length in time slots.
    pub t: usize,
    /// Complex symbols per block.
    pub k: usize,
    /// Coefficient matrices of `Re(s_k)`, each `n_t x t`.
    pub c: Vec<ComplexMat<T>>,
    /// Coefficient matrices of `Im(s_k)`, each `n_t x t`.
    pub d: Vec<ComplexMat<T>>,
    /// Column-norm constant: `A^T A = kappa I`.
    pub kappa: T,
}

impl<T: Real> OstbcCode<T> {
    pub fn new(name: CodeName) -> Self {
        match name {
            CodeName::C2 => Self::from_table(name, &C2_TABLE, 2),
            CodeName::C4 => Self::from_table(name, &C4_TABLE, 4),
        }
    }

    fn from_table<const A: usize>(name: CodeName, rows: &[[Entry; A]], k: usize) -> Self {
        let t = rows.len();
        let n_t = A;
        let zero = ComplexMat::<T>::zeros(n_t, t);
        let mut c = vec![zero.clone(); k];
        let mut d = vec![zero; k];
        let mut appearances = vec![0usize; k];
        for (slot, row) in rows.iter().enumerate() {
            for (ant, entry) in row.iter().enumerate() {
                let sign = T::lit(f64::from(entry.sign));
                let im_sign = if entry.conj { -sign } else { sign };
                c[entry.symbol][(ant, slot)] = Complex::new(sign, T::zero());
                d[entry.symbol][(ant, slot)] = Complex::new(T::zero(), im_sign);
                appearances[entry.symbol] += 1;
            }
        }
        debug_assert!(appearances.windows(2).all(|w| w[0] == w[1]));
        OstbcCode {
            name,
            n_t,
            t,
            k,
            c,
            d,
            kappa: T::of_usize(appearances[0]),
        }
    }

    /// Symbols per channel use.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.t as f64
    }

    /// Constant `c` in `X X^H = c * sum|s_k|^2 * I`, equal to `kappa / n_t`.
    pub fn unitary_constant(&self) -> T {
        self.kappa / T::of_usize(self.n_t)
    }

    pub fn dispersion(&self) -> DispersionMatrix<T> {
        let rows = 2 * self.n_t * self.t;
        let mut a = RealMat::zeros(rows, 2 * self.k);
        for (j, m) in self.c.iter().chain(self.d.iter()).enumerate() {
            a.set_column(j, &underline(m));
        }
        DispersionMatrix {
            a,
            kappa: self.kappa,
        }
    }

    pub fn encode(&self, s: &[Complex<T>]) -> Result<ComplexMat<T>> {
        if s.len() != self.k {
            return Err(Error::DimensionMismatch {
                what: "symbol block",
                expected: self.k,
                got: s.len(),
            });
        }
        let mut x = ComplexMat::zeros(self.n_t, self.t);
        for (k, sk) in s.iter().enumerate() {
            x += self.c[k].map(|z| z * sk.re) + self.d[k].map(|z| z * sk.im);
        }
        Ok(x)
    }
}

/// Real OSTBC dispersion matrix `A = [C_1.., C_K.., D_1.., D_K..]` (underlined columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionMatrix<T: Real> {
    a: RealMat<T>,
    kappa: T,
}

impl<T: Real> DispersionMatrix<T> {
    pub fn matrix(&self) -> &RealMat<T> {
        &self.a
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// Number of real symbol coordinates, `2K`.
    pub fn symbol_dim(&self) -> usize {
        self.a.ncols()
    }

    /// Real dimension of an underlined code block, `2 N_t T`.
    pub fn block_dim(&self) -> usize {
        self.a.nrows()
    }
}

/// `[Re s_1 .. Re s_K, Im s_1 .. Im s_K]`.
pub fn symbol_vector<T: Real>(s: &[Complex<T>]) -> RealVec<T> {
    RealVec::from_iterator(
        2 * s.len(),
        s.iter().map(|z| z.re).chain(s.iter().map(|z| z.im)),
    )
}

/// Gray map `(b1, b2) -> ((1 - 2 b1) + i (1 - 2 b2)) / sqrt(2)`.
pub fn qpsk_mod<T: Real>(bits: &[bool]) -> Result<Vec<Complex<T>>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    let amp = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let level = |b: bool| if b { -amp } else { amp };
    Ok(bits
        .chunks_exact(2)
        .map(|p| Complex::new(level(p[0]), level(p[1])))
        .collect())
}

/// Sign slicer over a real soft vector ordered like [`symbol_vector`].
pub fn qpsk_demod<T: Real>(soft: &RealVec<T>) -> Vec<bool> {
    let k = soft.len() / 2;
    (0..k)
        .flat_map(|i| [soft[i] < T::zero(), soft[k + i] < T::zero()])
        .collect()
}

/// Soft output detector `A^T Heq^T y`.
pub fn soft_detect<T: Real>(
    a: &DispersionMatrix<T>,
    heq: &RealMat<T>,
    y: &RealVec<T>,
) -> Result<RealVec<T>> {
    if heq.ncols() != a.block_dim() {
        return Err(Error::DimensionMismatch {
            what: "equivalent channel columns",
            expected: a.block_dim(),
            got: heq.ncols(),
        });
    }
    if y.len() != heq.nrows() {
        return Err(Error::DimensionMismatch {
            what: "received vector",
            expected: heq.nrows(),
            got: y.len(),
        });
    }
    Ok(a.matrix().tr_mul(&heq.tr_mul(y)))
}
