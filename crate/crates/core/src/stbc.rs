//! Linear dispersion codes and the SSDD / CLPOD / COD class predicates.
//!
//! A code is stored as its `2Q` complex `T x M` dispersion matrices. Real
//! symbol `2k` carries the real part of complex symbol `k` and real symbol
//! `2k + 1` its imaginary part (zero-based), so the pair
//! `(matrices[2k], matrices[2k + 1])` belongs to one complex symbol.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Default absolute Frobenius tolerance for the class predicates.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSet<T: Real> {
    name: String,
    num_tx: usize,
    block_length: usize,
    num_symbols: usize,
    matrices: Vec<CMatrix<T>>,
}

impl<T: Real> DispersionSet<T> {
    /// Builds a set from `2 * num_symbols` dispersion matrices of shape
    /// `block_length x num_tx`.
    pub fn new(
        name: impl Into<String>,
        num_tx: usize,
        block_length: usize,
        num_symbols: usize,
        matrices: Vec<CMatrix<T>>,
    ) -> Result<Self> {
        if num_tx == 0 || block_length == 0 || num_symbols == 0 {
            return Err(Error::InvalidDispersionSet(format!(
                "M, T and Q must be positive (got M={num_tx}, T={block_length}, Q={num_symbols})"
            )));
        }
        if matrices.len() != 2 * num_symbols {
            return Err(Error::InvalidDispersionSet(format!(
                "expected {} dispersion matrices for Q={num_symbols}, got {}",
                2 * num_symbols,
                matrices.len()
            )));
        }
        for (q, a) in matrices.iter().enumerate() {
            if a.shape() != (block_length, num_tx) {
                return Err(Error::InvalidDispersionSet(format!(
                    "matrix {q} is {}x{}, expected {block_length}x{num_tx}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("dispersion matrix"));
            }
        }
        Ok(Self {
            name: name.into(),
            num_tx,
            block_length,
            num_symbols,
            matrices,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of transmit antennas `M`.
    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    /// Block length `T` in channel uses.
    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// Number of complex information symbols `Q`.
    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    /// Number of real information symbols, `2Q`.
    pub fn num_real_symbols(&self) -> usize {
        2 * self.num_symbols
    }

    pub fn matrices(&self) -> &[CMatrix<T>] {
        &self.matrices
    }

    pub fn matrix(&self, q: usize) -> &CMatrix<T> {
        &self.matrices[q]
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Returns a copy with one entry of one dispersion matrix replaced.
    pub fn with_entry(&self, q: usize, row: usize, col: usize, value: Complex<T>) -> Result<Self> {
        let mut matrices = self.matrices.clone();
        let a = matrices
            .get_mut(q)
            .ok_or_else(|| Error::DimensionMismatch(format!("no dispersion matrix {q}")))?;
        if row >= self.block_length || col >= self.num_tx {
            return Err(Error::DimensionMismatch(format!(
                "entry ({row}, {col}) outside {}x{}",
                self.block_length, self.num_tx
            )));
        }
        a[(row, col)] = value;
        Self::new(
            self.name.clone(),
            self.num_tx,
            self.block_length,
            self.num_symbols,
            matrices,
        )
    }

    /// Codeword `S = sum_q u_q A_q`, accumulated in index order.
    pub fn encode(&self, u: &SymbolVector<T>) -> Result<CMatrix<T>> {
        if u.len() != self.num_real_symbols() {
            return Err(Error::DimensionMismatch(format!(
                "symbol vector has {} entries, code expects 2Q = {}",
                u.len(),
                self.num_real_symbols()
            )));
        }
        let mut s = CMatrix::<T>::zeros(self.block_length, self.num_tx);
        for (a, &uq) in self.matrices.iter().zip(u.iter()) {
            s.zip_apply(a, |acc, aij| *acc += aij.scale(uq));
        }
        Ok(s)
    }

    /// `D_A`: entry `q` is `tr(A_q^H A_q)`.
    pub fn power_diagonal(&self) -> PowerDiagonal<T> {
        PowerDiagonal(
            self.matrices
                .iter()
                .map(|a| a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()))
                .collect(),
        )
    }

    /// The diagonal input covariance with `D_A Γ_u = (TM / 2Q) I`, so that
    /// `tr(D_A Γ_u) = TM` holds with equality.
    pub fn maximizing_input_covariance(&self) -> Result<DMatrix<T>> {
        let d = self.power_diagonal();
        if let Some(index) = d.0.iter().position(|&x| x <= T::zero()) {
            return Err(Error::SingularPowerDiagonal { index });
        }
        let level =
            T::of((self.block_length * self.num_tx) as f64) / T::of(self.num_real_symbols() as f64);
        Ok(DMatrix::from_diagonal(&DVector::from_iterator(
            d.len(),
            d.0.iter().map(|&dq| level / dq),
        )))
    }

    /// Evaluates the SSDD, CLPOD and COD predicates at absolute tolerance `tol`.
    pub fn classify(&self, tol: T) -> CodeClassReport<T> {
        let m = self.num_tx;
        let grams: Vec<_> = self.matrices.iter().map(|a| a.adjoint()).collect();

        let mut max_ssdd = T::zero();
        for q in 0..self.matrices.len() {
            for r in (q + 1)..self.matrices.len() {
                let cross = &grams[q] * &self.matrices[r] + &grams[r] * &self.matrices[q];
                max_ssdd = max_ssdd.max(cross.norm());
            }
        }

        let eye = CMatrix::<T>::identity(m, m);
        let max_clpod = grams
            .iter()
            .zip(&self.matrices)
            .map(|(ah, a)| (ah * a - &eye).norm())
            .fold(T::zero(), |acc, x| acc.max(x));

        let is_ssdd = max_ssdd <= tol;
        let is_clpod = is_ssdd && max_clpod <= tol;
        let is_cod = is_clpod && self.has_cod_entries(tol) && self.has_disjoint_supports(tol);

        CodeClassReport {
            is_ssdd,
            is_clpod,
            is_cod,
            max_ssdd_residual: max_ssdd,
            max_clpod_residual: max_clpod,
        }
    }

    fn has_cod_entries(&self, tol: T) -> bool {
        let (one, zero) = (T::one(), T::zero());
        let allowed = [
            Complex::new(zero, zero),
            Complex::new(one, zero),
            Complex::new(-one, zero),
            Complex::new(zero, one),
            Complex::new(zero, -one),
        ];
        self.matrices
            .iter()
            .flat_map(|a| a.iter())
            .all(|z| allowed.iter().any(|c| (z - c).norm_sqr().sqrt() <= tol))
    }

    fn has_disjoint_supports(&self, tol: T) -> bool {
        let supports: Vec<Vec<bool>> = self
            .matrices
            .chunks(2)
            .map(|pair| {
                (0..self.block_length * self.num_tx)
                    .map(|i| pair.iter().any(|a| a[i].norm_sqr().sqrt() > tol))
                    .collect()
            })
            .collect();
        for k in 0..supports.len() {
            for l in (k + 1)..supports.len() {
                if supports[k].iter().zip(&supports[l]).any(|(&a, &b)| a && b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Real information symbols `u_1 .. u_2Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector<T: Real>(pub DVector<T>);

impl<T: Real> SymbolVector<T> {
    pub fn zeros(len: usize) -> Self {
        Self(DVector::zeros(len))
    }

    /// Interleaves complex symbols into `(Re c_1, Im c_1, Re c_2, ...)`.
    pub fn from_complex(symbols: &[Complex<T>]) -> Self {
        Self(DVector::from_iterator(
            2 * symbols.len(),
            symbols.iter().flat_map(|c| [c.re, c.im]),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }
}

impl<T: Real> From<Vec<T>> for SymbolVector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(DVector::from_vec(v))
    }
}

/// Diagonal of `D_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDiagonal<T: Real>(pub Vec<T>);

impl<T: Real> PowerDiagonal<T> {
    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.0))
    }
}

/// Outcome of [`DispersionSet::classify`].
///
/// `is_clpod` implies `is_ssdd`, and `is_cod` implies `is_clpod`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeClassReport<T> {
    pub is_ssdd: bool,
    pub is_clpod: bool,
    pub is_cod: bool,
    /// Largest `||A_q^H A_r + A_r^H A_q||_F` over `q != r`.
    pub max_ssdd_residual: T,
    /// Largest `||A_q^H A_q - I_M||_F`.
    pub max_clpod_residual: T,
}

/// One entry of a complex design written in terms of its symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignEntry {
    Zero,
    /// `+c_k`
    Sym(usize),
    /// `-c_k`
    NegSym(usize),
    /// `+conj(c_k)`
    Conj(usize),
    /// `-conj(c_k)`
    NegConj(usize),
}

/// Expands a `T x M` complex design, given as a grid of signed (conjugated)
/// symbols, into its real-symbol dispersion matrices.
pub fn from_complex_design<T: Real>(
    name: &str,
    num_symbols: usize,
    rows: &[&[DesignEntry]],
) -> Result<DispersionSet<T>> {
    let block_length = rows.len();
    let num_tx = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != num_tx) {
        return Err(Error::InvalidDispersionSet("ragged design".into()));
    }
    let (zero, one) = (T::zero(), T::one());
    let mut matrices = vec![CMatrix::<T>::zeros(block_length, num_tx); 2 * num_symbols];
    for (t, row) in rows.iter().enumerate() {
        for (m, &entry) in row.iter().enumerate() {
            // (d/dRe c, d/dIm c) of the entry
            let (k, re_part, im_part) = match entry {
                DesignEntry::Zero => continue,
                DesignEntry::Sym(k) => (k, Complex::new(one, zero), Complex::new(zero, one)),
                DesignEntry::NegSym(k) => (k, Complex::new(-one, zero), Complex::new(zero, -one)),
                DesignEntry::Conj(k) => (k, Complex::new(one, zero), Complex::new(zero, -one)),
                DesignEntry::NegConj(k) => (k, Complex::new(-one, zero), Complex::new(zero, one)),
            };
            if k >= num_symbols {
                return Err(Error::InvalidDispersionSet(format!(
                    "symbol index {k} out of range for Q={num_symbols}"
                )));
            }
            matrices[2 * k][(t, m)] += re_part;
            matrices[2 * k + 1][(t, m)] += im_part;
        }
    }
    DispersionSet::new(name, num_tx, block_length, num_symbols, matrices)
}
