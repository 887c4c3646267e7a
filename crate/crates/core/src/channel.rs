//! Quasi-static Rayleigh fading and the equivalent real channel.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format;
use crate::scalar::Real;
use crate::stbc::{CMatrix, DispersionSet, SymbolVector};

/// Identifies one independent random stream under a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// ChaCha8 keyed by the master seed, positioned on stream `stream_index`.
    pub fn stream(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Derives an unrelated master seed from `seed` and a label (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Circular complex Gaussian with unit variance (each part has variance 1/2).
#[inline]
pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(T::standard_normal(rng) * s, T::standard_normal(rng) * s)
}

/// `rows x cols` matrix of iid unit-variance circular complex Gaussians, drawn row-major.
pub fn complex_normal_matrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> CMatrix<T> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(complex_normal(rng));
    }
    CMatrix::from_row_slice(rows, cols, &data)
}

/// One draw of the `M x N` fading matrix `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T: Real> {
    h: CMatrix<T>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn new(h: CMatrix<T>) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::DimensionMismatch("empty channel matrix".into()));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("channel matrix"));
        }
        Ok(Self { h })
    }

    pub fn zeros(num_tx: usize, num_rx: usize) -> Self {
        Self {
            h: CMatrix::zeros(num_tx, num_rx),
        }
    }

    pub fn sample<R: Rng + ?Sized>(num_tx: usize, num_rx: usize, rng: &mut R) -> Self {
        Self {
            h: complex_normal_matrix(num_tx, num_rx, rng),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.h
    }

    pub fn num_tx(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_rx(&self) -> usize {
        self.h.ncols()
    }

    /// `sum_{m,n} |h_mn|^2`
    pub fn total_gain(&self) -> T {
        self.h.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn to_text(&self) -> String {
        format::write_matrix(&self.h)
    }
}

/// Samples `H` with iid CN(0, 1) entries.
pub fn sample_channel<T: Real, R: Rng + ?Sized>(
    num_tx: usize,
    num_rx: usize,
    rng: &mut R,
) -> ChannelRealization<T> {
    ChannelRealization::sample(num_tx, num_rx, rng)
}

fn check_codeword<T: Real>(s: &CMatrix<T>, h: &ChannelRealization<T>, rho: T) -> Result<()> {
    if s.ncols() != h.num_tx() {
        return Err(Error::DimensionMismatch(format!(
            "codeword has {} columns, channel has {} transmit antennas",
            s.ncols(),
            h.num_tx()
        )));
    }
    if !(rho > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "SNR must be positive, got {rho}"
        )));
    }
    Ok(())
}

/// `sqrt(rho / M) S H` without noise.
pub fn transmit_noiseless<T: Real>(
    s: &CMatrix<T>,
    h: &ChannelRealization<T>,
    rho: T,
) -> Result<CMatrix<T>> {
    check_codeword(s, h, rho)?;
    let gain = (rho / T::of(h.num_tx() as f64)).sqrt();
    Ok((s * h.matrix()).map(|z| z.scale(gain)))
}

/// Received block `R = sqrt(rho / M) S H + V`, `V` iid CN(0, 1).
pub fn transmit<T: Real, R: Rng + ?Sized>(
    s: &CMatrix<T>,
    h: &ChannelRealization<T>,
    rho: T,
    rng: &mut R,
) -> Result<CMatrix<T>> {
    let clean = transmit_noiseless(s, h, rho)?;
    let noise = complex_normal_matrix::<T, _>(clean.nrows(), clean.ncols(), rng);
    Ok(clean + noise)
}

/// `[[Re A, -Im A], [Im A, Re A]]`
pub fn real_expand<T: Real>(a: &CMatrix<T>) -> DMatrix<T> {
    let (t, m) = a.shape();
    DMatrix::from_fn(2 * t, 2 * m, |i, j| {
        let z = a[(i % t, j % m)];
        match (i < t, j < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Stacks the columns of a complex matrix as `[Re x_1; Im x_1; ...; Re x_N; Im x_N]`.
pub fn stack_real<T: Real>(x: &CMatrix<T>) -> DVector<T> {
    let t = x.nrows();
    let mut out = DVector::zeros(2 * t * x.ncols());
    for (n, col) in x.column_iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            out[2 * t * n + i] = z.re;
            out[2 * t * n + t + i] = z.im;
        }
    }
    out
}

/// The real `2TN x 2Q` matrix `G` with `stack(S H) = G u` for `S = encode(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel<T: Real> {
    g: DMatrix<T>,
    code_name: String,
}

impl<T: Real> EquivalentChannel<T> {
    /// Column `q`, row block `n` holds `B_q g_n`, with `B_q = real_expand(A_q)`
    /// and `g_n = [Re h_n; Im h_n]`. `B_q g_n` equals `stack(A_q h_n)`, which is
    /// how it is evaluated here.
    pub fn build(set: &DispersionSet<T>, h: &ChannelRealization<T>) -> Result<Self> {
        if h.num_tx() != set.num_tx() {
            return Err(Error::DimensionMismatch(format!(
                "channel has {} transmit antennas, code {} has {}",
                h.num_tx(),
                set.name(),
                set.num_tx()
            )));
        }
        let rows = 2 * set.block_length() * h.num_rx();
        let mut g = DMatrix::zeros(rows, set.num_real_symbols());
        for (q, a) in set.matrices().iter().enumerate() {
            g.set_column(q, &stack_real(&(a * h.matrix())));
        }
        Ok(Self {
            g,
            code_name: set.name().to_string(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn code_name(&self) -> &str {
        &self.code_name
    }

    /// `G^t G`
    pub fn gram(&self) -> DMatrix<T> {
        self.g.tr_mul(&self.g)
    }

    /// `sqrt(rho / M) G u`, the noiseless real received vector.
    pub fn apply(&self, u: &SymbolVector<T>, rho: T, num_tx: usize) -> DVector<T> {
        (&self.g * &u.0) * (rho / T::of(num_tx as f64)).sqrt()
    }
}

pub fn build_equivalent<T: Real>(
    set: &DispersionSet<T>,
    h: &ChannelRealization<T>,
) -> Result<EquivalentChannel<T>> {
    EquivalentChannel::build(set, h)
}
