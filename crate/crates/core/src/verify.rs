//! Algebraic and statistical checks on dispersion sets.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{sample_channel, EquivalentChannel, RngSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stbc::DispersionSet;

/// Largest violations of the two quadratic-form identities implied by the
/// SSDD condition, over random real `x, y`:
/// `x^t Re(A_q^H A_r) x = 0` for `q != r`, and
/// `x^t (Im(A_q^H A_r) - Im(A_q^H A_r)^t) y = 0` for all `q, r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaResiduals<T> {
    pub max_quadratic: T,
    pub max_bilinear: T,
}

pub fn lemma_residuals<T: Real, R: Rng + ?Sized>(
    set: &DispersionSet<T>,
    pairs: usize,
    rng: &mut R,
) -> LemmaResiduals<T> {
    let m = set.num_tx();
    let products: Vec<Vec<(DMatrix<T>, DMatrix<T>)>> = set
        .matrices()
        .iter()
        .map(|aq| {
            set.matrices()
                .iter()
                .map(|ar| {
                    let p = aq.adjoint() * ar;
                    let im = p.map(|z| z.im);
                    (p.map(|z| z.re), &im - im.transpose())
                })
                .collect()
        })
        .collect();
    let mut out = LemmaResiduals {
        max_quadratic: T::zero(),
        max_bilinear: T::zero(),
    };
    for _ in 0..pairs {
        let x = DVector::<T>::from_fn(m, |_, _| T::standard_normal(rng));
        let y = DVector::<T>::from_fn(m, |_, _| T::standard_normal(rng));
        for (q, row) in products.iter().enumerate() {
            for (r, (re, im_skew)) in row.iter().enumerate() {
                if q != r {
                    out.max_quadratic = out.max_quadratic.max(x.dot(&(re * &x)).abs());
                }
                out.max_bilinear = out.max_bilinear.max(x.dot(&(im_skew * &y)).abs());
            }
        }
    }
    out
}

/// Largest `max_{q != r} |(G^t G)_qr| / max_q (G^t G)_qq` over `draws` channels.
pub fn gram_offdiagonal_ratio<T: Real>(
    set: &DispersionSet<T>,
    num_rx: usize,
    draws: u64,
    seed: u64,
) -> Result<T> {
    let ratios = (0..draws)
        .into_par_iter()
        .map(|t| {
            let h = sample_channel(set.num_tx(), num_rx, &mut RngSpec::new(seed, t).stream());
            let gram = EquivalentChannel::build(set, &h)?.gram();
            let n = gram.nrows();
            let diag = (0..n).fold(T::zero(), |acc, i| acc.max(gram[(i, i)]));
            let off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(T::zero(), |acc, (i, j)| acc.max(gram[(i, j)].abs()));
            Ok(if diag > T::zero() { off / diag } else { off })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ratios.into_iter().fold(T::zero(), |acc, x| acc.max(x)))
}

/// Entrywise sample mean and standard error of `G^t G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMoments<T: Real> {
    pub mean: DMatrix<T>,
    pub std_error: DMatrix<T>,
    pub draws: u64,
}

impl<T: Real> GramMoments<T> {
    /// Largest `|mean - target| - k * std_error` over entries; the mean is
    /// within `k` standard errors (plus `floor`) of `target` when this is
    /// at most `floor`.
    pub fn max_excess(&self, target: &DMatrix<T>, k: T) -> T {
        self.mean
            .iter()
            .zip(self.std_error.iter())
            .zip(target.iter())
            .fold(
                T::min_value().unwrap_or(-T::one()),
                |acc, ((&m, &s), &t)| acc.max((m - t).abs() - k * s),
            )
    }

    pub fn within(&self, target: &DMatrix<T>, k: T, floor: T) -> bool {
        self.max_excess(target, k) <= floor
    }
}

pub fn gram_moments<T: Real>(
    set: &DispersionSet<T>,
    num_rx: usize,
    draws: u64,
    seed: u64,
) -> Result<GramMoments<T>> {
    if draws < 2 {
        return Err(Error::InvalidArgument("need at least two draws".into()));
    }
    let grams = (0..draws)
        .into_par_iter()
        .map(|t| {
            let h = sample_channel(set.num_tx(), num_rx, &mut RngSpec::new(seed, t).stream());
            Ok(EquivalentChannel::build(set, &h)?.gram())
        })
        .collect::<Result<Vec<DMatrix<T>>>>()?;
    let n = T::of(draws as f64);
    let dim = set.num_real_symbols();
    let mut mean = DMatrix::zeros(dim, dim);
    for g in &grams {
        mean += g;
    }
    mean /= n;
    let mut ss = DMatrix::<T>::zeros(dim, dim);
    for g in &grams {
        let d = g - &mean;
        ss += d.component_mul(&d);
    }
    let std_error = ss.map(|v| (v / (n - T::one()) / n).sqrt());
    Ok(GramMoments {
        mean,
        std_error,
        draws,
    })
}

/// One named pass/fail line of [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Tolerance for the class predicates, the lemma identities and the
    /// relative off-diagonal Gram size.
    pub tol: f64,
    pub lemma_pairs: usize,
    pub diagonality_draws: u64,
    pub expectation_draws: u64,
    /// Absolute slack added to the 3-standard-error band, for entries whose
    /// variance is zero (off-diagonals of an SSDD Gram matrix).
    pub expectation_floor: f64,
    pub seed: u64,
    /// Whether the class check also demands CLPOD and COD, not only SSDD.
    pub require_cod: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            lemma_pairs: 100,
            diagonality_draws: 1000,
            expectation_draws: 100_000,
            expectation_floor: 1e-12,
            seed: 0x55DD,
            require_cod: true,
        }
    }
}

/// Class predicates, lemma identities, per-realization Gram diagonality and
/// `E[G^t G] = D_A` (one receive antenna) for every set.
pub fn run_suite(sets: &[DispersionSet<f64>], config: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let name = set.name();
        let seed = crate::channel::derive_seed(config.seed, i as u64);

        let report = set.classify(config.tol);
        out.push(CheckOutcome {
            name: format!("classify/{name}"),
            passed: report.is_ssdd && (!config.require_cod || (report.is_clpod && report.is_cod)),
            detail: format!(
                "ssdd={} clpod={} cod={} ssdd_residual={:e} clpod_residual={:e}",
                report.is_ssdd,
                report.is_clpod,
                report.is_cod,
                report.max_ssdd_residual,
                report.max_clpod_residual
            ),
        });

        let lemma = lemma_residuals(
            set,
            config.lemma_pairs,
            &mut RngSpec::new(seed, u64::MAX).stream(),
        );
        out.push(CheckOutcome {
            name: format!("lemma/{name}"),
            passed: lemma.max_quadratic <= config.tol && lemma.max_bilinear <= config.tol,
            detail: format!(
                "quadratic={:e} bilinear={:e} pairs={}",
                lemma.max_quadratic, lemma.max_bilinear, config.lemma_pairs
            ),
        });

        let ratio = gram_offdiagonal_ratio(set, 1, config.diagonality_draws, seed)?;
        out.push(CheckOutcome {
            name: format!("gram-diagonal/{name}"),
            passed: ratio <= config.tol,
            detail: format!(
                "max_offdiag_ratio={ratio:e} draws={}",
                config.diagonality_draws
            ),
        });

        let moments = gram_moments(set, 1, config.expectation_draws, derive_second(seed))?;
        let target = set.power_diagonal().to_matrix();
        let excess = moments.max_excess(&target, 3.0);
        out.push(CheckOutcome {
            name: format!("gram-expectation/{name}"),
            passed: excess <= config.expectation_floor,
            detail: format!(
                "max(|mean-D_A| - 3se)={excess:e} draws={}",
                config.expectation_draws
            ),
        });
    }
    Ok(out)
}

fn derive_second(seed: u64) -> u64 {
    crate::channel::derive_seed(seed, 0xE6)
}
