//! Mutual-information bounds and estimates, all in bits per channel use.

use nalgebra::{Cholesky, DMatrix};
use num_rational::Ratio;

use crate::channel::{complex_normal_matrix, sample_channel, EquivalentChannel};
use crate::error::{Error, Result};
use crate::montecarlo::{self, EstimateWithError};
use crate::quadrature::{GammaQuadrature, DEFAULT_NODES};
use crate::scalar::Real;
use crate::stbc::{CMatrix, DispersionSet};

/// Linear SNR `rho` at each receive antenna.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrSpec<T>(T);

impl<T: Real> SnrSpec<T> {
    pub fn new(rho: T) -> Result<Self> {
        if rho > T::zero() && rho.is_finite() {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidArgument(format!(
                "SNR must be positive and finite, got {rho}"
            )))
        }
    }

    /// `rho = 10^(dB / 10)`
    pub fn from_db(db: T) -> Result<Self> {
        Self::new(T::of(10.0).powf(db / T::of(10.0)))
    }

    pub fn linear(&self) -> T {
        self.0
    }

    pub fn db(&self) -> T {
        T::of(10.0) * self.0.log10()
    }
}

/// `Q` complex symbols over `T` channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RateParameters {
    pub num_symbols: u32,
    pub block_length: u32,
}

impl RateParameters {
    pub fn new(num_symbols: u32, block_length: u32) -> Result<Self> {
        if num_symbols == 0 || block_length == 0 {
            return Err(Error::InvalidArgument(format!(
                "Q and T must be positive, got Q={num_symbols}, T={block_length}"
            )));
        }
        Ok(Self {
            num_symbols,
            block_length,
        })
    }

    pub fn of_code<T: Real>(set: &DispersionSet<T>) -> Self {
        Self {
            num_symbols: set.num_symbols() as u32,
            block_length: set.block_length() as u32,
        }
    }

    /// `Q / T`, reduced.
    pub fn symbol_rate(&self) -> Ratio<u32> {
        Ratio::new(self.num_symbols, self.block_length)
    }

    pub fn rate<T: Real>(&self) -> T {
        T::of(self.num_symbols as f64) / T::of(self.block_length as f64)
    }
}

/// Power normalization for the exact CLPOD expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Effective SNR `rho / Q`.
    #[default]
    Paper,
    /// Input power `tr(Γ_u) <= T`; effective SNR `rho T / (M Q)`.
    PowerConsistent,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Paper => "paper",
            Normalization::PowerConsistent => "power-consistent",
        }
    }
}

/// Integration method for [`clpod_mmi_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClpodMethod {
    Quadrature { nodes: usize },
    MonteCarlo { trials: u64, seed: u64 },
}

impl Default for ClpodMethod {
    fn default() -> Self {
        ClpodMethod::Quadrature {
            nodes: DEFAULT_NODES,
        }
    }
}

fn check_counts(num_tx: usize, num_rx: usize) -> Result<()> {
    if num_tx == 0 || num_rx == 0 {
        return Err(Error::InvalidArgument(format!(
            "antenna counts must be positive, got M={num_tx}, N={num_rx}"
        )));
    }
    Ok(())
}

/// `q log2(1 + rho N / q)`, the Jensen bound as a function of a real symbol
/// rate `q`. Tends to `rho N log2(e)` as `q` grows and to zero as `q -> 0`.
pub fn jensen_bound_at_rate<T: Real>(rho: T, num_rx: usize, rate: T) -> T {
    if rate <= T::zero() {
        return T::zero();
    }
    rate * (rho * T::of(num_rx as f64) / rate).ln_1p() / T::ln_2()
}

/// Upper bound on SSDD mutual information, `(Q/T) log2(1 + rho N T / Q)`.
/// Independent of the number of transmit antennas.
pub fn ssdd_upper_bound<T: Real>(
    rho: SnrSpec<T>,
    num_rx: usize,
    rate: RateParameters,
) -> EstimateWithError<T> {
    EstimateWithError::closed_form(jensen_bound_at_rate(rho.linear(), num_rx, rate.rate()))
}

/// `(1 / 2T) log2 det(I + (2 rho / M) G^t G Γ_u)` for one realization.
pub fn ssdd_mutual_information<T: Real>(
    set: &DispersionSet<T>,
    equivalent: &EquivalentChannel<T>,
    input_std: &[T],
    rho: T,
) -> Result<T> {
    let gram = equivalent.gram();
    let n = gram.nrows();
    let c = T::of(2.0) * rho / T::of(set.num_tx() as f64);
    // I + c F^t G^t G F with F = Γ_u^{1/2} has the same determinant.
    let k = DMatrix::from_fn(n, n, |i, j| {
        let v = c * input_std[i] * gram[(i, j)] * input_std[j];
        if i == j {
            T::one() + v
        } else {
            v
        }
    });
    let logdet = log2_det_spd(k)?;
    Ok(logdet / T::of(2.0 * set.block_length() as f64))
}

fn log2_det_spd<T: Real>(k: DMatrix<T>) -> Result<T> {
    let chol = Cholesky::new(k).ok_or(Error::NonFinite("log-determinant"))?;
    let l = chol.l_dirty();
    let ln = (0..l.nrows()).fold(T::zero(), |acc, i| acc + l[(i, i)].ln());
    let out = T::of(2.0) * ln / T::ln_2();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("log-determinant"))
    }
}

/// Monte Carlo mutual information of an SSDD at the input covariance
/// `Γ_u = (TM / 2Q) D_A^{-1}`, averaged over `trials` channel draws.
///
/// This is the mutual information at one admissible input, so it estimates
/// the code's MMI from below.
pub fn ssdd_mmi_estimate<T: Real>(
    set: &DispersionSet<T>,
    rho: SnrSpec<T>,
    num_rx: usize,
    trials: u64,
    seed: u64,
) -> Result<EstimateWithError<T>> {
    check_counts(set.num_tx(), num_rx)?;
    let gamma = set.maximizing_input_covariance()?;
    let input_std: Vec<T> = gamma.diagonal().iter().map(|g| g.sqrt()).collect();
    montecarlo::estimate(trials, seed, |rng| {
        let h = sample_channel(set.num_tx(), num_rx, rng);
        let g = EquivalentChannel::build(set, &h)?;
        ssdd_mutual_information(set, &g, &input_std, rho.linear())
    })
}

/// Effective SNR multiplying `X = sum |h_mn|^2` in the CLPOD expression.
pub fn clpod_effective_snr<T: Real>(
    rho: T,
    num_tx: usize,
    rate: RateParameters,
    normalization: Normalization,
) -> T {
    let q = T::of(rate.num_symbols as f64);
    match normalization {
        Normalization::Paper => rho / q,
        Normalization::PowerConsistent => {
            rho * T::of(rate.block_length as f64) / (T::of(num_tx as f64) * q)
        }
    }
}

/// Exact CLPOD mutual information `(Q/T) E[log2(1 + c X)]`, `X ~ Gamma(MN, 1)`,
/// with `c` from [`clpod_effective_snr`]. It does not depend on the
/// dispersion matrices.
pub fn clpod_mmi_exact<T: Real>(
    rho: SnrSpec<T>,
    num_tx: usize,
    num_rx: usize,
    rate: RateParameters,
    normalization: Normalization,
    method: ClpodMethod,
) -> Result<EstimateWithError<T>> {
    check_counts(num_tx, num_rx)?;
    let c = clpod_effective_snr(rho.linear(), num_tx, rate, normalization);
    let r: T = rate.rate();
    match method {
        ClpodMethod::Quadrature { nodes } => {
            let rule = GammaQuadrature::new(nodes, num_tx * num_rx)?;
            let v = rule.expectation(|x| (c * x).ln_1p() / T::ln_2());
            Ok(EstimateWithError::quadrature(r * v, nodes))
        }
        ClpodMethod::MonteCarlo { trials, seed } => montecarlo::estimate(trials, seed, |rng| {
            let h = sample_channel::<T, _>(num_tx, num_rx, rng);
            Ok(r * (c * h.total_gain()).ln_1p() / T::ln_2())
        }),
    }
}

/// Ergodic capacity `E[log2 det(I_N + (rho / M) H^H H)]` with isotropic input.
pub fn mimo_capacity<T: Real>(
    rho: SnrSpec<T>,
    num_tx: usize,
    num_rx: usize,
    trials: u64,
    seed: u64,
) -> Result<EstimateWithError<T>> {
    check_counts(num_tx, num_rx)?;
    let scale = rho.linear() / T::of(num_tx as f64);
    montecarlo::estimate(trials, seed, |rng| {
        let h: CMatrix<T> = complex_normal_matrix(num_tx, num_rx, rng);
        log2_det_channel(&h, scale)
    })
}

/// `log2 det(I + s H^H H)`, evaluated on the smaller Gram matrix.
fn log2_det_channel<T: Real>(h: &CMatrix<T>, s: T) -> Result<T> {
    let gram = if h.ncols() <= h.nrows() {
        h.adjoint() * h
    } else {
        h * h.adjoint()
    };
    let n = gram.nrows();
    let k = CMatrix::<T>::identity(n, n) + gram.map(|z| z.scale(s));
    let chol = Cholesky::new(k).ok_or(Error::NonFinite("log-determinant"))?;
    let l = chol.l_dirty();
    let ln = (0..n).fold(T::zero(), |acc, i| acc + l[(i, i)].re.ln());
    let out = T::of(2.0) * ln / T::ln_2();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("log-determinant"))
    }
}

/// Both sides of the CLPOD / capacity identity:
/// `(clpod_mmi_exact(rho, M, N, rate), (Q/T) C(MN rho / Q, MN, 1))`.
pub fn capacity_relation_check<T: Real>(
    rho: SnrSpec<T>,
    num_tx: usize,
    num_rx: usize,
    rate: RateParameters,
    method: ClpodMethod,
    capacity_trials: u64,
    seed: u64,
) -> Result<(EstimateWithError<T>, EstimateWithError<T>)> {
    let clpod = clpod_mmi_exact(rho, num_tx, num_rx, rate, Normalization::Paper, method)?;
    let mn = num_tx * num_rx;
    let scaled = SnrSpec::new(rho.linear() * T::of(mn as f64) / T::of(rate.num_symbols as f64))?;
    let capacity = mimo_capacity(scaled, mn, 1, capacity_trials, seed)?;
    Ok((clpod, capacity.scaled(rate.rate())))
}

/// Lower end of the initial bisection bracket.
pub const RATE_BRACKET_LOW: f64 = 1e-6;
/// Cap on the doubled upper end of the bracket, `2^20`.
pub const RATE_BRACKET_CAP: f64 = 1_048_576.0;
pub const DEFAULT_RATE_TOL: f64 = 1e-6;

/// Result of [`necessary_symbol_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolRateSolution<T> {
    /// `q*` with `q* log2(1 + rho N / q*)` within `tol` of the capacity.
    pub rate: T,
    /// The capacity estimate the root was solved against.
    pub capacity: EstimateWithError<T>,
    pub iterations: u32,
}

/// Symbol rate at which the SSDD bound reaches the ergodic capacity
/// `C(rho, M, N)`.
pub fn necessary_symbol_rate<T: Real>(
    rho: SnrSpec<T>,
    num_tx: usize,
    num_rx: usize,
    tol: T,
    capacity_trials: u64,
    seed: u64,
) -> Result<SymbolRateSolution<T>> {
    let capacity = mimo_capacity(rho, num_tx, num_rx, capacity_trials, seed)?;
    let (rate, iterations) = solve_rate_for_target(rho.linear(), num_rx, capacity.value, tol)?;
    Ok(SymbolRateSolution {
        rate,
        capacity,
        iterations,
    })
}

/// Bisection for `q log2(1 + rho N / q) = target` on `(0, q_hi]`; the left
/// side is strictly increasing in `q`.
pub fn solve_rate_for_target<T: Real>(
    rho: T,
    num_rx: usize,
    target: T,
    tol: T,
) -> Result<(T, u32)> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let supremum = rho * T::of(num_rx as f64) * T::log2_e();
    if !(target < supremum) {
        return Err(Error::NoFiniteRate {
            capacity: target.to_f64_lossy(),
            supremum: supremum.to_f64_lossy(),
        });
    }
    if target <= T::zero() {
        return Ok((T::zero(), 0));
    }
    let f = |q: T| jensen_bound_at_rate(rho, num_rx, q);
    let mut lo = T::of(RATE_BRACKET_LOW);
    if f(lo) > target {
        lo = T::zero();
    }
    let mut hi = T::one();
    while f(hi) < target {
        hi *= T::of(2.0);
        if hi > T::of(RATE_BRACKET_CAP) {
            return Err(Error::NoFiniteRate {
                capacity: target.to_f64_lossy(),
                supremum: supremum.to_f64_lossy(),
            });
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = (lo + hi) / T::of(2.0);
        let fm = f(mid);
        if (fm - target).abs() <= tol || mid <= lo || mid >= hi || iterations >= 200 {
            return Ok((mid, iterations));
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn snr(rho: f64) -> SnrSpec<f64> {
        SnrSpec::new(rho).unwrap()
    }

    #[test]
    fn snr_conversion() {
        assert!((SnrSpec::<f64>::from_db(30.0).unwrap().linear() - 1000.0).abs() < 1e-9);
        assert!((snr(100.0).db() - 20.0).abs() < 1e-12);
        assert!(SnrSpec::new(0.0f64).is_err());
        assert!(SnrSpec::new(f64::INFINITY).is_err());
    }

    #[test]
    fn rate_is_exact_rational() {
        let r = RateParameters::new(10, 15).unwrap();
        assert_eq!(r.symbol_rate(), Ratio::new(2, 3));
        assert!(RateParameters::new(0, 1).is_err());
        assert_eq!(
            RateParameters::of_code(&builtin::cod_g4::<f64>()),
            RateParameters::new(3, 4).unwrap()
        );
    }

    #[test]
    fn bound_closed_form_values() {
        let b = ssdd_upper_bound(snr(1000.0), 2, RateParameters::new(1, 1).unwrap());
        assert!((b.value - 2001f64.log2()).abs() < 1e-12);
        assert!((b.value - 10.966_505).abs() < 1e-6);
        assert_eq!(b.std_error, 0.0);
        let b = ssdd_upper_bound(snr(1000.0), 5, RateParameters::new(10, 15).unwrap());
        assert!((b.value - 2.0 / 3.0 * 7501f64.log2()).abs() < 1e-12);
        assert!((b.value - 8.581_911).abs() < 1e-6);
        let tiny = ssdd_upper_bound(snr(1e-12), 4, RateParameters::new(1, 1).unwrap());
        assert!(tiny.value < 1e-11);
    }

    #[test]
    fn bound_is_monotone() {
        let rates = [(1, 4), (1, 2), (2, 3), (3, 4), (1, 1), (3, 2)];
        let mut prev_rate = 0.0;
        for &(q, t) in &rates {
            let r = RateParameters::new(q, t).unwrap();
            let v = ssdd_upper_bound(snr(100.0), 2, r).value;
            assert!(v > prev_rate);
            prev_rate = v;
        }
        let r = RateParameters::new(3, 4).unwrap();
        for n in 1..8 {
            assert!(
                ssdd_upper_bound(snr(10.0), n + 1, r).value
                    > ssdd_upper_bound(snr(10.0), n, r).value
            );
        }
        for db in -10..40 {
            let lo = ssdd_upper_bound(SnrSpec::from_db(db as f64).unwrap(), 2, r).value;
            let hi = ssdd_upper_bound(SnrSpec::from_db(db as f64 + 1.0).unwrap(), 2, r).value;
            assert!(hi > lo);
        }
    }

    #[test]
    fn effective_snr_modes_coincide_when_t_equals_m() {
        let r = RateParameters::new(2, 2).unwrap();
        let a = clpod_effective_snr(10.0, 2, r, Normalization::Paper);
        let b = clpod_effective_snr(10.0, 2, r, Normalization::PowerConsistent);
        assert_eq!(a, b);
        let r = RateParameters::new(3, 4).unwrap();
        let b = clpod_effective_snr(9.0f64, 3, r, Normalization::PowerConsistent);
        assert!((b - 4.0).abs() < 1e-15);
    }

    #[test]
    fn clpod_zero_snr() {
        let r = RateParameters::new(1, 1).unwrap();
        let v = clpod_mmi_exact(
            snr(1e-12),
            2,
            2,
            r,
            Normalization::Paper,
            ClpodMethod::default(),
        )
        .unwrap();
        assert!(v.value.abs() < 1e-10);
        assert_eq!(v.method, montecarlo::Method::Quadrature);
    }

    #[test]
    fn clpod_rejects_small_rule() {
        let r = RateParameters::new(1, 1).unwrap();
        let e = clpod_mmi_exact(
            snr(1.0),
            1,
            1,
            r,
            Normalization::Paper,
            ClpodMethod::Quadrature { nodes: 1 },
        );
        assert_eq!(e, Err(Error::TooFewNodes(1)));
    }

    #[test]
    fn zero_snr_estimators() {
        let set = builtin::alamouti::<f64>();
        assert!(
            ssdd_mmi_estimate(&set, snr(1e-12), 1, 100, 1)
                .unwrap()
                .value
                < 1e-10
        );
        assert!(mimo_capacity(snr(1e-12), 2, 2, 100, 1).unwrap().value < 1e-10);
    }

    #[test]
    fn channel_hardening() {
        // H^H H / M -> I_N, so C -> N log2(1 + rho).
        let c = mimo_capacity(snr(10.0), 64, 2, 2_000, 7).unwrap();
        let limit = 2.0 * 11f64.log2();
        assert!(
            ((c.value - limit) / limit).abs() < 0.02,
            "{} vs {limit}",
            c.value
        );
    }

    #[test]
    fn single_antenna_capacity_matches_quadrature() {
        let r = RateParameters::new(1, 1).unwrap();
        let q = clpod_mmi_exact(
            snr(10.0),
            1,
            1,
            r,
            Normalization::Paper,
            ClpodMethod::default(),
        )
        .unwrap();
        let c = mimo_capacity(snr(10.0), 1, 1, 200_000, 3).unwrap();
        assert!(c.agrees_with(&q, 3.0), "{c:?} vs {q:?}");
    }

    #[test]
    fn ssdd_estimate_is_below_bound() {
        for set in builtin::all::<f64>() {
            for n in [1, 2] {
                let e = ssdd_mmi_estimate(&set, snr(100.0), n, 5_000, 11).unwrap();
                let b = ssdd_upper_bound(snr(100.0), n, RateParameters::of_code(&set));
                assert!(e.at_most(&b, 3.0), "{}: {e:?} > {b:?}", set.name());
            }
        }
    }

    #[test]
    fn bisection_hits_target() {
        let (q, _) = solve_rate_for_target(1000.0f64, 2, 15.0, 1e-9).unwrap();
        assert!((jensen_bound_at_rate(1000.0, 2, q) - 15.0).abs() <= 1e-9);
        let (q0, _) = solve_rate_for_target(1000.0, 2, 0.0, 1e-9).unwrap();
        assert_eq!(q0, 0.0);
        // Below f(1e-6): root inside (0, 1e-6].
        let (qs, _) = solve_rate_for_target(1000.0, 2, 1e-6, 1e-12).unwrap();
        assert!(qs < 1e-6);
    }

    #[test]
    fn bisection_reports_infeasible_target() {
        let sup = 10.0 * 2.0 * std::f64::consts::LOG2_E;
        assert!(matches!(
            solve_rate_for_target(10.0, 2, sup + 1.0, 1e-6),
            Err(Error::NoFiniteRate { .. })
        ));
        assert!(solve_rate_for_target(10.0, 2, 1.0, 0.0).is_err());
    }

    #[test]
    fn single_antenna_needs_at_most_unit_rate() {
        for rho in [1.0, 10.0, 100.0, 1000.0] {
            let s = necessary_symbol_rate(snr(rho), 1, 1, 1e-6, 20_000, 5).unwrap();
            assert!(s.rate <= 1.0 + 1e-6, "rho {rho}: {}", s.rate);
        }
    }
}
