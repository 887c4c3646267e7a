//! Figure experiments and their CSV rows.

use anyhow::{ensure, Context, Result};
use ssdd_core::channel::derive_seed;
use ssdd_core::infotheory::{
    clpod_mmi_exact, mimo_capacity, necessary_symbol_rate, ssdd_upper_bound, DEFAULT_RATE_TOL,
};
use ssdd_core::quadrature::DEFAULT_NODES;
use ssdd_core::{ClpodMethod, EstimateWithError64, Normalization, SnrSpec64};

use crate::table::cod_parameters;

pub const DEFAULT_FIGURE_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub snr_db_list: Vec<f64>,
    pub antenna_range: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub quadrature_nodes: usize,
    pub normalization: Normalization,
    pub cod_method: CodMethod,
    /// Bisection tolerance for the necessary symbol rate.
    pub tol: f64,
}

impl ExperimentConfig {
    pub fn fig1_default() -> Self {
        Self {
            snr_db_list: vec![30.0],
            antenna_range: (2..=6).collect(),
            trials: DEFAULT_FIGURE_TRIALS,
            seed: DEFAULT_SEED,
            quadrature_nodes: DEFAULT_NODES,
            normalization: Normalization::Paper,
            cod_method: CodMethod::Quadrature,
            tol: DEFAULT_RATE_TOL,
        }
    }

    pub fn fig2_default() -> Self {
        Self {
            snr_db_list: vec![10.0, 20.0, 30.0],
            antenna_range: (2..=8).collect(),
            ..Self::fig1_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(
            self.quadrature_nodes >= 2,
            "quadrature nodes must be at least 2"
        );
        ensure!(!self.antenna_range.is_empty(), "antenna list is empty");
        ensure!(
            self.antenna_range.iter().all(|&m| m >= 1),
            "antenna counts must be at least 1"
        );
        ensure!(!self.snr_db_list.is_empty(), "SNR list is empty");
        ensure!(
            self.snr_db_list.iter().all(|d| d.is_finite()),
            "SNR values must be finite"
        );
        ensure!(
            self.tol > 0.0 && self.tol.is_finite(),
            "tolerance must be positive"
        );
        Ok(())
    }

    /// `(M, dB)` pairs ascending in `M`, then in dB, without duplicates.
    pub fn grid(&self) -> Vec<(usize, f64)> {
        let mut ms = self.antenna_range.clone();
        ms.sort_unstable();
        ms.dedup();
        let mut dbs = self.snr_db_list.clone();
        dbs.sort_by(f64::total_cmp);
        dbs.dedup();
        ms.iter()
            .flat_map(|&m| dbs.iter().map(move |&db| (m, db)))
            .collect()
    }
}

/// Seed for one grid point and quantity; independent of row order.
fn point_seed(seed: u64, m: usize, db: f64, label: u64) -> u64 {
    derive_seed(
        derive_seed(derive_seed(seed, m as u64), db.to_bits()),
        label,
    )
}

const CAPACITY_LABEL: u64 = 1;
const COD_LABEL: u64 = 2;

pub const FIG1_HEADER: [&str; 17] = [
    "M",
    "N",
    "snr_db",
    "rho",
    "ssdd_rate",
    "bound",
    "cod_Q",
    "cod_T",
    "normalization",
    "cod_mmi",
    "cod_mmi_std_error",
    "cod_mmi_method",
    "cod_mmi_trials",
    "capacity",
    "capacity_std_error",
    "capacity_trials",
    "units",
];

pub const UNITS: &str = "bits/channel-use";

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub m: usize,
    pub snr_db: f64,
    pub rho: f64,
    pub ssdd_rate: num_rational::Ratio<u32>,
    pub bound: f64,
    pub cod_q: u32,
    pub cod_t: u32,
    pub normalization: Normalization,
    pub cod_mmi: EstimateWithError64,
    pub capacity: EstimateWithError64,
}

impl Fig1Row {
    pub fn record(&self) -> Vec<String> {
        let cod_trials = match self.cod_mmi.method {
            ssdd_core::Method::MonteCarlo => self.cod_mmi.trials,
            _ => 0,
        };
        vec![
            self.m.to_string(),
            self.m.to_string(),
            self.snr_db.to_string(),
            self.rho.to_string(),
            self.ssdd_rate.to_string(),
            self.bound.to_string(),
            self.cod_q.to_string(),
            self.cod_t.to_string(),
            self.normalization.as_str().to_string(),
            self.cod_mmi.value.to_string(),
            self.cod_mmi.std_error.to_string(),
            self.cod_mmi.method.as_str().to_string(),
            cod_trials.to_string(),
            self.capacity.value.to_string(),
            self.capacity.std_error.to_string(),
            self.capacity.trials.to_string(),
            UNITS.to_string(),
        ]
    }
}

pub fn cmd_fig1(config: &ExperimentConfig) -> Result<Vec<Fig1Row>> {
    config.validate()?;
    config
        .grid()
        .into_iter()
        .map(|(m, db)| {
            let rho = SnrSpec64::from_db(db)?;
            let params = cod_parameters(m)?;
            let rate = params.rate_parameters();
            let bound = ssdd_upper_bound(rho, m, rate).value;
            let method = match config.cod_method {
                CodMethod::Quadrature => ClpodMethod::Quadrature {
                    nodes: config.quadrature_nodes,
                },
                CodMethod::MonteCarlo => ClpodMethod::MonteCarlo {
                    trials: config.trials,
                    seed: point_seed(config.seed, m, db, COD_LABEL),
                },
            };
            let cod_mmi = clpod_mmi_exact(rho, m, m, rate, config.normalization, method)?;
            let capacity = mimo_capacity(
                rho,
                m,
                m,
                config.trials,
                point_seed(config.seed, m, db, CAPACITY_LABEL),
            )?;
            Ok(Fig1Row {
                m,
                snr_db: db,
                rho: rho.linear(),
                ssdd_rate: params.ssdd_rate,
                bound,
                cod_q: params.cod_q,
                cod_t: params.cod_t,
                normalization: config.normalization,
                cod_mmi,
                capacity,
            })
        })
        .collect()
}

pub const FIG2_HEADER: [&str; 11] = [
    "M",
    "N",
    "snr_db",
    "rho",
    "necessary_rate",
    "bisection_tol",
    "iterations",
    "capacity",
    "capacity_std_error",
    "capacity_trials",
    "units",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Row {
    pub m: usize,
    pub snr_db: f64,
    pub rho: f64,
    pub necessary_rate: f64,
    pub tol: f64,
    pub iterations: u32,
    pub capacity: EstimateWithError64,
}

impl Fig2Row {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.m.to_string(),
            self.snr_db.to_string(),
            self.rho.to_string(),
            self.necessary_rate.to_string(),
            self.tol.to_string(),
            self.iterations.to_string(),
            self.capacity.value.to_string(),
            self.capacity.std_error.to_string(),
            self.capacity.trials.to_string(),
            UNITS.to_string(),
        ]
    }
}

pub fn cmd_fig2(config: &ExperimentConfig) -> Result<Vec<Fig2Row>> {
    config.validate()?;
    config
        .grid()
        .into_iter()
        .map(|(m, db)| {
            let rho = SnrSpec64::from_db(db)?;
            let s = necessary_symbol_rate(
                rho,
                m,
                m,
                config.tol,
                config.trials,
                point_seed(config.seed, m, db, CAPACITY_LABEL),
            )
            .with_context(|| format!("necessary symbol rate at M=N={m}, {db} dB"))?;
            Ok(Fig2Row {
                m,
                snr_db: db,
                rho: rho.linear(),
                necessary_rate: s.rate,
                tol: config.tol,
                iterations: s.iterations,
                capacity: s.capacity,
            })
        })
        .collect()
}
