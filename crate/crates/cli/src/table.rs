//! Code parameters per transmit-antenna count.

use anyhow::{bail, ensure, Context, Result};
use num_rational::Ratio;
use ssdd_core::RateParameters;

/// Antenna counts of the published parameter table.
pub const TABLE1_ANTENNAS: std::ops::RangeInclusive<usize> = 2..=6;

pub const TABLE1_HEADER: [&str; 5] = ["M", "ssdd_rate", "cod_Q", "cod_T", "cod_rate"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table1Row {
    pub m: usize,
    pub ssdd_rate: Ratio<u32>,
    pub cod_q: u32,
    pub cod_t: u32,
    pub cod_rate: Ratio<u32>,
}

impl Table1Row {
    pub fn rate_parameters(&self) -> RateParameters {
        RateParameters::new(self.cod_q, self.cod_t).expect("nonzero by construction")
    }

    pub fn record(&self) -> [String; 5] {
        [
            self.m.to_string(),
            self.ssdd_rate.to_string(),
            self.cod_q.to_string(),
            self.cod_t.to_string(),
            self.cod_rate.to_string(),
        ]
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    (0..k).try_fold(1u64, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// Maximal-rate, minimal-delay complex orthogonal design parameters for `m`
/// transmit antennas: with `k = ceil(m / 2)` the rate is `(k + 1) / 2k`, and
/// the delay is `C(2k, k - 1)`, doubled when `m = 2 mod 4`.
pub fn cod_parameters(m: usize) -> Result<Table1Row> {
    ensure!(m >= 1, "antenna count must be positive");
    let k = m.div_ceil(2) as u64;
    let rate = Ratio::new(k + 1, 2 * k);
    let base = binomial(2 * k, k - 1).context("delay overflows")?;
    let t = if m % 4 == 2 {
        base.checked_mul(2).context("delay overflows")?
    } else {
        base
    };
    let q = t / rate.denom() * rate.numer();
    let (Ok(q), Ok(t)) = (u32::try_from(q), u32::try_from(t)) else {
        bail!("code parameters for M={m} do not fit in 32 bits");
    };
    let cod_rate = Ratio::new(q, t);
    Ok(Table1Row {
        m,
        ssdd_rate: cod_rate,
        cod_q: q,
        cod_t: t,
        cod_rate,
    })
}

pub fn cmd_table1() -> Vec<Table1Row> {
    TABLE1_ANTENNAS
        .map(|m| cod_parameters(m).expect("table antennas are small"))
        .collect()
}
