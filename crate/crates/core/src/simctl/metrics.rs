use serde::{Deserialize, Serialize};

use super::scenario::TimeSlotRecord;
use crate::channel::linear_to_db;
use crate::radio::throughput;

/// Resolution of emitted CDF tables, in tenths of a dB.
const BINS_PER_DB: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub sinr_db: f64,
    pub cdf: f64,
}

/// Per-user SINR averaged over slots in the linear domain, then in dB.
/// Users are taken from the first record; records must agree on the count.
pub fn time_averaged_sinr_db(records: &[TimeSlotRecord]) -> Vec<f64> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let mut sums = vec![0.0; first.sinr.len()];
    for r in records {
        assert_eq!(r.sinr.len(), sums.len(), "records disagree on user count");
        for (acc, v) in sums.iter_mut().zip(&r.sinr) {
            *acc += v;
        }
    }
    let n = records.len() as f64;
    sums.into_iter().map(|s| linear_to_db(s / n)).collect()
}

/// Empirical CDF of `values_db` sampled on a 0.1 dB lattice spanning the data.
/// Lattice points are `k / 10` for integer `k`, so shifted inputs land on the
/// same lattice.
pub fn empirical_cdf_db(values_db: &[f64]) -> Vec<CdfPoint> {
    let mut v: Vec<f64> = values_db.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Vec::new();
    }
    v.sort_by(f64::total_cmp);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let mut k_lo = (lo * BINS_PER_DB).floor() as i64;
    while k_lo as f64 / BINS_PER_DB > lo {
        k_lo -= 1;
    }
    let mut k_hi = (hi * BINS_PER_DB).ceil() as i64;
    while (k_hi as f64 / BINS_PER_DB) < hi {
        k_hi += 1;
    }
    let n = v.len() as f64;
    (k_lo..=k_hi)
        .map(|k| {
            let x = k as f64 / BINS_PER_DB;
            CdfPoint {
                sinr_db: x,
                cdf: v.partition_point(|&s| s <= x) as f64 / n,
            }
        })
        .collect()
}

/// CDF of per-user time-averaged SINR.
pub fn sinr_cdf(records: &[TimeSlotRecord]) -> Vec<CdfPoint> {
    empirical_cdf_db(&time_averaged_sinr_db(records))
}

/// Mean spectral efficiency per user, over users and slots, bits/s/Hz.
pub fn spectral_efficiency_summary(records: &[TimeSlotRecord]) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in records {
        for &s in &r.sinr {
            sum += throughput(s);
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}
