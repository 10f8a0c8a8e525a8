//! Per-jury statistics accumulation and the closed-form binomial baselines
//! used to cross-check Struck and Random selection.
//!
//! A [`SimulationSummary`] keeps one compact record per simulated jury
//! (integer tail counts, group counts, jury extremes) so that merged
//! summaries are bit-identical regardless of how replications were split
//! across workers: merging appends records in replication order and every
//! aggregate reduces over integers.

use crate::error::{Error, Result};
use crate::procedure::{Group, JuryOutcome};
use crate::special::{choose_u128, ln_choose};

/// A Monte Carlo estimate with its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn frequency(hits: u64, n: u64) -> Estimate {
        let q = hits as f64 / n as f64;
        Estimate {
            value: q,
            std_error: (q * (1.0 - q) / n as f64).sqrt(),
        }
    }
}

/// Table-2 style minority statistics.
#[derive(Debug, Clone, Copy)]
pub struct MinorityStats {
    pub mean_fraction: Estimate,
    pub std_fraction: Estimate,
    pub frac_at_least_1: Estimate,
}

/// Table-3 style balanced-group statistics.
#[derive(Debug, Clone, Copy)]
pub struct GroupFractionStats {
    pub mean_fraction_a: Estimate,
    pub std_fraction_a: Estimate,
}

/// Whole-jury extremeness frequencies.
#[derive(Debug, Clone, Copy)]
pub struct ExtremeJuryStats {
    pub p_min_le: Estimate,
    pub p_max_ge: Estimate,
}

/// Number of fixed bins in the selected-c histogram.
pub const C_HIST_BINS: usize = 50;

/// Accumulated per-jury statistics for one procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    j: usize,
    thresholds: Vec<f64>,
    median: f64,
    // One entry per jury (flattened for tail counts).
    tail_counts: Vec<u8>,
    minority_counts: Vec<u8>,
    below_median_counts: Vec<u8>,
    min_c: Vec<f64>,
    max_c: Vec<f64>,
    // Aggregate histogram of every seated juror's c.
    c_histogram: [u64; C_HIST_BINS],
}

impl SimulationSummary {
    /// Empty summary for juries of size `j`, tracking tail counts at the
    /// given ascending thresholds and below-median counts at `median`.
    pub fn new(j: usize, thresholds: Vec<f64>, median: f64) -> Result<Self> {
        if j == 0 || j > u8::MAX as usize {
            return Err(Error::InvalidConfig(format!("jury size {j} out of range")));
        }
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig(
                "thresholds must be sorted ascending".into(),
            ));
        }
        Ok(SimulationSummary {
            j,
            thresholds,
            median,
            tail_counts: Vec::new(),
            minority_counts: Vec::new(),
            below_median_counts: Vec::new(),
            min_c: Vec::new(),
            max_c: Vec::new(),
            c_histogram: [0; C_HIST_BINS],
        })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn median(&self) -> f64 {
        self.median
    }

    pub fn n_sims(&self) -> u64 {
        self.minority_counts.len() as u64
    }

    /// Fold one jury outcome into the summary (single pass over seats).
    pub fn accumulate(&mut self, outcome: &JuryOutcome) {
        assert_eq!(outcome.selected.len(), self.j, "outcome jury size mismatch");
        let t = self.thresholds.len();
        let base = self.tail_counts.len();
        self.tail_counts.resize(base + t, 0);
        let mut minority = 0u8;
        let mut below_med = 0u8;
        let mut min_c = f64::INFINITY;
        let mut max_c = f64::NEG_INFINITY;
        for juror in &outcome.selected {
            for (k, &thr) in self.thresholds.iter().enumerate() {
                if juror.c <= thr {
                    self.tail_counts[base + k] += 1;
                } else {
                    break;
                }
            }
            if juror.group == Group::A {
                minority += 1;
            }
            if juror.c <= self.median {
                below_med += 1;
            }
            min_c = min_c.min(juror.c);
            max_c = max_c.max(juror.c);
            let bin = ((juror.c * C_HIST_BINS as f64) as usize).min(C_HIST_BINS - 1);
            self.c_histogram[bin] += 1;
        }
        self.minority_counts.push(minority);
        self.below_median_counts.push(below_med);
        self.min_c.push(min_c);
        self.max_c.push(max_c);
    }

    /// Append another summary's records (associative, with `new` as the
    /// identity). Both sides must share the same configuration.
    pub fn merge(&mut self, other: &SimulationSummary) {
        assert_eq!(self.j, other.j, "merge requires identical jury size");
        assert_eq!(self.thresholds, other.thresholds);
        assert_eq!(self.median, other.median);
        self.tail_counts.extend_from_slice(&other.tail_counts);
        self.minority_counts.extend_from_slice(&other.minority_counts);
        self.below_median_counts.extend_from_slice(&other.below_median_counts);
        self.min_c.extend_from_slice(&other.min_c);
        self.max_c.extend_from_slice(&other.max_c);
        for (mine, theirs) in self.c_histogram.iter_mut().zip(other.c_histogram.iter()) {
            *mine += theirs;
        }
    }

    /// Histogram of every seated juror's conviction probability over
    /// [`C_HIST_BINS`] equal bins of [0, 1].
    pub fn c_histogram(&self) -> &[u64; C_HIST_BINS] {
        &self.c_histogram
    }

    /// Empirical probability that a jury holds at least `x` jurors at or
    /// below `thresholds[threshold_idx]`.
    pub fn prob_at_least(&self, x: usize, threshold_idx: usize) -> Result<Estimate> {
        if x == 0 || x > self.j {
            return Err(Error::Domain(format!("x={x} outside 1..={}", self.j)));
        }
        if threshold_idx >= self.thresholds.len() {
            return Err(Error::OutOfBounds(format!(
                "threshold index {threshold_idx} of {}",
                self.thresholds.len()
            )));
        }
        let n = self.n_sims();
        assert!(n > 0, "no simulations accumulated");
        let t = self.thresholds.len();
        let hits = self
            .tail_counts
            .chunks_exact(t)
            .filter(|row| row[threshold_idx] as usize >= x)
            .count() as u64;
        Ok(Estimate::frequency(hits, n))
    }

    fn fraction_stats(&self) -> (Estimate, Estimate) {
        let n = self.n_sims();
        assert!(n > 0, "no simulations accumulated");
        let sum: u64 = self.minority_counts.iter().map(|&m| m as u64).sum();
        let sum_sq: u64 = self.minority_counts.iter().map(|&m| (m as u64).pow(2)).sum();
        let mean_count = sum as f64 / n as f64;
        let var_count = (sum_sq as f64 / n as f64 - mean_count * mean_count).max(0.0);
        let j = self.j as f64;
        let mean = Estimate {
            value: mean_count / j,
            std_error: var_count.sqrt() / j / (n as f64).sqrt(),
        };
        let std = Estimate {
            value: var_count.sqrt() / j,
            std_error: var_count.sqrt() / j / (2.0 * n as f64).sqrt(),
        };
        (mean, std)
    }

    /// Mean and standard deviation of the group-a fraction plus the
    /// frequency of juries seating at least one group-a member.
    pub fn minority_stats(&self) -> MinorityStats {
        let (mean_fraction, std_fraction) = self.fraction_stats();
        let hits = self.minority_counts.iter().filter(|&&m| m >= 1).count() as u64;
        MinorityStats {
            mean_fraction,
            std_fraction,
            frac_at_least_1: Estimate::frequency(hits, self.n_sims()),
        }
    }

    /// The minority statistics restated for balanced-group comparisons.
    pub fn balanced_group_stats(&self) -> GroupFractionStats {
        let (mean_fraction_a, std_fraction_a) = self.fraction_stats();
        GroupFractionStats {
            mean_fraction_a,
            std_fraction_a,
        }
    }

    /// At-least-x frequencies at the population median, for x = 0..=j.
    pub fn median_count_stats(&self) -> Vec<Estimate> {
        let n = self.n_sims();
        assert!(n > 0, "no simulations accumulated");
        (0..=self.j)
            .map(|x| {
                let hits = self
                    .below_median_counts
                    .iter()
                    .filter(|&&m| m as usize >= x)
                    .count() as u64;
                Estimate::frequency(hits, n)
            })
            .collect()
    }

    /// Frequencies of whole-jury extremeness: lowest seat at or below
    /// `c_lo`, highest seat at or above `c_hi`.
    pub fn minmax_extreme_stats(&self, c_lo: f64, c_hi: f64) -> ExtremeJuryStats {
        let n = self.n_sims();
        assert!(n > 0, "no simulations accumulated");
        let lo_hits = self.min_c.iter().filter(|&&m| m <= c_lo).count() as u64;
        let hi_hits = self.max_c.iter().filter(|&&m| m >= c_hi).count() as u64;
        ExtremeJuryStats {
            p_min_le: Estimate::frequency(lo_hits, n),
            p_max_ge: Estimate::frequency(hi_hits, n),
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form baselines
// ---------------------------------------------------------------------------

/// Upper binomial tail P(Bi(n, q) >= k).
pub fn binom_tail(n: u64, q: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "q must lie in [0,1]");
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if q == 0.0 {
        return 0.0;
    }
    if q == 1.0 {
        return 1.0;
    }
    let ln_q = q.ln();
    let ln_1mq = (-q).ln_1p();
    (k..=n)
        .map(|i| (ln_choose(n, i) + i as f64 * ln_q + (n - i) as f64 * ln_1mq).exp())
        .sum()
}

/// Binomial probability mass P(Bi(n, q) = k).
pub fn binom_pmf(n: u64, q: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&q) && k <= n);
    if q == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_choose(n, k) + k as f64 * q.ln() + (n - k) as f64 * (-q).ln_1p()).exp()
}

/// Probability that a random jury seats at least `x` jurors with conviction
/// probability at or below a cutoff whose population cdf value is `fc`:
/// P(Bi(j, fc) >= x). At the population median `fc = 0.5`.
pub fn analytic_t_ran(j: u64, fc: f64, x: u64) -> f64 {
    assert!(x <= j, "x must not exceed the jury size");
    binom_tail(j, fc, x)
}

/// The Struck counterpart: at least `x` of the seated jurors fall at or
/// below the cutoff exactly when the panel holds at least `x + p` such
/// jurors, so the probability is P(Bi(j+d+p, fc) >= x+p).
pub fn analytic_t_str(j: u64, d: u64, p: u64, fc: f64, x: u64) -> f64 {
    assert!(x >= 1 && x <= j, "x must lie in 1..=j");
    binom_tail(j + d + p, fc, x + p)
}

/// Exact symmetric-binomial tail P(Bi(n, 1/2) >= k) as an integer fraction
/// over 2^n, for n <= 102.
pub fn binom_tail_half_exact(n: u64, k: u64) -> (u128, u32) {
    assert!(n <= 102, "exact tail limited to n <= 102");
    if k > n {
        return (0, n as u32);
    }
    let sum: u128 = (k..=n).map(|i| choose_u128(n, i)).sum();
    (sum, n as u32)
}

/// Whether P(Bi(eta+2, 1/2) >= k+1) strictly exceeds P(Bi(eta, 1/2) >= k),
/// decided in exact integer arithmetic. Equals `k > eta/2 + 1/2` for every
/// k in 0..=eta+1.
pub fn lemma_comp_stat(eta: u64, k: u64) -> bool {
    assert!(eta <= 100, "exact comparison limited to eta <= 100");
    assert!(k <= eta + 1, "k must lie in 0..=eta+1");
    let (lhs, _) = binom_tail_half_exact(eta + 2, k + 1);
    let (rhs, _) = binom_tail_half_exact(eta, k);
    lhs > 4 * rhs
}

/// The ratio P(Bi(eta, q) = k) / P(Bi(eta, q) > k), which grows without
/// bound as the success probability shrinks.
pub fn binom_pmf_over_tail_ratio(eta: u64, q: f64, k: u64) -> f64 {
    assert!(k < eta, "ratio requires k < eta so the strict tail is nonempty");
    binom_pmf(eta, q, k) / binom_tail(eta, q, k + 1)
}

/// Two-sample Kolmogorov-Smirnov statistic. Sorts both samples in place.
pub fn ks_two_sample_stat(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty());
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let mut i = 0usize;
    let mut k = 0usize;
    let mut d = 0.0f64;
    while i < n && k < m {
        let x = xs[i];
        let y = ys[k];
        if x <= y {
            i += 1;
        }
        if y <= x {
            k += 1;
        }
        let diff = (i as f64 / n as f64 - k as f64 / m as f64).abs();
        d = d.max(diff);
    }
    d
}

/// Critical value of the two-sample KS statistic at significance `alpha`
/// (asymptotic form), e.g. alpha = 0.01.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedure::Juror;

    fn outcome(cs: &[(f64, Group)]) -> JuryOutcome {
        JuryOutcome {
            selected: cs.iter().map(|&(c, group)| Juror { c, group }).collect(),
            challenges_d: 0,
            challenges_p: 0,
            presented_count: cs.len(),
        }
    }

    #[test]
    fn accumulate_examples() {
        let mut s = SimulationSummary::new(1, vec![0.25], 0.7).unwrap();
        s.accumulate(&outcome(&[(0.2, Group::A)]));
        assert_eq!(s.prob_at_least(1, 0).unwrap().value, 1.0);

        let mut s = SimulationSummary::new(2, vec![0.1, 0.3], 0.5).unwrap();
        s.accumulate(&outcome(&[(0.5, Group::B), (0.9, Group::B)]));
        assert_eq!(s.prob_at_least(1, 0).unwrap().value, 0.0);
        assert_eq!(s.prob_at_least(1, 1).unwrap().value, 0.0);

        // Accumulating k identical outcomes scales counts linearly.
        let mut s = SimulationSummary::new(2, vec![0.6], 0.5).unwrap();
        for _ in 0..5 {
            s.accumulate(&outcome(&[(0.5, Group::A), (0.9, Group::B)]));
        }
        assert_eq!(s.n_sims(), 5);
        assert_eq!(s.prob_at_least(1, 0).unwrap().value, 1.0);
        assert_eq!(s.minority_stats().mean_fraction.value, 0.5);
    }

    #[test]
    fn threshold_at_one_catches_everything() {
        let mut s = SimulationSummary::new(3, vec![1.0], 0.5).unwrap();
        s.accumulate(&outcome(&[
            (0.1, Group::B),
            (0.5, Group::B),
            (0.99, Group::B),
        ]));
        for x in 1..=3 {
            assert_eq!(s.prob_at_least(x, 0).unwrap().value, 1.0);
        }
        assert!(s.prob_at_least(0, 0).is_err());
        assert!(s.prob_at_least(4, 0).is_err());
    }

    #[test]
    fn median_and_minmax_stats() {
        let mut s = SimulationSummary::new(2, vec![], 0.5).unwrap();
        s.accumulate(&outcome(&[(0.2, Group::B), (0.8, Group::B)]));
        s.accumulate(&outcome(&[(0.3, Group::B), (0.4, Group::B)]));
        let med = s.median_count_stats();
        assert_eq!(med[0].value, 1.0);
        assert_eq!(med[1].value, 1.0);
        assert_eq!(med[2].value, 0.5);

        let ext = s.minmax_extreme_stats(0.25, 0.75);
        assert_eq!(ext.p_min_le.value, 0.5);
        assert_eq!(ext.p_max_ge.value, 0.5);
        // Degenerate cutoffs flip both frequencies to one.
        let ext = s.minmax_extreme_stats(1.0, 0.0);
        assert_eq!(ext.p_min_le.value, 1.0);
        assert_eq!(ext.p_max_ge.value, 1.0);
        // A zero cutoff can never capture a continuous minimum.
        let ext = s.minmax_extreme_stats(0.0, 1.0);
        assert_eq!(ext.p_min_le.value, 0.0);
    }

    #[test]
    fn single_juror_min_equals_tail() {
        let mut s = SimulationSummary::new(1, vec![0.3], 0.5).unwrap();
        for &c in &[0.1, 0.2, 0.35, 0.8, 0.25] {
            s.accumulate(&outcome(&[(c, Group::B)]));
        }
        let tail = s.prob_at_least(1, 0).unwrap().value;
        let ext = s.minmax_extreme_stats(0.3, 1.0);
        assert_eq!(tail, ext.p_min_le.value);
    }

    #[test]
    fn merge_is_associative_with_identity() {
        let mk = |cs: &[f64]| {
            let mut s = SimulationSummary::new(1, vec![0.5], 0.5).unwrap();
            for &c in cs {
                s.accumulate(&outcome(&[(c, Group::B)]));
            }
            s
        };
        let a = mk(&[0.1, 0.9]);
        let b = mk(&[0.4]);
        let c = mk(&[0.6, 0.2, 0.7]);

        let mut ab_c = a.clone();
        ab_c.merge(&b);
        ab_c.merge(&c);
        let mut bc = b.clone();
        bc.merge(&c);
        let mut a_bc = a.clone();
        a_bc.merge(&bc);
        assert_eq!(ab_c, a_bc);

        let mut with_empty = SimulationSummary::new(1, vec![0.5], 0.5).unwrap();
        with_empty.merge(&a);
        assert_eq!(with_empty, a);
    }

    #[test]
    fn prob_at_least_monotone() {
        let mut s = SimulationSummary::new(3, vec![0.2, 0.4, 0.6], 0.5).unwrap();
        let cases = [
            [0.1, 0.3, 0.5],
            [0.25, 0.45, 0.65],
            [0.05, 0.15, 0.9],
            [0.7, 0.8, 0.9],
            [0.1, 0.1, 0.1],
        ];
        for cs in cases {
            s.accumulate(&outcome(&[
                (cs[0], Group::B),
                (cs[1], Group::B),
                (cs[2], Group::B),
            ]));
        }
        for t in 0..3 {
            for x in 1..3 {
                assert!(
                    s.prob_at_least(x, t).unwrap().value
                        >= s.prob_at_least(x + 1, t).unwrap().value
                );
            }
        }
        for x in 1..=3 {
            for t in 0..2 {
                assert!(
                    s.prob_at_least(x, t).unwrap().value
                        <= s.prob_at_least(x, t + 1).unwrap().value
                );
            }
        }
    }

    #[test]
    fn binom_tail_values() {
        assert_eq!(binom_tail(10, 0.3, 0), 1.0);
        assert_eq!(binom_tail(10, 0.3, 11), 0.0);
        // P(Bi(12, 0.5) >= 7) = 1586/4096.
        assert!((binom_tail(12, 0.5, 7) - 1586.0 / 4096.0).abs() < 1e-13);
        // P(Bi(3, 0.05) >= 2) = 0.00725.
        assert!((binom_tail(3, 0.05, 2) - 0.00725).abs() < 1e-12);
    }

    #[test]
    fn analytic_anchors() {
        let ran = analytic_t_ran(12, 0.5, 7);
        assert!((ran - 0.38720703125).abs() < 1e-13);
        let str_ = analytic_t_str(12, 6, 6, 0.5, 7);
        assert!((str_ - 7_036_530.0 / 16_777_216.0).abs() < 1e-12);
        assert!(str_ > ran);
        assert_eq!(analytic_t_ran(12, 0.5, 0), 1.0);
    }

    #[test]
    fn comp_stat_lemma() {
        assert!(lemma_comp_stat(12, 7));
        assert!(!lemma_comp_stat(12, 6));
        for eta in 1..=100u64 {
            for k in 1..=eta + 1 {
                let expect = k as f64 > eta as f64 / 2.0 + 0.5;
                assert_eq!(lemma_comp_stat(eta, k), expect, "eta={eta} k={k}");
            }
        }
    }

    #[test]
    fn pmf_tail_ratio_grows_as_q_shrinks() {
        let qs = [0.2, 0.1, 0.05, 0.01, 0.001];
        for eta in 2..=30u64 {
            for k in 1..eta {
                let mut last = 0.0f64;
                for &q in &qs {
                    let ratio = binom_pmf_over_tail_ratio(eta, q, k);
                    assert!(ratio > last, "eta={eta} k={k} q={q}: {ratio} vs {last}");
                    last = ratio;
                }
            }
        }
    }

    #[test]
    fn ks_statistic_behaviour() {
        let mut a: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let mut b = a.clone();
        assert!(ks_two_sample_stat(&mut a, &mut b) < 1e-12);
        let mut c: Vec<f64> = (0..1000).map(|i| ((i as f64 + 0.5) / 1000.0).powi(2)).collect();
        let d = ks_two_sample_stat(&mut a, &mut c);
        assert!(d > ks_two_sample_critical(1000, 1000, 0.01));
    }
}
