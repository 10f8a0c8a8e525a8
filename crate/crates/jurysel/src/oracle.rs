//! Independent ground truth for validating the solver and the simulator:
//! exact game-tree integration for single-seat games, grid-based value
//! iteration that never touches the closed-form integrals, exact binomial
//! order-statistic tails for Struck selection, and exhaustive enumeration
//! of Random selection over small discrete supports.

use std::collections::BTreeMap;

use crate::dist::{GroupModel, MixtureDistribution};
use crate::error::{Error, Result};
use crate::procedure::Group;
use crate::solver::{EquilibriumTable, SubgameKey};
use crate::special::choose_u128;

// ---------------------------------------------------------------------------
// Adaptive quadrature (cross-check path)
// ---------------------------------------------------------------------------

/// Adaptive Simpson integration to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 48)
}

/// Integrate splitting at the distribution's uniform knots first, so the
/// integrand is smooth on every subinterval.
pub fn integrate_with_knots<F: Fn(f64) -> f64>(
    f: &F,
    dist: &MixtureDistribution,
    a: f64,
    b: f64,
    tol: f64,
) -> f64 {
    let mut cuts = vec![a];
    for k in dist.knots() {
        if k > a && k < b {
            cuts.push(k);
        }
    }
    cuts.push(b);
    cuts.windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol))
        .sum()
}

// ---------------------------------------------------------------------------
// Exact game tree, j = d = p = 1
// ---------------------------------------------------------------------------

/// One accept-region of the game tree: jurors seated on this path have
/// conviction probability distributed as `weight * f(c)` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySegment {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

/// Closed-form outcome distribution for a single-seat Strike-and-Replace
/// game, obtained by integrating the three-round game tree.
#[derive(Debug, Clone)]
pub struct ExactOutcome {
    gm: GroupModel,
    segments: Vec<DensitySegment>,
    branch_probs: Vec<(String, f64)>,
}

impl ExactOutcome {
    pub fn segments(&self) -> &[DensitySegment] {
        &self.segments
    }

    /// Labeled conditional branch probabilities of the tree.
    pub fn branch_probs(&self) -> &[(String, f64)] {
        &self.branch_probs
    }

    /// Total probability mass of all accept paths; equals one when the
    /// tree is complete.
    pub fn total_mass(&self) -> f64 {
        let pooled = self.gm.pooled();
        self.segments
            .iter()
            .map(|s| s.weight * (pooled.cdf(s.hi).unwrap() - pooled.cdf(s.lo).unwrap()))
            .sum()
    }

    /// Probability the seated juror belongs to group a.
    pub fn minority_prob(&self) -> f64 {
        let r = self.gm.r();
        let da = self.gm.dist_a();
        self.segments
            .iter()
            .map(|s| s.weight * r * (da.cdf(s.hi).unwrap() - da.cdf(s.lo).unwrap()))
            .sum()
    }

    /// P(selected juror's conviction probability <= c).
    pub fn selected_cdf(&self, c: f64) -> f64 {
        let pooled = self.gm.pooled();
        self.segments
            .iter()
            .map(|s| {
                let hi = s.hi.min(c);
                if hi <= s.lo {
                    0.0
                } else {
                    s.weight * (pooled.cdf(hi).unwrap() - pooled.cdf(s.lo).unwrap())
                }
            })
            .sum()
    }

    /// P(selected juror's conviction probability >= c).
    pub fn selected_tail_ge(&self, c: f64) -> f64 {
        let pooled = self.gm.pooled();
        self.segments
            .iter()
            .map(|s| {
                let lo = s.lo.max(c);
                if lo >= s.hi {
                    0.0
                } else {
                    s.weight * (pooled.cdf(s.hi).unwrap() - pooled.cdf(lo).unwrap())
                }
            })
            .sum()
    }

    /// Density of the selected juror's conviction probability at `c`.
    pub fn selected_pdf(&self, c: f64) -> f64 {
        let pooled = self.gm.pooled();
        let weight: f64 = self
            .segments
            .iter()
            .filter(|s| c >= s.lo && c < s.hi)
            .map(|s| s.weight)
            .sum();
        weight * pooled.pdf(c).unwrap()
    }
}

/// Integrate the j = d = p = 1 Strike-and-Replace game tree exactly, using
/// the thresholds stored in `table`. Restricted to uniform-mixture groups,
/// where every path probability is a finite sum of interval masses; use the
/// grid oracle for beta mixtures.
pub fn exact_game_tree_111(gm: &GroupModel, table: &EquilibriumTable) -> Result<ExactOutcome> {
    exact_game_tree_111_with_root_td(gm, table, None)
}

/// Same as [`exact_game_tree_111`] with an explicit root defendant
/// threshold, used to evaluate outcome statistics under a variant root
/// threshold without re-solving.
pub fn exact_game_tree_111_with_root_td(
    gm: &GroupModel,
    table: &EquilibriumTable,
    root_td_override: Option<f64>,
) -> Result<ExactOutcome> {
    if table.j() != 1 || table.d() != 1 || table.p() != 1 {
        return Err(Error::Unsupported(
            "exact game tree requires j = d = p = 1".into(),
        ));
    }
    if !gm.dist_a().is_uniform_mixture() || !gm.dist_b().is_uniform_mixture() {
        return Err(Error::Unsupported(
            "exact game tree requires uniform-mixture groups".into(),
        ));
    }
    let pooled = gm.pooled();
    let f = |c: f64| pooled.cdf(c).unwrap();

    let (tp1, td1) = table.thresholds(SubgameKey::new(1, 1, 1))?;
    let tp1 = tp1.expect("root plaintiff threshold");
    let td1 = root_td_override.unwrap_or_else(|| td1.expect("root defendant threshold"));
    let (_, td2) = table.thresholds(SubgameKey::new(1, 1, 0))?;
    let td2 = td2.expect("defendant threshold after plaintiff challenge");
    let (tp2, _) = table.thresholds(SubgameKey::new(1, 0, 1))?;
    let tp2 = tp2.expect("plaintiff threshold after defendant challenge");

    let p_chal = f(tp1);
    let accept = f(td1) - f(tp1);
    let d_chal = 1.0 - f(td1);

    let mut segments = Vec::new();
    // Round 1: accept band.
    segments.push(DensitySegment { lo: tp1, hi: td1, weight: 1.0 });
    // Round 2 after a plaintiff challenge: defendant alone, challenges above td2.
    segments.push(DensitySegment { lo: 0.0, hi: td2, weight: p_chal });
    // Round 3 after both challenged: everyone is seated.
    segments.push(DensitySegment {
        lo: 0.0,
        hi: 1.0,
        weight: p_chal * (1.0 - f(td2)),
    });
    // Round 2 after a defendant challenge: plaintiff alone, challenges below tp2.
    segments.push(DensitySegment { lo: tp2, hi: 1.0, weight: d_chal });
    segments.push(DensitySegment {
        lo: 0.0,
        hi: 1.0,
        weight: d_chal * f(tp2),
    });

    let branch_probs = vec![
        ("root_p_challenge".into(), p_chal),
        ("root_accept".into(), accept),
        ("root_d_challenge".into(), d_chal),
        ("after_p_accept".into(), f(td2)),
        ("after_p_d_challenge".into(), 1.0 - f(td2)),
        ("after_d_p_challenge".into(), f(tp2)),
        ("after_d_accept".into(), 1.0 - f(tp2)),
    ];

    Ok(ExactOutcome {
        gm: gm.clone(),
        segments,
        branch_probs,
    })
}

// ---------------------------------------------------------------------------
// Exact Struck tail via the order-statistic / binomial route
// ---------------------------------------------------------------------------

/// Probability that the Struck jury seats at least `x` jurors with
/// conviction probability at or below `c`: the panel must contain at least
/// `x + p` such jurors, so this is P(Bi(j+d+p, F(c)) >= x+p), evaluated
/// here with a pmf recurrence independent of the log-gamma path.
pub fn exact_str_order_stat(
    dist: &MixtureDistribution,
    j: usize,
    d: usize,
    p: usize,
    c: f64,
    x: usize,
) -> Result<f64> {
    if x == 0 || x > j {
        return Err(Error::Domain(format!("x={x} outside 1..={j}")));
    }
    let q = dist.cdf(c)?;
    let n = j + d + p;
    let k = x + p;
    if q >= 1.0 {
        return Ok(1.0);
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    // pmf(0) then the multiplicative recurrence.
    let mut pmf = (1.0 - q).powi(n as i32);
    let ratio = q / (1.0 - q);
    let mut tail = if k == 0 { pmf } else { 0.0 };
    for i in 0..n {
        pmf *= (n - i) as f64 / (i + 1) as f64 * ratio;
        if i + 1 >= k {
            tail += pmf;
        }
    }
    Ok(tail.min(1.0))
}

// ---------------------------------------------------------------------------
// Grid value iteration
// ---------------------------------------------------------------------------

/// Approximate subgame values and thresholds from a uniform grid.
#[derive(Debug, Clone)]
pub struct GridSolution {
    j: usize,
    d: usize,
    p: usize,
    values: Vec<f64>,
    t_p: Vec<Option<f64>>,
    t_d: Vec<Option<f64>>,
}

impl GridSolution {
    fn index(&self, key: SubgameKey) -> Result<usize> {
        if key.kappa > self.j || key.delta > self.d || key.pi > self.p {
            return Err(Error::OutOfBounds(format!(
                "subgame ({}, {}, {}) outside grid solution",
                key.kappa, key.delta, key.pi
            )));
        }
        Ok((key.kappa * (self.d + 1) + key.delta) * (self.p + 1) + key.pi)
    }

    pub fn subgame_value(&self, key: SubgameKey) -> Result<f64> {
        Ok(self.values[self.index(key)?])
    }

    pub fn thresholds(&self, key: SubgameKey) -> Result<(Option<f64>, Option<f64>)> {
        let i = self.index(key)?;
        Ok((self.t_p[i], self.t_d[i]))
    }
}

/// Discretized value iteration: expectation over grid cells with pointwise
/// optimal actions, no use of the closed-form integrals or the threshold
/// ratio formulas. Thresholds are recovered by scanning for the action
/// change.
pub fn grid_value_iteration(
    dist: &MixtureDistribution,
    j: usize,
    d: usize,
    p: usize,
    grid_points: usize,
) -> Result<GridSolution> {
    if grid_points < 10_001 {
        return Err(Error::Domain(format!(
            "grid needs at least 10001 points, got {grid_points}"
        )));
    }
    let m = grid_points;
    let mut mids = Vec::with_capacity(m);
    let mut mass = Vec::with_capacity(m);
    let mut prev_cdf = 0.0;
    for i in 0..m {
        let hi_edge = (i + 1) as f64 / m as f64;
        let cdf_hi = dist.cdf(hi_edge)?;
        mids.push((i as f64 + 0.5) / m as f64);
        mass.push(cdf_hi - prev_cdf);
        prev_cdf = cdf_hi;
    }

    let size = (j + 1) * (d + 1) * (p + 1);
    let mut sol = GridSolution {
        j,
        d,
        p,
        values: vec![0.0; size],
        t_p: vec![None; size],
        t_d: vec![None; size],
    };
    let idx = |k: usize, dd: usize, pp: usize| (k * (d + 1) + dd) * (p + 1) + pp;

    for kappa in 0..=j {
        for delta in 0..=d {
            for pi in 0..=p {
                let i = idx(kappa, delta, pi);
                if kappa == 0 {
                    sol.values[i] = 1.0;
                    continue;
                }
                let v_seat = sol.values[idx(kappa - 1, delta, pi)];
                let v_p = if pi > 0 { sol.values[idx(kappa, delta, pi - 1)] } else { 0.0 };
                let v_d = if delta > 0 { sol.values[idx(kappa, delta - 1, pi)] } else { 0.0 };
                let mut value = 0.0;
                let mut last_p_challenge: Option<usize> = None;
                let mut first_d_challenge: Option<usize> = None;
                for (cell, (&c, &w)) in mids.iter().zip(mass.iter()).enumerate() {
                    let seat = c * v_seat;
                    // The plaintiff challenges when discarding the juror
                    // beats seating it; the defendant mirrors below.
                    if pi > 0 && v_p > seat {
                        value += w * v_p;
                        last_p_challenge = Some(cell);
                    } else if delta > 0 && v_d < seat {
                        value += w * v_d;
                        if first_d_challenge.is_none() {
                            first_d_challenge = Some(cell);
                        }
                    } else {
                        value += w * seat;
                    }
                }
                sol.values[i] = value;
                if pi > 0 {
                    sol.t_p[i] = Some(match last_p_challenge {
                        Some(cell) => (cell as f64 + 1.0) / m as f64,
                        None => 0.0,
                    });
                }
                if delta > 0 {
                    sol.t_d[i] = Some(match first_d_challenge {
                        Some(cell) => cell as f64 / m as f64,
                        None => 1.0,
                    });
                }
            }
        }
    }
    Ok(sol)
}

// ---------------------------------------------------------------------------
// Exhaustive Random-procedure statistics over small discrete supports
// ---------------------------------------------------------------------------

/// One support point of a discrete panel distribution.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteLevel {
    pub prob: f64,
    pub c: f64,
    pub group: Group,
}

/// Exact joint distribution of how many selected jurors fall on each level.
#[derive(Debug, Clone)]
pub struct ExhaustiveRan {
    levels: Vec<DiscreteLevel>,
    j: usize,
    /// Selected-count vector -> probability.
    dist: BTreeMap<Vec<usize>, f64>,
}

impl ExhaustiveRan {
    /// P(at least `x` selected jurors satisfy `pred` on their level index).
    pub fn p_at_least<F: Fn(usize) -> bool>(&self, x: usize, pred: F) -> f64 {
        self.dist
            .iter()
            .filter(|(counts, _)| {
                let total: usize = counts
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| pred(*l))
                    .map(|(_, &s)| s)
                    .sum();
                total >= x
            })
            .map(|(_, &pr)| pr)
            .sum()
    }

    /// P(at least `x` selected jurors have c at or below `thr`).
    pub fn p_at_least_c_le(&self, x: usize, thr: f64) -> f64 {
        self.p_at_least(x, |l| self.levels[l].c <= thr)
    }

    /// P(at least `x` selected jurors are group a).
    pub fn p_minority_at_least(&self, x: usize) -> f64 {
        self.p_at_least(x, |l| self.levels[l].group == Group::A)
    }

    /// Distribution of the number of selected jurors on marked levels.
    pub fn selected_count_dist<F: Fn(usize) -> bool>(&self, pred: F) -> Vec<f64> {
        let mut out = vec![0.0; self.j + 1];
        for (counts, &pr) in &self.dist {
            let total: usize = counts
                .iter()
                .enumerate()
                .filter(|(l, _)| pred(*l))
                .map(|(_, &s)| s)
                .sum();
            out[total] += pr;
        }
        out
    }
}

/// Enumerate every panel composition and every j-subset of a panel of `n`
/// i.i.d. draws from a discrete distribution over at most four levels, and
/// return the exact distribution of selected level counts under the Random
/// procedure.
pub fn exhaustive_ran(levels: &[DiscreteLevel], j: usize, n: usize) -> Result<ExhaustiveRan> {
    if levels.is_empty() || levels.len() > 4 {
        return Err(Error::Unsupported(
            "exhaustive enumeration supports 1..=4 levels".into(),
        ));
    }
    if n < j {
        return Err(Error::Domain(format!("panel {n} smaller than jury {j}")));
    }
    let total_p: f64 = levels.iter().map(|l| l.prob).sum();
    if (total_p - 1.0).abs() > 1e-12 || levels.iter().any(|l| l.prob <= 0.0) {
        return Err(Error::InvalidDistribution(
            "level probabilities must be positive and sum to 1".into(),
        ));
    }
    let l = levels.len();
    let compositions = |total: usize, parts: usize| -> u128 {
        choose_u128((total + parts - 1) as u64, (parts - 1) as u64)
    };
    let states = compositions(n, l) * compositions(j, l);
    if states > 1_000_000 {
        return Err(Error::Unsupported(format!(
            "state space too large: {states} > 1e6"
        )));
    }

    // Enumerate panel count vectors.
    let mut panel_counts: Vec<Vec<usize>> = Vec::new();
    fn fill(acc: &mut Vec<usize>, remaining: usize, slots: usize, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            let mut v = acc.clone();
            v.push(remaining);
            out.push(v);
            return;
        }
        for take in 0..=remaining {
            acc.push(take);
            fill(acc, remaining - take, slots - 1, out);
            acc.pop();
        }
    }
    fill(&mut Vec::new(), n, l, &mut panel_counts);

    let ln_fact = |k: usize| -> f64 { (1..=k).map(|i| (i as f64).ln()).sum() };
    let mut dist: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let choose = |a: usize, b: usize| -> f64 { choose_u128(a as u64, b as u64) as f64 };
    for counts in &panel_counts {
        // Multinomial probability of this panel composition.
        let mut ln_pr = ln_fact(n);
        for (lvl, &cnt) in counts.iter().enumerate() {
            ln_pr -= ln_fact(cnt);
            ln_pr += cnt as f64 * levels[lvl].prob.ln();
        }
        let panel_pr = ln_pr.exp();

        // Hypergeometric selection of j among the counts.
        let mut selections: Vec<Vec<usize>> = Vec::new();
        fn pick(
            acc: &mut Vec<usize>,
            counts: &[usize],
            idx: usize,
            remaining: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if idx == counts.len() {
                if remaining == 0 {
                    out.push(acc.clone());
                }
                return;
            }
            let max_here = counts[idx].min(remaining);
            let slack: usize = counts[idx + 1..].iter().sum();
            let min_here = remaining.saturating_sub(slack);
            for take in min_here..=max_here {
                acc.push(take);
                pick(acc, counts, idx + 1, remaining - take, out);
                acc.pop();
            }
        }
        pick(&mut Vec::new(), counts, 0, j, &mut selections);
        let denom = choose(n, j);
        for sel in selections {
            let ways: f64 = sel
                .iter()
                .zip(counts.iter())
                .map(|(&s, &c)| choose(c, s))
                .product();
            *dist.entry(sel).or_insert(0.0) += panel_pr * ways / denom;
        }
    }

    Ok(ExhaustiveRan {
        levels: levels.to_vec(),
        j,
        dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Component;
    use crate::metrics::{analytic_t_str, binom_tail};
    use crate::procedure::{run_random, Juror, Panel};
    use crate::solver::solve;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sec3_group_model() -> GroupModel {
        GroupModel::new(
            0.1,
            MixtureDistribution::uniform(0.0, 0.5).unwrap(),
            MixtureDistribution::uniform(0.5, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn adaptive_simpson_known_integrals() {
        let f = |x: f64| x * x;
        assert!((adaptive_simpson(&f, 0.0, 1.0, 1e-12) - 1.0 / 3.0).abs() < 1e-10);
        let g = |x: f64| (std::f64::consts::PI * x).sin();
        assert!(
            (adaptive_simpson(&g, 0.0, 1.0, 1e-12) - 2.0 / std::f64::consts::PI).abs() < 1e-10
        );
    }

    #[test]
    fn tree_total_mass_and_minority() {
        let gm = sec3_group_model();
        let table = solve(&gm.pooled(), 1, 1, 1);
        let tree = exact_game_tree_111(&gm, &table).unwrap();
        assert!((tree.total_mass() - 1.0).abs() < 1e-10);
        // Insensitive to the 0.781-vs-0.788 root threshold question.
        assert!((tree.minority_prob() - 0.066).abs() < 1e-3);
        let variant = exact_game_tree_111_with_root_td(&gm, &table, Some(0.788)).unwrap();
        assert!((variant.total_mass() - 1.0).abs() < 1e-10);
        assert!((variant.minority_prob() - 0.066).abs() < 1e-3);
    }

    #[test]
    fn tree_branch_probabilities_match_worked_example() {
        let gm = sec3_group_model();
        let table = solve(&gm.pooled(), 1, 1, 1);
        // With the printed variant threshold 0.788 the root arrows read
        // .3142 / .3042 / .3816.
        let tree = exact_game_tree_111_with_root_td(&gm, &table, Some(0.788)).unwrap();
        let get = |name: &str| {
            tree.branch_probs()
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, p)| *p)
                .unwrap()
        };
        assert!((get("root_p_challenge") - 0.3142).abs() < 5e-5);
        assert!((get("root_accept") - 0.3042).abs() < 5e-5);
        assert!((get("root_d_challenge") - 0.3816).abs() < 5e-5);
        assert!((get("after_p_accept") - 0.46).abs() < 1e-12);
        assert!((get("after_p_d_challenge") - 0.54).abs() < 1e-12);
        assert!((get("after_d_p_challenge") - 0.46).abs() < 1e-12);
    }

    #[test]
    fn tree_tail_probabilities() {
        let gm = sec3_group_model();
        let table = solve(&gm.pooled(), 1, 1, 1);
        let tree = exact_game_tree_111(&gm, &table).unwrap();
        // Bottom 5th percentile of the pooled mixture sits at 0.25.
        assert!((tree.selected_cdf(0.25) - 0.033).abs() < 1e-3);
        // Density integrates to the cdf values.
        let num = integrate_with_knots(&|c| tree.selected_pdf(c), &gm.pooled(), 0.0, 1.0, 1e-12);
        assert!((num - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tree_rejects_unsupported_inputs() {
        let gm = sec3_group_model();
        let table = solve(&gm.pooled(), 2, 1, 1);
        assert!(exact_game_tree_111(&gm, &table).is_err());
        let beta_gm = GroupModel::new(
            0.1,
            MixtureDistribution::beta(1.0, 5.0).unwrap(),
            MixtureDistribution::beta(5.0, 1.0).unwrap(),
        )
        .unwrap();
        let table = solve(&beta_gm.pooled(), 1, 1, 1);
        assert!(exact_game_tree_111(&beta_gm, &table).is_err());
    }

    #[test]
    fn str_order_stat_examples() {
        let gm = sec3_group_model();
        let pooled = gm.pooled();
        let v = exact_str_order_stat(&pooled, 1, 1, 1, 0.25, 1).unwrap();
        assert!((v - 0.00725).abs() < 1e-12);

        let u = MixtureDistribution::uniform(0.0, 1.0).unwrap();
        let v = exact_str_order_stat(&u, 1, 1, 1, 0.25, 1).unwrap();
        assert!((v - 0.15625).abs() < 1e-12);
        assert_eq!(exact_str_order_stat(&u, 1, 1, 1, 1.0, 1).unwrap(), 1.0);
        assert!(exact_str_order_stat(&u, 1, 1, 1, 0.5, 0).is_err());
    }

    #[test]
    fn str_order_stat_agrees_with_analytic_form() {
        let dist = MixtureDistribution::new(vec![
            (0.25, Component::Beta { alpha: 1.0, beta: 5.0 }),
            (0.75, Component::Beta { alpha: 5.0, beta: 1.0 }),
        ])
        .unwrap();
        for &c in &[0.05, 0.2, 0.5, 0.8] {
            let fc = dist.cdf(c).unwrap();
            for x in 1..=3usize {
                let a = exact_str_order_stat(&dist, 12, 6, 6, c, x).unwrap();
                let b = analytic_t_str(12, 6, 6, fc, x as u64);
                assert!((a - b).abs() < 1e-12, "c={c} x={x}");
            }
        }
    }

    #[test]
    fn grid_iteration_uniform_111() {
        let u = MixtureDistribution::uniform(0.0, 1.0).unwrap();
        let g = grid_value_iteration(&u, 1, 1, 1, 20_001).unwrap();
        let (tp, td) = g.thresholds(SubgameKey::new(1, 1, 1)).unwrap();
        assert!((tp.unwrap() - 0.375).abs() < 1e-3);
        assert!((td.unwrap() - 0.625).abs() < 1e-3);
        assert!((g.subgame_value(SubgameKey::new(1, 1, 1)).unwrap() - 0.5).abs() < 1e-4);
        assert!(grid_value_iteration(&u, 1, 1, 1, 100).is_err());
    }

    #[test]
    fn grid_iteration_sec3() {
        let gm = sec3_group_model();
        let g = grid_value_iteration(&gm.pooled(), 1, 1, 1, 20_001).unwrap();
        assert!((g.subgame_value(SubgameKey::new(1, 1, 0)).unwrap() - 0.619).abs() < 1e-3);
        let mu = gm.pooled().mean();
        for kappa in 0..=1usize {
            let v = g.subgame_value(SubgameKey::new(kappa, 0, 0)).unwrap();
            assert!((v - mu.powi(kappa as i32)).abs() < 1e-4);
        }
    }

    #[test]
    fn exhaustive_ran_two_levels() {
        let levels = [
            DiscreteLevel { prob: 0.3, c: 0.2, group: Group::A },
            DiscreteLevel { prob: 0.7, c: 0.8, group: Group::B },
        ];
        let ex = exhaustive_ran(&levels, 1, 3).unwrap();
        // Selected juror is a fresh draw: marginal of level 1 is its prob.
        assert!((ex.p_minority_at_least(1) - 0.3).abs() < 1e-12);
        let cnts = ex.selected_count_dist(|l| l == 0);
        assert!((cnts[0] - 0.7).abs() < 1e-12);
        assert!((cnts[1] - 0.3).abs() < 1e-12);

        // Against the binomial shortcut for a bigger jury.
        let ex = exhaustive_ran(&levels, 3, 6).unwrap();
        for x in 0..=3usize {
            let exact = ex.p_at_least_c_le(x, 0.5);
            let shortcut = binom_tail(3, 0.3, x as u64);
            assert!((exact - shortcut).abs() < 1e-12, "x={x}");
        }

        // Degenerate one-level support: everything deterministic.
        let solo = [DiscreteLevel { prob: 1.0, c: 0.4, group: Group::B }];
        let ex = exhaustive_ran(&solo, 2, 4).unwrap();
        assert!((ex.p_at_least_c_le(2, 0.4) - 1.0).abs() < 1e-12);
        assert_eq!(ex.p_minority_at_least(1), 0.0);
    }

    #[test]
    fn exhaustive_ran_matches_simulation() {
        let levels = [
            DiscreteLevel { prob: 0.25, c: 0.1, group: Group::A },
            DiscreteLevel { prob: 0.45, c: 0.5, group: Group::B },
            DiscreteLevel { prob: 0.30, c: 0.9, group: Group::B },
        ];
        let ex = exhaustive_ran(&levels, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let runs = 200_000;
        let mut at_least_one_low = 0u32;
        for _ in 0..runs {
            let jurors: Vec<Juror> = (0..4)
                .map(|_| {
                    let u: f64 = rand::Rng::random(&mut rng);
                    let lvl = if u < 0.25 {
                        0
                    } else if u < 0.70 {
                        1
                    } else {
                        2
                    };
                    Juror { c: levels[lvl].c, group: levels[lvl].group }
                })
                .collect();
            let panel = Panel { jurors };
            let out = run_random(&panel, 2, &mut rng);
            if out.selected.iter().any(|j| j.c <= 0.1) {
                at_least_one_low += 1;
            }
        }
        let freq = at_least_one_low as f64 / runs as f64;
        let exact = ex.p_at_least_c_le(1, 0.1);
        let se = (exact * (1.0 - exact) / runs as f64).sqrt();
        assert!((freq - exact).abs() < 3.0 * se, "{freq} vs {exact}");
    }

    #[test]
    fn exhaustive_ran_refuses_large_state_spaces() {
        let levels = [
            DiscreteLevel { prob: 0.25, c: 0.1, group: Group::A },
            DiscreteLevel { prob: 0.25, c: 0.4, group: Group::B },
            DiscreteLevel { prob: 0.25, c: 0.6, group: Group::B },
            DiscreteLevel { prob: 0.25, c: 0.9, group: Group::B },
        ];
        assert!(exhaustive_ran(&levels, 90, 200).is_err());
    }
}
