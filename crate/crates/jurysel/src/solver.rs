//! Subgame-perfect equilibrium of the Strike-and-Replace game by backward
//! induction.
//!
//! A subgame is keyed by `(kappa, delta, pi)`: jurors still to seat,
//! defendant challenges left, plaintiff challenges left. Writing `V` for a
//! subgame's value (the equilibrium expectation of the product of the
//! remaining seats' conviction probabilities), the recursion is
//!
//! ```text
//! V(0, d, p)   = 1
//! V(k, 0, 0)   = mean^k
//! t_D(k, d, p) = V(k, d-1, p) / V(k-1, d, p)     (defendant challenges above)
//! t_P(k, d, p) = V(k, d, p-1) / V(k-1, d, p)     (plaintiff challenges below)
//! V(k, d, p)   = F(t_P) V(k, d, p-1)
//!              + (1 - F(t_D)) V(k, d-1, p)
//!              + V(k-1, d, p) [t_D F(t_D) - t_P F(t_P) - ∫_{t_P}^{t_D} F]
//! ```
//!
//! with a missing side's threshold fixed at 0 (no plaintiff challenge) or 1
//! (no defendant challenge). When both ratios lie inside [0, 1] the last
//! line collapses, by integration by parts, to the familiar subtraction
//! form `V(k, d-1, p) - V(k-1, d, p) ∫_{t_P}^{t_D} F(c) dc`; the expanded
//! form additionally stays exact when a ratio is clamped (a clamped
//! threshold means that side never challenges).

use std::io::Write;

use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};

/// Identifies one subgame of the Strike-and-Replace game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubgameKey {
    pub kappa: usize,
    pub delta: usize,
    pub pi: usize,
}

impl SubgameKey {
    pub fn new(kappa: usize, delta: usize, pi: usize) -> Self {
        SubgameKey { kappa, delta, pi }
    }
}

/// Solved values and challenge thresholds for every subgame of a
/// `(j, d, p)` Strike-and-Replace game. Immutable once built.
#[derive(Debug, Clone)]
pub struct EquilibriumTable {
    j: usize,
    d: usize,
    p: usize,
    values: Vec<f64>,
    t_p: Vec<Option<f64>>,
    t_d: Vec<Option<f64>>,
}

impl EquilibriumTable {
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn index(&self, key: SubgameKey) -> Result<usize> {
        if key.kappa > self.j || key.delta > self.d || key.pi > self.p {
            return Err(Error::OutOfBounds(format!(
                "subgame ({}, {}, {}) outside table for (j={}, d={}, p={})",
                key.kappa, key.delta, key.pi, self.j, self.d, self.p
            )));
        }
        Ok((key.kappa * (self.d + 1) + key.delta) * (self.p + 1) + key.pi)
    }

    /// Stored subgame value V(kappa, delta, pi).
    pub fn subgame_value(&self, key: SubgameKey) -> Result<f64> {
        Ok(self.values[self.index(key)?])
    }

    /// Stored thresholds `(t_P, t_D)`; a side with no challenges left has
    /// no threshold.
    pub fn thresholds(&self, key: SubgameKey) -> Result<(Option<f64>, Option<f64>)> {
        let idx = self.index(key)?;
        Ok((self.t_p[idx], self.t_d[idx]))
    }

    /// Root-subgame key (j, d, p).
    pub fn root(&self) -> SubgameKey {
        SubgameKey::new(self.j, self.d, self.p)
    }

    /// Number of subgames held: (j+1)(d+1)(p+1).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Iterate over all keys in evaluation order.
    pub fn keys(&self) -> impl Iterator<Item = SubgameKey> + '_ {
        let (d, p) = (self.d, self.p);
        (0..=self.j).flat_map(move |k| {
            (0..=d).flat_map(move |dd| (0..=p).map(move |pp| SubgameKey::new(k, dd, pp)))
        })
    }

    /// Write the table as CSV: `kappa,delta,pi,value,t_p,t_d` with empty
    /// fields for absent thresholds.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "kappa,delta,pi,value,t_p,t_d")?;
        for key in self.keys() {
            let idx = self.index(key).expect("key from iterator");
            let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{:.12},{},{}",
                key.kappa,
                key.delta,
                key.pi,
                self.values[idx],
                fmt_opt(self.t_p[idx]),
                fmt_opt(self.t_d[idx]),
            )?;
        }
        Ok(())
    }
}

/// Solve the Strike-and-Replace game for jury size `j` with `d` defendant
/// and `p` plaintiff challenges over conviction distribution `dist`.
///
/// Subgames are filled in increasing `(kappa, delta, pi)` order; each value
/// depends only on `(kappa-1, delta, pi)`, `(kappa, delta-1, pi)` and
/// `(kappa, delta, pi-1)`.
pub fn solve(dist: &MixtureDistribution, j: usize, d: usize, p: usize) -> EquilibriumTable {
    assert!(j >= 1, "jury size must be at least 1");
    let mean = dist.mean();
    let size = (j + 1) * (d + 1) * (p + 1);
    let mut table = EquilibriumTable {
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
                    table.values[i] = 1.0;
                    continue;
                }
                if delta == 0 && pi == 0 {
                    table.values[i] = mean.powi(kappa as i32);
                    continue;
                }
                let v_seat = table.values[idx(kappa - 1, delta, pi)];
                debug_assert!(v_seat > 0.0);
                let (tp, v_p) = if pi > 0 {
                    let v = table.values[idx(kappa, delta, pi - 1)];
                    ((v / v_seat).clamp(0.0, 1.0), v)
                } else {
                    (0.0, 0.0)
                };
                let (td, v_d) = if delta > 0 {
                    let v = table.values[idx(kappa, delta - 1, pi)];
                    ((v / v_seat).clamp(0.0, 1.0), v)
                } else {
                    (1.0, 0.0)
                };
                debug_assert!(
                    tp <= td + 1e-12,
                    "equilibrium thresholds must satisfy t_P <= t_D ({tp} vs {td})"
                );
                let f_tp = dist.cdf(tp).expect("threshold in [0,1]");
                let f_td = dist.cdf(td).expect("threshold in [0,1]");
                let int_f = dist.integral_cdf(tp, td).expect("ordered thresholds");
                let seat_mass = td * f_td - tp * f_tp - int_f;
                let mut v = v_seat * seat_mass;
                if pi > 0 {
                    v += f_tp * v_p;
                }
                if delta > 0 {
                    v += (1.0 - f_td) * v_d;
                }
                debug_assert!(v > 1e-300, "subgame value underflow at ({kappa},{delta},{pi})");
                table.values[i] = v;
                if pi > 0 {
                    table.t_p[i] = Some(tp);
                }
                if delta > 0 {
                    table.t_d[i] = Some(td);
                }
            }
        }
    }
    table
}
