//! One jury selection under the Struck, Strike-and-Replace, or Random
//! procedure, executed on a drawn panel with group labels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::GroupModel;
use crate::solver::{EquilibriumTable, SubgameKey};

/// Which selection procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Procedure {
    #[serde(rename = "STR")]
    Struck,
    #[serde(rename = "SAR")]
    StrikeReplace,
    #[serde(rename = "RAN")]
    Random,
}

impl Procedure {
    pub fn label(&self) -> &'static str {
        match self {
            Procedure::Struck => "STR",
            Procedure::StrikeReplace => "SAR",
            Procedure::Random => "RAN",
        }
    }
}

/// Population group of a juror.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    A,
    B,
}

/// A potential juror: conviction probability and group membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Juror {
    pub c: f64,
    pub group: Group,
}

/// An ordered panel of `n = j + d + p` potential jurors. The order is the
/// presentation order under Strike-and-Replace.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub jurors: Vec<Juror>,
}

/// The effective jury produced by one procedure run.
#[derive(Debug, Clone, PartialEq)]
pub struct JuryOutcome {
    /// Seated jurors, in panel order.
    pub selected: Vec<Juror>,
    /// Challenges used by the defendant.
    pub challenges_d: usize,
    /// Challenges used by the plaintiff.
    pub challenges_p: usize,
    /// Panel positions examined; equals the panel size except under
    /// Strike-and-Replace, which can stop early.
    pub presented_count: usize,
}

/// Reusable panel sampler for a group model; build once, draw many panels.
pub struct PanelSampler {
    r: f64,
    sampler_a: crate::dist::MixtureSampler,
    sampler_b: crate::dist::MixtureSampler,
}

impl PanelSampler {
    pub fn new(gm: &GroupModel) -> Self {
        PanelSampler {
            r: gm.r(),
            sampler_a: gm.dist_a().sampler(),
            sampler_b: gm.dist_b().sampler(),
        }
    }

    /// Draw a panel of `n` jurors: each independently joins group a with
    /// probability `r`, then draws its conviction probability from its
    /// group distribution.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Panel {
        let jurors = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if u < self.r {
                    Juror { c: self.sampler_a.sample(rng), group: Group::A }
                } else {
                    Juror { c: self.sampler_b.sample(rng), group: Group::B }
                }
            })
            .collect();
        Panel { jurors }
    }
}

/// One-shot panel draw; see [`PanelSampler`] for bulk use.
pub fn draw_panel<R: Rng + ?Sized>(gm: &GroupModel, n: usize, rng: &mut R) -> Panel {
    PanelSampler::new(gm).draw(n, rng)
}

/// Struck procedure: with the whole panel observed, the plaintiff strikes
/// the `p` lowest conviction probabilities and the defendant the `d`
/// highest; the middle `j` order statistics are seated. Ties (measure zero
/// under a continuous distribution) are broken by panel position.
pub fn run_struck(panel: &Panel, j: usize, d: usize, p: usize) -> JuryOutcome {
    let n = panel.jurors.len();
    assert_eq!(n, j + d + p, "panel size must equal j + d + p");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        panel.jurors[a]
            .c
            .partial_cmp(&panel.jurors[b].c)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut chosen: Vec<usize> = order[p..p + j].to_vec();
    chosen.sort_unstable();
    JuryOutcome {
        selected: chosen.iter().map(|&i| panel.jurors[i]).collect(),
        challenges_d: d,
        challenges_p: p,
        presented_count: n,
    }
}

/// Strike-and-Replace: walk the panel in presentation order, challenging
/// with the equilibrium threshold strategies stored in `table`. In state
/// `(kappa, delta, pi)` the plaintiff challenges a juror with `c` strictly
/// below `t_P`, otherwise the defendant challenges one strictly above
/// `t_D`, otherwise the juror is seated. A juror exactly at a threshold is
/// seated.
pub fn run_strike_replace(panel: &Panel, table: &EquilibriumTable) -> JuryOutcome {
    let (j, d, p) = (table.j(), table.d(), table.p());
    assert_eq!(
        panel.jurors.len(),
        j + d + p,
        "panel size must match the solved game"
    );
    let mut kappa = j;
    let mut delta = d;
    let mut pi = p;
    let mut selected = Vec::with_capacity(j);
    let mut presented = 0usize;
    for juror in &panel.jurors {
        if kappa == 0 {
            break;
        }
        presented += 1;
        let (t_p, t_d) = table
            .thresholds(SubgameKey::new(kappa, delta, pi))
            .expect("state within solved table");
        if pi > 0 && juror.c < t_p.expect("plaintiff threshold present") {
            pi -= 1;
        } else if delta > 0 && juror.c > t_d.expect("defendant threshold present") {
            delta -= 1;
        } else {
            selected.push(*juror);
            kappa -= 1;
        }
    }
    // j + d + p panel members always suffice: every examination consumes
    // one unit of kappa + delta + pi.
    assert_eq!(kappa, 0, "panel exhausted before seating the jury");
    JuryOutcome {
        selected,
        challenges_d: d - delta,
        challenges_p: p - pi,
        presented_count: presented,
    }
}

/// Random procedure: a uniform `j`-subset of the panel, no challenges.
pub fn run_random<R: Rng + ?Sized>(panel: &Panel, j: usize, rng: &mut R) -> JuryOutcome {
    let n = panel.jurors.len();
    assert!(n >= j, "panel smaller than jury size");
    // Partial Fisher-Yates over panel indices.
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..j {
        let pick = rng.random_range(i..n);
        idx.swap(i, pick);
    }
    let mut chosen: Vec<usize> = idx[..j].to_vec();
    chosen.sort_unstable();
    JuryOutcome {
        selected: chosen.iter().map(|&i| panel.jurors[i]).collect(),
        challenges_d: 0,
        challenges_p: 0,
        presented_count: n,
    }
}
