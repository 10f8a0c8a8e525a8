//! Conviction-probability distributions: weighted mixtures of uniform and
//! beta components on [0, 1], plus the two-group population model.
//!
//! Every integral the equilibrium recursion needs is evaluated in closed
//! form. For a beta component the cumulative integral and the partial
//! expectation reduce to incomplete-beta identities:
//!
//! ```text
//! ∫_0^t c f_{a,b}(c) dc = mean * I_t(a+1, b)
//! ∫_0^t F_{a,b}(c) dc   = t * I_t(a, b) - mean * I_t(a+1, b)
//! ```
//!
//! so accuracy is limited only by the incomplete beta evaluation (~1e-14),
//! not by quadrature. Test suites cross-check both against adaptive
//! quadrature of the pdf/cdf.

use rand::Rng;
use rand_distr::Distribution as RandDistribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_beta, reg_inc_beta};

const WEIGHT_TOL: f64 = 1e-12;

/// One mixture component: a uniform slab or a beta distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// Uniform on [lo, hi] with 0 <= lo < hi <= 1.
    Uniform { lo: f64, hi: f64 },
    /// Beta(alpha, beta) with alpha, beta > 0.
    Beta { alpha: f64, beta: f64 },
}

impl Component {
    fn validate(&self) -> Result<()> {
        match *self {
            Component::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 || lo >= hi {
                    Err(Error::InvalidDistribution(format!(
                        "uniform bounds must satisfy 0 <= lo < hi <= 1, got [{lo}, {hi}]"
                    )))
                } else {
                    Ok(())
                }
            }
            Component::Beta { alpha, beta } => {
                if !(alpha.is_finite() && beta.is_finite()) || alpha <= 0.0 || beta <= 0.0 {
                    Err(Error::InvalidDistribution(format!(
                        "beta shapes must be positive, got ({alpha}, {beta})"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Density at `c`, right-continuous at interior uniform knots.
    fn pdf(&self, c: f64) -> f64 {
        match *self {
            Component::Uniform { lo, hi } => {
                let inside = if hi < 1.0 {
                    c >= lo && c < hi
                } else {
                    c >= lo && c <= hi
                };
                if inside {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Component::Beta { alpha, beta } => {
                if c == 0.0 {
                    return match alpha.partial_cmp(&1.0).unwrap() {
                        std::cmp::Ordering::Less => f64::INFINITY,
                        std::cmp::Ordering::Equal => beta,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                }
                if c == 1.0 {
                    return match beta.partial_cmp(&1.0).unwrap() {
                        std::cmp::Ordering::Less => f64::INFINITY,
                        std::cmp::Ordering::Equal => alpha,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                }
                ((alpha - 1.0) * c.ln() + (beta - 1.0) * (-c).ln_1p() - ln_beta(alpha, beta)).exp()
            }
        }
    }

    fn cdf(&self, c: f64) -> f64 {
        match *self {
            Component::Uniform { lo, hi } => ((c - lo) / (hi - lo)).clamp(0.0, 1.0),
            Component::Beta { alpha, beta } => reg_inc_beta(alpha, beta, c),
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            Component::Uniform { lo, hi } => 0.5 * (lo + hi),
            Component::Beta { alpha, beta } => alpha / (alpha + beta),
        }
    }

    /// ∫_0^t F(c) dc.
    fn integral_cdf_from_zero(&self, t: f64) -> f64 {
        match *self {
            Component::Uniform { lo, hi } => {
                if t <= lo {
                    0.0
                } else if t <= hi {
                    (t - lo) * (t - lo) / (2.0 * (hi - lo))
                } else {
                    0.5 * (hi - lo) + (t - hi)
                }
            }
            Component::Beta { alpha, beta } => {
                let mean = alpha / (alpha + beta);
                t * reg_inc_beta(alpha, beta, t) - mean * reg_inc_beta(alpha + 1.0, beta, t)
            }
        }
    }

    /// ∫_0^t c f(c) dc.
    fn partial_expectation_from_zero(&self, t: f64) -> f64 {
        match *self {
            Component::Uniform { lo, hi } => {
                let u = t.clamp(lo, hi);
                (u * u - lo * lo) / (2.0 * (hi - lo))
            }
            Component::Beta { alpha, beta } => {
                let mean = alpha / (alpha + beta);
                mean * reg_inc_beta(alpha + 1.0, beta, t)
            }
        }
    }
}

/// A finite mixture of uniform/beta components with positive weights
/// summing to one. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDistribution {
    components: Vec<(f64, Component)>,
}

impl MixtureDistribution {
    pub fn new(components: Vec<(f64, Component)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution(
                "mixture needs at least one component".into(),
            ));
        }
        let mut total = 0.0;
        for (w, comp) in &components {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mixture weights must be positive, got {w}"
                )));
            }
            comp.validate()?;
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(MixtureDistribution { components })
    }

    /// Single-component convenience constructors.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(1.0, Component::Uniform { lo, hi })])
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![(1.0, Component::Beta { alpha, beta })])
    }

    pub fn components(&self) -> &[(f64, Component)] {
        &self.components
    }

    /// True when every component is uniform (closed-form game trees apply).
    pub fn is_uniform_mixture(&self) -> bool {
        self.components
            .iter()
            .all(|(_, c)| matches!(c, Component::Uniform { .. }))
    }

    fn check_unit(&self, name: &str, c: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!("{name} must lie in [0,1], got {c}")));
        }
        Ok(())
    }

    /// Density f(c).
    pub fn pdf(&self, c: f64) -> Result<f64> {
        self.check_unit("c", c)?;
        Ok(self.components.iter().map(|(w, comp)| w * comp.pdf(c)).sum())
    }

    /// Cumulative distribution F(c).
    pub fn cdf(&self, c: f64) -> Result<f64> {
        self.check_unit("c", c)?;
        Ok(self.components.iter().map(|(w, comp)| w * comp.cdf(c)).sum())
    }

    /// Mean of the distribution.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|(w, comp)| w * comp.mean()).sum()
    }

    /// Smallest c with F(c) >= q, by bisection on the monotone cdf.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        self.check_unit("q", q)?;
        if q == 0.0 {
            return Ok(0.0);
        }
        // Invariant: cdf(lo) < q <= cdf(hi).
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        if self.cdf(0.0)? >= q {
            return Ok(0.0);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid)? >= q {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(hi)
    }

    /// ∫_a^b F(c) dc, exact per component.
    pub fn integral_cdf(&self, a: f64, b: f64) -> Result<f64> {
        self.check_unit("a", a)?;
        self.check_unit("b", b)?;
        if a > b {
            return Err(Error::Domain(format!("reversed bounds: a={a} > b={b}")));
        }
        Ok(self
            .components
            .iter()
            .map(|(w, comp)| w * (comp.integral_cdf_from_zero(b) - comp.integral_cdf_from_zero(a)))
            .sum())
    }

    /// ∫_a^b c f(c) dc, exact per component.
    pub fn partial_expectation(&self, a: f64, b: f64) -> Result<f64> {
        self.check_unit("a", a)?;
        self.check_unit("b", b)?;
        if a > b {
            return Err(Error::Domain(format!("reversed bounds: a={a} > b={b}")));
        }
        Ok(self
            .components
            .iter()
            .map(|(w, comp)| {
                w * (comp.partial_expectation_from_zero(b) - comp.partial_expectation_from_zero(a))
            })
            .sum())
    }

    /// Density of the k-th order statistic of w independent draws:
    /// k C(w,k) f(c) F(c)^{k-1} (1-F(c))^{w-k}.
    pub fn order_statistic_pdf(&self, k: usize, w: usize, c: f64) -> Result<f64> {
        if k == 0 || k > w {
            return Err(Error::Domain(format!(
                "order statistic index k={k} out of range 1..={w}"
            )));
        }
        self.check_unit("c", c)?;
        let f = self.pdf(c)?;
        let big_f = self.cdf(c)?;
        let mut choose = 1.0;
        for i in 0..k.min(w - k) {
            choose = choose * (w - i) as f64 / (i + 1) as f64;
        }
        Ok(k as f64
            * choose
            * f
            * big_f.powi(k as i32 - 1)
            * (1.0 - big_f).powi((w - k) as i32))
    }

    /// Sorted interior breakpoints of uniform components (useful for
    /// piecewise-exact treatments and quadrature splitting).
    pub fn knots(&self) -> Vec<f64> {
        let mut ks: Vec<f64> = Vec::new();
        for (_, comp) in &self.components {
            if let Component::Uniform { lo, hi } = comp {
                ks.push(*lo);
                ks.push(*hi);
            }
        }
        ks.retain(|&k| k > 0.0 && k < 1.0);
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ks.dedup();
        ks
    }

    /// Build a reusable sampler for this mixture.
    pub fn sampler(&self) -> MixtureSampler {
        let mut cum = 0.0;
        let mut cum_weights = Vec::with_capacity(self.components.len());
        let mut comps = Vec::with_capacity(self.components.len());
        for (w, comp) in &self.components {
            cum += w;
            cum_weights.push(cum);
            comps.push(match *comp {
                Component::Uniform { lo, hi } => ComponentSampler::Uniform { lo, hi },
                Component::Beta { alpha, beta } => ComponentSampler::Beta(
                    rand_distr::Beta::new(alpha, beta).expect("validated beta shapes"),
                ),
            });
        }
        // Guard against accumulated rounding at the top end.
        if let Some(last) = cum_weights.last_mut() {
            *last = f64::INFINITY;
        }
        MixtureSampler { cum_weights, comps }
    }

    /// Draw one value. Convenience wrapper over [`MixtureSampler`]; build the
    /// sampler once when drawing in bulk.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

enum ComponentSampler {
    Uniform { lo: f64, hi: f64 },
    Beta(rand_distr::Beta<f64>),
}

/// Reusable mixture sampler. Component choice consumes one uniform draw,
/// then the component draws: one uniform for a slab, a gamma-ratio
/// construction (two gamma variates, `x/(x+y)`) for a beta component as
/// implemented by `rand_distr::Beta`.
pub struct MixtureSampler {
    cum_weights: Vec<f64>,
    comps: Vec<ComponentSampler>,
}

impl MixtureSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let idx = self
            .cum_weights
            .iter()
            .position(|&cw| u < cw)
            .unwrap_or(self.comps.len() - 1);
        match &self.comps[idx] {
            ComponentSampler::Uniform { lo, hi } => {
                let v: f64 = rng.random();
                lo + v * (hi - lo)
            }
            ComponentSampler::Beta(b) => b.sample(rng).clamp(0.0, 1.0),
        }
    }
}

/// Two-group population: group a with share `r`, group b with the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupModel {
    r: f64,
    dist_a: MixtureDistribution,
    dist_b: MixtureDistribution,
}

impl GroupModel {
    pub fn new(r: f64, dist_a: MixtureDistribution, dist_b: MixtureDistribution) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 || r >= 1.0 {
            return Err(Error::InvalidDistribution(format!(
                "group share r must lie strictly inside (0,1), got {r}"
            )));
        }
        Ok(GroupModel { r, dist_a, dist_b })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dist_a(&self) -> &MixtureDistribution {
        &self.dist_a
    }

    pub fn dist_b(&self) -> &MixtureDistribution {
        &self.dist_b
    }

    /// The population distribution r f_a + (1-r) f_b.
    pub fn pooled(&self) -> MixtureDistribution {
        let mut comps = Vec::new();
        for (w, c) in self.dist_a.components() {
            comps.push((self.r * w, *c));
        }
        for (w, c) in self.dist_b.components() {
            comps.push(((1.0 - self.r) * w, *c));
        }
        MixtureDistribution::new(comps).expect("pooling preserves validity")
    }
}

// ---------------------------------------------------------------------------
// JSON literal syntax
// ---------------------------------------------------------------------------

/// Serialized distribution literal:
/// `{"uniform":[0.5,1]}`, `{"beta":[1,5]}`, or
/// `{"mixture":[{"w":0.25,"beta":[1,5]},{"w":0.75,"uniform":[0.5,1]}]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub enum DistSpec {
    #[serde(rename = "uniform")]
    Uniform([f64; 2]),
    #[serde(rename = "beta")]
    Beta([f64; 2]),
    #[serde(rename = "mixture")]
    Mixture(Vec<WeightedComponentSpec>),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightedComponentSpec {
    pub w: f64,
    #[serde(flatten)]
    pub component: ComponentSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub enum ComponentSpec {
    #[serde(rename = "uniform")]
    Uniform([f64; 2]),
    #[serde(rename = "beta")]
    Beta([f64; 2]),
}

impl ComponentSpec {
    fn build(&self) -> Component {
        match *self {
            ComponentSpec::Uniform([lo, hi]) => Component::Uniform { lo, hi },
            ComponentSpec::Beta([alpha, beta]) => Component::Beta { alpha, beta },
        }
    }
}

impl DistSpec {
    pub fn build(&self) -> Result<MixtureDistribution> {
        match self {
            DistSpec::Uniform([lo, hi]) => MixtureDistribution::uniform(*lo, *hi),
            DistSpec::Beta([a, b]) => MixtureDistribution::beta(*a, *b),
            DistSpec::Mixture(parts) => MixtureDistribution::new(
                parts.iter().map(|p| (p.w, p.component.build())).collect(),
            ),
        }
    }

    pub fn from_json(text: &str) -> Result<MixtureDistribution> {
        let spec: DistSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("distribution literal: {e}")))?;
        spec.build()
    }
}
