use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use pifo_bounds::solvers::{AlgorithmSpec, SamplingScheme};
use pifo_bounds::{make_avg_c, make_avg_sc, make_c, make_nc, make_one_d, make_sc, Family, HardInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sampling {
    Named(String),
    Explicit { probs: Vec<f64> },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Named("uniform".into())
    }
}

/// One experiment: a family with its parameters, an algorithm and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    #[serde(rename = "L", default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(rename = "Lavg", default)]
    pub lavg: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(rename = "Delta", default)]
    pub delta: Option<f64>,
    #[serde(rename = "Bdist", default)]
    pub bdist: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    pub n: usize,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub algorithm: Option<AlgorithmSpec>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Stop each run once the target accuracy is reached.
    #[serde(default = "yes")]
    pub stop_at_eps: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

/// A cross product of overrides applied to a base experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub n: Vec<usize>,
    /// Absolute condition numbers `L/μ`.
    #[serde(default)]
    pub kappa: Vec<f64>,
    /// Condition numbers as multiples of `n`.
    #[serde(default)]
    pub kappa_over_n: Vec<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn need(v: Option<f64>, name: &str, family: Family) -> anyhow::Result<f64> {
    match v {
        Some(x) => Ok(x),
        None => bail!("family {family} needs parameter {name:?}"),
    }
}

impl ExperimentConfig {
    pub fn instance(&self) -> anyhow::Result<HardInstance> {
        let f = self.family;
        let n = self.n;
        let inst = match f {
            Family::Sc => make_sc(need(self.l, "L", f)?, need(self.mu, "mu", f)?, n, need(self.delta, "Delta", f)?, need(self.eps, "eps", f)?),
            Family::C => make_c(need(self.l, "L", f)?, need(self.bdist, "Bdist", f)?, n, need(self.eps, "eps", f)?),
            Family::AvgSc => make_avg_sc(need(self.lavg, "Lavg", f)?, need(self.mu, "mu", f)?, n, need(self.delta, "Delta", f)?, need(self.eps, "eps", f)?),
            Family::AvgC => make_avg_c(need(self.lavg, "Lavg", f)?, need(self.bdist, "Bdist", f)?, n, need(self.eps, "eps", f)?),
            Family::OneD => make_one_d(need(self.l, "L", f)?, need(self.bdist, "Bdist", f)?, n),
            Family::Nc => make_nc(need(self.l, "L", f)?, need(self.sigma, "sigma", f)?, n, need(self.delta, "Delta", f)?, need(self.eps, "eps", f)?),
        };
        Ok(inst?)
    }

    pub fn scheme(&self) -> anyhow::Result<SamplingScheme> {
        match &self.sampling {
            Sampling::Named(s) if s == "uniform" => Ok(SamplingScheme::uniform(self.n, 0)),
            Sampling::Named(s) => bail!("unknown sampling {s:?}; use \"uniform\" or {{\"probs\": [...]}}"),
            Sampling::Explicit { probs } => {
                if probs.len() != self.n {
                    bail!("sampling has {} probabilities for n = {}", probs.len(), self.n);
                }
                Ok(SamplingScheme::new(probs.clone(), 0)?)
            }
        }
    }

    pub fn algorithm(&self) -> AlgorithmSpec {
        self.algorithm.unwrap_or(AlgorithmSpec::PointSaga { gamma: None })
    }

    /// Accuracy the runs aim for.
    pub fn target(&self) -> Option<f64> {
        self.eps
    }

    pub fn seeds(&self, override_seed: Option<u64>) -> Vec<u64> {
        match override_seed {
            Some(s) => vec![s],
            None if self.seeds.is_empty() => vec![0],
            None => self.seeds.clone(),
        }
    }

    pub fn budget(&self) -> anyhow::Result<u64> {
        match self.budget {
            Some(b) if b >= 1 => Ok(b),
            Some(_) => bail!("budget must be at least 1"),
            None => bail!("config needs a query \"budget\""),
        }
    }
}

impl SweepConfig {
    /// Every grid point as a full experiment config.
    pub fn expand(&self) -> anyhow::Result<Vec<ExperimentConfig>> {
        let g = &self.grid;
        if g.n.is_empty() && g.kappa.is_empty() && g.kappa_over_n.is_empty() && g.eps.is_empty() {
            bail!("sweep grid is empty");
        }
        if !g.kappa.is_empty() && !g.kappa_over_n.is_empty() {
            bail!("give either kappa or kappa_over_n, not both");
        }
        let ns = if g.n.is_empty() { vec![self.base.n] } else { g.n.clone() };
        let eps = if g.eps.is_empty() { vec![self.base.eps] } else { g.eps.iter().map(|&e| Some(e)).collect() };
        let kappas: Vec<Option<(f64, bool)>> = if !g.kappa.is_empty() {
            g.kappa.iter().map(|&k| Some((k, false))).collect()
        } else if !g.kappa_over_n.is_empty() {
            g.kappa_over_n.iter().map(|&k| Some((k, true))).collect()
        } else {
            vec![None]
        };
        if kappas[0].is_some() && self.base.family != Family::Sc {
            bail!("kappa grids apply to the SC family only");
        }
        let mut out = Vec::new();
        for &n in &ns {
            for &k in &kappas {
                for &e in &eps {
                    let mut c = self.base.clone();
                    c.n = n;
                    c.eps = e;
                    if let Some((k, per_n)) = k {
                        let kappa = if per_n { k * n as f64 } else { k };
                        let mu = c.mu.unwrap_or(1.0);
                        c.mu = Some(mu);
                        c.l = Some(kappa * mu);
                    }
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}
