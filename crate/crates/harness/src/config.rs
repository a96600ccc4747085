use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use pa_core::baseline::{EpsGreedyParams, EPS_GREEDY_LABEL};
use pa_core::bandit::Subroutine;
use pa_core::env::{ContextualInstance, MabInstance, TieBreak};
use pa_core::rng::{derive_seed, stream_rng, BASELINE_STREAM};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Mab,
    Contextual,
}

/// One simulated principal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    IpaUcb,
    IpaEpsGreedy,
    OracleUcb,
    EpsGreedy,
    Cipa,
}

impl Algorithm {
    pub fn key(&self) -> &'static str {
        match self {
            Algorithm::IpaUcb => "ipa+ucb",
            Algorithm::IpaEpsGreedy => "ipa+eps-greedy",
            Algorithm::OracleUcb => "oracle-ucb",
            Algorithm::EpsGreedy => "eps-greedy",
            Algorithm::Cipa => "cipa",
        }
    }

    /// Name shown in plots.
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::EpsGreedy => EPS_GREEDY_LABEL,
            other => other.key(),
        }
    }

    /// Stem for per-algorithm output files.
    pub fn file_stem(&self) -> String {
        self.key().replace('+', "_")
    }

    pub fn setting(&self) -> Setting {
        match self {
            Algorithm::Cipa => Setting::Contextual,
            _ => Setting::Mab,
        }
    }

    /// Same algorithm with its IPA subroutine replaced.
    pub fn with_subroutine(self, sub: &str) -> Result<Self> {
        let ipa = match sub {
            "ucb" => Algorithm::IpaUcb,
            "eps-greedy" => Algorithm::IpaEpsGreedy,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown subroutine `{other}` (expected ucb or eps-greedy)"
                )))
            }
        };
        Ok(match self {
            Algorithm::IpaUcb | Algorithm::IpaEpsGreedy => ipa,
            other => other,
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ipa+ucb" | "ipa" => Algorithm::IpaUcb,
            "ipa+eps-greedy" => Algorithm::IpaEpsGreedy,
            "oracle-ucb" => Algorithm::OracleUcb,
            "eps-greedy" => Algorithm::EpsGreedy,
            "cipa" => Algorithm::Cipa,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown algorithm `{other}` (expected ipa+ucb, ipa+eps-greedy, oracle-ucb, eps-greedy or cipa)"
                )))
            }
        })
    }
}

impl TryFrom<String> for Algorithm {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.key().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomInstance {
    pub d: usize,
    #[serde(default = "default_m")]
    pub m: usize,
}

fn default_m() -> usize {
    10
}

/// Where the game instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    /// Built-in name; only `table3` exists.
    Named(String),
    File { path: PathBuf },
    /// Contextual only: a fresh instance per seed, uniform in the unit ball.
    Random { random: RandomInstance },
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub count: usize,
    #[serde(default)]
    pub base: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CipaParams {
    pub base_offer: f64,
    pub samples: usize,
}

impl Default for CipaParams {
    fn default() -> Self {
        Self {
            base_offer: 3.0,
            samples: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpsParams {
    pub m: f64,
    pub alpha: f64,
}

impl Default for EpsParams {
    fn default() -> Self {
        let p = EpsGreedyParams::default();
        Self { m: p.m, alpha: p.alpha }
    }
}

impl From<EpsParams> for EpsGreedyParams {
    fn from(p: EpsParams) -> Self {
        EpsGreedyParams { m: p.m, alpha: p.alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub instance: InstanceSpec,
    #[serde(alias = "T")]
    pub horizon: u64,
    pub seeds: SeedSpec,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub eps_greedy: EpsParams,
    #[serde(default)]
    pub tie: TieBreak,
    #[serde(default)]
    pub cipa: CipaParams,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

fn json_error(what: &str, e: serde_json::Error) -> HarnessError {
    HarnessError::Config(format!("{what}: line {} column {}: {e}", e.line(), e.column()))
}

impl ExperimentConfig {
    /// Built-in five-arm instance, `T = 10^4`, 100 seeds, IPA with UCB against the
    /// UCB oracle and the epsilon-greedy principal.
    pub fn figure1() -> Self {
        Self {
            setting: Setting::Mab,
            instance: InstanceSpec::Named("table3".into()),
            horizon: 10_000,
            seeds: SeedSpec { count: 100, base: 0 },
            algorithms: vec![Algorithm::IpaUcb, Algorithm::OracleUcb, Algorithm::EpsGreedy],
            output_dir: PathBuf::from("figure1"),
            plot: true,
            eps_greedy: EpsParams::default(),
            tie: TieBreak::Adversarial,
            cipa: CipaParams::default(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "figure1" => Ok(Self::figure1()),
            other => Err(HarnessError::Config(format!("unknown preset `{other}` (expected figure1)"))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| json_error("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative instance paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_json(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        if let InstanceSpec::File { path: inst } = &mut cfg.instance {
            if inst.is_relative() {
                if let Some(dir) = path.parent() {
                    *inst = dir.join(&*inst);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(HarnessError::Config(format!("field `horizon`: must be >= 2, got {}", self.horizon)));
        }
        if self.seeds.count == 0 {
            return Err(HarnessError::Config("field `seeds.count`: must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("field `algorithms`: list is empty".into()));
        }
        for a in &self.algorithms {
            if a.setting() != self.setting {
                return Err(HarnessError::Config(format!(
                    "field `algorithms`: `{a}` does not apply to the {:?} setting",
                    self.setting
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.algorithms.iter().find(|a| !seen.insert(**a)) {
            return Err(HarnessError::Config(format!("field `algorithms`: `{dup}` listed twice")));
        }
        if !(self.eps_greedy.m > 0.0 && self.eps_greedy.alpha > 0.0) {
            return Err(HarnessError::Config("field `eps_greedy`: m and alpha must be positive".into()));
        }
        match (&self.instance, self.setting) {
            (InstanceSpec::Named(n), Setting::Mab) if n == "table3" => {}
            (InstanceSpec::Named(n), _) => {
                return Err(HarnessError::Config(format!(
                    "field `instance`: unknown built-in `{n}` for the {:?} setting",
                    self.setting
                )))
            }
            (InstanceSpec::Random { .. }, Setting::Mab) => {
                return Err(HarnessError::Config(
                    "field `instance`: random instances are only available in the contextual setting".into(),
                ))
            }
            (InstanceSpec::Random { random }, Setting::Contextual) if random.d == 0 || random.m == 0 => {
                return Err(HarnessError::Config("field `instance.random`: d and m must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }

    fn instance_text(&self) -> Result<Option<String>> {
        match &self.instance {
            InstanceSpec::File { path } => std::fs::read_to_string(path)
                .map(Some)
                .map_err(|e| HarnessError::io(path, e)),
            InstanceSpec::Inline(v) => Ok(Some(v.to_string())),
            _ => Ok(None),
        }
    }

    fn instance_origin(&self) -> String {
        match &self.instance {
            InstanceSpec::File { path } => format!("instance file {}", path.display()),
            _ => "inline instance".into(),
        }
    }

    pub fn mab_instance(&self) -> Result<MabInstance> {
        if let InstanceSpec::Named(n) = &self.instance {
            if n == "table3" {
                return Ok(MabInstance::table3());
            }
        }
        let text = self
            .instance_text()?
            .ok_or_else(|| HarnessError::Config("field `instance`: not a multi-armed instance".into()))?;
        MabInstance::from_json(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", self.instance_origin())))
    }

    /// Instance played under a given run seed.
    pub fn contextual_instance(&self, seed: u64) -> Result<ContextualInstance> {
        if let InstanceSpec::Random { random } = &self.instance {
            let mut rng = stream_rng(derive_seed(seed, 0), BASELINE_STREAM);
            return Ok(ContextualInstance::random(random.d, random.m, &mut rng));
        }
        let text = self
            .instance_text()?
            .ok_or_else(|| HarnessError::Config("field `instance`: not a contextual instance".into()))?;
        ContextualInstance::from_json(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", self.instance_origin())))
    }

    pub fn subroutine(&self, alg: Algorithm) -> Option<Subroutine> {
        match alg {
            Algorithm::IpaUcb => Some(Subroutine::Ucb),
            Algorithm::IpaEpsGreedy => Some(Subroutine::EpsGreedy {
                m: self.eps_greedy.m,
                alpha: self.eps_greedy.alpha,
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::from_json(
            r#"{"setting":"mab","instance":"table3","T":500,"seeds":{"count":3},"algorithms":["ipa+ucb","oracle-ucb"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.horizon, 500);
        assert_eq!(cfg.seeds.base, 0);
        assert_eq!(cfg.algorithms, vec![Algorithm::IpaUcb, Algorithm::OracleUcb]);
        assert_eq!(cfg.mab_instance().unwrap(), MabInstance::table3());
    }

    #[test]
    fn inline_instance() {
        let cfg = ExperimentConfig::from_json(
            r#"{"setting":"mab","instance":{"k":2,"s":[0.1,0.2],"theta":[0.5,0.4]},"horizon":100,
                "seeds":{"count":1},"algorithms":["eps-greedy"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.mab_instance().unwrap().k(), 2);
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let cases = [
            (r#"{"setting":"mab","instance":"table3","T":1,"seeds":{"count":1},"algorithms":["ipa"]}"#, "horizon"),
            (r#"{"setting":"mab","instance":"table3","T":10,"seeds":{"count":0},"algorithms":["ipa"]}"#, "seeds.count"),
            (r#"{"setting":"mab","instance":"table3","T":10,"seeds":{"count":1},"algorithms":[]}"#, "algorithms"),
            (r#"{"setting":"mab","instance":"table3","T":10,"seeds":{"count":1},"algorithms":["cipa"]}"#, "algorithms"),
            (r#"{"setting":"mab","instance":"table4","T":10,"seeds":{"count":1},"algorithms":["ipa"]}"#, "instance"),
        ];
        for (text, field) in cases {
            let err = ExperimentConfig::from_json(text).unwrap_err();
            assert!(matches!(err, HarnessError::Config(_)));
            assert!(err.to_string().contains(field), "{err}");
        }
        let err = ExperimentConfig::from_json(r#"{"setting":"mab","instance":"table3","T":10,"seeds":{"count":1},"algorithms":["ucb"]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("unknown algorithm"), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = ExperimentConfig::from_json("{\n  \"setting\": \"mab\",\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn subroutine_override() {
        assert_eq!(Algorithm::IpaUcb.with_subroutine("eps-greedy").unwrap(), Algorithm::IpaEpsGreedy);
        assert_eq!(Algorithm::OracleUcb.with_subroutine("eps-greedy").unwrap(), Algorithm::OracleUcb);
        assert!(Algorithm::IpaUcb.with_subroutine("thompson").is_err());
    }

    #[test]
    fn random_contextual_instances_vary_by_seed() {
        let cfg = ExperimentConfig::from_json(
            r#"{"setting":"contextual","instance":{"random":{"d":2}},"T":100,"seeds":{"count":2},"algorithms":["cipa"]}"#,
        )
        .unwrap();
        let a = cfg.contextual_instance(1).unwrap();
        let b = cfg.contextual_instance(2).unwrap();
        assert_eq!(a.m(), 10);
        assert_ne!(a, b);
        assert_eq!(a, cfg.contextual_instance(1).unwrap());
    }
}
