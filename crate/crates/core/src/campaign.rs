//! Ask-tell campaigns persisted as JSON between process runs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::KernelSpec;
use crate::strategies::{BatchProposal, CampaignConfig, EngineState, ObservedBatch};

pub const SCHEMA_VERSION: u32 = 1;

/// Document accepted by [`parse_campaign_config`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    #[serde(default)]
    pub seed: u64,
    pub campaign: CampaignConfig,
}

/// Persistent campaign state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignState {
    pub schema_version: u32,
    pub config: CampaignConfig,
    pub seed: u64,
    /// Completed iterations.
    pub t: usize,
    /// Iterations whose random substreams have been used, including a
    /// pending one.
    pub substream_counter: u64,
    pub dataset: Vec<ObservedBatch>,
    pub kernel: Option<KernelSpec>,
    pub outer_kernel: Option<KernelSpec>,
    pub pending: Option<BatchProposal>,
}

impl CampaignState {
    fn engine(&self) -> EngineState {
        EngineState {
            t: self.t,
            batches: self.dataset.clone(),
            kernel: self.kernel,
            outer_kernel: self.outer_kernel,
            pending: self.pending.clone(),
        }
    }

    fn absorb(&mut self, e: EngineState) {
        self.substream_counter = e.t as u64 + u64::from(e.pending.is_some());
        self.t = e.t;
        self.dataset = e.batches;
        self.kernel = e.kernel;
        self.outer_kernel = e.outer_kernel;
        self.pending = e.pending;
    }

    fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        self.config.validate()?;
        if self.dataset.len() != self.t {
            return Err(Error::config("dataset", format!("{} batches recorded but t = {}", self.dataset.len(), self.t)));
        }
        let expected = self.t as u64 + u64::from(self.pending.is_some());
        if self.substream_counter != expected {
            return Err(Error::config(
                "substream_counter",
                format!("expected {expected}, found {}", self.substream_counter),
            ));
        }
        Ok(())
    }

    /// Every observed `(point, value)` pair in real coordinates.
    pub fn observations(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.dataset
            .iter()
            .flat_map(|b| b.points.iter().map(Vec::as_slice).zip(b.values.iter().copied()))
    }
}

/// Fresh state: `t = 0`, no data, nothing pending.
pub fn campaign_init(config: CampaignConfig, seed: u64) -> Result<CampaignState> {
    config.validate()?;
    Ok(CampaignState {
        schema_version: SCHEMA_VERSION,
        config,
        seed,
        t: 0,
        substream_counter: 0,
        dataset: Vec::new(),
        kernel: None,
        outer_kernel: None,
        pending: None,
    })
}

/// Next batch (the initialization batch at `t = 0`), recorded as pending.
pub fn suggest(state: &mut CampaignState) -> Result<BatchProposal> {
    let mut e = state.engine();
    let p = e.suggest(&state.config, state.seed)?;
    state.absorb(e);
    Ok(p)
}

/// Absorbs one value per pending point and advances `t`.
pub fn observe(state: &mut CampaignState, values: &[f64]) -> Result<()> {
    let mut e = state.engine();
    e.observe(values)?;
    state.absorb(e);
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })
}

pub fn parse_campaign_config(text: &str) -> Result<CampaignFile> {
    let f: CampaignFile = parse(text)?;
    f.campaign.validate()?;
    Ok(f)
}

pub fn state_from_json(text: &str) -> Result<CampaignState> {
    let s: CampaignState = parse(text)?;
    s.check()?;
    Ok(s)
}

pub fn state_to_json(state: &CampaignState) -> Result<String> {
    serde_json::to_string_pretty(state).map_err(|e| Error::Data(e.to_string()))
}

pub fn load_state(path: &Path) -> Result<CampaignState> {
    state_from_json(&fs::read_to_string(path)?)
}

/// Writes through a temporary sibling file so a crash never leaves a
/// truncated state behind.
pub fn save_state(state: &CampaignState, path: &Path) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, state_to_json(state)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_opt::Bounds;
    use crate::strategies::{DesignSpace, StrategyName};

    fn config() -> CampaignConfig {
        let space = DesignSpace::new(Bounds::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap(), vec![0]).unwrap();
        CampaignConfig::new(StrategyName::PcTsUcb, space, 4)
    }

    #[test]
    fn init_rules() {
        let s = campaign_init(config(), 5).unwrap();
        assert_eq!(s.t, 0);
        assert!(s.pending.is_none() && s.dataset.is_empty());
        assert_eq!(s, campaign_init(config(), 5).unwrap());
        let mut bad = config();
        bad.space.constrained_dims = vec![2];
        assert!(campaign_init(bad, 5).unwrap_err().is_config());
    }

    #[test]
    fn suggest_observe_cycle() {
        let mut s = campaign_init(config(), 1).unwrap();
        let p = suggest(&mut s).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.shares_dims(&[0]));
        assert!(matches!(suggest(&mut s), Err(Error::Sequencing(_))));
        assert!(observe(&mut s, &[1.0, 2.0, 3.0]).is_err());
        let e = observe(&mut s, &[1.0, f64::NAN, 3.0, 4.0]).unwrap_err();
        assert!(e.to_string().contains("slot 1"));
        observe(&mut s, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.t, 1);
        assert_eq!(s.substream_counter, 1);
        assert_eq!(s.observations().count(), 4);
    }

    #[test]
    fn round_trip_preserves_future_suggestions() {
        let f = |x: &[f64]| -(x[0] - 1.2).powi(2) - (x[1] - 0.3).powi(2);
        let mut a = campaign_init(config(), 2).unwrap();
        for _ in 0..2 {
            let p = suggest(&mut a).unwrap();
            let v: Vec<f64> = p.points.iter().map(|x| f(x)).collect();
            observe(&mut a, &v).unwrap();
        }
        let mut b = state_from_json(&state_to_json(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(suggest(&mut a).unwrap(), suggest(&mut b).unwrap());
        let mut c = state_from_json(&state_to_json(&a).unwrap()).unwrap();
        let v = vec![0.0; 4];
        observe(&mut a, &v).unwrap();
        observe(&mut c, &v).unwrap();
        assert_eq!(suggest(&mut a).unwrap(), suggest(&mut c).unwrap());
    }

    #[test]
    fn state_file_rejections() {
        let s = campaign_init(config(), 2).unwrap();
        let json = state_to_json(&s).unwrap();
        let wrong = json.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(state_from_json(&wrong).unwrap_err().is_config());
        let extra = json.replacen('{', "{\"extra\": 1,", 1);
        assert!(state_from_json(&extra).unwrap_err().is_config());
        let skewed = json.replace("\"substream_counter\": 0", "\"substream_counter\": 3");
        assert!(state_from_json(&skewed).is_err());
    }

    #[test]
    fn config_errors_carry_paths() {
        let e = parse_campaign_config(r#"{"campaign": {"strategy": "pc_ts", "space": {"bounds": {"lower": [0], "upper": [1]}}}}"#)
            .unwrap_err();
        match e {
            Error::Config { path, .. } => assert_eq!(path, "campaign.strategy"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let mut s = campaign_init(config(), 4).unwrap();
        suggest(&mut s).unwrap();
        save_state(&s, &path).unwrap();
        assert_eq!(load_state(&path).unwrap(), s);
    }
}
