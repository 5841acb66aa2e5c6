use serde::{Deserialize, Serialize};

use super::space::{DesignSpace, HierarchySpec};
use crate::acquisition::{AcquisitionSpec, DEFAULT_BETA, DEFAULT_DELTA, DEFAULT_XI};
use crate::error::{Error, Result};
use crate::gp::KernelKind;
use crate::inner_opt::DEFAULT_DIRECT_EVALS;

/// Registered strategy names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Random,
    SeqBo,
    GpUcbPe,
    PcBasicGpucb,
    PcBasicUcb,
    PcNestedGpucb,
    PcNestedUcb,
    PcTsUcb,
    PcTsEi,
    HpcTsUcb,
}

/// Proposal algorithm behind a registered name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Random,
    Sequential,
    GpUcbPe,
    PcBasic,
    PcNested,
    PcTs,
    HpcTs,
}

impl StrategyName {
    pub const ALL: [StrategyName; 10] = [
        Self::Random,
        Self::SeqBo,
        Self::GpUcbPe,
        Self::PcBasicGpucb,
        Self::PcBasicUcb,
        Self::PcNestedGpucb,
        Self::PcNestedUcb,
        Self::PcTsUcb,
        Self::PcTsEi,
        Self::HpcTsUcb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::SeqBo => "seq_bo",
            Self::GpUcbPe => "gp_ucb_pe",
            Self::PcBasicGpucb => "pc_basic_gpucb",
            Self::PcBasicUcb => "pc_basic_ucb",
            Self::PcNestedGpucb => "pc_nested_gpucb",
            Self::PcNestedUcb => "pc_nested_ucb",
            Self::PcTsUcb => "pc_ts_ucb",
            Self::PcTsEi => "pc_ts_ei",
            Self::HpcTsUcb => "hpc_ts_ucb",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.as_str() == name)
    }

    pub fn kind(self) -> StrategyKind {
        match self {
            Self::Random => StrategyKind::Random,
            Self::SeqBo => StrategyKind::Sequential,
            Self::GpUcbPe => StrategyKind::GpUcbPe,
            Self::PcBasicGpucb | Self::PcBasicUcb => StrategyKind::PcBasic,
            Self::PcNestedGpucb | Self::PcNestedUcb => StrategyKind::PcNested,
            Self::PcTsUcb | Self::PcTsEi => StrategyKind::PcTs,
            Self::HpcTsUcb => StrategyKind::HpcTs,
        }
    }

    pub fn default_acquisition(self) -> AcquisitionSpec {
        let gp_ucb = AcquisitionSpec::GpUcb { delta: DEFAULT_DELTA };
        let ucb = AcquisitionSpec::Ucb { beta: DEFAULT_BETA };
        match self {
            Self::GpUcbPe | Self::PcBasicGpucb | Self::PcNestedGpucb => gp_ucb,
            Self::PcTsEi => AcquisitionSpec::Ei { xi: DEFAULT_XI },
            _ => ucb,
        }
    }

    /// Strategies whose batches share their constrained coordinates.
    pub fn is_process_constrained(self) -> bool {
        matches!(
            self.kind(),
            StrategyKind::PcBasic | StrategyKind::PcNested | StrategyKind::PcTs
        )
    }
}

impl std::fmt::Display for StrategyName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_restarts() -> usize {
    5
}
fn default_direct_evals() -> usize {
    DEFAULT_DIRECT_EVALS
}
fn default_probes() -> usize {
    1000
}
fn default_length_scale() -> f64 {
    0.25
}

/// Surrogate-model and inner-search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub kernel: KernelKind,
    #[serde(default)]
    pub learn_noise: bool,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_direct_evals")]
    pub direct_evals: usize,
    /// Uniform probes tried when DIRECT fails or returns the box center.
    #[serde(default = "default_probes")]
    pub fallback_probes: usize,
    /// Length scale of the kernel before the first fit (unit-cube scale).
    #[serde(default = "default_length_scale")]
    pub initial_length_scale: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kernel: KernelKind::default(),
            learn_noise: false,
            restarts: default_restarts(),
            direct_evals: default_direct_evals(),
            fallback_probes: default_probes(),
            initial_length_scale: default_length_scale(),
        }
    }
}

/// Rewraps an error as a config error at `path`.
fn at(path: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::config(path, e.to_string())
}

fn default_batch() -> usize {
    4
}

/// Everything a single campaign needs besides the objective and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub strategy: StrategyName,
    /// Overrides the strategy's default acquisition.
    #[serde(default)]
    pub acquisition: Option<AcquisitionSpec>,
    /// Points per batch. Sequential BO always uses 1 and the hierarchical
    /// strategy uses the hierarchy's leaf count.
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    pub space: DesignSpace,
    #[serde(default)]
    pub hierarchy: Option<HierarchySpec>,
    #[serde(default)]
    pub model: ModelConfig,
}

impl CampaignConfig {
    pub fn new(strategy: StrategyName, space: DesignSpace, batch_size: usize) -> Self {
        Self {
            strategy,
            acquisition: None,
            batch_size,
            space,
            hierarchy: None,
            model: ModelConfig::default(),
        }
    }

    /// Hierarchical configuration; the root level's dimensions become the
    /// space's constrained set.
    pub fn hierarchical(space: DesignSpace, hierarchy: HierarchySpec) -> Self {
        let mut space = space;
        if let Some(root) = hierarchy.levels.first() {
            space.constrained_dims = root.dims.clone();
        }
        Self {
            strategy: StrategyName::HpcTsUcb,
            acquisition: None,
            batch_size: hierarchy.leaves(),
            space,
            hierarchy: Some(hierarchy),
            model: ModelConfig::default(),
        }
    }

    pub fn acquisition(&self) -> AcquisitionSpec {
        self.acquisition.unwrap_or_else(|| self.strategy.default_acquisition())
    }

    pub fn effective_batch_size(&self) -> usize {
        match (self.strategy.kind(), &self.hierarchy) {
            (StrategyKind::Sequential, _) => 1,
            (StrategyKind::HpcTs, Some(h)) => h.leaves(),
            _ => self.batch_size,
        }
    }

    /// Validates the whole configuration, reporting config errors with the
    /// offending field path.
    pub fn validate(&self) -> Result<()> {
        self.space.validate().map_err(at("space"))?;
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be at least 1"));
        }
        let acq = self.acquisition();
        acq.validate().map_err(at("acquisition"))?;
        match self.strategy.kind() {
            StrategyKind::PcBasic | StrategyKind::PcNested | StrategyKind::PcTs => {
                self.space.require_split().map_err(at("space.constrained_dims"))?;
            }
            StrategyKind::HpcTs => {
                let Some(h) = &self.hierarchy else {
                    return Err(Error::config("hierarchy", "required by hpc_ts_ucb"));
                };
                h.validate(self.space.dim()).map_err(at("hierarchy"))?;
            }
            _ => {}
        }
        if matches!(self.strategy.kind(), StrategyKind::PcNested | StrategyKind::GpUcbPe | StrategyKind::PcBasic)
            && matches!(acq, AcquisitionSpec::Ei { .. })
        {
            return Err(Error::config("acquisition", "this strategy needs a confidence-bound acquisition"));
        }
        let m = &self.model;
        if m.restarts == 0 {
            return Err(Error::config("model.restarts", "must be at least 1"));
        }
        if m.direct_evals == 0 {
            return Err(Error::config("model.direct_evals", "must be at least 1"));
        }
        if !(m.initial_length_scale > 0.0 && m.initial_length_scale.is_finite()) {
            return Err(Error::config("model.initial_length_scale", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_opt::Bounds;

    #[test]
    fn registry_round_trip() {
        for s in StrategyName::ALL {
            assert_eq!(StrategyName::from_name(s.as_str()), Some(s));
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.as_str()));
        }
        assert_eq!(StrategyName::from_name("pc_ts"), None);
    }

    #[test]
    fn validation_paths() {
        let space = DesignSpace::new(Bounds::unit(2), vec![]).unwrap();
        let c = CampaignConfig::new(StrategyName::PcTsUcb, space.clone(), 4);
        let e = c.validate().unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "space.constrained_dims"), "{e}");
        let c = CampaignConfig::new(StrategyName::HpcTsUcb, space.clone(), 4);
        assert!(c.validate().is_err());
        let mut c = CampaignConfig::new(StrategyName::GpUcbPe, space, 4);
        c.validate().unwrap();
        c.acquisition = Some(AcquisitionSpec::GpUcb { delta: 1.5 });
        assert!(c.validate().is_err());
    }

    #[test]
    fn batch_size_rules() {
        let space = DesignSpace::new(Bounds::unit(3), vec![0]).unwrap();
        assert_eq!(CampaignConfig::new(StrategyName::SeqBo, space.clone(), 4).effective_batch_size(), 1);
        let h = HierarchySpec::new(vec![vec![0], vec![1], vec![2]], vec![1, 2, 4]).unwrap();
        let c = CampaignConfig::hierarchical(space, h);
        c.validate().unwrap();
        assert_eq!(c.effective_batch_size(), 8);
    }
}
