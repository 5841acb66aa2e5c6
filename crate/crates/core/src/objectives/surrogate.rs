//! GP-mean surrogate objective fit from tabular yield measurements.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gp::{fit, optimize_hyperparams, Dataset, GpPosterior, HyperOptions, KernelKind, KernelSpec};
use crate::inner_opt::Bounds;
use crate::rng::seeded;

/// Catalyst mass kept when the table carries a mass column.
pub const FIXED_MASS_MG: f64 = 150.0;
pub const MIN_RECORDS: usize = 5;
const FIT_SEED: u64 = 0;

/// Flow in ml/min and block temperature in °C.
pub fn realistic_bounds() -> Bounds {
    Bounds {
        lower: vec![5.0, 520.0],
        upper: vec![50.0, 590.0],
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    flow_ml_min: f64,
    temp_c: f64,
    yield_pct: f64,
    #[serde(default)]
    mass_mg: Option<f64>,
}

/// Reads `flow_ml_min,temp_c,yield_pct[,mass_mg]` rows as
/// `([flow, temp], yield)` records. Rows with a mass other than 150 mg are
/// dropped. A row that fails to parse aborts with its 1-based data row number.
pub fn read_yield_table(path: &Path) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        .clone();
    for col in ["flow_ml_min", "temp_c", "yield_pct"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Data(format!("{}: missing column `{col}`", path.display())));
        }
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Data(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if [row.flow_ml_min, row.temp_c, row.yield_pct].iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("{}: row {}: non-finite value", path.display(), i + 1)));
        }
        if row.mass_mg.is_some_and(|m| m != FIXED_MASS_MG) {
            continue;
        }
        out.push((vec![row.flow_ml_min, row.temp_c], row.yield_pct));
    }
    Ok(out)
}

/// RBF-kernel GP on unit-rescaled inputs with learned noise. Yields are
/// centered on their mean before fitting so the surface relaxes to the table
/// average, not to zero, away from the data. Evaluation returns the
/// posterior mean only.
#[derive(Debug, Clone)]
pub struct Surrogate {
    pub(crate) model: GpPosterior,
    pub(crate) bounds: Bounds,
    pub(crate) offset: f64,
}

impl Surrogate {
    pub fn fit(records: &[(Vec<f64>, f64)], bounds: &Bounds) -> Result<Self> {
        bounds.validate()?;
        if records.len() < MIN_RECORDS {
            return Err(Error::input(format!(
                "surrogate needs at least {MIN_RECORDS} records, got {}",
                records.len()
            )));
        }
        let d = bounds.dim();
        if let Some((x, _)) = records.iter().find(|(x, _)| x.len() != d) {
            return Err(Error::input(format!("record {x:?} does not match the {d}-dimensional bounds")));
        }
        let offset = records.iter().map(|(_, y)| y).sum::<f64>() / records.len() as f64;
        let data = Dataset::new(
            records.iter().map(|(x, _)| bounds.to_unit(x)).collect(),
            records.iter().map(|(_, y)| y - offset).collect(),
        )?;
        let s = data.output_scale_hint();
        let start = KernelSpec::new(KernelKind::Rbf, s, 0.3, 1e-6 * s);
        let opts = HyperOptions {
            learn_noise: true,
            ..HyperOptions::default()
        };
        let tuned = optimize_hyperparams(&data, &start, &opts, &mut seeded(FIT_SEED));
        let model = fit(&data, &tuned.spec)?;
        Ok(Self {
            model,
            bounds: bounds.clone(),
            offset,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        self.model.kernel()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset + self.model.predict_unchecked(&self.bounds.to_unit(x)).0
    }
}
