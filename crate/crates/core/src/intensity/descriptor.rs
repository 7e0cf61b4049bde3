//! JSON model descriptor:
//! `{"family": "...", "params": {...}, "state_floor": int}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Family, IntensityModel, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Poisson,
    SpaceLinear,
    TimeExponential,
    Product,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub family: FamilyName,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub state_floor: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoissonParams {
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaAlpha {
    lambda: f64,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    alpha: f64,
    lambda: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedParams {
    t_grid: Vec<f64>,
    z_min: u64,
    rates: Vec<Vec<f64>>,
    #[serde(default)]
    rates_dt: Option<Vec<Vec<f64>>>,
}

fn params<P: for<'de> Deserialize<'de>>(v: &Value) -> Result<P> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidModel(format!("params: {e}")))
}

impl ModelDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn build(&self) -> Result<IntensityModel<f64>> {
        let family = match self.family {
            FamilyName::Poisson => {
                let p: PoissonParams = params(&self.params)?;
                Family::Poisson { alpha: p.alpha }
            }
            FamilyName::SpaceLinear => {
                let p: LambdaAlpha = params(&self.params)?;
                Family::SpaceLinear { lambda: p.lambda, alpha: p.alpha }
            }
            FamilyName::TimeExponential => {
                let p: LambdaAlpha = params(&self.params)?;
                Family::TimeExponential { alpha: p.alpha, lambda: p.lambda }
            }
            FamilyName::Product => {
                let p: ProductParams = params(&self.params)?;
                Family::Product { alpha: p.alpha, lambda: p.lambda, beta: p.beta }
            }
            FamilyName::Tabulated => {
                let p: TabulatedParams = params(&self.params)?;
                Family::Tabulated(Table::new(p.t_grid, p.z_min, p.rates, p.rates_dt)?)
            }
        };
        IntensityModel::new(family, self.state_floor)
    }
}

impl IntensityModel<f64> {
    pub fn descriptor(&self) -> ModelDescriptor {
        let (family, params) = match &self.family {
            Family::Poisson { alpha } => (FamilyName::Poisson, json!({ "alpha": alpha })),
            Family::SpaceLinear { lambda, alpha } => {
                (FamilyName::SpaceLinear, json!({ "lambda": lambda, "alpha": alpha }))
            }
            Family::TimeExponential { alpha, lambda } => {
                (FamilyName::TimeExponential, json!({ "alpha": alpha, "lambda": lambda }))
            }
            Family::Product { alpha, lambda, beta } => {
                (FamilyName::Product, json!({ "alpha": alpha, "lambda": lambda, "beta": beta }))
            }
            Family::Tabulated(t) => (
                FamilyName::Tabulated,
                json!({
                    "t_grid": t.t_grid(),
                    "z_min": t.z_min(),
                    "rates": t.rates(),
                    "rates_dt": t.rates_dt(),
                }),
            ),
        };
        ModelDescriptor { family, params, state_floor: self.state_floor }
    }
}
