//! The JSON run configuration and its resolution into library objects.

use std::path::{Path, PathBuf};

use idma::analytic::{FddSpec, MovingAverage};
use idma::quadrature::QuadOptions;
use idma::simulate::{SimConfig, DEFAULT_EPSILON, DEFAULT_GRID_STEP};
use idma::{Kernel1D, LevyMeasure, ProductKernel};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A one-dimensional kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec1D {
    SignedOu {},
    GaussDeriv {},
    PersistentControl {},
    /// Two-column CSV `x,g`, relative to the config file.
    UserTable { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Product(ProductSpec),
    Single(KernelSpec1D),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    kind: ProductTag,
    components: Vec<KernelSpec1D>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ProductTag {
    Product,
}

/// A number (broadcast to every coordinate) or a full point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsSpec {
    One(f64),
    Many(Vec<PointSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Numbers {
    One(f64),
    Many(Vec<f64>),
}

impl Numbers {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            Numbers::One(v) => vec![*v],
            Numbers::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: LevyMeasure,
    pub kernel: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "T_grid", default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_points: Option<PointsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Numbers>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<f64>>,
    /// Covariance lags.
    #[serde(rename = "t_grid", default, skip_serializing_if = "Option::is_none")]
    pub t_lags: Option<Vec<PointSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_pad: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON form, ignoring where and how results
    /// are written.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canonical = self.clone();
        canonical.output = None;
        canonical.format = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serialises");
        format!("{:x}", Sha256::digest(bytes))
    }
}

pub const DEFAULT_T: f64 = 10.0;
pub const DEFAULT_CONVERGE_GRID: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const DEFAULT_HYPER_GRID: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];
pub const DEFAULT_LAGS: [f64; 6] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
pub const DEFAULT_REPLICATES: usize = 1000;
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: MovingAverage,
    pub d: usize,
    pub t: f64,
    pub t_grid: Option<Vec<f64>>,
    pub ls: Vec<Vec<f64>>,
    pub zs: Vec<f64>,
    pub z_grid: Vec<f64>,
    pub lags: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub window_pad: Option<f64>,
    pub replicates: Option<usize>,
    pub seed: u64,
    pub conditions_budget: usize,
    pub threshold: f64,
    pub grid_step: f64,
}

fn load_kernel(spec: &KernelSpec1D, base: &Path) -> Result<Kernel1D, CliError> {
    Ok(match spec {
        KernelSpec1D::SignedOu {} => Kernel1D::signed_ou(),
        KernelSpec1D::GaussDeriv {} => Kernel1D::gauss_deriv(),
        KernelSpec1D::PersistentControl {} => Kernel1D::persistent_control(),
        KernelSpec1D::UserTable { file } => Kernel1D::from_csv_path(base.join(file))?,
    })
}

fn point(p: &PointSpec, d: usize, what: &str) -> Result<Vec<f64>, CliError> {
    match p {
        PointSpec::Scalar(v) => Ok(vec![*v; d]),
        PointSpec::Vector(v) if v.len() == d => Ok(v.clone()),
        PointSpec::Vector(v) => Err(CliError::Config(format!(
            "{what} {v:?} has dimension {} but the kernel has dimension {d}",
            v.len()
        ))),
    }
}

impl RunConfig {
    /// `base` is the directory relative paths in the config refer to.
    pub fn resolve(&self, base: &Path) -> Result<Resolved, CliError> {
        let kernel = match &self.kernel {
            KernelSpec::Single(k) => {
                let k = load_kernel(k, base)?;
                ProductKernel::power(k, self.d.unwrap_or(1))?
            }
            KernelSpec::Product(p) => {
                let comps = p
                    .components
                    .iter()
                    .map(|c| load_kernel(c, base))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(d) = self.d {
                    if d != comps.len() {
                        return Err(CliError::Config(format!(
                            "d = {d} but the product kernel has {} components",
                            comps.len()
                        )));
                    }
                }
                ProductKernel::new(comps)?
            }
        };
        let d = kernel.dim();

        let ls = match &self.l_points {
            None => vec![vec![0.0; d]],
            Some(PointsSpec::One(v)) => vec![vec![*v; d]],
            Some(PointsSpec::Many(ps)) => ps.iter().map(|p| point(p, d, "l point")).collect::<Result<_, _>>()?,
        };
        if ls.is_empty() {
            return Err(CliError::Config("l_points must not be empty".into()));
        }
        let zs = match &self.z {
            None => vec![1.0; ls.len()],
            Some(z) => z.to_vec(),
        };
        if zs.len() != ls.len() {
            return Err(CliError::Config(format!("{} frequencies for {} l points", zs.len(), ls.len())));
        }
        let lags = match &self.t_lags {
            None => DEFAULT_LAGS.iter().map(|&t| vec![t; d]).collect(),
            Some(ps) => ps.iter().map(|p| point(p, d, "lag")).collect::<Result<_, _>>()?,
        };

        let mut quad = QuadOptions::default();
        if let Some(tol) = self.quad_tol {
            if !(tol > 0.0) {
                return Err(CliError::Config(format!("quad_tol must be positive, got {tol}")));
            }
            quad.tol = tol;
        }
        let t = self.t.unwrap_or(DEFAULT_T);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("T must be finite and non-negative, got {t}")));
        }
        let z_grid = self.z_grid.clone().unwrap_or_else(idma::verify::default_z_grid);
        if z_grid.is_empty() {
            return Err(CliError::Config("z_grid must not be empty".into()));
        }
        Ok(Resolved {
            model: MovingAverage::new(kernel, self.measure).with_quad(quad),
            d,
            t,
            t_grid: self.t_grid.clone(),
            ls,
            zs,
            z_grid,
            lags,
            epsilon: self.epsilon.unwrap_or(DEFAULT_EPSILON),
            window_pad: self.window_pad,
            replicates: self.n,
            seed: self.seed.unwrap_or(0),
            conditions_budget: self.conditions_budget.unwrap_or(DEFAULT_BUDGET),
            threshold: self.threshold.unwrap_or(idma::verify::DEFAULT_THRESHOLD),
            grid_step: self.grid_step.unwrap_or(DEFAULT_GRID_STEP),
        })
    }
}

impl Resolved {
    pub fn fdd(&self) -> Result<FddSpec, CliError> {
        Ok(FddSpec::new(self.ls.clone(), self.zs.clone(), self.t)?)
    }

    pub fn sim_config(&self, t: f64, replicates: usize) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig::new(*self.model.measure(), self.model.kernel().clone(), t, self.ls.clone())?
            .with_epsilon(self.epsilon)
            .with_replicates(replicates)
            .with_seed(self.seed)
            .with_grid_step(self.grid_step);
        if let Some(pad) = self.window_pad {
            cfg = cfg.with_window_pad(pad);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse(r#"{"measure":{"kind":"two_point","lambda":1},"kernel":{"kind":"signed_ou"}}"#).unwrap();
        let r = c.resolve(Path::new(".")).unwrap();
        assert_eq!(r.d, 1);
        assert_eq!(r.ls, vec![vec![0.0]]);
        assert_eq!(r.zs, vec![1.0]);
        assert_eq!(r.t, DEFAULT_T);
        assert_eq!(r.z_grid.len(), 41);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"foo":1}"#).is_err());
        assert!(parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou","x":1}}"#).is_err());
    }

    #[test]
    fn product_and_points() {
        let c = parse(
            r#"{"measure":{"kind":"dickman"},
                "kernel":{"kind":"product","components":[{"kind":"signed_ou"},{"kind":"gauss_deriv"}]},
                "l_points":[0.5,[1,2]],"z":[1,-1],"t_grid":[0,[1,0]]}"#,
        )
        .unwrap();
        let r = c.resolve(Path::new(".")).unwrap();
        assert_eq!(r.d, 2);
        assert_eq!(r.ls, vec![vec![0.5, 0.5], vec![1.0, 2.0]]);
        assert_eq!(r.lags, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn mismatched_dimensions_fail() {
        let c = parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"d":2,"l_points":[[1,2,3]]}"#)
            .unwrap();
        assert!(matches!(c.resolve(Path::new(".")), Err(CliError::Config(_))));
        let c = parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"l_points":[0,1],"z":[1]}"#)
            .unwrap();
        assert!(c.resolve(Path::new(".")).is_err());
    }

    #[test]
    fn digest_ignores_output_location() {
        let a = parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"output":"a"}"#).unwrap();
        let b = parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"output":"b","format":"csv"}"#)
            .unwrap();
        let c = parse(r#"{"measure":{"kind":"dickman"},"kernel":{"kind":"signed_ou"},"seed":1}"#).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
