//! Run configuration: `[material]`, `[numerics]` and `[output]` sections of
//! `key = value` lines.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sgconsol::field::{SolveOptions, Truncation};
use sgconsol::{MaterialParams, PencilCoefficients, SearchWindow, SecondGradient, WeightMode};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    pub lambda_lame: f64,
    pub mu_lame: f64,
    pub biot_m: f64,
    #[serde(default = "one")]
    pub biot_b: f64,
    #[serde(default = "one")]
    pub mf0: f64,
    #[serde(default)]
    pub p0_ext: f64,
    pub dp_ext: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_sg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_sf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub darcy_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub darcy_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k4: Option<f64>,
}

/// False for NaN as well as for non-positive values.
fn positive(v: f64) -> bool {
    v > 0.0
}

fn one() -> f64 {
    1.0
}

impl Default for MaterialBlock {
    fn default() -> Self {
        let r = MaterialParams::reference();
        let SecondGradient::Direct { k1, k2, k3, k4 } = r.second_gradient else {
            unreachable!("reference uses direct groups")
        };
        MaterialBlock {
            lambda_lame: r.lambda_lame,
            mu_lame: r.mu_lame,
            biot_m: r.biot_m,
            biot_b: r.biot_b,
            mf0: r.mf0,
            p0_ext: r.p0_ext,
            dp_ext: r.dp_ext,
            k_ss: None,
            m_sg: None,
            k_sf: None,
            darcy_d: None,
            darcy_alpha: None,
            depth_l: None,
            k1: Some(k1),
            k2: Some(k2),
            k3: Some(k3),
            k4: Some(k4),
        }
    }
}

impl MaterialBlock {
    pub fn params(&self) -> Result<MaterialParams, ConfigError> {
        let phys = [
            self.k_ss,
            self.m_sg,
            self.k_sf,
            self.darcy_d,
            self.darcy_alpha,
            self.depth_l,
        ];
        let direct = [self.k1, self.k2, self.k3, self.k4];
        let any_phys = phys.iter().any(Option::is_some);
        let any_direct = direct.iter().any(Option::is_some);
        let second_gradient = match (any_phys, any_direct) {
            (true, true) => return invalid("[material] mixes physical and direct-k entries"),
            (false, false) => return invalid("[material] needs either k_ss..depth_l or k1..k4"),
            (true, false) => match phys {
                [Some(k_ss), Some(m_sg), Some(k_sf), Some(darcy_d), Some(darcy_alpha), Some(depth_l)] => {
                    SecondGradient::Physical {
                        k_ss,
                        m_sg,
                        k_sf,
                        darcy_d,
                        darcy_alpha,
                        depth_l,
                    }
                }
                _ => {
                    return invalid(
                        "physical entry needs k_ss, m_sg, k_sf, darcy_d, darcy_alpha, depth_l",
                    )
                }
            },
            (false, true) => match direct {
                [Some(k1), Some(k2), Some(k3), Some(k4)] => {
                    SecondGradient::Direct { k1, k2, k3, k4 }
                }
                _ => return invalid("direct entry needs k1, k2, k3, k4"),
            },
        };
        Ok(MaterialParams {
            lambda_lame: self.lambda_lame,
            mu_lame: self.mu_lame,
            biot_m: self.biot_m,
            biot_b: self.biot_b,
            second_gradient,
            mf0: self.mf0,
            p0_ext: self.p0_ext,
            dp_ext: self.dp_ext,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsKey {
    #[default]
    Resolved,
    PaperLiteral,
}

impl From<WeightsKey> for WeightMode {
    fn from(k: WeightsKey) -> Self {
        match k {
            WeightsKey::Resolved => WeightMode::Resolved,
            WeightsKey::PaperLiteral => WeightMode::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsBlock {
    /// Fixed number of modes; excludes `trunc_target`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Relative reconstruction target for the initial datum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc_target: Option<f64>,
    /// Most negative eigenvalue searched; default `-1e4 max(1, 1/k1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    pub grid: usize,
    pub lambda_floor: f64,
    pub weights: WeightsKey,
    pub allow_unstable: bool,
    /// Modes listed by the `spectrum` command when `modes` is unset.
    pub spectrum_modes: usize,
    pub sweep_p0_min: f64,
    pub sweep_p0_max: f64,
    pub sweep_count: usize,
    pub threshold_tol: f64,
    pub terzaghi_modes: usize,
    pub fd_nx: usize,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        NumericsBlock {
            modes: None,
            trunc_target: None,
            lambda_min: None,
            grid: 2000,
            lambda_floor: 1e-8,
            weights: WeightsKey::Resolved,
            allow_unstable: false,
            spectrum_modes: 15,
            sweep_p0_min: 4.0,
            sweep_p0_max: 6.0,
            sweep_count: 41,
            threshold_tol: 1e-3,
            terzaghi_modes: 2000,
            fd_nx: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub x_count: usize,
    pub t_values: Vec<f64>,
    /// Times of the classical comparison.
    pub compare_t: Vec<f64>,
    pub plot: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            x_count: 201,
            t_values: vec![0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5, 1.0, 5.0],
            compare_t: vec![0.1],
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub material: MaterialBlock,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The configuration as re-parseable text.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.material.params()?;
        let n = &self.numerics;
        if n.modes.is_some() && n.trunc_target.is_some() {
            return invalid("set at most one of modes and trunc_target");
        }
        if n.modes == Some(0) {
            return invalid("modes must be >= 1");
        }
        if let Some(t) = n.trunc_target {
            if !(t > 0.0 && t < 1.0) {
                return invalid(format!("trunc_target {t} outside (0, 1)"));
            }
        }
        if n.lambda_min.is_some_and(|l| !positive(-l)) {
            return invalid("lambda_min must be negative");
        }
        if n.grid < 2 || !positive(n.lambda_floor) {
            return invalid("grid must be >= 2 and lambda_floor > 0");
        }
        if n.spectrum_modes == 0 || n.terzaghi_modes == 0 {
            return invalid("spectrum_modes and terzaghi_modes must be >= 1");
        }
        if n.sweep_count < 2 || !positive(n.sweep_p0_max - n.sweep_p0_min) {
            return invalid("sweep needs sweep_count >= 2 and sweep_p0_max > sweep_p0_min");
        }
        if !positive(n.threshold_tol) {
            return invalid("threshold_tol must be > 0");
        }
        if n.fd_nx < 101 {
            return invalid("fd_nx must be >= 101");
        }
        let o = &self.output;
        if o.x_count < 2 {
            return invalid("x_count must be >= 2");
        }
        for (name, ts) in [("t_values", &o.t_values), ("compare_t", &o.compare_t)] {
            if ts.is_empty() {
                return invalid(format!("{name} must be nonempty"));
            }
            if ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return invalid(format!("{name} must be finite and >= 0"));
            }
            if ts.windows(2).any(|w| w[1] <= w[0]) {
                return invalid(format!("{name} must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MaterialParams, ConfigError> {
        self.material.params()
    }

    pub fn truncation(&self) -> Truncation {
        match (self.numerics.modes, self.numerics.trunc_target) {
            (Some(n), _) => Truncation::Modes(n),
            (None, Some(t)) => Truncation::Target(t),
            (None, None) => Truncation::default(),
        }
    }

    pub fn window(&self, coeffs: &PencilCoefficients) -> SearchWindow {
        let mut w = SearchWindow::default_for(coeffs).with_grid(self.numerics.grid);
        if let Some(l) = self.numerics.lambda_min {
            w.lambda_min = l;
            if w.lambda_max.is_some() {
                w.lambda_max = Some(-l);
            }
        }
        w.lambda_floor = self.numerics.lambda_floor;
        w
    }

    pub fn solve_options(&self, coeffs: &PencilCoefficients) -> SolveOptions {
        SolveOptions {
            truncation: self.truncation(),
            weights: self.numerics.weights.into(),
            allow_unstable: self.numerics.allow_unstable,
            window: Some(self.window(coeffs)),
        }
    }

    pub fn x_grid(&self) -> Vec<f64> {
        let n = self.output.x_count;
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    pub fn sweep_grid(&self) -> Vec<f64> {
        let n = &self.numerics;
        let (lo, hi, c) = (n.sweep_p0_min, n.sweep_p0_max, n.sweep_count);
        (0..c)
            .map(|i| lo + (hi - lo) * i as f64 / (c - 1) as f64)
            .collect()
    }
}
