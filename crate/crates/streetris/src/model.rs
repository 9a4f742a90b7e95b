//! Network parameters, deployments, path loss and the configuration file.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::IntegrationSpec;
use crate::simulate::SimConfig;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidParameter { name, value, reason }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Every scalar of the street model in linear SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// BS density per meter of street.
    pub lambda_b: f64,
    /// Blockage density per meter.
    pub lambda_v: f64,
    /// Street (intersection) intensity per meter.
    pub lambda_r: f64,
    pub h_b: f64,
    pub h_s: f64,
    pub h_v: f64,
    /// Nakagami shape.
    pub n0: u32,
    /// RIS element count.
    pub n_elements: u32,
    pub u_m: f64,
    pub u_s: f64,
    pub v_m: f64,
    pub v_s: f64,
    /// Transmit power (W).
    pub p_t: f64,
    /// Noise power spectral density (W/Hz).
    pub noise_psd: f64,
    pub bandwidth: f64,
    /// Noise figure, linear.
    pub noise_figure: f64,
    pub f_c: f64,
    pub alpha: f64,
    /// RIS reflective beamwidth (rad).
    pub theta_s: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        let side = 0.77f64.sqrt();
        Self {
            lambda_b: 0.05,
            lambda_v: 0.1,
            lambda_r: 0.1,
            h_b: 10.0,
            h_s: 50.0,
            h_v: 3.0,
            n0: 1,
            n_elements: 100,
            u_m: 2.0,
            u_s: side,
            v_m: 2.0,
            v_s: side,
            p_t: dbm_to_watts(20.0),
            noise_psd: dbm_to_watts(-174.0),
            bandwidth: 1e9,
            noise_figure: db_to_linear(10.0),
            f_c: 28e9,
            alpha: 2.0,
            theta_s: 0.01,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.lambda_b) {
            return Err(invalid("lambda_b", self.lambda_b, "must be positive"));
        }
        if !(self.lambda_v.is_finite() && self.lambda_v >= 0.0) {
            return Err(invalid("lambda_v", self.lambda_v, "must be nonnegative"));
        }
        if !finite_pos(self.lambda_r) {
            return Err(invalid("lambda_r", self.lambda_r, "must be positive"));
        }
        if !finite_pos(self.h_b) {
            return Err(invalid("h_b", self.h_b, "must be positive"));
        }
        if !finite_pos(self.h_v) {
            return Err(invalid("h_v", self.h_v, "must be positive"));
        }
        if !(self.h_s.is_finite() && self.h_s > self.h_b) {
            return Err(invalid("h_s", self.h_s, "must exceed h_b"));
        }
        if self.n0 < 1 {
            return Err(invalid("n0", self.n0 as f64, "must be at least 1"));
        }
        if self.n_elements < 2 {
            return Err(invalid("n_elements", self.n_elements as f64, "must be at least 2"));
        }
        if !(finite_pos(self.u_s) && self.u_m >= self.u_s && self.u_m.is_finite()) {
            return Err(invalid("u_s", self.u_s, "need u_m >= u_s > 0"));
        }
        if !(finite_pos(self.v_s) && self.v_m >= self.v_s && self.v_m.is_finite()) {
            return Err(invalid("v_s", self.v_s, "need v_m >= v_s > 0"));
        }
        for (name, v) in [
            ("p_t", self.p_t),
            ("noise_psd", self.noise_psd),
            ("bandwidth", self.bandwidth),
            ("noise_figure", self.noise_figure),
            ("f_c", self.f_c),
            ("alpha", self.alpha),
        ] {
            if !finite_pos(v) {
                return Err(invalid(name, v, "must be positive"));
            }
        }
        if !(self.theta_s.is_finite() && self.theta_s >= 0.0) {
            return Err(invalid("theta_s", self.theta_s, "must be nonnegative"));
        }
        if !finite_pos(self.sigma2()) {
            return Err(invalid("sigma2", self.sigma2(), "must be positive"));
        }
        Ok(())
    }

    /// Noise power normalized by transmit power.
    pub fn sigma2(&self) -> f64 {
        self.noise_psd * self.bandwidth * self.noise_figure / self.p_t
    }

    pub fn ratios(&self) -> BlockageRatios {
        BlockageRatios::new(self)
    }

    pub fn path_loss(&self) -> PathLossModel {
        PathLossModel::new(self)
    }

    /// Blockage shadow rate toward a BS: `lambda_v h_v / h_b`.
    pub fn mu_b(&self) -> f64 {
        self.lambda_v * self.h_v / self.h_b
    }

    /// Blockage shadow rate toward a RIS: `lambda_v h_v / h_s`.
    pub fn mu_s(&self) -> f64 {
        self.lambda_v * self.h_v / self.h_s
    }

    /// Serving-link antenna gain `u_m v_m`.
    pub fn main_gain(&self) -> f64 {
        self.u_m * self.v_m
    }

    /// RIS aggregate beamforming gain `pi (N-1)^2`.
    pub fn ris_gain(&self) -> f64 {
        let m = (self.n_elements - 1) as f64;
        PI * m * m
    }

    /// Horizontal distance from a RIS up to which other BSs reflect into the
    /// user, for a RIS at horizontal distance `r_sb` from its BS.
    pub fn interference_reach(&self, r_sb: f64) -> f64 {
        let dh = self.h_s - self.h_b;
        (dh * dh + r_sb * r_sb).sqrt() * self.theta_s
    }
}

/// Blockage severity relative to BS density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageRatios {
    pub rho_b: f64,
    pub rho_s: f64,
    /// `1 / rho_b` (infinite without blockages).
    pub big_r_b: f64,
    /// `1 / rho_s` (infinite without blockages).
    pub big_r_s: f64,
}

impl BlockageRatios {
    pub fn new(p: &NetworkParams) -> Self {
        let rho_b = p.lambda_v * p.h_v / (p.lambda_b * p.h_b);
        let rho_s = p.lambda_v * p.h_v / (p.lambda_b * p.h_s);
        Self {
            rho_b,
            rho_s,
            big_r_b: 1.0 / rho_b,
            big_r_s: 1.0 / rho_s,
        }
    }

    /// Normalized RIS distance `lambda_b r_s`.
    pub fn f_s(lambda_b: f64, r_s: f64) -> f64 {
        lambda_b * r_s
    }
}

/// Where each BS's RISs sit relative to the BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    FixedDistance { r_s: f64 },
    /// RIS at `f * r_bn / 2`, a fraction of the cell radius.
    CellFraction { f: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    pub placement: Placement,
    pub with_intersection_ris: bool,
}

impl Deployment {
    pub fn fixed(r_s: f64) -> Self {
        Self {
            placement: Placement::FixedDistance { r_s },
            with_intersection_ris: false,
        }
    }

    pub fn cell(f: f64) -> Self {
        Self {
            placement: Placement::CellFraction { f },
            with_intersection_ris: false,
        }
    }

    pub fn with_intersection(mut self) -> Self {
        self.with_intersection_ris = true;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self.placement {
            Placement::FixedDistance { r_s } if !(r_s.is_finite() && r_s >= 0.0) => {
                Err(invalid("r_s", r_s, "must be nonnegative"))
            }
            Placement::CellFraction { f } if !(f > 0.0 && f <= 1.0) => {
                Err(invalid("f", f, "must lie in (0, 1]"))
            }
            Placement::CellFraction { .. } if self.with_intersection_ris => Err(
                ModelError::InvalidDeployment("intersection RISs require a fixed-distance placement".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Power-law path gain `K d^-alpha` and its three link-specific forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub k: f64,
    pub alpha: f64,
    pub h_b: f64,
    pub h_s: f64,
}

impl PathLossModel {
    pub fn new(p: &NetworkParams) -> Self {
        let wavelength = SPEED_OF_LIGHT / p.f_c;
        let k = (wavelength / (4.0 * PI)).powi(2);
        Self {
            k,
            alpha: p.alpha,
            h_b: p.h_b,
            h_s: p.h_s,
        }
    }

    /// Gain at 3D distance `d`.
    pub fn ell(&self, d: f64) -> f64 {
        self.k * d.powf(-self.alpha)
    }

    fn at(&self, r: f64, dh: f64) -> f64 {
        let d2 = r * r + dh * dh;
        if self.alpha == 2.0 {
            self.k / d2
        } else {
            self.k * d2.powf(-0.5 * self.alpha)
        }
    }

    /// User to BS at horizontal distance `r`.
    pub fn ell_ub(&self, r: f64) -> f64 {
        self.at(r, self.h_b)
    }

    /// User to RIS at horizontal distance `r`.
    pub fn ell_us(&self, r: f64) -> f64 {
        self.at(r, self.h_s)
    }

    /// RIS to BS at horizontal distance `r`.
    pub fn ell_sb(&self, r: f64) -> f64 {
        self.at(r, self.h_s - self.h_b)
    }

    /// End-to-end gain through a RIS with `n_elements` elements, given the
    /// user-RIS and RIS-BS horizontal distances.
    pub fn cascade(&self, r_us: f64, r_sb: f64, n_elements: u32) -> f64 {
        let m = (n_elements - 1) as f64;
        PI * m * m * self.ell_sb(r_sb) * self.ell_us(r_us)
    }
}

/// Via-RIS path gain for a user at `r_ub` from its BS and a RIS at `r_s`
/// from the same BS, on the line between them.
pub fn ell_r(r_ub: f64, r_s: f64, pl: &PathLossModel, n_elements: u32) -> f64 {
    pl.cascade((r_ub - r_s).abs(), r_s, n_elements)
}

/// Link-budget parameters as written in a config file (dB where customary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawNetwork {
    pub lambda_b: f64,
    pub lambda_v: f64,
    pub lambda_r: f64,
    pub h_b: f64,
    pub h_s: f64,
    pub h_v: f64,
    pub n0: u32,
    pub n_elements: u32,
    pub u_m: f64,
    pub u_s: f64,
    pub v_m: f64,
    pub v_s: f64,
    pub p_t_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub f_c_hz: f64,
    pub alpha: f64,
    pub theta_s: f64,
}

impl Default for RawNetwork {
    fn default() -> Self {
        NetworkParams::default().to_raw()
    }
}

impl NetworkParams {
    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            lambda_b: self.lambda_b,
            lambda_v: self.lambda_v,
            lambda_r: self.lambda_r,
            h_b: self.h_b,
            h_s: self.h_s,
            h_v: self.h_v,
            n0: self.n0,
            n_elements: self.n_elements,
            u_m: self.u_m,
            u_s: self.u_s,
            v_m: self.v_m,
            v_s: self.v_s,
            p_t_dbm: watts_to_dbm(self.p_t),
            noise_psd_dbm_hz: watts_to_dbm(self.noise_psd),
            bandwidth_hz: self.bandwidth,
            noise_figure_db: linear_to_db(self.noise_figure),
            f_c_hz: self.f_c,
            alpha: self.alpha,
            theta_s: self.theta_s,
        }
    }
}

/// Convert config-file units to linear SI and validate.
pub fn normalize(raw: &RawNetwork) -> Result<NetworkParams, ModelError> {
    for (name, v) in [
        ("p_t_dbm", raw.p_t_dbm),
        ("noise_psd_dbm_hz", raw.noise_psd_dbm_hz),
        ("noise_figure_db", raw.noise_figure_db),
    ] {
        if !v.is_finite() {
            return Err(invalid(name, v, "must be finite"));
        }
    }
    let p = NetworkParams {
        lambda_b: raw.lambda_b,
        lambda_v: raw.lambda_v,
        lambda_r: raw.lambda_r,
        h_b: raw.h_b,
        h_s: raw.h_s,
        h_v: raw.h_v,
        n0: raw.n0,
        n_elements: raw.n_elements,
        u_m: raw.u_m,
        u_s: raw.u_s,
        v_m: raw.v_m,
        v_s: raw.v_s,
        p_t: dbm_to_watts(raw.p_t_dbm),
        noise_psd: dbm_to_watts(raw.noise_psd_dbm_hz),
        bandwidth: raw.bandwidth_hz,
        noise_figure: db_to_linear(raw.noise_figure_db),
        f_c: raw.f_c_hz,
        alpha: raw.alpha,
        theta_s: raw.theta_s,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawDeployment {
    pub r_s: Option<f64>,
    pub f: Option<f64>,
    pub intersection: bool,
}

/// RIS distance used when the config names neither `r_s` nor `f`.
pub const DEFAULT_RS: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawQuadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub truncation_epsilon: f64,
    /// Loosen SINR nested integrals for sweeps.
    pub coarse: bool,
}

impl Default for RawQuadrature {
    fn default() -> Self {
        let s = IntegrationSpec::default();
        Self {
            rel_tol: s.rel_tol,
            abs_tol: s.abs_tol,
            max_depth: s.max_depth,
            truncation_epsilon: s.truncation_epsilon,
            coarse: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSimulation {
    pub trials: u64,
    /// Defaults to `60 / lambda_b`.
    pub window_half_length: Option<f64>,
    pub seed: u64,
    pub parallel_chunks: usize,
}

impl Default for RawSimulation {
    fn default() -> Self {
        Self {
            trials: 100_000,
            window_half_length: None,
            seed: 1,
            parallel_chunks: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    /// Gamma CCDF evaluated exactly.
    Exact,
    /// Alzer exponential-sum bound.
    Alzer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSweep {
    /// Threshold for sweeps over a geometric axis.
    pub gamma_db: f64,
    /// Thresholds for `simulate` and `compare`.
    pub gamma_grid_db: Vec<f64>,
    pub mode: TailMode,
}

impl Default for RawSweep {
    fn default() -> Self {
        Self {
            gamma_db: -60.0,
            gamma_grid_db: vec![-10.0, 0.0, 10.0, 20.0],
            mode: TailMode::Exact,
        }
    }
}

/// The whole config file, one TOML table per module.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub network: RawNetwork,
    pub deployment: RawDeployment,
    pub quadrature: RawQuadrature,
    pub simulation: RawSimulation,
    pub sweep: RawSweep,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Parse(e.message().to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: NetworkParams,
    pub deployment: Deployment,
    pub quadrature: IntegrationSpec,
    pub coarse: bool,
    pub sim: SimConfig,
    pub sweep: RawSweep,
}

impl Config {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ModelError> {
        let params = normalize(&raw.network)?;
        let placement = match (raw.deployment.r_s, raw.deployment.f) {
            (Some(_), Some(_)) => {
                return Err(ModelError::InvalidDeployment(
                    "set exactly one of `r_s` and `f`".into(),
                ))
            }
            (Some(r_s), None) => Placement::FixedDistance { r_s },
            (None, Some(f)) => Placement::CellFraction { f },
            (None, None) => Placement::FixedDistance { r_s: DEFAULT_RS },
        };
        let deployment = Deployment {
            placement,
            with_intersection_ris: raw.deployment.intersection,
        };
        deployment.validate()?;
        let quadrature = IntegrationSpec {
            rel_tol: raw.quadrature.rel_tol,
            abs_tol: raw.quadrature.abs_tol,
            max_depth: raw.quadrature.max_depth,
            truncation_epsilon: raw.quadrature.truncation_epsilon,
        };
        quadrature
            .validate()
            .map_err(|e| ModelError::Parse(e.to_string()))?;
        let window = raw
            .simulation
            .window_half_length
            .unwrap_or(60.0 / params.lambda_b);
        let sim = SimConfig {
            trials: raw.simulation.trials,
            window_half_length: window,
            seed: raw.simulation.seed,
            parallel_chunks: raw.simulation.parallel_chunks,
        };
        sim.validate(&params)?;
        if raw.sweep.gamma_grid_db.iter().any(|g| !g.is_finite()) || !raw.sweep.gamma_db.is_finite() {
            return Err(ModelError::Parse("gamma thresholds must be finite".into()));
        }
        Ok(Self {
            params,
            deployment,
            quadrature,
            coarse: raw.quadrature.coarse,
            sim,
            sweep: raw.sweep.clone(),
        })
    }
}
