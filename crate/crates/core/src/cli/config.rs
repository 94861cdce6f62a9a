use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::reference::FvOracle;
use crate::solver::{Flux, SchemeConfig};
use crate::viscosity::{MultiplierFamily, ViscosityKind, ViscositySpec};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FluxChoice {
    #[default]
    Burgers,
    /// `f ≡ 0`, leaving only the viscosity.
    Zero,
}

/// Everything a run depends on. Unset fields take the Burgers experiment
/// defaults; `eps_coeff` defaults per scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: ViscosityKind,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub alpha: f64,
    pub eps_coeff: Option<f64>,
    pub eps_exp: f64,
    pub m_coeff: f64,
    pub m_exp: f64,
    pub t_final: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub flux: FluxChoice,
    pub sweep_ns: Option<Vec<usize>>,
    pub output_dir: PathBuf,
    pub grid_l: f64,
    pub grid_dx: f64,
    pub oracle_cells: usize,
    /// Overrides the quadrature size used by `basis-check`.
    pub check_quad_nodes: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: ViscosityKind::SturmLiouville,
            n: 40,
            alpha: std::f64::consts::SQRT_2,
            eps_coeff: None,
            eps_exp: -0.33,
            m_coeff: 5.0,
            m_exp: 0.16,
            t_final: 1.5,
            rel_tol: 1e-3,
            abs_tol: 1e-6,
            flux: FluxChoice::Burgers,
            sweep_ns: None,
            output_dir: PathBuf::from("output"),
            grid_l: 10.0,
            grid_dx: 0.01,
            oracle_cells: 20001,
            check_quad_nodes: None,
        }
    }
}

pub fn default_eps_coeff(kind: ViscosityKind) -> f64 {
    match kind {
        ViscosityKind::None => 0.0,
        ViscosityKind::HighModeQ => 0.5,
        ViscosityKind::SturmLiouville => 0.05,
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> std::result::Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn eps_coeff(&self) -> f64 {
        self.eps_coeff
            .unwrap_or_else(|| default_eps_coeff(self.scheme))
    }

    /// Copy with every defaulted-by-scheme field written out.
    pub fn resolved(&self) -> Self {
        Self {
            eps_coeff: Some(self.eps_coeff()),
            ..self.clone()
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn viscosity(&self) -> ViscositySpec {
        ViscositySpec {
            kind: self.scheme,
            eps_coeff: self.eps_coeff(),
            eps_exp: self.eps_exp,
            m_coeff: self.m_coeff,
            m_exp: self.m_exp,
            multiplier_family: MultiplierFamily::PaperFraction,
        }
    }

    pub fn basis(&self) -> Result<BasisSpec> {
        BasisSpec::new(self.alpha, self.n)
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let mut cfg = SchemeConfig::burgers(self.basis()?, self.viscosity());
        cfg.flux = match self.flux {
            FluxChoice::Burgers => Flux::Burgers,
            FluxChoice::Zero => Flux::zero(),
        };
        cfg.t_final = self.t_final;
        cfg.rel_tol = self.rel_tol;
        cfg.abs_tol = self.abs_tol;
        Ok(cfg)
    }

    pub fn oracle(&self) -> FvOracle {
        FvOracle {
            half_width: self.grid_l,
            cell_count: self.oracle_cells,
            ..FvOracle::default()
        }
    }

    /// Checks every field; nothing is computed before this passes.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, v) in [
            ("eps_exp", self.eps_exp),
            ("m_coeff", self.m_coeff),
            ("m_exp", self.m_exp),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.grid_l.is_finite() && self.grid_l > 0.0) {
            return bad(format!("grid_l must be positive, got {}", self.grid_l));
        }
        if !(self.grid_dx.is_finite() && self.grid_dx > 0.0 && self.grid_dx <= self.grid_l) {
            return bad(format!(
                "grid_dx must lie in (0, grid_l], got {}",
                self.grid_dx
            ));
        }
        if let Some(ns) = &self.sweep_ns {
            if ns.contains(&0) {
                return bad("sweep_ns entries must be positive".into());
            }
        }
        if self.check_quad_nodes == Some(0) {
            return bad("check_quad_nodes must be positive".into());
        }
        self.oracle().validate()?;
        self.scheme_config()?.validate()
    }
}
