//! Scenario files for the command-line front end.
//!
//! A scenario is a JSON object. Spec strings use the state and polynomial
//! grammars; a sweep substitutes its parameter value for every `{name}`
//! placeholder before the row is evaluated.
//!
//! ```json
//! {
//!   "kind": "dynamics",
//!   "state": "squeezed:0.88,0",
//!   "drive": "matched",
//!   "grid": { "start": 0, "stop": 18.84955592153876, "count": 256 },
//!   "dim": 128
//! }
//! ```

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::ion::{match_drive, SidebandDrive};
use crate::states::{SqueezeParams, StateSpec};
use crate::witness::ObservableSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Witness,
    CfScan,
    Solve,
    Dynamics,
    Sweep,
    Selftest,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Witness => "witness",
            Kind::CfScan => "cf-scan",
            Kind::Solve => "solve",
            Kind::Dynamics => "dynamics",
            Kind::Sweep => "sweep",
            Kind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    #[default]
    Kernel,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    /// `|Ω|t ∈ [0, 6π]`, 256 points.
    pub const DYNAMICS: Grid = Grid { start: 0.0, stop: 6.0 * PI, count: 256 };
    /// `k ∈ [−4, 4]`, 32 points.
    pub const CHARACTERISTIC: Grid = Grid { start: -4.0, stop: 4.0, count: 32 };

    pub fn points(&self) -> Vec<f64> {
        crate::ion::linspace(self.start, self.stop, self.count)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start <= self.stop) {
            return Err(Error::Config(format!("{what}: need finite start <= stop")));
        }
        if self.count < 2 {
            return Err(Error::Config(format!("{what}: count must be at least 2")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Kind evaluated at each grid point: witness, solve or dynamics.
    #[serde(default = "default_sweep_of")]
    pub of: Kind,
}

fn default_sweep_of() -> Kind {
    Kind::Witness
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        crate::ion::linspace(self.start, self.stop, self.steps)
    }

    pub fn placeholder(&self) -> String {
        format!("{{{}}}", self.param)
    }
}

fn default_dim() -> usize {
    FockSpace::DEFAULT_DIM
}

fn default_tail_tol() -> f64 {
    FockSpace::DEFAULT_TAIL_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<SolveMethod>,
    /// Quadrature phase for `cf-scan`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_shift: Option<bool>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Scenario {
    pub fn new(kind: Kind) -> Self {
        Scenario {
            kind,
            state: None,
            observable: None,
            drive: None,
            grid: None,
            sweep: None,
            method: None,
            phi: None,
            phi_tilde: None,
            mean_shift: None,
            dim: default_dim(),
            tail_tol: default_tail_tol(),
            out: None,
        }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Pretty JSON with every defaulted field written out; parses back to `self`.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::with_tail_tol(self.dim, self.tail_tol)
    }

    pub fn grid_or_default(&self) -> Grid {
        self.grid.unwrap_or(match self.effective_kind() {
            Kind::CfScan => Grid::CHARACTERISTIC,
            _ => Grid::DYNAMICS,
        })
    }

    /// The kind evaluated per row: the sweep target for sweeps, otherwise `kind`.
    pub fn effective_kind(&self) -> Kind {
        match (&self.kind, &self.sweep) {
            (Kind::Sweep, Some(sw)) => sw.of,
            (k, _) => *k,
        }
    }

    fn require<'a>(&self, field: &'a Option<String>, name: &str) -> Result<&'a str> {
        field
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{}` scenario requires `{name}`", self.kind.name())))
    }

    pub fn state_spec(&self) -> Result<StateSpec> {
        StateSpec::parse(self.require(&self.state, "state")?)
    }

    pub fn observable_spec(&self) -> Result<ObservableSpec> {
        ObservableSpec::parse(self.require(&self.observable, "observable")?)
    }

    pub fn drive_spec(&self) -> Result<DriveSpec> {
        DriveSpec::parse(self.require(&self.drive, "drive")?)
    }

    /// Copy with `{param}` replaced by `value` in every spec string.
    pub fn at(&self, param: &str, value: f64) -> Scenario {
        let key = format!("{{{param}}}");
        let text = format!("{value:?}");
        let sub = |s: &Option<String>| s.as_ref().map(|x| x.replace(&key, &text));
        Scenario {
            state: sub(&self.state),
            observable: sub(&self.observable),
            drive: sub(&self.drive),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.space()?;
        if let Some(g) = &self.grid {
            g.validate("grid")?;
        }
        if self.kind == Kind::Sweep {
            let sw = self.sweep.as_ref().ok_or_else(|| Error::Config("`sweep` scenario requires `sweep`".into()))?;
            if sw.param.is_empty() || !sw.param.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Config(format!("sweep parameter `{}` must be alphanumeric", sw.param)));
            }
            Grid { start: sw.start, stop: sw.stop, count: sw.steps }.validate("sweep")?;
            if matches!(sw.of, Kind::Sweep | Kind::Selftest | Kind::CfScan) {
                return Err(Error::Config(format!("cannot sweep `{}`", sw.of.name())));
            }
            let key = sw.placeholder();
            let used = [&self.state, &self.observable, &self.drive]
                .iter()
                .any(|s| s.as_deref().is_some_and(|x| x.contains(&key)));
            if !used {
                return Err(Error::Config(format!("sweep placeholder `{key}` does not appear in any spec")));
            }
            for v in [sw.start, sw.stop] {
                self.at(&sw.param, v).validate_row(sw.of)?;
            }
            return Ok(());
        }
        if self.sweep.is_some() {
            return Err(Error::Config(format!("`sweep` is only valid for sweep scenarios, not `{}`", self.kind.name())));
        }
        self.validate_row(self.kind)
    }

    fn validate_row(&self, kind: Kind) -> Result<()> {
        match kind {
            Kind::Witness => {
                self.state_spec()?;
                self.observable_spec()?;
            }
            Kind::CfScan => {
                self.state_spec()?;
                for x in [self.phi, self.phi_tilde].into_iter().flatten() {
                    if !x.is_finite() {
                        return Err(Error::Config("cf-scan phases must be finite".into()));
                    }
                }
            }
            Kind::Solve => {
                self.observable_spec()?;
            }
            Kind::Dynamics => {
                let state = self.state_spec()?;
                self.drive_spec()?.resolve(&state)?;
                if self.grid_or_default().start < 0.0 {
                    return Err(Error::Config("dynamics grid must start at |Omega|t >= 0".into()));
                }
            }
            Kind::Sweep | Kind::Selftest => {}
        }
        Ok(())
    }
}

/// `sidebands:|Ω_r|,|Ω_b|,φ_r,Δφ`, `matched` (to the scenario's squeezed state)
/// or `matched:r,theta[,scale]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec {
    Sidebands(SidebandDrive),
    MatchedToState,
    Matched { r: f64, theta: f64, scale: f64 },
}

impl DriveSpec {
    pub fn parse(src: &str) -> Result<DriveSpec> {
        let s = src.trim();
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a)),
            None => (s, None),
        };
        let nums = |a: &str| -> Result<Vec<f64>> {
            a.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{}` in drive `{s}`", t.trim()))))
                .collect()
        };
        match (head, args) {
            ("sidebands", Some(a)) => match nums(a)?.as_slice() {
                [r, b, p, d] => Ok(DriveSpec::Sidebands(SidebandDrive::new(*r, *b, *p, *d)?)),
                _ => Err(Error::Config(format!("drive `{s}` expects sidebands:r,b,phi_r,dphi"))),
            },
            ("matched", None) => Ok(DriveSpec::MatchedToState),
            ("matched", Some(a)) => {
                let v = nums(a)?;
                let (r, theta, scale) = match v.as_slice() {
                    [r, t] => (*r, *t, 1.0),
                    [r, t, sc] => (*r, *t, *sc),
                    _ => return Err(Error::Config(format!("drive `{s}` expects matched:r,theta[,scale]"))),
                };
                SqueezeParams::from_r_theta(r, theta)?;
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Config(format!("drive `{s}`: scale must be positive")));
                }
                Ok(DriveSpec::Matched { r, theta, scale })
            }
            _ => Err(Error::Config(format!("unknown drive `{s}`"))),
        }
    }

    pub fn resolve(&self, state: &StateSpec) -> Result<SidebandDrive> {
        match *self {
            DriveSpec::Sidebands(d) => Ok(d),
            DriveSpec::Matched { r, theta, scale } => match_drive(SqueezeParams::from_r_theta(r, theta)?, scale),
            DriveSpec::MatchedToState => {
                let p = state
                    .squeeze_params()
                    .ok_or_else(|| Error::Config(format!("drive `matched` needs a squeezed state, got `{state}`")))?;
                match_drive(p, 1.0)
            }
        }
    }
}

impl fmt::Display for DriveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveSpec::Sidebands(d) => write!(
                f,
                "sidebands:{:?},{:?},{:?},{:?}",
                d.omega_r_mag(),
                d.omega_b_mag(),
                d.phi_r(),
                d.delta_phi()
            ),
            DriveSpec::MatchedToState => write!(f, "matched"),
            DriveSpec::Matched { r, theta, scale } => write!(f, "matched:{r:?},{theta:?},{scale:?}"),
        }
    }
}
