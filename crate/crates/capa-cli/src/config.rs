//! Flat key = value configuration with `[section]` headers.
//!
//! The full grammar is documented in `docs/FORMATS.md`. Parsing is strict:
//! unknown sections or keys are errors, and every diagnostic carries the
//! line number and field name.

use crate::error::CmdError;
use capa_core::quadrature::QuadratureSpec;
use capa_core::verify::VerifyConfig;
use capa_core::{ApertureRegion, LinkBudget, UserSource, Wave};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct UserConfig {
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub gamma_db: f64,
}

impl UserConfig {
    pub fn source(&self) -> Result<UserSource, CmdError> {
        UserSource::new(self.r, self.phi, self.theta).map_err(CmdError::usage)
    }

    pub fn budget(&self) -> Result<LinkBudget, CmdError> {
        LinkBudget::from_db(self.gamma_db).map_err(CmdError::usage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApertureKind {
    Planar,
    Spd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApertureConfig {
    pub kind: ApertureKind,
    pub lx: Option<f64>,
    pub lz: Option<f64>,
    pub mx: Option<usize>,
    pub mz: Option<usize>,
    pub spacing: Option<f64>,
    pub element_side: Option<f64>,
}

impl ApertureConfig {
    /// Build the configured region. For grids without an explicit element
    /// side the spacing is used (fully occupied lattice).
    pub fn region(&self) -> Result<ApertureRegion, CmdError> {
        match self.kind {
            ApertureKind::Planar => {
                let lx = self.require(self.lx, "aperture.lx")?;
                let lz = self.require(self.lz, "aperture.lz")?;
                ApertureRegion::planar_rect(lx, lz).map_err(CmdError::usage)
            }
            ApertureKind::Spd => {
                let mx = self.require(self.mx, "aperture.mx")?;
                let mz = self.require(self.mz, "aperture.mz")?;
                let d = self.require(self.spacing, "aperture.spacing")?;
                let side = self.element_side.unwrap_or(d);
                ApertureRegion::spd_grid(mx, mz, d, side).map_err(CmdError::usage)
            }
        }
    }

    fn require<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T, CmdError> {
        v.ok_or_else(|| CmdError::usage(format!("missing required field {name}")))
    }
}

/// A one-dimensional sweep grid: log- or linearly-spaced, or an explicit
/// list. Resolved grids must be nonempty and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    Log { min: f64, max: f64, points: usize },
    Linear { min: f64, max: f64, points: usize },
    List(Vec<f64>),
}

impl SweepGrid {
    pub fn resolve(&self) -> Result<Vec<f64>, CmdError> {
        let values = match self {
            SweepGrid::Log { min, max, points } => {
                if *min <= 0.0 {
                    return Err(CmdError::usage("log sweep requires min > 0"));
                }
                (0..*points)
                    .map(|i| {
                        let t = if *points > 1 {
                            i as f64 / (*points as f64 - 1.0)
                        } else {
                            0.0
                        };
                        min * (max / min).powf(t)
                    })
                    .collect()
            }
            SweepGrid::Linear { min, max, points } => (0..*points)
                .map(|i| {
                    let t = if *points > 1 {
                        i as f64 / (*points as f64 - 1.0)
                    } else {
                        0.0
                    };
                    min + t * (max - min)
                })
                .collect(),
            SweepGrid::List(v) => v.clone(),
        };
        if values.is_empty() {
            return Err(CmdError::usage("sweep grid is empty"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CmdError::usage("sweep grid must be strictly increasing"));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lambda: f64,
    pub users: Vec<UserConfig>,
    pub aperture: ApertureConfig,
    pub quadrature: QuadratureSpec,
    pub sweep: Option<SweepGrid>,
    pub occupancy: Option<SweepGrid>,
    pub segment_points: usize,
    pub oracle: VerifyConfig,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn wave(&self) -> Result<Wave, CmdError> {
        Wave::new(self.lambda).map_err(CmdError::usage)
    }

    pub fn two_users(&self) -> Result<(&UserConfig, &UserConfig), CmdError> {
        if self.users.len() != 2 {
            return Err(CmdError::usage(format!(
                "this command requires exactly two users, config has {}",
                self.users.len()
            )));
        }
        Ok((&self.users[0], &self.users[1]))
    }

    /// Built-in reference setup: half-wavelength-spaced lattice at lambda = 0.0107 m,
    /// users at 10 m / 20 m on the same bearing with 30 / 40 dB transmit SNR.
    pub fn reference_defaults() -> Self {
        let lambda = 0.0107;
        Self {
            lambda,
            users: vec![
                UserConfig {
                    r: 10.0,
                    phi: PI / 3.0,
                    theta: PI / 6.0,
                    gamma_db: 30.0,
                },
                UserConfig {
                    r: 20.0,
                    phi: PI / 3.0,
                    theta: PI / 6.0,
                    gamma_db: 40.0,
                },
            ],
            aperture: ApertureConfig {
                kind: ApertureKind::Planar,
                lx: Some(0.5),
                lz: Some(0.5),
                mx: None,
                mz: None,
                spacing: Some(lambda / 2.0),
                element_side: Some((lambda * lambda / (4.0 * PI)).sqrt()),
            },
            quadrature: QuadratureSpec::default(),
            sweep: Some(SweepGrid::Log {
                min: 0.05,
                max: 2.0,
                points: 20,
            }),
            occupancy: None,
            segment_points: 11,
            oracle: VerifyConfig::default(),
            output: None,
        }
    }
}

struct Parser<'a> {
    // section -> key -> (line, value)
    table: BTreeMap<String, BTreeMap<String, (usize, &'a str)>>,
}

impl<'a> Parser<'a> {
    fn parse(text: &'a str) -> Result<Self, CmdError> {
        let mut table: BTreeMap<String, BTreeMap<String, (usize, &'a str)>> = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    CmdError::usage(format!("line {line_no}: malformed section header {line:?}"))
                })?;
                section = name.trim().to_string();
                table.entry(section.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CmdError::usage(format!("line {line_no}: expected key = value, got {line:?}"))
            })?;
            if section.is_empty() {
                return Err(CmdError::usage(format!(
                    "line {line_no}: key outside of any [section]"
                )));
            }
            let key = key.trim().to_string();
            let entry = table.get_mut(&section).expect("section inserted above");
            if entry.insert(key.clone(), (line_no, value.trim())).is_some() {
                return Err(CmdError::usage(format!(
                    "line {line_no}: duplicate key {key:?} in section [{section}]"
                )));
            }
        }
        Ok(Self { table })
    }

    fn known_sections(&self) -> Result<(), CmdError> {
        const KNOWN: [&str; 10] = [
            "wave",
            "user.1",
            "user.2",
            "aperture",
            "quadrature",
            "sweep",
            "occupancy",
            "region",
            "oracle",
            "output",
        ];
        for s in self.table.keys() {
            if !KNOWN.contains(&s.as_str()) {
                return Err(CmdError::usage(format!("unknown section [{s}]")));
            }
        }
        Ok(())
    }

    fn section(&self, name: &str) -> Option<&BTreeMap<String, (usize, &'a str)>> {
        self.table.get(name)
    }

    fn check_keys(
        &self,
        name: &str,
        allowed: &[&str],
    ) -> Result<(), CmdError> {
        if let Some(sec) = self.section(name) {
            for (key, (line, _)) in sec {
                if !allowed.contains(&key.as_str()) {
                    return Err(CmdError::usage(format!(
                        "line {line}: unknown key {key:?} in section [{name}]"
                    )));
                }
            }
        }
        Ok(())
    }

    fn get<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CmdError> {
        match self.section(section).and_then(|s| s.get(key)) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|_| {
                CmdError::usage(format!(
                    "line {line}: field {section}.{key} has invalid value {value:?}"
                ))
            }),
        }
    }

    fn get_or<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, CmdError> {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    fn require<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<T, CmdError> {
        self.get(section, key)?.ok_or_else(|| {
            CmdError::usage(format!("missing required field {section}.{key}"))
        })
    }

    fn grid(&self, section: &str) -> Result<Option<SweepGrid>, CmdError> {
        if self.section(section).is_none() {
            return Ok(None);
        }
        let kind: String = self.get_or(section, "kind", "log".to_string())?;
        let grid = match kind.as_str() {
            "list" => {
                let (line, raw) = self
                    .section(section)
                    .and_then(|s| s.get("values"))
                    .ok_or_else(|| {
                        CmdError::usage(format!("missing required field {section}.values"))
                    })?;
                let values = raw
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<f64>().map_err(|_| {
                            CmdError::usage(format!(
                                "line {line}: field {section}.values has invalid entry {v:?}"
                            ))
                        })
                    })
                    .collect::<Result<Vec<f64>, CmdError>>()?;
                SweepGrid::List(values)
            }
            "log" => SweepGrid::Log {
                min: self.require(section, "min")?,
                max: self.require(section, "max")?,
                points: self.require(section, "points")?,
            },
            "linear" => SweepGrid::Linear {
                min: self.require(section, "min")?,
                max: self.require(section, "max")?,
                points: self.require(section, "points")?,
            },
            other => {
                return Err(CmdError::usage(format!(
                    "field {section}.kind must be log, linear, or list, got {other:?}"
                )))
            }
        };
        Ok(Some(grid))
    }
}

/// Parse a configuration file's text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CmdError> {
    let p = Parser::parse(text)?;
    p.known_sections()?;
    p.check_keys("wave", &["lambda"])?;
    p.check_keys("user.1", &["r", "phi", "theta", "gamma_db"])?;
    p.check_keys("user.2", &["r", "phi", "theta", "gamma_db"])?;
    p.check_keys(
        "aperture",
        &["kind", "lx", "lz", "mx", "mz", "spacing", "element_side"],
    )?;
    p.check_keys("quadrature", &["panel_order", "rel_tol", "max_refinements"])?;
    p.check_keys("sweep", &["kind", "min", "max", "points", "values"])?;
    p.check_keys("occupancy", &["kind", "min", "max", "points", "values"])?;
    p.check_keys("region", &["segment_points"])?;
    p.check_keys("oracle", &["grid", "trials", "seed", "lambda_scale"])?;
    p.check_keys("output", &["path"])?;

    let lambda: f64 = p.require("wave", "lambda")?;

    let mut users = Vec::new();
    for name in ["user.1", "user.2"] {
        if p.section(name).is_some() {
            users.push(UserConfig {
                r: p.require(name, "r")?,
                phi: p.require(name, "phi")?,
                theta: p.require(name, "theta")?,
                gamma_db: p.require(name, "gamma_db")?,
            });
        }
    }
    if users.is_empty() {
        return Err(CmdError::usage("config defines no [user.1] section"));
    }
    if p.section("user.2").is_some() && p.section("user.1").is_none() {
        return Err(CmdError::usage("[user.2] present without [user.1]"));
    }

    let kind = match p
        .get_or("aperture", "kind", "planar".to_string())?
        .as_str()
    {
        "planar" => ApertureKind::Planar,
        "spd" => ApertureKind::Spd,
        other => {
            return Err(CmdError::usage(format!(
                "field aperture.kind must be planar or spd, got {other:?}"
            )))
        }
    };
    let aperture = ApertureConfig {
        kind,
        lx: p.get("aperture", "lx")?,
        lz: p.get("aperture", "lz")?,
        mx: p.get("aperture", "mx")?,
        mz: p.get("aperture", "mz")?,
        spacing: p.get("aperture", "spacing")?,
        element_side: p.get("aperture", "element_side")?,
    };

    let dflt = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        panel_order: p.get_or("quadrature", "panel_order", dflt.panel_order)?,
        rel_tol: p.get_or("quadrature", "rel_tol", dflt.rel_tol)?,
        max_refinements: p.get_or("quadrature", "max_refinements", dflt.max_refinements)?,
    };

    let odflt = VerifyConfig::default();
    let oracle = VerifyConfig {
        grid: p.get_or("oracle", "grid", odflt.grid)?,
        trials: p.get_or("oracle", "trials", odflt.trials)?,
        seed: p.get_or("oracle", "seed", odflt.seed)?,
        lambda_scale: p.get_or("oracle", "lambda_scale", odflt.lambda_scale)?,
    };

    Ok(ExperimentConfig {
        lambda,
        users,
        aperture,
        quadrature,
        sweep: p.grid("sweep")?,
        occupancy: p.grid("occupancy")?,
        segment_points: p.get_or("region", "segment_points", 11)?,
        oracle,
        output: p.get::<String>("output", "path")?.map(PathBuf::from),
    })
}
