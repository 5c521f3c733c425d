//! Run configuration: a sectioned `key = value` file.
//!
//! ```text
//! [germ]
//! polynomial = y^2 - x^3
//! variables = x, y
//!
//! [family]
//! deformation = y^2 - x^3 + t*x
//! ; seed = 7 instead of deformation gives a generic linear family
//! parameters = t
//! ade = A2
//!
//! [scales]
//! mode = auto
//!
//! [oracle]
//! resolution = 128
//!
//! [output]
//! report = cusp.json
//! ```

use std::path::Path;

use ini::Ini;
use serde::{Deserialize, Serialize};

use cubeoracle::Mode;
use morsefib::certfind::Tolerances;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermConfig {
    pub polynomial: String,
    pub variables: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Explicit { deformation: String, parameters: Vec<String> },
    Generic { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    #[serde(flatten)]
    pub kind: FamilyKind,
    pub ade: Option<String>,
    pub mu: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalesConfig {
    /// `true` for automatic selection of the unset values.
    pub auto: bool,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    /// Rational parameter values, one per parameter.
    pub t: Option<Vec<String>>,
    pub check_sphere: bool,
    pub stability_samples: usize,
}

impl Default for ScalesConfig {
    fn default() -> Self {
        ScalesConfig {
            auto: true,
            delta: None,
            eta: None,
            t: None,
            check_sphere: false,
            stability_samples: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub enabled: bool,
    pub resolution: Option<usize>,
    pub homology_resolution: Option<usize>,
    pub mode: String,
    pub window: Option<f64>,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            enabled: true,
            resolution: None,
            homology_resolution: None,
            mode: "center".into(),
            window: None,
        }
    }
}

impl OracleSettings {
    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode.parse().map_err(|e: String| CliError::config(e))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub report: Option<String>,
    pub svg: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub germ: GermConfig,
    pub family: FamilyConfig,
    pub scales: ScalesConfig,
    pub oracle: OracleSettings,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("germ", &["polynomial", "variables"]),
    ("family", &["deformation", "parameters", "seed", "ade", "mu"]),
    (
        "scales",
        &["mode", "delta", "eta", "t", "check_sphere", "stability_samples"],
    ),
    (
        "oracle",
        &["enabled", "resolution", "homology_resolution", "mode", "window"],
    ),
    (
        "tolerances",
        &[
            "exclusion_floor",
            "newton_width",
            "value_sep",
            "max_depth",
            "retry_budget",
            "max_boxes",
            "refine_budget",
        ],
    ),
    ("output", &["report", "svg"]),
];

struct Section<'a> {
    name: &'static str,
    props: Option<&'a ini::Properties>,
}

impl Section<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.props
            .and_then(|p| p.get(key))
            .map(str::trim)
            .filter(|v| !v.is_empty())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| {
                    CliError::config(format!("[{}] {key} = {v:?}: {e}", self.name))
                })
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, CliError> {
        self.get(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(CliError::config(format!(
                    "[{}] {key} = {v:?}: expected true or false",
                    self.name
                ))),
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if props.iter().next().is_some() {
                    return Err(CliError::config("keys before the first [section]"));
                }
                continue;
            };
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
                return Err(CliError::config(format!("unknown section [{name}]")));
            };
            for (k, _) in props.iter() {
                if !keys.contains(&k) {
                    return Err(CliError::config(format!("unknown key {k:?} in [{name}]")));
                }
            }
        }
        let section = |name: &'static str| Section {
            name,
            props: ini.section(Some(name)),
        };

        let g = section("germ");
        let polynomial = g
            .get("polynomial")
            .ok_or_else(|| CliError::config("[germ] polynomial is required"))?
            .to_string();
        let variables = g
            .list("variables")
            .ok_or_else(|| CliError::config("[germ] variables is required"))?;

        let f = section("family");
        let deformation = f.get("deformation").map(str::to_string);
        let seed = f.parse::<u64>("seed")?;
        let kind = match (deformation, seed) {
            (Some(d), None) => FamilyKind::Explicit {
                deformation: d,
                parameters: f.list("parameters").unwrap_or_else(|| vec!["t".into()]),
            },
            (None, Some(seed)) => FamilyKind::Generic { seed },
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "[family] give either deformation (explicit family) or seed (generic family), not both",
                ))
            }
            (None, None) => {
                return Err(CliError::config(
                    "[family] needs deformation = F(x, t) or seed = <integer> for a generic linear family",
                ))
            }
        };
        if matches!(kind, FamilyKind::Generic { .. }) && f.get("parameters").is_some() {
            return Err(CliError::config("[family] parameters only applies to explicit families"));
        }
        let family = FamilyConfig {
            kind,
            ade: f.get("ade").map(str::to_string),
            mu: f.parse("mu")?,
        };

        let s = section("scales");
        let auto = match s.get("mode").map(str::to_ascii_lowercase).as_deref() {
            None | Some("auto") => true,
            Some("manual") => false,
            Some(other) => {
                return Err(CliError::config(format!(
                    "[scales] mode = {other:?}: expected auto or manual"
                )))
            }
        };
        let scales = ScalesConfig {
            auto,
            delta: s.parse("delta")?,
            eta: s.parse("eta")?,
            t: s.list("t"),
            check_sphere: s.flag("check_sphere")?.unwrap_or(false),
            stability_samples: s.parse("stability_samples")?.unwrap_or(5),
        };
        if !scales.auto && (scales.delta.is_none() || scales.eta.is_none() || scales.t.is_none()) {
            return Err(CliError::config("[scales] mode = manual requires delta, eta and t"));
        }

        let o = section("oracle");
        let oracle = OracleSettings {
            enabled: o.flag("enabled")?.unwrap_or(true),
            resolution: o.parse("resolution")?,
            homology_resolution: o.parse("homology_resolution")?,
            mode: o.get("mode").unwrap_or("center").to_string(),
            window: o.parse("window")?,
        };
        oracle.mode()?;

        let t = section("tolerances");
        let d = Tolerances::default();
        let tolerances = Tolerances {
            exclusion_floor: t.parse("exclusion_floor")?.unwrap_or(d.exclusion_floor),
            newton_width: t.parse("newton_width")?.unwrap_or(d.newton_width),
            value_sep: t.parse("value_sep")?.unwrap_or(d.value_sep),
            max_depth: t.parse("max_depth")?.unwrap_or(d.max_depth),
            retry_budget: t.parse("retry_budget")?.unwrap_or(d.retry_budget),
            max_boxes: t.parse("max_boxes")?.unwrap_or(d.max_boxes),
            refine_budget: t.parse("refine_budget")?.unwrap_or(d.refine_budget),
        };

        let out = section("output");
        let output = OutputConfig {
            report: out.get("report").map(str::to_string),
            svg: out.get("svg").map(str::to_string),
        };
        Ok(RunConfig {
            germ: GermConfig {
                polynomial,
                variables,
            },
            family,
            scales,
            oracle,
            tolerances,
            output,
        })
    }
}
