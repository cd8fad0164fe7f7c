//! Sweep configuration files.
//!
//! Flat `key = value` lines, `#` comments, and optional `[axis1]` / `[axis2]`
//! sections:
//!
//! ```text
//! scheme = I
//! omega1 = 6
//! omega2 = 6
//! outputs = purity, gamma_g
//! output = out/sweep.csv
//!
//! [axis1]
//! param = delta1
//! start = -3
//! end = 3
//! samples = 601
//! ```
//!
//! Unknown keys, repeated keys and out-of-range values are rejected with the
//! offending line number.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gpdiag_core::cascade::{Param, Scheme, SystemParams, DEFAULT_GAMMA2};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {key} = {value}: {message}")]
    Range {
        line: usize,
        key: String,
        value: String,
        message: String,
    },
    #[error("missing {0}")]
    Missing(String),
}

/// Decay preset of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeChoice {
    Preset(Scheme),
    /// Both rates given explicitly.
    Custom,
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeChoice::Preset(s) => write!(f, "{s}"),
            SchemeChoice::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "custom" => Ok(SchemeChoice::Custom),
            other => Scheme::from_str(other)
                .map(SchemeChoice::Preset)
                .map_err(|_| format!("unknown scheme '{other}' (expected I, II or custom)")),
        }
    }
}

/// Columns a sweep can emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Eigenvalues,
    Purity,
    Concurrence,
    GammaG,
    DGamma,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Eigenvalues,
        Output::Purity,
        Output::Concurrence,
        Output::GammaG,
        Output::DGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Eigenvalues => "eigenvalues",
            Output::Purity => "purity",
            Output::Concurrence => "concurrence",
            Output::GammaG => "gamma_g",
            Output::DGamma => "dgamma",
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s.trim())
            .ok_or_else(|| format!("unknown output '{}'", s.trim()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        gpdiag_core::gp::linspace(self.start, self.end, self.samples)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub scheme: SchemeChoice,
    /// Fixed parameters; the axes override their own entries per point.
    pub base: SystemParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    /// Sorted, without duplicates.
    pub outputs: Vec<Output>,
    pub output: PathBuf,
}

pub const MAX_SAMPLES: usize = 1_000_000;

const TOP_KEYS: [&str; 10] = [
    "scheme", "omega1", "omega2", "delta1", "delta2", "gamma2", "gamma3", "outputs", "output",
    "samples",
];
const AXIS_KEYS: [&str; 4] = ["param", "start", "end", "samples"];

#[derive(Default)]
struct Section {
    entries: Vec<(String, String, usize)>,
    line: usize,
}

impl Section {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }
}

fn range_err(line: usize, key: &str, value: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        line,
        key: key.into(),
        value: value.into(),
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(section: &Section, key: &str) -> Result<Option<(T, usize)>, ConfigError>
where
    T::Err: fmt::Display,
{
    match section.get(key) {
        None => Ok(None),
        Some((v, line)) => v
            .parse::<T>()
            .map(|x| Some((x, line)))
            .map_err(|e| range_err(line, key, v, e.to_string())),
    }
}

fn parse_number(section: &Section, key: &str) -> Result<Option<(f64, usize)>, ConfigError> {
    let parsed = parse_value::<f64>(section, key)?;
    if let Some((x, line)) = parsed {
        if !x.is_finite() {
            return Err(range_err(line, key, &x.to_string(), "must be finite"));
        }
    }
    Ok(parsed)
}

fn parse_axis(section: &Section, name: &str, default_samples: Option<usize>) -> Result<Axis, ConfigError> {
    let missing = |key: &str| ConfigError::Missing(format!("[{name}] {key}"));
    let (param, _) = parse_value::<Param>(section, "param")?.ok_or_else(|| missing("param"))?;
    let (start, _) = parse_number(section, "start")?.ok_or_else(|| missing("start"))?;
    let (end, end_line) = parse_number(section, "end")?.ok_or_else(|| missing("end"))?;
    if !(start < end) {
        return Err(range_err(end_line, "end", &end.to_string(), "must exceed start"));
    }
    let samples = match parse_value::<usize>(section, "samples")? {
        Some((n, line)) if !(2..=MAX_SAMPLES).contains(&n) => {
            return Err(range_err(line, "samples", &n.to_string(), format!("must be in [2, {MAX_SAMPLES}]")));
        }
        Some((n, _)) => n,
        None => default_samples.ok_or_else(|| missing("samples"))?,
    };
    if matches!(param, Param::Omega1 | Param::Omega2) && start < 0.0 {
        return Err(range_err(section.line, "start", &start.to_string(), "Rabi frequencies must be non-negative"));
    }
    Ok(Axis {
        param,
        start,
        end,
        samples,
    })
}

/// Parses a configuration file body.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    parse_config_with(text, None)
}

/// As [`parse_config`], with a sample count for axes that give none.
pub fn parse_config_with(text: &str, fallback_samples: Option<usize>) -> Result<SweepSpec, ConfigError> {
    let mut top = Section::default();
    let mut axes: [Option<Section>; 2] = [None, None];
    let mut current: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let slot = match name.trim() {
                "axis1" => 0,
                "axis2" => 1,
                other => {
                    return Err(ConfigError::Syntax {
                        line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            };
            if axes[slot].is_some() {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("section [{}] repeated", name.trim()),
                });
            }
            axes[slot] = Some(Section {
                entries: Vec::new(),
                line,
            });
            current = Some(slot);
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected key = value, got '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let (section, allowed): (&mut Section, &[&str]) = match current {
            None => (&mut top, &TOP_KEYS),
            Some(slot) => (axes[slot].as_mut().expect("section opened"), &AXIS_KEYS),
        };
        if !allowed.contains(&key) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("unknown key '{key}'"),
            });
        }
        if section.get(key).is_some() {
            return Err(ConfigError::Syntax {
                line,
                message: format!("key '{key}' repeated"),
            });
        }
        section.entries.push((key.to_string(), value.to_string(), line));
    }

    let (scheme, _) =
        parse_value::<SchemeChoice>(&top, "scheme")?.ok_or_else(|| ConfigError::Missing("scheme".into()))?;
    let gamma2 = parse_number(&top, "gamma2")?;
    let gamma3 = parse_number(&top, "gamma3")?;
    for (key, value) in [("gamma2", gamma2), ("gamma3", gamma3)] {
        if let Some((g, line)) = value {
            if g < 0.0 {
                return Err(range_err(line, key, &g.to_string(), "decay rates must be non-negative"));
            }
        }
    }
    let (g2, g3) = match scheme {
        SchemeChoice::Preset(s) => (
            gamma2.map_or(DEFAULT_GAMMA2, |g| g.0),
            gamma3.map_or(s.gamma3(), |g| g.0),
        ),
        SchemeChoice::Custom => (
            gamma2.ok_or_else(|| ConfigError::Missing("gamma2 (required for scheme = custom)".into()))?.0,
            gamma3.ok_or_else(|| ConfigError::Missing("gamma3 (required for scheme = custom)".into()))?.0,
        ),
    };

    let mut base = SystemParams::scheme(Scheme::I).with_decay(g2, g3);
    for param in Param::ALL {
        if let Some((x, line)) = parse_number(&top, param.name())? {
            if matches!(param, Param::Omega1 | Param::Omega2) && x < 0.0 {
                return Err(range_err(line, param.name(), &x.to_string(), "Rabi frequencies must be non-negative"));
            }
            base = base.with(param, x);
        }
    }

    let default_samples = match parse_value::<usize>(&top, "samples")? {
        Some((n, line)) if !(2..=MAX_SAMPLES).contains(&n) => {
            return Err(range_err(line, "samples", &n.to_string(), format!("must be in [2, {MAX_SAMPLES}]")));
        }
        other => other.map(|(n, _)| n).or(fallback_samples),
    };
    let [a1, a2] = axes;
    let axis1 = parse_axis(
        &a1.ok_or_else(|| ConfigError::Missing("[axis1] section".into()))?,
        "axis1",
        default_samples,
    )?;
    let axis2 = a2.map(|s| parse_axis(&s, "axis2", default_samples)).transpose()?;
    if let Some(a2) = &axis2 {
        if a2.param == axis1.param {
            return Err(ConfigError::Syntax {
                line: axis2_line(text),
                message: format!("both axes vary {}", a2.param),
            });
        }
    }

    let mut outputs: Vec<Output> = match top.get("outputs") {
        None => return Err(ConfigError::Missing("outputs".into())),
        Some((v, line)) => v
            .split(',')
            .map(|s| s.parse::<Output>().map_err(|e| range_err(line, "outputs", v, e)))
            .collect::<Result<_, _>>()?,
    };
    outputs.sort();
    outputs.dedup();

    let output = top
        .get("output")
        .map(|(v, _)| PathBuf::from(v))
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));

    Ok(SweepSpec {
        scheme,
        base,
        axis1,
        axis2,
        outputs,
        output,
    })
}

fn axis2_line(text: &str) -> usize {
    text.lines()
        .position(|l| l.trim() == "[axis2]")
        .map_or(0, |i| i + 1)
}

/// Canonical text form; `parse_config(&serialize(s)) == s`.
pub fn serialize(spec: &SweepSpec) -> String {
    let mut out = String::new();
    let p = &spec.base;
    out.push_str(&format!("scheme = {}\n", spec.scheme));
    for param in Param::ALL {
        out.push_str(&format!("{} = {:?}\n", param.name(), p.get(param)));
    }
    out.push_str(&format!("gamma2 = {:?}\n", p.gamma2));
    out.push_str(&format!("gamma3 = {:?}\n", p.gamma3));
    let names: Vec<&str> = spec.outputs.iter().map(|o| o.name()).collect();
    out.push_str(&format!("outputs = {}\n", names.join(", ")));
    out.push_str(&format!("output = {}\n", spec.output.display()));
    for (name, axis) in [("axis1", Some(&spec.axis1)), ("axis2", spec.axis2.as_ref())] {
        if let Some(a) = axis {
            out.push_str(&format!(
                "\n[{name}]\nparam = {}\nstart = {:?}\nend = {:?}\nsamples = {}\n",
                a.param, a.start, a.end, a.samples
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scheme = I\noutputs = purity\n[axis1]\nparam = delta1\nstart = -1\nend = 1\nsamples = 2\n";

    #[test]
    fn scheme_defaults() {
        let s = parse_config(MINIMAL).unwrap();
        assert_eq!(s.base.gamma2, 6.0);
        assert_eq!(s.base.gamma3, 1.0);
        assert_eq!(s.base.omega1, 0.0);
        let s2 = parse_config(&MINIMAL.replace("scheme = I", "scheme = II")).unwrap();
        assert_eq!(s2.base.gamma3, 0.0);
        assert!(s.axis2.is_none());
    }

    #[test]
    fn negative_rate_rejected() {
        let err = parse_config(&format!("gamma3 = -1\n{MINIMAL}")).unwrap_err();
        assert!(matches!(err, ConfigError::Range { line: 1, .. }), "{err}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Syntax {
                line: 8,
                message: "unknown key 'colour'".into()
            }
        );
        let err = parse_config("scheme = I\n\n  omega = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }));
        let err = parse_config("scheme = I\nnot a pair\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
    }

    #[test]
    fn unknown_parameter_and_output() {
        assert!(parse_config(&MINIMAL.replace("delta1", "delta3")).is_err());
        assert!(parse_config(&MINIMAL.replace("purity", "entropy")).is_err());
    }

    #[test]
    fn axis_checks() {
        assert!(parse_config(&MINIMAL.replace("samples = 2", "samples = 1")).is_err());
        assert!(parse_config(&MINIMAL.replace("end = 1", "end = -1")).is_err());
        let two = format!("{MINIMAL}[axis2]\nparam = delta1\nstart = 0\nend = 1\n");
        assert!(parse_config(&two).is_err());
    }

    #[test]
    fn custom_scheme_needs_both_rates() {
        let custom = MINIMAL.replace("scheme = I", "scheme = custom\ngamma2 = 5");
        assert!(matches!(parse_config(&custom), Err(ConfigError::Missing(_))));
        let ok = parse_config(&custom.replace("gamma2 = 5", "gamma2 = 5\ngamma3 = 0.5")).unwrap();
        assert_eq!((ok.base.gamma2, ok.base.gamma3), (5.0, 0.5));
    }

    #[test]
    fn round_trip() {
        let text = "# grid\nscheme = II\nomega2 = 6\noutputs = gamma_g, purity, purity\n\
                    samples = 11\n[axis2]\nparam = omega1\nstart = 0.5\nend = 6\n\
                    [axis1]\nparam = delta1\nstart = -0.1\nend = 0.3\nsamples = 7\n";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.outputs, vec![Output::Purity, Output::GammaG]);
        assert_eq!(spec.axis2.unwrap().samples, 11);
        let canon = serialize(&spec);
        let again = parse_config(&canon).unwrap();
        assert_eq!(again, spec);
        assert_eq!(serialize(&again), canon);
    }
}
