//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! # comment
//! grid.nx = 32          # grid.ny, grid.nz default to grid.nx
//! grid.lx = 1.0         # grid.ly, grid.lz default to grid.lx
//! physics.c = 1.0
//! time.dt = 0.001
//! time.steps = 1000
//! init.kind = plane-waves
//! init.modes = 1,0,0,1,1.0,0.0; 0,2,1,-1,0.5,0.25
//! output.dir = out
//! output.every = 10
//! check.energy_drift = 1e-10
//! ```
//!
//! Unknown keys, duplicate keys and malformed values are errors carrying the
//! line number.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid3;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "RSPHOTON_OUTPUT_DIR";

const KEYS: &[&str] = &[
    "grid.nx",
    "grid.ny",
    "grid.nz",
    "grid.lx",
    "grid.ly",
    "grid.lz",
    "physics.c",
    "time.dt",
    "time.steps",
    "init.kind",
    "init.modes",
    "init.center",
    "init.width",
    "init.k",
    "init.sigma",
    "init.amplitude",
    "init.path",
    "init.project_transverse",
    "output.dir",
    "output.every",
    "output.diagnostics",
    "output.snapshots",
    "output.csv",
    "check.energy_drift",
    "check.helicity_drift",
    "check.gauss",
    "check.maxwell",
];

/// One lattice plane wave of the initial condition. `sigma = 0` places the
/// amplitude on the longitudinal direction `k_hat`, which violates the Gauss
/// laws unless projected away.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpec {
    pub index: [i64; 3],
    pub sigma: i32,
    pub amplitude: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    PlaneWaves(Vec<ModeSpec>),
    /// `amplitude * e_sigma(k) * exp(i k.x) * exp(-|x - center|^2 / (2 width^2))`,
    /// with periodic minimum-image distance.
    Gaussian {
        center: [f64; 3],
        width: f64,
        k: [f64; 3],
        sigma: i32,
        amplitude: Complex64,
    },
    /// A snapshot file written by this crate.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Diagnostics and snapshots are emitted every `every` steps and at the
    /// final step.
    pub every: usize,
    pub diagnostics: String,
    pub snapshots: bool,
    pub csv: bool,
}

/// Thresholds the run must meet for a zero exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub energy_drift: f64,
    pub helicity_drift: f64,
    pub gauss: f64,
    pub maxwell: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub grid: Grid3,
    pub c: f64,
    pub dt: f64,
    pub steps: usize,
    pub init: InitialCondition,
    pub project_transverse: bool,
    pub output: OutputConfig,
    pub checks: CheckConfig,
}

struct Entry {
    line: usize,
    value: String,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown key `{key}`"),
                });
            }
            let value = value.trim().to_string();
            if value.is_empty() {
                return Err(Error::Config {
                    line,
                    msg: format!("missing value for `{key}`"),
                });
            }
            if let Some(prev) = entries.insert(key.clone(), Entry { line, value }) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key `{key}` (first set on line {})", prev.line),
                });
            }
        }
        Ok(Self { entries })
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|msg| Error::Config {
                line: e.line,
                msg: format!("`{key}`: {msg}"),
            }),
        }
    }

    fn require<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        self.get(key, parse)?.ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing required key `{key}`"),
        })
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |e| e.line)
    }

    fn invalid(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::Config {
            line: self.line(key),
            msg: format!("`{key}`: {}", msg.into()),
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_i32(s: &str) -> std::result::Result<i32, String> {
    s.parse::<i32>().map_err(|_| format!("`{s}` is not an integer"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

/// `re,im` or a single real number.
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

/// `jx,jy,jz,sigma,re,im` entries separated by `;`.
pub fn parse_modes(s: &str) -> std::result::Result<Vec<ModeSpec>, String> {
    let mut modes = Vec::new();
    for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let parts: Vec<&str> = item.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(format!("mode `{item}` must be jx,jy,jz,sigma,re,im"));
        }
        let mut index = [0i64; 3];
        for a in 0..3 {
            index[a] = parts[a]
                .parse()
                .map_err(|_| format!("`{}` is not an integer mode index", parts[a]))?;
        }
        let sigma = parse_i32(parts[3])?;
        if !(-1..=1).contains(&sigma) {
            return Err(format!("helicity must be -1, 0 or 1, got {sigma}"));
        }
        let amplitude = Complex64::new(parse_f64(parts[4])?, parse_f64(parts[5])?);
        modes.push(ModeSpec {
            index,
            sigma,
            amplitude,
        });
    }
    if modes.is_empty() {
        return Err("no modes given".into());
    }
    Ok(modes)
}

/// Parses `jx,jy,jz` lattice indices.
pub fn parse_index(s: &str) -> std::result::Result<[i64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected jx,jy,jz, got `{s}`"));
    }
    let mut out = [0i64; 3];
    for a in 0..3 {
        out[a] = parts[a]
            .parse()
            .map_err(|_| format!("`{}` is not an integer", parts[a]))?;
    }
    Ok(out)
}

fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("rsphoton-out"))
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_relative(text, None)
    }

    /// Reads a config file; a relative `init.path` is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_relative(&text, path.parent())
    }

    fn parse_relative(text: &str, base: Option<&Path>) -> Result<Self> {
        let t = Table::parse(text)?;

        let nx = t.get("grid.nx", parse_usize)?.unwrap_or(32);
        let ny = t.get("grid.ny", parse_usize)?.unwrap_or(nx);
        let nz = t.get("grid.nz", parse_usize)?.unwrap_or(nx);
        let lx = t.get("grid.lx", parse_f64)?.unwrap_or(1.0);
        let ly = t.get("grid.ly", parse_f64)?.unwrap_or(lx);
        let lz = t.get("grid.lz", parse_f64)?.unwrap_or(lx);
        let grid = Grid3::new([nx, ny, nz], [lx, ly, lz]).map_err(|e| Error::Config {
            line: t.line("grid.nx").max(t.line("grid.lx")),
            msg: e.to_string(),
        })?;

        let c = t.get("physics.c", parse_f64)?.unwrap_or(1.0);
        if !(c.is_finite() && c > 0.0) {
            return Err(t.invalid("physics.c", "must be positive"));
        }
        let dt = t.require("time.dt", parse_f64)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(t.invalid("time.dt", "must be positive"));
        }
        let steps = t.require("time.steps", parse_usize)?;

        let kind = t
            .get("init.kind", |s| Ok(s.to_string()))?
            .unwrap_or_else(|| "plane-waves".into());
        let init = match kind.as_str() {
            "plane-waves" => InitialCondition::PlaneWaves(t.require("init.modes", parse_modes)?),
            "gaussian" => {
                let sigma = t.get("init.sigma", parse_i32)?.unwrap_or(1);
                if sigma.abs() != 1 {
                    return Err(t.invalid("init.sigma", "gaussian packets need helicity +1 or -1"));
                }
                let width = t.require("init.width", parse_f64)?;
                if !(width.is_finite() && width > 0.0) {
                    return Err(t.invalid("init.width", "must be positive"));
                }
                InitialCondition::Gaussian {
                    center: t
                        .get("init.center", parse_vec3)?
                        .unwrap_or([0.5 * lx, 0.5 * ly, 0.5 * lz]),
                    width,
                    k: t.require("init.k", parse_vec3)?,
                    sigma,
                    amplitude: t
                        .get("init.amplitude", parse_complex)?
                        .unwrap_or(Complex64::new(1.0, 0.0)),
                }
            }
            "file" => {
                let p = PathBuf::from(t.require("init.path", |s| Ok(s.to_string()))?);
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                };
                InitialCondition::File(p)
            }
            other => {
                return Err(t.invalid(
                    "init.kind",
                    format!("unknown kind `{other}` (expected plane-waves, gaussian or file)"),
                ))
            }
        };
        let project_transverse = t.get("init.project_transverse", parse_bool)?.unwrap_or(true);

        let every = t.get("output.every", parse_usize)?.unwrap_or(1);
        if every == 0 {
            return Err(t.invalid("output.every", "must be at least 1"));
        }
        let output = OutputConfig {
            dir: t
                .get("output.dir", |s| Ok(PathBuf::from(s)))?
                .unwrap_or_else(default_output_dir),
            every,
            diagnostics: t
                .get("output.diagnostics", |s| Ok(s.to_string()))?
                .unwrap_or_else(|| "diagnostics.csv".into()),
            snapshots: t.get("output.snapshots", parse_bool)?.unwrap_or(true),
            csv: t.get("output.csv", parse_bool)?.unwrap_or(false),
        };

        let threshold = |key: &str, default: f64| -> Result<f64> {
            let v = t.get(key, parse_f64)?.unwrap_or(default);
            if !(v.is_finite() && v >= 0.0) {
                return Err(t.invalid(key, "must be a non-negative number"));
            }
            Ok(v)
        };
        let checks = CheckConfig {
            energy_drift: threshold("check.energy_drift", 1e-10)?,
            helicity_drift: threshold("check.helicity_drift", 1e-10)?,
            gauss: threshold("check.gauss", 1e-10)?,
            maxwell: match t.raw("check.maxwell") {
                Some(_) => Some(threshold("check.maxwell", 0.0)?),
                None => None,
            },
        };

        Ok(SimConfig {
            grid,
            c,
            dt,
            steps,
            init,
            project_transverse,
            output,
            checks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "
        # two modes
        grid.nx = 8
        grid.lx = 2.0
        time.dt = 0.01
        time.steps = 5
        init.modes = 1,0,0,1,1.0,0.0; 0,1,-1,-1,0.5,0.25
    ";

    #[test]
    fn parses_defaults() {
        let cfg = SimConfig::parse(BASIC).unwrap();
        assert_eq!(cfg.grid.n, [8, 8, 8]);
        assert_eq!(cfg.grid.l, [2.0, 2.0, 2.0]);
        assert_eq!(cfg.c, 1.0);
        assert_eq!(cfg.steps, 5);
        assert!(cfg.project_transverse);
        assert_eq!(cfg.output.every, 1);
        assert_eq!(cfg.checks.maxwell, None);
        match cfg.init {
            InitialCondition::PlaneWaves(m) => {
                assert_eq!(m.len(), 2);
                assert_eq!(m[1].index, [0, 1, -1]);
                assert_eq!(m[1].sigma, -1);
                assert_eq!(m[1].amplitude, Complex64::new(0.5, 0.25));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = SimConfig::parse("time.dt = 1\ngrid.nw = 3\n").unwrap_err();
        match err {
            Error::Config { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("grid.nw"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_values() {
        let with = |extra: &str| SimConfig::parse(&format!("{BASIC}\n{extra}\n"));
        assert!(with("physics.c = -1").is_err());
        assert!(with("output.every = 0").is_err());
        assert!(with("init.project_transverse = maybe").is_err());
        assert!(with("time.steps = 3").is_err());
        assert!(SimConfig::parse("time.steps = 1\n").is_err());
        assert!(SimConfig::parse("time.dt = 0\ntime.steps = 1\ninit.modes = 1,0,0,1,1,0").is_err());
        assert!(SimConfig::parse("time.dt = 1\ntime.steps = 1\ninit.modes = 1,0,0,2,1,0").is_err());
    }

    #[test]
    fn gaussian_and_file_kinds() {
        let g = SimConfig::parse(
            "time.dt = 0.1\ntime.steps = 0\ninit.kind = gaussian\ninit.width = 0.1\ninit.k = 6.28,0,0\ninit.sigma = -1",
        )
        .unwrap();
        assert!(matches!(g.init, InitialCondition::Gaussian { sigma: -1, .. }));
        assert!(SimConfig::parse(
            "time.dt = 0.1\ntime.steps = 0\ninit.kind = gaussian\ninit.width = 0.1\ninit.k = 1,0,0\ninit.sigma = 0"
        )
        .is_err());
        let f = SimConfig::parse_relative(
            "time.dt = 0.1\ntime.steps = 0\ninit.kind = file\ninit.path = start.rsf",
            Some(Path::new("/runs")),
        )
        .unwrap();
        assert_eq!(f.init, InitialCondition::File(PathBuf::from("/runs/start.rsf")));
    }
}
