//! Command-line front end. Exit codes: 0 success, 1 verification or
//! invariant failure, 2 usage, config or I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::{parse_index, SimConfig, OUTPUT_DIR_ENV};
use crate::error::Error;
use crate::grid::Grid3;
use crate::helicity::{apply_k_dot_s, helicity_basis, Helicity, WaveVector, HELICITY_FREQUENCY_SIGN};
use crate::identities::{all_identities, find_identity, format_human, format_kv, identity_names};
use crate::propagator::{dispersion_check, lowest_modes};
use crate::selftest::run_selftest;
use crate::sim::{format_summary, run};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Dispersion relative-error threshold.
pub const DISPERSION_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "rsphoton",
    version,
    about = "Spin-matrix identity checks and spectral Maxwell evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Kv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the symbolic spin-matrix identities.
    Algebra {
        /// Run only the named identity.
        #[arg(long)]
        identity: Option<String>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Print the helicity basis of a lattice wavevector.
    Helicity {
        /// Lattice index jx,jy,jz; the wavevector is 2 pi j / L.
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Grid points, `n` or `nx,ny,nz`; enables the Nyquist check.
        #[arg(long)]
        grid: Option<String>,
        /// Box lengths, `l` or `lx,ly,lz` (default 1).
        #[arg(long = "box")]
        box_len: Option<String>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Evolve a field from a config file.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the dispersion relation of single modes, as CSV.
    Dispersion {
        /// `lowest:N` or `jx,jy,jz;jx,jy,jz;...`.
        #[arg(long, allow_hyphen_values = true)]
        modes: String,
        /// Config supplying the grid, c and dt.
        #[arg(long)]
        config: PathBuf,
        /// Steps per mode.
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Run the invariant suite.
    Selftest {
        /// Scratch directory for the I/O check.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(String, i32), Usage>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Algebra { identity, format } => cmd_algebra(identity.as_deref(), format),
        Command::Helicity {
            k,
            grid,
            box_len,
            format,
        } => cmd_helicity(&k, grid.as_deref(), box_len.as_deref(), format),
        Command::Evolve { config, out } => cmd_evolve(&config, out),
        Command::Dispersion { modes, config, steps } => cmd_dispersion(&modes, &config, steps),
        Command::Selftest { out } => cmd_selftest(out),
    };
    match outcome {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn cmd_algebra(identity: Option<&str>, format: Format) -> Outcome {
    let ids = match identity {
        None => all_identities(),
        Some(name) => vec![find_identity(name).ok_or_else(|| {
            Usage(format!(
                "unknown identity `{name}`; known: {}",
                identity_names().join(", ")
            ))
        })?],
    };
    let reports: Vec<_> = ids.iter().map(|i| i.verify()).collect();
    let code = if reports.iter().all(|r| r.residual_is_zero) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    let text = match format {
        Format::Human => format_human(&reports),
        Format::Kv => format_kv(&reports),
    };
    Ok((text, code))
}

fn parse_triple_f64(s: &str, what: &str) -> std::result::Result<[f64; 3], Usage> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Usage(format!("{what}: `{p}` is not a number")))
        })
        .collect::<std::result::Result<_, _>>()?;
    match vals.as_slice() {
        [v] => Ok([*v; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Usage(format!("{what}: expected one or three values, got `{s}`"))),
    }
}

fn fmt_vec(v: &[Complex64; 3]) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("{:+.16e}{:+.16e}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

fn cmd_helicity(k: &str, grid: Option<&str>, box_len: Option<&str>, format: Format) -> Outcome {
    let index = parse_index(k).map_err(|m| Usage(format!("--k: {m}")))?;
    if index == [0, 0, 0] {
        return Err(Usage(Error::ZeroWaveVector.to_string()));
    }
    let l = match box_len {
        Some(s) => parse_triple_f64(s, "--box")?,
        None => [1.0; 3],
    };
    if let Some(g) = grid {
        let n = parse_triple_f64(g, "--grid")?;
        if n.iter().any(|x| x.fract() != 0.0 || *x < 0.0) {
            return Err(Usage(format!("--grid: point counts must be integers, got `{g}`")));
        }
        let grid = Grid3::new(n.map(|x| x as usize), l)?;
        if grid.is_aliased(index) {
            return Err(Usage(Error::Aliased { index, dims: grid.n }.to_string()));
        }
    }
    if l.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Usage(format!("--box: lengths must be positive, got {l:?}")));
    }
    let kv = WaveVector(std::array::from_fn(|a| {
        2.0 * std::f64::consts::PI * index[a] as f64 / l[a]
    }));
    let basis = helicity_basis(&kv)?;
    let kn = kv.norm();
    let residual = |h: Helicity| {
        let e = basis.get(h);
        let ke = apply_k_dot_s(&kv, &e);
        let s = h.value() as f64 * kn;
        (0..3).map(|a| (ke[a] - e[a] * s).norm_sqr()).sum::<f64>().sqrt() / kn
    };
    let residuals = [Helicity::Plus, Helicity::Zero, Helicity::Minus].map(|h| (h, residual(h)));
    let ortho = basis.orthonormality_residual();
    let worst = residuals.iter().map(|r| r.1).fold(ortho, f64::max);

    let mut s = String::new();
    match format {
        Format::Human => {
            let _ = writeln!(s, "index     {},{},{}", index[0], index[1], index[2]);
            let _ = writeln!(s, "k         ({:.16e}, {:.16e}, {:.16e})", kv.0[0], kv.0[1], kv.0[2]);
            let _ = writeln!(s, "|k|       {kn:.16e}");
            let _ = writeln!(s, "e_plus    {}", fmt_vec(&basis.e_plus));
            let _ = writeln!(s, "e_zero    {}", fmt_vec(&basis.e_zero));
            let _ = writeln!(s, "e_minus   {}", fmt_vec(&basis.e_minus));
            for (h, r) in residuals {
                let _ = writeln!(
                    s,
                    "residual  sigma={:+}  ||(k.S)e - sigma|k|e||/|k| = {r:.3e}",
                    h.value()
                );
            }
            let _ = writeln!(s, "orthonormality residual {ortho:.3e}");
            let _ = writeln!(
                s,
                "convention: psi ~ e_sigma exp(i(k.x - omega t)), omega = {:+} * sigma * c|k|; sigma = -1 is the positive-frequency solution of (i/c) dpsi/dt + curl psi = 0",
                HELICITY_FREQUENCY_SIGN
            );
        }
        Format::Kv => {
            let _ = writeln!(s, "index={},{},{}", index[0], index[1], index[2]);
            let _ = writeln!(s, "k_norm={kn:.16e}");
            for (name, v) in [
                ("e_plus", &basis.e_plus),
                ("e_zero", &basis.e_zero),
                ("e_minus", &basis.e_minus),
            ] {
                let parts: Vec<String> = v.iter().map(|z| format!("{:.16e},{:.16e}", z.re, z.im)).collect();
                let _ = writeln!(s, "{name}={}", parts.join(","));
            }
            for (h, r) in residuals {
                let _ = writeln!(
                    s,
                    "residual_{}={r:.3e}",
                    ["minus", "zero", "plus"][(h.value() + 1) as usize]
                );
            }
            let _ = writeln!(s, "orthonormality={ortho:.3e}");
            let _ = writeln!(s, "frequency_sign={HELICITY_FREQUENCY_SIGN}");
        }
    }
    let code = if worst < 1e-13 { EXIT_OK } else { EXIT_FAILURE };
    Ok((s, code))
}

fn load_config(path: &Path) -> std::result::Result<SimConfig, Usage> {
    SimConfig::load(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn cmd_evolve(config: &Path, out: Option<PathBuf>) -> Outcome {
    let mut cfg = load_config(config)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let summary = run(&cfg, true)?;
    let mut text = format_summary(&cfg, &summary);
    let _ = writeln!(text, "output          {}", cfg.output.dir.display());
    Ok((text, if summary.passed() { EXIT_OK } else { EXIT_FAILURE }))
}

fn parse_modes_arg(spec: &str, grid: &Grid3) -> std::result::Result<Vec<[i64; 3]>, Usage> {
    if let Some(n) = spec.strip_prefix("lowest:") {
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Usage(format!("--modes: `{n}` is not a count")))?;
        return Ok(lowest_modes(grid, n));
    }
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_index(s).map_err(|m| Usage(format!("--modes: {m}"))))
        .collect()
}

fn cmd_dispersion(modes: &str, config: &Path, steps: usize) -> Outcome {
    let cfg = load_config(config)?;
    let modes = parse_modes_arg(modes, &cfg.grid)?;
    if modes.is_empty() {
        return Err(Usage("--modes: no modes given".into()));
    }
    for j in &modes {
        if *j == [0, 0, 0] {
            return Err(Usage(Error::ZeroWaveVector.to_string()));
        }
        if cfg.grid.is_aliased(*j) {
            return Err(Usage(
                Error::Aliased {
                    index: *j,
                    dims: cfg.grid.n,
                }
                .to_string(),
            ));
        }
    }
    let mut text = String::from("jx,jy,jz,k_norm,omega_measured,omega_expected,relative_error\n");
    let mut ok = true;
    for j in modes {
        let r = dispersion_check(cfg.grid, j, steps, cfg.dt, cfg.c)?;
        ok &= r.relative_error < DISPERSION_TOLERANCE;
        let _ = writeln!(
            text,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            j[0], j[1], j[2], r.k_norm, r.omega_measured, r.omega_expected, r.relative_error
        );
    }
    Ok((text, if ok { EXIT_OK } else { EXIT_FAILURE }))
}

fn cmd_selftest(out: Option<PathBuf>) -> Outcome {
    let dir = out
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(std::env::temp_dir);
    let report = run_selftest(&dir)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILURE };
    Ok((report.format(), code))
}
