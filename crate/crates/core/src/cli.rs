//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cat::{
    cat_correlation, kerr_cat, minimum_truncation, run_protocol, tomography_sequence, wigner, Grid, KerrSetting,
};
use crate::circuit::{parse_config, CircuitSpec};
use crate::dynamics::{simulate_iswap, simulate_x_half_pi, Frame, GateResult, IswapOptions, X90Options};
use crate::effective::{effective_coupling_curve, find_zero_coupling, linspace, off_pole_grid, EffectiveOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{coupler_leakage, find_anticrossings, spectrum_scan, ScanOptions, Scope, SweepParam};
use crate::linalg::C64;
use crate::output::{sha256_hex, write_json, write_table, write_text, Cell, Heatmap, LineChart, RunManifest, Series};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "FTT_SIM_THREADS";

/// Default Kerr coefficient of the cat commands (MHz).
pub const DEFAULT_KERR_MHZ: f64 = -5.95;

#[derive(Debug, Parser)]
#[command(name = "ftt-sim", version, about = "Fluxonium-transmon tunable-coupler simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Circuit configuration (JSON). The built-in reference set is used
    /// when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels along a parameter sweep.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// `<param>=<lo>:<hi>:<n>` or just `<param>`.
        #[arg(long, default_value = "coupler")]
        sweep: String,
        #[arg(long, value_enum, default_value_t = ScopeArg::Full)]
        scope: ScopeArg,
        /// Eigenvalues reported per point.
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Locate the two coupler anticrossings (coupler sweeps only).
        #[arg(long)]
        crossings: bool,
    },
    /// Effective coupling against coupler frequency and its zero.
    CouplingCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "omega_c=4:8:401")]
        sweep: String,
        /// Include counter-rotating terms.
        #[arg(long)]
        counter_rotating: bool,
    },
    /// Pulse-level gate simulation.
    Gate {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum)]
        gate: GateArg,
        /// Coupler frequency: parking point for x90, operating point for
        /// iswap (GHz).
        #[arg(long = "omega-c")]
        omega_c: Option<f64>,
        /// Add relaxation and dephasing from the coherence times.
        #[arg(long)]
        noise: bool,
        #[arg(long, value_enum, default_value_t = FrameArg::Lab)]
        frame: FrameArg,
    },
    /// Wigner function of a Kerr cat state.
    Cat {
        #[command(flatten)]
        common: Common,
        /// Coherent amplitude `<re,im>`.
        #[arg(long, default_value = "2,0", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Kerr coefficient (MHz).
        #[arg(long, default_value_t = DEFAULT_KERR_MHZ, allow_hyphen_values = true)]
        kerr: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Difference of cat Wigner functions at `n+1` and `n` photons.
    Correlation {
        #[command(flatten)]
        common: Common,
        /// Photon number `n`.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_KERR_MHZ, allow_hyphen_values = true)]
        kerr: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Cat preparation and Wigner tomography pulse sequence.
    Sequence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "2,0", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Tomography point `<re,im>`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = DEFAULT_KERR_MHZ, allow_hyphen_values = true)]
        kerr: f64,
        /// Require a flux bias that reaches the Kerr value.
        #[arg(long)]
        tune_kerr: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Full,
    Fluxonium,
    Transmon,
    Coupler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    X90,
    Iswap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Lab,
    Rotating,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common, .. }
            | Command::CouplingCurve { common, .. }
            | Command::Gate { common, .. }
            | Command::Cat { common, .. }
            | Command::Correlation { common, .. }
            | Command::Sequence { common, .. } => common,
        }
    }

    fn name(&self) -> String {
        match self {
            Command::Spectrum { .. } => "spectrum".into(),
            Command::CouplingCurve { .. } => "coupling-curve".into(),
            Command::Gate { gate, .. } => format!("gate {}", gate_name(*gate)),
            Command::Cat { .. } => "cat".into(),
            Command::Correlation { .. } => "correlation".into(),
            Command::Sequence { .. } => "sequence".into(),
        }
    }
}

fn gate_name(g: GateArg) -> &'static str {
    match g {
        GateArg::X90 => "x90",
        GateArg::Iswap => "iswap",
    }
}

/// Parses `<param>=<lo>:<hi>:<n>`; a bare `<param>` takes its default range.
pub fn parse_sweep(s: &str) -> Result<(SweepParam, Vec<f64>)> {
    let (name, range) = match s.split_once('=') {
        Some((n, r)) => (n, Some(r)),
        None => (s, None),
    };
    let param = SweepParam::parse(name)?;
    let (lo, hi, n) = match range {
        None => match param {
            SweepParam::CouplerFrequency => (4.5, 7.5, 61),
            SweepParam::FluxoniumPhiExt => (0.0, std::f64::consts::TAU, 61),
            SweepParam::TransmonNg => (-1.0, 1.0, 61),
            SweepParam::CouplerEj => (5.0, 20.0, 61),
        },
        Some(r) => {
            let parts: Vec<&str> = r.split(':').collect();
            let bad = || Error::config("--sweep", format!("expected <lo>:<hi>:<n>, got `{r}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if n < 2 || !(hi > lo) {
                return Err(Error::config("--sweep", format!("need hi > lo and n >= 2, got `{r}`")));
            }
            (lo, hi, n)
        }
    };
    Ok((param, linspace(lo, hi, n)))
}

/// Parses `<re,im>` or a bare real number.
pub fn parse_complex(flag: &str, s: &str) -> Result<C64> {
    let bad = || Error::config(flag, format!("expected <re,im>, got `{s}`"));
    let mut it = s.split(',');
    let re: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match it.next() {
        Some(v) => v.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

fn load_spec(common: &Common) -> Result<CircuitSpec> {
    match &common.config {
        None => Ok(CircuitSpec::table1()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
            parse_config(&text)
        }
    }
}

/// Collects output paths while a command runs.
struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        let p = self.path(name);
        write_table(&header, rows, &p)
    }

    fn json(&mut self, name: &str, v: &serde_json::Value) -> Result<()> {
        let p = self.path(name);
        write_json(v, &p)
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        let p = self.path(name);
        write_text(s, &p)
    }
}

/// Runs a parsed command and writes `manifest.json` next to its outputs.
pub fn execute(cli: &Cli) -> Result<RunManifest> {
    let start = Instant::now();
    let common = cli.command.common();
    let spec = load_spec(common)?;
    fs::create_dir_all(&common.out)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", common.out.display()))))?;
    let mut out = Outputs {
        dir: common.out.clone(),
        files: Vec::new(),
    };
    let mut warnings: Vec<String> = spec.warnings().into_iter().map(|w| w.0).collect();
    match &cli.command {
        Command::Spectrum {
            sweep,
            scope,
            levels,
            crossings,
            ..
        } => run_spectrum(&spec, sweep, *scope, *levels, *crossings, &mut out, &mut warnings)?,
        Command::CouplingCurve {
            sweep, counter_rotating, ..
        } => run_coupling_curve(&spec, sweep, *counter_rotating, &mut out)?,
        Command::Gate {
            gate,
            omega_c,
            noise,
            frame,
            ..
        } => run_gate(&spec, *gate, *omega_c, *noise, *frame, &mut out, &mut warnings)?,
        Command::Cat {
            alpha, m, kerr, points, ..
        } => run_cat(alpha, *m, *kerr, *points, &mut out, &mut warnings)?,
        Command::Correlation {
            n, m, kerr, points, ..
        } => run_correlation(*n, *m, *kerr, *points, &mut out)?,
        Command::Sequence {
            alpha,
            m,
            gamma,
            kerr,
            tune_kerr,
            ..
        } => run_sequence(&spec, alpha, *m, gamma, *kerr, *tune_kerr, &mut out)?,
    }
    let manifest = RunManifest {
        command: cli.command.name(),
        config_hash: sha256_hex(spec.to_json().as_bytes()),
        outputs: out.files,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        finished_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        warnings,
    };
    manifest.verify()?;
    manifest.write(&common.out.join("manifest.json"))?;
    Ok(manifest)
}

fn run_spectrum(
    spec: &CircuitSpec,
    sweep: &str,
    scope: ScopeArg,
    levels: usize,
    crossings: bool,
    out: &mut Outputs,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let (param, grid) = parse_sweep(sweep)?;
    let scope = match scope {
        ScopeArg::Full => Scope::Full,
        ScopeArg::Fluxonium => Scope::Fluxonium,
        ScopeArg::Transmon => Scope::Transmon,
        ScopeArg::Coupler => Scope::Coupler,
    };
    let opts = ScanOptions {
        scope,
        levels,
        ..Default::default()
    };
    let table = spectrum_scan(spec, param, &grid, &opts)?;
    let header = table.header();
    let rows: Vec<Vec<Cell>> = table
        .grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut r: Vec<Cell> = vec![x.into()];
            r.extend(table.energies[i].iter().map(|&e| Cell::from(e)));
            if let Some(labels) = &table.labels {
                r.extend(labels[i].iter().map(|l| Cell::from(l.as_str())));
            }
            r
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.table("spectrum.csv", &header_refs, &rows)?;
    let k = table.energies.first().map_or(0, Vec::len);
    let chart = LineChart {
        title: "Energy levels",
        x_label: &table.param,
        y_label: "E - E0 (GHz)",
        x: &table.grid,
        series: (1..k)
            .map(|j| Series {
                name: format!("E{j}"),
                y: table.energies.iter().map(|e| Some(e[j])).collect(),
            })
            .collect(),
    };
    out.text("spectrum.svg", &chart.render())?;
    let flagged = table.ambiguous.iter().filter(|&&a| a).count();
    if flagged > 0 {
        warnings.push(format!("{flagged} sweep points have ambiguous bare-state labels"));
    }
    if table.jumps.iter().any(|&j| j) {
        warnings.push("level jumps above the threshold; refine the sweep grid".into());
    }
    if crossings {
        if param != SweepParam::CouplerFrequency {
            return Err(Error::config("--crossings", "requires a coupler-frequency sweep"));
        }
        let pairs = [([1, 0, 0], [0, 1, 0]), ([0, 0, 1], [0, 1, 0])];
        let lo = grid[0];
        let hi = grid[grid.len() - 1];
        let found = find_anticrossings(spec, &pairs, lo, hi, grid.len().min(31), 1e-4)?;
        let v: Vec<serde_json::Value> = found
            .iter()
            .map(|a| {
                serde_json::json!({
                    "a": crate::hamiltonian::label_string(&a.a),
                    "b": crate::hamiltonian::label_string(&a.b),
                    "omega_c_ghz": a.omega_c,
                    "gap_ghz": a.gap,
                })
            })
            .collect();
        out.json("anticrossings.json", &serde_json::Value::Array(v))?;
    }
    Ok(())
}

fn run_coupling_curve(spec: &CircuitSpec, sweep: &str, counter_rotating: bool, out: &mut Outputs) -> Result<()> {
    let (param, grid) = parse_sweep(sweep)?;
    if param != SweepParam::CouplerFrequency {
        return Err(Error::config("--sweep", "coupling-curve sweeps the coupler frequency"));
    }
    let grid = off_pole_grid(spec, grid[0], grid[grid.len() - 1], grid.len());
    let opts = EffectiveOptions {
        counter_rotating,
        ..Default::default()
    };
    let curve = effective_coupling_curve(spec, &grid, &opts)?;
    let rows: Vec<Vec<Cell>> = curve
        .omega_c
        .iter()
        .zip(&curve.two_g)
        .map(|(&w, &g2)| vec![w.into(), g2.into()])
        .collect();
    out.table("coupling_curve.csv", &["omega_c_ghz", "two_g_eff_mhz"], &rows)?;
    let chart = LineChart {
        title: "Effective coupling",
        x_label: "coupler frequency (GHz)",
        y_label: "2 g_eff (MHz)",
        x: &curve.omega_c,
        series: vec![Series {
            name: "2 g_eff".into(),
            // Clip the poles so the plot stays readable.
            y: curve
                .two_g
                .iter()
                .map(|&g| (g.abs() <= 1000.0).then_some(g))
                .collect(),
        }],
    };
    out.text("coupling_curve.svg", &chart.render())?;
    let lo = grid[0];
    let hi = grid[grid.len() - 1];
    let zero = find_zero_coupling(spec, lo, hi, &opts)?;
    out.json(
        "zero_point.json",
        &serde_json::json!({
            "omega_c_star_ghz": zero.omega_c_star,
            "residual_mhz": zero.residual,
            "bracket_ghz": [zero.bracket.0, zero.bracket.1],
        }),
    )
}

fn gate_outputs(result: &GateResult, json: &serde_json::Value, out: &mut Outputs) -> Result<()> {
    out.json("gate.json", json)?;
    out.json("sequence.json", &result.sequence.to_json())?;
    for trace in &result.traces {
        let rows: Vec<Vec<Cell>> = trace
            .times
            .iter()
            .zip(&trace.rows)
            .map(|(&t, r)| {
                let mut row = vec![Cell::from(t)];
                row.extend(r.iter().map(|&p| Cell::from(p)));
                row
            })
            .collect();
        let stem = format!("trajectory_{}", trace.label.replace('+', "p").replace('-', "m"));
        out.table(
            &format!("{stem}.csv"),
            &["t_ns", "P_00", "P_01", "P_10", "P_11", "leakage"],
            &rows,
        )?;
        let names = ["P_00", "P_01", "P_10", "P_11"];
        let chart = LineChart {
            title: &format!("{} from |{}>", result.name, trace.label),
            x_label: "t (ns)",
            y_label: "population",
            x: &trace.times,
            series: names
                .iter()
                .enumerate()
                .map(|(k, n)| Series {
                    name: n.to_string(),
                    y: trace.rows.iter().map(|r| Some(r[k])).collect(),
                })
                .collect(),
        };
        out.text(&format!("{stem}.svg"), &chart.render())?;
    }
    Ok(())
}

fn run_gate(
    spec: &CircuitSpec,
    gate: GateArg,
    omega_c: Option<f64>,
    noise: bool,
    frame: FrameArg,
    out: &mut Outputs,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let coherence = noise.then(|| spec.coherence_or_default());
    let result = match gate {
        GateArg::X90 => simulate_x_half_pi(
            spec,
            &X90Options {
                omega_c,
                noise: coherence,
                frame: match frame {
                    FrameArg::Lab => Frame::Lab,
                    FrameArg::Rotating => Frame::Rotating,
                },
                ..Default::default()
            },
        )?,
        GateArg::Iswap => {
            let mut opts = IswapOptions {
                noise: coherence,
                ..Default::default()
            };
            if let Some(w) = omega_c {
                opts.omega_c_op = w;
            }
            simulate_iswap(spec, &opts)?
        }
    };
    warnings.extend(result.notes.iter().cloned());
    let mut json = result.to_json();
    let mut content = serde_json::Map::new();
    for key in ["omega_c_ghz", "omega_c_idle_ghz", "omega_c_op_ghz"] {
        if let Some(w) = result.sequence.metadata.get(key).and_then(|v| v.parse::<f64>().ok()) {
            content.insert(key.trim_end_matches("_ghz").into(), serde_json::json!(coupler_leakage(spec, w)?));
        }
    }
    json["coupler_content_full_model"] = serde_json::Value::Object(content);
    gate_outputs(&result, &json, out)
}

fn fock_size(alpha: C64) -> usize {
    minimum_truncation(alpha).max(40)
}

fn wigner_outputs(stem: &str, title: &str, grid: &Grid, values: &[Vec<f64>], out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::with_capacity(grid.re.len() * grid.im.len());
    for (i, &y) in grid.im.iter().enumerate() {
        for (j, &x) in grid.re.iter().enumerate() {
            rows.push(vec![Cell::from(x), Cell::from(y), Cell::from(values[i][j])]);
        }
    }
    out.table(&format!("{stem}.csv"), &["re_gamma", "im_gamma", "value"], &rows)?;
    let map = Heatmap {
        title,
        x: &grid.re,
        y: &grid.im,
        values,
        x_label: "Re γ",
        y_label: "Im γ",
    };
    out.text(&format!("{stem}.svg"), &map.render())
}

fn run_cat(alpha: &str, m: usize, kerr: f64, points: usize, out: &mut Outputs, warnings: &mut Vec<String>) -> Result<()> {
    let alpha = parse_complex("--alpha", alpha)?;
    let n = fock_size(alpha);
    let state = kerr_cat(alpha, m, kerr, n)?;
    let grid = Grid::square(alpha.norm() + 4.0, points);
    let w = wigner(&state, &grid);
    if let Some(msg) = w.warning() {
        warnings.push(msg);
    }
    let fock: Vec<Vec<Cell>> = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| vec![Cell::from(k as f64), c.norm_sqr().into(), c.re.into(), c.im.into()])
        .collect();
    out.table("fock.csv", &["n", "population", "re_amplitude", "im_amplitude"], &fock)?;
    wigner_outputs("wigner", &format!("Wigner function, m = {m}"), &grid, &w.values, out)
}

fn run_correlation(n: usize, m: usize, kerr: f64, points: usize, out: &mut Outputs) -> Result<()> {
    let alpha = C64::new(((n + 1) as f64).sqrt(), 0.0);
    let grid = Grid::square(alpha.norm() + 4.0, points);
    let c = cat_correlation(n, m, kerr, &grid, fock_size(alpha))?;
    wigner_outputs(
        "correlation",
        &format!("Cat correlation, n = {n}, m = {m}"),
        &grid,
        &c.values,
        out,
    )
}

fn run_sequence(
    spec: &CircuitSpec,
    alpha: &str,
    m: usize,
    gamma: &str,
    kerr: f64,
    tune: bool,
    out: &mut Outputs,
) -> Result<()> {
    let alpha = parse_complex("--alpha", alpha)?;
    let gamma = parse_complex("--gamma", gamma)?;
    let setting = if tune {
        KerrSetting::Tuned {
            target_mhz: kerr,
            fluxonium: spec.fluxonium,
        }
    } else {
        KerrSetting::Given(kerr)
    };
    let protocol = tomography_sequence(spec, alpha, setting, m, gamma)?;
    let outcome = run_protocol(&protocol, fock_size(alpha + gamma))?;
    out.json(
        "sequence.json",
        &serde_json::json!({
            "sequence": protocol.sequence.to_json(),
            "flux_width_ns": protocol.flux_width,
            "parity_interval_ns": protocol.parity_interval,
            "kerr_mhz": protocol.k_mhz,
            "phi_ext_rad": protocol.phi_ext,
            "outcome": {
                "parity": outcome.parity,
                "p_excited": outcome.p_excited,
                "wigner": outcome.wigner,
            },
        }),
    )
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

/// Parses `argv`, runs the command on a pool sized by `FTT_SIM_THREADS` and
/// returns the process exit code. Messages go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(m) => {
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs `cli` inside a thread pool honouring `FTT_SIM_THREADS`.
pub fn run_cli(cli: &Cli) -> Result<RunManifest> {
    match thread_count()? {
        None => execute(cli),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?
            .install(|| execute(cli)),
    }
}

/// Path of the manifest written by a run into `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.join("manifest.json")
}
