//! Subcommand dispatch, CSV serialization, and plot-script generation.
//!
//! All numeric cells are serialized with 17 significant digits so re-reading
//! reproduces every value bit-exactly; every output embeds the resolved
//! configuration (with per-key source flags) and its hash as `#`-prefixed
//! metadata comments.

use std::fmt;
use std::path::{Path, PathBuf};

use ringqb_core::config::{default_config, parse_config, BatteryConfig};
use ringqb_core::dynamics::{evolve, steady_state};
use ringqb_core::error::Error as CoreError;
use ringqb_core::ring::hybridize_ring;
use ringqb_core::ring::RingParams;
use ringqb_core::sweep::{run_sweep, Cell, Figure, SweepResult, SweepSpec};
use ringqb_core::thermo::{epoch_indices, ordering_epochs, snapshot, ThermoSnapshot};

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    BadFigure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::BadFigure(name) => {
                write!(
                    f,
                    "unknown figure '{name}'; expected fig2, fig3, fig4, or fig5"
                )
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Machine-readable error code for the CLI's final error line.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::BadFigure(_) => "bad-figure",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Which batch computation to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Subcommand {
    /// Hybridized energies and scaled widths over the configured ring sizes.
    Hybridize,
    /// Time evolution with all thermodynamic observables per grid point.
    Evolve,
    /// Steady-state populations and observables, one row.
    Steady,
    /// A figure dataset.
    Sweep { figure: Figure },
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub subcommand: Subcommand,
    pub config_path: Option<PathBuf>,
    pub out_path: PathBuf,
    pub jobs: usize,
    pub plot_script: bool,
}

/// Serialize one float with 17 significant digits (bit-exact round trip).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => fmt_float(*v),
        Cell::Text(t) => t.clone(),
        Cell::Missing => String::new(),
    }
}

fn load_config(path: Option<&Path>) -> Result<BatteryConfig> {
    match path {
        Some(p) => Ok(parse_config(p)?),
        None => Ok(default_config()),
    }
}

fn metadata_header(title: &str, cfg: &BatteryConfig, extra: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# ringqb {title}\n"));
    out.push_str(&format!("# config-hash: {}\n", cfg.provenance.hash_hex()));
    let calibration = cfg.provenance.calibration_keys();
    if calibration.is_empty() {
        out.push_str("# calibration-defaults: (none)\n");
    } else {
        out.push_str(&format!(
            "# calibration-defaults: {}\n",
            calibration.join(", ")
        ));
    }
    for e in &cfg.provenance.entries {
        out.push_str(&format!(
            "# config: {}.{} = {} ({})\n",
            e.section,
            e.key,
            e.value,
            e.source.label()
        ));
    }
    for line in extra {
        out.push_str(&format!("# {line}\n"));
    }
    out
}

fn point_metadata(point: &ringqb_core::config::BatteryPoint) -> Vec<String> {
    let mut lines = vec![
        format!(
            "point: n_ring = {}, j_d = {}, gamma_plus_eff = {}, gamma_minus_eff = {}",
            point.n_ring, point.j_d, point.gamma_plus_eff, point.gamma_minus_eff
        ),
        format!(
            "point: eps_g = 0, eps_beta = {}, eps_alpha = {}, eps_minus = {}, eps_plus = {}",
            point.energies.eps_beta,
            point.energies.eps_alpha,
            point.energies.eps_minus,
            point.energies.eps_plus
        ),
    ];
    if point.width_sign_flipped {
        lines.push(
            "warning: raw hybridized widths were negative; magnitudes used for the rate table"
                .to_string(),
        );
    }
    if let Some(w) = point.gamma0.warning {
        lines.push(format!(
            "warning: gamma0 = {} is a nonphysical gain",
            w.gamma0
        ));
    }
    lines
}

/// Observable columns shared by the evolve and steady schemas.
const OBSERVABLE_COLUMNS: [&str; 16] = [
    "p_plus",
    "p_minus",
    "p_alpha",
    "p_beta",
    "p_g",
    "e_c",
    "e_s",
    "e_l",
    "e_c_passive",
    "e_s_passive",
    "e_l_passive",
    "ergotropy",
    "capacity",
    "flux",
    "work",
    "power",
];

fn observable_cells(
    state: &ringqb_core::dynamics::PopulationState,
    snap: &ThermoSnapshot,
) -> Vec<String> {
    let mut cells = vec![
        fmt_float(state.p_plus),
        fmt_float(state.p_minus),
        fmt_float(state.p_alpha),
        fmt_float(state.p_beta),
        fmt_float(state.p_g),
        fmt_float(snap.e_charging),
        fmt_float(snap.e_storage),
        fmt_float(snap.e_leakage),
        fmt_float(snap.e_charging_passive),
        fmt_float(snap.e_storage_passive),
        fmt_float(snap.e_leakage_passive),
        fmt_float(snap.ergotropy),
        fmt_float(snap.capacity),
        fmt_float(snap.flux),
    ];
    cells.push(snap.work.map(fmt_float).unwrap_or_default());
    cells.push(snap.power.map(fmt_float).unwrap_or_default());
    cells
}

/// The `hybridize` dataset: one row per configured ring size at the base
/// coupling.
pub fn hybridize_csv(cfg: &BatteryConfig) -> Result<String> {
    let mut out = metadata_header("hybridize", cfg, &[]);
    out.push_str("n_ring,e_plus,e_minus,gamma_plus_over_gamma,gamma_minus_over_gamma\n");
    let gamma = cfg.ring.gamma_pair;
    for &n_ring in &cfg.sweep.n_ring_values {
        let params = RingParams {
            n_ring,
            ..cfg.ring.clone()
        };
        let (h, _, _) = hybridize_ring(&params)?;
        let over = |w: f64| {
            if gamma == 0.0 {
                f64::NAN
            } else {
                w / gamma
            }
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            n_ring,
            fmt_float(h.e_plus),
            fmt_float(h.e_minus),
            fmt_float(over(h.gamma_plus)),
            fmt_float(over(h.gamma_minus)),
        ));
    }
    Ok(out)
}

/// The `evolve` dataset: populations, sector energies, passive counterparts,
/// ergotropy, capacity, flux, work, power, and passive-ordering epoch index
/// per grid point.
pub fn evolve_csv(cfg: &BatteryConfig) -> Result<String> {
    let point = cfg.assemble_base()?;
    let initial = cfg.dynamics.initial.resolve()?;
    let grid = cfg.dynamics.time_grid();
    let traj = evolve(&point.generator, &initial, &grid, point.gamma_plus_eff)?;
    let (epochs, indices) = if traj.len() >= 2 {
        let epochs = ordering_epochs(&traj, &point.energies)?;
        let indices = epoch_indices(&traj, &epochs);
        (epochs, indices)
    } else {
        (Vec::new(), vec![0; traj.len()])
    };

    let mut extra = point_metadata(&point);
    for (i, epoch) in epochs.iter().enumerate() {
        extra.push(format!(
            "epoch {i}: [{:.4}, {:.4}] {}",
            epoch.start, epoch.end, epoch.ordering
        ));
    }
    let mut out = metadata_header("evolve", cfg, &extra);
    out.push_str("t_gamma_plus,");
    out.push_str(&OBSERVABLE_COLUMNS.join(","));
    out.push_str(",epoch_index\n");
    for (i, &t) in traj.times.iter().enumerate() {
        let snap = snapshot(
            &traj.states[i],
            &point.energies,
            &point.branching,
            &cfg.reservoirs,
            t,
        );
        let mut row = vec![fmt_float(t)];
        row.extend(observable_cells(&traj.states[i], &snap));
        row.push(indices[i].to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// The `steady` dataset: one row of the evolve observables at the unique
/// steady state.
pub fn steady_csv(cfg: &BatteryConfig) -> Result<String> {
    let point = cfg.assemble_base()?;
    let ss = steady_state(&point.generator)?;
    let snap = snapshot(
        &ss,
        &point.energies,
        &point.branching,
        &cfg.reservoirs,
        f64::NAN,
    );
    let mut out = metadata_header("steady", cfg, &point_metadata(&point));
    out.push_str(&OBSERVABLE_COLUMNS.join(","));
    out.push('\n');
    out.push_str(&observable_cells(&ss, &snap).join(","));
    out.push('\n');
    Ok(out)
}

/// A figure dataset as CSV.
pub fn sweep_csv(cfg: &BatteryConfig, figure: Figure, jobs: usize) -> Result<String> {
    let spec = SweepSpec::from_config(cfg.clone(), figure);
    let result = run_sweep(&spec, jobs)?;
    Ok(sweep_result_to_csv(&result, cfg))
}

fn sweep_result_to_csv(result: &SweepResult, cfg: &BatteryConfig) -> String {
    let mut out = metadata_header(
        &format!("sweep {}", result.figure.name()),
        cfg,
        &result
            .warnings
            .iter()
            .map(|w| format!("warning: {w}"))
            .collect::<Vec<_>>(),
    );
    out.push_str(&result.columns.join(","));
    out.push('\n');
    for row in &result.rows {
        let rendered: Vec<String> = row.cells.iter().map(render_cell).collect();
        out.push_str(&rendered.join(","));
        out.push('\n');
    }
    out
}

/// A small gnuplot script for the dataset just written.
pub fn plot_script(subcommand: &Subcommand, csv_path: &Path) -> String {
    let csv = csv_path.display();
    let mut s = String::new();
    s.push_str("# gnuplot script\n");
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set datafile commentschars \"#\"\n");
    s.push_str("set key outside\n");
    match subcommand {
        Subcommand::Hybridize => {
            s.push_str("set xlabel \"n_ring\"\n");
            s.push_str("set ylabel \"gamma / gamma_pair\"\n");
            s.push_str(&format!(
                "plot \"{csv}\" every ::1 using 1:4 with linespoints title \"bright\", \\\n     \"{csv}\" every ::1 using 1:5 with linespoints title \"dark\"\n"
            ));
        }
        Subcommand::Evolve => {
            s.push_str("set xlabel \"t * gamma_plus\"\n");
            s.push_str("set ylabel \"population\"\n");
            s.push_str(&format!(
                "plot \"{csv}\" every ::1 using 1:2 with lines title \"p_plus\", \\\n     \"{csv}\" every ::1 using 1:3 with lines title \"p_minus\", \\\n     \"{csv}\" every ::1 using 1:4 with lines title \"p_alpha\", \\\n     \"{csv}\" every ::1 using 1:5 with lines title \"p_beta\", \\\n     \"{csv}\" every ::1 using 1:6 with lines title \"p_g\"\n"
            ));
        }
        Subcommand::Steady => {
            s.push_str(&format!(
                "# single steady-state row; inspect {csv} directly\n"
            ));
        }
        Subcommand::Sweep { figure } => match figure {
            Figure::Fig2Decay => {
                s.push_str("set xlabel \"n_ring\"\n");
                s.push_str(&format!(
                    "plot \"{csv}\" every ::1 using 1:7 with linespoints title \"gamma_plus/gamma\", \\\n     \"{csv}\" every ::1 using 1:8 with linespoints title \"gamma_minus/gamma\"\n"
                ));
            }
            Figure::Fig3Ratios => {
                s.push_str("set xlabel \"t * gamma_plus\"\n");
                s.push_str(&format!(
                    "plot \"<grep '^time,' {csv}\" using 4:5 with lines title \"storage/charging\", \\\n     \"<grep '^time,' {csv}\" using 4:6 with lines title \"leakage/storage\"\n"
                ));
            }
            Figure::Fig4Observables => {
                s.push_str("set xlabel \"n_ring\"\n");
                s.push_str(&format!(
                    "plot \"{csv}\" every ::1 using 1:8 with linespoints title \"ergotropy_rel\", \\\n     \"{csv}\" every ::1 using 1:9 with linespoints title \"work_rel\", \\\n     \"{csv}\" every ::1 using 1:10 with linespoints title \"flux_rel\", \\\n     \"{csv}\" every ::1 using 1:11 with linespoints title \"power_rel\", \\\n     \"{csv}\" every ::1 using 1:12 with linespoints title \"capacity_rel\"\n"
                ));
            }
            Figure::Fig5Contours => {
                s.push_str("set xlabel \"n_ring\"\nset ylabel \"j_d\"\n");
                s.push_str("set view map\n");
                s.push_str(&format!(
                    "splot \"{csv}\" every ::1 using 1:2:13 with points palette title \"capacity_rel\"\n"
                ));
            }
        },
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Execute one invocation end to end: load config, compute, write the CSV
/// (and optionally the plot script).
pub fn run(invocation: &Invocation) -> Result<()> {
    let cfg = load_config(invocation.config_path.as_deref())?;
    let csv = match &invocation.subcommand {
        Subcommand::Hybridize => hybridize_csv(&cfg)?,
        Subcommand::Evolve => evolve_csv(&cfg)?,
        Subcommand::Steady => steady_csv(&cfg)?,
        Subcommand::Sweep { figure } => sweep_csv(&cfg, *figure, invocation.jobs)?,
    };
    write_file(&invocation.out_path, &csv)?;
    if invocation.plot_script {
        let script_path = invocation.out_path.with_extension("gp");
        let script = plot_script(&invocation.subcommand, &invocation.out_path);
        write_file(&script_path, &script)?;
    }
    Ok(())
}
