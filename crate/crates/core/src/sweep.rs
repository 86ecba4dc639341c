//! Parameter sweeps over ring size, ring-center coupling, and time, emitting
//! the figure datasets with baseline normalization.
//!
//! Every sweep point owns its full pipeline state; a failed point becomes a
//! row-level error code instead of aborting the sweep. Rows are emitted in
//! deterministic lexicographic axis order regardless of worker count, and all
//! per-point arithmetic is self-contained, so serial and parallel runs
//! produce identical results.

use rayon::prelude::*;

use crate::config::BatteryConfig;
use crate::dynamics::{evolve, steady_state};
use crate::error::{Error, Result};
use crate::ring::{hybridize_ring, RingParams};
use crate::thermo::{snapshot, ThermoSnapshot};

/// Which figure dataset to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Hybridized energies and scaled decay widths vs ring size.
    Fig2Decay,
    /// The four sector-energy ratios vs time and their steady values.
    Fig3Ratios,
    /// Steady observables vs ring size, baseline-normalized.
    Fig4Observables,
    /// Steady observables over the (ring size, coupling) grid.
    Fig5Contours,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2Decay => "fig2",
            Figure::Fig3Ratios => "fig3",
            Figure::Fig4Observables => "fig4",
            Figure::Fig5Contours => "fig5",
        }
    }

    pub fn from_name(name: &str) -> Option<Figure> {
        match name {
            "fig2" => Some(Figure::Fig2Decay),
            "fig3" => Some(Figure::Fig3Ratios),
            "fig4" => Some(Figure::Fig4Observables),
            "fig5" => Some(Figure::Fig5Contours),
            _ => None,
        }
    }
}

/// A sweep request: base configuration plus the axes to scan.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: BatteryConfig,
    pub figure: Figure,
    pub n_ring_values: Vec<u32>,
    pub j_d_values: Vec<f64>,
    /// Dimensionless time grid for the time-resolved figure.
    pub time_grid: Vec<f64>,
    pub baseline_n_ring: u32,
}

impl SweepSpec {
    pub fn from_config(base: BatteryConfig, figure: Figure) -> Self {
        // the ring-size figures scan n_ring at the base coupling; the ratio
        // and contour figures scan the full coupling axis as well
        let j_d_values = match figure {
            Figure::Fig2Decay | Figure::Fig4Observables => vec![base.ring.j_d],
            Figure::Fig3Ratios | Figure::Fig5Contours => base.sweep.j_d_values.clone(),
        };
        SweepSpec {
            figure,
            n_ring_values: base.sweep.n_ring_values.clone(),
            j_d_values,
            time_grid: base.dynamics.time_grid(),
            baseline_n_ring: base.sweep.baseline_n_ring,
            base,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_ring_values.is_empty() || self.j_d_values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sweep axes",
                value: 0.0,
                constraint: "axis lists must be nonempty",
            });
        }
        if matches!(self.figure, Figure::Fig4Observables | Figure::Fig5Contours)
            && !self.n_ring_values.contains(&self.baseline_n_ring)
        {
            return Err(Error::MissingBaseline {
                axis: format!("n_ring = {} not in n_ring_values", self.baseline_n_ring),
            });
        }
        Ok(())
    }
}

/// One table cell. `Missing` marks undefined values (no infinities are ever
/// emitted).
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn from_opt(v: Option<f64>) -> Cell {
        match v {
            Some(x) => Cell::Num(x),
            None => Cell::Missing,
        }
    }
}

/// One labeled output row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Hash of the resolved configuration that produced the row.
    pub config_hash: u64,
    pub cells: Vec<Cell>,
    /// Per-point failure code; observable cells are missing when set.
    pub error: Option<String>,
}

/// The assembled sweep output.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub figure: Figure,
    pub columns: Vec<String>,
    /// Names of the axis columns (leading columns of every row).
    pub axis_columns: Vec<&'static str>,
    /// Names of the observable columns eligible for baseline normalization.
    pub observable_columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    pub provenance: crate::config::ResolvedConfig,
    pub warnings: Vec<String>,
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Ratio with a guard: undefined (0/0 or x/0) becomes NaN, never infinite.
fn guarded_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

fn map_points<T: Sync, R: Send>(
    items: &[T],
    jobs: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Result<Vec<R>> {
    if jobs <= 1 {
        Ok(items.iter().map(&f).collect())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Numeric {
                reason: format!("worker pool: {e}"),
            })?;
        Ok(pool.install(|| items.par_iter().map(&f).collect()))
    }
}

/// Run a sweep with `jobs` workers (1 = serial). Results are identical for
/// any worker count.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    spec.validate()?;
    let mut result = match spec.figure {
        Figure::Fig2Decay => sweep_fig2(spec, jobs)?,
        Figure::Fig3Ratios => sweep_fig3(spec, jobs)?,
        Figure::Fig4Observables | Figure::Fig5Contours => sweep_observables(spec, jobs)?,
    };
    let total = result.rows.len();
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    if failed == total && total > 0 {
        let first = result.rows[0].error.clone().unwrap_or_default();
        return Err(Error::SweepAllPointsFailed { first });
    }
    if matches!(spec.figure, Figure::Fig4Observables | Figure::Fig5Contours) {
        result = normalize_to_baseline(result, spec.baseline_n_ring)?;
    }
    Ok(result)
}

fn axis_grid(spec: &SweepSpec) -> Vec<(u32, f64)> {
    let mut points = Vec::with_capacity(spec.n_ring_values.len() * spec.j_d_values.len());
    for &n in &spec.n_ring_values {
        for &j in &spec.j_d_values {
            points.push((n, j));
        }
    }
    points
}

fn sweep_fig2(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let columns = [
        "n_ring",
        "j_d",
        "e_plus",
        "e_minus",
        "gamma_plus",
        "gamma_minus",
        "gamma_plus_over_gamma",
        "gamma_minus_over_gamma",
        "error",
    ];
    let hash = spec.base.provenance.hash;
    let gamma = spec.base.ring.gamma_pair;
    let points = axis_grid(spec);
    let rows = map_points(&points, jobs, |&(n_ring, j_d)| {
        let params = RingParams {
            n_ring,
            j_d,
            ..spec.base.ring.clone()
        };
        match hybridize_ring(&params) {
            Ok((h, _, _)) => SweepRow {
                config_hash: hash,
                cells: vec![
                    Cell::Int(n_ring as i64),
                    Cell::Num(j_d),
                    Cell::Num(h.e_plus),
                    Cell::Num(h.e_minus),
                    Cell::Num(h.gamma_plus),
                    Cell::Num(h.gamma_minus),
                    Cell::Num(guarded_ratio(h.gamma_plus, gamma)),
                    Cell::Num(guarded_ratio(h.gamma_minus, gamma)),
                    Cell::Missing,
                ],
                error: None,
            },
            Err(e) => error_row(
                hash,
                vec![Cell::Int(n_ring as i64), Cell::Num(j_d)],
                columns.len(),
                &e,
            ),
        }
    })?;
    Ok(SweepResult {
        figure: spec.figure,
        columns: columns.iter().map(|s| s.to_string()).collect(),
        axis_columns: vec!["n_ring", "j_d"],
        observable_columns: vec![],
        rows,
        provenance: spec.base.provenance.clone(),
        warnings: vec![],
    })
}

/// The four sector-energy ratios of one snapshot.
fn ratio_cells(snap: &ThermoSnapshot) -> Vec<Cell> {
    vec![
        Cell::Num(guarded_ratio(snap.e_storage, snap.e_charging)),
        Cell::Num(guarded_ratio(snap.e_leakage, snap.e_storage)),
        Cell::Num(guarded_ratio(
            snap.e_storage_passive,
            snap.e_charging_passive,
        )),
        Cell::Num(guarded_ratio(
            snap.e_leakage_passive,
            snap.e_storage_passive,
        )),
    ]
}

fn sweep_fig3(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let columns = [
        "series",
        "n_ring",
        "j_d",
        "t_gamma_plus",
        "ratio_storage_charging",
        "ratio_leakage_storage",
        "ratio_storage_charging_passive",
        "ratio_leakage_storage_passive",
        "error",
    ];
    let hash = spec.base.provenance.hash;
    let base_n = spec.base.ring.n_ring;
    let mut warn_flips = 0usize;

    // time-resolved block at the base ring size, one trajectory per coupling
    let time_blocks = map_points(&spec.j_d_values, jobs, |&j_d| {
        let mut rows = Vec::with_capacity(spec.time_grid.len());
        let outcome = spec.base.assemble(base_n, j_d).and_then(|point| {
            let initial = spec.base.dynamics.initial.resolve()?;
            let traj = evolve(
                &point.generator,
                &initial,
                &spec.time_grid,
                point.gamma_plus_eff,
            )?;
            Ok((point, traj))
        });
        match outcome {
            Ok((point, traj)) => {
                for (idx, &t) in traj.times.iter().enumerate() {
                    let snap = snapshot(
                        &traj.states[idx],
                        &point.energies,
                        &point.branching,
                        &spec.base.reservoirs,
                        t,
                    );
                    let mut cells = vec![
                        Cell::Text("time".into()),
                        Cell::Int(base_n as i64),
                        Cell::Num(j_d),
                        Cell::Num(t),
                    ];
                    cells.extend(ratio_cells(&snap));
                    cells.push(Cell::Missing);
                    rows.push(SweepRow {
                        config_hash: hash,
                        cells,
                        error: None,
                    });
                }
                (rows, point.width_sign_flipped)
            }
            Err(e) => {
                for &t in &spec.time_grid {
                    rows.push(error_row(
                        hash,
                        vec![
                            Cell::Text("time".into()),
                            Cell::Int(base_n as i64),
                            Cell::Num(j_d),
                            Cell::Num(t),
                        ],
                        columns.len(),
                        &e,
                    ));
                }
                (rows, false)
            }
        }
    })?;

    // steady block over the full (n_ring, j_d) grid
    let points = axis_grid(spec);
    let steady_rows = map_points(&points, jobs, |&(n_ring, j_d)| {
        let outcome = spec.base.assemble(n_ring, j_d).and_then(|point| {
            let ss = steady_state(&point.generator)?;
            Ok((point, ss))
        });
        match outcome {
            Ok((point, ss)) => {
                let snap = snapshot(
                    &ss,
                    &point.energies,
                    &point.branching,
                    &spec.base.reservoirs,
                    f64::NAN,
                );
                let mut cells = vec![
                    Cell::Text("steady".into()),
                    Cell::Int(n_ring as i64),
                    Cell::Num(j_d),
                    Cell::Missing,
                ];
                cells.extend(ratio_cells(&snap));
                cells.push(Cell::Missing);
                (
                    SweepRow {
                        config_hash: hash,
                        cells,
                        error: None,
                    },
                    point.width_sign_flipped,
                )
            }
            Err(e) => (
                error_row(
                    hash,
                    vec![
                        Cell::Text("steady".into()),
                        Cell::Int(n_ring as i64),
                        Cell::Num(j_d),
                        Cell::Missing,
                    ],
                    columns.len(),
                    &e,
                ),
                false,
            ),
        }
    })?;

    let mut rows = Vec::new();
    for (block, flipped) in time_blocks {
        if flipped {
            warn_flips += 1;
        }
        rows.extend(block);
    }
    for (row, flipped) in steady_rows {
        if flipped {
            warn_flips += 1;
        }
        rows.push(row);
    }
    let mut warnings = Vec::new();
    if warn_flips > 0 {
        warnings.push(format!(
            "hybridized widths were negative and sanitized by magnitude at {warn_flips} points"
        ));
    }
    Ok(SweepResult {
        figure: spec.figure,
        columns: columns.iter().map(|s| s.to_string()).collect(),
        axis_columns: vec!["series", "n_ring", "j_d", "t_gamma_plus"],
        observable_columns: vec![],
        rows,
        provenance: spec.base.provenance.clone(),
        warnings,
    })
}

fn sweep_observables(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let fig5 = spec.figure == Figure::Fig5Contours;
    let mut columns = vec![
        "n_ring".to_string(),
        "j_d".to_string(),
        "ergotropy".to_string(),
        "work".to_string(),
        "flux".to_string(),
        "power".to_string(),
        "capacity".to_string(),
    ];
    let mut observable_columns = vec!["ergotropy", "work", "flux", "power", "capacity"];
    if fig5 {
        columns.push("capacity_over_ergotropy".to_string());
        observable_columns.push("capacity_over_ergotropy");
    }
    columns.push("error".to_string());

    let hash = spec.base.provenance.hash;
    let points = axis_grid(spec);
    let computed = map_points(&points, jobs, |&(n_ring, j_d)| {
        let outcome = spec.base.assemble(n_ring, j_d).and_then(|point| {
            let ss = steady_state(&point.generator)?;
            Ok((point, ss))
        });
        match outcome {
            Ok((point, ss)) => {
                let snap = snapshot(
                    &ss,
                    &point.energies,
                    &point.branching,
                    &spec.base.reservoirs,
                    f64::NAN,
                );
                let mut cells = vec![
                    Cell::Int(n_ring as i64),
                    Cell::Num(j_d),
                    Cell::Num(snap.ergotropy),
                    Cell::from_opt(snap.work),
                    Cell::Num(snap.flux),
                    Cell::from_opt(snap.power),
                    Cell::Num(snap.capacity),
                ];
                if fig5 {
                    cells.push(Cell::Num(guarded_ratio(snap.capacity, snap.ergotropy)));
                }
                cells.push(Cell::Missing);
                (
                    SweepRow {
                        config_hash: hash,
                        cells,
                        error: None,
                    },
                    point.width_sign_flipped,
                )
            }
            Err(e) => (
                error_row(
                    hash,
                    vec![Cell::Int(n_ring as i64), Cell::Num(j_d)],
                    columns.len(),
                    &e,
                ),
                false,
            ),
        }
    })?;

    let mut rows = Vec::with_capacity(computed.len());
    let mut flips = 0usize;
    for (row, flipped) in computed {
        if flipped {
            flips += 1;
        }
        rows.push(row);
    }
    let mut warnings = Vec::new();
    if flips > 0 {
        warnings.push(format!(
            "hybridized widths were negative and sanitized by magnitude at {flips} points"
        ));
    }
    Ok(SweepResult {
        figure: spec.figure,
        columns,
        axis_columns: vec!["n_ring", "j_d"],
        observable_columns,
        rows,
        provenance: spec.base.provenance.clone(),
        warnings,
    })
}

/// Pad a failed point out to the full row width, with the error code in the
/// trailing column.
fn error_row(hash: u64, axis_cells: Vec<Cell>, total_columns: usize, e: &Error) -> SweepRow {
    let mut cells = axis_cells;
    while cells.len() + 1 < total_columns {
        cells.push(Cell::Missing);
    }
    cells.push(Cell::Text(e.code().to_string()));
    debug_assert_eq!(cells.len(), total_columns);
    SweepRow {
        config_hash: hash,
        cells,
        error: Some(e.code().to_string()),
    }
}

/// Append baseline-normalized columns: each observable divided by its value
/// at `baseline_n_ring` with all other axes fixed. Zero or missing baselines
/// mark the normalized cell as undefined rather than infinite; a structurally
/// absent baseline row is an error naming the axis combination.
pub fn normalize_to_baseline(result: SweepResult, baseline_n_ring: u32) -> Result<SweepResult> {
    let n_ring_idx = result
        .column_index("n_ring")
        .ok_or_else(|| Error::MissingBaseline {
            axis: "result has no n_ring axis".to_string(),
        })?;
    let error_idx = result
        .column_index("error")
        .expect("every sweep table has an error column");
    // group key: every axis column except n_ring, rendered to preserve bits
    let other_axis_indices: Vec<usize> = result
        .axis_columns
        .iter()
        .filter(|&&name| name != "n_ring")
        .map(|&name| result.column_index(name).unwrap())
        .collect();
    let group_key = |row: &SweepRow| -> String {
        other_axis_indices
            .iter()
            .map(|&i| match &row.cells[i] {
                Cell::Num(v) => format!("{:016x}", v.to_bits()),
                Cell::Int(v) => v.to_string(),
                Cell::Text(t) => t.clone(),
                Cell::Missing => "-".to_string(),
            })
            .collect::<Vec<_>>()
            .join("|")
    };

    let observable_indices: Vec<usize> = result
        .observable_columns
        .iter()
        .map(|&name| result.column_index(name).unwrap())
        .collect();

    // locate the baseline row of every group
    let mut baselines: std::collections::BTreeMap<String, usize> = Default::default();
    for (idx, row) in result.rows.iter().enumerate() {
        if row.cells[n_ring_idx] == Cell::Int(baseline_n_ring as i64) {
            baselines.insert(group_key(row), idx);
        }
    }

    let mut new_rows = Vec::with_capacity(result.rows.len());
    for row in &result.rows {
        let key = group_key(row);
        let baseline_idx = match baselines.get(&key) {
            Some(&i) => i,
            None => {
                return Err(Error::MissingBaseline {
                    axis: format!("group {key} has no n_ring = {baseline_n_ring} row"),
                })
            }
        };
        let baseline = &result.rows[baseline_idx];
        let mut cells = row.cells[..error_idx].to_vec();
        for &obs_idx in &observable_indices {
            let normalized = match (&row.cells[obs_idx], &baseline.cells[obs_idx]) {
                (Cell::Num(v), Cell::Num(b)) if *b != 0.0 => Cell::Num(v / b),
                _ => Cell::Missing,
            };
            cells.push(normalized);
        }
        cells.push(row.cells[error_idx].clone());
        new_rows.push(SweepRow {
            config_hash: row.config_hash,
            cells,
            error: row.error.clone(),
        });
    }

    let mut columns = result.columns[..error_idx].to_vec();
    for name in &result.observable_columns {
        columns.push(format!("{name}_rel"));
    }
    columns.push("error".to_string());

    Ok(SweepResult {
        columns,
        rows: new_rows,
        ..result
    })
}
