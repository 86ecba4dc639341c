//! Configuration ingestion: section-scoped key=value files, defaults with
//! provenance flags, the resolved-config echo, and assembly of a full
//! battery pipeline point (hybridization -> widths -> ladder -> branching ->
//! generator).
//!
//! Defaults carry one of three source flags so that generated datasets are
//! never mistaken for reference-exact reproductions:
//! `file` (set by the user), `default-reference` (the established parameter
//! set of the modeled system), `default-calibration` (this implementation's
//! documented choice).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::dynamics::PopulationState;
use crate::error::{Error, Result};
use crate::levels::{
    build_branching, build_liouvillian, BranchingTable, LevelEnergies, RateMatrix, Reservoirs,
};
use crate::ring::{
    hybridize_ring, CollectiveMode, DiagonalConvention, Gamma0Rule, HybridizedStates,
    ResolvedGamma0, RingParams,
};

/// Minimum gap enforced between eps_alpha and the auto-derived eps_minus.
pub const MIN_LADDER_GAP: f64 = 0.1;

/// Where a resolved configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSource {
    File,
    /// Default from the reference parameter set of the modeled system.
    ReferenceDefault,
    /// Default chosen by this implementation; flagged in output metadata.
    CalibrationDefault,
}

impl ValueSource {
    pub fn label(self) -> &'static str {
        match self {
            ValueSource::File => "file",
            ValueSource::ReferenceDefault => "default-reference",
            ValueSource::CalibrationDefault => "default-calibration",
        }
    }
}

/// One line of the resolved-config echo.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedEntry {
    pub section: &'static str,
    pub key: &'static str,
    pub value: String,
    pub source: ValueSource,
}

/// The full resolved configuration: every effective value with its source,
/// plus a deterministic hash over the values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub entries: Vec<ResolvedEntry>,
    pub hash: u64,
}

impl ResolvedConfig {
    /// Keys resolved from calibration defaults (not reference values).
    pub fn calibration_keys(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.source == ValueSource::CalibrationDefault)
            .map(|e| format!("{}.{}", e.section, e.key))
            .collect()
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash)
    }
}

impl fmt::Display for ResolvedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut section = "";
        for e in &self.entries {
            if e.section != section {
                section = e.section;
                writeln!(f, "[{section}]")?;
            }
            writeln!(f, "{} = {} ({})", e.key, e.value, e.source.label())?;
        }
        Ok(())
    }
}

/// Initial condition for time evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Ground,
    Uniform,
    /// Explicit populations in basis order (+, -, alpha, beta, g).
    Explicit([f64; 5]),
}

impl InitialState {
    pub fn resolve(&self) -> Result<PopulationState> {
        match self {
            InitialState::Ground => Ok(PopulationState::ground()),
            InitialState::Uniform => Ok(PopulationState::uniform()),
            InitialState::Explicit(p) => PopulationState::new(p[0], p[1], p[2], p[3], p[4]),
        }
    }

    fn render(&self) -> String {
        match self {
            InitialState::Ground => "ground".into(),
            InitialState::Uniform => "uniform".into(),
            InitialState::Explicit(p) => p
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Energy-ladder configuration. The two hybridized levels may be pinned
/// explicitly; otherwise they inherit the hybridized splitting through an
/// offset chosen so that eps_minus sits `MIN_LADDER_GAP` above eps_alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub eps_beta: f64,
    pub eps_alpha: f64,
    pub eps_minus: Option<f64>,
    pub eps_plus: Option<f64>,
}

/// Time-evolution options.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    /// End of the dimensionless grid, t·Γ+.
    pub t_max: f64,
    /// Number of grid points including t = 0.
    pub n_points: usize,
    pub initial: InitialState,
}

impl DynamicsConfig {
    pub fn time_grid(&self) -> Vec<f64> {
        if self.n_points <= 1 {
            return vec![0.0];
        }
        let step = self.t_max / (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| i as f64 * step).collect()
    }
}

/// Sweep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub n_ring_values: Vec<u32>,
    pub j_d_values: Vec<f64>,
    pub baseline_n_ring: u32,
}

/// Fully resolved battery configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    pub ring: RingParams,
    pub energies: EnergyConfig,
    pub reservoirs: Reservoirs,
    pub gamma_ref: f64,
    pub gamma_beta_g: f64,
    pub dynamics: DynamicsConfig,
    pub sweep: SweepAxes,
    pub provenance: ResolvedConfig,
}

/// One fully assembled sweep point: all intermediate physics products plus
/// the generator.
#[derive(Debug, Clone)]
pub struct BatteryPoint {
    pub n_ring: u32,
    pub j_d: f64,
    pub mode: CollectiveMode,
    pub hybrid: HybridizedStates,
    pub gamma0: ResolvedGamma0,
    /// Width fed to the branching table for the bright state.
    pub gamma_plus_eff: f64,
    /// Width fed to the branching table for the dark state.
    pub gamma_minus_eff: f64,
    /// True when the raw hybridized widths were negative and the magnitude
    /// policy flipped their sign.
    pub width_sign_flipped: bool,
    pub energies: LevelEnergies,
    pub branching: BranchingTable,
    pub generator: RateMatrix,
}

impl BatteryConfig {
    /// Assemble the pipeline for one (n_ring, j_d) point, overriding the ring
    /// geometry and coupling from the base configuration.
    pub fn assemble(&self, n_ring: u32, j_d: f64) -> Result<BatteryPoint> {
        let ring = RingParams {
            n_ring,
            j_d,
            ..self.ring.clone()
        };
        let (hybrid, mode, gamma0) = hybridize_ring(&ring)?;
        // Under the magnitude rule the hybridized widths are sanitized to
        // magnitudes as well; the collective width of the literal diagonal
        // conventions is negative, which would otherwise poison every
        // downstream rate. The signed and explicit rules pass raw widths
        // through and surface negative-rate errors instead.
        let (gamma_plus_eff, gamma_minus_eff, width_sign_flipped) = match ring.gamma0_rule {
            Gamma0Rule::HalfCollectiveMagnitude => hybrid.magnitude_widths(),
            _ => (hybrid.gamma_plus, hybrid.gamma_minus, false),
        };
        let energies = self.resolve_energies(&hybrid)?;
        let branching = build_branching(
            gamma_plus_eff,
            gamma_minus_eff,
            self.gamma_ref,
            self.gamma_beta_g,
        )?;
        let generator = build_liouvillian(&energies, &branching, &self.reservoirs)?;
        Ok(BatteryPoint {
            n_ring,
            j_d,
            mode,
            hybrid,
            gamma0,
            gamma_plus_eff,
            gamma_minus_eff,
            width_sign_flipped,
            energies,
            branching,
            generator,
        })
    }

    /// Assemble at the base configuration's own n_ring and j_d.
    pub fn assemble_base(&self) -> Result<BatteryPoint> {
        self.assemble(self.ring.n_ring, self.ring.j_d)
    }

    /// Level energies for one hybridized pair. The hybridized splitting fixes
    /// only the difference E+ - E-, so an offset anchors eps_minus either at
    /// its explicit value or at eps_alpha + MIN_LADDER_GAP.
    fn resolve_energies(&self, hybrid: &HybridizedStates) -> Result<LevelEnergies> {
        let eps_minus = self
            .energies
            .eps_minus
            .unwrap_or(self.energies.eps_alpha + MIN_LADDER_GAP);
        // anchor the upper level by the hybridized splitting when not pinned
        let eps_plus = self
            .energies
            .eps_plus
            .unwrap_or(eps_minus + (hybrid.e_plus - hybrid.e_minus));
        LevelEnergies::new(
            0.0,
            self.energies.eps_beta,
            self.energies.eps_alpha,
            eps_minus,
            eps_plus,
        )
    }
}

// ---------------------------------------------------------------------------
// defaults and resolution

struct Pending {
    raw: BTreeMap<(String, String), String>,
    entries: Vec<ResolvedEntry>,
}

impl Pending {
    fn take(&mut self, section: &'static str, key: &'static str) -> Option<String> {
        self.raw.remove(&(section.to_string(), key.to_string()))
    }

    fn record(
        &mut self,
        section: &'static str,
        key: &'static str,
        value: String,
        source: ValueSource,
    ) {
        self.entries.push(ResolvedEntry {
            section,
            key,
            value,
            source,
        });
    }

    /// Resolve one f64 key against a default.
    fn float(
        &mut self,
        section: &'static str,
        key: &'static str,
        default: f64,
        default_source: ValueSource,
    ) -> Result<f64> {
        match self.take(section, key) {
            Some(text) => {
                let v = parse_float(section, key, &text)?;
                self.record(section, key, v.to_string(), ValueSource::File);
                Ok(v)
            }
            None => {
                self.record(section, key, default.to_string(), default_source);
                Ok(default)
            }
        }
    }
}

fn config_err(section: &str, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        section: section.to_string(),
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_float(section: &str, key: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| config_err(section, key, format!("expected a number, got '{text}'")))
}

fn parse_u32(section: &str, key: &str, text: &str) -> Result<u32> {
    text.trim().parse::<u32>().map_err(|_| {
        config_err(
            section,
            key,
            format!("expected a positive integer, got '{text}'"),
        )
    })
}

fn parse_usize(section: &str, key: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| config_err(section, key, format!("expected a count, got '{text}'")))
}

/// Integer list: "3,4,7" or inclusive range "3..30".
fn parse_u32_list(section: &str, key: &str, text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = parse_u32(section, key, lo)?;
        let hi = parse_u32(section, key, hi)?;
        if hi < lo {
            return Err(config_err(section, key, format!("empty range {lo}..{hi}")));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|part| parse_u32(section, key, part))
        .collect()
}

/// Float list: "1,2,4" or "start:stop:step" (inclusive, positive step).
fn parse_f64_list(section: &str, key: &str, text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let colon_parts: Vec<&str> = text.split(':').collect();
    if colon_parts.len() == 3 {
        let start = parse_float(section, key, colon_parts[0])?;
        let stop = parse_float(section, key, colon_parts[1])?;
        let step = parse_float(section, key, colon_parts[2])?;
        if step <= 0.0 || !step.is_finite() || stop < start {
            return Err(config_err(
                section,
                key,
                "range needs stop >= start and step > 0",
            ));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    text.split(',')
        .map(|part| parse_float(section, key, part))
        .collect()
}

/// Parse a configuration file. An empty or missing body yields the full
/// default configuration; unknown sections, unknown keys, duplicate keys, and
/// invariant violations are load errors naming the offending entry.
pub fn parse_config(path: &Path) -> Result<BatteryConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        config_err(
            "io",
            path.to_string_lossy().as_ref(),
            format!("cannot read: {e}"),
        )
    })?;
    parse_config_str(&text)
}

/// Parse configuration text (see [`parse_config`]).
pub fn parse_config_str(text: &str) -> Result<BatteryConfig> {
    const SECTIONS: [&str; 6] = [
        "ring",
        "energies",
        "reservoirs",
        "branching",
        "dynamics",
        "sweep",
    ];
    let mut raw: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut section = String::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(config_err(
                    name,
                    "",
                    format!("unknown section on line {}", line_no + 1),
                ));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(
                &section,
                line,
                format!("expected key = value on line {}", line_no + 1),
            ));
        };
        if section.is_empty() {
            return Err(config_err("", key.trim(), "key before any [section]"));
        }
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if raw.insert((section.clone(), key.clone()), value).is_some() {
            return Err(config_err(&section, &key, "duplicate key"));
        }
    }
    resolve(raw)
}

fn resolve(raw: BTreeMap<(String, String), String>) -> Result<BatteryConfig> {
    let mut p = Pending {
        raw,
        entries: Vec::new(),
    };
    use ValueSource::{CalibrationDefault, ReferenceDefault};

    // [ring]
    let n_ring = match p.take("ring", "n_ring") {
        Some(text) => {
            let v = parse_u32("ring", "n_ring", &text)?;
            p.record("ring", "n_ring", v.to_string(), ValueSource::File);
            v
        }
        None => {
            p.record("ring", "n_ring", "6".into(), CalibrationDefault);
            6
        }
    };
    let omega_pair = p.float("ring", "omega_pair", 0.5, ReferenceDefault)?;
    let gamma_pair = p.float("ring", "gamma_pair", 0.8, ReferenceDefault)?;
    let delta = p.float("ring", "delta", 0.5, ReferenceDefault)?;
    let j_d = p.float("ring", "j_d", 2.0, ReferenceDefault)?;
    let gamma_d = p.float("ring", "gamma_d", 0.0002, ReferenceDefault)?;
    let gamma0_rule_text = match p.take("ring", "gamma0_rule") {
        Some(text) => {
            p.record("ring", "gamma0_rule", text.clone(), ValueSource::File);
            text
        }
        None => {
            let text = "half_collective_magnitude".to_string();
            p.record("ring", "gamma0_rule", text.clone(), CalibrationDefault);
            text
        }
    };
    let gamma0_value = p.take("ring", "gamma0_value");
    let gamma0_rule = match gamma0_rule_text.as_str() {
        "half_collective_magnitude" => {
            if gamma0_value.is_some() {
                return Err(config_err(
                    "ring",
                    "gamma0_value",
                    "only valid with gamma0_rule = explicit",
                ));
            }
            Gamma0Rule::HalfCollectiveMagnitude
        }
        "half_collective_signed" => {
            if gamma0_value.is_some() {
                return Err(config_err(
                    "ring",
                    "gamma0_value",
                    "only valid with gamma0_rule = explicit",
                ));
            }
            Gamma0Rule::HalfCollectiveSigned
        }
        "explicit" => {
            let text = gamma0_value.ok_or_else(|| {
                config_err(
                    "ring",
                    "gamma0_value",
                    "required when gamma0_rule = explicit",
                )
            })?;
            let v = parse_float("ring", "gamma0_value", &text)?;
            p.record("ring", "gamma0_value", v.to_string(), ValueSource::File);
            Gamma0Rule::Explicit(v)
        }
        other => {
            return Err(config_err(
                "ring",
                "gamma0_rule",
                format!(
                    "unknown rule '{other}'; expected explicit, half_collective_magnitude, \
                     or half_collective_signed"
                ),
            ))
        }
    };
    let diagonal_convention = match p.take("ring", "diagonal_convention") {
        Some(text) => {
            let v = match text.as_str() {
                "exclude_diagonal" => DiagonalConvention::ExcludeDiagonal,
                "include_uniform_diagonal" => DiagonalConvention::IncludeUniformDiagonal,
                "self_decay_diagonal" => DiagonalConvention::SelfDecayDiagonal,
                other => {
                    return Err(config_err(
                        "ring",
                        "diagonal_convention",
                        format!("unknown convention '{other}'"),
                    ))
                }
            };
            p.record("ring", "diagonal_convention", text, ValueSource::File);
            v
        }
        None => {
            p.record(
                "ring",
                "diagonal_convention",
                "exclude_diagonal".into(),
                CalibrationDefault,
            );
            DiagonalConvention::ExcludeDiagonal
        }
    };
    let ring = RingParams {
        n_ring,
        omega_pair,
        gamma_pair,
        delta,
        j_d,
        gamma_d,
        gamma0_rule,
        diagonal_convention,
    };
    ring.validate()?;

    // [energies]
    let eps_beta = p.float("energies", "eps_beta", 2.0, CalibrationDefault)?;
    let eps_alpha = p.float("energies", "eps_alpha", 5.0, CalibrationDefault)?;
    let eps_minus = match p.take("energies", "eps_minus") {
        Some(text) => {
            let v = parse_float("energies", "eps_minus", &text)?;
            p.record("energies", "eps_minus", v.to_string(), ValueSource::File);
            Some(v)
        }
        None => {
            p.record("energies", "eps_minus", "auto".into(), CalibrationDefault);
            None
        }
    };
    let eps_plus = match p.take("energies", "eps_plus") {
        Some(text) => {
            let v = parse_float("energies", "eps_plus", &text)?;
            p.record("energies", "eps_plus", v.to_string(), ValueSource::File);
            Some(v)
        }
        None => {
            p.record("energies", "eps_plus", "auto".into(), CalibrationDefault);
            None
        }
    };
    if !(0.0 < eps_beta && eps_beta < eps_alpha) {
        return Err(config_err(
            "energies",
            "eps_beta",
            format!("ladder requires 0 < eps_beta < eps_alpha, got {eps_beta} and {eps_alpha}"),
        ));
    }
    let energies = EnergyConfig {
        eps_beta,
        eps_alpha,
        eps_minus,
        eps_plus,
    };

    // [reservoirs]
    let t_c = p.float("reservoirs", "t_c", 9.0, CalibrationDefault)?;
    let t_w = p.float("reservoirs", "t_w", 0.5, CalibrationDefault)?;
    let omega_w = p.float("reservoirs", "omega_w", 3.0, CalibrationDefault)?;
    let flux_unit_e = p.float("reservoirs", "flux_unit_e", 1.0, CalibrationDefault)?;
    let reservoirs = Reservoirs {
        t_c,
        t_w,
        omega_w,
        flux_unit_e,
    };
    reservoirs
        .validate()
        .map_err(|e| config_err("reservoirs", "t_c/t_w", e.to_string()))?;

    // [branching]
    let gamma_ref = p.float("branching", "gamma_ref", 1.0e-6, ReferenceDefault)?;
    let gamma_beta_g = p.float("branching", "gamma_beta_g", 0.5, ReferenceDefault)?;
    if !gamma_ref.is_finite() || gamma_ref < 0.0 {
        return Err(config_err("branching", "gamma_ref", "must be >= 0"));
    }
    if !gamma_beta_g.is_finite() || gamma_beta_g < 0.0 {
        return Err(config_err("branching", "gamma_beta_g", "must be >= 0"));
    }

    // [dynamics]
    let t_max = p.float("dynamics", "t_max", 10.0, CalibrationDefault)?;
    let n_points = match p.take("dynamics", "n_points") {
        Some(text) => {
            let v = parse_usize("dynamics", "n_points", &text)?;
            p.record("dynamics", "n_points", v.to_string(), ValueSource::File);
            v
        }
        None => {
            p.record("dynamics", "n_points", "501".into(), CalibrationDefault);
            501
        }
    };
    if n_points == 0 {
        return Err(config_err("dynamics", "n_points", "must be >= 1"));
    }
    if n_points > 1 && (!t_max.is_finite() || t_max <= 0.0) {
        return Err(config_err(
            "dynamics",
            "t_max",
            "must be > 0 for a multi-point grid",
        ));
    }
    let initial = match p.take("dynamics", "initial_state") {
        Some(text) => {
            let state = match text.as_str() {
                "ground" => InitialState::Ground,
                "uniform" => InitialState::Uniform,
                list => {
                    let parts: Vec<&str> = list.split(',').collect();
                    if parts.len() != 5 {
                        return Err(config_err(
                            "dynamics",
                            "initial_state",
                            "expected ground, uniform, or five comma-separated populations \
                             (p_plus,p_minus,p_alpha,p_beta,p_g)",
                        ));
                    }
                    let mut pops = [0.0; 5];
                    for (slot, part) in pops.iter_mut().zip(parts) {
                        *slot = parse_float("dynamics", "initial_state", part)?;
                    }
                    InitialState::Explicit(pops)
                }
            };
            state
                .resolve()
                .map_err(|e| config_err("dynamics", "initial_state", e.to_string()))?;
            p.record(
                "dynamics",
                "initial_state",
                state.render(),
                ValueSource::File,
            );
            state
        }
        None => {
            p.record(
                "dynamics",
                "initial_state",
                "ground".into(),
                CalibrationDefault,
            );
            InitialState::Ground
        }
    };
    let dynamics = DynamicsConfig {
        t_max,
        n_points,
        initial,
    };

    // [sweep]
    let n_ring_values = match p.take("sweep", "n_ring_values") {
        Some(text) => {
            let v = parse_u32_list("sweep", "n_ring_values", &text)?;
            p.record(
                "sweep",
                "n_ring_values",
                render_u32_list(&v),
                ValueSource::File,
            );
            v
        }
        None => {
            let v: Vec<u32> = (3..=30).collect();
            p.record("sweep", "n_ring_values", "3..30".into(), CalibrationDefault);
            v
        }
    };
    let j_d_values = match p.take("sweep", "j_d_values") {
        Some(text) => {
            let v = parse_f64_list("sweep", "j_d_values", &text)?;
            p.record(
                "sweep",
                "j_d_values",
                render_f64_list(&v),
                ValueSource::File,
            );
            v
        }
        None => {
            let v: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
            p.record(
                "sweep",
                "j_d_values",
                "0.5:10:0.5".into(),
                CalibrationDefault,
            );
            v
        }
    };
    let baseline_n_ring = match p.take("sweep", "baseline_n_ring") {
        Some(text) => {
            let v = parse_u32("sweep", "baseline_n_ring", &text)?;
            p.record("sweep", "baseline_n_ring", v.to_string(), ValueSource::File);
            v
        }
        None => {
            p.record("sweep", "baseline_n_ring", "3".into(), CalibrationDefault);
            3
        }
    };
    if n_ring_values.is_empty() {
        return Err(config_err("sweep", "n_ring_values", "must not be empty"));
    }
    if j_d_values.is_empty() {
        return Err(config_err("sweep", "j_d_values", "must not be empty"));
    }
    if n_ring_values.iter().any(|&n| n < 3) {
        return Err(config_err(
            "sweep",
            "n_ring_values",
            "every ring size must be >= 3",
        ));
    }
    let sweep = SweepAxes {
        n_ring_values,
        j_d_values,
        baseline_n_ring,
    };

    // anything left in the raw map is unknown
    if let Some(((section, key), _)) = p.raw.iter().next() {
        return Err(config_err(section, key, "unknown key"));
    }

    let hash = hash_entries(&p.entries);
    Ok(BatteryConfig {
        ring,
        energies,
        reservoirs,
        gamma_ref,
        gamma_beta_g,
        dynamics,
        sweep,
        provenance: ResolvedConfig {
            entries: p.entries,
            hash,
        },
    })
}

/// The all-defaults configuration.
pub fn default_config() -> BatteryConfig {
    parse_config_str("").expect("default configuration must resolve")
}

fn render_u32_list(values: &[u32]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn render_f64_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// FNV-1a over the canonical resolved entries; identical configurations hash
/// identically regardless of whether values came from the file or defaults.
fn hash_entries(entries: &[ResolvedEntry]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    for e in entries {
        eat(e.section.as_bytes());
        eat(b".");
        eat(e.key.as_bytes());
        eat(b"=");
        eat(e.value.as_bytes());
        eat(b"\n");
    }
    hash
}
