//! Thermodynamic observables: sector energies, passive and antipassive
//! reorderings, ergotropy, capacity, flux, work, power, and passive-ordering
//! epochs.
//!
//! A passive arrangement pairs descending populations with the ascending
//! energy ladder; nothing can be extracted from it by reordering. The
//! antipassive arrangement pairs ascending populations with ascending
//! energies and is the work-richest arrangement of the same spectrum, so
//!
//! ```text
//! <H(antipassive)> >= <H(rho)> >= <H(passive)>
//! capacity = <H->  - <H+>  >=  ergotropy = <H> - <H+>  >= 0
//! ```

use std::fmt;

use crate::dynamics::{evolve, PopulationState, Trajectory};
use crate::error::{Error, Result};
use crate::levels::{BranchingTable, Level, LevelEnergies, Reservoirs};

/// Populations below this are treated as undefined when a log-ratio is
/// required, rather than silently producing infinities.
const MIN_IMBALANCE_POPULATION: f64 = 1e-300;

/// Bisection tolerance for epoch boundaries, in units of t·Γ+.
const EPOCH_BOUNDARY_TOL: f64 = 1e-4;

/// Assignment of level populations to the energy-ascending ladder:
/// `slots[k]` is the level whose population occupies the k-th lowest energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderingPermutation {
    pub slots: [Level; 5],
}

impl OrderingPermutation {
    /// Populations stay attached to their own levels.
    pub fn identity() -> Self {
        OrderingPermutation {
            slots: Level::ENERGY_ASCENDING,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.slots == Level::ENERGY_ASCENDING
    }
}

impl fmt::Display for OrderingPermutation {
    /// Renders as the ordered diagonal, lowest energy slot first, e.g.
    /// `diag{rho_beta, rho_g, rho_alpha, rho_minus, rho_plus}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag{{")?;
        for (i, level) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "rho_{}", level.label())?;
        }
        write!(f, "}}")
    }
}

/// Energy sectors of the battery Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// {g, +, -}: levels touched by the charging reservoir.
    Charging,
    /// {+, -, alpha}: the retention manifold.
    Storage,
    /// {+, -, alpha, g}: everything that can shed energy to the environment.
    Leakage,
    /// All five levels.
    Full,
}

impl Sector {
    pub fn members(self) -> &'static [Level] {
        use Level::*;
        match self {
            Sector::Charging => &[Ground, Plus, Minus],
            Sector::Storage => &[Plus, Minus, Alpha],
            Sector::Leakage => &[Plus, Minus, Alpha, Ground],
            Sector::Full => &[Plus, Minus, Alpha, Beta, Ground],
        }
    }
}

/// Σ ε_i p_i over the sector members.
pub fn sector_energy(state: &PopulationState, energies: &LevelEnergies, sector: Sector) -> f64 {
    sector
        .members()
        .iter()
        .map(|&level| energies.energy(level) * state.get(level))
        .sum()
}

fn sorted_assignment(
    state: &PopulationState,
    incumbent: &OrderingPermutation,
    descending: bool,
) -> (PopulationState, OrderingPermutation) {
    // list source levels in the incumbent's slot order, then stable-sort by
    // population; exact ties keep the incumbent arrangement and cannot open a
    // spurious zero-length epoch
    let mut order = incumbent.slots;
    if descending {
        order.sort_by(|a, b| state.get(*b).partial_cmp(&state.get(*a)).unwrap());
    } else {
        order.sort_by(|a, b| state.get(*a).partial_cmp(&state.get(*b)).unwrap());
    }
    let mut reordered = [0.0; 5];
    for (slot, source) in order.iter().enumerate() {
        reordered[Level::ENERGY_ASCENDING[slot].index()] = state.get(*source);
    }
    (
        PopulationState {
            p_plus: reordered[Level::Plus.index()],
            p_minus: reordered[Level::Minus.index()],
            p_alpha: reordered[Level::Alpha.index()],
            p_beta: reordered[Level::Beta.index()],
            p_g: reordered[Level::Ground.index()],
        },
        OrderingPermutation { slots: order },
    )
}

/// Passive rearrangement: descending populations against ascending energies.
pub fn passive_populations(
    state: &PopulationState,
    _energies: &LevelEnergies,
) -> (PopulationState, OrderingPermutation) {
    sorted_assignment(state, &OrderingPermutation::identity(), true)
}

/// Passive rearrangement with tie-breaking seeded by a previous ordering.
pub fn passive_populations_with_incumbent(
    state: &PopulationState,
    incumbent: &OrderingPermutation,
) -> (PopulationState, OrderingPermutation) {
    sorted_assignment(state, incumbent, true)
}

/// Antipassive rearrangement: ascending populations against ascending
/// energies, the work-richest arrangement of the same populations.
pub fn antipassive_populations(
    state: &PopulationState,
    _energies: &LevelEnergies,
) -> (PopulationState, OrderingPermutation) {
    sorted_assignment(state, &OrderingPermutation::identity(), false)
}

/// Maximum unitarily extractable work: `<H> - <H(passive)>`.
pub fn ergotropy(state: &PopulationState, energies: &LevelEnergies) -> f64 {
    let (passive, _) = passive_populations(state, energies);
    sector_energy(state, energies, Sector::Full) - sector_energy(&passive, energies, Sector::Full)
}

/// Reversible energy span of the population spectrum:
/// `<H(antipassive)> - <H(passive)>`.
pub fn capacity(state: &PopulationState, energies: &LevelEnergies) -> f64 {
    let (passive, _) = passive_populations(state, energies);
    let (antipassive, _) = antipassive_populations(state, energies);
    sector_energy(&antipassive, energies, Sector::Full)
        - sector_energy(&passive, energies, Sector::Full)
}

/// Net transfer rate through the work mode: j = e · Γ_{αβ} · p_α.
pub fn flux(state: &PopulationState, branching: &BranchingTable, flux_unit_e: f64) -> f64 {
    flux_unit_e * branching.gam_alpha_beta * state.p_alpha
}

/// Population imbalance ζ = p_α / p_β driving the work mode.
pub fn imbalance(state: &PopulationState) -> Result<f64> {
    if state.p_alpha < MIN_IMBALANCE_POPULATION || state.p_beta < MIN_IMBALANCE_POPULATION {
        return Err(Error::UndefinedImbalance {
            reason: format!(
                "p_alpha = {}, p_beta = {}; ratio undefined",
                state.p_alpha, state.p_beta
            ),
        });
    }
    Ok(state.p_alpha / state.p_beta)
}

/// Work done per work-mode transition: W = (ε_α - ε_β) + T_w ln ζ, k_B = 1.
pub fn work_per_transition(
    state: &PopulationState,
    energies: &LevelEnergies,
    t_w: f64,
) -> Result<f64> {
    let zeta = imbalance(state)?;
    Ok((energies.eps_alpha - energies.eps_beta) + t_w * zeta.ln())
}

/// Output power P = j · W; positive when the battery supplies work (ζ > 1
/// side), negative when energy flows back in aid of storage.
pub fn power(
    state: &PopulationState,
    energies: &LevelEnergies,
    branching: &BranchingTable,
    reservoirs: &Reservoirs,
) -> Result<f64> {
    let j = flux(state, branching, reservoirs.flux_unit_e);
    let w = work_per_transition(state, energies, reservoirs.t_w)?;
    Ok(j * w)
}

/// Every thermodynamic observable at one instant. The work-mode quantities
/// are `None` while either work-mode population is still empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoSnapshot {
    /// Dimensionless time t·Γ+.
    pub time: f64,
    pub e_charging: f64,
    pub e_storage: f64,
    pub e_leakage: f64,
    pub e_charging_passive: f64,
    pub e_storage_passive: f64,
    pub e_leakage_passive: f64,
    pub ergotropy: f64,
    pub capacity: f64,
    pub flux: f64,
    pub zeta: Option<f64>,
    pub work: Option<f64>,
    pub power: Option<f64>,
}

/// Evaluate the full observable set for one state.
pub fn snapshot(
    state: &PopulationState,
    energies: &LevelEnergies,
    branching: &BranchingTable,
    reservoirs: &Reservoirs,
    time: f64,
) -> ThermoSnapshot {
    let (passive, _) = passive_populations(state, energies);
    let zeta = imbalance(state).ok();
    let work = work_per_transition(state, energies, reservoirs.t_w).ok();
    let j = flux(state, branching, reservoirs.flux_unit_e);
    ThermoSnapshot {
        time,
        e_charging: sector_energy(state, energies, Sector::Charging),
        e_storage: sector_energy(state, energies, Sector::Storage),
        e_leakage: sector_energy(state, energies, Sector::Leakage),
        e_charging_passive: sector_energy(&passive, energies, Sector::Charging),
        e_storage_passive: sector_energy(&passive, energies, Sector::Storage),
        e_leakage_passive: sector_energy(&passive, energies, Sector::Leakage),
        ergotropy: ergotropy(state, energies),
        capacity: capacity(state, energies),
        flux: j,
        zeta,
        work,
        power: work.map(|w| j * w),
    }
}

/// A maximal time interval over which the passive permutation is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    /// Start of the interval, t·Γ+.
    pub start: f64,
    /// End of the interval, t·Γ+.
    pub end: f64,
    pub ordering: OrderingPermutation,
}

/// Detect the passive-ordering epochs of a trajectory.
///
/// The passive permutation is computed at every grid point (tie-breaking
/// seeded by the previous point); runs of equal permutations merge into
/// epochs, and each boundary is refined by bisection on the population
/// crossing to 1e-4 in t·Γ+, re-integrating from the stored grid state.
pub fn ordering_epochs(traj: &Trajectory, energies: &LevelEnergies) -> Result<Vec<Epoch>> {
    if traj.len() < 2 {
        return Err(Error::InvalidTimeGrid {
            reason: "epoch detection needs at least two trajectory points".into(),
        });
    }
    energies.validate()?;

    let mut perms = Vec::with_capacity(traj.len());
    let mut incumbent = OrderingPermutation::identity();
    for state in &traj.states {
        let (_, perm) = passive_populations_with_incumbent(state, &incumbent);
        perms.push(perm);
        incumbent = perm;
    }

    let mut epochs: Vec<Epoch> = Vec::new();
    let mut epoch_start = traj.times[0];
    let mut current = perms[0];
    #[allow(clippy::needless_range_loop)]
    for k in 1..traj.len() {
        if perms[k] != current {
            let boundary = refine_boundary(traj, k - 1, &current)?;
            epochs.push(Epoch {
                start: epoch_start,
                end: boundary,
                ordering: current,
            });
            epoch_start = boundary;
            current = perms[k];
        }
    }
    epochs.push(Epoch {
        start: epoch_start,
        end: *traj.times.last().unwrap(),
        ordering: current,
    });
    Ok(epochs)
}

/// Bisect inside (times[k], times[k+1]) for the earliest time at which the
/// passive permutation leaves `before`.
fn refine_boundary(traj: &Trajectory, k: usize, before: &OrderingPermutation) -> Result<f64> {
    let t_lo = traj.times[k];
    let t_hi = traj.times[k + 1];
    let base = &traj.states[k];
    let mut lo = 0.0;
    let mut hi = t_hi - t_lo;
    while hi - lo > EPOCH_BOUNDARY_TOL {
        let mid = 0.5 * (lo + hi);
        let probe = evolve(&traj.generator, base, &[mid], traj.gamma_plus)?;
        let (_, perm) = passive_populations_with_incumbent(&probe.states[0], before);
        if perm == *before {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t_lo + 0.5 * (lo + hi))
}

/// Per-grid-point epoch index of a trajectory (0-based), for serialization.
pub fn epoch_indices(traj: &Trajectory, epochs: &[Epoch]) -> Vec<usize> {
    traj.times
        .iter()
        .map(|&t| {
            epochs
                .iter()
                .position(|e| t < e.end)
                .unwrap_or(epochs.len().saturating_sub(1))
        })
        .collect()
}
