//! Five-level battery: energy ladder, branching table, thermal occupation
//! factors, and the 5x5 rate-matrix generator.
//!
//! Basis order is (+, -, alpha, beta, g); the energy ladder runs
//! g < beta < alpha < - < + with the ground energy pinned to zero. Every
//! generated matrix has zero column sums (probability conservation),
//! nonnegative off-diagonals, and nonpositive diagonals.

use crate::error::{Error, Result};

/// One of the five battery levels, in the population-vector basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Plus,
    Minus,
    Alpha,
    Beta,
    Ground,
}

impl Level {
    /// Basis order of the population vector (rho_+, rho_-, rho_a, rho_b, rho_g).
    pub const BASIS: [Level; 5] = [
        Level::Plus,
        Level::Minus,
        Level::Alpha,
        Level::Beta,
        Level::Ground,
    ];

    /// The same five levels sorted by ascending energy.
    pub const ENERGY_ASCENDING: [Level; 5] = [
        Level::Ground,
        Level::Beta,
        Level::Alpha,
        Level::Minus,
        Level::Plus,
    ];

    /// Index into the basis-ordered population vector.
    pub fn index(self) -> usize {
        match self {
            Level::Plus => 0,
            Level::Minus => 1,
            Level::Alpha => 2,
            Level::Beta => 3,
            Level::Ground => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Plus => "plus",
            Level::Minus => "minus",
            Level::Alpha => "alpha",
            Level::Beta => "beta",
            Level::Ground => "g",
        }
    }
}

/// The five level energies, natural units, ground pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEnergies {
    pub eps_g: f64,
    pub eps_beta: f64,
    pub eps_alpha: f64,
    pub eps_minus: f64,
    pub eps_plus: f64,
}

impl LevelEnergies {
    /// Validated constructor: eps_g must be exactly 0 and the ladder strictly
    /// ascending (ties rejected).
    pub fn new(
        eps_g: f64,
        eps_beta: f64,
        eps_alpha: f64,
        eps_minus: f64,
        eps_plus: f64,
    ) -> Result<Self> {
        let e = LevelEnergies {
            eps_g,
            eps_beta,
            eps_alpha,
            eps_minus,
            eps_plus,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_g", self.eps_g),
            ("eps_beta", self.eps_beta),
            ("eps_alpha", self.eps_alpha),
            ("eps_minus", self.eps_minus),
            ("eps_plus", self.eps_plus),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidLadder {
                    reason: format!("{name} = {v} is not finite"),
                });
            }
        }
        if self.eps_g != 0.0 {
            return Err(Error::InvalidLadder {
                reason: format!("eps_g must be 0 (reference), got {}", self.eps_g),
            });
        }
        let ladder = [
            ("eps_g", self.eps_g),
            ("eps_beta", self.eps_beta),
            ("eps_alpha", self.eps_alpha),
            ("eps_minus", self.eps_minus),
            ("eps_plus", self.eps_plus),
        ];
        for pair in ladder.windows(2) {
            let (lo_name, lo) = pair[0];
            let (hi_name, hi) = pair[1];
            if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                return Err(Error::InvalidLadder {
                    reason: format!("requires {lo_name} < {hi_name}, got {lo} >= {hi}"),
                });
            }
        }
        Ok(())
    }

    pub fn energy(&self, level: Level) -> f64 {
        match level {
            Level::Plus => self.eps_plus,
            Level::Minus => self.eps_minus,
            Level::Alpha => self.eps_alpha,
            Level::Beta => self.eps_beta,
            Level::Ground => self.eps_g,
        }
    }

    /// Energies in ascending-ladder order (g, beta, alpha, -, +).
    pub fn ascending(&self) -> [f64; 5] {
        [
            self.eps_g,
            self.eps_beta,
            self.eps_alpha,
            self.eps_minus,
            self.eps_plus,
        ]
    }

    /// Positive transition frequency of a level pair, |eps_a - eps_b|.
    pub fn gap(&self, a: Level, b: Level) -> f64 {
        (self.energy(a) - self.energy(b)).abs()
    }

    /// Used by tests that probe shift invariance of the sorted-dot products;
    /// bypasses the eps_g = 0 pin.
    #[cfg(test)]
    pub(crate) fn shifted_unchecked(&self, offset: f64) -> LevelEnergies {
        LevelEnergies {
            eps_g: self.eps_g + offset,
            eps_beta: self.eps_beta + offset,
            eps_alpha: self.eps_alpha + offset,
            eps_minus: self.eps_minus + offset,
            eps_plus: self.eps_plus + offset,
        }
    }
}

/// Pair widths Γ_ij of the decay channels, all nonnegative.
///
/// The bright width splits evenly over the + -> - and + -> g channels; the
/// dark width resolves into - -> +, - -> g, - -> alpha with fractions
/// 0.35 / 0.35 / 0.30. Pairs that the rate list names with two symbols
/// (beta <-> g, - <-> g, + <-> g) share a single width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchingTable {
    pub gam_plus_minus: f64,
    pub gam_plus_g: f64,
    pub gam_minus_plus: f64,
    pub gam_minus_g: f64,
    pub gam_minus_alpha: f64,
    pub gam_alpha_minus: f64,
    pub gam_alpha_g: f64,
    pub gam_alpha_beta: f64,
    pub gam_beta_g: f64,
    pub gam_g_beta: f64,
    /// The input widths, kept for provenance and invariant checks.
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// Branching fractions of the dark-state width over its three decay channels.
pub const MINUS_BRANCH_PLUS: f64 = 0.35;
pub const MINUS_BRANCH_G: f64 = 0.35;
pub const MINUS_BRANCH_ALPHA: f64 = 0.30;

/// Default cavity-side reference width and beta <-> g pair width.
pub const DEFAULT_GAMMA_REF: f64 = 1.0e-6;
pub const DEFAULT_GAMMA_BETA_G: f64 = 0.5;

/// Build the branching table from the hybridized widths.
///
/// `gamma_ref` sets the alpha -> beta channel (alpha -> g is a quarter of it);
/// `gamma_beta_g` is the shared beta <-> g pair width. Negative inputs are an
/// error, not clamped; callers resolving widths through the signed Γ0 rule
/// must handle that error themselves.
pub fn build_branching(
    gamma_plus: f64,
    gamma_minus: f64,
    gamma_ref: f64,
    gamma_beta_g: f64,
) -> Result<BranchingTable> {
    for (name, value) in [
        ("gamma_plus", gamma_plus),
        ("gamma_minus", gamma_minus),
        ("gamma_ref", gamma_ref),
        ("gamma_beta_g", gamma_beta_g),
    ] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidRate { name, value });
        }
    }
    let gam_minus_alpha = MINUS_BRANCH_ALPHA * gamma_minus;
    Ok(BranchingTable {
        gam_plus_minus: 0.5 * gamma_plus,
        gam_plus_g: 0.5 * gamma_plus,
        gam_minus_plus: MINUS_BRANCH_PLUS * gamma_minus,
        gam_minus_g: MINUS_BRANCH_G * gamma_minus,
        gam_minus_alpha,
        gam_alpha_minus: 0.1 * gam_minus_alpha,
        gam_alpha_g: 0.25 * gamma_ref,
        gam_alpha_beta: gamma_ref,
        gam_beta_g: gamma_beta_g,
        gam_g_beta: gamma_beta_g,
        gamma_plus,
        gamma_minus,
    })
}

/// Charging reservoir and cavity parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservoirs {
    /// Charging reservoir temperature, > 0 (k_B = 1).
    pub t_c: f64,
    /// Fictitious cavity temperature, > 0.
    pub t_w: f64,
    /// Cavity frequency (informational).
    pub omega_w: f64,
    /// Flux unit prefactor e, > 0.
    pub flux_unit_e: f64,
}

impl Reservoirs {
    pub fn validate(&self) -> Result<()> {
        if !self.t_c.is_finite() || self.t_c <= 0.0 {
            return Err(Error::InvalidTemperature {
                temperature: self.t_c,
            });
        }
        if !self.t_w.is_finite() || self.t_w <= 0.0 {
            return Err(Error::InvalidTemperature {
                temperature: self.t_w,
            });
        }
        if !self.flux_unit_e.is_finite() || self.flux_unit_e <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "flux_unit_e",
                value: self.flux_unit_e,
                constraint: "must be finite and > 0",
            });
        }
        if !self.omega_w.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega_w",
                value: self.omega_w,
                constraint: "must be finite",
            });
        }
        Ok(())
    }
}

/// Bose-Einstein occupation n(ω, T) = 1/(exp(ω/T) - 1), k_B = 1.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidFrequency { omega });
    }
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::InvalidTemperature { temperature });
    }
    // exp overflow drives the occupation to exactly 0 in the frozen limit
    Ok(1.0 / ((omega / temperature).exp() - 1.0))
}

/// Direction of a transition relative to the energy ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Emission into the bath, rate Γ (n + 1).
    Downward,
    /// Absorption from the bath, rate Γ n.
    Upward,
}

/// Thermal rate of one transition: Γ(n+1) downward, Γn upward, with n
/// evaluated at the pair gap `omega`.
pub fn transition_rate(
    gamma_ij: f64,
    omega: f64,
    temperature: f64,
    direction: Direction,
) -> Result<f64> {
    if !gamma_ij.is_finite() || gamma_ij < 0.0 {
        return Err(Error::InvalidRate {
            name: "gamma_ij",
            value: gamma_ij,
        });
    }
    let n = bose_occupation(omega, temperature)?;
    Ok(match direction {
        Direction::Downward => gamma_ij * (n + 1.0),
        Direction::Upward => gamma_ij * n,
    })
}

/// The twelve directed rates k_{ij} (from state i to state j).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransitionRates {
    pub k_plus_minus: f64,
    pub k_plus_g: f64,
    pub k_minus_plus: f64,
    pub k_minus_g: f64,
    pub k_minus_alpha: f64,
    pub k_alpha_minus: f64,
    pub k_alpha_beta: f64,
    pub k_alpha_g: f64,
    pub k_beta_g: f64,
    pub k_g_plus: f64,
    pub k_g_minus: f64,
    pub k_g_beta: f64,
}

impl TransitionRates {
    /// The rates as (from, to, value) triples.
    pub fn labeled(&self) -> [(Level, Level, f64); 12] {
        use Level::*;
        [
            (Plus, Minus, self.k_plus_minus),
            (Plus, Ground, self.k_plus_g),
            (Minus, Plus, self.k_minus_plus),
            (Minus, Ground, self.k_minus_g),
            (Minus, Alpha, self.k_minus_alpha),
            (Alpha, Minus, self.k_alpha_minus),
            (Alpha, Beta, self.k_alpha_beta),
            (Alpha, Ground, self.k_alpha_g),
            (Beta, Ground, self.k_beta_g),
            (Ground, Plus, self.k_g_plus),
            (Ground, Minus, self.k_g_minus),
            (Ground, Beta, self.k_g_beta),
        ]
    }
}

/// The 5x5 population generator in basis order (+, -, alpha, beta, g):
/// column i loses, row j gains, so every column sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    entries: [[f64; 5]; 5],
    rates: TransitionRates,
}

impl RateMatrix {
    /// Assemble from the directed rates. Fails if any rate is negative or the
    /// assembled matrix loses conservation beyond 1e-12.
    pub fn from_rates(rates: TransitionRates) -> Result<Self> {
        let mut entries = [[0.0; 5]; 5];
        for (from, to, k) in rates.labeled() {
            if !k.is_finite() || k < 0.0 {
                return Err(Error::InvalidRate {
                    name: "k_ij",
                    value: k,
                });
            }
            entries[to.index()][from.index()] += k;
            entries[from.index()][from.index()] -= k;
        }
        let matrix = RateMatrix { entries, rates };
        matrix.validate()?;
        Ok(matrix)
    }

    /// Escape hatch for dynamics tests that need a deliberately invalid
    /// generator; skips all checks.
    #[cfg(test)]
    pub(crate) fn from_entries_unchecked(entries: [[f64; 5]; 5]) -> Self {
        RateMatrix {
            entries,
            rates: TransitionRates::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for col in 0..5 {
            let mut sum = 0.0;
            for row in 0..5 {
                let v = self.entries[row][col];
                if !v.is_finite() {
                    return Err(Error::Numeric {
                        reason: format!("generator entry ({row},{col}) = {v}"),
                    });
                }
                if row != col && v < 0.0 {
                    return Err(Error::InvalidRate {
                        name: "off-diagonal",
                        value: v,
                    });
                }
                if row == col && v > 0.0 {
                    return Err(Error::Numeric {
                        reason: format!("positive diagonal entry ({row},{col}) = {v}"),
                    });
                }
                sum += v;
            }
            if sum.abs() >= 1e-12 {
                return Err(Error::Numeric {
                    reason: format!("column {col} sums to {sum}, conservation broken"),
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[[f64; 5]; 5] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn rates(&self) -> &TransitionRates {
        &self.rates
    }

    /// Matrix-vector product L * p.
    pub fn apply(&self, p: &[f64; 5]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (row, out_row) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (m, x) in self.entries[row].iter().zip(p.iter()) {
                acc += m * x;
            }
            *out_row = acc;
        }
        out
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute diagonal entry; sets the fastest relaxation scale.
    pub fn max_abs_diagonal(&self) -> f64 {
        (0..5).map(|i| self.entries[i][i].abs()).fold(0.0, f64::max)
    }

    /// True when every level can reach every other through nonzero rates.
    /// Guarantees a unique steady state.
    #[allow(clippy::needless_range_loop)]
    pub fn is_strongly_connected(&self) -> bool {
        let reachable = |start: usize, transpose: bool| -> [bool; 5] {
            let mut seen = [false; 5];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for j in 0..5 {
                    let edge = if transpose {
                        self.entries[i][j]
                    } else {
                        self.entries[j][i]
                    };
                    if i != j && edge > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen
        };
        let fwd = reachable(0, false);
        let bwd = reachable(0, true);
        fwd.iter().all(|&x| x) && bwd.iter().all(|&x| x)
    }
}

/// Assemble the full generator from the energy ladder, branching table, and
/// reservoir temperatures.
///
/// Pairs inside {g, +, -} couple to the charging reservoir at `t_c`; the
/// {-, alpha}, {alpha, beta}, {alpha, g}, and {beta, g} pairs couple to the
/// cavity at `t_w`. Every pair uses the uniform convention
/// downward = Γ(n+1), upward = Γn at the pair's energy gap.
pub fn build_liouvillian(
    energies: &LevelEnergies,
    branching: &BranchingTable,
    reservoirs: &Reservoirs,
) -> Result<RateMatrix> {
    energies.validate()?;
    reservoirs.validate()?;
    use Level::*;
    let t_c = reservoirs.t_c;
    let t_w = reservoirs.t_w;
    let rates = TransitionRates {
        // charging reservoir, {+, -} pair
        k_plus_minus: transition_rate(
            branching.gam_plus_minus,
            energies.gap(Plus, Minus),
            t_c,
            Direction::Downward,
        )?,
        k_minus_plus: transition_rate(
            branching.gam_minus_plus,
            energies.gap(Plus, Minus),
            t_c,
            Direction::Upward,
        )?,
        // charging reservoir, {+, g} pair (shared width)
        k_plus_g: transition_rate(
            branching.gam_plus_g,
            energies.gap(Plus, Ground),
            t_c,
            Direction::Downward,
        )?,
        k_g_plus: transition_rate(
            branching.gam_plus_g,
            energies.gap(Plus, Ground),
            t_c,
            Direction::Upward,
        )?,
        // charging reservoir, {-, g} pair (shared width)
        k_minus_g: transition_rate(
            branching.gam_minus_g,
            energies.gap(Minus, Ground),
            t_c,
            Direction::Downward,
        )?,
        k_g_minus: transition_rate(
            branching.gam_minus_g,
            energies.gap(Minus, Ground),
            t_c,
            Direction::Upward,
        )?,
        // cavity, {-, alpha} pair (distinct widths: nonreciprocal)
        k_minus_alpha: transition_rate(
            branching.gam_minus_alpha,
            energies.gap(Minus, Alpha),
            t_w,
            Direction::Downward,
        )?,
        k_alpha_minus: transition_rate(
            branching.gam_alpha_minus,
            energies.gap(Minus, Alpha),
            t_w,
            Direction::Upward,
        )?,
        // cavity, one-way alpha -> beta and alpha -> g channels
        k_alpha_beta: transition_rate(
            branching.gam_alpha_beta,
            energies.gap(Alpha, Beta),
            t_w,
            Direction::Downward,
        )?,
        k_alpha_g: transition_rate(
            branching.gam_alpha_g,
            energies.gap(Alpha, Ground),
            t_w,
            Direction::Downward,
        )?,
        // cavity, {beta, g} pair (shared width)
        k_beta_g: transition_rate(
            branching.gam_beta_g,
            energies.gap(Beta, Ground),
            t_w,
            Direction::Downward,
        )?,
        k_g_beta: transition_rate(
            branching.gam_g_beta,
            energies.gap(Beta, Ground),
            t_w,
            Direction::Upward,
        )?,
    };
    RateMatrix::from_rates(rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_energies() -> LevelEnergies {
        LevelEnergies::new(0.0, 0.4, 0.8, 0.9, 8.8775).unwrap()
    }

    fn default_reservoirs() -> Reservoirs {
        Reservoirs {
            t_c: 2.0,
            t_w: 0.5,
            omega_w: 0.4,
            flux_unit_e: 1.0,
        }
    }

    /// Series oracle for the occupation: n = Σ_{k>=1} exp(-k ω/T).
    fn bose_series(omega: f64, temperature: f64) -> f64 {
        let q = (-omega / temperature).exp();
        let mut total = 0.0;
        let mut term = q;
        for _ in 0..400 {
            total += term;
            term *= q;
            if term < 1e-18 {
                break;
            }
        }
        total
    }

    #[test]
    fn bose_occupation_values() {
        assert_relative_eq!(
            bose_occupation(2.0f64.ln(), 1.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bose_occupation(1.0, 1.0).unwrap(),
            0.581_976_706_869_326_5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bose_occupation(1.0, 1.0).unwrap(),
            bose_series(1.0, 1.0),
            max_relative = 1e-12
        );
        // frozen bath limit
        assert_eq!(bose_occupation(1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn bose_occupation_rejects_bad_inputs() {
        assert!(matches!(
            bose_occupation(0.0, 1.0),
            Err(Error::InvalidFrequency { .. })
        ));
        assert!(matches!(
            bose_occupation(-1.0, 1.0),
            Err(Error::InvalidFrequency { .. })
        ));
        assert!(matches!(
            bose_occupation(1.0, 0.0),
            Err(Error::InvalidTemperature { .. })
        ));
        assert!(matches!(
            bose_occupation(1.0, -0.5),
            Err(Error::InvalidTemperature { .. })
        ));
    }

    #[test]
    fn transition_rate_examples() {
        let down = transition_rate(1.0, 2.0f64.ln(), 1.0, Direction::Downward).unwrap();
        let up = transition_rate(1.0, 2.0f64.ln(), 1.0, Direction::Upward).unwrap();
        assert_relative_eq!(down, 2.0, max_relative = 1e-14);
        assert_relative_eq!(up, 1.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn up_down_ratio_is_boltzmann(
            gamma in 1e-6f64..10.0,
            omega in 1e-3f64..20.0,
            t in 1e-2f64..50.0,
        ) {
            let down = transition_rate(gamma, omega, t, Direction::Downward).unwrap();
            let up = transition_rate(gamma, omega, t, Direction::Upward).unwrap();
            if down > 0.0 && up > 0.0 {
                prop_assert!((up / down - (-omega / t).exp()).abs() < 1e-12 * (up / down).max(1.0));
            }
        }
    }

    #[test]
    fn branching_frozen_example() {
        let b = build_branching(1.0, 0.1, 1e-6, 0.5).unwrap();
        assert_relative_eq!(b.gam_plus_minus, 0.5);
        assert_relative_eq!(b.gam_plus_g, 0.5);
        assert_relative_eq!(b.gam_minus_alpha, 0.03);
        assert_relative_eq!(b.gam_alpha_minus, 0.003);
        assert_relative_eq!(b.gam_alpha_beta, 1e-6);
        assert_relative_eq!(b.gam_alpha_g, 0.25e-6);
        assert_relative_eq!(b.gam_beta_g, 0.5);
        assert_relative_eq!(b.gam_g_beta, 0.5);
    }

    #[test]
    fn branching_sums_reproduce_widths() {
        let b = build_branching(0.73, 0.289, 1e-6, 0.5).unwrap();
        assert_relative_eq!(b.gam_plus_minus + b.gam_plus_g, 0.73, max_relative = 1e-15);
        assert_relative_eq!(
            b.gam_minus_plus + b.gam_minus_g + b.gam_minus_alpha,
            0.289,
            max_relative = 1e-12
        );
    }

    #[test]
    fn branching_zero_widths_keep_cavity_channels() {
        let b = build_branching(0.0, 0.0, 1e-6, 0.5).unwrap();
        assert_eq!(b.gam_plus_minus, 0.0);
        assert_eq!(b.gam_minus_alpha, 0.0);
        assert_eq!(b.gam_alpha_minus, 0.0);
        assert_relative_eq!(b.gam_alpha_beta, 1e-6);
        assert_relative_eq!(b.gam_beta_g, 0.5);
    }

    #[test]
    fn branching_rejects_negative_inputs() {
        assert!(matches!(
            build_branching(-0.2, 0.1, 1e-6, 0.5),
            Err(Error::InvalidRate { .. })
        ));
        assert!(matches!(
            build_branching(0.2, -0.1, 1e-6, 0.5),
            Err(Error::InvalidRate { .. })
        ));
    }

    #[test]
    fn ladder_validation() {
        assert!(LevelEnergies::new(0.0, 0.4, 0.8, 0.9, 2.0).is_ok());
        // nonzero ground
        assert!(LevelEnergies::new(0.1, 0.4, 0.8, 0.9, 2.0).is_err());
        // tie
        assert!(LevelEnergies::new(0.0, 0.4, 0.4, 0.9, 2.0).is_err());
        // inversion
        assert!(LevelEnergies::new(0.0, 0.8, 0.4, 0.9, 2.0).is_err());
    }

    #[test]
    fn liouvillian_matches_handchecked_layout() {
        // Entry-by-entry assembly from the twelve rate formulas, written out
        // independently of build_liouvillian's loop.
        let energies = default_energies();
        let b = build_branching(0.2004, 0.1996, 1e-6, 0.5).unwrap();
        let r = default_reservoirs();
        let m = build_liouvillian(&energies, &b, &r).unwrap();
        let k = m.rates();

        let n_c = |omega: f64| 1.0 / ((omega / r.t_c).exp() - 1.0);
        let n_w = |omega: f64| 1.0 / ((omega / r.t_w).exp() - 1.0);
        let w_pm = energies.eps_plus - energies.eps_minus;
        let w_pg = energies.eps_plus;
        let w_mg = energies.eps_minus;
        let w_ma = energies.eps_minus - energies.eps_alpha;
        let w_ab = energies.eps_alpha - energies.eps_beta;
        let w_ag = energies.eps_alpha;
        let w_bg = energies.eps_beta;

        assert_relative_eq!(
            k.k_plus_minus,
            0.1002 * (n_c(w_pm) + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            k.k_minus_plus,
            0.35 * 0.1996 * n_c(w_pm),
            max_relative = 1e-14
        );
        assert_relative_eq!(k.k_plus_g, 0.1002 * (n_c(w_pg) + 1.0), max_relative = 1e-14);
        assert_relative_eq!(k.k_g_plus, 0.1002 * n_c(w_pg), max_relative = 1e-14);
        assert_relative_eq!(
            k.k_minus_g,
            0.35 * 0.1996 * (n_c(w_mg) + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(k.k_g_minus, 0.35 * 0.1996 * n_c(w_mg), max_relative = 1e-14);
        assert_relative_eq!(
            k.k_minus_alpha,
            0.3 * 0.1996 * (n_w(w_ma) + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            k.k_alpha_minus,
            0.03 * 0.1996 * n_w(w_ma),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            k.k_alpha_beta,
            1e-6 * (n_w(w_ab) + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            k.k_alpha_g,
            0.25e-6 * (n_w(w_ag) + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(k.k_beta_g, 0.5 * (n_w(w_bg) + 1.0), max_relative = 1e-14);
        assert_relative_eq!(k.k_g_beta, 0.5 * n_w(w_bg), max_relative = 1e-14);

        // matrix layout: row gains, column loses
        let e = m.entries();
        assert_relative_eq!(
            e[0][0],
            -(k.k_plus_minus + k.k_plus_g),
            max_relative = 1e-14
        );
        assert_relative_eq!(e[0][1], k.k_minus_plus, max_relative = 1e-14);
        assert_eq!(e[0][2], 0.0);
        assert_eq!(e[0][3], 0.0);
        assert_relative_eq!(e[0][4], k.k_g_plus, max_relative = 1e-14);
        assert_relative_eq!(e[1][0], k.k_plus_minus, max_relative = 1e-14);
        assert_relative_eq!(
            e[1][1],
            -(k.k_minus_plus + k.k_minus_alpha + k.k_minus_g),
            max_relative = 1e-14
        );
        assert_relative_eq!(e[1][2], k.k_alpha_minus, max_relative = 1e-14);
        assert_eq!(e[1][3], 0.0);
        assert_relative_eq!(e[1][4], k.k_g_minus, max_relative = 1e-14);
        assert_relative_eq!(e[2][1], k.k_minus_alpha, max_relative = 1e-14);
        assert_relative_eq!(
            e[2][2],
            -(k.k_alpha_minus + k.k_alpha_beta + k.k_alpha_g),
            max_relative = 1e-14
        );
        assert_relative_eq!(e[3][2], k.k_alpha_beta, max_relative = 1e-14);
        assert_relative_eq!(e[3][3], -k.k_beta_g, max_relative = 1e-14);
        assert_relative_eq!(e[3][4], k.k_g_beta, max_relative = 1e-14);
        assert_relative_eq!(e[4][0], k.k_plus_g, max_relative = 1e-14);
        assert_relative_eq!(e[4][1], k.k_minus_g, max_relative = 1e-14);
        assert_relative_eq!(e[4][2], k.k_alpha_g, max_relative = 1e-14);
        assert_relative_eq!(e[4][3], k.k_beta_g, max_relative = 1e-14);
        assert_relative_eq!(
            e[4][4],
            -(k.k_g_plus + k.k_g_minus + k.k_g_beta),
            max_relative = 1e-14
        );
    }

    #[test]
    fn liouvillian_golden_matrix() {
        // assembled once from the twelve rate formulas by independent
        // entry-by-entry evaluation at the default battery point
        // (n_ring = 6, j_d = 2, reference ring couplings, calibration
        // temperatures), then frozen
        let energies =
            LevelEnergies::new(0.0, 2.0, 5.0, 5.09999999999999964, 14.8795705427643075).unwrap();
        let b = build_branching(2.00490819098753936e-1, 1.99509180901246086e-1, 1e-6, 0.5).unwrap();
        let r = Reservoirs {
            t_c: 9.0,
            t_w: 0.5,
            omega_w: 3.0,
            flux_unit_e: 1.0,
        };
        let m = build_liouvillian(&energies, &b, &r).unwrap();
        let golden = [
            [
                -2.75257855484839609e-1,
                3.55498285664664002e-2,
                0.0,
                0.0,
                2.37316889978147552e-2,
            ],
            [
                1.51280756937647864e-1,
                -5.27157153836819825e-1,
                2.70334275723316288e-2,
                0.0,
                9.15920819612272008e-2,
            ],
            [
                0.0,
                3.30187029993690095e-1,
                -2.70346800685937819e-2,
                0.0,
                0.0,
            ],
            [
                0.0,
                0.0,
                1.00248491165684455e-6,
                -5.09328680181887039e-1,
                9.32868018188702519e-3,
            ],
            [
                1.23977098547191730e-1,
                1.61420295276663323e-1,
                2.50011350497752427e-7,
                5.09328680181887039e-1,
                -1.24652451140928974e-1,
            ],
        ];
        for row in 0..5 {
            for col in 0..5 {
                let got = m.entry(row, col);
                let want = golden[row][col];
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1e-12),
                    "entry ({row},{col}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn liouvillian_frozen_baths_kill_upward_rates() {
        let energies = default_energies();
        let b = build_branching(0.2, 0.18, 1e-6, 0.5).unwrap();
        let r = Reservoirs {
            t_c: 1e-9,
            t_w: 1e-9,
            omega_w: 0.4,
            flux_unit_e: 1.0,
        };
        let m = build_liouvillian(&energies, &b, &r).unwrap();
        let k = m.rates();
        assert_eq!(k.k_g_plus, 0.0);
        assert_eq!(k.k_g_minus, 0.0);
        assert_eq!(k.k_g_beta, 0.0);
        assert_eq!(k.k_minus_plus, 0.0);
        assert_eq!(k.k_alpha_minus, 0.0);
        // emission channels survive at the bare widths
        assert_relative_eq!(k.k_plus_minus, 0.1, max_relative = 1e-12);
        assert_relative_eq!(k.k_beta_g, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn detailed_balance_on_shared_width_pairs_only() {
        let energies = default_energies();
        let b = build_branching(0.2004, 0.1996, 1e-6, 0.5).unwrap();
        let r = default_reservoirs();
        let m = build_liouvillian(&energies, &b, &r).unwrap();
        let k = m.rates();
        // shared-width pairs obey local detailed balance exactly
        assert_relative_eq!(
            k.k_g_plus / k.k_plus_g,
            (-energies.eps_plus / r.t_c).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k.k_g_minus / k.k_minus_g,
            (-energies.eps_minus / r.t_c).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k.k_g_beta / k.k_beta_g,
            (-energies.eps_beta / r.t_w).exp(),
            max_relative = 1e-12
        );
        // the +/- pair width asymmetry (0.5 Γ+ vs 0.35 Γ-) breaks it
        let w_pm = energies.eps_plus - energies.eps_minus;
        let boltzmann = (-w_pm / r.t_c).exp();
        let actual = k.k_minus_plus / k.k_plus_minus;
        assert!(
            (actual - boltzmann).abs() > 0.2 * boltzmann,
            "nonreciprocity missing: {actual} vs {boltzmann}"
        );
    }

    #[test]
    fn generator_is_strongly_connected_at_positive_temperatures() {
        let m = build_liouvillian(
            &default_energies(),
            &build_branching(0.2, 0.18, 1e-6, 0.5).unwrap(),
            &default_reservoirs(),
        )
        .unwrap();
        assert!(m.is_strongly_connected());
    }

    proptest! {
        #[test]
        fn generator_conserves_probability(
            gamma_plus in 0.0f64..5.0,
            gamma_minus in 0.0f64..5.0,
            eps_beta in 0.05f64..1.0,
            alpha_step in 0.05f64..1.0,
            minus_step in 0.05f64..1.0,
            plus_step in 0.05f64..20.0,
            t_c in 0.05f64..20.0,
            t_w in 0.05f64..20.0,
        ) {
            let eps_alpha = eps_beta + alpha_step;
            let eps_minus = eps_alpha + minus_step;
            let eps_plus = eps_minus + plus_step;
            let energies = LevelEnergies::new(0.0, eps_beta, eps_alpha, eps_minus, eps_plus).unwrap();
            let b = build_branching(gamma_plus, gamma_minus, 1e-6, 0.5).unwrap();
            let r = Reservoirs { t_c, t_w, omega_w: 0.4, flux_unit_e: 1.0 };
            let m = build_liouvillian(&energies, &b, &r).unwrap();
            for col in 0..5 {
                let sum: f64 = (0..5).map(|row| m.entry(row, col)).sum();
                prop_assert!(sum.abs() < 1e-12, "column {col} sum {sum}");
                for row in 0..5 {
                    if row != col {
                        prop_assert!(m.entry(row, col) >= 0.0);
                    } else {
                        prop_assert!(m.entry(row, col) <= 0.0);
                    }
                }
                // diagonal balances its column exactly
                let off: f64 = (0..5).filter(|&row| row != col).map(|row| m.entry(row, col)).sum();
                prop_assert!((m.entry(col, col) + off).abs() < 1e-12);
            }
            // nonzero widths plus strictly positive temperatures connect the
            // whole transition graph, guaranteeing a unique steady state
            if gamma_plus > 0.0 && gamma_minus > 0.0 {
                prop_assert!(m.is_strongly_connected());
            }
        }
    }
}
