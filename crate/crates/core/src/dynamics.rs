//! Population dynamics: time evolution of dρ/dt = Lρ and the unique
//! normalized steady state.
//!
//! Time is always handled in bright-state units t·Γ+; the generator is scaled
//! by 1/Γ+ once and integrated on the dimensionless grid. The integrator is
//! classical RK4 with step-doubling adaptivity; the generator is stiff only
//! through the rate contrast between the slow cavity channel (~1e-6) and the
//! fast emission channels (~0.5), which decays rather than oscillates, so a
//! step cap of 0.05 / max|diag| keeps the explicit scheme stable.

use crate::error::{Error, Result};
use crate::levels::{Level, RateMatrix};

/// Per-step trace-drift bound; a step whose doubled estimate drifts more than
/// this is rejected and halved.
const STEP_TRACE_TOL: f64 = 1e-12;
/// Per-step componentwise error bound from step doubling.
const STEP_COMPONENT_TOL: f64 = 1e-11;
/// Global trace tolerance along a trajectory.
const TRACE_TOL: f64 = 1e-9;
/// Allowed negative excursion of any population.
const POSITIVITY_TOL: f64 = -1e-9;

/// The five level populations. Each lies in [0, 1] and they sum to one,
/// within 1e-9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationState {
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_alpha: f64,
    pub p_beta: f64,
    pub p_g: f64,
}

impl PopulationState {
    pub fn new(p_plus: f64, p_minus: f64, p_alpha: f64, p_beta: f64, p_g: f64) -> Result<Self> {
        let state = PopulationState {
            p_plus,
            p_minus,
            p_alpha,
            p_beta,
            p_g,
        };
        state.validate()?;
        Ok(state)
    }

    /// All population in the uncharged reference state |g>.
    pub fn ground() -> Self {
        PopulationState {
            p_plus: 0.0,
            p_minus: 0.0,
            p_alpha: 0.0,
            p_beta: 0.0,
            p_g: 1.0,
        }
    }

    /// Equal population in every level.
    pub fn uniform() -> Self {
        PopulationState {
            p_plus: 0.2,
            p_minus: 0.2,
            p_alpha: 0.2,
            p_beta: 0.2,
            p_g: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let arr = self.as_array();
        for (i, &p) in arr.iter().enumerate() {
            if !p.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&p) {
                return Err(Error::InvalidPopulation {
                    reason: format!("population {i} = {p} outside [0, 1]"),
                });
            }
        }
        let sum: f64 = arr.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPopulation {
                reason: format!("populations sum to {sum}, expected 1"),
            });
        }
        Ok(())
    }

    /// Basis order (+, -, alpha, beta, g).
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.p_plus,
            self.p_minus,
            self.p_alpha,
            self.p_beta,
            self.p_g,
        ]
    }

    pub(crate) fn from_array(p: [f64; 5]) -> Self {
        PopulationState {
            p_plus: p[0],
            p_minus: p[1],
            p_alpha: p[2],
            p_beta: p[3],
            p_g: p[4],
        }
    }

    pub fn get(&self, level: Level) -> f64 {
        self.as_array()[level.index()]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &PopulationState) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A computed time evolution on a dimensionless grid, together with the
/// generator that produced it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Strictly increasing grid in units of t·Γ+.
    pub times: Vec<f64>,
    /// One population state per grid point.
    pub states: Vec<PopulationState>,
    /// The generator used (physical rates).
    pub generator: RateMatrix,
    /// The bright-state width that defines the time unit.
    pub gamma_plus: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn apply(entries: &[[f64; 5]; 5], p: &[f64; 5]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (row, out_row) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for col in 0..5 {
            acc += entries[row][col] * p[col];
        }
        *out_row = acc;
    }
    out
}

fn rk4_step(entries: &[[f64; 5]; 5], y: &[f64; 5], h: f64) -> [f64; 5] {
    let k1 = apply(entries, y);
    let mut y2 = [0.0; 5];
    for i in 0..5 {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = apply(entries, &y2);
    let mut y3 = [0.0; 5];
    for i in 0..5 {
        y3[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = apply(entries, &y3);
    let mut y4 = [0.0; 5];
    for i in 0..5 {
        y4[i] = y[i] + h * k3[i];
    }
    let k4 = apply(entries, &y4);
    let mut out = [0.0; 5];
    for i in 0..5 {
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Advance `y` from `t_from` to `t_to` with adaptive step halving. A step is
/// accepted when both the step-doubling component estimate and the embedded
/// trace-drift estimate are below tolerance.
fn integrate_interval(
    entries: &[[f64; 5]; 5],
    y: &mut [f64; 5],
    t_from: f64,
    t_to: f64,
    h_cap: f64,
) -> Result<()> {
    let mut t = t_from;
    let mut h = (t_to - t_from).min(h_cap);
    while t < t_to {
        if h < 1e-15 * t_to.max(1.0) {
            return Err(Error::IntegrationFailure {
                time: t,
                reason: "step size underflow".into(),
            });
        }
        let h_eff = h.min(t_to - t);
        let full = rk4_step(entries, y, h_eff);
        let half = rk4_step(entries, y, 0.5 * h_eff);
        let two_half = rk4_step(entries, &half, 0.5 * h_eff);
        let err = full
            .iter()
            .zip(two_half.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let sum_before: f64 = y.iter().sum();
        let sum_after: f64 = two_half.iter().sum();
        let drift = (sum_after - sum_before).abs();
        if err > STEP_COMPONENT_TOL || drift > STEP_TRACE_TOL {
            h = 0.5 * h_eff;
            continue;
        }
        *y = two_half;
        t += h_eff;
        h = if err < 0.1 * STEP_COMPONENT_TOL {
            (2.0 * h_eff).min(h_cap)
        } else {
            h_eff.min(h_cap)
        };
        for (i, &p) in y.iter().enumerate() {
            if p < POSITIVITY_TOL {
                return Err(Error::PositivityViolation {
                    time: t,
                    index: i,
                    value: p,
                });
            }
        }
        let sum: f64 = y.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::IntegrationFailure {
                time: t,
                reason: format!("trace drifted to {sum}"),
            });
        }
    }
    Ok(())
}

/// Integrate the master equation over a dimensionless time grid.
///
/// `times` must be ascending with `times[0] >= 0`; `gamma_plus > 0` sets the
/// time unit. Integration starts from `initial` at dimensionless time zero.
/// Output states are renormalized at each grid point (their trace must be
/// within 1e-9 of one, else the integration is reported as failed).
pub fn evolve(
    generator: &RateMatrix,
    initial: &PopulationState,
    times: &[f64],
    gamma_plus: f64,
) -> Result<Trajectory> {
    generator.validate()?;
    initial.validate()?;
    if times.is_empty() {
        return Err(Error::InvalidTimeGrid {
            reason: "empty time grid".into(),
        });
    }
    if !gamma_plus.is_finite() || gamma_plus <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma_plus",
            value: gamma_plus,
            constraint: "time unit must be finite and > 0",
        });
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidTimeGrid {
            reason: format!("times[0] = {} < 0", times[0]),
        });
    }
    for pair in times.windows(2) {
        if pair[1].partial_cmp(&pair[0]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidTimeGrid {
                reason: format!("grid not strictly increasing at {} -> {}", pair[0], pair[1]),
            });
        }
    }

    // dimensionless generator M = L / Γ+, integrated in τ = t·Γ+ directly
    let mut scaled = *generator.entries();
    for row in scaled.iter_mut() {
        for v in row.iter_mut() {
            *v /= gamma_plus;
        }
    }
    let h_cap = {
        let d = (0..5).map(|i| scaled[i][i].abs()).fold(0.0, f64::max);
        if d > 0.0 {
            0.05 / d
        } else {
            f64::INFINITY
        }
    };

    let mut y = initial.as_array();
    let mut states = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for &t in times {
        if t > t_prev {
            integrate_interval(&scaled, &mut y, t_prev, t, h_cap)?;
        }
        t_prev = t;
        states.push(renormalized(y, t)?);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        generator: generator.clone(),
        gamma_plus,
    })
}

fn renormalized(y: [f64; 5], time: f64) -> Result<PopulationState> {
    let sum: f64 = y.iter().sum();
    if (sum - 1.0).abs() >= TRACE_TOL {
        return Err(Error::IntegrationFailure {
            time,
            reason: format!("trace {sum} too far from 1 to renormalize"),
        });
    }
    let mut out = y;
    for v in out.iter_mut() {
        *v /= sum;
    }
    Ok(PopulationState::from_array(out))
}

/// Solve Lρ = 0 with Σρ = 1 by replacing the last row with the normalization
/// row and solving the 5x5 system with partial pivoting. The result satisfies
/// ‖Lρ‖_∞ < 1e-12 · ‖L‖_∞.
pub fn steady_state(generator: &RateMatrix) -> Result<PopulationState> {
    generator.validate()?;
    let mut a = *generator.entries();
    let mut b = [0.0; 5];
    for cell in a[4].iter_mut() {
        *cell = 1.0;
    }
    b[4] = 1.0;

    let scale = generator.norm_inf().max(1.0);
    let x =
        solve_5x5(&mut a, &mut b, 1e-14 * scale).map_err(|reason| Error::NonUniqueSteadyState {
            reason: format!("singular normalized system: {reason}"),
        })?;

    for (i, &v) in x.iter().enumerate() {
        if v < -1e-10 {
            return Err(Error::Numeric {
                reason: format!("steady-state component {i} = {v} < -1e-10"),
            });
        }
    }

    // fixed-point residual against the original generator
    let residual = generator
        .apply(&x)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let norm = generator.norm_inf();
    if norm > 0.0 && residual >= 1e-12 * norm {
        return Err(Error::NonUniqueSteadyState {
            reason: format!(
                "residual {residual:.3e} exceeds 1e-12 * {norm:.3e}; null space not one-dimensional"
            ),
        });
    }
    PopulationState::new(x[0], x[1], x[2], x[3], x[4])
}

#[allow(clippy::needless_range_loop)]
fn solve_5x5(
    a: &mut [[f64; 5]; 5],
    b: &mut [f64; 5],
    pivot_tol: f64,
) -> std::result::Result<[f64; 5], String> {
    for col in 0..5 {
        let mut pivot_row = col;
        let mut pivot_val = a[col][col].abs();
        for row in (col + 1)..5 {
            if a[row][col].abs() > pivot_val {
                pivot_val = a[row][col].abs();
                pivot_row = row;
            }
        }
        if pivot_val <= pivot_tol {
            return Err(format!("pivot {pivot_val:.3e} at column {col}"));
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
        }
        for row in (col + 1)..5 {
            let factor = a[row][col] / a[col][col];
            a[row][col] = 0.0;
            for k in (col + 1)..5 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let mut acc = b[row];
        for k in (row + 1)..5 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::{
        build_branching, build_liouvillian, LevelEnergies, RateMatrix, Reservoirs, TransitionRates,
    };
    use approx::assert_relative_eq;

    fn battery_generator() -> RateMatrix {
        let energies = LevelEnergies::new(0.0, 0.4, 0.8, 0.9, 8.8775).unwrap();
        let b = build_branching(0.2004, 0.1996, 1e-6, 0.5).unwrap();
        let r = Reservoirs {
            t_c: 2.0,
            t_w: 0.5,
            omega_w: 0.4,
            flux_unit_e: 1.0,
        };
        build_liouvillian(&energies, &b, &r).unwrap()
    }

    /// Generator with only the g <-> beta pair active: k(g->beta) = 1,
    /// k(beta->g) = 2.
    fn two_state_generator() -> RateMatrix {
        RateMatrix::from_rates(TransitionRates {
            k_g_beta: 1.0,
            k_beta_g: 2.0,
            ..TransitionRates::default()
        })
        .unwrap()
    }

    /// Independent steady-state oracle: full-pivot elimination of L itself,
    /// extracting the one-dimensional null space.
    fn null_space_oracle(m: &RateMatrix) -> [f64; 5] {
        let mut a = *m.entries();
        let mut col_perm = [0usize, 1, 2, 3, 4];
        let mut rank = 0;
        for step in 0..5 {
            let mut best = (step, step, 0.0f64);
            for row in step..5 {
                for col in step..5 {
                    if a[row][col].abs() > best.2 {
                        best = (row, col, a[row][col].abs());
                    }
                }
            }
            if best.2 < 1e-12 * m.norm_inf().max(1.0) {
                break;
            }
            a.swap(step, best.0);
            for row in a.iter_mut() {
                row.swap(step, best.1);
            }
            col_perm.swap(step, best.1);
            for row in (step + 1)..5 {
                let f = a[row][step] / a[step][step];
                for col in step..5 {
                    a[row][col] -= f * a[step][col];
                }
            }
            rank += 1;
        }
        assert_eq!(rank, 4, "expected a one-dimensional null space");
        // back-substitute with the free variable set to 1
        let mut x = [0.0; 5];
        x[4] = 1.0;
        for row in (0..4).rev() {
            let mut acc = 0.0;
            for col in (row + 1)..5 {
                acc -= a[row][col] * x[col];
            }
            x[row] = acc / a[row][row];
        }
        let mut out = [0.0; 5];
        for (i, &p) in col_perm.iter().enumerate() {
            out[p] = x[i];
        }
        let sum: f64 = out.iter().sum();
        for v in out.iter_mut() {
            *v /= sum;
        }
        out
    }

    #[test]
    fn zero_generator_keeps_state_constant() {
        let m = RateMatrix::from_rates(TransitionRates::default()).unwrap();
        let initial = PopulationState::new(0.1, 0.2, 0.3, 0.15, 0.25).unwrap();
        let traj = evolve(&m, &initial, &[0.0, 1.0, 5.0, 20.0], 1.0).unwrap();
        for state in &traj.states {
            assert!(state.max_abs_diff(&initial) < 1e-15);
        }
    }

    #[test]
    fn two_state_relaxation_matches_analytic_solution() {
        // p_g(t) = 2/3 + (1/3) exp(-3t) for k(g->beta)=1, k(beta->g)=2
        let m = two_state_generator();
        let initial = PopulationState::ground();
        let times = [0.1, 1.0, 10.0];
        let traj = evolve(&m, &initial, &times, 1.0).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let expected = 2.0 / 3.0 + (1.0 / 3.0) * (-3.0 * t).exp();
            assert!(
                (traj.states[i].p_g - expected).abs() < 1e-8,
                "t={t}: {} vs {expected}",
                traj.states[i].p_g
            );
            assert!((traj.states[i].p_beta - (1.0 - expected)).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_and_positivity_hold_along_battery_trajectory() {
        let m = battery_generator();
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let traj = evolve(&m, &PopulationState::ground(), &times, 0.2004).unwrap();
        for state in &traj.states {
            assert!((state.sum() - 1.0).abs() < 1e-9);
            for p in state.as_array() {
                assert!(p >= -1e-9);
            }
        }
    }

    #[test]
    fn semigroup_property() {
        let m = battery_generator();
        let direct = evolve(&m, &PopulationState::ground(), &[7.0], 0.2004).unwrap();
        let first = evolve(&m, &PopulationState::ground(), &[3.0], 0.2004).unwrap();
        let second = evolve(&m, &first.states[0], &[0.0, 4.0], 0.2004).unwrap();
        assert!(
            direct.states[0].max_abs_diff(&second.states[1]) < 1e-8,
            "semigroup violated: {:?} vs {:?}",
            direct.states[0],
            second.states[1]
        );
    }

    #[test]
    fn steady_state_two_level_detailed_balance() {
        // the g <-> beta pair alone has the 2:1 balance; the other levels
        // drain into g so the null space stays one-dimensional
        let m = RateMatrix::from_rates(TransitionRates {
            k_g_beta: 1.0,
            k_beta_g: 2.0,
            k_plus_g: 1.0,
            k_minus_g: 1.0,
            k_alpha_g: 1.0,
            ..TransitionRates::default()
        })
        .unwrap();
        let ss = steady_state(&m).unwrap();
        assert_relative_eq!(ss.p_g, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(ss.p_beta, 1.0 / 3.0, max_relative = 1e-12);
        assert_eq!(ss.p_plus, 0.0);
        assert_eq!(ss.p_alpha, 0.0);
    }

    #[test]
    fn steady_state_of_isolated_pair_is_non_unique() {
        // with {+, -, alpha} fully disconnected the kernel is
        // four-dimensional and the solve must refuse
        let m = two_state_generator();
        assert!(matches!(
            steady_state(&m),
            Err(Error::NonUniqueSteadyState { .. })
        ));
    }

    #[test]
    fn steady_state_matches_null_space_oracle() {
        let m = battery_generator();
        let ss = steady_state(&m).unwrap();
        let oracle = null_space_oracle(&m);
        for (a, b) in ss.as_array().iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn steady_state_matches_long_time_integration() {
        let m = battery_generator();
        let ss = steady_state(&m).unwrap();
        let traj = evolve(&m, &PopulationState::ground(), &[50.0], 0.2004).unwrap();
        assert!(
            ss.max_abs_diff(&traj.states[0]) < 1e-6,
            "difference {}",
            ss.max_abs_diff(&traj.states[0])
        );
    }

    #[test]
    fn steady_state_is_fixed_point_of_evolution() {
        let m = battery_generator();
        let ss = steady_state(&m).unwrap();
        let residual = m
            .apply(&ss.as_array())
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(residual < 1e-12 * m.norm_inf());
        let traj = evolve(&m, &ss, &[10.0, 50.0], 0.2004).unwrap();
        for state in &traj.states {
            assert!(ss.max_abs_diff(state) < 1e-8);
        }
    }

    #[test]
    fn steady_state_rejects_degenerate_generator() {
        // the zero generator has a five-dimensional null space
        let zero = RateMatrix::from_rates(TransitionRates::default()).unwrap();
        assert!(matches!(
            steady_state(&zero),
            Err(Error::NonUniqueSteadyState { .. })
        ));
        // a two-level-only generator leaves {+, -, alpha} disconnected
        assert!(!two_state_generator().is_strongly_connected());
    }

    #[test]
    fn anti_markov_generator_triggers_positivity_error() {
        // column sums are zero but the flow runs backwards (negative
        // off-diagonals), pushing populations negative
        let mut entries = [[0.0; 5]; 5];
        entries[0][0] = 1.0;
        entries[1][0] = -1.0;
        entries[1][1] = 1.0;
        entries[0][1] = -1.0;
        let m = RateMatrix::from_entries_unchecked(entries);
        let initial = PopulationState::new(0.7, 0.3, 0.0, 0.0, 0.0).unwrap();
        let mut y = initial.as_array();
        let err = integrate_interval(m.entries(), &mut y, 0.0, 5.0, 0.05).unwrap_err();
        assert!(matches!(
            err,
            Error::PositivityViolation { .. } | Error::IntegrationFailure { .. }
        ));
    }

    #[test]
    fn evolve_validates_inputs() {
        let m = battery_generator();
        let ground = PopulationState::ground();
        assert!(matches!(
            evolve(&m, &ground, &[], 0.2),
            Err(Error::InvalidTimeGrid { .. })
        ));
        assert!(matches!(
            evolve(&m, &ground, &[0.0, 0.0], 0.2),
            Err(Error::InvalidTimeGrid { .. })
        ));
        assert!(matches!(
            evolve(&m, &ground, &[-1.0, 1.0], 0.2),
            Err(Error::InvalidTimeGrid { .. })
        ));
        assert!(matches!(
            evolve(&m, &ground, &[0.0, 1.0], 0.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn population_state_validation() {
        assert!(PopulationState::new(0.2, 0.2, 0.2, 0.2, 0.2).is_ok());
        assert!(PopulationState::new(0.5, 0.5, 0.5, -0.5, 0.0).is_err());
        assert!(PopulationState::new(0.2, 0.2, 0.2, 0.2, 0.3).is_err());
        assert!(PopulationState::ground().validate().is_ok());
        assert!(PopulationState::uniform().validate().is_ok());
    }
}
