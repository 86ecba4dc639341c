//! Collective modes of a symmetric emitter ring coupled to a central emitter.
//!
//! The ring of `n_ring` identical two-level emitters with uniform pairwise
//! coherent (Ω) and dissipative (Γ) couplings has collective eigenvalues
//!
//! ```text
//! zeta_m = (1/N) Σ_{j,l} exp[2πi m (l - j)/N] (Ω - iΓ/2)
//! ```
//!
//! whose real part is the collective shift J~_m and whose imaginary part gives
//! the collective width Γ~_m = -2 Im(zeta_m). Coupling the selected ring mode
//! to the central emitter produces a non-Hermitian 2x2 problem; its two complex
//! eigenvalues carry the hybridized energies E± (real parts, cross-assigned)
//! and widths Γ± = -2 Im (bright state relabeled to the larger width).

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// How the central-emitter bare width Γ0 is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma0Rule {
    /// Fixed value, must be finite and >= 0.
    Explicit(f64),
    /// 0.5 * |Γ~_m|; keeps downstream rates nonnegative.
    HalfCollectiveMagnitude,
    /// 0.5 * Γ~_m, which may be negative (nonphysical gain, warned).
    HalfCollectiveSigned,
}

/// Treatment of the j = l terms in the collective double sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalConvention {
    /// Omit j = l entirely (literal pairwise-coupling reading).
    ExcludeDiagonal,
    /// Include j = l with the same (Ω - iΓ/2) as every other pair.
    IncludeUniformDiagonal,
    /// Include j = l as a pure self-decay term (0 - iΓ/2).
    SelfDecayDiagonal,
}

/// Geometry and coupling parameters of the ring plus central emitter.
#[derive(Debug, Clone, PartialEq)]
pub struct RingParams {
    /// Number of ring emitters, >= 3.
    pub n_ring: u32,
    /// Uniform coherent pairwise coupling Ω (natural units, hbar = 1).
    pub omega_pair: f64,
    /// Uniform dissipative pairwise coupling Γ, >= 0.
    pub gamma_pair: f64,
    /// Central-emitter detuning Δ.
    pub delta: f64,
    /// Coherent ring-center coupling J_d.
    pub j_d: f64,
    /// Dissipative ring-center coupling Γ_d, >= 0.
    pub gamma_d: f64,
    /// Rule producing the central-emitter width Γ0.
    pub gamma0_rule: Gamma0Rule,
    /// Diagonal treatment in the collective double sum.
    pub diagonal_convention: DiagonalConvention,
}

impl RingParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_ring < 3 {
            return Err(Error::InvalidGeometry {
                n_ring: self.n_ring,
            });
        }
        if !self.gamma_pair.is_finite() || self.gamma_pair < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma_pair",
                value: self.gamma_pair,
                constraint: "must be finite and >= 0",
            });
        }
        if !self.gamma_d.is_finite() || self.gamma_d < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma_d",
                value: self.gamma_d,
                constraint: "must be finite and >= 0",
            });
        }
        for (name, value) in [
            ("omega_pair", self.omega_pair),
            ("delta", self.delta),
            ("j_d", self.j_d),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be finite",
                });
            }
        }
        if let Gamma0Rule::Explicit(v) = self.gamma0_rule {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "gamma0",
                    value: v,
                    constraint: "explicit gamma0 must be finite and >= 0",
                });
            }
        }
        Ok(())
    }
}

/// One collective eigenvalue of the isolated ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveMode {
    /// Mode index m.
    pub m: u32,
    /// Complex eigenvalue zeta_m.
    pub zeta: Complex64,
    /// Collective shift J~_m = Re(zeta_m).
    pub j_tilde: f64,
    /// Collective width Γ~_m = -2 Im(zeta_m). May be negative under the
    /// literal diagonal conventions.
    pub gamma_tilde: f64,
}

/// Structured warning emitted when a resolved width is a nonphysical gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonphysicalGainWarning {
    /// The negative width that was produced.
    pub gamma0: f64,
}

/// Γ0 value plus an optional gain warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedGamma0 {
    pub value: f64,
    pub warning: Option<NonphysicalGainWarning>,
}

/// The hybridized bright/dark pair.
///
/// Cross-assignment follows the eigenvalue bookkeeping E+ = Re(λ-),
/// Γ+ = -2 Im(λ-) (and vice versa); after construction the labels are swapped
/// if needed so that `gamma_plus >= gamma_minus` (the bright state carries the
/// enhanced width).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridizedStates {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl HybridizedStates {
    /// Build from the two raw eigenvalues, relabeling so the bright state
    /// (larger width) is the `plus` branch.
    fn from_eigenvalues(lambda_plus: Complex64, lambda_minus: Complex64) -> Self {
        let gamma_plus = -2.0 * lambda_minus.im;
        let gamma_minus = -2.0 * lambda_plus.im;
        let (lp, lm) = if gamma_plus >= gamma_minus {
            (lambda_plus, lambda_minus)
        } else {
            (lambda_minus, lambda_plus)
        };
        HybridizedStates {
            lambda_plus: lp,
            lambda_minus: lm,
            e_plus: lm.re,
            e_minus: lp.re,
            gamma_plus: -2.0 * lm.im,
            gamma_minus: -2.0 * lp.im,
        }
    }

    /// Both eigenvalues as an unordered pair.
    pub fn eigenvalue_set(&self) -> [Complex64; 2] {
        [self.lambda_plus, self.lambda_minus]
    }

    /// Widths sanitized to magnitudes and relabeled so the first element is
    /// the larger. Returns `(gamma_plus_eff, gamma_minus_eff, sign_flipped)`;
    /// `sign_flipped` is true when either raw width was negative. Used by the
    /// pipeline that feeds the five-level branching table, which requires
    /// nonnegative widths.
    pub fn magnitude_widths(&self) -> (f64, f64, bool) {
        let flipped = self.gamma_plus < 0.0 || self.gamma_minus < 0.0;
        let a = self.gamma_plus.abs();
        let b = self.gamma_minus.abs();
        (a.max(b), a.min(b), flipped)
    }
}

/// Index of the most subradiant collective mode: N/2 for even N, (N-1)/2 odd.
pub fn subradiant_mode_index(n_ring: u32) -> Result<u32> {
    if n_ring < 3 {
        return Err(Error::InvalidGeometry { n_ring });
    }
    Ok(if n_ring.is_multiple_of(2) {
        n_ring / 2
    } else {
        (n_ring - 1) / 2
    })
}

/// Collective eigenvalue zeta_m of the isolated ring for mode `m`.
///
/// The full double sum Σ_{j,l} exp[iθ(l-j)] equals |Σ_j exp(iθ j)|²; the
/// diagonal (j = l) block contributes N terms and is adjusted per convention.
pub fn collective_eigenvalue(params: &RingParams, m: u32) -> Result<CollectiveMode> {
    params.validate()?;
    let n = params.n_ring;
    if m >= n {
        return Err(Error::ModeIndexOutOfRange {
            mode: m as i64,
            n_ring: n,
        });
    }
    let theta = 2.0 * std::f64::consts::PI * (m as f64) / (n as f64);
    let phase_sum: Complex64 = (0..n)
        .map(|j| Complex64::from_polar(1.0, theta * j as f64))
        .sum();
    let pair_sum = phase_sum.norm_sqr(); // Σ_{j,l} over all pairs, incl. diagonal
    let coupling = Complex64::new(params.omega_pair, -0.5 * params.gamma_pair);
    let n_f = n as f64;
    let zeta = match params.diagonal_convention {
        DiagonalConvention::IncludeUniformDiagonal => coupling * (pair_sum / n_f),
        DiagonalConvention::ExcludeDiagonal => coupling * ((pair_sum - n_f) / n_f),
        DiagonalConvention::SelfDecayDiagonal => {
            coupling * ((pair_sum - n_f) / n_f) + Complex64::new(0.0, -0.5 * params.gamma_pair)
        }
    };
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::Numeric {
            reason: format!("collective eigenvalue is not finite: {zeta}"),
        });
    }
    Ok(CollectiveMode {
        m,
        zeta,
        j_tilde: zeta.re,
        gamma_tilde: -2.0 * zeta.im,
    })
}

/// Resolve Γ0 from the configured rule and the collective width.
pub fn resolve_gamma0(rule: Gamma0Rule, mode: &CollectiveMode) -> Result<ResolvedGamma0> {
    match rule {
        Gamma0Rule::Explicit(v) => {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "gamma0",
                    value: v,
                    constraint: "explicit gamma0 must be finite and >= 0",
                });
            }
            Ok(ResolvedGamma0 {
                value: v,
                warning: None,
            })
        }
        Gamma0Rule::HalfCollectiveMagnitude => Ok(ResolvedGamma0 {
            value: 0.5 * mode.gamma_tilde.abs(),
            warning: None,
        }),
        Gamma0Rule::HalfCollectiveSigned => {
            let value = 0.5 * mode.gamma_tilde;
            let warning = if value < 0.0 {
                Some(NonphysicalGainWarning { gamma0: value })
            } else {
                None
            };
            Ok(ResolvedGamma0 { value, warning })
        }
    }
}

/// Hybridized pair from the closed-form eigenvalue expression,
///
/// ```text
/// λ± = 1/2 [ (J~ - Δ - (i/2)(Γ~ + Γ0)) ∓ sqrt( (J~ + Δ - (i/2)(Γ~ - Γ0))²
///            + 4 N (J_d - (i/2) Γ_d)² ) ]
/// ```
///
/// with the 1/2 spanning both terms and the square root on the principal
/// branch.
pub fn hybridize_formula(params: &RingParams, mode: &CollectiveMode) -> Result<HybridizedStates> {
    params.validate()?;
    let gamma0 = resolve_gamma0(params.gamma0_rule, mode)?.value;
    let j_t = mode.j_tilde;
    let g_t = mode.gamma_tilde;
    let a = Complex64::new(j_t - params.delta, -0.5 * (g_t + gamma0));
    let b = Complex64::new(j_t + params.delta, -0.5 * (g_t - gamma0));
    let coupling = Complex64::new(params.j_d, -0.5 * params.gamma_d);
    let radicand = b * b + 4.0 * (params.n_ring as f64) * coupling * coupling;
    let root = radicand.sqrt();
    let lambda_plus = 0.5 * (a - root);
    let lambda_minus = 0.5 * (a + root);
    check_finite_pair(lambda_plus, lambda_minus)?;
    Ok(HybridizedStates::from_eigenvalues(
        lambda_plus,
        lambda_minus,
    ))
}

/// Hybridized pair from an explicit eigensolve of the 2x2 non-Hermitian matrix
///
/// ```text
/// [ Δ - iΓ0/2          sqrt(N)(J_d - iΓ_d/2) ]
/// [ sqrt(N)(J_d - iΓ_d/2)     J~ - iΓ~/2     ]
/// ```
///
/// via the closed-form quadratic. Serves as the independent oracle for
/// [`hybridize_formula`]; note the two agree as eigenvalue sets when this
/// central diagonal entry is `-Δ - iΓ0/2` (see [`eigensolve_2x2`]).
pub fn hybridize_eigensolve(
    params: &RingParams,
    mode: &CollectiveMode,
) -> Result<HybridizedStates> {
    params.validate()?;
    let gamma0 = resolve_gamma0(params.gamma0_rule, mode)?.value;
    let central = Complex64::new(params.delta, -0.5 * gamma0);
    let ring = Complex64::new(mode.j_tilde, -0.5 * mode.gamma_tilde);
    let coupling =
        (params.n_ring as f64).sqrt() * Complex64::new(params.j_d, -0.5 * params.gamma_d);
    eigensolve_2x2(central, ring, coupling)
}

/// Eigenvalues of `[[central, coupling], [coupling, ring]]`, labeled so the
/// bright branch carries the larger width.
pub fn eigensolve_2x2(
    central: Complex64,
    ring: Complex64,
    coupling: Complex64,
) -> Result<HybridizedStates> {
    let mean = 0.5 * (central + ring);
    let half_diff = 0.5 * (central - ring);
    let root = (half_diff * half_diff + coupling * coupling).sqrt();
    let lambda_a = mean + root;
    let lambda_b = mean - root;
    check_finite_pair(lambda_a, lambda_b)?;
    // Match the formula's raw bookkeeping: the branch with the subtracted
    // root plays the lambda_plus role before relabeling.
    Ok(HybridizedStates::from_eigenvalues(lambda_b, lambda_a))
}

fn check_finite_pair(a: Complex64, b: Complex64) -> Result<()> {
    for z in [a, b] {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Numeric {
                reason: format!("hybridized eigenvalue is not finite: {z}"),
            });
        }
    }
    Ok(())
}

/// Convenience: subradiant mode, Γ0 resolution, and hybridization in one call.
/// Returns the states plus any gain warning from the Γ0 rule.
pub fn hybridize_ring(
    params: &RingParams,
) -> Result<(HybridizedStates, CollectiveMode, ResolvedGamma0)> {
    let m = subradiant_mode_index(params.n_ring)?;
    let mode = collective_eigenvalue(params, m)?;
    let gamma0 = resolve_gamma0(params.gamma0_rule, &mode)?;
    let states = hybridize_formula(params, &mode)?;
    Ok((states, mode, gamma0))
}
