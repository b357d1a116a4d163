//! The verification battery behind `ness verify`.
//!
//! Every check compares two independent routes to the same number: the
//! numeric correlation-matrix pipeline against the asymptotic formulas,
//! finite determinants against symbol integrals, many-body brute force
//! against spectral formulas. A failing module shows up as a failed check,
//! never as a panic.

use super::config::{GeometryConfig, MeasureConfig, ModelConfig, PipelineChoice, QuadratureConfig, ReservoirConfig, RunConfig, SweepConfig};
use super::figures;
use super::sweep::{run_sweep, SweepTable};
use crate::asymptotics::{BiasContext, Side};
use crate::correlation::{BuildMode, SteadyState};
use crate::error::{Error, Result};
use crate::measures::{evaluate, MeasureKind, MeasureSpec};
use crate::oracles::{self, many_body};
use crate::physics::{LatticeParams, ReservoirPair, SubsystemPair};
use crate::quadrature::QuadratureSpec;
use std::fmt;
use std::time::Instant;

/// Largest allowed normalized gap between the two pipelines.
pub const CROSS_PIPELINE_TOL: f64 = 0.01;
/// Wall-clock budget for one figure panel.
pub const PANEL_SECONDS: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub tolerance: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: u32, name: &'static str, tolerance: impl Into<String>) -> Self {
        Self {
            id,
            name,
            tolerance: tolerance.into(),
            passed: false,
            detail: String::new(),
        }
    }

    /// Records the outcome of a body that may fail with a module error.
    fn settle(mut self, outcome: Result<(bool, String)>) -> Self {
        match outcome {
            Ok((passed, detail)) => {
                self.passed = passed;
                self.detail = detail;
            }
            Err(e) => {
                self.passed = false;
                self.detail = format!("error: {e}");
            }
        }
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {} (tolerance: {}): {}", self.id, self.name, self.tolerance, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(f, "{} of {} checks passed", self.checks.len() - self.failures(), self.checks.len())
    }
}

/// Runs all ten checks. `fast` trims parameter grids and skips the panel
/// timing; tolerances are never relaxed.
pub fn verify_suite(fast: bool) -> VerifyReport {
    VerifyReport {
        checks: vec![
            cross_pipeline(fast),
            petz_agreement(fast),
            zero_temperature_identities(),
            vanishing_volume_law(fast),
            mirror_linearity(),
            polynomial_identity(fast),
            toeplitz_asymptotics(),
            moment_asymptotics(),
            brute_force(fast),
            monotonicity(),
        ],
    }
}

fn quad() -> Result<QuadratureSpec<f64>> {
    QuadratureSpec::new(1e-10, 24)
}

fn reservoirs(mu_left: f64, temp_left: f64, mu_right: f64, temp_right: f64) -> ReservoirConfig {
    ReservoirConfig {
        mu_left,
        temp_left,
        mu_right,
        temp_right,
    }
}

fn state(eps0: f64, r: ReservoirConfig) -> Result<SteadyState<f64>> {
    let res = ReservoirPair::new(r.mu_left, r.temp_left, r.mu_right, r.temp_right)?;
    SteadyState::resonant_level(LatticeParams::new(1.0, 0)?, res, eps0)
}

fn context(eps0: f64, r: ReservoirConfig) -> Result<BiasContext<f64>> {
    Ok(BiasContext::new(state(eps0, r)?, quad()?))
}

/// A one-row distance sweep through the same code path as `ness sweep`.
fn single_point(eps0: f64, r: ReservoirConfig, measures: Vec<MeasureConfig>, delta_d: i64) -> RunConfig {
    RunConfig {
        name: format!("eps0_{eps0}"),
        hopping: 1.0,
        impurity_halfwidth: 0,
        model: ModelConfig::ResonantLevel { eps0 },
        reservoirs: r,
        geometry: GeometryConfig {
            ell_left: 100,
            ell_right: 200,
            d_min: None,
        },
        sweep: SweepConfig::Distance {
            start: delta_d,
            stop: delta_d,
            step: 1,
        },
        measures,
        pipeline: PipelineChoice::Both,
        quadrature: QuadratureConfig::default(),
        output: None,
    }
}

fn measure(kind: &str, n: Option<f64>) -> MeasureConfig {
    MeasureConfig { kind: kind.into(), n }
}

/// Largest normalized numeric/analytic gap in a table, with its label.
fn worst_gap(table: &SweepTable) -> Result<(f64, String)> {
    let mut worst = (0.0_f64, String::new());
    for row in &table.rows {
        if let Some(e) = &row.error {
            return Err(Error::InvalidParameter(format!("row Δd = {}: {e}", row.delta_d)));
        }
        for (cell, label) in row.cells.iter().zip(&table.labels) {
            let (Some(a), Some(b)) = (cell.numeric_norm, cell.analytic_norm) else {
                return Err(Error::InvalidParameter(format!("{label}: missing pipeline value")));
            };
            let gap = (a - b).abs();
            if !(gap <= worst.0) {
                worst = (gap, label.clone());
            }
        }
    }
    Ok(worst)
}

/// 1. Numeric and analytic normalized MI and negativity at maximal overlap
/// (`Δd = 50` centres the plateau for `ℓ_L = 100`, `ℓ_R = 200`).
pub fn cross_pipeline(fast: bool) -> Check {
    let check = Check::new(1, "cross-pipeline MI and negativity", format!("|Δ normalized| < {CROSS_PIPELINE_TOL}, panel < {PANEL_SECONDS} s"));
    let body = || -> Result<(bool, String)> {
        let eps: &[f64] = if fast { &[1.0] } else { &[0.5, 1.0, 2.0] };
        let regimes = [("temperature", reservoirs(0.0, 2.0, 0.0, 1.0)), ("chemical", reservoirs(1.5, 1.0, -1.5, 1.0))];
        let mut worst = (0.0_f64, String::new());
        for (label, r) in regimes {
            for &e in eps {
                let cfg = single_point(e, r, vec![measure("mi", None), measure("negativity", None)], 50);
                let (gap, m) = worst_gap(&run_sweep(&cfg)?)?;
                if !(gap <= worst.0) {
                    worst = (gap, format!("{m}, {label} bias, eps0 = {e}"));
                }
            }
        }
        let mut passed = worst.0 < CROSS_PIPELINE_TOL;
        let mut detail = format!("max gap {:.3e} ({})", worst.0, worst.1);
        if !fast {
            let start = Instant::now();
            let tables = figures::run_figure("2a")?;
            let secs = start.elapsed().as_secs_f64();
            let failed: usize = tables.iter().map(|(_, t)| t.failed_rows()).sum();
            passed &= secs < PANEL_SECONDS && failed == 0;
            detail.push_str(&format!("; panel 2a in {secs:.1} s with {failed} failed rows"));
        }
        Ok((passed, detail))
    };
    check.settle(body())
}

/// 2. Petz Rényi MI for `n = 2` and `n = 1/2` under both bias types.
pub fn petz_agreement(fast: bool) -> Check {
    let check = Check::new(2, "cross-pipeline PRMI", format!("|Δ normalized| < {CROSS_PIPELINE_TOL}, imaginary residue < 1e-8"));
    let body = || -> Result<(bool, String)> {
        let mut regimes = vec![("temperature", reservoirs(0.0, 1.5, 0.0, 0.5))];
        if !fast {
            regimes.push(("chemical", reservoirs(1.0, 1.0, 0.0, 1.0)));
        }
        let (mut gap, mut residue) = (0.0_f64, 0.0_f64);
        for (_, r) in regimes {
            let cfg = single_point(1.0, r, vec![measure("prmi", Some(2.0)), measure("prmi", Some(0.5))], 50);
            let table = run_sweep(&cfg)?;
            gap = gap.max(worst_gap(&table)?.0);
            residue = residue.max(table.rows.iter().map(|r| r.diagnostics.imag_residue).fold(0.0, f64::max));
        }
        Ok((
            gap < CROSS_PIPELINE_TOL && residue < 1e-8,
            format!("max gap {gap:.3e}, max imaginary residue {residue:.3e}"),
        ))
    };
    check.settle(body())
}

/// 3. Zero-temperature relations between the analytic densities.
pub fn zero_temperature_identities() -> Check {
    let check = Check::new(3, "zero-temperature identities", "1e-9");
    let body = || -> Result<(bool, String)> {
        let mut ctx = context(1.0, reservoirs(1.0, 0.0, -0.5, 0.0))?;
        ctx.quad = ctx.quad.with_tolerance(1e-13);
        let neg = ctx.negativity_asymptotic(1)?.density;
        let rmi = |n: f64| ctx.rmi_asymptotic(n, 1).map(|v| v.density);
        let prmi = |n: f64| ctx.prmi_asymptotic(n, 1).map(|v| v.density);
        let gaps = [
            ("E − I(1/2)/2", neg - 0.5 * rmi(0.5)?),
            ("D(1/2) − I(2)", prmi(0.5)? - rmi(2.0)?),
            ("D(2) − I(−1)", prmi(2.0)? - rmi(-1.0)?),
            ("E − D(5/4)/2", neg - 0.5 * prmi(1.25)?),
        ];
        let worst = gaps.iter().map(|g| g.1.abs()).fold(0.0, f64::max);
        let detail = gaps.iter().map(|(n, g)| format!("{n}: {:.1e}", g.abs())).collect::<Vec<_>>().join(", ");
        Ok((worst < 1e-9 && neg > 0.0, detail))
    };
    check.settle(body())
}

fn numeric_pair(st: &SteadyState<f64>, ell: i64) -> Result<(f64, f64)> {
    let geom = SubsystemPair::new(0, ell, 0, ell, 0)?;
    let c = st.build_subsystems(&geom, BuildMode::LongRange, &quad()?)?;
    let mi = evaluate(&MeasureSpec::new(MeasureKind::MutualInformation, None)?, &c, ell as usize)?.value;
    let neg = evaluate(&MeasureSpec::new(MeasureKind::Negativity, None)?, &c, ell as usize)?.value;
    Ok((mi, neg))
}

/// 4. No volume law without a bias or without scattering.
pub fn vanishing_volume_law(fast: bool) -> Check {
    let check = Check::new(4, "vanishing volume law", "ℓ_mirror coefficients < 1e-12, numeric < 5 at ℓ = 100, slope < 1e-3");
    let body = || -> Result<(bool, String)> {
        let cases = [("equal reservoirs", 1.0, reservoirs(0.0, 1.0, 0.0, 1.0)), ("eps0 = 0", 0.0, reservoirs(0.0, 2.0, 0.0, 1.0))];
        let lengths: &[i64] = if fast { &[50, 100] } else { &[50, 100, 200] };
        let (mut density, mut value, mut slope) = (0.0_f64, 0.0_f64, 0.0_f64);
        for (_, eps0, r) in cases {
            let ctx = context(eps0, r)?;
            // coefficient of ℓ_mirror: unit intervals with and without overlap
            let overlap = SubsystemPair::new(0, 1, 0, 1, 0)?;
            let apart = SubsystemPair::new(0, 1, 5, 1, 0)?;
            let kinds = [
                (MeasureKind::MutualInformation, None),
                (MeasureKind::RenyiMutualInformation, Some(2.0)),
                (MeasureKind::PetzRenyiMutualInformation, Some(2.0)),
                (MeasureKind::PetzRenyiMutualInformation, Some(0.5)),
                (MeasureKind::Negativity, None),
                (MeasureKind::RenyiNegativity, Some(2.0)),
            ];
            for (kind, n) in kinds {
                let slope = ctx.bipartite(kind, n, &overlap)?.total - ctx.bipartite(kind, n, &apart)?.total;
                density = density.max(slope.abs());
            }
            let values: Vec<(f64, f64)> = lengths.iter().map(|&l| numeric_pair(&ctx.state, l)).collect::<Result<_>>()?;
            let at_100 = values[1];
            value = value.max(at_100.0.abs()).max(at_100.1.abs());
            for (w, l) in values.windows(2).zip(lengths.windows(2)) {
                let dl = (l[1] - l[0]) as f64;
                slope = slope.max(((w[1].0 - w[0].0) / dl).abs()).max(((w[1].1 - w[0].1) / dl).abs());
            }
        }
        Ok((
            density < 1e-12 && value < 5.0 && slope < 1e-3,
            format!("max ℓ_mirror coefficient {density:.1e}, max value at ℓ = 100 {value:.3}, max slope {slope:.1e}"),
        ))
    };
    check.settle(body())
}

/// 5. MI doubles with `ℓ_mirror` and ignores a common shift of both intervals.
pub fn mirror_linearity() -> Check {
    let check = Check::new(5, "mirror-length linearity and translation invariance", "ratios within 3% of 2, shift < 1e-9");
    let body = || -> Result<(bool, String)> {
        let st = state(1.0, reservoirs(0.0, 2.0, 0.0, 1.0))?;
        let mi = |geom: &SubsystemPair| -> Result<f64> {
            let c = st.build_subsystems(geom, BuildMode::LongRange, &quad()?)?;
            Ok(evaluate(&MeasureSpec::new(MeasureKind::MutualInformation, None)?, &c, geom.ell_left as usize)?.value)
        };
        let values: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&l| mi(&SubsystemPair::new(0, l, 0, l, 0)?))
            .collect::<Result<_>>()?;
        let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
        let ratio_err = ratios.iter().map(|r| (r - 2.0).abs() / 2.0).fold(0.0, f64::max);
        let base = SubsystemPair::new(30, 100, 0, 200, 0)?;
        let shift = (mi(&base.shifted(1000)?)? - mi(&base)?).abs();
        Ok((
            ratio_err < 0.03 && shift < 1e-9,
            format!("ratios {:.4}, {:.4}; shift changes MI by {shift:.1e}", ratios[0], ratios[1]),
        ))
    };
    check.settle(body())
}

/// 6. The product form of the negativity polynomial equals its four-term form.
pub fn polynomial_identity(fast: bool) -> Check {
    let check = Check::new(6, "polynomial identity", "|X − Y| < 1e-10, roots < 1e-9");
    let samples = if fast { 200 } else { 1000 };
    let body = || -> Result<(bool, String)> {
        let (mut diff, mut root) = (0.0_f64, 0.0_f64);
        for n in [2, 4, 6] {
            let r = oracles::xn_yn_identity::<f64>(n, samples, 0x5eed + n as u64)?;
            diff = diff.max(r.max_difference);
            root = root.max(r.max_root_residual);
        }
        Ok((
            diff < 1e-10 && root < 1e-9,
            format!("{samples} samples per n: max difference {diff:.1e}, max root residual {root:.1e}"),
        ))
    };
    check.settle(body())
}

/// 7. Finite log-determinants approach their symbol integrals.
pub fn toeplitz_asymptotics() -> Check {
    let check = Check::new(7, "Toeplitz determinant asymptotics", "decreasing over ℓ = 50, 100, 200, final < 2%");
    let body = || -> Result<(bool, String)> {
        let q = quad()?;
        let lengths = [50, 100, 200];
        let mirror = oracles::mirror_szego_widom_check(&state(1.0, reservoirs(0.0, 2.0, 0.0, 1.0))?, 0.5, 2, &lengths, &q)?;
        let prmi_state = state(1.0, reservoirs(0.0, 1.5, 0.0, 0.5))?;
        let pairs = oracles::prmi_symbol_pairs(&prmi_state.symbol(), 2)?;
        let petz = oracles::generalized_sw_check(&pairs, &lengths, &q)?;
        let fmt_errs = |r: &oracles::DeterminantReport<f64>| {
            r.relative_errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" > ")
        };
        Ok((
            mirror.is_decreasing() && mirror.final_error() < 0.02 && petz.is_decreasing(),
            format!("mirror: {}; PRMI pair: {}", fmt_errs(&mirror), fmt_errs(&petz)),
        ))
    };
    check.settle(body())
}

/// 8. Single-interval moment slopes and the decomposition of the union moment.
pub fn moment_asymptotics() -> Check {
    let check = Check::new(8, "moment asymptotics", "slopes within 2%, decomposition error decreasing");
    let body = || -> Result<(bool, String)> {
        let ctx = context(1.0, reservoirs(0.0, 2.0, 0.0, 1.0))?;
        let mut slope = 0.0_f64;
        for side in [Side::Left, Side::Right] {
            for p in 1..=4 {
                let r = oracles::moment_slope_check(&ctx, side, p, (100, 200), 0, BuildMode::LongRange)?;
                slope = slope.max(r.relative_error);
            }
        }
        let small = SubsystemPair::new(60, 50, 0, 100, 0)?;
        let large = SubsystemPair::new(120, 100, 0, 200, 0)?;
        let mut decreasing = true;
        let mut errs = Vec::new();
        for p in 2..=4 {
            let a = oracles::moment_decomposition_check(&ctx.state, &small, p, BuildMode::LongRange, &ctx.quad)?.relative_error;
            let b = oracles::moment_decomposition_check(&ctx.state, &large, p, BuildMode::LongRange, &ctx.quad)?.relative_error;
            decreasing &= b < a;
            errs.push(format!("p = {p}: {a:.2e} → {b:.2e}"));
        }
        Ok((
            slope < 0.02 && decreasing,
            format!("max slope error {slope:.1e}; decomposition {}", errs.join(", ")),
        ))
    };
    check.settle(body())
}

/// 9. Spectral formulas against explicit many-body density matrices.
pub fn brute_force(fast: bool) -> Check {
    let check = Check::new(9, "many-body brute force", "1e-8");
    let samples = if fast { 10 } else { 50 };
    let body = || -> Result<(bool, String)> {
        let r = many_body::brute_force_check(7, samples)?;
        Ok((r.max() < 1e-8, format!("{samples} three-mode states: max deviation {:.1e}", r.max())))
    };
    check.settle(body())
}

/// Impurity energies of the ordering scan.
pub const ORDERING_EPS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Index pairs of `ORDERING_EPS` whose MI and negativity densities are
/// ordered oppositely.
pub fn opposite_orderings(r: ReservoirConfig) -> Result<Vec<(usize, usize)>> {
    let vals: Vec<(f64, f64)> = ORDERING_EPS
        .iter()
        .map(|&e| {
            let ctx = context(e, r)?;
            Ok((ctx.mi_asymptotic(1)?.density, ctx.negativity_asymptotic(1)?.density))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if (vals[i].0 - vals[j].0) * (vals[i].1 - vals[j].1) < 0.0 {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Chemical potentials of the zero-temperature ordering scan.
pub const ZERO_T_WINDOWS: [(f64, f64); 4] = [(0.5, -0.5), (1.0, 0.0), (1.5, -1.5), (1.9, 1.0)];

/// 10. MI and negativity may order impurity energies differently under a
/// temperature bias, never at zero temperature.
pub fn monotonicity() -> Check {
    let check = Check::new(10, "MI/negativity ordering", "exists at finite T, absent at T = 0");
    let body = || -> Result<(bool, String)> {
        let warm = opposite_orderings(reservoirs(0.0, 2.0, 0.0, 1.0))?;
        let mut cold = Vec::new();
        for (ml, mr) in ZERO_T_WINDOWS {
            for (i, j) in opposite_orderings(reservoirs(ml, 0.0, mr, 0.0))? {
                cold.push(format!("eps0 {} vs {} at mu = ({ml}, {mr})", ORDERING_EPS[i], ORDERING_EPS[j]));
            }
        }
        let warm_text: Vec<String> = warm.iter().map(|&(i, j)| format!("{} vs {}", ORDERING_EPS[i], ORDERING_EPS[j])).collect();
        Ok((
            !warm.is_empty() && cold.is_empty(),
            format!(
                "finite T: {} opposite pairs [{}]; T = 0: {} opposite pairs [{}]",
                warm.len(),
                warm_text.join(", "),
                cold.len(),
                cold.join(", ")
            ),
        ))
    };
    check.settle(body())
}
