use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use finesteer_core::criteria::{chsh_max, saunders_bound, MeasurementSet};
use finesteer_core::keyrate::{
    self, key_rate_bounds, key_rate_report, optimize_monogamy, worst_case_charlie, Conditioning,
    TripartiteSetting,
};
use finesteer_core::measure::{Direction, Outcome};
use finesteer_core::optimizer::{maximize_over_directions, GridSpec};
use finesteer_core::qcore::{bloch_to_state, BlochVector, DensityMatrix};
use finesteer_core::statezoo::{
    pure_alpha, tripartite_family, werner, SchmidtParam, TripartiteFamily, WernerParam,
};
use finesteer_core::steering::{
    fur_game_max, fur_game_value, optimize_alice, scenario1_bound, scenario2_bound,
    steering_functional, SteeringSetting,
};
use finesteer_core::Error;

use crate::output::{emit, opt_cell, render, sig10, Row};
use crate::{CharlieArg, Cli, CliError, Command, ConditioningArg, GlobalOpts, KeyState, MonogamyFamily, PureMode};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if !(g.tolerance.is_finite() && g.tolerance >= 0.0) {
        return Err(CliError::Invalid(format!("tolerance must be a finite non-negative number, got {}", g.tolerance)));
    }
    match &cli.command {
        Command::Fur { p, q, win } => fur(g, *p, *q, *win),
        Command::Werner { p_min, p_max, steps } => werner_sweep(g, *p_min, *p_max, *steps),
        Command::Pure { alpha_min, alpha_max, steps, mode } => pure_sweep(g, *alpha_min, *alpha_max, *steps, *mode),
        Command::Monogamy { family, trials, conditioning } => monogamy(g, *family, *trials, *conditioning),
        Command::Keyrate { k, state, alpha, q, charlie } => match (k, state) {
            (Some(k), _) => keyrate_from_k(g, *k),
            (None, Some(state)) => keyrate_from_state(g, *state, *alpha, *q, *charlie),
            (None, None) => Err(CliError::Invalid("give either --k or --state".into())),
        },
        Command::Saunders { n } => saunders(g, *n),
    }
}

fn write_rows<R: Row>(g: &GlobalOpts, rows: &[R]) -> Result<(), CliError> {
    emit(&render(rows, g.format)?, g.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FurReport {
    win: u8,
    analytic: f64,
    optimized: f64,
    difference: f64,
    maximizer_x: f64,
    maximizer_y: f64,
    maximizer_z: f64,
}

impl Row for FurReport {
    const HEADER: &'static [&'static str] =
        &["win", "analytic", "optimized", "difference", "maximizer_x", "maximizer_y", "maximizer_z"];
    fn cells(&self) -> Vec<String> {
        let mut v = vec![self.win.to_string()];
        v.extend(
            [self.analytic, self.optimized, self.difference, self.maximizer_x, self.maximizer_y, self.maximizer_z]
                .map(sig10),
        );
        v
    }
}

fn fur(g: &GlobalOpts, p: Direction, q: Direction, win: Outcome) -> Result<(), CliError> {
    let analytic = fur_game_max(p, q, win).value;
    // the maximum is attained on a pure state, so the sphere suffices
    let opt = maximize_over_directions(
        |d| fur_game_value(&bloch_to_state(BlochVector::from_array(d[0].unit())?), p, q, win),
        1,
        GridSpec::default(),
    )?;
    let [x, y, z] = opt.best_directions[0].unit();
    let report = FurReport {
        win: win.bit(),
        analytic,
        optimized: opt.best_value,
        difference: opt.best_value - analytic,
        maximizer_x: x,
        maximizer_y: y,
        maximizer_z: z,
    };
    write_rows(g, &[report])
}

// ---------------------------------------------------------------------------

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SweepRecord {
    param_name: &'static str,
    param_value: f64,
    functional: Option<f64>,
    #[serde(rename = "bound_I")]
    bound_i: f64,
    #[serde(rename = "bound_II")]
    bound_ii: f64,
    chsh: f64,
    #[serde(rename = "verdict_I")]
    verdict_i: bool,
    #[serde(rename = "verdict_II")]
    verdict_ii: bool,
}

impl SweepRecord {
    fn new(param_name: &'static str, param_value: f64, functional: Option<f64>, chsh: f64, slack: f64) -> Self {
        let (bound_i, bound_ii) = (scenario1_bound(), scenario2_bound());
        let beats = |bound: f64| functional.is_some_and(|f| f > bound + slack);
        Self {
            param_name,
            param_value,
            functional,
            bound_i,
            bound_ii,
            chsh,
            verdict_i: beats(bound_i),
            verdict_ii: beats(bound_ii),
        }
    }
}

impl Row for SweepRecord {
    const HEADER: &'static [&'static str] =
        &["param_name", "param_value", "functional", "bound_I", "bound_II", "chsh", "verdict_I", "verdict_II"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.param_name.to_string(),
            sig10(self.param_value),
            opt_cell(self.functional),
            sig10(self.bound_i),
            sig10(self.bound_ii),
            sig10(self.chsh),
            self.verdict_i.to_string(),
            self.verdict_ii.to_string(),
        ]
    }
}

fn grid(name: &str, lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(CliError::Invalid(format!("need 0 ≤ {name}-min ≤ {name}-max ≤ 1, got [{lo}, {hi}]")));
    }
    if steps == 0 {
        return Err(CliError::Invalid("steps must be at least 1".into()));
    }
    Ok((0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect())
}

fn zx_setting() -> SteeringSetting {
    SteeringSetting::zx(Outcome::Up, Outcome::Up)
}

fn werner_sweep(g: &GlobalOpts, lo: f64, hi: f64, steps: usize) -> Result<(), CliError> {
    let points = grid("p", lo, hi, steps)?;
    let rows = points
        .par_iter()
        .map(|&p| {
            let rho = werner(WernerParam::new(p)?);
            let functional = steering_functional(&rho, &zx_setting())?;
            Ok(SweepRecord::new("p", p, Some(functional), chsh_max(&rho)?, g.tolerance))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_rows(g, &rows)
}

fn pure_sweep(g: &GlobalOpts, lo: f64, hi: f64, steps: usize, mode: PureMode) -> Result<(), CliError> {
    let points = grid("alpha", lo, hi, steps)?;
    let results = points
        .par_iter()
        .map(|&alpha| -> Result<(SweepRecord, Option<String>), Error> {
            let rho = pure_alpha(SchmidtParam::new(alpha)?).to_density();
            let chsh = chsh_max(&rho)?;
            let caveat = || {
                format!("alpha={}: product state, Alice's conditioning outcome has zero probability; functional omitted", sig10(alpha))
            };
            let (functional, note) = match mode {
                PureMode::Samebasis => match steering_functional(&rho, &zx_setting()) {
                    Ok(v) => (Some(v), None),
                    Err(Error::DegenerateCondition { .. }) => (None, Some(caveat())),
                    Err(e) => return Err(e),
                },
                // the optimal θt = arccos(1 − 2α) sits on a zero-probability outcome
                PureMode::Optimal if alpha == 0.0 || alpha == 1.0 => (None, Some(caveat())),
                PureMode::Optimal => (Some(optimize_alice(&rho, &zx_setting(), GridSpec::default())?.value), None),
            };
            Ok((SweepRecord::new("alpha", alpha, functional, chsh, g.tolerance), note))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    for note in results.iter().filter_map(|(_, n)| n.as_ref()) {
        eprintln!("note: {note}");
    }
    let rows: Vec<SweepRecord> = results.into_iter().map(|(r, _)| r).collect();
    write_rows(g, &rows)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MonogamyRow {
    trial: usize,
    seed: Option<u64>,
    t_ab: f64,
    t_bc: f64,
    average: f64,
    satisfied: bool,
}

impl Row for MonogamyRow {
    const HEADER: &'static [&'static str] = &["trial", "seed", "t_ab", "t_bc", "average", "satisfied"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            sig10(self.t_ab),
            sig10(self.t_bc),
            sig10(self.average),
            self.satisfied.to_string(),
        ]
    }
}

fn conditioning(arg: ConditioningArg) -> Conditioning {
    match arg {
        ConditioningArg::Averaged => Conditioning::OutcomeAveraged,
        ConditioningArg::Fixed => Conditioning::FixedOutcome,
    }
}

fn require_seed(g: &GlobalOpts, what: &str) -> Result<u64, CliError> {
    g.seed.ok_or_else(|| CliError::Invalid(format!("{what} needs an explicit --seed")))
}

fn monogamy(g: &GlobalOpts, family: MonogamyFamily, trials: usize, cond: ConditioningArg) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Invalid("trials must be at least 1".into()));
    }
    let master = match family {
        MonogamyFamily::Random => Some(require_seed(g, "--family random")?),
        _ => None,
    };
    let mode = conditioning(cond);
    let base = TripartiteSetting::zx(Outcome::Up, Outcome::Up, Outcome::Up);
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = master.map(|m| m.wrapping_add(trial as u64));
            let kind = match family {
                MonogamyFamily::Ghz => TripartiteFamily::Ghz,
                MonogamyFamily::W => TripartiteFamily::W,
                MonogamyFamily::Product => TripartiteFamily::ProductExtension(SchmidtParam::new(0.5)?),
                MonogamyFamily::Random => TripartiteFamily::RandomPure { seed: seed.expect("seeded") },
            };
            let rho = tripartite_family(kind)?;
            let c = optimize_monogamy(&rho, &base, mode, GridSpec::default())?.check;
            Ok(MonogamyRow { trial, seed, t_ab: c.t_ab, t_bc: c.t_bc, average: c.average, satisfied: c.satisfied })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_rows(g, &rows)?;

    let max = rows.iter().map(|r| r.average).fold(f64::NEG_INFINITY, f64::max);
    let violations = rows.iter().filter(|r| !r.satisfied).count();
    eprintln!(
        "max average {} over {trials} trial(s), bound {}, violations {violations}",
        sig10(max),
        sig10(scenario1_bound())
    );
    if violations > 0 {
        return Err(CliError::Numerical(format!("monogamy bound exceeded in {violations} trial(s)")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct KeyRateRow {
    k: f64,
    logratio_bits: Option<f64>,
    linear_bits: Option<f64>,
    t_ab: Option<f64>,
    t_bc: Option<f64>,
    rate_exact_bits: Option<f64>,
    linear_at_max: f64,
    reference_rate_at_max: f64,
    reference_linear_at_max: f64,
    note: String,
}

impl Row for KeyRateRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "logratio_bits",
        "linear_bits",
        "t_ab",
        "t_bc",
        "rate_exact_bits",
        "linear_at_max",
        "reference_rate_at_max",
        "reference_linear_at_max",
        "note",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            sig10(self.k),
            opt_cell(self.logratio_bits),
            opt_cell(self.linear_bits),
            opt_cell(self.t_ab),
            opt_cell(self.t_bc),
            opt_cell(self.rate_exact_bits),
            sig10(self.linear_at_max),
            sig10(self.reference_rate_at_max),
            sig10(self.reference_linear_at_max),
            self.note.clone(),
        ]
    }
}

fn discrepancy_note() -> String {
    format!(
        "at maximal violation the linear bound evaluates to {} while the published figure is {}; the log-ratio bound gives {} against a published {}",
        sig10(keyrate::linear_bound(keyrate::MAX_VIOLATION)),
        sig10(keyrate::REFERENCE_LINEAR_AT_MAX),
        sig10(keyrate::logratio_bound(keyrate::MAX_VIOLATION)),
        sig10(keyrate::REFERENCE_RATE_AT_MAX),
    )
}

fn key_row(k: f64) -> KeyRateRow {
    let bounds = key_rate_bounds(k).ok();
    KeyRateRow {
        k,
        logratio_bits: bounds.map(|b| b.0),
        linear_bits: bounds.map(|b| b.1),
        t_ab: None,
        t_bc: None,
        rate_exact_bits: None,
        linear_at_max: keyrate::linear_bound(keyrate::MAX_VIOLATION),
        reference_rate_at_max: keyrate::REFERENCE_RATE_AT_MAX,
        reference_linear_at_max: keyrate::REFERENCE_LINEAR_AT_MAX,
        note: discrepancy_note(),
    }
}

fn keyrate_from_k(g: &GlobalOpts, k: f64) -> Result<(), CliError> {
    key_rate_bounds(k)?;
    write_rows(g, &[key_row(k)])
}

fn keyrate_from_state(g: &GlobalOpts, state: KeyState, alpha: f64, q: f64, charlie: CharlieArg) -> Result<(), CliError> {
    let kind = match state {
        KeyState::Ghz => TripartiteFamily::Ghz,
        KeyState::W => TripartiteFamily::W,
        KeyState::Product => TripartiteFamily::ProductExtension(SchmidtParam::new(alpha)?),
        KeyState::Dephased => TripartiteFamily::DephasedBellPurified(q),
        KeyState::Random => TripartiteFamily::RandomPure { seed: require_seed(g, "--state random")? },
    };
    let rho: DensityMatrix = tripartite_family(kind)?;
    let mode = Conditioning::OutcomeAveraged;
    let base = TripartiteSetting::zx(Outcome::Up, Outcome::Up, Outcome::Up);
    let alice = optimize_monogamy(&rho, &base, mode, GridSpec::default())?.setting;
    let ts = match charlie {
        CharlieArg::Copy => TripartiteSetting { charlie_s: Direction::Z, charlie_t: Direction::X, ..alice },
        CharlieArg::Worst => worst_case_charlie(&rho, &alice, GridSpec::new(PI / 8.0, 4)?)?.0,
    };
    let report = key_rate_report(&rho, &ts, mode)?;
    let mut row = key_row(report.k_violation);
    if row.logratio_bits.is_none() {
        row.note = format!("no violation (k < 0), bounds not applicable; {}", row.note);
    }
    row.t_ab = Some(report.t_ab);
    row.t_bc = Some(report.t_bc);
    row.rate_exact_bits = Some(report.rate_exact_bits);
    write_rows(g, &[row])
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SaundersRow {
    n: usize,
    c_n: f64,
    werner_threshold_p: f64,
}

impl Row for SaundersRow {
    const HEADER: &'static [&'static str] = &["n", "c_n", "werner_threshold_p"];
    fn cells(&self) -> Vec<String> {
        vec![self.n.to_string(), sig10(self.c_n), sig10(self.werner_threshold_p)]
    }
}

fn saunders(g: &GlobalOpts, n: usize) -> Result<(), CliError> {
    if !(2..=3).contains(&n) {
        return Err(CliError::Invalid(format!("--n must be 2 or 3, got {n}")));
    }
    let c_n = saunders_bound(&MeasurementSet::standard(n)?)?;
    // the Werner left-hand side equals p, so the threshold is C_n itself
    write_rows(g, &[SaundersRow { n, c_n, werner_threshold_p: c_n }])
}
