use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gkp_channel::channel::{
    apply_channel, averaged_conditional, chi_conditional, fidelity_sweep, replacement_channel, ChannelParams,
    HeterodyneKernel, ProcessMatrix, PureLossKernel, QuadratureSpec, QubitState, P_PLUS_EVEN, P_PLUS_ODD,
};
use gkp_channel::fock::{oracle_averaged_conditional, oracle_averaged_pure_loss, OracleKernel, OraclePureLoss};
use gkp_channel::gkp::{PauliIndex, Syndrome};
use gkp_channel::loss::HeraldOutcome;
use gkp_channel::validate::{self, ValidateConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::herald::{HeraldSpec, Range, SyndromeArg};
use crate::output::{self, num, ChannelReport, Computed, QuadratureInfo, CHANNEL_SCHEMA, WARNINGS_SCHEMA};
use crate::svg::{self, Scale};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<gkp_channel::Error> for Failure {
    fn from(e: gkp_channel::Error) -> Self {
        match e {
            gkp_channel::Error::Domain(_) | gkp_channel::Error::DegenerateParameters => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// What a command produced besides its files.
#[derive(Debug, Default)]
pub struct Outcome {
    pub warnings: Vec<String>,
    pub failed: bool,
}

impl Outcome {
    fn warn(warning: Option<String>) -> Self {
        Self {
            warnings: warning.into_iter().collect(),
            failed: false,
        }
    }
}

pub struct OracleChoice {
    pub enabled: bool,
    pub cutoff: Option<usize>,
}

pub struct QuadChoice {
    pub order: usize,
    pub tol: f64,
    pub check: bool,
}

impl QuadChoice {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            order: self.order,
            check: self.check,
            tol: self.tol,
        }
    }
}

pub struct Outputs {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub raw: bool,
}

fn params(beta: f64, gamma: f64) -> CliResult<ChannelParams> {
    Ok(ChannelParams::new(beta, gamma)?)
}

fn syndrome(arg: SyndromeArg) -> CliResult<Syndrome> {
    Ok(Syndrome::from_cell_point(arg.0, arg.1)?)
}

/// The limit channel when the loss mode swallows everything and only the
/// herald's photon parity survives.
fn complete_loss_channel(herald: &HeraldOutcome) -> CliResult<ProcessMatrix> {
    let p = match *herald {
        HeraldOutcome::None => P_PLUS_EVEN,
        HeraldOutcome::PhotonCount(j) if j % 2 == 0 => P_PLUS_EVEN,
        HeraldOutcome::PhotonCount(_) => P_PLUS_ODD,
        _ => {
            return Err(Failure::Usage(
                "gamma = 1 is only available unheralded or with a photon-count herald".into(),
            ))
        }
    };
    Ok(replacement_channel(p)?)
}

/// Evaluates the channel at one syndrome for fixed parameters and herald.
enum PointChannel {
    Heterodyne(HeterodyneKernel, Complex64),
    Photon(HeterodyneKernel, usize),
    PureLoss(PureLossKernel),
    Oracle(OracleKernel),
    OraclePureLoss(OraclePureLoss),
    Fixed(ProcessMatrix),
}

impl PointChannel {
    fn new(params: &ChannelParams, herald: &HeraldOutcome, oracle: &OracleChoice) -> CliResult<Self> {
        if params.is_complete_loss() {
            return Ok(PointChannel::Fixed(complete_loss_channel(herald)?));
        }
        if oracle.enabled {
            return Ok(match herald {
                HeraldOutcome::None if params.gamma > 0.0 => {
                    PointChannel::OraclePureLoss(OraclePureLoss::new(params, oracle.cutoff)?)
                }
                h => PointChannel::Oracle(OracleKernel::new(h, params, oracle.cutoff)?),
            });
        }
        Ok(match *herald {
            HeraldOutcome::Heterodyne(mu) => PointChannel::Heterodyne(HeterodyneKernel::new(params)?, mu),
            HeraldOutcome::PhotonCount(j) => PointChannel::Photon(HeterodyneKernel::new(params)?, j),
            HeraldOutcome::None if params.gamma == 0.0 => {
                PointChannel::Heterodyne(HeterodyneKernel::new(params)?, Complex64::new(0.0, 0.0))
            }
            HeraldOutcome::None => PointChannel::PureLoss(PureLossKernel::new(params)?),
            HeraldOutcome::Homodyne { .. } => {
                return Err(Failure::Usage(
                    "homodyne heralds have no closed form; add --oracle to use the Fock-basis computation".into(),
                ))
            }
        })
    }

    fn chi(&self, m: &Syndrome) -> CliResult<ProcessMatrix> {
        Ok(match self {
            PointChannel::Heterodyne(k, mu) => chi_conditional(&k.heterodyne_vector(*mu, m)?),
            PointChannel::Photon(k, j) => chi_conditional(&k.photon_vector(*j, m)?),
            PointChannel::PureLoss(k) => k.matrix(m)?,
            PointChannel::Oracle(k) => chi_conditional(&k.bloch_vector(m)),
            PointChannel::OraclePureLoss(k) => k.chi(m),
            PointChannel::Fixed(chi) => *chi,
        })
    }
}

fn averaged(
    params: &ChannelParams,
    herald: &HeraldOutcome,
    quad: &QuadChoice,
    oracle: &OracleChoice,
) -> CliResult<Computed> {
    if params.is_complete_loss() {
        let chi = complete_loss_channel(herald)?;
        return Ok(Computed {
            raw: chi,
            normalized: chi,
            order: 0,
            est_error: None,
            warning: None,
        });
    }
    let spec = quad.spec();
    let avg = if oracle.enabled {
        match herald {
            HeraldOutcome::None if params.gamma > 0.0 => oracle_averaged_pure_loss(params, spec, oracle.cutoff)?,
            h => oracle_averaged_conditional(h, params, spec, oracle.cutoff)?,
        }
    } else {
        if matches!(herald, HeraldOutcome::Homodyne { .. }) {
            return Err(Failure::Usage(
                "homodyne heralds have no closed form; add --oracle to use the Fock-basis computation".into(),
            ));
        }
        averaged_conditional(params, herald, spec)?
    };
    Ok(avg.into())
}

fn at_point(
    params: &ChannelParams,
    herald: &HeraldOutcome,
    m: &Syndrome,
    oracle: &OracleChoice,
) -> CliResult<Computed> {
    let raw = PointChannel::new(params, herald, oracle)?.chi(m)?;
    Ok(Computed {
        raw,
        normalized: raw.normalize()?,
        order: 0,
        est_error: None,
        warning: None,
    })
}

fn emit_channel(
    params: &ChannelParams,
    herald: &HeraldOutcome,
    average: &'static str,
    m: Option<Syndrome>,
    oracle: &OracleChoice,
    c: Computed,
    out: &Outputs,
) -> CliResult<Outcome> {
    let chi = if out.raw { c.raw } else { c.normalized };
    let report = ChannelReport {
        schema: CHANNEL_SCHEMA,
        beta: params.beta,
        gamma: params.gamma,
        herald: HeraldSpec(*herald).to_string(),
        average,
        syndrome: m.map(|m| m.as_array()),
        method: if oracle.enabled { "fock" } else { "theta" },
        normalized: !out.raw,
        trace_raw: c.raw.trace(),
        chi: output::entries(&chi),
        quadrature: QuadratureInfo {
            order: c.order,
            est_error: c.est_error,
        },
        warning: c.warning.clone(),
    };
    output::write_json(out.json.as_deref(), &report)?;
    if let Some(path) = &out.svg {
        let title = format!("chi, beta={} gamma={} herald={}", params.beta, params.gamma, report.herald);
        output::write_text(path, &svg::process_panels(1, &[output::flat(&chi)], Scale::Global, &title))?;
    }
    Ok(Outcome::warn(c.warning))
}

pub fn cmd_conditional(
    beta: f64,
    gamma: f64,
    herald: HeraldSpec,
    grid: usize,
    point: Option<SyndromeArg>,
    csv_path: Option<PathBuf>,
    svg_path: Option<PathBuf>,
    oracle: OracleChoice,
) -> CliResult<Outcome> {
    if grid == 0 {
        return Err(Failure::Usage("--grid must be at least 1".into()));
    }
    let params = params(beta, gamma)?;
    let channel = PointChannel::new(&params, &herald.outcome(), &oracle)?;
    let (n, syndromes) = match point {
        Some(p) => (1, vec![syndrome(p)?]),
        None => (grid, Syndrome::grid(grid)),
    };
    let values: Vec<ProcessMatrix> = syndromes.par_iter().map(|m| channel.chi(m)).collect::<CliResult<_>>()?;

    if n == 1 && csv_path.is_none() {
        let mut stdout = io::stdout().lock();
        write!(stdout, "{}", values[0])?;
        return Ok(Outcome::default());
    }
    let mut w = csv::Writer::from_writer(output::sink(csv_path.as_deref())?);
    w.write_record(["m_q", "m_p", "a", "a'", "re", "im"])?;
    for (m, chi) in syndromes.iter().zip(&values) {
        for a in PauliIndex::ALL {
            for b in PauliIndex::ALL {
                let z = chi.get(a, b);
                w.write_record([num(m.frac_q), num(m.frac_p), a.label().into(), b.label().into(), num(z.re), num(z.im)])?;
            }
        }
    }
    w.flush()?;
    if let Some(path) = svg_path {
        let flat: Vec<[Complex64; 16]> = values.iter().map(output::flat).collect();
        let title = format!("conditional chi(m), beta={beta} gamma={gamma} herald={herald}");
        output::write_text(&path, &svg::process_panels(n, &flat, Scale::PerPanel, &title))?;
    }
    Ok(Outcome::default())
}

pub fn cmd_averaged(
    beta: f64,
    gamma: f64,
    herald: HeraldSpec,
    quad: QuadChoice,
    oracle: OracleChoice,
    out: Outputs,
) -> CliResult<Outcome> {
    let params = params(beta, gamma)?;
    let h = herald.outcome();
    let c = averaged(&params, &h, &quad, &oracle)?;
    let average = if h == HeraldOutcome::None { "both" } else { "syndromes" };
    emit_channel(&params, &h, average, None, &oracle, c, &out)
}

pub fn cmd_pure_loss(
    beta: f64,
    gamma: f64,
    point: Option<SyndromeArg>,
    quad: QuadChoice,
    oracle: OracleChoice,
    out: Outputs,
) -> CliResult<Outcome> {
    let params = params(beta, gamma)?;
    let h = HeraldOutcome::None;
    match point {
        Some(p) => {
            let m = syndrome(p)?;
            let c = at_point(&params, &h, &m, &oracle)?;
            emit_channel(&params, &h, "outcomes", Some(m), &oracle, c, &out)
        }
        None => {
            let c = averaged(&params, &h, &quad, &oracle)?;
            emit_channel(&params, &h, "both", None, &oracle, c, &out)
        }
    }
}

pub fn cmd_subtract(
    beta: f64,
    gamma: f64,
    photons: usize,
    point: Option<SyndromeArg>,
    quad: QuadChoice,
    oracle: OracleChoice,
    out: Outputs,
) -> CliResult<Outcome> {
    let params = params(beta, gamma)?;
    let h = HeraldOutcome::PhotonCount(photons);
    match point {
        Some(p) => {
            let m = syndrome(p)?;
            let c = at_point(&params, &h, &m, &oracle)?;
            emit_channel(&params, &h, "none", Some(m), &oracle, c, &out)
        }
        None => {
            let c = averaged(&params, &h, &quad, &oracle)?;
            emit_channel(&params, &h, "syndromes", None, &oracle, c, &out)
        }
    }
}

#[derive(Serialize)]
struct CellWarning {
    beta: f64,
    gamma: f64,
    est_error: Option<f64>,
    message: String,
}

#[derive(Serialize)]
struct WarningReport {
    schema: &'static str,
    order: usize,
    tol: f64,
    cells: Vec<CellWarning>,
}

pub fn cmd_fidelity_sweep(
    betas: Range,
    gammas: Range,
    quad: QuadChoice,
    out: PathBuf,
    svg_path: Option<PathBuf>,
) -> CliResult<Outcome> {
    let (bv, gv) = (betas.values(), gammas.values());
    if gv.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return Err(Failure::Usage("loss rates must lie in [0, 1]".into()));
    }
    if bv.iter().any(|&b| b <= 0.0) {
        return Err(Failure::Usage("the sweep needs beta > 0".into()));
    }
    let table = fidelity_sweep(&bv, &gv, quad.spec())?;

    let mut w = csv::Writer::from_path(&out)?;
    w.write_record(["beta", "gamma", "infidelity"])?;
    for r in &table.rows {
        w.write_record([num(r.beta), num(r.gamma), num(r.infidelity)])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(output::companion(&out, "argmin", "csv"))?;
    w.write_record(["gamma", "beta_star", "infidelity"])?;
    for &(g, b, inf) in &table.argmin {
        w.write_record([num(g), num(b), num(inf)])?;
    }
    w.flush()?;

    let cells: Vec<CellWarning> = table
        .warnings()
        .map(|r| CellWarning {
            beta: r.beta,
            gamma: r.gamma,
            est_error: r.est_error,
            message: r.warning.clone().unwrap_or_default(),
        })
        .collect();
    let warnings = cells.iter().map(|c| c.message.clone()).collect();
    let report = WarningReport {
        schema: WARNINGS_SCHEMA,
        order: quad.order,
        tol: quad.tol,
        cells,
    };
    output::write_json(Some(&output::companion(&out, "warnings", "json")), &report)?;

    if let Some(path) = svg_path {
        let rows: Vec<(f64, f64, f64)> = table.rows.iter().map(|r| (r.beta, r.gamma, r.infidelity)).collect();
        let argmin: Vec<(f64, f64)> = table.argmin.iter().map(|&(g, b, _)| (g, b)).collect();
        output::write_text(&path, &svg::sweep_map(&bv, &gv, &rows, &argmin))?;
    }
    Ok(Outcome {
        warnings,
        failed: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    Beta,
    Gamma,
}

pub fn cmd_bloch_traj(
    vary: SweepParam,
    range: Range,
    fixed: f64,
    herald: HeraldSpec,
    marks: Vec<f64>,
    quad: QuadChoice,
    out: Option<PathBuf>,
) -> CliResult<Outcome> {
    let mut values: Vec<(f64, bool)> = range.values().into_iter().map(|v| (v, false)).collect();
    for &m in &marks {
        match values.iter_mut().find(|(v, _)| *v == m) {
            Some(entry) => entry.1 = true,
            None => values.push((m, true)),
        }
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));

    let h = herald.outcome();
    let oracle = OracleChoice {
        enabled: false,
        cutoff: None,
    };
    let per_value = values
        .iter()
        .map(|&(v, _)| {
            let p = match vary {
                SweepParam::Beta => params(v, fixed)?,
                SweepParam::Gamma => params(fixed, v)?,
            };
            let conditional = at_point(&p, &h, &Syndrome::zero(), &oracle)?;
            let avg = averaged(&p, &h, &quad, &oracle)?;
            Ok((conditional.normalized, avg.normalized, avg.warning))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut w = csv::Writer::from_writer(output::sink(out.as_deref())?);
    w.write_record(["param_value", "channel", "state_label", "x", "y", "z", "marker"])?;
    for (&(v, marker), (cond, avg, warning)) in values.iter().zip(&per_value) {
        warnings.extend(warning.clone());
        for (label, chi) in [("conditional_00", cond), ("averaged", avg)] {
            for (state, rho) in QubitState::pauli_eigenstates() {
                let [x, y, z] = apply_channel(chi, &rho)?.bloch;
                w.write_record([
                    num(v),
                    label.into(),
                    state.into(),
                    num(x),
                    num(y),
                    num(z),
                    (marker as u8).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(Outcome {
        warnings,
        failed: false,
    })
}

pub fn cmd_validate(config: ValidateConfig, out: Option<&Path>) -> CliResult<Outcome> {
    let report = validate::run(&config)?;
    output::write_json(out, &report)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} measured {:e} > tolerance {:e} ({})", c.name, c.measured, c.tolerance, c.detail);
    }
    Ok(Outcome {
        warnings: Vec::new(),
        failed: !report.passed,
    })
}
