use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use qdkd::analysis::{
    analytic_report_for, empirical_statistics, loss_report, p_corr_claimed, p_corr_true, LossReport,
};
use qdkd::protocol::{run_experiment, TrialLog, BOB, EVE};
use qdkd::quantum::{BasisLabel, Mode, ModeOperator, StateVector};

use crate::error::{CliError, CliResult};
use crate::report::{render, rounds_csv, rounds_json, to_value, write_output};
use crate::spec::{AttackName, OutputFormat, RunSpec};

/// Eve's operator pair in the correlated-result comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Eve swaps Bob's photon with a vacuum mode on both legs.
    #[default]
    Swap,
    /// Eve does nothing.
    Honest,
}

/// True and claimed `P_corr` for one scheme, with Eve's ancilla in `|vac⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeComparison {
    pub scheme: Scheme,
    pub p_corr_true: f64,
    pub p_corr_claimed: f64,
    pub gap: f64,
}

impl SchemeComparison {
    pub fn expected_gap(&self) -> f64 {
        match self.scheme {
            Scheme::Swap => 0.5,
            Scheme::Honest => 0.0,
        }
    }

    pub fn reproduces(&self) -> bool {
        (self.gap - self.expected_gap()).abs() <= 1e-12
    }

    pub fn line(&self) -> String {
        // clamp rounding residue so a zero never prints as -0.000000
        let z = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
        format!(
            "scheme={} true={:.6} claimed={:.6} gap={:.6}",
            self.scheme
                .to_possible_value()
                .expect("no skipped variants")
                .get_name(),
            z(self.p_corr_true),
            z(self.p_corr_claimed),
            z(self.gap)
        )
    }
}

pub fn compare_scheme(scheme: Scheme) -> qdkd::Result<SchemeComparison> {
    let op = match scheme {
        Scheme::Swap => ModeOperator::swap(BOB, EVE),
        Scheme::Honest => ModeOperator::identity(vec![Mode::photon(BOB), Mode::photon(EVE)])?,
    };
    let vac = StateVector::single(Mode::photon(EVE), BasisLabel::Vac)?;
    let truth = p_corr_true(&op, &vac)?;
    let claimed = p_corr_claimed(&op, &op, &vac)?;
    Ok(SchemeComparison {
        scheme,
        p_corr_true: truth,
        p_corr_claimed: claimed,
        gap: claimed - truth,
    })
}

pub fn cmd_counterexample(scheme: Option<Scheme>) -> CliResult<()> {
    let schemes = match scheme {
        Some(s) => vec![s],
        None => vec![Scheme::Swap, Scheme::Honest],
    };
    let mut failed = Vec::new();
    for s in schemes {
        let c = compare_scheme(s).map_err(|e| CliError::Verification(vec![e.to_string()]))?;
        println!("{}", c.line());
        if !c.reproduces() {
            failed.push(format!("{:?} gap {} != {}", s, c.gap, c.expected_gap()));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}

/// Everything `run` reports about one experiment.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub spec: RunSpec,
    pub log: TrialLog,
    pub document: Value,
}

fn analytic_block(spec: &RunSpec) -> CliResult<Value> {
    match spec.attack {
        AttackName::None | AttackName::Swap => {
            let scheme = if spec.attack == AttackName::Swap {
                Scheme::Swap
            } else {
                Scheme::Honest
            };
            Ok(to_value(&compare_scheme(scheme)?))
        }
        _ => {
            Ok(analytic_report_for(spec.strategy()?.kind())?.map_or(Value::Null, |r| to_value(&r)))
        }
    }
}

fn loss_block(spec: &RunSpec) -> CliResult<Option<LossReport>> {
    let (Some(target), Some(params)) = (spec.attack.target(), spec.params()?) else {
        return Ok(None);
    };
    Ok(Some(loss_report(
        spec.channel_transmission,
        spec.channel_prime,
        target,
        params.p,
    )?))
}

/// Validates `spec`, runs the experiment and assembles the
/// `{spec, analytic, statistics, loss, rounds?}` document.
pub fn execute_run(spec: &RunSpec) -> CliResult<RunOutput> {
    for w in spec.validate()? {
        eprintln!("warning: {w}");
    }
    let log = run_experiment(&spec.protocol_config(), &spec.strategy()?)?;
    let mut doc = Map::new();
    doc.insert("spec".into(), to_value(spec));
    doc.insert("analytic".into(), analytic_block(spec)?);
    doc.insert("statistics".into(), to_value(&empirical_statistics(&log)));
    doc.insert("loss".into(), to_value(&loss_block(spec)?));
    if spec.emit_rounds {
        doc.insert("rounds".into(), rounds_json(&log.outcomes));
    }
    Ok(RunOutput {
        spec: spec.clone(),
        log,
        document: Value::Object(doc),
    })
}

/// Text written by `run`: JSON document, per-round CSV with
/// `--emit-rounds`, otherwise a one-row summary CSV.
pub fn render_run(out: &RunOutput) -> String {
    match (out.spec.output_format, out.spec.emit_rounds) {
        (OutputFormat::Csv, true) => rounds_csv(&out.log.outcomes),
        (format, _) => render(&out.document, format),
    }
}

pub fn cmd_run(spec: &RunSpec) -> CliResult<()> {
    let out = execute_run(spec)?;
    write_output(&render_run(&out), spec.output_path.as_deref())
}

/// `a:b:step` (inclusive), `a,b,c`, or a single value.
pub fn parse_grid(field: &str, text: &str) -> CliResult<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::field(field, format!("`{s}`: {e}")))
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(CliError::field(field, "range must be start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(CliError::field(
                field,
                "range needs step > 0 and stop >= start",
            ));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // snap to a 1e-12 lattice so 0.1 + 2·0.1 comes out as 0.3
        (0..=n)
            .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',').map(num).collect::<CliResult<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(CliError::field(field, "empty grid"));
    }
    Ok(values)
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Fixed parameters; `p` and `epsilon` come from the grids.
    pub base: RunSpec,
    pub p_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    /// Monte-Carlo rounds per grid point; 0 gives analytic-only rows.
    pub mc_rounds: usize,
}

/// One row per grid point in p-major, ε-minor order: the analytic report
/// plus, when `mc_rounds > 0`, the empirical statistics of a run with the
/// base seed.
pub fn sweep_rows(sweep: &SweepSpec) -> CliResult<Vec<Value>> {
    let p_grid = match sweep.base.attack {
        AttackName::Alice | AttackName::Bob => sweep.p_grid.clone(),
        AttackName::Tuning => vec![0.0],
        other => {
            return Err(CliError::field(
                "attack",
                format!("sweep needs tuning, alice or bob, got {other:?}").to_lowercase(),
            ))
        }
    };
    let mut rows = Vec::new();
    for &p in &p_grid {
        for &epsilon in &sweep.epsilon_grid {
            let spec = RunSpec {
                p: (sweep.base.attack != AttackName::Tuning).then_some(p),
                epsilon: Some(epsilon),
                rounds: sweep.mc_rounds.max(1),
                emit_rounds: false,
                ..sweep.base.clone()
            };
            spec.validate()?;
            let mut row = match analytic_block(&spec)? {
                Value::Object(m) => m,
                _ => unreachable!("composite attacks have closed forms"),
            };
            if sweep.mc_rounds > 0 {
                let log = run_experiment(&spec.protocol_config(), &spec.strategy()?)?;
                row.insert("statistics".into(), to_value(&empirical_statistics(&log)));
            }
            rows.push(Value::Object(row));
        }
    }
    Ok(rows)
}

pub fn render_sweep(sweep: &SweepSpec, rows: &[Value]) -> String {
    match sweep.base.output_format {
        OutputFormat::Csv => {
            let flat: Vec<_> = rows.iter().map(crate::report::flatten).collect();
            crate::report::csv_table(&flat)
        }
        OutputFormat::Json => render(
            &json!({
                "sweep": {
                    "attack": sweep.base.attack,
                    "p": to_value(&sweep.p_grid),
                    "epsilon": to_value(&sweep.epsilon_grid),
                    "mc_rounds": sweep.mc_rounds,
                    "cm_probability": to_value(&sweep.base.cm_probability),
                    "channel_transmission": to_value(&sweep.base.channel_transmission),
                    "seed": sweep.base.seed,
                },
                "rows": rows,
            }),
            OutputFormat::Json,
        ),
    }
}

pub fn cmd_sweep(sweep: &SweepSpec) -> CliResult<()> {
    if sweep.base.attack == AttackName::Tuning && sweep.p_grid != [0.0] {
        eprintln!("warning: `p` is ignored by attack `tuning`");
    }
    let rows = sweep_rows(sweep)?;
    write_output(
        &render_sweep(sweep, &rows),
        sweep.base.output_path.as_deref(),
    )
}
