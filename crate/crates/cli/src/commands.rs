use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use histories::history::{evaluate, probabilities, EvalMode, EvalOptions, HistoryGrid};
use histories::inference::{Alternative, ConditionChain, Inference};
use histories::models::{self, Params};
use histories::realm::{scan, RankRule};
use histories::tol;
use serde_json::json;

use crate::config::{alternative, Config, Setup};
use crate::error::CliError;
use crate::output::{self, Output};
use crate::{Cli, Command, ModeArg, ModelsAction};

const DEFAULT_OUT: &str = "histories-out";

/// Flag or environment value first, then the config, then the default.
struct Settings {
    options: EvalOptions,
    seed: Option<u64>,
    out: PathBuf,
}

fn parse_mode(s: &str) -> Result<EvalMode, CliError> {
    match s {
        "heisenberg" => Ok(EvalMode::HeisenbergChain),
        "schrodinger" => Ok(EvalMode::SchrodingerChain),
        other => Err(CliError::Config(format!("mode must be 'heisenberg' or 'schrodinger', got '{other}'"))),
    }
}

impl Settings {
    fn resolve(cli: &Cli, config: &Config) -> Result<Self, CliError> {
        let epsilon = cli.epsilon.or(config.epsilon).unwrap_or(tol::DEFAULT_EPSILON);
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CliError::Config(format!("epsilon must be positive and finite, got {epsilon}")));
        }
        let max_histories = cli.max_histories.or(config.max_histories).unwrap_or(tol::DEFAULT_MAX_HISTORIES);
        let mode = match (cli.mode, &config.mode) {
            (Some(ModeArg::Heisenberg), _) => EvalMode::HeisenbergChain,
            (Some(ModeArg::Schrodinger), _) => EvalMode::SchrodingerChain,
            (None, Some(s)) => parse_mode(s)?,
            (None, None) => EvalMode::HeisenbergChain,
        };
        Ok(Self {
            options: EvalOptions { mode, epsilon, max_histories },
            seed: cli.seed.or(config.seed),
            out: cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    if let Command::Models { action: ModelsAction::List } = cli.command {
        return match list_models() {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        };
    }
    let prepared = (|| {
        let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
        let config = Config::load(path)?;
        let settings = Settings::resolve(cli, &config)?;
        let out = Output::create(&settings.out)?;
        Ok::<_, CliError>((config, settings, out))
    })();
    let (config, settings, mut out) = match prepared {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = execute(cli, &config, &settings, &mut out);
    let code = match &result {
        Ok(()) => 0u8,
        Err(e) => {
            eprintln!("error: {e}");
            out.set("error", e);
            let _ = out.log("error", json!({ "kind": e.kind(), "message": e.to_string() }));
            if matches!(e, CliError::Core(histories::Error::NotCertified { .. })) {
                2
            } else {
                1
            }
        }
    };
    out.set("exit_code", code);
    if let Err(e) = out.write_report().and_then(|()| out.log("finish", json!({ "exit_code": code }))) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    ExitCode::from(code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate => "simulate",
        Command::CheckDecoherence => "check-decoherence",
        Command::Predict => "predict",
        Command::Retrodict => "retrodict",
        Command::ScanRealms => "scan-realms",
        Command::Models { .. } => "models",
    }
}

fn execute(cli: &Cli, config: &Config, settings: &Settings, out: &mut Output) -> Result<(), CliError> {
    let name = command_name(&cli.command);
    let options = &settings.options;
    out.set("command", name);
    if let Some(op) = config.operation.as_deref().filter(|&op| op != name) {
        eprintln!("warning: config operation '{op}' ignored in favour of subcommand '{name}'");
        out.set("config_operation_ignored", op);
    }
    out.log("start", json!({ "command": name, "config": cli.config.as_ref().map(|p| p.display().to_string()) }))?;

    let setup = config.setup(settings.seed)?;
    let count = setup.grid.history_count();
    out.set("model", &setup.label);
    out.set("grid", &setup.grid_name);
    out.set("dim", setup.grid.dim());
    out.set("times", format!("{:?}", setup.grid.times()));
    out.set("epsilon", options.epsilon);
    out.set("mode", options.mode);
    out.set("max_histories", options.max_histories);
    out.set("history_count", count);
    if let Some(seed) = settings.seed {
        out.set("seed", seed);
    }
    out.log(
        "setup",
        json!({
            "model": setup.label, "grid": setup.grid_name, "dim": setup.grid.dim(),
            "families": setup.grid.len(), "histories": count.to_string(),
            "epsilon": options.epsilon, "mode": options.mode.to_string(),
        }),
    )?;

    match cli.command {
        Command::Simulate => simulate(&setup, options, out, true),
        Command::CheckDecoherence => simulate(&setup, options, out, false),
        Command::Predict => predict(config, &setup, options, out),
        Command::Retrodict => retrodict(config, &setup, options, out),
        Command::ScanRealms => scan_realms(config, &setup, options, out),
        Command::Models { .. } => unreachable!("handled before loading a config"),
    }
}

fn simulate(setup: &Setup, options: &EvalOptions, out: &mut Output, with_probabilities: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let (branches, report) = evaluate(&setup.grid, &setup.dynamics, &setup.psi, options)?;
    out.log(
        "evaluated",
        json!({
            "certified": report.certified(), "max_offdiag": report.max_offdiag(),
            "elapsed_ms": started.elapsed().as_millis() as u64,
        }),
    )?;
    out.set("certified", report.certified());
    out.set("max_offdiag", report.max_offdiag());
    out.set("max_offdiag_real", report.max_offdiag_real());
    out.set("sum_rule", report.total().re);
    output::write_decoherence(out, &report)?;
    println!(
        "{} histories, max |D_off| = {:e}, epsilon = {:e}: {}",
        report.len(),
        report.max_offdiag(),
        report.epsilon(),
        if report.certified() { "certified" } else { "NOT certified" }
    );
    if !report.certified() {
        return Err(histories::Error::NotCertified { max_offdiag: report.max_offdiag(), epsilon: report.epsilon() }.into());
    }
    if with_probabilities {
        let p = probabilities(&report)?;
        output::write_probabilities(out, &setup.grid, &branches, &p)?;
    }
    Ok(())
}

fn describe(grid: &HistoryGrid, alts: &[Alternative]) -> String {
    alts.iter()
        .map(|a| format!("{}@t={}", grid.family(a.family).labels()[a.alternative], grid.family(a.family).time()))
        .collect::<Vec<_>>()
        .join(";")
}

fn predict(config: &Config, setup: &Setup, options: &EvalOptions, out: &mut Output) -> Result<(), CliError> {
    let spec = config.predict.as_ref().ok_or_else(|| CliError::Config("predict needs a 'predict' section".into()))?;
    let entries = spec.condition.iter().map(|a| alternative(&setup.grid, a)).collect::<Result<Vec<_>, _>>()?;
    let future = alternative(&setup.grid, &spec.future)?;
    let condition = ConditionChain::new(&setup.grid, entries.clone())?;
    let inference = Inference::new(&setup.grid, &setup.dynamics, &setup.psi)?.with_options(*options);
    let p = inference.predict(&condition, future)?;
    let state = inference.effective_state(&condition)?;
    let p_state = inference.predict_from_state(&state, future)?;

    let (cond, fut) = (describe(&setup.grid, &entries), describe(&setup.grid, &[future]));
    out.set("condition", &cond);
    out.set("future", &fut);
    out.set("probability", p);
    out.set("probability_from_state", p_state);
    let mut w = out.csv(output::PREDICTION)?;
    w.write_record(["condition", "future", "probability", "probability_from_state"])?;
    w.write_record([cond.clone(), fut.clone(), p.to_string(), p_state.to_string()])?;
    w.flush()?;
    println!("p({fut} | {cond}) = {p}");
    Ok(())
}

fn retrodict(config: &Config, setup: &Setup, options: &EvalOptions, out: &mut Output) -> Result<(), CliError> {
    let spec =
        config.retrodict.as_ref().ok_or_else(|| CliError::Config("retrodict needs a 'retrodict' section".into()))?;
    let past = spec.past.iter().map(|a| alternative(&setup.grid, a)).collect::<Result<Vec<_>, _>>()?;
    let present = alternative(&setup.grid, &spec.present)?;
    let chain = ConditionChain::new(&setup.grid, past.clone())?;
    let inference = Inference::new(&setup.grid, &setup.dynamics, &setup.psi)?.with_options(*options);
    let p = inference.retrodict(present, &chain)?;

    let (pres, pst) = (describe(&setup.grid, &[present]), describe(&setup.grid, &past));
    out.set("present", &pres);
    out.set("past", &pst);
    out.set("probability", p);
    let mut w = out.csv(output::RETRODICTION)?;
    w.write_record(["present", "past", "probability"])?;
    w.write_record([pres.clone(), pst.clone(), p.to_string()])?;
    w.flush()?;
    println!("p({pst} | {pres}) = {p}");
    Ok(())
}

fn parse_rule(s: &str) -> Result<RankRule, CliError> {
    match s {
        "quasiclassical" => Ok(RankRule::Quasiclassical),
        "least-interference" => Ok(RankRule::LeastInterference),
        other => Err(CliError::Config(format!("rule must be 'quasiclassical' or 'least-interference', got '{other}'"))),
    }
}

fn scan_realms(config: &Config, setup: &Setup, options: &EvalOptions, out: &mut Output) -> Result<(), CliError> {
    let spec = config.scan.clone().unwrap_or_default();
    let vary = spec.vary.unwrap_or_else(|| (0..setup.grid.len()).collect());
    let rule = spec.rule.as_deref().map(parse_rule).transpose()?.unwrap_or_default();
    let report = scan(&setup.grid, &vary, &setup.dynamics, &setup.psi, options, rule)?;
    out.set("rank_rule", rule);
    out.set("varied_families", format!("{:?}", report.varied));
    out.set("candidates", report.candidates.len());
    out.set("best", report.best().class_labels.join(" | "));

    let mut w = out.csv(output::REALMS)?;
    w.write_record(["rank", "index", "classes", "partition", "certified", "max_offdiag", "entropy_bits", "persistence"])?;
    for (rank, c) in report.candidates.iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            c.index.to_string(),
            c.score.classes.to_string(),
            c.class_labels.join(" | "),
            c.score.certified.to_string(),
            c.score.max_offdiag.to_string(),
            c.score.entropy_bits.to_string(),
            c.score.persistence.to_string(),
        ])?;
    }
    w.flush()?;
    println!("{} candidates ranked by {rule}; best: {}", report.candidates.len(), report.best().class_labels.join(" | "));
    Ok(())
}

fn list_models() -> Result<(), CliError> {
    println!("{:<14} {:>5}  {:<44} description", "name", "dim", "grids");
    for (name, description) in models::BUILDERS {
        let spec = models::build_named(name, &Params::new())?;
        println!("{:<14} {:>5}  {:<44} {description}", name, spec.dim(), spec.grid_names().join(", "));
    }
    Ok(())
}
