use std::fs;
use std::path::Path;

use entloc::graph_states::{
    build_graph_state, ghz_extraction_probability, graph_ce, line_protocol, tau_criterion, weighted_trace_distance, Graph, TauClass,
};
use entloc::haar::{bounds_for, haar_state, haar_sweep, monte_carlo_moments, HaarSweepConfig, SweepMeasurement};
use entloc::io::{csv_string, parse_index_list, read_graph, read_state};
use entloc::localization::{lme_estimate, mea_tau_exact};
use entloc::measures::evaluate;
use entloc::spin_chain::{ising_sweep, TfimParams};
use entloc::{Error, MeasureKind, PsoConfig, Result, StateVector, SubsystemMask};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{
    Cli, Command, Format, GraphCommand, HaarCommand, IsingCommand, KindArgs, KindName, PsoArgs, SplitArgs, StateArgs, SweepMode,
    WeightedCommand,
};

pub struct Output {
    pub text: String,
}

struct Ctx<'a> {
    cli: &'a Cli,
    base: usize,
}

impl Ctx<'_> {
    fn indices(&self, text: &str) -> Result<Vec<usize>> {
        parse_index_list(text, self.base)
    }

    fn mask(&self, n: usize, text: &str) -> Result<SubsystemMask> {
        SubsystemMask::new(n, self.indices(text)?)
    }

    /// Both index bases, so output can be matched against either convention.
    fn echo(&self, m: &SubsystemMask) -> Value {
        json!({
            "zero_based": m.members(),
            "one_based": m.members().iter().map(|v| v + 1).collect::<Vec<_>>(),
        })
    }

    fn kind(&self, k: &KindArgs, n: usize) -> Result<MeasureKind> {
        let labels = || -> Result<SubsystemMask> {
            let text = k.s.as_deref().ok_or_else(|| Error::InvalidArgument("--s is required for ce and sqrt-ce".into()))?;
            self.mask(n, text)
        };
        Ok(match k.kind {
            KindName::Ntangle => MeasureKind::NTangle,
            KindName::Gme => MeasureKind::GmeConcurrence,
            KindName::Ce => MeasureKind::ConcentratableEntanglement(labels()?),
            KindName::SqrtCe => MeasureKind::SqrtConcentratableEntanglement(labels()?),
        })
    }

    fn pso(&self, p: &PsoArgs) -> Result<PsoConfig> {
        let d = PsoConfig::default();
        let cfg = PsoConfig {
            swarm_size: p.swarm.unwrap_or(d.swarm_size),
            iterations: p.iterations.unwrap_or(d.iterations),
            restarts: p.restarts.unwrap_or(d.restarts),
            ..d
        }
        .with_seed(self.cli.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    fn state(&self, s: &StateArgs) -> Result<StateVector> {
        match (&s.state, &s.preset) {
            (Some(path), None) => read_state(path),
            (None, Some(preset)) => preset_state(preset, self.cli.seed),
            _ => Err(Error::InvalidArgument("give exactly one of --state or --preset".into())),
        }
    }

    fn format(&self, sweep: bool) -> Format {
        self.cli.format.unwrap_or(if sweep { Format::Csv } else { Format::Json })
    }

    /// Adds the resolved seed and the full configuration to a result.
    fn envelope(&self, result: Value) -> Result<Output> {
        let mut obj = match result {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        obj.insert("seed".into(), json!(self.cli.seed));
        obj.insert("config".into(), to_value(self.cli)?);
        let text = serde_json::to_string_pretty(&Value::Object(obj)).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Output { text: text + "\n" })
    }

    fn json(&self, result: Value) -> Result<Output> {
        if self.format(false) == Format::Csv {
            return Err(Error::InvalidArgument("csv output is only available for sweeps".into()));
        }
        self.envelope(result)
    }

    fn table<T: Serialize>(&self, rows: &[T]) -> Result<Output> {
        match self.format(true) {
            Format::Csv => Ok(Output { text: csv_string(rows)? }),
            Format::Json => self.envelope(json!({ "rows": to_value(rows)? })),
        }
    }
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn preset_state(preset: &str, seed: u64) -> Result<StateVector> {
    let (name, n) = preset
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("preset {preset:?} must look like name:N")))?;
    let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad qubit count in preset {preset:?}")))?;
    match name {
        "ghz" => StateVector::ghz(n),
        "w" => StateVector::w(n),
        "line-graph" => build_graph_state(&Graph::path(n)?),
        "haar" => haar_state(n, seed, 0),
        _ => Err(Error::InvalidArgument(format!("unknown preset {name:?}; use ghz, w, line-graph or haar"))),
    }
}

fn split(ctx: &Ctx, n: usize, s: &SplitArgs) -> Result<SubsystemMask> {
    ctx.mask(n, &s.measured)
}

pub fn run(cli: &Cli) -> Result<Output> {
    let ctx = Ctx { cli, base: usize::from(cli.one_based) };
    match &cli.command {
        Command::Measure { state, kind } => {
            let psi = ctx.state(state)?;
            let kind = ctx.kind(kind, psi.n_qubits())?;
            let value = evaluate(&kind, &psi)?;
            ctx.json(json!({ "kind": kind.name(), "n_qubits": psi.n_qubits(), "value": value }))
        }
        Command::Localize { state, split: sp, kind, pso } => {
            let psi = ctx.state(state)?;
            let a = split(&ctx, psi.n_qubits(), sp)?;
            let kind = ctx.kind(kind, psi.n_qubits())?;
            let est = lme_estimate(&psi, &a, &kind, &ctx.pso(pso)?)?;
            let kept = psi.n_qubits() - a.len();
            let mea = if kind == MeasureKind::NTangle && kept % 2 == 0 { Some(mea_tau_exact(&psi, &a)?) } else { None };
            ctx.json(json!({
                "kind": kind.name(),
                "measured": ctx.echo(&a),
                "lme": est.value,
                "angles": est.params.angles,
                "restarts": est.restarts,
                "evaluations": est.evaluations,
                "mea_tau": mea,
            }))
        }
        Command::Bounds { state, split: sp, kind } => {
            let psi = ctx.state(state)?;
            let a = split(&ctx, psi.n_qubits(), sp)?;
            let kind = ctx.kind(kind, psi.n_qubits())?;
            let (ub, lb) = bounds_for(&psi, &a, &kind)?;
            ctx.json(json!({ "kind": kind.name(), "measured": ctx.echo(&a), "ub": ub, "lb": lb }))
        }
        Command::Graph(GraphCommand::Check { graph, split: sp }) => {
            let g = read_graph(graph)?;
            let a = split(&ctx, g.n(), sp)?;
            let c = tau_criterion(&g, &a)?;
            let bits = |v: &entloc::graph_states::F2Vector| v.to_bits().into_iter().map(u8::from).collect::<Vec<_>>();
            ctx.json(json!({
                "solvable": c.class == TauClass::TauOneAchievable,
                "x": c.solution.as_ref().map(bits),
                "fast_path": c.fast_path.map(|_| "neighbor_free"),
                "degree_vector": bits(&c.degree_vector),
                "measured": ctx.echo(&a),
            }))
        }
        Command::Graph(GraphCommand::Ce { graph, s }) => {
            let g = read_graph(graph)?;
            let s = ctx.mask(g.n(), s)?;
            ctx.json(json!({ "labels": ctx.echo(&s), "value": graph_ce(&g, &s)? }))
        }
        Command::Weighted(WeightedCommand::Protocol { pairs, phi }) => {
            let r = line_protocol(*pairs, *phi)?;
            let probs: Vec<f64> = r.ensemble.branches.iter().map(|b| b.probability).collect();
            ctx.json(json!({
                "vertices": 2 * pairs + 1,
                "measured": ctx.echo(&r.measured),
                "avg_tau": r.avg_tau,
                "ghz_probability": ghz_extraction_probability(*pairs, *phi)?,
                "branch_probabilities": probs,
            }))
        }
        Command::Weighted(WeightedCommand::Distance { graph, phi, chi }) => {
            let g = read_graph(graph)?;
            ctx.json(json!({ "trace_distance": weighted_trace_distance(&g, *phi, *chi)? }))
        }
        Command::Haar(HaarCommand::Sweep { n_a, n_b, samples, kind, mode, pso, timing }) => {
            let measure = ctx.kind(kind, n_a + n_b)?;
            let measurement = match mode {
                SweepMode::Pso => SweepMeasurement::LocalPso(ctx.pso(pso)?),
                SweepMode::Computational => SweepMeasurement::Computational,
            };
            let cfg = HaarSweepConfig {
                n_a: *n_a,
                n_b: *n_b,
                samples: *samples,
                seed: cli.seed,
                measure,
                measurement,
                record_timing: *timing,
            };
            ctx.table(&haar_sweep(&cfg)?)
        }
        Command::Haar(HaarCommand::Moments { n_a, n_b, samples }) => {
            let m = monte_carlo_moments(*n_a, *n_b, *samples, cli.seed)?;
            ctx.json(json!({ "samples": samples, "moments": m }))
        }
        Command::Ising(IsingCommand::Sweep { sites, j_min, j_max, points, hx_ratio, open, split: sp, kinds, s, pso }) => {
            if *points < 1 || !(j_max >= j_min) {
                return Err(Error::InvalidArgument("need points >= 1 and j_max >= j_min".into()));
            }
            let a = if sp.measured.is_empty() {
                SubsystemMask::new(*sites, (0..*sites).step_by(2))?
            } else {
                split(&ctx, *sites, sp)?
            };
            let kinds = kinds
                .iter()
                .map(|k| match k.as_str() {
                    "ntangle" => Ok(MeasureKind::NTangle),
                    "ce" => {
                        let text = s.as_deref().ok_or_else(|| Error::InvalidArgument("--s is required for ce".into()))?;
                        Ok(MeasureKind::ConcentratableEntanglement(ctx.mask(*sites, text)?))
                    }
                    other => Err(Error::InvalidArgument(format!("unsupported measure {other:?}; use ntangle or ce"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let grid: Vec<TfimParams> = (0..*points)
                .map(|k| {
                    let j = if *points == 1 { *j_min } else { j_min + (j_max - j_min) * k as f64 / (*points - 1) as f64 };
                    TfimParams { n: *sites, j, h: 1.0, h_x: *hx_ratio, periodic: !open }
                })
                .collect();
            ctx.table(&ising_sweep(&grid, &a, &kinds, &ctx.pso(pso)?)?)
        }
    }
}

pub fn write(out: &Output, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, &out.text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    }
}
