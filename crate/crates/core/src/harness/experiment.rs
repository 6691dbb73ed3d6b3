use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{estimate_limits, invalid, Estimate, HarnessError, RatioSeries, Selector, Unit};
use crate::witness::{generate, zone_aligned_len, Witness, WitnessSpec};
use crate::zoo::ZooParams;

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub witness: WitnessSpec,
    pub seed: u64,
    pub prefix_len: u64,
    /// Extend the prefix to the first marker of this kind at or past `prefix_len`.
    #[serde(default)]
    pub align_to: Option<String>,
    pub checkpoints: CheckpointSpec,
    #[serde(default = "half")]
    pub tail_fraction: f64,
    pub compressors: Vec<CompressorEntry>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckpointSpec {
    /// Witness marker kinds whose positions become checkpoints.
    pub markers: Vec<String>,
    pub geometric: Option<Geometric>,
    pub explicit: Vec<u64>,
    /// Also measure the whole prefix.
    pub include_end: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometric {
    pub start: u64,
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressorEntry {
    pub name: String,
    pub selector: String,
    /// Overrides for the construction parameters. Alphabet size and the
    /// family parameters default to the witness's.
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
}

/// `left op right`, where operands are `<name>.<metric>` or numbers, or a
/// check that a series peaks on a marker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Assertion {
    Compare { left: String, op: String, right: Operand },
    ArgmaxAt { argmax_at: String, of: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Number(f64),
    Metric(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub assertion: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub dir: PathBuf,
    pub prefix_len: u64,
    pub estimates: BTreeMap<String, Estimate>,
    pub outcomes: Vec<AssertionOutcome>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Metric {
    RhoHat,
    RHat,
    FinalRatio,
    FinalSize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

enum Side {
    Num(f64),
    Of(usize, Metric),
}

enum Check {
    Compare(Side, Op, Side),
    Argmax(String, usize),
}

/// Reads and runs the config at `path`; `spec:` files are resolved next to it.
pub fn run_experiment_file(path: &Path, out_root: &Path) -> Result<ExperimentReport, HarnessError> {
    let text = fs::read_to_string(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        invalid(if p == "." || p == "?" { "$".to_string() } else { p }, e.into_inner().to_string())
    })?;
    run_experiment(&cfg, path.parent().unwrap_or(Path::new(".")), out_root)
}

/// Writes `<out_root>/<id>/<name>.csv` for each compressor and `summary.json`.
pub fn run_experiment(cfg: &ExperimentConfig, base: &Path, out_root: &Path) -> Result<ExperimentReport, HarnessError> {
    if cfg.id.is_empty() || cfg.id.contains(['/', '\\']) || cfg.id.starts_with('.') {
        return Err(invalid("id", "must be a plain directory name"));
    }
    if !(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0) {
        return Err(invalid("tail_fraction", "must lie in (0, 1]"));
    }
    cfg.witness.validate().map_err(|e| invalid("witness", e.to_string()))?;
    if cfg.compressors.is_empty() {
        return Err(invalid("compressors", "at least one compressor is needed"));
    }
    let mut names = HashSet::new();
    for (i, c) in cfg.compressors.iter().enumerate() {
        if c.name.is_empty() || c.name.contains(['/', '\\', '.']) || !names.insert(c.name.as_str()) {
            return Err(invalid(format!("compressors[{i}].name"), "names must be unique plain words"));
        }
    }
    let checks = parse_assertions(cfg)?;

    let sigma = cfg.witness.sigma();
    let first_zone = match cfg.witness {
        WitnessSpec::T7 { first_zone, .. } => first_zone,
        _ => 4,
    };
    let mut machines = Vec::new();
    for (i, c) in cfg.compressors.iter().enumerate() {
        let sel: Selector = c.selector.parse().map_err(|e| invalid(format!("compressors[{i}].selector"), e))?;
        let params = merge_params(&cfg.witness, &c.params).map_err(|(k, e)| invalid(format!("compressors[{i}].params.{k}"), e))?;
        let m = sel.build(&params, first_zone, base).map_err(|e| invalid(format!("compressors[{i}]"), e.to_string()))?;
        if m.input_size() != sigma {
            return Err(invalid(
                format!("compressors[{i}].selector"),
                format!("reads {} symbols but the witness has {sigma}", m.input_size()),
            ));
        }
        machines.push(m);
    }

    let len = match &cfg.align_to {
        Some(kind) => zone_aligned_len(&cfg.witness, cfg.seed, cfg.prefix_len, kind).map_err(|e| invalid("align_to", e.to_string()))?,
        None => cfg.prefix_len,
    };
    let w = generate(&cfg.witness, cfg.seed, len).map_err(|e| invalid("witness", e.to_string()))?;
    let cps = checkpoints(&cfg.checkpoints, &w)?;

    let measured: Vec<(RatioSeries, u128)> = machines
        .par_iter()
        .map(|m| {
            let t = Instant::now();
            m.measure(&w.symbols, &cps).map(|s| (s, t.elapsed().as_millis()))
        })
        .collect::<Result<_, _>>()?;
    let mut estimates = Vec::new();
    for (s, _) in &measured {
        estimates.push(estimate_limits(s, cfg.tail_fraction)?);
    }

    let mut outcomes = Vec::new();
    for (a, check) in cfg.assertions.iter().zip(&checks) {
        outcomes.push(evaluate(a, check, &measured, &estimates, &w)?);
    }

    let dir = out_root.join(&cfg.id);
    fs::create_dir_all(&dir)?;
    for (c, (s, _)) in cfg.compressors.iter().zip(&measured) {
        s.write_csv(fs::File::create(dir.join(format!("{}.csv", c.name)))?)?;
    }
    let by_name = |f: &dyn Fn(usize) -> Value| -> Value {
        Value::Object(cfg.compressors.iter().enumerate().map(|(i, c)| (c.name.clone(), f(i))).collect())
    };
    let summary = json!({
        "config": cfg,
        "prefixLen": w.symbols.len(),
        "checkpoints": cps.len(),
        "rhoHat": by_name(&|i| json!(estimates[i].rho_hat)),
        "RHat": by_name(&|i| json!(estimates[i].r_hat)),
        "argmaxPrefix": by_name(&|i| json!(estimates[i].argmax_prefix)),
        "units": by_name(&|i| json!(measured[i].0.unit)),
        "unitNotes": by_name(&|i| json!(measured[i].0.unit_note)),
        "wallTimeMs": by_name(&|i| json!(measured[i].1 as u64)),
        "seed": cfg.seed,
        "assertions": outcomes,
        "versions": { "pdlab": env!("CARGO_PKG_VERSION") },
    });
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n")?;

    Ok(ExperimentReport {
        id: cfg.id.clone(),
        dir,
        prefix_len: w.symbols.len() as u64,
        estimates: cfg.compressors.iter().map(|c| c.name.clone()).zip(estimates).collect(),
        outcomes,
    })
}

/// Family parameters of the witness, then the entry's overrides.
fn merge_params(w: &WitnessSpec, over: &serde_json::Map<String, Value>) -> Result<ZooParams, (String, String)> {
    let mut p = ZooParams { sigma: w.sigma(), ..ZooParams::default() };
    match *w {
        WitnessSpec::T4 { k, .. } => p.k = k,
        WitnessSpec::T5 { t, .. } => p.t = t,
        WitnessSpec::T6 { k, v, .. } => (p.k, p.v) = (k, v),
        _ => {}
    }
    let mut v = serde_json::to_value(&p).expect("params serialize");
    let obj = v.as_object_mut().expect("params are an object");
    for (k, x) in over {
        if !obj.contains_key(k) {
            return Err((k.clone(), "unknown parameter".into()));
        }
        obj.insert(k.clone(), x.clone());
    }
    serde_path_to_error::deserialize(v).map_err(|e| (e.path().to_string(), e.into_inner().to_string()))
}

fn checkpoints(spec: &CheckpointSpec, w: &Witness) -> Result<Vec<u64>, HarnessError> {
    let len = w.symbols.len() as u64;
    let mut cps = Vec::new();
    for kind in &spec.markers {
        cps.extend(w.positions_of(kind));
    }
    if let Some(g) = &spec.geometric {
        if g.start == 0 || !(g.factor > 1.0) {
            return Err(invalid("checkpoints.geometric", "needs start >= 1 and factor > 1"));
        }
        let mut x = g.start as f64;
        while x <= len as f64 {
            cps.push(x.round() as u64);
            x *= g.factor;
        }
    }
    for (i, &c) in spec.explicit.iter().enumerate() {
        if c > len {
            return Err(invalid(format!("checkpoints.explicit[{i}]"), format!("{c} is past the prefix of {len} symbols")));
        }
        cps.push(c);
    }
    if spec.include_end {
        cps.push(len);
    }
    cps.retain(|&c| c > 0);
    cps.sort_unstable();
    cps.dedup();
    if cps.is_empty() {
        return Err(invalid("checkpoints", "no checkpoint falls inside the prefix"));
    }
    Ok(cps)
}

fn parse_assertions(cfg: &ExperimentConfig) -> Result<Vec<Check>, HarnessError> {
    let index = |name: &str| cfg.compressors.iter().position(|c| c.name == name);
    let side = |o: &Operand, path: String| -> Result<Side, HarnessError> {
        match o {
            Operand::Number(x) => Ok(Side::Num(*x)),
            Operand::Metric(s) => {
                let (name, metric) = s.rsplit_once('.').ok_or_else(|| invalid(&path, "expected <name>.<metric>"))?;
                let i = index(name).ok_or_else(|| invalid(&path, format!("no compressor named {name:?}")))?;
                let m = match metric {
                    "rhoHat" => Metric::RhoHat,
                    "RHat" => Metric::RHat,
                    "finalRatio" => Metric::FinalRatio,
                    "finalSize" => Metric::FinalSize,
                    _ => return Err(invalid(&path, "metric must be rhoHat, RHat, finalRatio or finalSize")),
                };
                Ok(Side::Of(i, m))
            }
        }
    };
    cfg.assertions
        .iter()
        .enumerate()
        .map(|(i, a)| match a {
            Assertion::Compare { left, op, right } => {
                let op = match op.as_str() {
                    "<" => Op::Lt,
                    "<=" => Op::Le,
                    ">" => Op::Gt,
                    ">=" => Op::Ge,
                    "==" => Op::Eq,
                    _ => return Err(invalid(format!("assertions[{i}].op"), "expected <, <=, >, >= or ==")),
                };
                let l = side(&Operand::Metric(left.clone()), format!("assertions[{i}].left"))?;
                let r = side(right, format!("assertions[{i}].right"))?;
                Ok(Check::Compare(l, op, r))
            }
            Assertion::ArgmaxAt { argmax_at, of } => {
                let c = index(of).ok_or_else(|| invalid(format!("assertions[{i}].of"), format!("no compressor named {of:?}")))?;
                Ok(Check::Argmax(argmax_at.clone(), c))
            }
        })
        .collect()
}

fn evaluate(
    a: &Assertion,
    check: &Check,
    measured: &[(RatioSeries, u128)],
    est: &[Estimate],
    w: &Witness,
) -> Result<AssertionOutcome, HarnessError> {
    let text = match a {
        Assertion::Compare { left, op, right } => match right {
            Operand::Number(x) => format!("{left} {op} {x}"),
            Operand::Metric(m) => format!("{left} {op} {m}"),
        },
        Assertion::ArgmaxAt { argmax_at, of } => format!("argmax of {of} at {argmax_at}"),
    };
    let value = |s: &Side| -> (f64, Option<Unit>) {
        match *s {
            Side::Num(x) => (x, None),
            Side::Of(i, m) => {
                let last = measured[i].0.last().expect("series is nonempty");
                match m {
                    Metric::RhoHat => (est[i].rho_hat, None),
                    Metric::RHat => (est[i].r_hat, None),
                    Metric::FinalRatio => (last.ratio, None),
                    Metric::FinalSize => (last.output_size as f64, Some(measured[i].0.unit)),
                }
            }
        }
    };
    match check {
        Check::Compare(l, op, r) => {
            let ((x, ux), (y, uy)) = (value(l), value(r));
            if let (Some(a), Some(b)) = (ux, uy) {
                if a != b {
                    return Err(HarnessError::MixedUnits(a, b));
                }
            }
            let passed = match op {
                Op::Lt => x < y,
                Op::Le => x <= y,
                Op::Gt => x > y,
                Op::Ge => x >= y,
                Op::Eq => x == y,
            };
            Ok(AssertionOutcome { assertion: text, passed, detail: format!("{x} vs {y}") })
        }
        Check::Argmax(kind, i) => {
            let at = est[*i].argmax_prefix;
            let passed = w.positions_of(kind).contains(&at);
            let kinds = w.checkpoints.iter().find(|c| c.position == at).map(|c| c.kind.as_str()).unwrap_or("no marker");
            Ok(AssertionOutcome { assertion: text, passed, detail: format!("peak at {at} ({kinds})") })
        }
    }
}
