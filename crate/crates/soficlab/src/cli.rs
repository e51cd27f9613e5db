//! Command surface of the `soficlab` binary.
//!
//! Object references have the form `PATH[#NAME]`; `#NAME` alone refers to
//! the `--model` file. Without a name the first object of the needed kind is
//! used. Exit codes: 0 computed, 1 negative decision, 2 error or usage.

use std::path::Path;

use clap::{Parser, ValueEnum};
use num::{BigUint, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lift::{
    e_resolving_lift, finite_to_one_check, markovian_lift, resolving_status, wps, CodeStructure,
    SplitWeights,
};
use crate::linear_rep::LinearRepresentation;
use crate::markov_decide::{
    decide_kstep, decide_kstep_kernel, decide_markov, order_bound, rank_criterion, DecisionContext,
    MarkovStatus, DEFAULT_ENUMERATION_CAP,
};
use crate::markov_measure::{MarkovMeasure, StochasticMatrix};
use crate::model::{format_matrix, rational_value, series_json, CodeEntry, Model};
use crate::rational::{format_rational, to_f64};
use crate::shift_space::{
    preimage_count, recode_to_one_block, Alphabet, BlockCode, SftSpace, Symbol,
};
use crate::stochastic_module::{equivalent, StochasticModule};
use crate::thermo::{compensation_ratio_report, equilibrium_markov, integral, pressure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Eval,
    Entropy,
    Reduce,
    Equiv,
    Core,
    IsMarkov,
    OrderBound,
    Lift,
    Wps,
    Pressure,
    CompRatio,
    Preimages,
    FiberBound,
    Resolving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Vspace,
    Kernel,
    Rank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Pretty,
}

/// Exact computations on hidden Markov (sofic) measures.
#[derive(Debug, Parser)]
#[command(
    name = "soficlab",
    version,
    after_help = "Set SOFICLAB_TOL to override the float tolerance (default 1e-12)."
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Model file, `PATH[#NAME]`.
    #[arg(long)]
    pub model: Option<String>,
    /// Word over the relevant alphabet (`""` is the empty word).
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Alphabet size for `order-bound` without a model.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "vspace")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Code reference (`lift`, `comp-ratio`).
    #[arg(long)]
    pub code: Option<String>,
    /// Target image measure for `lift`.
    #[arg(long)]
    pub from: Option<String>,
    /// Known Markov lift of a Markov image, for `lift`.
    #[arg(long)]
    pub via: Option<String>,
    /// Split weights file for `lift`.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long)]
    pub cycle: Option<String>,
    #[arg(long)]
    pub potential: Option<String>,
    /// Potential on the image space for `comp-ratio`.
    #[arg(long = "G")]
    pub g: Option<String>,
    /// Second object for `equiv`.
    #[arg(long)]
    pub with: Option<String>,
}

/// What a run printed and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        stdout: text,
                        stderr: String::new(),
                        code: 0,
                    }
                }
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                },
            };
        }
    };
    match execute(&args) {
        Ok((value, negative)) => {
            let mut stdout = match args.output {
                OutputFormat::Json => serde_json::to_string(&value),
                OutputFormat::Pretty => serde_json::to_string_pretty(&value),
            }
            .expect("report serializes");
            stdout.push('\n');
            Outcome {
                stdout,
                stderr: String::new(),
                code: if negative { 1 } else { 0 },
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 2,
        },
    }
}

fn usage(msg: &str) -> Error {
    Error::Invalid(format!("{msg} (see soficlab --help)"))
}

/// A loaded model and the object name a reference selected.
struct Ref {
    model: Model,
    name: Option<String>,
}

fn load_ref(reference: Option<&str>, model_flag: Option<&str>, what: &str) -> Result<Ref> {
    let (path, name) = match reference.or(model_flag) {
        None => return Err(usage(&format!("{what} needs --model or a reference"))),
        Some(s) => match s.split_once('#') {
            Some((p, n)) => (p.to_string(), Some(n.to_string()).filter(|n| !n.is_empty())),
            None => (s.to_string(), None),
        },
    };
    let path = if path.is_empty() {
        match model_flag {
            Some(m) => m.split_once('#').map_or(m, |(p, _)| p).to_string(),
            None => return Err(usage("`#NAME` references need --model")),
        }
    } else {
        path
    };
    Ok(Ref {
        model: Model::load(Path::new(&path))?,
        name,
    })
}

fn int_value(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn word_value(alphabet: &Alphabet, w: &[Symbol]) -> Value {
    json!(alphabet.format_word(w))
}

fn vector_json(v: &[crate::rational::Rational]) -> Value {
    Value::Array(v.iter().map(|x| json!(format_rational(x))).collect())
}

fn float_matrix(m: &crate::linalg::Matrix) -> Value {
    Value::Array(m.to_f64().into_iter().map(|r| json!(r)).collect())
}

/// A 1-block code with a 1-step measure carrying the same image measure.
pub fn one_block_view(code: &BlockCode, mu: &MarkovMeasure) -> Result<(BlockCode, MarkovMeasure)> {
    let s = code.span();
    let k = mu.order();
    let len = s.max(k);
    if len == 1 {
        return Ok((code.clone(), mu.clone()));
    }
    let chain = mu.as_chain();
    let lifted = mu.recode(len - k + 1)?;
    let chain_blocks = chain.space().words_of_length(len - k + 1);
    let base_blocks = mu.space().words_of_length(k);
    let map = chain_blocks
        .iter()
        .map(|cb| {
            let mut word = base_blocks[cb[0]].clone();
            word.extend(cb[1..].iter().map(|&b| base_blocks[b][k - 1]));
            code.table()
                .get(&word[..s])
                .copied()
                .ok_or_else(|| Error::Invalid("code is not defined on the measure's space".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let one = BlockCode::one_block(lifted.space(), code.codomain().clone(), map)?;
    Ok((one, lifted))
}

/// Code structure on the 1-block recoding of a model code.
fn code_structure(model: &Model, entry: &CodeEntry) -> Result<CodeStructure> {
    let x = &model.spaces[&entry.domain];
    let y = entry.codomain_space.as_ref().map(|n| &model.spaces[n]);
    if entry.code.is_one_block() {
        CodeStructure::new(&entry.code, x, y)
    } else {
        let (xk, psi, _) = recode_to_one_block(&entry.code, x)?;
        CodeStructure::new(&psi, &xk, y)
    }
}

/// The code's 1-block view and the measure on its domain it carries.
fn image_context(model: &Model, code_name: Option<&str>) -> Result<(BlockCode, MarkovMeasure)> {
    let (_, entry) = model.code(code_name)?;
    let (_, m) = model.measure_on(&entry.domain)?;
    one_block_view(&entry.code, &m.measure)
}

/// The series an object denotes.
enum Series {
    Rep(LinearRepresentation),
    Module(StochasticModule),
}

impl Series {
    fn module(&self) -> StochasticModule {
        match self {
            Series::Rep(r) => r.to_module(),
            Series::Module(m) => m.clone(),
        }
    }

    fn alphabet(&self) -> &Alphabet {
        match self {
            Series::Rep(r) => r.alphabet(),
            Series::Module(m) => m.alphabet(),
        }
    }
}

/// Named object of any kind, or by priority: representation, module, code
/// image, measure.
fn series(r: &Ref) -> Result<Series> {
    let m = &r.model;
    if let Some(name) = r.name.as_deref() {
        if let Some(rep) = m.representations.get(name) {
            return Ok(Series::Rep(rep.clone()));
        }
        if let Some(module) = m.modules.get(name) {
            return Ok(Series::Module(module.clone()));
        }
        if m.codes.contains_key(name) {
            let (code, mu) = image_context(m, Some(name))?;
            return Ok(Series::Rep(LinearRepresentation::from_sofic_image(
                &code, &mu,
            )?));
        }
        if let Some(entry) = m.measures.get(name) {
            return Ok(Series::Rep(measure_series(&entry.measure)?));
        }
        return Err(Error::Model(format!(
            "model has no object named \"{name}\""
        )));
    }
    if let Ok((_, rep)) = m.representation(None) {
        return Ok(Series::Rep(rep.clone()));
    }
    if let Ok((_, module)) = m.module(None) {
        return Ok(Series::Module(module.clone()));
    }
    if !m.codes.is_empty() {
        let (code, mu) = image_context(m, None)?;
        return Ok(Series::Rep(LinearRepresentation::from_sofic_image(
            &code, &mu,
        )?));
    }
    let (_, entry) = m.measure(None)?;
    Ok(Series::Rep(measure_series(&entry.measure)?))
}

/// Cylinder series of a measure over its base alphabet.
fn measure_series(mu: &MarkovMeasure) -> Result<LinearRepresentation> {
    let k = mu.order();
    if k == 1 {
        return LinearRepresentation::from_markov(mu);
    }
    let map = mu
        .space()
        .words_of_length(k)
        .into_iter()
        .map(|b| b[k - 1])
        .collect();
    let code = BlockCode::one_block(mu.chain_space(), mu.space().alphabet().clone(), map)?;
    LinearRepresentation::from_sofic_image(&code, &mu.as_chain())
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| usage(&format!("missing --{flag}")))
}

fn model_ref(args: &Args) -> Result<Ref> {
    load_ref(None, args.model.as_deref(), "this command")
}

fn execute(args: &Args) -> Result<(Value, bool)> {
    match args.command {
        Command::Eval => {
            let word = required(&args.word, "word")?;
            let value = if let Some(reference) = args.measure.as_deref() {
                let r = load_ref(Some(reference), args.model.as_deref(), "eval")?;
                let (_, entry) = r.model.measure(r.name.as_deref())?;
                entry
                    .measure
                    .cylinder(&entry.measure.space().alphabet().parse_word(word)?)
            } else {
                let s = series(&model_ref(args)?)?;
                let w = s.alphabet().parse_word(word)?;
                match &s {
                    Series::Rep(r) => r.evaluate(&w),
                    Series::Module(m) => m.prob(&w),
                }
            };
            Ok((json!({ "value": format_rational(&value) }), false))
        }
        Command::Entropy => {
            let r = load_ref(args.measure.as_deref(), args.model.as_deref(), "entropy")?;
            let (name, entry) = r.model.measure(r.name.as_deref())?;
            Ok((
                json!({ "measure": name, "entropy": entry.measure.entropy() }),
                false,
            ))
        }
        Command::Reduce => {
            let red = series(&model_ref(args)?)?.module().reduce()?;
            let mut out = Map::new();
            out.insert("dim".into(), json!(red.dim()));
            if let Value::Object(s) = series_json(red.alphabet(), red.l(), red.mats(), red.r()) {
                out.extend(s);
            }
            Ok((Value::Object(out), false))
        }
        Command::Equiv => {
            let first = series(&model_ref(args)?)?;
            let second = series(&load_ref(
                Some(required(&args.with, "with")?),
                args.model.as_deref(),
                "equiv",
            )?)?;
            let e = equivalent(&first.module(), &second.module())?;
            let witness = e.witness.as_ref().map(|w| word_value(first.alphabet(), w));
            Ok((
                json!({ "equivalent": e.equivalent, "witness": witness }),
                !e.equivalent,
            ))
        }
        Command::Core => {
            let red = series(&model_ref(args)?)?.module().reduce()?;
            let core = red.core_invariant()?;
            Ok((
                json!({
                    "dim": red.dim(),
                    "core": format_matrix(&core.core),
                    "charpoly": core.charpoly.to_string(),
                    "eventual_charpoly": core.eventual_charpoly.to_string(),
                }),
                false,
            ))
        }
        Command::IsMarkov => is_markov(args),
        Command::OrderBound => {
            let k = args.k.unwrap_or(2);
            let (m, n) = match (args.m, args.n) {
                (Some(m), Some(n)) => (m, n),
                _ => {
                    let red = series(&model_ref(args)?)?.module().reduce()?;
                    let m = (0..red.alphabet().len())
                        .filter(|&a| !red.prob(&[a]).is_zero())
                        .count();
                    (args.m.unwrap_or(m), args.n.unwrap_or(red.dim()))
                }
            };
            let bound = order_bound(k as u32, m as u32, n as u32)?;
            Ok((
                json!({ "k": k, "m": m, "n": n, "bound": int_value(&bound) }),
                false,
            ))
        }
        Command::Lift => lift(args),
        Command::Wps => {
            let r = load_ref(args.measure.as_deref(), args.model.as_deref(), "wps")?;
            let (_, entry) = r.model.measure(r.name.as_deref())?;
            let alphabet = entry.measure.space().alphabet();
            let cycle = alphabet.parse_word(required(&args.cycle, "cycle")?)?;
            let w = wps(&entry.measure, &cycle)?;
            Ok((
                json!({
                    "cycle": alphabet.format_word(&cycle),
                    "period": cycle.len(),
                    "product": format_rational(&w.product),
                    "wps": w.value,
                }),
                false,
            ))
        }
        Command::Pressure => {
            let r = load_ref(args.potential.as_deref(), args.model.as_deref(), "pressure")?;
            let (name, entry) = r.model.potential(r.name.as_deref())?;
            let f = &entry.potential;
            let mu = equilibrium_markov(f)?;
            Ok((
                json!({
                    "potential": name,
                    "pressure": pressure(f)?,
                    "entropy": mu.entropy(),
                    "integral": integral(f, &mu)?,
                    "order": mu.order(),
                    "transition": float_matrix(mu.transition().matrix()),
                }),
                false,
            ))
        }
        Command::CompRatio => {
            let cr = load_ref(args.code.as_deref(), args.model.as_deref(), "comp-ratio")?;
            let (_, entry) = cr.model.code(cr.name.as_deref())?;
            let cs = code_structure(&cr.model, entry)?;
            let gr = load_ref(
                Some(required(&args.g, "G")?),
                args.model.as_deref(),
                "comp-ratio",
            )?;
            let (_, g) = gr.model.potential(gr.name.as_deref())?;
            let report = compensation_ratio_report(&cs, &g.potential, args.n.unwrap_or(12))?;
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(
                    |r| json!({ "length": r.length, "words": r.words, "min": r.min, "max": r.max }),
                )
                .collect();
            Ok((
                json!({
                    "min": report.min,
                    "max": report.max,
                    "rows": rows,
                    "note": "bounded ratios are evidence, not a certificate, that G∘π is a compensation function",
                }),
                false,
            ))
        }
        Command::Preimages => {
            let r = load_ref(args.code.as_deref(), args.model.as_deref(), "preimages")?;
            let (_, entry) = r.model.code(r.name.as_deref())?;
            let w = entry
                .code
                .codomain()
                .parse_word(required(&args.word, "word")?)?;
            let x = &r.model.spaces[&entry.domain];
            let count = if entry.code.is_one_block() {
                preimage_count(&entry.code, x, &w)?
            } else {
                let (xk, psi, _) = recode_to_one_block(&entry.code, x)?;
                preimage_count(&psi, &xk, &w)?
            };
            Ok((json!({ "count": int_value(&count) }), false))
        }
        Command::FiberBound => {
            let r = load_ref(args.code.as_deref(), args.model.as_deref(), "fiber-bound")?;
            let (_, entry) = r.model.code(r.name.as_deref())?;
            let cs = code_structure(&r.model, entry)?;
            let support = match &args.word {
                Some(w) => cs.y().alphabet().parse_word(w)?,
                None => (0..cs.y().len()).collect(),
            };
            Ok((
                json!({ "bound": crate::lift::fiber_bound(&cs, &support)? }),
                false,
            ))
        }
        Command::Resolving => {
            let r = load_ref(args.code.as_deref(), args.model.as_deref(), "resolving")?;
            let (_, entry) = r.model.code(r.name.as_deref())?;
            let cs = code_structure(&r.model, entry)?;
            let s = resolving_status(&cs);
            Ok((
                json!({
                    "right_resolving": s.right_resolving,
                    "left_resolving": s.left_resolving,
                    "right_e_resolving": s.right_e_resolving,
                    "left_e_resolving": s.left_e_resolving,
                    "finite_to_one": finite_to_one_check(&cs),
                }),
                false,
            ))
        }
    }
}

fn is_markov(args: &Args) -> Result<(Value, bool)> {
    let r = model_ref(args)?;
    if args.method == Method::Rank && r.model.codes.is_empty() {
        let k = *required(&args.k, "k")?;
        let s = series(&r)?;
        let v = rank_criterion(&s.module(), k, args.cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?;
        let w = v.witness.as_ref().map(|w| word_value(s.alphabet(), w));
        return Ok((
            json!({ "is_k_markov": v.is_k_markov, "witness": w }),
            !v.is_k_markov,
        ));
    }
    let (code, mu) = image_context(&r.model, r.name.as_deref())?;
    let ctx = DecisionContext::new(&code, &mu)?;
    let image = code.codomain().clone();
    let Some(k) = args.k else {
        let v = decide_markov(&ctx, args.cap)?;
        let mut out = Map::new();
        let negative = match v.status {
            MarkovStatus::Markov { k } => {
                out.insert("status".into(), json!("markov"));
                out.insert("k".into(), json!(k));
                false
            }
            MarkovStatus::NotMarkov => {
                out.insert("status".into(), json!("not_markov"));
                true
            }
            MarkovStatus::UndecidedAtCap => {
                out.insert("status".into(), json!("undecided_at_cap"));
                false
            }
        };
        out.insert("reduced_dim".into(), json!(v.reduced_dim));
        out.insert("alphabet_size".into(), json!(v.alphabet_size));
        out.insert(
            "bound".into(),
            v.bound.as_ref().map_or(Value::Null, int_value),
        );
        out.insert("cap".into(), json!(v.cap));
        out.insert("lengths_checked".into(), json!(v.lengths_checked));
        out.insert(
            "witness".into(),
            v.witness
                .as_ref()
                .map_or(Value::Null, |w| word_value(&image, w)),
        );
        if let Some(chain) = &v.chain {
            out.insert("states".into(), states_json(&image, &chain.states));
            out.insert("Q".into(), format_matrix(&chain.transition));
        }
        out.insert("detail".into(), json!(v.detail));
        return Ok((Value::Object(out), negative));
    };
    match args.method {
        Method::Vspace => {
            let v = decide_kstep(&ctx, k)?;
            let mut out = Map::new();
            out.insert("is_k_markov".into(), json!(v.is_k_markov));
            if k > 1 {
                out.insert("states".into(), states_json(&image, &v.states));
            }
            out.insert("Q".into(), format_matrix(&v.transition));
            if let Some(w) = &v.witness {
                out.insert(
                    "witness".into(),
                    json!({
                        "history": mu.space().alphabet().format_word(&w.history),
                        "context": image.format_word(&w.context),
                        "next": image.name(w.next),
                    }),
                );
            }
            Ok((Value::Object(out), !v.is_k_markov))
        }
        Method::Kernel => {
            let v = decide_kstep_kernel(&ctx, k)?;
            let w = v.witness.as_ref().map(|w| word_value(&image, w));
            Ok((json!({ "is_k_markov": v.holds, "witness": w }), !v.holds))
        }
        Method::Rank => {
            let v = rank_criterion(
                &ctx.reduced_module()?,
                k,
                args.cap.unwrap_or(DEFAULT_ENUMERATION_CAP),
            )?;
            let w = v.witness.as_ref().map(|w| word_value(&image, w));
            Ok((
                json!({ "is_k_markov": v.is_k_markov, "witness": w }),
                !v.is_k_markov,
            ))
        }
    }
}

fn states_json(alphabet: &Alphabet, states: &[Vec<Symbol>]) -> Value {
    Value::Array(
        states
            .iter()
            .map(|s| json!(alphabet.format_word(s)))
            .collect(),
    )
}

/// Weights file: `{"ij": "1/4", …}` keyed by domain 2-blocks, optionally
/// wrapped as `{"weights": {…}}`.
fn load_weights(path: &str, x: &SftSpace) -> Result<SplitWeights> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Model(format!("cannot read {path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        Error::Model(format!(
            "{path}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let obj = v.get("weights").unwrap_or(&v);
    let obj = obj
        .as_object()
        .ok_or_else(|| Error::Model(format!("{path}: expected an object of weights")))?;
    let mut out = SplitWeights::new();
    for (key, value) in obj {
        let b = x
            .alphabet()
            .parse_word(key)
            .map_err(|e| Error::Model(format!("{path}: {key}: {e}")))?;
        if b.len() != 2 {
            return Err(Error::Model(format!(
                "{path}: {key}: weights are keyed by 2-blocks"
            )));
        }
        out.insert(
            (b[0], b[1]),
            rational_value(value, &format!("{path}: {key}"))?,
        );
    }
    Ok(out)
}

fn lift(args: &Args) -> Result<(Value, bool)> {
    let cr = load_ref(args.code.as_deref(), args.model.as_deref(), "lift")?;
    let (_, entry) = cr.model.code(cr.name.as_deref())?;
    if !entry.code.is_one_block() {
        return Err(Error::Invalid("lift needs a 1-block code".into()));
    }
    let cs = code_structure(&cr.model, entry)?;
    let fr = load_ref(
        Some(required(&args.from, "from")?),
        args.model.as_deref(),
        "lift",
    )?;
    let (_, target) = fr.model.measure(fr.name.as_deref())?;
    if target.measure.order() != 1 || target.measure.space() != cs.y() {
        return Err(Error::Invalid(
            "--from must be a 1-step measure on the image space".into(),
        ));
    }
    let q_target = target.measure.transition();
    let (method, result) = match args.via.as_deref() {
        Some(reference) => {
            let vr = load_ref(Some(reference), args.model.as_deref(), "lift")?;
            let (_, via) = vr.model.measure(vr.name.as_deref())?;
            if via.measure.order() != 1 || via.measure.space() != cs.x() {
                return Err(Error::Invalid(
                    "--via must be a 1-step measure on the domain space".into(),
                ));
            }
            let ctx = DecisionContext::new(cs.code(), &via.measure)?;
            let image = decide_kstep(&ctx, 1)?;
            if !image.is_k_markov || image.states.len() != cs.y().len() {
                return Err(Error::LiftPrecondition);
            }
            let q = StochasticMatrix::new(image.transition)?;
            (
                "markovian",
                markovian_lift(&cs, via.measure.transition(), &q, q_target)?,
            )
        }
        None => {
            let weights = args
                .weights
                .as_deref()
                .map(|p| load_weights(p, cs.x()))
                .transpose()?;
            (
                "e_resolving",
                e_resolving_lift(&cs, q_target, weights.as_ref())?,
            )
        }
    };
    let mu = MarkovMeasure::new(cs.x().clone(), 1, result.transition.clone())?;
    let transition = if result.exact {
        format_matrix(result.transition.matrix())
    } else {
        float_matrix(result.transition.matrix())
    };
    let stationary = if result.exact {
        vector_json(mu.stationary())
    } else {
        Value::Array(mu.stationary().iter().map(|p| json!(to_f64(p))).collect())
    };
    Ok((
        json!({
            "method": method,
            "exact": result.exact,
            "alphabet": cs.x().alphabet().names(),
            "transition": transition,
            "stationary": stationary,
        }),
        false,
    ))
}
