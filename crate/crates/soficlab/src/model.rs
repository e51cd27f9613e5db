//! The JSON model file: named spaces, codes, measures, representations,
//! stochastic modules and potentials, with cross-references by name.
//!
//! ```json
//! {
//!   "version": "soficlab/1",
//!   "spaces":   {"X": {"alphabet": ["a", "b1", "b2"], "adjacency": [[0,1,1],[1,1,0],[1,0,1]]}},
//!   "codes":    {"pi": {"domain": "X", "codomain": ["a", "b"], "table": {"a": "a", "b1": "b", "b2": "b"}}},
//!   "measures": {"mu": {"space": "X", "order": 1, "transition": [["0","1/2","1/2"], ...]}}
//! }
//! ```
//!
//! A code's `codomain` is either a space name or an alphabet. A measure gives
//! either `transition` or `weights`, a nonnegative irreducible matrix whose
//! stochasticization is the transition matrix. Representations and modules
//! are `{"alphabet"?, "x", "phi": {symbol: matrix}, "y"}`; without `alphabet`
//! the symbols of `phi` are taken in sorted order. Potential values are
//! numbers, rational strings, or `"log(q)"` / `"-log(q)"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::linear_rep::LinearRepresentation;
use crate::markov_measure::{MarkovMeasure, StochasticMatrix};
use crate::perron::stochasticize;
use crate::rational::{format_rational, ln, parse_rational, Rational};
use crate::shift_space::{build_sft, Alphabet, BlockCode, SftSpace};
use crate::stochastic_module::StochasticModule;
use crate::thermo::LocallyConstantPotential;

pub const FORMAT_VERSION: &str = "soficlab/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeEntry {
    pub domain: String,
    /// Name of the image space, when the codomain is given as one.
    pub codomain_space: Option<String>,
    pub code: BlockCode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureEntry {
    pub space: String,
    /// Present when the transition matrix was given as `stoch(weights)`.
    pub weights: Option<Matrix>,
    pub measure: MarkovMeasure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialEntry {
    pub space: String,
    pub potential: LocallyConstantPotential,
}

/// Sections are keyed by name; "the first" object of a kind is the
/// lexicographically least name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    pub spaces: BTreeMap<String, SftSpace>,
    pub codes: BTreeMap<String, CodeEntry>,
    pub measures: BTreeMap<String, MeasureEntry>,
    pub representations: BTreeMap<String, LinearRepresentation>,
    pub modules: BTreeMap<String, StochasticModule>,
    pub potentials: BTreeMap<String, PotentialEntry>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Model(format!("{path}: {msg}"))
}

fn located<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Model(m) => Error::Model(m),
        other => at(path, other),
    })
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| at(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| at(path, "expected an array"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| at(path, format!("missing field \"{key}\"")))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| at(path, "expected a string"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| at(path, "expected a nonnegative integer"))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(at(path, format!("unknown field \"{k}\""))),
        None => Ok(()),
    }
}

/// A rational from a string (`"p/q"`, integer, decimal) or a JSON number.
pub fn rational_value(v: &Value, path: &str) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(at(path, "expected a rational (string \"p/q\" or number)")),
    };
    parse_rational(&text).map_err(|_| at(path, format!("cannot parse \"{text}\" as a rational")))
}

pub fn vector_value(v: &Value, path: &str) -> Result<Vector> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_value(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_value(v: &Value, path: &str) -> Result<Matrix> {
    let rows: Vec<Vector> = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| vector_value(r, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    let n = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(at(
            &format!("{path}[{i}]"),
            format!("row length differs from {n}"),
        ));
    }
    Ok(Matrix::from_rows(rows))
}

/// Number, rational string, or `log(q)` / `-log(q)`.
pub fn real_value(v: &Value, path: &str) -> Result<f64> {
    if let Some(x) = v.as_f64() {
        return Ok(x);
    }
    let text = string(v, path)?.trim();
    let (sign, rest) = match text.strip_prefix('-') {
        Some(r) if r.trim_start().starts_with("log") => (-1.0, r.trim_start()),
        _ => (1.0, text),
    };
    if let Some(arg) = rest.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
        let q = parse_rational(arg).map_err(|_| at(path, format!("cannot parse \"{text}\"")))?;
        if q <= Rational::from_integer(0.into()) {
            return Err(at(path, "log of a nonpositive number"));
        }
        return Ok(sign * ln(&q));
    }
    let q =
        parse_rational(text).map_err(|_| at(path, format!("cannot parse \"{text}\" as a real")))?;
    Ok(crate::rational::to_f64(&q))
}

fn format_vector(v: &[Rational]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| Value::String(format_rational(x)))
            .collect(),
    )
}

pub fn format_matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| format_vector(m.row(i))).collect())
}

fn alphabet_value(v: &Value, path: &str) -> Result<Alphabet> {
    let names: Vec<&str> = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, s)| string(s, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    located(path, Alphabet::new(names))
}

fn parse_space(v: &Value, path: &str) -> Result<SftSpace> {
    let obj = object(v, path)?;
    check_keys(obj, &["alphabet", "adjacency"], path)?;
    let alphabet = alphabet_value(field(obj, "alphabet", path)?, &format!("{path}.alphabet"))?;
    let apath = format!("{path}.adjacency");
    let rows = array(field(obj, "adjacency", path)?, &apath)?;
    let mut adjacency = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{apath}[{i}]");
        let entries = array(row, &rpath)?
            .iter()
            .enumerate()
            .map(|(j, x)| match x.as_u64() {
                Some(0) => Ok(false),
                Some(1) => Ok(true),
                _ => Err(at(
                    &format!("{rpath}[{j}]"),
                    "adjacency entries must be 0 or 1",
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        adjacency.push(entries);
    }
    let n = alphabet.len();
    let space = located(path, build_sft(alphabet.clone(), adjacency))?;
    if space.len() != n {
        let lost = alphabet
            .names()
            .iter()
            .find(|s| space.alphabet().index_of(s).is_none())
            .cloned()
            .unwrap_or_default();
        return Err(at(
            path,
            format!("symbol \"{lost}\" lies on no bi-infinite path"),
        ));
    }
    if !space.is_irreducible() {
        return Err(at(path, "adjacency is not irreducible"));
    }
    Ok(space)
}

fn space_json(s: &SftSpace) -> Value {
    json!({
        "alphabet": s.alphabet().names(),
        "adjacency": s.adjacency().iter().map(|r| r.iter().map(|&b| u8::from(b)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

impl Model {
    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
        Model::from_json_str(&text).map_err(|e| match e {
            Error::Model(m) => Error::Model(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Model> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Model(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Model::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Model> {
        let obj = object(v, "model")?;
        check_keys(
            obj,
            &[
                "version",
                "spaces",
                "codes",
                "measures",
                "representations",
                "modules",
                "potentials",
                "description",
            ],
            "model",
        )?;
        let version = string(field(obj, "version", "model")?, "version")?;
        if version != FORMAT_VERSION {
            return Err(at(
                "version",
                format!("unsupported version \"{version}\", expected \"{FORMAT_VERSION}\""),
            ));
        }
        let section = |key: &str| -> Result<Vec<(String, &Value)>> {
            match obj.get(key) {
                None => Ok(Vec::new()),
                Some(s) => Ok(object(s, key)?
                    .iter()
                    .map(|(k, v)| (k.clone(), v))
                    .collect()),
            }
        };
        let mut model = Model::default();
        for (name, v) in section("spaces")? {
            let space = parse_space(v, &format!("spaces.{name}"))?;
            model.spaces.insert(name, space);
        }
        for (name, v) in section("codes")? {
            let entry = model.parse_code(v, &format!("codes.{name}"))?;
            model.codes.insert(name, entry);
        }
        for (name, v) in section("measures")? {
            let entry = model.parse_measure(v, &format!("measures.{name}"))?;
            model.measures.insert(name, entry);
        }
        for (name, v) in section("representations")? {
            let (alphabet, x, phi, y) = parse_series(v, &format!("representations.{name}"))?;
            let rep = located(
                &format!("representations.{name}"),
                LinearRepresentation::new(alphabet, x, phi, y),
            )?;
            model.representations.insert(name, rep);
        }
        for (name, v) in section("modules")? {
            let (alphabet, x, phi, y) = parse_series(v, &format!("modules.{name}"))?;
            let module = located(
                &format!("modules.{name}"),
                StochasticModule::new(alphabet, x, phi, y),
            )?;
            model.modules.insert(name, module);
        }
        for (name, v) in section("potentials")? {
            let entry = model.parse_potential(v, &format!("potentials.{name}"))?;
            model.potentials.insert(name, entry);
        }
        Ok(model)
    }

    fn space_ref(&self, v: &Value, path: &str) -> Result<(String, &SftSpace)> {
        let name = string(v, path)?;
        let space = self
            .spaces
            .get(name)
            .ok_or_else(|| at(path, format!("no space named \"{name}\"")))?;
        Ok((name.to_string(), space))
    }

    fn parse_code(&self, v: &Value, path: &str) -> Result<CodeEntry> {
        let obj = object(v, path)?;
        check_keys(
            obj,
            &["domain", "codomain", "memory", "anticipation", "table"],
            path,
        )?;
        let (domain, x) = self.space_ref(field(obj, "domain", path)?, &format!("{path}.domain"))?;
        let cpath = format!("{path}.codomain");
        let (codomain_space, codomain) = match field(obj, "codomain", path)? {
            Value::String(_) => {
                let (name, y) = self.space_ref(&obj["codomain"], &cpath)?;
                (Some(name), y.alphabet().clone())
            }
            other => (None, alphabet_value(other, &cpath)?),
        };
        let memory = obj
            .get("memory")
            .map_or(Ok(0), |m| count(m, &format!("{path}.memory")))?;
        let anticipation = obj
            .get("anticipation")
            .map_or(Ok(0), |m| count(m, &format!("{path}.anticipation")))?;
        let tpath = format!("{path}.table");
        let mut table = BTreeMap::new();
        for (block, image) in object(field(obj, "table", path)?, &tpath)? {
            let epath = format!("{tpath}.{block}");
            let b = located(&epath, x.alphabet().parse_word(block))?;
            let name = string(image, &epath)?;
            let s = codomain
                .index_of(name)
                .ok_or_else(|| at(&epath, format!("\"{name}\" is not a codomain symbol")))?;
            table.insert(b, s);
        }
        let code = located(
            path,
            BlockCode::new(x, memory, anticipation, codomain, table),
        )?;
        Ok(CodeEntry {
            domain,
            codomain_space,
            code,
        })
    }

    fn parse_measure(&self, v: &Value, path: &str) -> Result<MeasureEntry> {
        let obj = object(v, path)?;
        check_keys(
            obj,
            &["space", "order", "transition", "weights", "stationary"],
            path,
        )?;
        let (space_name, space) =
            self.space_ref(field(obj, "space", path)?, &format!("{path}.space"))?;
        let order = obj
            .get("order")
            .map_or(Ok(1), |o| count(o, &format!("{path}.order")))?;
        let (weights, transition) = match (obj.get("transition"), obj.get("weights")) {
            (Some(t), None) => {
                let tpath = format!("{path}.transition");
                (
                    None,
                    located(&tpath, StochasticMatrix::new(matrix_value(t, &tpath)?))?,
                )
            }
            (None, Some(w)) => {
                let wpath = format!("{path}.weights");
                let m = matrix_value(w, &wpath)?;
                let s = located(&wpath, stochasticize(&m))?;
                (Some(m), s.matrix)
            }
            _ => {
                return Err(at(
                    path,
                    "give exactly one of \"transition\" and \"weights\"",
                ))
            }
        };
        let measure = match obj.get("stationary") {
            Some(p) => {
                let ppath = format!("{path}.stationary");
                let p = vector_value(p, &ppath)?;
                located(
                    path,
                    MarkovMeasure::with_stationary(space.clone(), order, transition, p),
                )?
            }
            None => located(path, MarkovMeasure::new(space.clone(), order, transition))?,
        };
        Ok(MeasureEntry {
            space: space_name,
            weights,
            measure,
        })
    }

    fn parse_potential(&self, v: &Value, path: &str) -> Result<PotentialEntry> {
        let obj = object(v, path)?;
        check_keys(obj, &["space", "span", "values"], path)?;
        let (space_name, space) =
            self.space_ref(field(obj, "space", path)?, &format!("{path}.space"))?;
        let span = obj
            .get("span")
            .map_or(Ok(1), |s| count(s, &format!("{path}.span")))?;
        let vpath = format!("{path}.values");
        let mut values = BTreeMap::new();
        for (block, value) in object(field(obj, "values", path)?, &vpath)? {
            let epath = format!("{vpath}.{block}");
            let b = located(&epath, space.alphabet().parse_word(block))?;
            values.insert(b, real_value(value, &epath)?);
        }
        let potential = located(
            path,
            LocallyConstantPotential::new(space.clone(), span, values),
        )?;
        Ok(PotentialEntry {
            space: space_name,
            potential,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("version".into(), json!(FORMAT_VERSION));
        let mut put = |key: &str, section: Map<String, Value>| {
            if !section.is_empty() {
                out.insert(key.into(), Value::Object(section));
            }
        };
        put(
            "spaces",
            self.spaces
                .iter()
                .map(|(k, s)| (k.clone(), space_json(s)))
                .collect(),
        );
        put(
            "codes",
            self.codes
                .iter()
                .map(|(k, c)| (k.clone(), code_json(c, &self.spaces[&c.domain])))
                .collect(),
        );
        put(
            "measures",
            self.measures
                .iter()
                .map(|(k, m)| (k.clone(), measure_json(m)))
                .collect(),
        );
        put(
            "representations",
            self.representations
                .iter()
                .map(|(k, r)| (k.clone(), series_json(r.alphabet(), r.x(), r.phis(), r.y())))
                .collect(),
        );
        put(
            "modules",
            self.modules
                .iter()
                .map(|(k, m)| (k.clone(), series_json(m.alphabet(), m.l(), m.mats(), m.r())))
                .collect(),
        );
        put(
            "potentials",
            self.potentials
                .iter()
                .map(|(k, p)| (k.clone(), potential_json(p)))
                .collect(),
        );
        Value::Object(out)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// The named object, or the first of its kind.
    fn pick<'a, T>(
        section: &'a BTreeMap<String, T>,
        name: Option<&str>,
        kind: &str,
    ) -> Result<(&'a str, &'a T)> {
        match name {
            Some(n) => section
                .get_key_value(n)
                .map(|(k, v)| (k.as_str(), v))
                .ok_or_else(|| Error::Model(format!("no {kind} named \"{n}\""))),
            None => section
                .iter()
                .next()
                .map(|(k, v)| (k.as_str(), v))
                .ok_or_else(|| Error::Model(format!("model has no {kind}"))),
        }
    }

    pub fn space(&self, name: Option<&str>) -> Result<(&str, &SftSpace)> {
        Self::pick(&self.spaces, name, "space")
    }

    pub fn code(&self, name: Option<&str>) -> Result<(&str, &CodeEntry)> {
        Self::pick(&self.codes, name, "code")
    }

    pub fn measure(&self, name: Option<&str>) -> Result<(&str, &MeasureEntry)> {
        Self::pick(&self.measures, name, "measure")
    }

    pub fn representation(&self, name: Option<&str>) -> Result<(&str, &LinearRepresentation)> {
        Self::pick(&self.representations, name, "representation")
    }

    pub fn module(&self, name: Option<&str>) -> Result<(&str, &StochasticModule)> {
        Self::pick(&self.modules, name, "module")
    }

    pub fn potential(&self, name: Option<&str>) -> Result<(&str, &PotentialEntry)> {
        Self::pick(&self.potentials, name, "potential")
    }

    /// The first measure living on the domain of `code`.
    pub fn measure_on(&self, space: &str) -> Result<(&str, &MeasureEntry)> {
        self.measures
            .iter()
            .find(|(_, m)| m.space == space)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Error::Model(format!("model has no measure on space \"{space}\"")))
    }
}

fn parse_series(v: &Value, path: &str) -> Result<(Alphabet, Vector, Vec<Matrix>, Vector)> {
    let obj = object(v, path)?;
    check_keys(obj, &["alphabet", "x", "phi", "y"], path)?;
    let ppath = format!("{path}.phi");
    let phi_obj = object(field(obj, "phi", path)?, &ppath)?;
    let alphabet = match obj.get("alphabet") {
        Some(a) => alphabet_value(a, &format!("{path}.alphabet"))?,
        None => located(
            &ppath,
            Alphabet::new(
                phi_obj
                    .keys()
                    .cloned()
                    .collect::<std::collections::BTreeSet<_>>(),
            ),
        )?,
    };
    if phi_obj.len() != alphabet.len() {
        return Err(at(&ppath, "phi must give one matrix per alphabet symbol"));
    }
    let phi = alphabet
        .names()
        .iter()
        .map(|a| {
            let m = phi_obj
                .get(a)
                .ok_or_else(|| at(&ppath, format!("missing matrix for \"{a}\"")))?;
            matrix_value(m, &format!("{ppath}.{a}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let x = vector_value(field(obj, "x", path)?, &format!("{path}.x"))?;
    let y = vector_value(field(obj, "y", path)?, &format!("{path}.y"))?;
    Ok((alphabet, x, phi, y))
}

pub fn series_json(alphabet: &Alphabet, x: &[Rational], phi: &[Matrix], y: &[Rational]) -> Value {
    json!({
        "alphabet": alphabet.names(),
        "x": format_vector(x),
        "phi": alphabet.names().iter().cloned().zip(phi.iter().map(format_matrix)).collect::<Map<_, _>>(),
        "y": format_vector(y),
    })
}

fn code_json(c: &CodeEntry, domain: &SftSpace) -> Value {
    let codomain = match &c.codomain_space {
        Some(name) => json!(name),
        None => json!(c.code.codomain().names()),
    };
    let table: Map<String, Value> = c
        .code
        .table()
        .iter()
        .map(|(b, &s)| {
            (
                domain.alphabet().block_name(b),
                json!(c.code.codomain().name(s)),
            )
        })
        .collect();
    json!({
        "domain": c.domain,
        "codomain": codomain,
        "memory": c.code.memory(),
        "anticipation": c.code.anticipation(),
        "table": table,
    })
}

fn measure_json(m: &MeasureEntry) -> Value {
    let mut out = Map::new();
    out.insert("space".into(), json!(m.space));
    out.insert("order".into(), json!(m.measure.order()));
    match &m.weights {
        Some(w) => out.insert("weights".into(), format_matrix(w)),
        None => out.insert(
            "transition".into(),
            format_matrix(m.measure.transition().matrix()),
        ),
    };
    Value::Object(out)
}

fn potential_json(p: &PotentialEntry) -> Value {
    let alphabet = p.potential.space().alphabet();
    let values: Map<String, Value> = p
        .potential
        .values()
        .iter()
        .map(|(b, v)| (alphabet.block_name(b), json!(v)))
        .collect();
    json!({ "space": p.space, "span": p.potential.span(), "values": values })
}
