//! Python bindings: a `Model` wrapper over model files and a `run` entry point
//! that behaves like the command-line tool. Rationals cross the boundary as
//! `"num/den"` strings, so `fractions.Fraction(s)` recovers them exactly.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use soficlab::markov_decide::MarkovStatus;
use soficlab::rational::format_rational;
use soficlab::{
    cli, decide_kstep, decide_markov, order_bound, pressure, DecisionContext, Error,
    LinearRepresentation, Matrix,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_strings()
}

#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: soficlab::Model,
}

impl PyModel {
    fn context(&self, code: Option<&str>) -> PyResult<DecisionContext> {
        let (_, entry) = self.inner.code(code).map_err(err)?;
        let (_, mu) = self.inner.measure_on(&entry.domain).map_err(err)?;
        let (code, mu) = cli::one_block_view(&entry.code, &mu.measure).map_err(err)?;
        DecisionContext::new(&code, &mu).map_err(err)
    }
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: soficlab::Model::load(path).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: soficlab::Model::from_json_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn names(&self, section: &str) -> PyResult<Vec<String>> {
        let m = &self.inner;
        let keys: Vec<String> = match section {
            "spaces" => m.spaces.keys().cloned().collect(),
            "codes" => m.codes.keys().cloned().collect(),
            "measures" => m.measures.keys().cloned().collect(),
            "representations" => m.representations.keys().cloned().collect(),
            "modules" => m.modules.keys().cloned().collect(),
            "potentials" => m.potentials.keys().cloned().collect(),
            _ => return Err(PyKeyError::new_err(section.to_string())),
        };
        Ok(keys)
    }

    /// Measure of the cylinder `[word]` under a Markov measure of the model.
    #[pyo3(signature = (word, measure=None))]
    fn cylinder(&self, word: &str, measure: Option<&str>) -> PyResult<String> {
        let (_, entry) = self.inner.measure(measure).map_err(err)?;
        let w = entry
            .measure
            .space()
            .alphabet()
            .parse_word(word)
            .map_err(err)?;
        Ok(format_rational(&entry.measure.cylinder(&w)))
    }

    /// Measure of `[word]` under the image of the code's domain measure.
    #[pyo3(signature = (word, code=None))]
    fn image_cylinder(&self, word: &str, code: Option<&str>) -> PyResult<String> {
        let ctx = self.context(code)?;
        let rep = LinearRepresentation::from_sofic_image(ctx.code(), ctx.measure()).map_err(err)?;
        let w = rep.alphabet().parse_word(word).map_err(err)?;
        Ok(format_rational(&rep.evaluate(&w)))
    }

    #[pyo3(signature = (measure=None))]
    fn stationary(&self, measure: Option<&str>) -> PyResult<Vec<String>> {
        let (_, entry) = self.inner.measure(measure).map_err(err)?;
        Ok(entry
            .measure
            .stationary()
            .iter()
            .map(format_rational)
            .collect())
    }

    /// `(is_k_markov, candidate transition matrix)`.
    #[pyo3(signature = (k, code=None))]
    fn is_k_markov(&self, k: usize, code: Option<&str>) -> PyResult<(bool, Vec<Vec<String>>)> {
        let v = decide_kstep(&self.context(code)?, k).map_err(err)?;
        Ok((v.is_k_markov, strings(&v.transition)))
    }

    /// `"markov"`, `"not_markov"` or `"undecided_at_cap"`, with the order when Markov.
    #[pyo3(signature = (code=None, cap=None))]
    fn markov_status(
        &self,
        code: Option<&str>,
        cap: Option<usize>,
    ) -> PyResult<(String, Option<usize>)> {
        let v = decide_markov(&self.context(code)?, cap).map_err(err)?;
        Ok(match v.status {
            MarkovStatus::Markov { k } => ("markov".into(), Some(k)),
            MarkovStatus::NotMarkov => ("not_markov".into(), None),
            MarkovStatus::UndecidedAtCap => ("undecided_at_cap".into(), None),
        })
    }

    #[pyo3(signature = (potential=None))]
    fn pressure(&self, potential: Option<&str>) -> PyResult<f64> {
        let (_, entry) = self.inner.potential(potential).map_err(err)?;
        pressure(&entry.potential).map_err(err)
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!(
            "Model(spaces={}, codes={}, measures={}, potentials={})",
            m.spaces.len(),
            m.codes.len(),
            m.measures.len(),
            m.potentials.len()
        )
    }
}

/// `N(k, m, n)` as a decimal string.
#[pyfunction(name = "order_bound")]
fn py_order_bound(k: u32, m: u32, n: u32) -> PyResult<String> {
    Ok(order_bound(k, m, n).map_err(err)?.to_string())
}

/// Runs one command-line invocation; returns `(exit_code, stdout, stderr)`.
#[pyfunction(name = "run")]
fn py_run(args: Vec<String>) -> (i32, String, String) {
    let out = cli::run(std::iter::once("soficlab".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn soficlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(py_order_bound, m)?)?;
    m.add_function(wrap_pyfunction!(py_run, m)?)?;
    Ok(())
}
