//! Pressure and equilibrium states of locally constant potentials, and
//! fiber-counting diagnostics for factor codes. All outputs are floats.

use std::collections::BTreeMap;

use num::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lift::CodeStructure;
use crate::linalg::{Matrix, Vector};
use crate::linear_rep::LinearRepresentation;
use crate::markov_measure::MarkovMeasure;
use crate::perron::{perron, stochasticize_f64, tolerance};
use crate::rational::to_f64;
use crate::shift_space::{preimage_count, SftSpace, Symbol};

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `f(x) = values[x₀ … x_{span-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocallyConstantPotential {
    space: SftSpace,
    span: usize,
    values: BTreeMap<Vec<Symbol>, f64>,
}

impl LocallyConstantPotential {
    /// `values` must be defined on exactly the allowed `span`-blocks.
    pub fn new(space: SftSpace, span: usize, values: BTreeMap<Vec<Symbol>, f64>) -> Result<Self> {
        if span == 0 {
            return Err(Error::Invalid("potential span must be positive".into()));
        }
        let blocks = space.words_of_length(span);
        if values.len() != blocks.len() || blocks.iter().any(|b| !values.contains_key(b)) {
            return Err(Error::Invalid(format!(
                "potential must be given on exactly the allowed {span}-blocks"
            )));
        }
        if values.values().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("potential values must be finite".into()));
        }
        Ok(LocallyConstantPotential {
            space,
            span,
            values,
        })
    }

    pub fn from_fn(space: SftSpace, span: usize, f: impl Fn(&[Symbol]) -> f64) -> Result<Self> {
        let values = space.words_of_length(span).into_iter().map(|b| {
            let v = f(&b);
            (b, v)
        });
        Self::new(space.clone(), span, values.collect())
    }

    pub fn constant(space: SftSpace, c: f64) -> Result<Self> {
        Self::from_fn(space, 1, |_| c)
    }

    pub fn space(&self) -> &SftSpace {
        &self.space
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn values(&self) -> &BTreeMap<Vec<Symbol>, f64> {
        &self.values
    }

    pub fn value(&self, block: &[Symbol]) -> Option<f64> {
        self.values.get(block).copied()
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        LocallyConstantPotential {
            space: self.space.clone(),
            span: self.span,
            values: self
                .values
                .iter()
                .map(|(b, v)| (b.clone(), v + c))
                .collect(),
        }
    }

    /// Birkhoff sum over the windows of `w` of length `span`.
    pub fn birkhoff_sum(&self, w: &[Symbol]) -> Result<f64> {
        let mut s = CompensatedSum::default();
        if w.len() >= self.span {
            for b in w.windows(self.span) {
                s.add(
                    self.value(b)
                        .ok_or_else(|| Error::Invalid("word is not allowed".into()))?,
                );
            }
        }
        Ok(s.value())
    }

    /// Order of the chain the potential lives on after recoding to span 2.
    fn chain_order(&self) -> usize {
        self.span.saturating_sub(1).max(1)
    }

    /// `Q_f(u, v) = exp f(u v_last)` on the `(span−1)`-block presentation
    /// (`exp f(u)` for span 1).
    pub fn transfer_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let k = self.chain_order();
        let blocks = self.space.words_of_length(k);
        let n = blocks.len();
        let mut q = vec![vec![0.0; n]; n];
        for (i, u) in blocks.iter().enumerate() {
            for (j, v) in blocks.iter().enumerate() {
                if u[1..] != v[..k - 1] || !self.space.allowed(u[k - 1], v[k - 1]) {
                    continue;
                }
                let value = if self.span == 1 {
                    self.values[u]
                } else {
                    let mut uv = u.clone();
                    uv.push(v[k - 1]);
                    self.values[&uv]
                };
                q[i][j] = value.exp();
            }
        }
        Ok(q)
    }
}

/// `log ρ(Q_f)`.
pub fn pressure(f: &LocallyConstantPotential) -> Result<f64> {
    Ok(perron(&f.transfer_matrix()?, tolerance())?.rho.ln())
}

/// The equilibrium state `stoch(Q_f)`, as a Markov measure of order
/// `max(span − 1, 1)` on the potential's space.
pub fn equilibrium_markov(f: &LocallyConstantPotential) -> Result<MarkovMeasure> {
    let s = stochasticize_f64(&f.transfer_matrix()?)?;
    MarkovMeasure::new(f.space.clone(), f.chain_order(), s.matrix)
}

/// `∫ f dμ = Σ_b μ(b) f(b)` over allowed `span`-blocks.
pub fn integral(f: &LocallyConstantPotential, mu: &MarkovMeasure) -> Result<f64> {
    if mu.space() != &f.space {
        return Err(Error::Invalid(
            "measure and potential live on different spaces".into(),
        ));
    }
    Ok(f.values
        .iter()
        .map(|(b, v)| to_f64(&mu.cylinder(b)) * v)
        .collect::<CompensatedSum>()
        .value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub length: usize,
    /// Image words of this length (words with no preimage are skipped).
    pub words: usize,
    pub min: f64,
    pub max: f64,
}

/// `exp(S_ℓ G(w)) · |π⁻¹(w)|` over image words `w` up to length `n`.
/// Bounded ratios are evidence, not proof, that `G ∘ π` compensates.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub min: f64,
    pub max: f64,
}

pub fn compensation_ratio_report(
    cs: &CodeStructure,
    g: &LocallyConstantPotential,
    n: usize,
) -> Result<RatioReport> {
    if g.space() != cs.y() {
        return Err(Error::Invalid(
            "G must be a potential on the image space".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for length in 1..=n {
        let mut row = RatioRow {
            length,
            words: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        for w in cs.y().words_of_length(length) {
            let count = preimage_count(cs.code(), cs.x(), &w)?;
            if count.is_zero() {
                continue;
            }
            let ratio = (g.birkhoff_sum(&w)? + count.to_f64().unwrap_or(f64::INFINITY).ln()).exp();
            row.words += 1;
            row.min = row.min.min(ratio);
            row.max = row.max.max(ratio);
        }
        rows.push(row);
    }
    let min = rows.iter().map(|r| r.min).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.max).fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioReport { rows, min, max })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate {
    /// The estimate at the horizon.
    pub value: f64,
    /// `(1/ℓ) Σ_{|w|=ℓ} ν(w) log |π⁻¹(w)|` for `ℓ = 1..=n`.
    pub sequence: Vec<f64>,
}

/// Finite-horizon estimate of `∫ P(π, 0) dν` from preimage counts.
pub fn relative_entropy_estimate(
    cs: &CodeStructure,
    nu: &LinearRepresentation,
    n: usize,
) -> Result<EntropyEstimate> {
    if nu.alphabet() != cs.y().alphabet() {
        return Err(Error::Invalid(
            "ν must be a series over the image alphabet".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    let map = cs.map();
    let nx = cs.x().len();
    let mut sums = vec![CompensatedSum::default(); n];
    // depth-first over image words, carrying ν's prefix vector and preimage counts
    let mut stack: Vec<(usize, Vector, Vec<f64>)> = Vec::new();
    for b in 0..cs.y().len() {
        let counts: Vec<f64> = map
            .iter()
            .map(|&s| if s == b { 1.0 } else { 0.0 })
            .collect();
        stack.push((1, nu.phi(b).left_apply(nu.x()), counts));
    }
    while let Some((len, v, counts)) = stack.pop() {
        let mass = to_f64(&crate::linalg::dot(&v, nu.y()));
        if mass <= 0.0 {
            continue;
        }
        let total: f64 = counts.iter().sum();
        if total > 0.0 {
            sums[len - 1].add(mass * total.ln());
        }
        if len == n {
            continue;
        }
        for b in 0..cs.y().len() {
            let next: Vec<f64> = (0..nx)
                .map(|j| {
                    if map[j] != b {
                        return 0.0;
                    }
                    (0..nx)
                        .filter(|&i| cs.x().allowed(i, j))
                        .map(|i| counts[i])
                        .sum()
                })
                .collect();
            stack.push((len + 1, nu.phi(b).left_apply(&v), next));
        }
    }
    let sequence: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(i, s)| s.value() / (i + 1) as f64)
        .collect();
    Ok(EntropyEstimate {
        value: sequence[n - 1],
        sequence,
    })
}

/// `log Q(i,j)` potential of a stochastic matrix; the equilibrium state is the chain itself.
pub fn log_potential(space: &SftSpace, p: &Matrix) -> Result<LocallyConstantPotential> {
    LocallyConstantPotential::from_fn(space.clone(), 2, |b| crate::rational::ln(p.get(b[0], b[1])))
}
