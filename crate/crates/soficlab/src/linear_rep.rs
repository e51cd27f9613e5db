//! Linear representations `(x, φ, y)` of shift-invariant measures:
//! construction from Markov data, evaluation, canonical form, and a Markov
//! presentation of a canonical representation.

use std::collections::VecDeque;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, inverse, kernel, left_kernel, Matrix, RowSpace, Vector};
use crate::markov_measure::{MarkovMeasure, StochasticMatrix};
use crate::rational::Rational;
use crate::shift_space::{components, Alphabet, BlockCode, Symbol};
use crate::stochastic_module::{equivalent, StochasticModule};

/// `F(w) = x φ(w₁) ⋯ φ(w_n) y` with nonnegative data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRepresentation {
    alphabet: Alphabet,
    x: Vector,
    phi: Vec<Matrix>,
    y: Vector,
}

/// Markov measure plus the 1-block code that carries it onto a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoficPresentation {
    pub measure: MarkovMeasure,
    pub code: BlockCode,
}

/// One irreducible piece of a presentation together with its convex weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPresentation {
    pub weight: Rational,
    pub presentation: SoficPresentation,
}

impl LinearRepresentation {
    pub fn new(alphabet: Alphabet, x: Vector, phi: Vec<Matrix>, y: Vector) -> Result<Self> {
        let n = x.len();
        if n == 0 {
            return Err(Error::Invalid("representation has dimension 0".into()));
        }
        if y.len() != n {
            return Err(Error::Invalid(format!(
                "x has length {n} but y has length {}",
                y.len()
            )));
        }
        if phi.len() != alphabet.len() {
            return Err(Error::Invalid("one matrix per symbol is required".into()));
        }
        for (a, m) in phi.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Invalid(format!(
                    "phi({}) is not {n}×{n}",
                    alphabet.name(a)
                )));
            }
            if !m.is_nonnegative() {
                return Err(Error::Invalid(format!(
                    "phi({}) has a negative entry",
                    alphabet.name(a)
                )));
            }
        }
        if x.iter().chain(&y).any(Signed::is_negative) {
            return Err(Error::Invalid("x and y must be nonnegative".into()));
        }
        Ok(LinearRepresentation {
            alphabet,
            x,
            phi,
            y,
        })
    }

    /// `x = p`, `y = 𝟙`, and `φ(a_j)` keeps column `j` of `P`.
    pub fn from_markov(mu: &MarkovMeasure) -> Result<Self> {
        let map: Vec<Symbol> = (0..mu.chain_space().len()).collect();
        let code =
            BlockCode::one_block(mu.chain_space(), mu.chain_space().alphabet().clone(), map)?;
        Self::from_sofic_image(&code, &mu.as_chain())
    }

    /// `φ(b) = P_b` keeps the columns of `P` whose state maps to `b`.
    pub fn from_sofic_image(code: &BlockCode, mu: &MarkovMeasure) -> Result<Self> {
        if mu.order() != 1 {
            return Err(Error::Invalid(
                "image representation needs a 1-step measure".into(),
            ));
        }
        let map = code.symbol_map()?;
        if map.len() != mu.space().len() {
            return Err(Error::Invalid(
                "code domain does not match the measure's space".into(),
            ));
        }
        let p = mu.transition().matrix();
        let n = p.rows();
        let phi = (0..code.codomain().len())
            .map(|b| {
                Matrix::from_fn(n, n, |i, j| {
                    if map[j] == b {
                        p.get(i, j).clone()
                    } else {
                        Rational::zero()
                    }
                })
            })
            .collect();
        Self::new(
            code.codomain().clone(),
            mu.stationary().to_vec(),
            phi,
            vec![Rational::one(); n],
        )
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn phi(&self, a: Symbol) -> &Matrix {
        &self.phi[a]
    }

    pub fn phis(&self) -> &[Matrix] {
        &self.phi
    }

    /// `P = Σ_a φ(a)`
    pub fn total(&self) -> Matrix {
        let n = self.dim();
        self.phi
            .iter()
            .fold(Matrix::zeros(n, n), |acc, m| acc.add(m))
    }

    pub fn evaluate(&self, w: &[Symbol]) -> Rational {
        let mut v = self.x.clone();
        for &a in w {
            v = self.phi[a].left_apply(&v);
        }
        dot(&v, &self.y)
    }

    pub fn to_module(&self) -> StochasticModule {
        StochasticModule::from_parts(
            self.alphabet.clone(),
            self.x.clone(),
            self.phi.clone(),
            self.y.clone(),
        )
    }

    /// Checks `F(ε) = 1` and `Σ_a F(wa) = F(w) = Σ_a F(aw)` for every word.
    /// Both identities are linear in the spanning vectors `xφ(w)` and `φ(w)y`,
    /// so it suffices to test the words that enlarge those spans; the
    /// reported word is the shortest failing one in that search.
    pub fn check_stationary(&self) -> Result<()> {
        let one = dot(&self.x, &self.y);
        if !one.is_one() {
            return Err(Error::NotStationary(format!("F(ε) = x·y = {one} ≠ 1")));
        }
        let p = self.total();
        let right: Vector = p
            .apply(&self.y)
            .iter()
            .zip(&self.y)
            .map(|(a, b)| a - b)
            .collect();
        if let Some(w) = self.span_search(&self.x, false, &right) {
            let w = self.alphabet.format_word(&w);
            return Err(Error::NotStationary(format!("Σ_a F({w}a) ≠ F({w})")));
        }
        let left: Vector = p
            .left_apply(&self.x)
            .iter()
            .zip(&self.x)
            .map(|(a, b)| a - b)
            .collect();
        if let Some(w) = self.span_search(&self.y, true, &left) {
            let w = self.alphabet.format_word(&w);
            return Err(Error::NotStationary(format!("Σ_a F(a{w}) ≠ F({w})")));
        }
        Ok(())
    }

    /// BFS over the spanning words of `{start φ(w)}` (or `{φ(w) start}` when
    /// `columns`), returning the first whose vector pairs nonzero with `probe`.
    fn span_search(
        &self,
        start: &[Rational],
        columns: bool,
        probe: &[Rational],
    ) -> Option<Vec<Symbol>> {
        let mut space = RowSpace::new(self.dim());
        let mut queue = VecDeque::new();
        if space.insert(start.to_vec()) {
            queue.push_back((Vec::new(), start.to_vec()));
        }
        while let Some((w, v)) = queue.pop_front() {
            if !dot(&v, probe).is_zero() {
                let mut w: Vec<Symbol> = w;
                if columns {
                    w.reverse();
                }
                return Some(w);
            }
            for a in 0..self.alphabet.len() {
                let u = if columns {
                    self.phi[a].apply(&v)
                } else {
                    self.phi[a].left_apply(&v)
                };
                if space.insert(u.clone()) {
                    let mut wa = w.clone();
                    wa.push(a);
                    queue.push_back((wa, u));
                }
            }
        }
        None
    }

    fn keep(&self, idx: &[usize]) -> LinearRepresentation {
        LinearRepresentation {
            alphabet: self.alphabet.clone(),
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            phi: self.phi.iter().map(|m| m.principal(idx)).collect(),
            y: idx.iter().map(|&i| self.y[i].clone()).collect(),
        }
    }

    fn without(&self, drop: &[usize]) -> LinearRepresentation {
        let idx: Vec<usize> = (0..self.dim()).filter(|i| !drop.contains(i)).collect();
        self.keep(&idx)
    }

    /// Equivalent representation with `P` a direct sum of irreducible
    /// stochastic matrices, `x` a positive fixed vector and `y = 𝟙`.
    pub fn canonicalize(&self) -> Result<LinearRepresentation> {
        self.check_stationary()?;
        let mut rep = self.clone();
        let limit = 4 * (self.dim() + 2);
        let mut settled = false;
        for _ in 0..limit {
            let n = rep.dim();
            let p = rep.total();
            if let Some(j) = (0..n).find(|&j| (0..n).all(|i| p.get(i, j).is_zero())) {
                rep.x = p.left_apply(&rep.x);
                rep = rep.without(&[j]);
                continue;
            }
            if let Some(i) = (0..n).find(|&i| p.row(i).iter().all(Zero::is_zero)) {
                rep.y = p.apply(&rep.y);
                rep = rep.without(&[i]);
                continue;
            }
            let support = p.support();
            let comps = components(&support);
            let mut drop = Vec::new();
            for c in &comps {
                let enters = (0..n).any(|i| !c.contains(&i) && c.iter().any(|&j| support[i][j]));
                let leaves = (0..n).any(|j| !c.contains(&j) && c.iter().any(|&i| support[i][j]));
                let x_zero = c.iter().all(|&i| rep.x[i].is_zero());
                let y_zero = c.iter().all(|&i| rep.y[i].is_zero());
                if (!enters && x_zero) || (!leaves && y_zero) {
                    drop.extend(c.iter().copied());
                }
            }
            if !drop.is_empty() {
                rep = rep.without(&drop);
                continue;
            }
            let fixed_x = p.left_apply(&rep.x) == rep.x;
            let fixed_y = p.apply(&rep.y) == rep.y;
            if !fixed_x || !fixed_y {
                let q = fixed_projection(&p)?;
                rep.x = q.left_apply(&rep.x);
                rep.y = q.apply(&rep.y);
                continue;
            }
            settled = true;
            break;
        }
        if !settled {
            return Err(Error::Defect(
                "canonical form did not settle within the iteration bound".into(),
            ));
        }
        if rep.y.iter().any(|v| !v.is_positive()) || rep.x.iter().any(|v| !v.is_positive()) {
            return Err(Error::Defect(
                "canonical form has a vanishing coordinate".into(),
            ));
        }
        let y = rep.y.clone();
        rep.x = rep.x.iter().zip(&y).map(|(a, b)| a * b).collect();
        for m in &mut rep.phi {
            *m = Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j) * &y[j] / &y[i]);
        }
        rep.y = vec![Rational::one(); rep.dim()];
        rep.check_canonical()?;
        let check = equivalent(&self.to_module(), &rep.to_module())?;
        if !check.equivalent {
            return Err(Error::Defect("canonical form changed the series".into()));
        }
        Ok(rep)
    }

    fn check_canonical(&self) -> Result<()> {
        let p = self.total();
        let n = self.dim();
        let defect = |what: &str| Err(Error::Defect(format!("canonical form: {what}")));
        if (0..n).any(|i| !p.row(i).iter().sum::<Rational>().is_one()) {
            return defect("P is not stochastic");
        }
        if p.left_apply(&self.x) != self.x || self.x.iter().any(|v| !v.is_positive()) {
            return defect("x is not a positive fixed vector");
        }
        if self.y.iter().any(|v| !v.is_one()) {
            return defect("y is not all ones");
        }
        let support = p.support();
        for c in components(&support) {
            for &i in &c {
                if (0..n).any(|j| support[i][j] && !c.contains(&j)) {
                    return defect("P is not a direct sum of irreducible blocks");
                }
            }
        }
        Ok(())
    }

    /// Markov presentations of the canonical form, one per irreducible
    /// component, with convex weights summing to 1.
    pub fn to_sofic_presentation(&self) -> Result<Vec<WeightedPresentation>> {
        let canon = self.canonicalize()?;
        let comps = components(&canon.total().support());
        let mut out = Vec::new();
        for c in comps {
            let weight: Rational = c.iter().map(|&i| canon.x[i].clone()).sum();
            let mut part = canon.keep(&c);
            part.x = part.x.iter().map(|v| v / &weight).collect();
            out.push(WeightedPresentation {
                weight,
                presentation: part.irreducible_presentation()?,
            });
        }
        Ok(out)
    }

    /// Block matrix with every block-row `(φ(a₁) … φ(a_k))`, restricted to the
    /// largest principal submatrix without zero columns.
    fn irreducible_presentation(&self) -> Result<SoficPresentation> {
        let n = self.dim();
        let k = self.alphabet.len();
        let big = Matrix::from_fn(n * k, n * k, |r, c| {
            self.phi[c / n].get(r % n, c % n).clone()
        });
        let mut kept: Vec<usize> = (0..n * k).collect();
        loop {
            let next: Vec<usize> = kept
                .iter()
                .copied()
                .filter(|&c| kept.iter().any(|&r| !big.get(r, c).is_zero()))
                .filter(|&r| kept.iter().any(|&c| !big.get(r, c).is_zero()))
                .collect();
            if next.len() == kept.len() {
                break;
            }
            kept = next;
        }
        let m = big.principal(&kept);
        let names: Vec<String> = kept
            .iter()
            .map(|&s| format!("{}_{}", self.alphabet.name(s / n), s % n))
            .collect();
        let measure = MarkovMeasure::from_chain(Alphabet::new(names)?, StochasticMatrix::new(m)?)?;
        let map = kept.iter().map(|&s| s / n).collect();
        let code = BlockCode::one_block(measure.space(), self.alphabet.clone(), map)?;
        Ok(SoficPresentation { measure, code })
    }
}

/// Projection onto the fixed space of `P` along the range of `P − I`,
/// `V (W V)⁻¹ W`; this is the Cesàro limit of the powers when they stay bounded.
fn fixed_projection(p: &Matrix) -> Result<Matrix> {
    let n = p.rows();
    let shifted = p.sub(&Matrix::identity(n));
    let right = kernel(&shifted);
    let left = left_kernel(&shifted);
    if right.len() != left.len() || right.is_empty() {
        return Err(Error::Defect("eigenvalue 1 is missing or defective".into()));
    }
    let v = Matrix::from_rows(right).transpose();
    let w = Matrix::from_rows(left);
    let g = inverse(&w.mul(&v))
        .ok_or_else(|| Error::Defect("eigenvalue 1 is not semisimple".into()))?;
    Ok(v.mul(&g).mul(&w))
}
