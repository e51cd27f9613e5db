//! Stationary Markov measures with exact cylinder values, and their images
//! under 1-block codes.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{left_kernel, Matrix, Vector};
use crate::rational::{format_rational, ln, to_f64, Rational};
use crate::shift_space::{build_sft, is_strongly_connected, Alphabet, BlockCode, SftSpace, Symbol};

/// Square nonnegative rational matrix with unit row sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticMatrix(Matrix);

impl StochasticMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Invalid(format!(
                "transition is {}×{}, not square",
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m.get(i, j).is_negative() {
                    return Err(Error::Invalid(format!("entry ({i},{j}) is negative")));
                }
            }
            let s: Rational = m.row(i).iter().sum();
            if !s.is_one() {
                return Err(Error::Invalid(format!(
                    "row {i} sums to {} ≠ 1",
                    format_rational(&s)
                )));
            }
        }
        Ok(StochasticMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.0.get(i, j)
    }

    pub fn support(&self) -> Vec<Vec<bool>> {
        self.0.support()
    }

    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(&self.support())
    }
}

/// The unique stationary row vector of an irreducible stochastic matrix.
pub fn stationary_vector(p: &StochasticMatrix) -> Result<Vector> {
    if !p.is_irreducible() {
        return Err(Error::AmbiguousStationary);
    }
    let n = p.len();
    let ker = left_kernel(&p.matrix().sub(&Matrix::identity(n)));
    if ker.len() != 1 {
        return Err(Error::Defect(format!(
            "fixed space of an irreducible chain has dimension {}",
            ker.len()
        )));
    }
    let total: Rational = ker[0].iter().sum();
    Ok(ker[0].iter().map(|x| x / &total).collect())
}

/// A stationary ergodic `k`-step Markov measure, stored as a 1-step chain on
/// the `k`-block presentation of its space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovMeasure {
    space: SftSpace,
    order: usize,
    chain_space: SftSpace,
    blocks: Vec<Vec<Symbol>>,
    transition: StochasticMatrix,
    stationary: Vector,
}

impl MarkovMeasure {
    pub fn new(space: SftSpace, order: usize, transition: StochasticMatrix) -> Result<Self> {
        Self::build(space, order, transition, None)
    }

    /// Like `new`, but checks a supplied stationary vector instead of solving for it.
    pub fn with_stationary(
        space: SftSpace,
        order: usize,
        transition: StochasticMatrix,
        stationary: Vector,
    ) -> Result<Self> {
        Self::build(space, order, transition, Some(stationary))
    }

    /// 1-step measure whose space is read off the support of `transition`.
    pub fn from_chain(alphabet: Alphabet, transition: StochasticMatrix) -> Result<Self> {
        if alphabet.len() != transition.len() {
            return Err(Error::Invalid(
                "alphabet size differs from the transition size".into(),
            ));
        }
        let space = build_sft(alphabet, transition.support())?;
        Self::new(space, 1, transition)
    }

    fn build(
        space: SftSpace,
        order: usize,
        transition: StochasticMatrix,
        supplied: Option<Vector>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("order must be positive".into()));
        }
        let (chain_space, _) = space.higher_block_presentation(order)?;
        let blocks = space.words_of_length(order);
        if transition.len() != chain_space.len() {
            return Err(Error::Invalid(format!(
                "transition is {n}×{n} but the order-{order} presentation has {} symbols",
                chain_space.len(),
                n = transition.len()
            )));
        }
        if transition.support() != chain_space.adjacency() {
            return Err(Error::Invalid(format!(
                "transition support does not match the adjacency of the order-{order} presentation"
            )));
        }
        let solved = stationary_vector(&transition)?;
        if let Some(p) = supplied {
            if p != solved {
                return Err(Error::Invalid(
                    "supplied stationary vector is not the invariant distribution".into(),
                ));
            }
        }
        Ok(MarkovMeasure {
            space,
            order,
            chain_space,
            blocks,
            transition,
            stationary: solved,
        })
    }

    pub fn space(&self) -> &SftSpace {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The `order`-block presentation the chain runs on.
    pub fn chain_space(&self) -> &SftSpace {
        &self.chain_space
    }

    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    pub fn stationary(&self) -> &[Rational] {
        &self.stationary
    }

    fn block_index(&self, b: &[Symbol]) -> Option<usize> {
        self.blocks.binary_search_by(|x| x.as_slice().cmp(b)).ok()
    }

    /// `μ(C₀(w))` for a word over the base alphabet.
    pub fn cylinder(&self, w: &[Symbol]) -> Rational {
        if w.is_empty() {
            return Rational::one();
        }
        if w.iter().any(|&s| s >= self.space.len()) {
            return Rational::zero();
        }
        let k = self.order;
        if w.len() < k {
            return self
                .blocks
                .iter()
                .zip(&self.stationary)
                .filter(|(b, _)| b.starts_with(w))
                .map(|(_, p)| p.clone())
                .sum();
        }
        let mut idx = Vec::with_capacity(w.len() - k + 1);
        for win in w.windows(k) {
            match self.block_index(win) {
                Some(i) => idx.push(i),
                None => return Rational::zero(),
            }
        }
        let mut value = self.stationary[idx[0]].clone();
        for pair in idx.windows(2) {
            let t = self.transition.get(pair[0], pair[1]);
            if t.is_zero() {
                return Rational::zero();
            }
            value *= t;
        }
        value
    }

    /// Product of transition probabilities once around the periodic point
    /// `(cycle)^∞`, or `None` if that point is not in the support.
    pub fn cycle_weight(&self, cycle: &[Symbol]) -> Option<Rational> {
        let n = cycle.len();
        if n == 0 {
            return None;
        }
        let k = self.order;
        let idx: Option<Vec<usize>> = (0..n)
            .map(|t| {
                let block: Vec<Symbol> = (0..k).map(|s| cycle[(t + s) % n]).collect();
                self.block_index(&block)
            })
            .collect();
        let idx = idx?;
        let mut value = Rational::one();
        for t in 0..n {
            let p = self.transition.get(idx[t], idx[(t + 1) % n]);
            if p.is_zero() {
                return None;
            }
            value *= p;
        }
        Some(value)
    }

    /// `−Σ p_i P_ij log P_ij` in nats.
    pub fn entropy(&self) -> f64 {
        let m = self.transition.matrix();
        let mut h = 0.0;
        for (i, p) in self.stationary.iter().enumerate() {
            let pi = to_f64(p);
            for j in 0..m.cols() {
                let t = m.get(i, j);
                if !t.is_zero() {
                    h -= pi * to_f64(t) * ln(t);
                }
            }
        }
        h
    }

    /// This measure as a 1-step measure on its chain space.
    pub fn as_chain(&self) -> MarkovMeasure {
        if self.order == 1 {
            return self.clone();
        }
        MarkovMeasure {
            space: self.chain_space.clone(),
            order: 1,
            chain_space: self.chain_space.clone(),
            blocks: (0..self.chain_space.len()).map(|i| vec![i]).collect(),
            transition: self.transition.clone(),
            stationary: self.stationary.clone(),
        }
    }

    /// The chain recoded onto `j`-blocks of its chain space, as a 1-step measure.
    pub fn recode(&self, j: usize) -> Result<MarkovMeasure> {
        let base = self.as_chain();
        if j == 1 {
            return Ok(base);
        }
        let (space_j, _) = base.space.higher_block_presentation(j)?;
        let blocks = base.space.words_of_length(j);
        let n = blocks.len();
        let t = base.transition.matrix();
        let m = Matrix::from_fn(n, n, |u, v| {
            if blocks[u][1..] == blocks[v][..j - 1] {
                t.get(blocks[u][j - 1], blocks[v][j - 1]).clone()
            } else {
                Rational::zero()
            }
        });
        MarkovMeasure::new(space_j, 1, StochasticMatrix::new(m)?)
    }
}

fn one_step_map(code: &BlockCode, mu: &MarkovMeasure) -> Result<Vec<Symbol>> {
    if mu.order() != 1 {
        return Err(Error::Invalid(
            "image evaluation needs a 1-step measure".into(),
        ));
    }
    let map = code.symbol_map()?;
    if map.len() != mu.space().len() {
        return Err(Error::Invalid(
            "code domain does not match the measure's space".into(),
        ));
    }
    Ok(map)
}

/// Row vector `p P_{w_1} ⋯ P_{w_n}` restricted to states over the last symbol.
fn advance(mu: &MarkovMeasure, map: &[Symbol], v: &[Rational], b: Symbol) -> Vector {
    let mut out = mu.transition().matrix().left_apply(v);
    for (j, o) in out.iter_mut().enumerate() {
        if map[j] != b {
            *o = Rational::zero();
        }
    }
    out
}

fn start(mu: &MarkovMeasure, map: &[Symbol], b: Symbol) -> Vector {
    mu.stationary()
        .iter()
        .zip(map)
        .map(|(p, &s)| if s == b { p.clone() } else { Rational::zero() })
        .collect()
}

/// `(πμ)(C₀(w))`.
pub fn image_cylinder_measure(
    code: &BlockCode,
    mu: &MarkovMeasure,
    w: &[Symbol],
) -> Result<Rational> {
    let map = one_step_map(code, mu)?;
    let Some((&first, rest)) = w.split_first() else {
        return Ok(Rational::one());
    };
    let mut v = start(mu, &map, first);
    for &b in rest {
        v = advance(mu, &map, &v, b);
    }
    Ok(v.iter().sum())
}

/// All image words of length `≤ max_len` with positive measure, with their measures.
pub fn image_word_measures(
    code: &BlockCode,
    mu: &MarkovMeasure,
    max_len: usize,
) -> Result<BTreeMap<Vec<Symbol>, Rational>> {
    let map = one_step_map(code, mu)?;
    let m = code.codomain().len();
    let mut out = BTreeMap::new();
    out.insert(Vec::new(), Rational::one());
    let mut frontier: Vec<(Vec<Symbol>, Vector)> = Vec::new();
    if max_len > 0 {
        for b in 0..m {
            let v = start(mu, &map, b);
            let s: Rational = v.iter().sum();
            if !s.is_zero() {
                out.insert(vec![b], s);
                frontier.push((vec![b], v));
            }
        }
    }
    for _ in 1..max_len {
        let mut next = Vec::new();
        for (w, v) in &frontier {
            for b in 0..m {
                let u = advance(mu, &map, v, b);
                let s: Rational = u.iter().sum();
                if !s.is_zero() {
                    let mut wb = w.clone();
                    wb.push(b);
                    out.insert(wb.clone(), s);
                    next.push((wb, u));
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// A history `h`, context `c` and next symbol `b` with
/// `ν(b | hc) ≠ ν(b | c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub history: Vec<Symbol>,
    pub context: Vec<Symbol>,
    pub next: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalCheck {
    /// True means only "no violation up to the horizon".
    pub consistent: bool,
    pub violation: Option<Violation>,
}

/// Brute-force test of the `k`-step property of `πμ` on all image words up to
/// length `horizon`, by exact cross-multiplied conditional probabilities.
pub fn empirical_k_markov_check(
    code: &BlockCode,
    mu: &MarkovMeasure,
    k: usize,
    horizon: usize,
) -> Result<EmpiricalCheck> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    if horizon < k + 1 {
        return Err(Error::HorizonTooShort);
    }
    let nu = image_word_measures(code, mu, horizon)?;
    let m = code.codomain().len();
    let zero = Rational::zero();
    let get = |w: &[Symbol]| nu.get(w).unwrap_or(&zero);
    let mut words: Vec<&Vec<Symbol>> = nu
        .keys()
        .filter(|w| w.len() > k && w.len() < horizon)
        .collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for hc in words {
        let split = hc.len() - k;
        let (h, c) = hc.split_at(split);
        let nu_hc = get(hc);
        let nu_c = get(c);
        for b in 0..m {
            let mut hcb = hc.clone();
            hcb.push(b);
            let mut cb = c.to_vec();
            cb.push(b);
            if get(&hcb) * nu_c != get(&cb) * nu_hc {
                return Ok(EmpiricalCheck {
                    consistent: false,
                    violation: Some(Violation {
                        history: h.to_vec(),
                        context: c.to_vec(),
                        next: b,
                    }),
                });
            }
        }
    }
    Ok(EmpiricalCheck {
        consistent: true,
        violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn smat(rows: &[&[(i64, i64)]]) -> StochasticMatrix {
        StochasticMatrix::new(Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        ))
        .unwrap()
    }

    fn figblack(third: bool) -> (MarkovMeasure, BlockCode) {
        let x = build_sft(
            Alphabet::new(["a", "b1", "b2"]).unwrap(),
            vec![
                vec![false, true, true],
                vec![true, true, false],
                vec![true, false, true],
            ],
        )
        .unwrap();
        let p = if third {
            smat(&[
                &[(0, 1), (2, 3), (1, 3)],
                &[(1, 3), (2, 3), (0, 1)],
                &[(2, 3), (0, 1), (1, 3)],
            ])
        } else {
            smat(&[
                &[(0, 1), (1, 2), (1, 2)],
                &[(1, 2), (1, 2), (0, 1)],
                &[(1, 2), (0, 1), (1, 2)],
            ])
        };
        let code =
            BlockCode::one_block(&x, Alphabet::new(["a", "b"]).unwrap(), vec![0, 1, 1]).unwrap();
        (MarkovMeasure::new(x, 1, p).unwrap(), code)
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(
            stationary_vector(&smat(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        assert_eq!(
            stationary_vector(&smat(&[&[(0, 1), (1, 1)], &[(1, 2), (1, 2)]])).unwrap(),
            vec![rat(1, 3), rat(2, 3)]
        );
        assert_eq!(
            figblack(true).0.stationary(),
            &[rat(2, 7), rat(4, 7), rat(1, 7)]
        );
        let reducible = smat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(
            stationary_vector(&reducible),
            Err(Error::AmbiguousStationary)
        ));
    }

    #[test]
    fn row_sum_message() {
        let m = Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 2), rat(1, 2)]]);
        let e = StochasticMatrix::new(m).unwrap_err();
        assert_eq!(e.to_string(), "row 0 sums to 5/6 ≠ 1");
    }

    #[test]
    fn cylinders() {
        let (mu, code) = figblack(false);
        assert_eq!(mu.cylinder(&[0, 1]), rat(1, 6));
        assert_eq!(mu.cylinder(&[]), rat(1, 1));
        assert_eq!(mu.cylinder(&[0, 0]), rat(0, 1));
        assert_eq!(
            image_cylinder_measure(&code, &mu, &[0, 1]).unwrap(),
            rat(1, 3)
        );
        let (mu3, code3) = figblack(true);
        assert_eq!(
            image_cylinder_measure(&code3, &mu3, &[0]).unwrap(),
            rat(2, 7)
        );
    }

    #[test]
    fn entropy_values() {
        let bern = MarkovMeasure::from_chain(
            Alphabet::numbered(2),
            smat(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]),
        )
        .unwrap();
        assert!((bern.entropy() - 2f64.ln()).abs() < 1e-12);
        let perm = MarkovMeasure::from_chain(
            Alphabet::numbered(2),
            smat(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]),
        )
        .unwrap();
        assert_eq!(perm.entropy(), 0.0);
        // every row of the Blackwell chain splits 2/3 : 1/3
        let (mu, _) = figblack(true);
        let h_row = -((2f64 / 3.0) * (2f64 / 3.0).ln() + (1f64 / 3.0) * (1f64 / 3.0).ln());
        assert!((mu.entropy() - h_row).abs() < 1e-12);
    }

    #[test]
    fn recoding_keeps_cylinders_and_entropy() {
        let (mu, _) = figblack(true);
        let mu2 = mu.recode(2).unwrap();
        assert!((mu.entropy() - mu2.entropy()).abs() < 1e-10);
        let blocks = mu.space().words_of_length(2);
        for (i, b) in blocks.iter().enumerate() {
            assert_eq!(mu2.cylinder(&[i]), mu.cylinder(b));
        }
    }

    #[test]
    fn order_two_measure_cylinders() {
        let x = SftSpace::full_shift(Alphabet::numbered(2));
        // next symbol repeats the one two steps back with probability 3/4
        let (x2, _) = x.higher_block_presentation(2).unwrap();
        let blocks = x.words_of_length(2);
        let m = Matrix::from_fn(4, 4, |u, v| {
            if blocks[u][1] != blocks[v][0] {
                return Rational::zero();
            }
            if blocks[v][1] == blocks[u][0] {
                rat(3, 4)
            } else {
                rat(1, 4)
            }
        });
        let mu = MarkovMeasure::new(x, 2, StochasticMatrix::new(m).unwrap()).unwrap();
        assert_eq!(mu.chain_space(), &x2);
        let total1: Rational = (0..2).map(|a| mu.cylinder(&[a])).sum();
        assert!(total1.is_one());
        for w in mu.space().words_of_length(3) {
            let s: Rational = (0..2)
                .map(|b| {
                    let mut v = w.clone();
                    v.push(b);
                    mu.cylinder(&v)
                })
                .sum();
            assert_eq!(s, mu.cylinder(&w));
        }
    }

    #[test]
    fn empirical_examples() {
        let (mu, code) = figblack(false);
        assert!(
            empirical_k_markov_check(&code, &mu, 1, 6)
                .unwrap()
                .consistent
        );
        let (mu3, code3) = figblack(true);
        let r = empirical_k_markov_check(&code3, &mu3, 1, 4).unwrap();
        assert!(!r.consistent);
        assert!(matches!(
            empirical_k_markov_check(&code3, &mu3, 2, 2),
            Err(Error::HorizonTooShort)
        ));
    }
}
