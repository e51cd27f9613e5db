//! Stochastic modules `Prob(w) = l M_{w₁} ⋯ M_{w_t} r`, their two-sided
//! reduction, equivalence, and core-matrix invariants.
//!
//! Row vectors act on the left: the first reduction pass spans
//! `{l M_w}`, the second spans `{M_w r}`.

use std::collections::VecDeque;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{charpoly, dot, Matrix, Poly, RowSpace, Vector};
use crate::rational::Rational;
use crate::shift_space::{Alphabet, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticModule {
    alphabet: Alphabet,
    l: Vector,
    mats: Vec<Matrix>,
    r: Vector,
}

/// Core matrix of the reduced module and the nonzero part of its spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreInvariant {
    pub core: Matrix,
    pub charpoly: Poly,
    pub eventual_charpoly: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Shortest, then lexicographically first, word on which the modules differ.
    pub witness: Option<Vec<Symbol>>,
}

impl StochasticModule {
    pub fn new(alphabet: Alphabet, l: Vector, mats: Vec<Matrix>, r: Vector) -> Result<Self> {
        let n = l.len();
        if r.len() != n {
            return Err(Error::Invalid(format!(
                "l has length {n} but r has length {}",
                r.len()
            )));
        }
        if mats.len() != alphabet.len() {
            return Err(Error::Invalid("one matrix per symbol is required".into()));
        }
        if mats.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Invalid(format!("every generator must be {n}×{n}")));
        }
        if !dot(&l, &r).is_one() {
            return Err(Error::Invalid("l·r must equal 1".into()));
        }
        Ok(StochasticModule {
            alphabet,
            l,
            mats,
            r,
        })
    }

    pub(crate) fn from_parts(alphabet: Alphabet, l: Vector, mats: Vec<Matrix>, r: Vector) -> Self {
        StochasticModule {
            alphabet,
            l,
            mats,
            r,
        }
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn l(&self) -> &[Rational] {
        &self.l
    }

    pub fn r(&self) -> &[Rational] {
        &self.r
    }

    pub fn mat(&self, a: Symbol) -> &Matrix {
        &self.mats[a]
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn prob(&self, w: &[Symbol]) -> Rational {
        let mut v = self.l.clone();
        for &a in w {
            v = self.mats[a].left_apply(&v);
        }
        dot(&v, &self.r)
    }

    /// `M_{w₁} ⋯ M_{w_t}`
    pub fn product(&self, w: &[Symbol]) -> Matrix {
        w.iter().fold(Matrix::identity(self.dim()), |acc, &a| {
            acc.mul(&self.mats[a])
        })
    }

    fn transpose(&self) -> StochasticModule {
        StochasticModule {
            alphabet: self.alphabet.clone(),
            l: self.r.clone(),
            mats: self.mats.iter().map(Matrix::transpose).collect(),
            r: self.l.clone(),
        }
    }

    /// Restrict to the span of `{l M_w}`.
    fn reduce_rows(&self) -> Result<StochasticModule> {
        let mut space = RowSpace::new(self.dim());
        let mut queue = VecDeque::new();
        if space.insert(self.l.clone()) {
            queue.push_back(self.l.clone());
        }
        while let Some(v) = queue.pop_front() {
            for m in &self.mats {
                let u = m.left_apply(&v);
                if space.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
        let basis = space.generators().to_vec();
        let mut mats = Vec::with_capacity(self.mats.len());
        for m in &self.mats {
            let rows = basis
                .iter()
                .map(|g| {
                    space.coordinates(&m.left_apply(g)).ok_or_else(|| {
                        Error::Defect("row space is not invariant under a generator".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            mats.push(Matrix::from_rows(rows));
        }
        let l = space
            .coordinates(&self.l)
            .ok_or_else(|| Error::Defect("l outside its own span".into()))?;
        let r = basis.iter().map(|g| dot(g, &self.r)).collect();
        Ok(StochasticModule {
            alphabet: self.alphabet.clone(),
            l,
            mats,
            r,
        })
    }

    /// The reduced module: minimal dimension, same `Prob`.
    pub fn reduce(&self) -> Result<StochasticModule> {
        let rows = self.reduce_rows()?;
        Ok(rows.transpose().reduce_rows()?.transpose())
    }

    pub fn core_invariant(&self) -> Result<CoreInvariant> {
        let red = self.reduce()?;
        let n = red.dim();
        let core = red
            .mats
            .iter()
            .fold(Matrix::zeros(n, n), |acc, m| acc.add(m));
        let charpoly = charpoly(&core);
        let eventual_charpoly = charpoly.strip_zero_roots();
        Ok(CoreInvariant {
            core,
            charpoly,
            eventual_charpoly,
        })
    }

    /// Image under the symbol map `a ↦ map[a]`: `M_b = Σ_{map[a]=b} M_a`.
    pub fn push_forward(&self, map: &[Symbol], target: Alphabet) -> Result<StochasticModule> {
        if map.len() != self.alphabet.len() || map.iter().any(|&b| b >= target.len()) {
            return Err(Error::Invalid(
                "symbol map does not fit the alphabets".into(),
            ));
        }
        let n = self.dim();
        let mut mats = vec![Matrix::zeros(n, n); target.len()];
        for (a, &b) in map.iter().enumerate() {
            mats[b] = mats[b].add(&self.mats[a]);
        }
        Ok(StochasticModule {
            alphabet: target,
            l: self.l.clone(),
            mats,
            r: self.r.clone(),
        })
    }

    /// Module of the same process read through overlapping 2-blocks: block
    /// `ab` acts by `M_a` in block position `(a, b)`, `l' = (l, …, l)` and
    /// `r' = (M_1 r; …; M_m r)`.
    pub fn two_block_recoding(&self) -> Result<StochasticModule> {
        let n = self.dim();
        let m = self.alphabet.len();
        let mut names = Vec::new();
        let mut mats = Vec::new();
        for a in 0..m {
            for b in 0..m {
                names.push(self.alphabet.block_name(&[a, b]));
                let ma = &self.mats[a];
                mats.push(Matrix::from_fn(n * m, n * m, |i, j| {
                    if i / n == a && j / n == b {
                        ma.get(i % n, j % n).clone()
                    } else {
                        Rational::zero()
                    }
                }));
            }
        }
        let l = (0..m).flat_map(|_| self.l.iter().cloned()).collect();
        let r = (0..m).flat_map(|a| self.mats[a].apply(&self.r)).collect();
        StochasticModule::new(Alphabet::new(names)?, l, mats, r)
    }
}

/// Exact equivalence of two modules over the same alphabet.
///
/// Searches the joint row space of `(l₁M_w, l₂M_w)` in length-lexicographic
/// order; `Prob₁ − Prob₂` is linear on it, so it vanishes everywhere iff it
/// vanishes on the spanning words, all of length `≤ n₁ + n₂ − 1`.
pub fn equivalent(m1: &StochasticModule, m2: &StochasticModule) -> Result<Equivalence> {
    if m1.alphabet != m2.alphabet {
        return Err(Error::Invalid(
            "modules are over different alphabets".into(),
        ));
    }
    let (n1, n2) = (m1.dim(), m2.dim());
    let probe: Vector =
        m1.r.iter()
            .cloned()
            .chain(m2.r.iter().map(|x| -x))
            .collect();
    let mut space = RowSpace::new(n1 + n2);
    let mut queue = VecDeque::new();
    let start: Vector = m1.l.iter().chain(&m2.l).cloned().collect();
    if space.insert(start.clone()) {
        queue.push_back((Vec::new(), start));
    }
    while let Some((w, v)) = queue.pop_front() {
        if !dot(&v, &probe).is_zero() {
            return Ok(Equivalence {
                equivalent: false,
                witness: Some(w),
            });
        }
        for a in 0..m1.alphabet.len() {
            let mut u = m1.mats[a].left_apply(&v[..n1]);
            u.extend(m2.mats[a].left_apply(&v[n1..]));
            if space.insert(u.clone()) {
                let mut wa = w.clone();
                wa.push(a);
                queue.push_back((wa, u));
            }
        }
    }
    Ok(Equivalence {
        equivalent: true,
        witness: None,
    })
}

/// Whether the eventual characteristic polynomial of `image` divides that of
/// `domain`. `false` rules out any factor map carrying the domain measure to
/// the image measure.
pub fn core_quotient_check(image: &CoreInvariant, domain: &CoreInvariant) -> bool {
    image.eventual_charpoly.divides(&domain.eventual_charpoly)
}
