//! Lifting Markov measures through 1-block factor codes `π: X_A → Y = Ω_B`,
//! resolving properties, and weight-per-symbol comparisons on periodic points.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::markov_decide::{decide_kstep, DecisionContext};
use crate::markov_measure::{image_cylinder_measure, MarkovMeasure, StochasticMatrix};
use crate::perron::{stochasticize, tolerance};
use crate::rational::{ln, to_f64, Rational};
use crate::shift_space::{build_sft, BlockCode, SftSpace, Symbol};

/// Word length up to which constructed lifts are checked against their target.
pub const VERIFY_LENGTH: usize = 6;

/// A 1-block code together with its domain and an SFT image.
#[derive(Clone, Debug)]
pub struct CodeStructure {
    code: BlockCode,
    map: Vec<Symbol>,
    x: SftSpace,
    y: SftSpace,
}

impl CodeStructure {
    /// With `y = None` the image is taken to be the 1-step SFT of image
    /// 2-blocks, and that this is the whole image is checked by subset
    /// construction.
    pub fn new(code: &BlockCode, x: &SftSpace, y: Option<&SftSpace>) -> Result<Self> {
        let map = code.symbol_map()?;
        if map.len() != x.len() {
            return Err(Error::Invalid(
                "code domain does not match the space".into(),
            ));
        }
        let m = code.codomain().len();
        let mut image = vec![vec![false; m]; m];
        for i in 0..x.len() {
            for j in 0..x.len() {
                if x.allowed(i, j) {
                    image[map[i]][map[j]] = true;
                }
            }
        }
        let y = match y {
            Some(y) => {
                if y.alphabet() != code.codomain() {
                    return Err(Error::Invalid(
                        "Y alphabet differs from the code's codomain".into(),
                    ));
                }
                for k in 0..m {
                    for l in 0..m {
                        if image[k][l] && !y.allowed(k, l) {
                            return Err(Error::Invalid(format!(
                                "code maps into the forbidden block {}",
                                y.alphabet().format_word(&[k, l])
                            )));
                        }
                    }
                }
                y.clone()
            }
            None => {
                let mut used = vec![false; m];
                for &s in &map {
                    used[s] = true;
                }
                if used.contains(&false) {
                    return Err(Error::Invalid(
                        "code does not use every codomain symbol".into(),
                    ));
                }
                let y = build_sft(code.codomain().clone(), image)?;
                if y.len() != m {
                    return Err(Error::ImageNotSft);
                }
                let cs = CodeStructure {
                    code: code.clone(),
                    map: map.clone(),
                    x: x.clone(),
                    y,
                };
                if !cs.image_is_y() {
                    return Err(Error::ImageNotSft);
                }
                return Ok(cs);
            }
        };
        Ok(CodeStructure {
            code: code.clone(),
            map,
            x: x.clone(),
            y,
        })
    }

    pub fn code(&self) -> &BlockCode {
        &self.code
    }

    pub fn map(&self) -> &[Symbol] {
        &self.map
    }

    pub fn x(&self) -> &SftSpace {
        &self.x
    }

    pub fn y(&self) -> &SftSpace {
        &self.y
    }

    /// Every `Y`-path is the image of an `X`-path.
    fn image_is_y(&self) -> bool {
        let n = self.x.len();
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        let mut queue: VecDeque<(Symbol, Vec<bool>)> = VecDeque::new();
        for k in 0..self.y.len() {
            let set: Vec<bool> = self.map.iter().map(|&s| s == k).collect();
            if seen.insert(set.clone()) {
                queue.push_back((k, set));
            }
        }
        while let Some((k, set)) = queue.pop_front() {
            for l in 0..self.y.len() {
                if !self.y.allowed(k, l) {
                    continue;
                }
                let next: Vec<bool> = (0..n)
                    .map(|j| self.map[j] == l && (0..n).any(|i| set[i] && self.x.allowed(i, j)))
                    .collect();
                if !next.contains(&true) {
                    return false;
                }
                if seen.insert(next.clone()) {
                    queue.push_back((l, next));
                }
            }
        }
        true
    }

    /// `(AU)(i, l)`: successors of `i` with image `l`.
    fn successors_with_image(&self, i: Symbol, l: Symbol) -> Vec<Symbol> {
        (0..self.x.len())
            .filter(|&j| self.x.allowed(i, j) && self.map[j] == l)
            .collect()
    }

    fn predecessors_with_image(&self, i: Symbol, l: Symbol) -> Vec<Symbol> {
        (0..self.x.len())
            .filter(|&j| self.x.allowed(j, i) && self.map[j] == l)
            .collect()
    }

    /// The same code between the time-reversed spaces.
    fn reversed(&self) -> Result<CodeStructure> {
        let flip = |s: &SftSpace| {
            let n = s.len();
            let adj = (0..n)
                .map(|i| (0..n).map(|j| s.allowed(j, i)).collect())
                .collect();
            build_sft(s.alphabet().clone(), adj)
        };
        let x = flip(&self.x)?;
        let y = flip(&self.y)?;
        let code = BlockCode::one_block(&x, self.code.codomain().clone(), self.map.clone())?;
        Ok(CodeStructure {
            code,
            map: self.map.clone(),
            x,
            y,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolvingStatus {
    pub right_resolving: bool,
    pub left_resolving: bool,
    pub right_e_resolving: bool,
    pub left_e_resolving: bool,
}

/// Compares `AU` with `UB` and `AᵀU` with `UBᵀ` entrywise.
pub fn resolving_status(cs: &CodeStructure) -> ResolvingStatus {
    let mut s = ResolvingStatus {
        right_resolving: true,
        left_resolving: true,
        right_e_resolving: true,
        left_e_resolving: true,
    };
    for i in 0..cs.x.len() {
        let k = cs.map[i];
        for l in 0..cs.y.len() {
            let au = cs.successors_with_image(i, l).len();
            let ub = usize::from(cs.y.allowed(k, l));
            s.right_resolving &= au <= ub;
            s.right_e_resolving &= au >= ub;
            let atu = cs.predecessors_with_image(i, l).len();
            let ubt = usize::from(cs.y.allowed(l, k));
            s.left_resolving &= atu <= ubt;
            s.left_e_resolving &= atu >= ubt;
        }
    }
    s
}

/// No diamond: two distinct `X`-paths with equal endpoints and equal image.
pub fn finite_to_one_check(cs: &CodeStructure) -> bool {
    let n = cs.x.len();
    let pairs: Vec<(Symbol, Symbol)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| cs.map[i] == cs.map[j])
        .collect();
    let index: BTreeMap<(Symbol, Symbol), usize> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut forward = vec![Vec::new(); pairs.len()];
    let mut backward = vec![Vec::new(); pairs.len()];
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate() {
            if cs.x.allowed(i, k) && cs.x.allowed(j, l) {
                forward[a].push(b);
                backward[b].push(a);
            }
        }
    }
    let reach = |edges: &Vec<Vec<usize>>| {
        let mut seen = vec![false; pairs.len()];
        let mut stack: Vec<usize> = (0..n).map(|i| index[&(i, i)]).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(a) = stack.pop() {
            for &b in &edges[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    };
    let from_diagonal = reach(&forward);
    let to_diagonal = reach(&backward);
    !pairs
        .iter()
        .enumerate()
        .any(|(a, &(i, j))| i != j && from_diagonal[a] && to_diagonal[a])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    pub transition: StochasticMatrix,
    /// Whether the construction (and so the check against the target) was exact.
    pub exact: bool,
}

/// Compares `πμ` with `ν` on every `Y`-word up to `VERIFY_LENGTH`.
fn verify_image(
    cs: &CodeStructure,
    mu: &MarkovMeasure,
    nu: &MarkovMeasure,
    exact: bool,
) -> Result<()> {
    let tol = tolerance().max(1e-9);
    for len in 1..=VERIFY_LENGTH {
        for w in cs.y.words_of_length(len) {
            let a = image_cylinder_measure(&cs.code, mu, &w)?;
            let b = nu.cylinder(&w);
            let ok = if exact {
                a == b
            } else {
                (to_f64(&a) - to_f64(&b)).abs() <= tol
            };
            if !ok {
                return Err(Error::Defect(format!(
                    "lift pushes forward to {} on {}, target gives {}",
                    a,
                    cs.y.alphabet().format_word(&w),
                    b
                )));
            }
        }
    }
    Ok(())
}

/// Given `πμ_P = ν_Q`, the lift of `ν_{Q'}` (same support as `Q`) is
/// `stoch(M)` with `M(i,j) = Q'(π i, π j) P(i,j) / Q(π i, π j)`.
pub fn markovian_lift(
    cs: &CodeStructure,
    p: &StochasticMatrix,
    q: &StochasticMatrix,
    q_target: &StochasticMatrix,
) -> Result<Lift> {
    let mu = MarkovMeasure::new(cs.x.clone(), 1, p.clone())?;
    let m = cs.y.len();
    if q.len() != m || q_target.len() != m {
        return Err(Error::Invalid(
            "Q and Q' must be indexed by the image alphabet".into(),
        ));
    }
    let ctx = DecisionContext::new(&cs.code, &mu)?;
    let verdict = decide_kstep(&ctx, 1)?;
    let all_symbols: Vec<Vec<Symbol>> = (0..m).map(|b| vec![b]).collect();
    if !verdict.is_k_markov || verdict.states != all_symbols || &verdict.transition != q.matrix() {
        return Err(Error::LiftPrecondition);
    }
    if q.support() != q_target.support() {
        return Err(Error::SupportMismatch);
    }
    let nu_target = MarkovMeasure::new(cs.y.clone(), 1, q_target.clone())?;
    let n = cs.x.len();
    let lifted = Matrix::from_fn(n, n, |i, j| {
        let pij = p.get(i, j);
        if pij.is_zero() {
            return Rational::zero();
        }
        let (k, l) = (cs.map[i], cs.map[j]);
        q_target.get(k, l) * pij / q.get(k, l)
    });
    let s = stochasticize(&lifted)?;
    if (s.rho - 1.0).abs() > 1e-9 {
        return Err(Error::Defect(format!(
            "lift matrix has spectral radius {} instead of 1",
            s.rho
        )));
    }
    let mu_target = MarkovMeasure::new(cs.x.clone(), 1, s.matrix.clone())?;
    verify_image(cs, &mu_target, &nu_target, s.exact)?;
    Ok(Lift {
        transition: s.matrix,
        exact: s.exact,
    })
}

/// Weights `w(i, j)` on domain edges; within each group of edges leaving `i`
/// (entering `i`, for a left e-resolving code) with a common image symbol,
/// the weights must be positive and sum to 1. Unlisted groups split evenly.
pub type SplitWeights = BTreeMap<(Symbol, Symbol), Rational>;

fn split(cs: &CodeStructure, q: &StochasticMatrix, weights: &SplitWeights) -> Result<Matrix> {
    for &(i, j) in weights.keys() {
        if i >= cs.x.len() || j >= cs.x.len() || !cs.x.allowed(i, j) {
            return Err(Error::InvalidWeights(format!(
                "({i}, {j}) is not an edge of X"
            )));
        }
    }
    let n = cs.x.len();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for l in 0..cs.y.len() {
            let group = cs.successors_with_image(i, l);
            if group.is_empty() {
                continue;
            }
            let listed: Vec<&Rational> =
                group.iter().filter_map(|&j| weights.get(&(i, j))).collect();
            let shares: Vec<Rational> = if listed.is_empty() {
                vec![Rational::new(1.into(), (group.len() as i64).into()); group.len()]
            } else if listed.len() == group.len() {
                listed.into_iter().cloned().collect()
            } else {
                return Err(Error::InvalidWeights(format!(
                    "weights for the group leaving {} into {} are incomplete",
                    cs.x.alphabet().name(i),
                    cs.y.alphabet().name(l)
                )));
            };
            if shares.iter().any(|w| !w.is_positive()) || !shares.iter().sum::<Rational>().is_one()
            {
                return Err(Error::InvalidWeights(format!(
                    "weights for the group leaving {} into {} must be positive and sum to 1",
                    cs.x.alphabet().name(i),
                    cs.y.alphabet().name(l)
                )));
            }
            for (&j, w) in group.iter().zip(shares) {
                out.set(i, j, q.get(cs.map[i], l) * w);
            }
        }
    }
    Ok(out)
}

/// Lift of `ν_Q` through an e-resolving code (right, else left): each
/// transition of `Q` is split over the matching domain edges.
pub fn e_resolving_lift(
    cs: &CodeStructure,
    q: &StochasticMatrix,
    weights: Option<&SplitWeights>,
) -> Result<Lift> {
    let nu = MarkovMeasure::new(cs.y.clone(), 1, q.clone())?;
    let empty = SplitWeights::new();
    let weights = weights.unwrap_or(&empty);
    let status = resolving_status(cs);
    let p = if status.right_e_resolving {
        StochasticMatrix::new(split(cs, q, weights)?)?
    } else if status.left_e_resolving {
        let rev = cs.reversed()?;
        let qs = nu.stationary();
        let m = cs.y.len();
        let q_rev = Matrix::from_fn(m, m, |l, k| {
            if qs[l].is_zero() {
                Rational::zero()
            } else {
                &qs[k] * q.get(k, l) / &qs[l]
            }
        });
        let p_rev = StochasticMatrix::new(split(&rev, &StochasticMatrix::new(q_rev)?, weights)?)?;
        let ps = MarkovMeasure::new(rev.x.clone(), 1, p_rev.clone())?
            .stationary()
            .to_vec();
        let n = cs.x.len();
        StochasticMatrix::new(Matrix::from_fn(n, n, |i, j| {
            &ps[j] * p_rev.get(j, i) / &ps[i]
        }))?
    } else {
        return Err(Error::NotEResolving);
    };
    let mu = MarkovMeasure::new(cs.x.clone(), 1, p.clone())?;
    verify_image(cs, &mu, &nu, true)?;
    Ok(Lift {
        transition: p,
        exact: true,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightPerSymbol {
    /// Transition-probability product once around the cycle.
    pub product: Rational,
    /// `log(product) / period`.
    pub value: f64,
}

/// Weight-per-symbol of `μ` at the periodic point `(cycle)^∞`.
pub fn wps(mu: &MarkovMeasure, cycle: &[Symbol]) -> Result<WeightPerSymbol> {
    let product = mu.cycle_weight(cycle).ok_or(Error::NotPeriodic)?;
    Ok(WeightPerSymbol {
        value: ln(&product) / cycle.len() as f64,
        product,
    })
}

/// Allowed cycles of each length up to `max_len`, one per rotation class
/// (the lexicographically least rotation).
pub fn cycles_up_to(x: &SftSpace, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for w in x.words_of_length(len) {
            if !x.allowed(w[len - 1], w[0]) {
                continue;
            }
            if (1..len).all(|r| {
                let rot: Vec<Symbol> = w[r..].iter().chain(&w[..r]).copied().collect();
                w <= rot
            }) {
                out.push(w);
            }
        }
    }
    out
}

/// Whether cycle products are compared exactly or through `|Δ wps| ≤ tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Comparison {
    Exact,
    Tolerance(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WpsCheck {
    pub consistent: bool,
    pub cycles_checked: usize,
    /// First domain cycle whose weight differs from that of its image.
    pub witness: Option<Vec<Symbol>>,
}

/// For a finite-to-one code, `μ` lifts `ν` only if every periodic point and
/// its image carry the same weight-per-symbol. Checks cycles up to `max_len`.
pub fn wps_lift_check(
    cs: &CodeStructure,
    mu: &MarkovMeasure,
    nu: &MarkovMeasure,
    max_len: usize,
    comparison: Comparison,
) -> Result<WpsCheck> {
    if !finite_to_one_check(cs) {
        return Err(Error::NotFiniteToOne);
    }
    if mu.space() != &cs.x || nu.space() != &cs.y {
        return Err(Error::Invalid(
            "measures must live on the domain and image of the code".into(),
        ));
    }
    let cycles = cycles_up_to(&cs.x, max_len);
    for (n, c) in cycles.iter().enumerate() {
        let image: Vec<Symbol> = c.iter().map(|&s| cs.map[s]).collect();
        let a = wps(mu, c)?;
        let b = wps(nu, &image)?;
        let same = match comparison {
            Comparison::Exact => a.product == b.product,
            Comparison::Tolerance(t) => (a.value - b.value).abs() <= t,
        };
        if !same {
            return Ok(WpsCheck {
                consistent: false,
                cycles_checked: n + 1,
                witness: Some(c.clone()),
            });
        }
    }
    Ok(WpsCheck {
        consistent: true,
        cycles_checked: cycles.len(),
        witness: None,
    })
}

/// `min_{b ∈ support} |π⁻¹(b)|`, a bound on the degree of a finite-to-one code
/// when `ν` has the given symbol support.
pub fn fiber_bound(cs: &CodeStructure, support: &[Symbol]) -> Result<usize> {
    support
        .iter()
        .map(|&b| {
            if b >= cs.y.len() {
                Err(Error::Invalid(
                    "support symbol outside the image alphabet".into(),
                ))
            } else {
                Ok(cs.map.iter().filter(|&&s| s == b).count())
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::Invalid("empty support".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::shift_space::Alphabet;

    /// Full 3-shift onto the full 2-shift, 0 ↦ 0 and 1, 2 ↦ 1.
    fn exliftone() -> CodeStructure {
        let x = SftSpace::full_shift(Alphabet::numbered(3));
        let code = BlockCode::one_block(&x, Alphabet::numbered(2), vec![0, 1, 1]).unwrap();
        CodeStructure::new(&code, &x, None).unwrap()
    }

    fn sm(rows: Vec<Vec<Rational>>) -> StochasticMatrix {
        StochasticMatrix::new(Matrix::from_rows(rows)).unwrap()
    }

    fn weights(alpha: Rational, beta: Rational, gamma: Rational) -> SplitWeights {
        let mut w = SplitWeights::new();
        for (i, a) in [alpha, beta, gamma].into_iter().enumerate() {
            w.insert((i, 2), int(1) - &a);
            w.insert((i, 1), a);
        }
        w
    }

    #[test]
    fn inferred_image_and_status() {
        let cs = exliftone();
        assert_eq!(cs.y(), &SftSpace::full_shift(Alphabet::numbered(2)));
        let s = resolving_status(&cs);
        assert!(!s.right_resolving && !s.left_resolving);
        assert!(s.right_e_resolving && s.left_e_resolving);
        assert!(!finite_to_one_check(&cs));
    }

    #[test]
    fn uniform_split_gives_halves() {
        let cs = exliftone();
        let q = sm(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        let lift = e_resolving_lift(&cs, &q, None).unwrap();
        let want = Matrix::from_fn(3, 3, |_, j| if j == 0 { rat(1, 2) } else { rat(1, 4) });
        assert_eq!(lift.transition.matrix(), &want);
    }

    #[test]
    fn weighted_split_matches_closed_form() {
        let cs = exliftone();
        let (p, q, r, s) = (rat(1, 5), rat(4, 5), rat(2, 3), rat(1, 3));
        let target = sm(vec![vec![p.clone(), q.clone()], vec![r.clone(), s.clone()]]);
        let (a, b, c) = (rat(1, 4), rat(1, 3), rat(1, 2));
        let lift = e_resolving_lift(
            &cs,
            &target,
            Some(&weights(a.clone(), b.clone(), c.clone())),
        )
        .unwrap();
        let want = Matrix::from_rows(vec![
            vec![p, &a * &q, (int(1) - &a) * &q],
            vec![r.clone(), &b * &s, (int(1) - &b) * &s],
            vec![r, &c * &s, (int(1) - &c) * &s],
        ]);
        assert_eq!(lift.transition.matrix(), &want);
    }

    #[test]
    fn bad_weights() {
        let cs = exliftone();
        let q = sm(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        let mut w = weights(rat(1, 4), rat(1, 3), rat(1, 2));
        w.remove(&(1, 2));
        assert!(matches!(
            e_resolving_lift(&cs, &q, Some(&w)),
            Err(Error::InvalidWeights(_))
        ));
        let mut w = weights(rat(1, 4), rat(1, 3), rat(1, 2));
        w.insert((1, 2), rat(1, 2));
        assert!(matches!(
            e_resolving_lift(&cs, &q, Some(&w)),
            Err(Error::InvalidWeights(_))
        ));
        let mut w = weights(rat(1, 4), rat(1, 3), int(1));
        w.insert((0, 0), int(1));
        assert!(matches!(
            e_resolving_lift(&cs, &q, Some(&w)),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn markovian_lift_reproduces_split() {
        let cs = exliftone();
        let half = sm(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        let w = weights(rat(1, 4), rat(1, 3), rat(1, 2));
        let base = e_resolving_lift(&cs, &half, Some(&w)).unwrap();
        let target = sm(vec![vec![rat(1, 5), rat(4, 5)], vec![rat(2, 3), rat(1, 3)]]);
        let lift = markovian_lift(&cs, &base.transition, &half, &target).unwrap();
        assert!(lift.exact);
        assert_eq!(
            lift.transition,
            e_resolving_lift(&cs, &target, Some(&w)).unwrap().transition
        );
        let same = markovian_lift(&cs, &base.transition, &half, &half).unwrap();
        assert_eq!(same.transition, base.transition);
        assert!(matches!(
            markovian_lift(&cs, &base.transition, &target, &half),
            Err(Error::LiftPrecondition)
        ));
        let thin = sm(vec![vec![int(0), int(1)], vec![rat(1, 2), rat(1, 2)]]);
        assert!(matches!(
            markovian_lift(&cs, &base.transition, &half, &thin),
            Err(Error::SupportMismatch)
        ));
    }

    #[test]
    fn one_to_one_code_is_finite_to_one() {
        let x = build_sft(
            Alphabet::numbered(3),
            vec![
                vec![false, true, false],
                vec![true, false, true],
                vec![true, true, false],
            ],
        )
        .unwrap();
        let code = BlockCode::one_block(&x, Alphabet::numbered(2), vec![0, 1, 1]).unwrap();
        let cs = CodeStructure::new(&code, &x, None).unwrap();
        assert!(finite_to_one_check(&cs));
    }

    #[test]
    fn not_e_resolving() {
        let x = SftSpace::full_shift(Alphabet::numbered(3));
        let y = build_sft(
            Alphabet::new(["a", "b"]).unwrap(),
            vec![vec![true, true], vec![true, true]],
        )
        .unwrap();
        let code = BlockCode::one_block(&x, y.alphabet().clone(), vec![0, 0, 1]).unwrap();
        let cs = CodeStructure::new(&code, &x, Some(&y)).unwrap();
        assert!(resolving_status(&cs).right_e_resolving);
        let x2 = build_sft(
            Alphabet::numbered(3),
            vec![
                vec![true, true, false],
                vec![false, false, true],
                vec![true, false, true],
            ],
        )
        .unwrap();
        let code2 = BlockCode::one_block(&x2, y.alphabet().clone(), vec![0, 0, 1]).unwrap();
        let cs2 = CodeStructure::new(&code2, &x2, Some(&y)).unwrap();
        let s = resolving_status(&cs2);
        assert!(!s.right_e_resolving && !s.left_e_resolving);
        let q = sm(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        assert!(matches!(
            e_resolving_lift(&cs2, &q, None),
            Err(Error::NotEResolving)
        ));
    }

    #[test]
    fn left_e_resolving_lift() {
        let x = build_sft(
            Alphabet::numbered(3),
            vec![
                vec![false, true, true],
                vec![false, false, true],
                vec![true, true, true],
            ],
        )
        .unwrap();
        let code =
            BlockCode::one_block(&x, Alphabet::new(["a", "b"]).unwrap(), vec![0, 1, 1]).unwrap();
        let cs = CodeStructure::new(&code, &x, None).unwrap();
        let s = resolving_status(&cs);
        assert!(!s.right_e_resolving && s.left_e_resolving);
        let q = sm(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 3), rat(2, 3)]]);
        let lift = e_resolving_lift(&cs, &q, None).unwrap();
        assert!(lift.exact);
    }

    #[test]
    fn diamond_detected() {
        let x = SftSpace::full_shift(Alphabet::numbered(2));
        let code = BlockCode::one_block(&x, Alphabet::new(["a"]).unwrap(), vec![0, 0]).unwrap();
        let cs = CodeStructure::new(&code, &x, None).unwrap();
        assert!(!finite_to_one_check(&cs));
    }

    #[test]
    fn image_not_sft() {
        // even shift presented by a 1-block code
        let x = build_sft(
            Alphabet::numbered(3),
            vec![
                vec![true, true, false],
                vec![false, false, true],
                vec![true, true, false],
            ],
        )
        .unwrap();
        let code =
            BlockCode::one_block(&x, Alphabet::new(["a", "b"]).unwrap(), vec![0, 1, 1]).unwrap();
        assert!(matches!(
            CodeStructure::new(&code, &x, None),
            Err(Error::ImageNotSft)
        ));
    }

    #[test]
    fn cycle_enumeration() {
        let x = SftSpace::full_shift(Alphabet::numbered(2));
        let c = cycles_up_to(&x, 4);
        // necklaces: 2 + 3 + 4 + 6
        assert_eq!(c.len(), 15);
    }

    #[test]
    fn fiber_bound_counts_preimages() {
        let cs = exliftone();
        assert_eq!(fiber_bound(&cs, &[0, 1]).unwrap(), 1);
        assert_eq!(fiber_bound(&cs, &[1]).unwrap(), 2);
    }
}
