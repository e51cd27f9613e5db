//! Deciding whether the image `πμ` of a Markov measure under a 1-block code
//! is `k`-step Markov, or Markov of some order.

use std::collections::HashSet;

use num::{BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{left_kernel, Matrix, RowSpace, Vector};
use crate::linear_rep::LinearRepresentation;
use crate::markov_measure::MarkovMeasure;
use crate::rational::Rational;
use crate::shift_space::{incidence, Alphabet, BlockCode, Symbol};
use crate::stochastic_module::StochasticModule;

/// Largest power `m^N` that `order_bound` will materialize, in bits.
pub const DEFAULT_BOUND_BITS: u64 = 1 << 27;

/// Largest frontier of distinct rank-≥2 products kept per length.
pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;

/// Default number of product lengths examined by `decide_markov`.
pub const DEFAULT_LENGTH_CAP: usize = 64;

/// Spanning vectors `p_{j₀} P_{j₁} ⋯ P_{j_t}` of the stable space, each with
/// its history word `j₀ … j_t`, in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSpace {
    pub basis: Vec<(Vec<Symbol>, Vector)>,
    /// Smallest `n ≥ 0` with `𝒱_n = 𝒱_{n+1}`.
    pub stabilization_index: usize,
}

impl StableSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// The chain, the code and the derived matrices the procedures share.
#[derive(Clone, Debug)]
pub struct DecisionContext {
    measure: MarkovMeasure,
    code: BlockCode,
    map: Vec<Symbol>,
    incidence: Vec<Vec<bool>>,
    pa: Vec<Matrix>,
    starts: Vec<Vector>,
    stable: StableSpace,
}

impl DecisionContext {
    pub fn new(code: &BlockCode, measure: &MarkovMeasure) -> Result<Self> {
        if measure.order() != 1 {
            return Err(Error::Invalid(
                "decision procedures need a 1-step measure".into(),
            ));
        }
        let map = code.symbol_map()?;
        let n = measure.space().len();
        if map.len() != n {
            return Err(Error::Invalid(
                "code domain does not match the measure's space".into(),
            ));
        }
        let m = code.codomain().len();
        let p = measure.transition().matrix();
        let pa = (0..m)
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
        let starts = (0..m)
            .map(|b| {
                measure
                    .stationary()
                    .iter()
                    .zip(&map)
                    .map(|(x, &s)| if s == b { x.clone() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let mut ctx = DecisionContext {
            measure: measure.clone(),
            code: code.clone(),
            incidence: incidence(&map, m),
            map,
            pa,
            starts,
            stable: StableSpace {
                basis: Vec::new(),
                stabilization_index: 0,
            },
        };
        ctx.stable = ctx.compute_stable_space()?;
        Ok(ctx)
    }

    pub fn measure(&self) -> &MarkovMeasure {
        &self.measure
    }

    pub fn code(&self) -> &BlockCode {
        &self.code
    }

    pub fn image_alphabet(&self) -> &Alphabet {
        self.code.codomain()
    }

    /// `U(i, j) = [π(i) = j]`
    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    pub fn stable_space(&self) -> &StableSpace {
        &self.stable
    }

    pub fn representation(&self) -> Result<LinearRepresentation> {
        LinearRepresentation::from_sofic_image(&self.code, &self.measure)
    }

    pub fn reduced_module(&self) -> Result<StochasticModule> {
        self.representation()?.to_module().reduce()
    }

    fn push(&self, v: &[Rational], w: &[Symbol]) -> Vector {
        let mut v = v.to_vec();
        for &b in w {
            v = self.pa[b].left_apply(&v);
        }
        v
    }

    /// `vU`
    fn collapse(&self, v: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.code.codomain().len()];
        for (x, &s) in v.iter().zip(&self.map) {
            out[s] += x;
        }
        out
    }

    fn compute_stable_space(&self) -> Result<StableSpace> {
        let n = self.measure.space().len();
        let mut space = RowSpace::new(n);
        let mut basis = Vec::new();
        let mut fresh = Vec::new();
        for (b, v) in self.starts.iter().enumerate() {
            if space.insert(v.clone()) {
                fresh.push((vec![b], v.clone()));
            }
        }
        let used_symbols = fresh.len();
        basis.extend(fresh.iter().cloned());
        let mut index = 0;
        loop {
            let mut next = Vec::new();
            for (h, v) in &fresh {
                for (b, pb) in self.pa.iter().enumerate() {
                    let u = pb.left_apply(v);
                    if space.insert(u.clone()) {
                        let mut hb = h.clone();
                        hb.push(b);
                        next.push((hb, u));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            index += 1;
            basis.extend(next.iter().cloned());
            fresh = next;
        }
        if index > n - used_symbols {
            return Err(Error::Defect(format!(
                "stable space took {index} steps, more than N − |A(Y)| = {}",
                n - used_symbols
            )));
        }
        Ok(StableSpace {
            basis,
            stabilization_index: index,
        })
    }

    /// Image words of length `k` with positive measure, lexicographic, each
    /// with its vector `p_{w₀} P_{w₁} ⋯ P_{w_{k−1}}`.
    fn positive_words(&self, k: usize) -> Vec<(Vec<Symbol>, Vector)> {
        let m = self.code.codomain().len();
        let mut out: Vec<(Vec<Symbol>, Vector)> = vec![(Vec::new(), Vec::new())];
        for t in 0..k {
            let mut next = Vec::new();
            for (w, v) in &out {
                for b in 0..m {
                    let u = if t == 0 {
                        self.starts[b].clone()
                    } else {
                        self.pa[b].left_apply(v)
                    };
                    if u.iter().any(|x| !x.is_zero()) {
                        let mut wb = w.clone();
                        wb.push(b);
                        next.push((wb, u));
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// Basis of the stable space `𝒱`.
pub fn stable_space(ctx: &DecisionContext) -> &StableSpace {
    ctx.stable_space()
}

/// A stable-space vector with history `history` for which the next-symbol
/// law after `context` differs from the candidate chain at `next`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KStepWitness {
    pub history: Vec<Symbol>,
    pub context: Vec<Symbol>,
    pub next: Symbol,
}

/// Outcome of the `k`-step test with the candidate chain it was tested against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KStepVerdict {
    pub k: usize,
    pub is_k_markov: bool,
    /// Image words of length `k` with positive measure, lexicographic.
    pub states: Vec<Vec<Symbol>>,
    pub q: Vector,
    /// Candidate transition matrix over `states`.
    pub transition: Matrix,
    pub witness: Option<KStepWitness>,
}

impl KStepVerdict {
    /// The candidate chain as an order-`k` Markov measure on its own support.
    pub fn candidate_measure(&self, alphabet: &Alphabet) -> Result<MarkovMeasure> {
        use crate::markov_measure::StochasticMatrix;
        use crate::shift_space::build_sft;
        let m = alphabet.len();
        let k = self.k;
        let mut adjacency = vec![vec![false; m]; m];
        for (i, u) in self.states.iter().enumerate() {
            for (j, v) in self.states.iter().enumerate() {
                if !self.transition.get(i, j).is_zero() {
                    let mut uv = u.clone();
                    uv.push(v[k - 1]);
                    for pair in uv.windows(2) {
                        adjacency[pair[0]][pair[1]] = true;
                    }
                }
            }
        }
        let space = build_sft(alphabet.clone(), adjacency)?;
        if space.len() != m {
            return Err(Error::Invalid(
                "candidate chain does not use every image symbol".into(),
            ));
        }
        let blocks = space.words_of_length(k);
        if blocks != self.states {
            return Err(Error::Invalid(format!(
                "candidate chain is not a {k}-step chain on a 1-step shift of finite type"
            )));
        }
        MarkovMeasure::new(space, k, StochasticMatrix::new(self.transition.clone())?)
    }
}

/// The stable-space test: `v P_w (P U − 𝟙 Q^w) = 0` for all basis vectors `v`
/// and image words `w` of length `k`.
pub fn decide_kstep(ctx: &DecisionContext, k: usize) -> Result<KStepVerdict> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let m = ctx.code.codomain().len();
    let words = ctx.positive_words(k);
    let states: Vec<Vec<Symbol>> = words.iter().map(|(w, _)| w.clone()).collect();
    let q: Vector = words.iter().map(|(_, v)| v.iter().sum()).collect();
    let p = ctx.measure.transition().matrix();
    // next-symbol law Q^w(b) for each state
    let laws: Vec<Vector> = words
        .iter()
        .zip(&q)
        .map(|((_, v), qw)| {
            ctx.collapse(&p.left_apply(v))
                .into_iter()
                .map(|x| x / qw)
                .collect()
        })
        .collect();
    let mut transition = Matrix::zeros(states.len(), states.len());
    for (i, w) in states.iter().enumerate() {
        for (b, law) in laws[i].iter().enumerate() {
            if law.is_zero() {
                continue;
            }
            let mut next = w[1..].to_vec();
            next.push(b);
            let j = states.binary_search(&next).map_err(|_| {
                Error::Defect("successor of a positive word has measure zero".into())
            })?;
            transition.set(i, j, law.clone());
        }
    }
    let mut witness = None;
    'search: for (h, v) in &ctx.stable.basis {
        for (wi, w) in states.iter().enumerate() {
            let z = ctx.push(v, w);
            let mass: Rational = z.iter().sum();
            if mass.is_zero() {
                continue;
            }
            let lhs = ctx.collapse(&p.left_apply(&z));
            for b in 0..m {
                if lhs[b] != &mass * &laws[wi][b] {
                    witness = Some(KStepWitness {
                        history: h.clone(),
                        context: w.clone(),
                        next: b,
                    });
                    break 'search;
                }
            }
        }
    }
    Ok(KStepVerdict {
        k,
        is_k_markov: witness.is_none(),
        states,
        q,
        transition,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVerdict {
    pub holds: bool,
    /// First context word `w` with `((𝒱P_w) ∩ ker U) P ⊄ ker U`.
    pub witness: Option<Vec<Symbol>>,
}

/// The kernel test: `((𝒱 P_w) ∩ ker U) P ⊂ ker U` for every image word `w` of
/// length `k`, where `ker U = {x : xU = 0}`.
pub fn decide_kstep_kernel(ctx: &DecisionContext, k: usize) -> Result<KernelVerdict> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let p = ctx.measure.transition().matrix();
    for (w, _) in ctx.positive_words(k) {
        let mut span = RowSpace::new(ctx.measure.space().len());
        for (_, v) in &ctx.stable.basis {
            span.insert(ctx.push(v, &w));
        }
        let gens = span.generators();
        if gens.is_empty() {
            continue;
        }
        let images = Matrix::from_rows(gens.iter().map(|g| ctx.collapse(g)).collect());
        for c in left_kernel(&images) {
            let mut s = vec![Rational::zero(); gens[0].len()];
            for (ci, g) in c.iter().zip(gens) {
                crate::linalg::add_scaled(&mut s, ci, g);
            }
            if ctx.collapse(&p.left_apply(&s)).iter().any(|x| !x.is_zero()) {
                return Ok(KernelVerdict {
                    holds: false,
                    witness: Some(w),
                });
            }
        }
    }
    Ok(KernelVerdict {
        holds: true,
        witness: None,
    })
}

/// Distinct products `M_w` of rank at least 2 at one length, each with the
/// lexicographically first word producing it.
struct RankFrontier<'a> {
    module: &'a StochasticModule,
    length: usize,
    entries: Vec<(Vec<Symbol>, Matrix)>,
}

impl<'a> RankFrontier<'a> {
    fn new(module: &'a StochasticModule) -> Self {
        RankFrontier {
            module,
            length: 0,
            entries: vec![(Vec::new(), Matrix::identity(module.dim()))],
        }
    }

    fn step(&mut self, cap: usize) -> Result<()> {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (w, m) in &self.entries {
            for (a, ma) in self.module.mats().iter().enumerate() {
                let prod = m.mul(ma);
                if prod.rank() < 2 || seen.contains(&prod) {
                    continue;
                }
                seen.insert(prod.clone());
                let mut wa = w.clone();
                wa.push(a);
                next.push((wa, prod));
                if next.len() > cap {
                    return Err(Error::CapExceeded(format!(
                        "more than {cap} distinct rank-≥2 products of length {}; use decide_kstep instead",
                        self.length + 1
                    )));
                }
            }
        }
        self.entries = next;
        self.length += 1;
        Ok(())
    }

    fn witness(&self) -> Option<Vec<Symbol>> {
        self.entries.first().map(|(w, _)| w.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVerdict {
    pub is_k_markov: bool,
    /// Lexicographically first word of length `k` whose product has rank ≥ 2.
    pub witness: Option<Vec<Symbol>>,
}

/// Every product of `k` generators of the reduced module has rank ≤ 1.
/// The module is reduced first.
pub fn rank_criterion(module: &StochasticModule, k: usize, cap: usize) -> Result<RankVerdict> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let red = module.reduce()?;
    let mut frontier = RankFrontier::new(&red);
    for _ in 0..k {
        frontier.step(cap)?;
        if frontier.entries.is_empty() {
            break;
        }
    }
    let witness = frontier.witness();
    Ok(RankVerdict {
        is_k_markov: witness.is_none(),
        witness,
    })
}

/// `N(k, m, n)`: `N(n, m, n) = 1`, `N(k, m, n) = (1 + m^{N(k+1, m, n)}) N(k+1, m, n)`.
pub fn order_bound(k: u32, m: u32, n: u32) -> Result<BigUint> {
    order_bound_with_budget(k, m, n, DEFAULT_BOUND_BITS)
}

/// As `order_bound`, refusing to build a power of more than `max_bits` bits.
pub fn order_bound_with_budget(k: u32, m: u32, n: u32, max_bits: u64) -> Result<BigUint> {
    if k == 0 || k > n || m == 0 {
        return Err(Error::Invalid(
            "order bound needs 1 ≤ k ≤ n and m ≥ 1".into(),
        ));
    }
    let log2_m = f64::from(m).log2();
    let mut value = BigUint::one();
    for _ in k..n {
        let exponent = value
            .to_u64()
            .filter(|&e| (e as f64) * log2_m <= max_bits as f64);
        let Some(e) = exponent else {
            let log10_value = value.bits() as f64 * std::f64::consts::LOG10_2;
            return Err(Error::BoundTooLarge {
                k,
                m,
                n,
                log10_bits: log10_value + log2_m.max(1.0).log10(),
            });
        };
        let power = num::pow(BigUint::from(m), e as usize);
        value = (power + 1u32) * value;
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarkovStatus {
    Markov { k: usize },
    NotMarkov,
    UndecidedAtCap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovVerdict {
    pub status: MarkovStatus,
    pub reduced_dim: usize,
    pub alphabet_size: usize,
    /// `N(2, m, n)` when it fits the size budget.
    pub bound: Option<BigUint>,
    pub cap: usize,
    /// Product lengths examined.
    pub lengths_checked: usize,
    /// Longest word found whose product has rank ≥ 2.
    pub witness: Option<Vec<Symbol>>,
    /// The verified chain when the status is `Markov`.
    pub chain: Option<KStepVerdict>,
    pub detail: String,
}

/// Searches product lengths `1, 2, …` up to `min(N(2,m,n), cap)` for the
/// first length at which every product of the reduced module has rank ≤ 1.
pub fn decide_markov(ctx: &DecisionContext, cap: Option<usize>) -> Result<MarkovVerdict> {
    let cap = cap.unwrap_or(DEFAULT_LENGTH_CAP);
    if cap == 0 {
        return Err(Error::Invalid("cap must be positive".into()));
    }
    let module = ctx.reduced_module()?;
    let n = module.dim();
    let alphabet_size = (0..module.alphabet().len())
        .filter(|&a| !module.prob(&[a]).is_zero())
        .count();
    let bound = if n >= 2 {
        order_bound(2, alphabet_size as u32, n as u32).ok()
    } else {
        Some(BigUint::one())
    };
    let limit = match &bound {
        Some(b) => b.to_usize().map_or(cap, |b| b.min(cap)),
        None => cap,
    };
    let certified = bound
        .as_ref()
        .is_some_and(|b| b.to_usize().is_some_and(|b| b <= cap));
    let mut frontier = RankFrontier::new(&module);
    let mut witness = None;
    for t in 1..=limit {
        if let Err(e) = frontier.step(DEFAULT_ENUMERATION_CAP) {
            return Ok(MarkovVerdict {
                status: MarkovStatus::UndecidedAtCap,
                reduced_dim: n,
                alphabet_size,
                bound,
                cap,
                lengths_checked: t - 1,
                witness,
                chain: None,
                detail: e.to_string(),
            });
        }
        if frontier.entries.is_empty() {
            let chain = decide_kstep(ctx, t)?;
            if !chain.is_k_markov {
                return Err(Error::Defect(format!(
                    "rank test passed at length {t} but the {t}-step test failed"
                )));
            }
            return Ok(MarkovVerdict {
                status: MarkovStatus::Markov { k: t },
                reduced_dim: n,
                alphabet_size,
                bound,
                cap,
                lengths_checked: t,
                witness,
                chain: Some(chain),
                detail: format!("every product of length {t} has rank at most 1"),
            });
        }
        witness = frontier.witness();
    }
    let (status, detail) = if certified {
        (
            MarkovStatus::NotMarkov,
            format!("rank-2 products persist through length N(2,{alphabet_size},{n}) = {limit}"),
        )
    } else {
        let b = bound
            .as_ref()
            .map_or("beyond the size budget".to_string(), |b| b.to_string());
        (
            MarkovStatus::UndecidedAtCap,
            format!("rank-2 products persist through length {limit}; certificate needs length N(2,{alphabet_size},{n}) = {b}"),
        )
    };
    Ok(MarkovVerdict {
        status,
        reduced_dim: n,
        alphabet_size,
        bound,
        cap,
        lengths_checked: limit,
        witness,
        chain: None,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov_measure::{empirical_k_markov_check, StochasticMatrix};
    use crate::rational::rat;
    use crate::shift_space::build_sft;

    fn smat(rows: &[&[(i64, i64)]]) -> StochasticMatrix {
        StochasticMatrix::new(Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        ))
        .unwrap()
    }

    fn figblack(third: bool) -> DecisionContext {
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
        DecisionContext::new(&code, &MarkovMeasure::new(x, 1, p).unwrap()).unwrap()
    }

    fn identity(mu: &MarkovMeasure) -> DecisionContext {
        let code = BlockCode::one_block(
            mu.space(),
            mu.space().alphabet().clone(),
            (0..mu.space().len()).collect(),
        )
        .unwrap();
        DecisionContext::new(&code, mu).unwrap()
    }

    #[test]
    fn markov_image_chain() {
        let ctx = figblack(false);
        let v = decide_kstep(&ctx, 1).unwrap();
        assert!(v.is_k_markov);
        assert_eq!(
            v.transition,
            Matrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 2), rat(1, 2)]])
        );
        assert_eq!(v.q, vec![rat(1, 3), rat(2, 3)]);
        assert!(decide_kstep_kernel(&ctx, 1).unwrap().holds);
        assert!(ctx.stable_space().stabilization_index <= 1);
        let verdict = decide_markov(&ctx, None).unwrap();
        assert_eq!(verdict.status, MarkovStatus::Markov { k: 1 });
    }

    #[test]
    fn blackwell_is_not_kstep() {
        let ctx = figblack(true);
        for k in 1..=4 {
            let v = decide_kstep(&ctx, k).unwrap();
            assert!(!v.is_k_markov);
            let w = v.witness.unwrap();
            let horizon = w.history.len() + k + 1;
            let oracle = empirical_k_markov_check(ctx.code(), ctx.measure(), k, horizon).unwrap();
            assert!(!oracle.consistent);
            assert!(!decide_kstep_kernel(&ctx, k).unwrap().holds);
            let module = ctx.reduced_module().unwrap();
            assert!(!rank_criterion(&module, k, 1000).unwrap().is_k_markov);
        }
    }

    #[test]
    fn identity_code_is_one_step() {
        let mu = MarkovMeasure::from_chain(
            Alphabet::numbered(2),
            smat(&[&[(1, 3), (2, 3)], &[(1, 1), (0, 1)]]),
        )
        .unwrap();
        let ctx = identity(&mu);
        assert_eq!(ctx.stable_space().dim(), 2);
        let v = decide_kstep(&ctx, 1).unwrap();
        assert!(v.is_k_markov);
        assert_eq!(&v.transition, mu.transition().matrix());
        for k in 1..=3 {
            assert!(decide_kstep_kernel(&ctx, k).unwrap().holds);
        }
        assert_eq!(
            decide_markov(&ctx, None).unwrap().status,
            MarkovStatus::Markov { k: 1 }
        );
    }

    #[test]
    fn single_symbol_image() {
        let mu = MarkovMeasure::from_chain(
            Alphabet::numbered(2),
            smat(&[&[(1, 3), (2, 3)], &[(1, 1), (0, 1)]]),
        )
        .unwrap();
        let code =
            BlockCode::one_block(mu.space(), Alphabet::new(["z"]).unwrap(), vec![0, 0]).unwrap();
        let ctx = DecisionContext::new(&code, &mu).unwrap();
        assert_eq!(ctx.stable_space().dim(), 1);
    }

    #[test]
    fn order_bounds() {
        assert_eq!(order_bound(3, 2, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(order_bound(2, 2, 3).unwrap(), BigUint::from(3u32));
        assert_eq!(order_bound(1, 2, 3).unwrap(), BigUint::from(27u32));
        assert_eq!(order_bound(2, 1, 4).unwrap(), BigUint::from(4u32));
        assert!(matches!(
            order_bound(2, 4, 6),
            Err(Error::BoundTooLarge { .. })
        ));
    }
}
