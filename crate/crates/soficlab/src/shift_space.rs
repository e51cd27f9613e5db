//! Alphabets, words, 1-step shifts of finite type and sliding-block codes.

use std::collections::{BTreeMap, HashMap};

use num::{BigUint, One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;

/// Dense index of a symbol in its alphabet.
pub type Symbol = usize;

/// Ordered, interned symbol names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(|c: char| c.is_whitespace() || c == ',') {
                return Err(Error::Invalid(format!("bad symbol name {n:?}")));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate symbol {n:?}")));
            }
        }
        Ok(Alphabet { names, index })
    }

    /// Symbols named `"0"`, `"1"`, ….
    pub fn numbered(n: usize) -> Self {
        Alphabet::new((0..n).map(|i| i.to_string())).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    fn single_chars(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Reads a word. Tokens separated by whitespace or commas are looked up
    /// whole; otherwise the string is split by greedy longest match.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        let unknown = |t: &str| Error::Invalid(format!("unknown symbol {t:?} in word {text:?}"));
        if text.contains(|c: char| c.is_whitespace() || c == ',') {
            return text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| self.index_of(t).ok_or_else(|| unknown(t)))
                .collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            let Some((s, n)) = best else {
                return Err(unknown(rest));
            };
            out.push(s);
            rest = &rest[n.len()..];
        }
        Ok(out)
    }

    /// Inverse of `parse_word`: concatenation when every name is one
    /// character, comma-separated otherwise.
    pub fn format_word(&self, w: &[Symbol]) -> String {
        let sep = if self.single_chars() { "" } else { "," };
        w.iter()
            .map(|&s| self.names[s].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Name of a block symbol built from a word over this alphabet.
    pub fn block_name(&self, w: &[Symbol]) -> String {
        let sep = if self.single_chars() { "" } else { "." };
        w.iter()
            .map(|&s| self.names[s].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// All words of length `n` over `m` symbols, lexicographic.
pub fn all_words(m: usize, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * m);
        for w in &out {
            for a in 0..m {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Strongly connected components of a digraph given by a 0/1 pattern.
pub fn components(pattern: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = pattern.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in pattern.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if e {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Whether a 0/1 pattern is a strongly connected digraph on at least one vertex.
pub fn is_strongly_connected(pattern: &[Vec<bool>]) -> bool {
    !pattern.is_empty() && components(pattern).len() == 1
}

/// A 1-step shift of finite type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpace {
    alphabet: Alphabet,
    adjacency: Vec<Vec<bool>>,
}

/// Validates the adjacency matrix and prunes symbols that occur in no
/// bi-infinite point.
pub fn build_sft(alphabet: Alphabet, adjacency: Vec<Vec<bool>>) -> Result<SftSpace> {
    let n = alphabet.len();
    if adjacency.len() != n || adjacency.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid(format!(
            "adjacency must be {n}×{n} to match the alphabet"
        )));
    }
    let mut keep = vec![true; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if !keep[i] {
                continue;
            }
            let out = (0..n).any(|j| keep[j] && adjacency[i][j]);
            let inc = (0..n).any(|j| keep[j] && adjacency[j][i]);
            if !out || !inc {
                keep[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    if kept.is_empty() {
        return Err(Error::EmptySubshift);
    }
    if kept.len() == n {
        return Ok(SftSpace {
            alphabet,
            adjacency,
        });
    }
    let names = kept.iter().map(|&i| alphabet.name(i).to_string());
    let adjacency = kept
        .iter()
        .map(|&i| kept.iter().map(|&j| adjacency[i][j]).collect())
        .collect();
    Ok(SftSpace {
        alphabet: Alphabet::new(names)?,
        adjacency,
    })
}

impl SftSpace {
    pub fn full_shift(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        SftSpace {
            alphabet,
            adjacency: vec![vec![true; n]; n],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn allowed(&self, i: Symbol, j: Symbol) -> bool {
        self.adjacency[i][j]
    }

    pub fn adjacency_matrix(&self) -> Matrix {
        let n = self.len();
        Matrix::from_fn(n, n, |i, j| {
            if self.adjacency[i][j] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(&self.adjacency)
    }

    pub fn is_allowed_word(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| s < self.len()) && w.windows(2).all(|p| self.adjacency[p[0]][p[1]])
    }

    /// Allowed words of length `n` in lexicographic order.
    pub fn words_of_length(&self, n: usize) -> Vec<Vec<Symbol>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out: Vec<Vec<Symbol>> = (0..self.len()).map(|s| vec![s]).collect();
        for _ in 1..n {
            let mut next = Vec::new();
            for w in &out {
                let last = *w.last().unwrap();
                for b in 0..self.len() {
                    if self.adjacency[last][b] {
                        let mut v = w.clone();
                        v.push(b);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// The `k`-block presentation and the code reading the first coordinate of a block.
    pub fn higher_block_presentation(&self, k: usize) -> Result<(SftSpace, BlockCode)> {
        if k == 0 {
            return Err(Error::Invalid("block length must be positive".into()));
        }
        if k == 1 {
            let map = (0..self.len()).collect();
            return Ok((
                self.clone(),
                BlockCode::one_block(self, self.alphabet.clone(), map)?,
            ));
        }
        let blocks = self.words_of_length(k);
        let names: Vec<String> = blocks.iter().map(|b| self.alphabet.block_name(b)).collect();
        let adjacency = blocks
            .iter()
            .map(|u| blocks.iter().map(|v| u[1..] == v[..k - 1]).collect())
            .collect();
        let space = build_sft(Alphabet::new(names)?, adjacency)?;
        if space.len() != blocks.len() {
            return Err(Error::Defect("block presentation lost symbols".into()));
        }
        let first = blocks.iter().map(|b| b[0]).collect();
        let code = BlockCode::one_block(&space, self.alphabet.clone(), first)?;
        Ok((space, code))
    }
}

/// Sliding-block code `(πx)_i = table(x_{i-m} … x_{i+n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCode {
    memory: usize,
    anticipation: usize,
    codomain: Alphabet,
    table: BTreeMap<Vec<Symbol>, Symbol>,
}

impl BlockCode {
    /// The table must be defined on exactly the allowed blocks of `domain`.
    pub fn new(
        domain: &SftSpace,
        memory: usize,
        anticipation: usize,
        codomain: Alphabet,
        table: BTreeMap<Vec<Symbol>, Symbol>,
    ) -> Result<Self> {
        let span = memory + anticipation + 1;
        for (block, &s) in &table {
            if block.len() != span || !domain.is_allowed_word(block) {
                return Err(Error::Invalid(format!(
                    "code table entry {block:?} is not an allowed {span}-block"
                )));
            }
            if s >= codomain.len() {
                return Err(Error::Invalid(
                    "code table maps outside the codomain alphabet".into(),
                ));
            }
        }
        for block in domain.words_of_length(span) {
            if !table.contains_key(&block) {
                return Err(Error::Invalid(format!(
                    "code table is missing block {:?}",
                    domain.alphabet().format_word(&block)
                )));
            }
        }
        Ok(BlockCode {
            memory,
            anticipation,
            codomain,
            table,
        })
    }

    pub fn one_block(domain: &SftSpace, codomain: Alphabet, map: Vec<Symbol>) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(Error::Invalid(
                "symbol map length differs from the domain alphabet".into(),
            ));
        }
        let table = map
            .into_iter()
            .enumerate()
            .map(|(i, s)| (vec![i], s))
            .collect();
        BlockCode::new(domain, 0, 0, codomain, table)
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    pub fn span(&self) -> usize {
        self.memory + self.anticipation + 1
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn table(&self) -> &BTreeMap<Vec<Symbol>, Symbol> {
        &self.table
    }

    pub fn is_one_block(&self) -> bool {
        self.span() == 1
    }

    /// For a 1-block code, the image of each domain symbol.
    pub fn symbol_map(&self) -> Result<Vec<Symbol>> {
        if !self.is_one_block() {
            return Err(Error::Invalid("operation needs a 1-block code".into()));
        }
        Ok(self.table.values().copied().collect())
    }

    /// Image of a domain word; `None` if some window is not in the table.
    pub fn apply(&self, w: &[Symbol]) -> Option<Vec<Symbol>> {
        let k = self.span();
        if w.len() < k {
            return Some(Vec::new());
        }
        w.windows(k).map(|b| self.table.get(b).copied()).collect()
    }
}

/// The symbol-incidence matrix `U(i,j) = [π(i) = j]` as booleans.
pub fn incidence(map: &[Symbol], image_size: usize) -> Vec<Vec<bool>> {
    map.iter()
        .map(|&s| (0..image_size).map(|j| j == s).collect())
        .collect()
}

/// Conjugate `code` to a 1-block code on the higher-block presentation.
/// Returns the presentation, the 1-block code on it, and the conjugacy to `x`.
pub fn recode_to_one_block(
    code: &BlockCode,
    x: &SftSpace,
) -> Result<(SftSpace, BlockCode, BlockCode)> {
    let k = code.span();
    let (xk, conj) = x.higher_block_presentation(k)?;
    let blocks = x.words_of_length(k);
    let map = blocks
        .iter()
        .map(|b| {
            code.table
                .get(b)
                .copied()
                .ok_or_else(|| Error::Invalid("code is not defined on this space".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let psi = BlockCode::one_block(&xk, code.codomain.clone(), map)?;
    Ok((xk, psi, conj))
}

/// Number of `x`-words `u` with `π(u) = w`, by transfer-matrix products.
pub fn preimage_count(code: &BlockCode, x: &SftSpace, w: &[Symbol]) -> Result<BigUint> {
    let map = code.symbol_map()?;
    if map.len() != x.len() {
        return Err(Error::Invalid(
            "code domain does not match the space".into(),
        ));
    }
    let Some((&first, rest)) = w.split_first() else {
        return Ok(BigUint::one());
    };
    let mut v: Vec<BigUint> = map
        .iter()
        .map(|&s| {
            if s == first {
                BigUint::one()
            } else {
                BigUint::zero()
            }
        })
        .collect();
    for &a in rest {
        let mut next = vec![BigUint::zero(); x.len()];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..x.len() {
                if map[j] == a && x.allowed(i, j) {
                    next[j] += vi;
                }
            }
        }
        v = next;
    }
    Ok(v.into_iter().sum())
}
