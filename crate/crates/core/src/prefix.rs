//! Prefix codebooks: Huffman, MoHuffman (Huffman with 1 → 10), the optimal
//! constrained codebook MoPC*, and the fixed-length reference codes.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::bits::BitString;
use crate::error::{decode_err, Error, Result};
use crate::source::{Alphabet, CumulativeModel, Symbol};

/// Longest code considered by [`mopc_star`] unless told otherwise.
pub const DEFAULT_MAX_LEN: usize = 8;

/// A prefix-free code per symbol with its per-symbol statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    codes: Vec<BitString>,
    expected_length: f64,
    expected_ones: f64,
}

impl Codebook {
    /// Validates that `codes` is a prefix-free code for `alphabet`.
    pub fn new(alphabet: &Alphabet, codes: Vec<BitString>) -> Result<Self> {
        if codes.len() != alphabet.len() {
            return Err(Error::Alphabet(format!(
                "{} codes for {} symbols",
                codes.len(),
                alphabet.len()
            )));
        }
        for (i, a) in codes.iter().enumerate() {
            if a.is_empty() && codes.len() > 1 {
                return Err(Error::Alphabet(format!("empty code for `{}`", alphabet.name(i))));
            }
            for (j, b) in codes.iter().enumerate() {
                if i != j && b.starts_with(a) {
                    return Err(Error::Alphabet(format!(
                        "code of `{}` is a prefix of the code of `{}`",
                        alphabet.name(i),
                        alphabet.name(j)
                    )));
                }
            }
        }
        let probs = alphabet.probs_f64();
        let expected_length = codes.iter().zip(&probs).map(|(c, p)| p * c.len() as f64).sum();
        let expected_ones = codes.iter().zip(&probs).map(|(c, p)| p * c.ones() as f64).sum();
        Ok(Codebook { codes, expected_length, expected_ones })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, s: Symbol) -> &BitString {
        &self.codes[s]
    }

    pub fn codes(&self) -> &[BitString] {
        &self.codes
    }

    /// Expected bits per symbol.
    pub fn expected_length(&self) -> f64 {
        self.expected_length
    }

    /// Expected 1-bits per symbol.
    pub fn expected_ones(&self) -> f64 {
        self.expected_ones
    }

    pub fn kraft_sum(&self) -> f64 {
        self.codes.iter().map(|c| 0.5f64.powi(c.len() as i32)).sum()
    }

    /// Every code avoids `11` and ends in 0.
    pub fn is_constrained(&self) -> bool {
        self.codes.iter().all(|c| c.no_consecutive_ones() && c.ends_with_zero())
    }

    /// The same book with every 1 replaced by 10.
    pub fn substituted(&self, alphabet: &Alphabet) -> Codebook {
        let codes = self.codes.iter().map(BitString::substitute_ones).collect();
        Codebook::new(alphabet, codes).expect("substitution keeps codes prefix-free")
    }

    /// One `symbol = bits` line per symbol.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for (i, c) in self.codes.iter().enumerate() {
            let _ = writeln!(out, "{} = {}", alphabet.name(i), c);
        }
        out
    }

    /// Parses the format written by [`Codebook::to_text`]; `#` starts a comment.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut codes: Vec<Option<BitString>> = vec![None; alphabet.len()];
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: n + 1, msg };
            let (name, code) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected `symbol = bits`".into()))?;
            let s = alphabet
                .index_of(name.trim())
                .ok_or_else(|| parse_err(format!("unknown symbol `{}`", name.trim())))?;
            let bits: BitString = code.trim().parse().map_err(|e: Error| parse_err(e.to_string()))?;
            if codes[s].replace(bits).is_some() {
                return Err(parse_err(format!("duplicate symbol `{}`", name.trim())));
            }
        }
        let codes = codes
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Alphabet(format!("no code for `{}`", alphabet.name(i)))))
            .collect::<Result<Vec<_>>>()?;
        Codebook::new(alphabet, codes)
    }
}

/// How Huffman code lengths are turned into code words.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Labeling {
    /// Canonical codes in order of decreasing probability.
    #[default]
    Canonical,
    /// At each node of the Huffman tree the lighter subtree takes the 1 branch.
    MinOnes,
}

/// Symbols ordered by decreasing probability, ties by index.
fn by_probability(model: &CumulativeModel) -> Vec<Symbol> {
    let mut order: Vec<Symbol> = (0..model.len()).collect();
    order.sort_by_key(|&s| (Reverse(model.freq(s)), s));
    order
}

enum Tree {
    Leaf(Symbol),
    /// heavier subtree first
    Node(Box<Tree>, Box<Tree>),
}

fn huffman_tree(model: &CumulativeModel) -> Tree {
    // among equal weights the latest entry merges first, so earlier symbols
    // end up no deeper than later ones
    let mut heap = BinaryHeap::new();
    let mut trees: Vec<Option<Tree>> = Vec::new();
    for s in 0..model.len() {
        heap.push(Reverse((model.freq(s), Reverse(trees.len()))));
        trees.push(Some(Tree::Leaf(s)));
    }
    while heap.len() > 1 {
        let Reverse((w0, Reverse(i0))) = heap.pop().expect("two entries");
        let Reverse((w1, Reverse(i1))) = heap.pop().expect("two entries");
        let light = trees[i0].take().expect("unused");
        let heavy = trees[i1].take().expect("unused");
        heap.push(Reverse((w0 + w1, Reverse(trees.len()))));
        trees.push(Some(Tree::Node(Box::new(heavy), Box::new(light))));
    }
    let Reverse((_, Reverse(root))) = heap.pop().expect("nonempty alphabet");
    trees[root].take().expect("root")
}

fn tree_codes(tree: &Tree, prefix: &mut Vec<bool>, out: &mut [BitString]) {
    match tree {
        Tree::Leaf(s) => out[*s] = BitString::from(prefix.clone()),
        Tree::Node(heavy, light) => {
            prefix.push(false);
            tree_codes(heavy, prefix, out);
            prefix.pop();
            prefix.push(true);
            tree_codes(light, prefix, out);
            prefix.pop();
        }
    }
}

/// Huffman code lengths per symbol.
pub fn huffman_lengths(alphabet: &Alphabet) -> Vec<usize> {
    huffman(alphabet, Labeling::Canonical)
        .map(|b| b.codes.iter().map(BitString::len).collect())
        .unwrap_or_default()
}

/// Length-optimal prefix codebook.
pub fn huffman(alphabet: &Alphabet, labeling: Labeling) -> Result<Codebook> {
    let model = CumulativeModel::new(alphabet);
    if model.len() < 2 {
        return Err(Error::Alphabet("Huffman coding needs at least two symbols".into()));
    }
    let mut codes = vec![BitString::new(); model.len()];
    tree_codes(&huffman_tree(&model), &mut Vec::new(), &mut codes);
    if labeling == Labeling::Canonical {
        let mut order = by_probability(&model);
        order.sort_by_key(|&s| codes[s].len());
        let mut value = 0u64;
        let mut prev = codes[order[0]].len();
        for &s in &order {
            let len = codes[s].len();
            value <<= len - prev;
            prev = len;
            codes[s] = (0..len).rev().map(|i| (value >> i) & 1 == 1).collect();
            value += 1;
        }
    }
    Codebook::new(alphabet, codes)
}

/// Huffman codebook with every 1 replaced by 10.
pub fn mohuffman(alphabet: &Alphabet, labeling: Labeling) -> Result<Codebook> {
    Ok(huffman(alphabet, labeling)?.substituted(alphabet))
}

/// Assigns `pool` (already in preference order) to symbols by decreasing
/// probability.
fn assign_in_order(alphabet: &Alphabet, pool: Vec<BitString>) -> Result<Codebook> {
    let model = CumulativeModel::new(alphabet);
    let mut codes = vec![BitString::new(); model.len()];
    for (s, code) in by_probability(&model).into_iter().zip(pool) {
        codes[s] = code;
    }
    Codebook::new(alphabet, codes)
}

fn by_ones_then_value(mut pool: Vec<BitString>) -> Vec<BitString> {
    pool.sort_by(|a, b| a.ones().cmp(&b.ones()).then_with(|| a.as_slice().cmp(b.as_slice())));
    pool
}

fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
    (0u64..1 << n).map(move |v| (0..n).rev().map(|i| (v >> i) & 1 == 1).collect())
}

/// Fixed-length binary code of `ceil(log2 N)` bits; the most probable
/// symbols get the codes with the fewest ones.
pub fn uncoded(alphabet: &Alphabet) -> Result<Codebook> {
    let n = alphabet.len();
    let width = (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize;
    assign_in_order(alphabet, by_ones_then_value(all_strings(width).collect()))
}

/// Fixed-length block code whose blocks start with 0, avoid `11` and carry
/// at least one 1; the shortest block length with enough blocks is used.
pub fn isi_mitigating(alphabet: &Alphabet) -> Result<Codebook> {
    let n = alphabet.len();
    for width in 2..=48usize {
        let pool: Vec<BitString> = all_strings(width - 1)
            .filter(|c| c.ones() > 0 && c.no_consecutive_ones())
            .map(|c| BitString::from_bits([false].into_iter().chain(c.iter()).collect()))
            .collect();
        if pool.len() >= n {
            return assign_in_order(alphabet, by_ones_then_value(pool));
        }
    }
    Err(Error::Alphabet(format!("alphabet of {n} symbols is too large")))
}

/// Leaf statistics of a subtree, sorted, with one realising set of codes.
#[derive(Clone, Debug)]
struct Shape {
    /// `(length, ones)` per leaf, sorted
    key: Vec<(u8, u8)>,
    codes: Vec<Vec<bool>>,
}

/// All leaf-statistic multisets of free subtrees with `k` leaves within a
/// depth budget. A free node either is a leaf or splits into a `0` child and
/// a `10` child; a split with an unused child is never better than promoting
/// the used child, so both children carry leaves.
struct ShapeTable {
    memo: HashMap<(usize, usize), std::rc::Rc<Vec<Shape>>>,
}

impl ShapeTable {
    fn shapes(&mut self, budget: usize, k: usize) -> std::rc::Rc<Vec<Shape>> {
        if let Some(v) = self.memo.get(&(budget, k)) {
            return v.clone();
        }
        let mut found: BTreeMap<Vec<(u8, u8)>, Vec<Vec<bool>>> = BTreeMap::new();
        if k == 1 {
            found.insert(vec![(0, 0)], vec![Vec::new()]);
        } else if budget >= 2 {
            for k0 in 1..k {
                self.combine(budget, k0, k - k0, &mut found);
            }
        }
        let v = std::rc::Rc::new(
            found.into_iter().map(|(key, codes)| Shape { key, codes }).collect::<Vec<_>>(),
        );
        self.memo.insert((budget, k), v.clone());
        v
    }

    fn combine(
        &mut self,
        budget: usize,
        k0: usize,
        k1: usize,
        found: &mut BTreeMap<Vec<(u8, u8)>, Vec<Vec<bool>>>,
    ) {
        let zeros = self.shapes(budget - 1, k0);
        let ones = self.shapes(budget - 2, k1);
        for z in zeros.iter() {
            for o in ones.iter() {
                let mut leaves: Vec<((u8, u8), Vec<bool>)> = Vec::with_capacity(k0 + k1);
                for (&(l, w), c) in z.key.iter().zip(&z.codes) {
                    leaves.push(((l + 1, w), [false].into_iter().chain(c.iter().copied()).collect()));
                }
                for (&(l, w), c) in o.key.iter().zip(&o.codes) {
                    leaves.push((
                        (l + 2, w + 1),
                        [true, false].into_iter().chain(c.iter().copied()).collect(),
                    ));
                }
                leaves.sort();
                let (key, codes): (Vec<_>, Vec<_>) = leaves.into_iter().unzip();
                found.entry(key).or_insert(codes);
            }
        }
    }
}

/// Optimal constrained prefix codebook: codes avoid `11` and end in 0; the
/// expected length is minimal, and among those the expected number of ones.
pub fn mopc_star(alphabet: &Alphabet, max_len: usize) -> Result<Codebook> {
    let model = CumulativeModel::new(alphabet);
    let n = model.len();
    if n == 1 {
        return Codebook::new(alphabet, vec![BitString::from_bits(vec![false])]);
    }
    if max_len > 60 {
        return Err(Error::Config(format!("code length bound {max_len} is too large")));
    }
    let order = by_probability(&model);
    let mut table = ShapeTable { memo: HashMap::new() };
    let shapes = table.shapes(max_len, n);
    let mut best: Option<((u128, u128), &Shape)> = None;
    for shape in shapes.iter() {
        // shape keys are sorted by (length, ones): shortest codes to the most
        // probable symbols, then fewest ones
        let mut cost = (0u128, 0u128);
        for (&s, &(len, ones)) in order.iter().zip(&shape.key) {
            cost.0 += model.freq(s) as u128 * len as u128;
            cost.1 += model.freq(s) as u128 * ones as u128;
        }
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, shape));
        }
    }
    let (_, shape) = best.ok_or(Error::Infeasible(max_len))?;
    let mut codes = vec![BitString::new(); n];
    for (&s, c) in order.iter().zip(&shape.codes) {
        codes[s] = BitString::from(c.clone());
    }
    Codebook::new(alphabet, codes)
}

/// Concatenates the codes of `word`.
pub fn prefix_encode(book: &Codebook, word: &[Symbol]) -> Result<BitString> {
    let mut out = BitString::new();
    for &s in word {
        out.extend_from(book.codes.get(s).ok_or(Error::SymbolOutOfRange(s))?);
    }
    Ok(out)
}

/// Binary trie over the codes of a book.
struct Trie {
    // children per node; leaves carry a symbol
    nodes: Vec<([Option<usize>; 2], Option<Symbol>)>,
}

impl Trie {
    fn new(book: &Codebook) -> Self {
        let mut nodes = vec![([None, None], None)];
        for (s, code) in book.codes.iter().enumerate() {
            let mut at = 0;
            for b in code.iter() {
                at = match nodes[at].0[b as usize] {
                    Some(next) => next,
                    None => {
                        nodes.push(([None, None], None));
                        let next = nodes.len() - 1;
                        nodes[at].0[b as usize] = Some(next);
                        next
                    }
                };
            }
            nodes[at].1 = Some(s);
        }
        Trie { nodes }
    }
}

/// Greedy parse of `bits`; fails on bits that do not form whole codes.
pub fn prefix_decode(book: &Codebook, bits: &BitString) -> Result<Vec<Symbol>> {
    let (word, rest) = prefix_decode_partial(book, bits);
    match rest {
        None => Ok(word),
        Some(pos) => Err(decode_err(format!("no code matches the bits at offset {pos}"))),
    }
}

/// Greedy parse that keeps the symbols decoded before the first failure, and
/// reports the offset of the unparsed tail, if any.
pub fn prefix_decode_partial(book: &Codebook, bits: &BitString) -> (Vec<Symbol>, Option<usize>) {
    let trie = Trie::new(book);
    let mut word = Vec::new();
    let (mut at, mut start) = (0usize, 0usize);
    for (i, b) in bits.iter().enumerate() {
        match trie.nodes[at].0[b as usize] {
            Some(next) => at = next,
            None => return (word, Some(start)),
        }
        if let Some(s) = trie.nodes[at].1 {
            word.push(s);
            at = 0;
            start = i + 1;
        }
    }
    let rest = (start < bits.len()).then_some(start);
    (word, rest)
}
