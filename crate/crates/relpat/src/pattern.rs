//! Alphabets, words, patterns, relations, and block decompositions.
//!
//! A pattern is a nonempty string over terminals and variables in which no
//! variable occurs twice; repetition is expressed through the relation, not
//! through repeated occurrences.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::groups::GroupTable;

/// Finite ordered alphabet of single-character terminal symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for &s in &symbols {
            if !seen.insert(s) {
                return Err(Error::DuplicateSymbol(s));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet::new(['a', 'b']).unwrap()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }
}

/// A finite, possibly empty word over some alphabet.
///
/// `Ord` is shortlex (length first, then per-symbol), the order in which the
/// slice oracles enumerate and report words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<char>);

impl Word {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_str_unchecked(s: &str) -> Self {
        Word(s.chars().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Zero-based half-open slice `w[i..j]`.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        Word(self.0[i..j].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, c: char) {
        self.0.push(c);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn contains_subword(&self, needle: &Word) -> bool {
        if needle.is_empty() {
            return true;
        }
        if needle.len() > self.len() {
            return false;
        }
        self.0.windows(needle.len()).any(|win| win == needle.0)
    }

    /// All start indices at which `needle` occurs.
    pub fn occurrences(&self, needle: &Word) -> Vec<usize> {
        if needle.is_empty() || needle.len() > self.len() {
            return Vec::new();
        }
        (0..=self.len() - needle.len())
            .filter(|&i| self.0[i..i + needle.len()] == needle.0[..])
            .collect()
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromIterator<char> for Word {
    fn from_iter<I: IntoIterator<Item = char>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A variable identifier. Equality is by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternItem {
    Terminal(char),
    Variable(Var),
}

impl PatternItem {
    pub fn var(name: &str) -> Self {
        PatternItem::Variable(Var::new(name))
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, PatternItem::Terminal(_))
    }
}

/// A nonempty sequence of terminals and variables; each variable occurs at
/// most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    items: Vec<PatternItem>,
}

impl Pattern {
    pub fn new(items: Vec<PatternItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            if let PatternItem::Variable(v) = item {
                if !seen.insert(v.clone()) {
                    return Err(Error::DuplicateVariable(v.clone()));
                }
            }
        }
        Ok(Pattern { items })
    }

    pub fn items(&self) -> &[PatternItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Variables in order of occurrence.
    pub fn vars(&self) -> Vec<Var> {
        self.items
            .iter()
            .filter_map(|it| match it {
                PatternItem::Variable(v) => Some(v.clone()),
                PatternItem::Terminal(_) => None,
            })
            .collect()
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    /// Leftmost position of a variable, if it occurs.
    pub fn position_of(&self, v: &Var) -> Option<usize> {
        self.items.iter().position(|it| matches!(it, PatternItem::Variable(u) if u == v))
    }

    pub fn is_terminal_free(&self) -> bool {
        self.items.iter().all(|it| !it.is_terminal())
    }

    pub fn is_all_terminal(&self) -> bool {
        self.items.iter().all(|it| it.is_terminal())
    }

    /// Splits into maximal terminal blocks and the variable blocks around
    /// them. `variable_blocks` has one more slot than `terminal_blocks`; only
    /// the two end slots may be empty.
    pub fn block_decomposition(&self) -> BlockDecomposition {
        let mut variable_blocks = vec![Vec::new()];
        let mut terminal_blocks: Vec<Word> = Vec::new();
        for item in &self.items {
            match item {
                PatternItem::Variable(v) => {
                    if terminal_blocks.len() + 1 == variable_blocks.len() {
                        variable_blocks.last_mut().unwrap().push(v.clone());
                    } else {
                        variable_blocks.push(vec![v.clone()]);
                    }
                }
                PatternItem::Terminal(c) => {
                    if terminal_blocks.len() + 1 == variable_blocks.len() {
                        terminal_blocks.push(Word::new([*c]));
                    } else {
                        terminal_blocks.last_mut().unwrap().push(*c);
                    }
                }
            }
        }
        if variable_blocks.len() == terminal_blocks.len() {
            variable_blocks.push(Vec::new());
        }
        BlockDecomposition {
            variable_blocks,
            terminal_blocks,
        }
    }
}

impl fmt::Display for Pattern {
    /// Space-separated tokens; terminal runs compressed with `^`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tokens: Vec<String> = Vec::new();
        let mut run: Option<(char, usize)> = None;
        let flush = |run: &mut Option<(char, usize)>, tokens: &mut Vec<String>| {
            if let Some((c, k)) = run.take() {
                if k == 1 {
                    tokens.push(c.to_string());
                } else {
                    tokens.push(format!("{c}^{k}"));
                }
            }
        };
        for item in &self.items {
            match item {
                PatternItem::Terminal(c) => match run {
                    Some((rc, k)) if rc == *c => run = Some((rc, k + 1)),
                    _ => {
                        flush(&mut run, &mut tokens);
                        run = Some((*c, 1));
                    }
                },
                PatternItem::Variable(v) => {
                    flush(&mut run, &mut tokens);
                    tokens.push(v.name().to_string());
                }
            }
        }
        flush(&mut run, &mut tokens);
        write!(f, "{}", tokens.join(" "))
    }
}

/// Interleaving `x1 w1 x2 ... xn wn x(n+1)` of a pattern: `n` maximal
/// terminal blocks with `n+1` variable slots, of which only the outermost two
/// may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    variable_blocks: Vec<Vec<Var>>,
    terminal_blocks: Vec<Word>,
}

impl BlockDecomposition {
    /// Number of terminal blocks.
    pub fn n(&self) -> usize {
        self.terminal_blocks.len()
    }

    /// All `n + 1` variable slots, ends possibly empty.
    pub fn variable_blocks(&self) -> &[Vec<Var>] {
        &self.variable_blocks
    }

    pub fn terminal_blocks(&self) -> &[Word] {
        &self.terminal_blocks
    }

    /// Slot indices of the nonempty variable blocks, left to right. These
    /// index decomposition vectors.
    pub fn nonempty_slots(&self) -> Vec<usize> {
        self.variable_blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// Interior slots `x2 ..= xn` (always nonempty by maximality).
    pub fn interior_slots(&self) -> std::ops::Range<usize> {
        if self.n() < 2 {
            1..1
        } else {
            1..self.n()
        }
    }

    pub fn reassemble(&self) -> Pattern {
        let mut items = Vec::new();
        for (i, block) in self.variable_blocks.iter().enumerate() {
            for v in block {
                items.push(PatternItem::Variable(v.clone()));
            }
            if i < self.terminal_blocks.len() {
                for &c in self.terminal_blocks[i].letters() {
                    items.push(PatternItem::Terminal(c));
                }
            }
        }
        Pattern::new(items).expect("reassembled pattern is nonempty by construction")
    }

    /// Total word length of the terminal skeleton `w1 ... wn`.
    pub fn skeleton(&self) -> Word {
        let mut w = Word::empty();
        for b in &self.terminal_blocks {
            w.extend(b);
        }
        w
    }
}

/// The base relation constraining substitutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Eq,
    Rev,
    Len,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationKind::Eq => write!(f, "eq"),
            RelationKind::Rev => write!(f, "rev"),
            RelationKind::Len => write!(f, "len"),
        }
    }
}

/// A binary relation over the pattern's variables, under one of the base
/// relations eq / rev / len.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    kind: RelationKind,
    pairs: BTreeSet<(Var, Var)>,
}

impl Relation {
    pub fn new(kind: RelationKind, pairs: impl IntoIterator<Item = (Var, Var)>) -> Self {
        Relation {
            kind,
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn empty(kind: RelationKind) -> Self {
        Relation {
            kind,
            pairs: BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Var, Var)> {
        self.pairs.iter()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Drops every pair touching one of `vars`.
    pub fn without_vars(&self, vars: &BTreeSet<Var>) -> Relation {
        Relation {
            kind: self.kind,
            pairs: self
                .pairs
                .iter()
                .filter(|(x, y)| !vars.contains(x) && !vars.contains(y))
                .cloned()
                .collect(),
        }
    }
}

fn variable_name_ok(alphabet: &Alphabet, name: &str) -> bool {
    if name.is_empty() {
        return false;
    }
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return false;
    }
    // A name made purely of alphabet symbols would serialize as a terminal
    // run and break the parse round-trip.
    !name.chars().all(|c| alphabet.contains(c))
}

/// A pattern together with a relation over its variables.
///
/// Construction validates everything once (terminals in the alphabet, pairs
/// over `Var(p)`, bipartite components for rev) and caches the group table;
/// values are immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalPattern {
    alphabet: Alphabet,
    pattern: Pattern,
    relation: Relation,
    groups: GroupTable,
}

impl RelationalPattern {
    pub fn new(alphabet: Alphabet, pattern: Pattern, relation: Relation) -> Result<Self> {
        let vars = pattern.var_set();
        for item in pattern.items() {
            match item {
                PatternItem::Terminal(c) => {
                    if !alphabet.contains(*c) {
                        return Err(Error::SymbolNotInAlphabet(*c));
                    }
                }
                PatternItem::Variable(v) => {
                    if !variable_name_ok(&alphabet, v.name()) {
                        return Err(Error::BadVariableName(v.name().to_string()));
                    }
                }
            }
        }
        for (x, y) in relation.pairs() {
            if !vars.contains(x) {
                return Err(Error::UnknownVariableInPairs(x.clone()));
            }
            if !vars.contains(y) {
                return Err(Error::UnknownVariableInPairs(y.clone()));
            }
        }
        let groups = GroupTable::compute(&pattern, &relation)?;
        Ok(RelationalPattern {
            alphabet,
            pattern,
            relation,
            groups,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn kind(&self) -> RelationKind {
        self.relation.kind()
    }

    pub fn groups(&self) -> &GroupTable {
        &self.groups
    }

    pub fn expect_kind(&self, expected: RelationKind) -> Result<()> {
        if self.kind() != expected {
            return Err(Error::WrongKind {
                expected,
                found: self.kind(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pat(tokens: &[&str]) -> Pattern {
        let items = tokens
            .iter()
            .map(|t| {
                if t.len() == 1 && "abc".contains(*t) {
                    PatternItem::Terminal(t.chars().next().unwrap())
                } else {
                    PatternItem::var(t)
                }
            })
            .collect();
        Pattern::new(items).unwrap()
    }

    #[test]
    fn rejects_empty_and_duplicates() {
        assert_eq!(Pattern::new(vec![]), Err(Error::EmptyPattern));
        let items = vec![PatternItem::var("x1"), PatternItem::var("x1")];
        assert_eq!(Pattern::new(items), Err(Error::DuplicateVariable(Var::new("x1"))));
        assert!(Alphabet::new(['a', 'a']).is_err());
    }

    #[test]
    fn block_decomposition_of_mixed_pattern() {
        // x1 a x2 ab x3 x4 b
        let p = pat(&["x1", "a", "x2", "a", "b", "x3", "x4", "b"]);
        let bd = p.block_decomposition();
        assert_eq!(bd.n(), 3);
        assert_eq!(
            bd.terminal_blocks(),
            &[
                Word::from_str_unchecked("a"),
                Word::from_str_unchecked("ab"),
                Word::from_str_unchecked("b"),
            ]
        );
        assert_eq!(
            bd.variable_blocks(),
            &[
                vec![Var::new("x1")],
                vec![Var::new("x2")],
                vec![Var::new("x3"), Var::new("x4")],
                vec![],
            ]
        );
        assert_eq!(bd.reassemble(), p);
    }

    #[test]
    fn block_decomposition_all_terminal() {
        let p = pat(&["a", "b", "b"]);
        let bd = p.block_decomposition();
        assert_eq!(bd.n(), 1);
        assert_eq!(bd.terminal_blocks(), &[Word::from_str_unchecked("abb")]);
        assert_eq!(bd.variable_blocks(), &[Vec::<Var>::new(), Vec::new()]);
        assert_eq!(bd.reassemble(), p);
    }

    #[test]
    fn block_decomposition_terminal_free() {
        let p = pat(&["x1", "x2"]);
        let bd = p.block_decomposition();
        assert_eq!(bd.n(), 0);
        assert_eq!(bd.variable_blocks().len(), 1);
        assert_eq!(bd.reassemble(), p);
    }

    #[test]
    fn word_shortlex_order_and_reverse() {
        let mut ws = [Word::from_str_unchecked("b"),
            Word::from_str_unchecked("aa"),
            Word::from_str_unchecked(""),
            Word::from_str_unchecked("ab"),
            Word::from_str_unchecked("a")];
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, vec!["", "a", "b", "aa", "ab"]);
        let w = Word::from_str_unchecked("aab");
        assert_eq!(w.reversed().reversed(), w);
        assert_eq!(Word::empty().len(), 0);
    }

    #[test]
    fn relational_pattern_validation() {
        let alpha = Alphabet::binary();
        let p = pat(&["x1", "a"]);
        let bad_pairs = Relation::new(
            RelationKind::Len,
            [(Var::new("x1"), Var::new("zz"))],
        );
        assert!(matches!(
            RelationalPattern::new(alpha.clone(), p.clone(), bad_pairs),
            Err(Error::UnknownVariableInPairs(_))
        ));
        // variable spelled from alphabet symbols is rejected
        let q = Pattern::new(vec![PatternItem::var("ab"), PatternItem::Terminal('a')]).unwrap();
        assert!(matches!(
            RelationalPattern::new(alpha, q, Relation::empty(RelationKind::Len)),
            Err(Error::BadVariableName(_))
        ));
    }

    #[test]
    fn display_compresses_runs() {
        let p = pat(&["x1", "a", "a", "a", "b", "x2"]);
        assert_eq!(p.to_string(), "x1 a^3 b x2");
    }
}
