//! Structural classifiers on patterns: the P_2,3 class, forbidden terminal
//! block shapes, congruity, and telltale-conjugate sub-pattern search.

use crate::error::{Error, Result};
use crate::pattern::{
    Alphabet, BlockDecomposition, Pattern, PatternItem, RelationKind, RelationalPattern, Var, Word,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum P23Violation {
    /// Terminal block shorter than 3 symbols.
    TerminalBlockTooShort { index: usize, block: Word },
    /// An interior variable block meets some group fewer than twice.
    GroupUnderrepresented {
        block_index: usize,
        representative: Var,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P23Report {
    pub satisfied: bool,
    pub violations: Vec<P23Violation>,
}

/// Membership in P_2,3: all terminal blocks of length >= 3 and every interior
/// variable block containing at least 2 variables of every group.
pub fn is_p23(rp: &RelationalPattern) -> Result<P23Report> {
    rp.expect_kind(RelationKind::Len)?;
    let bd = rp.pattern().block_decomposition();
    let mut violations = Vec::new();
    for (i, block) in bd.terminal_blocks().iter().enumerate() {
        if block.len() < 3 {
            violations.push(P23Violation::TerminalBlockTooShort {
                index: i,
                block: block.clone(),
            });
        }
    }
    for slot in bd.interior_slots() {
        let block = &bd.variable_blocks()[slot];
        for group in rp.groups().groups() {
            let count = block.iter().filter(|v| group.members().contains(v)).count();
            if count < 2 {
                violations.push(P23Violation::GroupUnderrepresented {
                    block_index: slot,
                    representative: group.representative().clone(),
                    count,
                });
            }
        }
    }
    Ok(P23Report {
        satisfied: violations.is_empty(),
        violations,
    })
}

/// Which run lengths count as a forbidden shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenVariant {
    /// `s^n t` / `s t^n` with n >= 2 (blocks of length >= 3).
    MinRunTwo,
    /// The widened n >= 0 variant: also single letters and two-letter
    /// alternations.
    AnyRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenShape {
    /// `s^n t`: a run followed by a single different letter.
    RunThenSingle,
    /// `s t^n`: a single letter followed by a run of the other.
    SingleThenRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenBlock {
    pub index: usize,
    pub block: Word,
    pub shape: ForbiddenShape,
}

fn run_then_single(block: &Word) -> Option<usize> {
    // s^n t with s != t; returns n
    let letters = block.letters();
    let len = letters.len();
    if len == 1 {
        return Some(0);
    }
    let head = letters[0];
    let last = letters[len - 1];
    if head == last {
        return None;
    }
    if letters[..len - 1].iter().all(|&c| c == head) {
        Some(len - 1)
    } else {
        None
    }
}

fn single_then_run(block: &Word) -> Option<usize> {
    run_then_single(&block.reversed())
}

/// Terminal blocks matching `s^n t` or `s t^n` over a binary alphabet.
pub fn forbidden_block_shapes(
    rp: &RelationalPattern,
    variant: ForbiddenVariant,
) -> Result<Vec<ForbiddenBlock>> {
    if rp.alphabet().len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let min_run = match variant {
        ForbiddenVariant::MinRunTwo => 2,
        ForbiddenVariant::AnyRun => 0,
    };
    let bd = rp.pattern().block_decomposition();
    let mut out = Vec::new();
    for (i, block) in bd.terminal_blocks().iter().enumerate() {
        if let Some(n) = run_then_single(block) {
            if n >= min_run {
                out.push(ForbiddenBlock {
                    index: i,
                    block: block.clone(),
                    shape: ForbiddenShape::RunThenSingle,
                });
                continue;
            }
        }
        if let Some(n) = single_then_run(block) {
            if n >= min_run {
                out.push(ForbiddenBlock {
                    index: i,
                    block: block.clone(),
                    shape: ForbiddenShape::SingleThenRun,
                });
            }
        }
    }
    Ok(out)
}

/// Same terminal block sequence and matching empty/nonempty end variable
/// blocks.
pub fn are_congruous(p: &Pattern, q: &Pattern) -> bool {
    let bp = p.block_decomposition();
    let bq = q.block_decomposition();
    if bp.n() != bq.n() {
        return false;
    }
    if bp.terminal_blocks() != bq.terminal_blocks() {
        return false;
    }
    let ends = |bd: &BlockDecomposition| {
        (
            bd.variable_blocks().first().map(|b| b.is_empty()),
            bd.variable_blocks().last().map(|b| b.is_empty()),
        )
    };
    ends(&bp) == ends(&bq)
}

/// A telltale-conjugate sub-pattern pair: `pi` (the merged arrangement, found
/// in the first pattern) and `pi_prime` (the split arrangement, in the
/// second), with the shared exponent vectors. `sigma` is the letter playing
/// the leading role; `sigma_bar` the other.
///
/// Exponent conditions: for i in 2..=t, n_i = 1 or (m_(i-1) = 1 and m_i = 1);
/// for i in 1..=t-1, m_i = 1 or (n_i = 1 and n_(i+1) = 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelltaleConjugatePair {
    pub pi: Pattern,
    pub pi_prime: Pattern,
    pub sigma: char,
    pub sigma_bar: char,
    pub sigma_runs: Vec<usize>,
    pub sigma_bar_runs: Vec<usize>,
}

fn exponent_conditions(n: &[usize], m: &[usize]) -> bool {
    let t = n.len();
    for i in 2..=t {
        if !(n[i - 1] == 1 || (m[i - 2] == 1 && m[i - 1] == 1)) {
            return false;
        }
    }
    for i in 1..t {
        if !(m[i - 1] == 1 || (n[i - 1] == 1 && n[i] == 1)) {
            return false;
        }
    }
    true
}

/// Parses a terminal block as sigma-run followed by sigma_bar-run; exponents
/// may be zero but not both.
fn parse_super_block(block: &Word, sigma: char, sigma_bar: char) -> Option<(usize, usize)> {
    let letters = block.letters();
    let n = letters.iter().take_while(|&&c| c == sigma).count();
    if letters[n..].iter().all(|&c| c == sigma_bar) {
        Some((n, letters.len() - n))
    } else {
        None
    }
}

/// Items of the conjugate arrangement for exponents (n_i, m_i): the segments
/// `sigma^(n_1)`, `sigma_bar^(m_i) sigma^(n_(i+1))`, ..., `sigma_bar^(m_t)`.
fn prime_segments(n: &[usize], m: &[usize], sigma: char, sigma_bar: char) -> Vec<Word> {
    let t = n.len();
    let mut segments = Vec::with_capacity(t + 1);
    segments.push(Word::new(std::iter::repeat_n(sigma, n[0])));
    for i in 1..t {
        let mut w = Word::new(std::iter::repeat_n(sigma_bar, m[i - 1]));
        w.extend(&Word::new(std::iter::repeat_n(sigma, n[i])));
        segments.push(w);
    }
    segments.push(Word::new(std::iter::repeat_n(sigma_bar, m[t - 1])));
    segments
}

fn subpattern_from_blocks(bd: &BlockDecomposition, first: usize, last: usize) -> Pattern {
    // terminal blocks first..=last with the variable slots strictly between
    let mut items = Vec::new();
    for b in first..=last {
        for &c in bd.terminal_blocks()[b].letters() {
            items.push(PatternItem::Terminal(c));
        }
        if b < last {
            for v in &bd.variable_blocks()[b + 1] {
                items.push(PatternItem::Variable(v.clone()));
            }
        }
    }
    Pattern::new(items).expect("nonempty by construction")
}

/// Tries to locate the split arrangement in `q`; returns the item span as a
/// Pattern.
fn find_prime(
    bq: &BlockDecomposition,
    n: &[usize],
    m: &[usize],
    sigma: char,
    sigma_bar: char,
) -> Option<Pattern> {
    let segments = prime_segments(n, m, sigma, sigma_bar);
    let leading_empty = segments.first().map(|s| s.is_empty()).unwrap_or(false);
    let trailing_empty = segments.last().map(|s| s.is_empty()).unwrap_or(false);
    let needed: Vec<&Word> = segments.iter().filter(|s| !s.is_empty()).collect();
    if needed.is_empty() {
        return None;
    }
    let q_blocks = bq.terminal_blocks();
    if needed.len() > q_blocks.len() {
        return None;
    }
    'outer: for start in 0..=q_blocks.len() - needed.len() {
        for (off, seg) in needed.iter().enumerate() {
            if &&q_blocks[start + off] != seg {
                continue 'outer;
            }
        }
        let end = start + needed.len() - 1;
        // Interior variable slots between matched blocks are nonempty by
        // maximality. When an end segment vanished, the span must borrow
        // variables from the outer slot without touching a flanking
        // terminal: either the slot sits at the pattern boundary (take it
        // whole) or it has a second variable shielding the borrowed ones.
        let leading_vars: Vec<Var> = if leading_empty {
            let slot = &bq.variable_blocks()[start];
            if slot.is_empty() {
                continue;
            }
            if start == 0 {
                slot.clone()
            } else if slot.len() >= 2 {
                slot[1..].to_vec()
            } else {
                continue;
            }
        } else {
            Vec::new()
        };
        let trailing_vars: Vec<Var> = if trailing_empty {
            let slot = &bq.variable_blocks()[end + 1];
            if slot.is_empty() {
                continue;
            }
            if end + 1 == bq.variable_blocks().len() - 1 {
                slot.clone()
            } else if slot.len() >= 2 {
                slot[..slot.len() - 1].to_vec()
            } else {
                continue;
            }
        } else {
            Vec::new()
        };
        let mut items = Vec::new();
        for v in &leading_vars {
            items.push(PatternItem::Variable(v.clone()));
        }
        for b in start..=end {
            for &c in q_blocks[b].letters() {
                items.push(PatternItem::Terminal(c));
            }
            if b < end {
                for v in &bq.variable_blocks()[b + 1] {
                    items.push(PatternItem::Variable(v.clone()));
                }
            }
        }
        for v in &trailing_vars {
            items.push(PatternItem::Variable(v.clone()));
        }
        return Some(Pattern::new(items).expect("nonempty by construction"));
    }
    None
}

/// Exhaustive search for telltale conjugates: `pi` a sub-pattern of `p` and
/// `pi_prime` of `q`, neither adjacent to terminals in its host. `pi` spans
/// at least two terminal blocks so that it contains a variable block.
pub fn find_telltale_conjugates(
    alphabet: &Alphabet,
    p: &Pattern,
    q: &Pattern,
) -> Result<Option<TelltaleConjugatePair>> {
    if alphabet.len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let (s0, s1) = (alphabet.symbols()[0], alphabet.symbols()[1]);
    let bp = p.block_decomposition();
    let bq = q.block_decomposition();
    for (sigma, sigma_bar) in [(s0, s1), (s1, s0)] {
        for first in 0..bp.n() {
            'last: for last in first + 1..bp.n() {
                let mut n = Vec::new();
                let mut m = Vec::new();
                for b in first..=last {
                    match parse_super_block(&bp.terminal_blocks()[b], sigma, sigma_bar) {
                        Some((ni, mi)) => {
                            n.push(ni);
                            m.push(mi);
                        }
                        None => continue 'last,
                    }
                }
                if !exponent_conditions(&n, &m) {
                    continue;
                }
                if let Some(pi_prime) = find_prime(&bq, &n, &m, sigma, sigma_bar) {
                    let pi = subpattern_from_blocks(&bp, first, last);
                    return Ok(Some(TelltaleConjugatePair {
                        pi,
                        pi_prime,
                        sigma,
                        sigma_bar,
                        sigma_runs: n,
                        sigma_bar_runs: m,
                    }));
                }
            }
        }
    }
    Ok(None)
}
