//! Shared fixtures and independent oracles for the integration suites: the
//! worked fixture patterns rebuilt from scratch, a seeded random-pattern corpus,
//! and a substitution-driven word generator that assembles words by direct
//! string concatenation, independent of every membership decider.

#![allow(dead_code)]

use std::collections::BTreeSet;

use relpat::groups::Orientation;
use relpat::pattern::{
    Alphabet, Pattern, PatternItem, Relation, RelationKind, RelationalPattern, Var, Word,
};

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next() % bound as u64) as usize
    }

    pub fn letter(&mut self, alphabet: &Alphabet) -> char {
        alphabet.symbols()[self.below(alphabet.len())]
    }

    pub fn word(&mut self, alphabet: &Alphabet, len: usize) -> Word {
        (0..len).map(|_| self.letter(alphabet)).collect()
    }
}

pub fn build(
    alphabet: &Alphabet,
    tokens: &[&str],
    kind: RelationKind,
    pairs: &[(&str, &str)],
) -> RelationalPattern {
    let items = tokens
        .iter()
        .flat_map(|t| {
            if t.chars().all(|c| alphabet.contains(c)) {
                t.chars().map(PatternItem::Terminal).collect::<Vec<_>>()
            } else {
                vec![PatternItem::var(t)]
            }
        })
        .collect();
    let p = Pattern::new(items).unwrap();
    let r = Relation::new(kind, pairs.iter().map(|(x, y)| (Var::new(*x), Var::new(*y))));
    RelationalPattern::new(alphabet.clone(), p, r).unwrap()
}

pub fn two_block_235() -> RelationalPattern {
    build(
        &Alphabet::binary(),
        &["x1", "x2", "ab", "y1", "y2", "y3", "ab", "z1", "z2", "z3", "z4", "z5"],
        RelationKind::Len,
        &[
            ("x1", "x2"),
            ("y1", "y2"),
            ("y2", "y3"),
            ("z1", "z2"),
            ("z2", "z3"),
            ("z3", "z4"),
            ("z4", "z5"),
        ],
    )
}

pub fn one_block_25() -> RelationalPattern {
    build(
        &Alphabet::binary(),
        &["u1", "u2", "ab", "w1", "w2", "w3", "w4", "w5"],
        RelationKind::Len,
        &[
            ("u1", "u2"),
            ("w1", "w2"),
            ("w2", "w3"),
            ("w3", "w4"),
            ("w4", "w5"),
        ],
    )
}

fn ab100_items() -> Vec<PatternItem> {
    let mut items = vec![PatternItem::Terminal('a')];
    items.extend(std::iter::repeat_n(PatternItem::Terminal('b'), 100));
    items
}

pub fn ab100_small() -> RelationalPattern {
    let mut items = ab100_items();
    for name in ["y1", "y2", "z1", "z2", "z3"] {
        items.push(PatternItem::var(name));
    }
    items.extend(ab100_items());
    let pairs = [("y1", "y2"), ("z1", "z2"), ("z2", "z3")]
        .map(|(x, y)| (Var::new(x), Var::new(y)));
    RelationalPattern::new(
        Alphabet::binary(),
        Pattern::new(items).unwrap(),
        Relation::new(RelationKind::Len, pairs),
    )
    .unwrap()
}

/// Eight chained groups of sizes 103..109 and 111 in one leading variable
/// block, the ab^100 terminal block, then a trailing group of 101.
pub fn ab100_nine_groups() -> RelationalPattern {
    let sizes = [103usize, 104, 105, 106, 107, 108, 109, 111];
    let mut items = Vec::new();
    let mut pairs = Vec::new();
    for (gi, &size) in sizes.iter().enumerate() {
        for j in 0..size {
            items.push(PatternItem::var(&format!("g{}_{}", gi + 1, j + 1)));
            if j > 0 {
                pairs.push((
                    Var::new(format!("g{}_{}", gi + 1, j)),
                    Var::new(format!("g{}_{}", gi + 1, j + 1)),
                ));
            }
        }
    }
    items.extend(ab100_items());
    for j in 0..101usize {
        items.push(PatternItem::var(&format!("g9_{}", j + 1)));
        if j > 0 {
            pairs.push((
                Var::new(format!("g9_{}", j)),
                Var::new(format!("g9_{}", j + 1)),
            ));
        }
    }
    RelationalPattern::new(
        Alphabet::binary(),
        Pattern::new(items).unwrap(),
        Relation::new(RelationKind::Len, pairs),
    )
    .unwrap()
}

/// Golden normal-form fixture: x1x2y1y2y3y4 a x3 b x4x5x6y5y6 bba x7x8x9y7y8 aa.
pub fn nf_golden() -> RelationalPattern {
    let tokens = [
        "x1", "x2", "y1", "y2", "y3", "y4", "a", "x3", "b", "x4", "x5", "x6", "y5", "y6", "bba",
        "x7", "x8", "x9", "y7", "y8", "aa",
    ];
    let mut pairs: Vec<(String, String)> = [
        ("x1", "x2"),
        ("x1", "x8"),
        ("x3", "x7"),
        ("x5", "x8"),
        ("x4", "x6"),
    ]
    .iter()
    .map(|(x, y)| (x.to_string(), y.to_string()))
    .collect();
    for i in 2..=8 {
        pairs.push(("y1".into(), format!("y{i}")));
    }
    let items = tokens
        .iter()
        .flat_map(|t| {
            if t.chars().all(|c| "ab".contains(c)) {
                t.chars().map(PatternItem::Terminal).collect::<Vec<_>>()
            } else {
                vec![PatternItem::var(t)]
            }
        })
        .collect();
    RelationalPattern::new(
        Alphabet::binary(),
        Pattern::new(items).unwrap(),
        Relation::new(
            RelationKind::Len,
            pairs.iter().map(|(x, y)| (Var::new(x.clone()), Var::new(y.clone()))),
        ),
    )
    .unwrap()
}

/// Seeded random relational pattern: at most `max_blocks` terminal blocks
/// (each 1..=3 letters), at most `max_groups` groups covering 1..=`max_vars`
/// variables, relations as spanning trees (bipartite by construction, so rev
/// is always reversal-friendly).
pub fn random_pattern(
    rng: &mut Rng,
    kind: RelationKind,
    alphabet: &Alphabet,
    max_blocks: usize,
    max_groups: usize,
    max_vars: usize,
) -> RelationalPattern {
    loop {
        let n_vars = 1 + rng.below(max_vars);
        let n_groups = 1 + rng.below(max_groups.min(n_vars));
        let n_blocks = rng.below(max_blocks + 1);
        // variables named v1..; assign each to a group, every group nonempty
        let mut group_of = Vec::with_capacity(n_vars);
        for i in 0..n_vars {
            group_of.push(if i < n_groups { i } else { rng.below(n_groups) });
        }
        // scatter variables over the n_blocks + 1 slots
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); n_blocks + 1];
        for v in 0..n_vars {
            slots[rng.below(n_blocks + 1)].push(v);
        }
        let mut items = Vec::new();
        for (i, slot) in slots.iter().enumerate() {
            for &v in slot {
                items.push(PatternItem::var(&format!("v{}", v + 1)));
            }
            if i < n_blocks {
                let len = 1 + rng.below(3);
                for _ in 0..len {
                    items.push(PatternItem::Terminal(rng.letter(alphabet)));
                }
            }
        }
        if items.is_empty() {
            continue;
        }
        let Ok(pattern) = Pattern::new(items) else {
            continue;
        };
        let mut pairs = Vec::new();
        for g in 0..n_groups {
            let members: Vec<usize> = (0..n_vars).filter(|&v| group_of[v] == g).collect();
            for w in members.windows(2) {
                pairs.push((
                    Var::new(format!("v{}", w[0] + 1)),
                    Var::new(format!("v{}", w[1] + 1)),
                ));
            }
        }
        if let Ok(rp) = RelationalPattern::new(
            alphabet.clone(),
            pattern,
            Relation::new(kind, pairs),
        ) {
            return rp;
        }
    }
}

/// Every word of length <= max_len the pattern generates, computed by
/// enumerating valid substitutions and concatenating strings directly --
/// no decider code involved.
pub fn generated_words(rp: &RelationalPattern, max_len: usize, erasing: bool) -> BTreeSet<Word> {
    let items = rp.pattern().items();
    let terminal_count = items.iter().filter(|it| it.is_terminal()).count();
    let mut out = BTreeSet::new();
    if terminal_count > max_len {
        return out;
    }
    let groups = rp.groups();
    let group_sizes: Vec<usize> = groups.groups().iter().map(|g| g.size()).collect();
    let budget = max_len - terminal_count;

    // choose a length per group, total weighted by group size within budget
    let mut lengths = vec![0usize; group_sizes.len()];
    assign_lengths(rp, &group_sizes, 0, budget, erasing, &mut lengths, &mut out, max_len);
    out
}

#[allow(clippy::too_many_arguments)]
fn assign_lengths(
    rp: &RelationalPattern,
    sizes: &[usize],
    idx: usize,
    budget: usize,
    erasing: bool,
    lengths: &mut Vec<usize>,
    out: &mut BTreeSet<Word>,
    max_len: usize,
) {
    if idx == sizes.len() {
        fill_contents(rp, lengths, out, max_len);
        return;
    }
    let min = usize::from(!erasing);
    let mut len = min;
    while len * sizes[idx] <= budget {
        lengths[idx] = len;
        assign_lengths(
            rp,
            sizes,
            idx + 1,
            budget - len * sizes[idx],
            erasing,
            lengths,
            out,
            max_len,
        );
        len += 1;
    }
}

fn fill_contents(
    rp: &RelationalPattern,
    lengths: &[usize],
    out: &mut BTreeSet<Word>,
    max_len: usize,
) {
    // free content positions per kind: one word per group for eq/rev,
    // one word per variable for len
    let symbols = rp.alphabet().symbols();
    match rp.kind() {
        RelationKind::Eq | RelationKind::Rev => {
            let mut rep_words: Vec<Vec<char>> = Vec::new();
            enumerate_group_words(rp, symbols, lengths, 0, &mut rep_words, out, max_len);
        }
        RelationKind::Len => {
            let vars = rp.pattern().vars();
            let var_lens: Vec<usize> = vars
                .iter()
                .map(|v| lengths[rp.groups().group_of(v).unwrap().0])
                .collect();
            let total: usize = var_lens.iter().sum();
            let m = symbols.len();
            let combos = m.checked_pow(total as u32).unwrap_or(usize::MAX);
            for mut idx in 0..combos {
                let mut assignment: Vec<Vec<char>> = Vec::with_capacity(vars.len());
                for &l in &var_lens {
                    let mut w = Vec::with_capacity(l);
                    for _ in 0..l {
                        w.push(symbols[idx % m]);
                        idx /= m;
                    }
                    assignment.push(w);
                }
                let word = assemble(rp, |v| {
                    let pos = vars.iter().position(|u| u == v).unwrap();
                    assignment[pos].clone()
                });
                if word.len() <= max_len {
                    out.insert(word);
                }
            }
        }
    }
}

fn enumerate_group_words(
    rp: &RelationalPattern,
    symbols: &[char],
    lengths: &[usize],
    group_idx: usize,
    rep_words: &mut Vec<Vec<char>>,
    out: &mut BTreeSet<Word>,
    max_len: usize,
) {
    if group_idx == lengths.len() {
        let word = assemble(rp, |v| {
            let g = rp.groups().group_of(v).unwrap();
            let rep = &rep_words[g.0];
            match (rp.kind(), rp.groups().orientation_of(v)) {
                (RelationKind::Rev, Orientation::Reversed) => {
                    rep.iter().rev().copied().collect()
                }
                _ => rep.clone(),
            }
        });
        if word.len() <= max_len {
            out.insert(word);
        }
        return;
    }
    let len = lengths[group_idx];
    let m = symbols.len();
    let combos = m.pow(len as u32);
    for mut idx in 0..combos {
        let mut w = Vec::with_capacity(len);
        for _ in 0..len {
            w.push(symbols[idx % m]);
            idx /= m;
        }
        rep_words.push(w);
        enumerate_group_words(rp, symbols, lengths, group_idx + 1, rep_words, out, max_len);
        rep_words.pop();
    }
}

fn assemble<F: Fn(&Var) -> Vec<char>>(rp: &RelationalPattern, image: F) -> Word {
    let mut letters = Vec::new();
    for item in rp.pattern().items() {
        match item {
            PatternItem::Terminal(c) => letters.push(*c),
            PatternItem::Variable(v) => letters.extend(image(v)),
        }
    }
    Word::new(letters)
}
