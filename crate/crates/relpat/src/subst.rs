//! Substitutions, validity per relation kind, application, and the
//! single-group bounded-length generators behind the characteristic samples.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groups::{GroupId, Orientation};
use crate::pattern::{Pattern, PatternItem, RelationKind, RelationalPattern, Var, Word};
use crate::rng::SplitMix64;

/// A variable-to-word mapping; the empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    assignment: BTreeMap<Var, Word>,
}

impl Substitution {
    pub fn new(assignment: impl IntoIterator<Item = (Var, Word)>) -> Self {
        Substitution {
            assignment: assignment.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Substitution {
            assignment: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, v: Var, w: Word) {
        self.assignment.insert(v, w);
    }

    pub fn get(&self, v: &Var) -> Option<&Word> {
        self.assignment.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Word)> {
        self.assignment.iter()
    }

    /// Morphism application: terminals copied, variables replaced.
    pub fn apply(&self, p: &Pattern) -> Result<Word> {
        let mut out = Word::empty();
        for item in p.items() {
            match item {
                PatternItem::Terminal(c) => out.push(*c),
                PatternItem::Variable(v) => {
                    let w = self
                        .assignment
                        .get(v)
                        .ok_or_else(|| Error::MissingVariable(v.clone()))?;
                    out.extend(w);
                }
            }
        }
        Ok(out)
    }

    /// Checks validity for the pattern's relation: every related pair maps
    /// to identical words (eq), mutual reverses (rev), or equal lengths
    /// (len). Reports the first violated pair in pair order.
    pub fn validate(&self, rp: &RelationalPattern) -> Result<()> {
        for v in rp.pattern().vars() {
            if !self.assignment.contains_key(&v) {
                return Err(Error::MissingVariable(v));
            }
        }
        let kind = rp.kind();
        for (x, y) in rp.relation().pairs() {
            let wx = &self.assignment[x];
            let wy = &self.assignment[y];
            let ok = match kind {
                RelationKind::Eq => wx == wy,
                RelationKind::Rev => *wx == wy.reversed(),
                RelationKind::Len => wx.len() == wy.len(),
            };
            if !ok {
                return Err(Error::RelationViolated {
                    x: x.clone(),
                    y: y.clone(),
                    kind,
                });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, rp: &RelationalPattern) -> bool {
        self.validate(rp).is_ok()
    }
}

/// Bound on substituted word lengths; non-erasing additionally requires
/// every image nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthBound {
    pub z: usize,
    pub erasing: bool,
}

/// How to walk a content space: exhaustively or as a seeded sample of
/// `count` draws (with replacement).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentMode {
    All,
    Sampled { count: u64, seed: u64 },
}

pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// One enumerated item: the substitution and the word it generates.
pub type LzItem = (Substitution, Word);

// Content space for one group at a common member length, given the relation
// kind: for len every member is free; for eq and rev only the
// representative's word is free and members derive from it.
fn group_content_size(kind: RelationKind, alphabet_len: usize, group_size: usize, len: usize) -> u128 {
    let m = alphabet_len as u128;
    let exp = match kind {
        RelationKind::Len => len * group_size,
        RelationKind::Eq | RelationKind::Rev => len,
    };
    m.checked_pow(exp as u32).unwrap_or(u128::MAX)
}

fn decode_word(alphabet: &[char], mut idx: u128, len: usize) -> (Word, u128) {
    let m = alphabet.len() as u128;
    let mut letters = vec![alphabet[0]; len];
    for slot in (0..len).rev() {
        letters[slot] = alphabet[(idx % m) as usize];
        idx /= m;
    }
    (Word::new(letters), idx)
}

/// Assigns the group's members for one content index. Members are filled in
/// leftmost-occurrence order; for rev, reversed-colored members receive the
/// reverse of the representative's word.
fn assign_group(
    rp: &RelationalPattern,
    group: GroupId,
    len: usize,
    mut idx: u128,
    subst: &mut Substitution,
) {
    let g = rp.groups().get(group).expect("valid group id");
    let alphabet = rp.alphabet().symbols();
    match rp.kind() {
        RelationKind::Len => {
            // decode per member, last member in the lowest digits
            let mut words = Vec::with_capacity(g.size());
            for _ in 0..g.size() {
                let (w, rest) = decode_word(alphabet, idx, len);
                words.push(w);
                idx = rest;
            }
            words.reverse();
            for (v, w) in g.members().iter().zip(words) {
                subst.insert(v.clone(), w);
            }
        }
        RelationKind::Eq => {
            let (w, _) = decode_word(alphabet, idx, len);
            for v in g.members() {
                subst.insert(v.clone(), w.clone());
            }
        }
        RelationKind::Rev => {
            let (w, _) = decode_word(alphabet, idx, len);
            for v in g.members() {
                let image = match rp.groups().orientation_of(v) {
                    Orientation::Plain => w.clone(),
                    Orientation::Reversed => w.reversed(),
                };
                subst.insert(v.clone(), image);
            }
        }
    }
}

// A (length-profile, content-size) stratum of the enumeration space.
struct Stratum {
    group_len: usize,
    others_len: usize,
    size: u128,
}

fn strata(
    rp: &RelationalPattern,
    group: GroupId,
    bound: LengthBound,
    include_skeleton: bool,
) -> Result<Vec<Stratum>> {
    let g = rp.groups().get(group)?;
    let m = rp.alphabet().len();
    let kind = rp.kind();
    let mut out = Vec::new();
    if bound.erasing {
        let start = if include_skeleton { 0 } else { 1 };
        for z in start..=bound.z {
            out.push(Stratum {
                group_len: z,
                others_len: 0,
                size: group_content_size(kind, m, g.size(), z),
            });
        }
    } else {
        // the chosen group at exactly z, every other variable at length 1
        let mut size = group_content_size(kind, m, g.size(), bound.z);
        for other in rp.groups().ids() {
            if other == group {
                continue;
            }
            let og = rp.groups().get(other)?;
            size = size.saturating_mul(group_content_size(kind, m, og.size(), 1));
        }
        out.push(Stratum {
            group_len: bound.z,
            others_len: 1,
            size,
        });
    }
    Ok(out)
}

fn item_at(
    rp: &RelationalPattern,
    group: GroupId,
    stratum: &Stratum,
    mut idx: u128,
) -> Result<LzItem> {
    let mut subst = Substitution::empty();
    if stratum.others_len == 0 {
        for v in rp.pattern().vars() {
            subst.insert(v, Word::empty());
        }
        assign_group(rp, group, stratum.group_len, idx, &mut subst);
    } else {
        // digits: chosen group in the highest positions, then the other
        // groups in canonical order
        let mut sizes = Vec::new();
        for other in rp.groups().ids() {
            if other != group {
                let og = rp.groups().get(other)?;
                sizes.push((
                    other,
                    group_content_size(rp.kind(), rp.alphabet().len(), og.size(), stratum.others_len),
                ));
            }
        }
        let mut indices = Vec::with_capacity(sizes.len());
        for &(_, size) in sizes.iter().rev() {
            indices.push(idx % size);
            idx /= size;
        }
        indices.reverse();
        assign_group(rp, group, stratum.group_len, idx, &mut subst);
        for ((other, _), sub_idx) in sizes.iter().zip(indices) {
            assign_group(rp, *other, stratum.others_len, sub_idx, &mut subst);
        }
    }
    let word = subst.apply(rp.pattern())?;
    debug_assert!(subst.is_valid(rp));
    Ok((subst, word))
}

/// Substitutions giving every member of `group` a word of one common length
/// and erasing everything else (erasing mode, lengths 0..=z), or giving the
/// group length exactly `z` and every other variable length 1 (non-erasing
/// mode). `All` enumerates each content combination, `Sampled` draws
/// deterministically from the same space.
pub fn enumerate_single_group_lz(
    rp: &RelationalPattern,
    group: GroupId,
    bound: LengthBound,
    content: ContentMode,
    include_skeleton: bool,
    cap: u64,
) -> Result<Vec<LzItem>> {
    let strata = strata(rp, group, bound, include_skeleton)?;
    let total: u128 = strata.iter().map(|s| s.size).sum();
    match content {
        ContentMode::All => {
            if total > u128::from(cap) {
                return Err(Error::GroupTooLarge {
                    required: total,
                    cap,
                });
            }
            let mut items = Vec::with_capacity(total as usize);
            for s in &strata {
                for idx in 0..s.size {
                    items.push(item_at(rp, group, s, idx)?);
                }
            }
            Ok(items)
        }
        ContentMode::Sampled { count, seed } => {
            let mut rng = SplitMix64::new(seed);
            let mut items = Vec::with_capacity(count as usize);
            for _ in 0..count {
                let mut idx = rng.below(total.max(1));
                for s in &strata {
                    if idx < s.size {
                        items.push(item_at(rp, group, s, idx)?);
                        break;
                    }
                    idx -= s.size;
                }
            }
            Ok(items)
        }
    }
}
