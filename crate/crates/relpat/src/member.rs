//! Membership deciders: anchoring plus integer feasibility for the
//! equal-length relation, backtracking unification for equality and
//! reversal.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groups::{GroupId, Orientation};
use crate::pattern::{PatternItem, RelationKind, RelationalPattern, Word};
use crate::solver::{nonneg_combination, CoefficientVector, CombinationMode};
use crate::subst::Substitution;

/// Where each terminal block sits inside an accepted word, and the lengths
/// of the variable regions between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchoring {
    /// Start index of each terminal block occurrence, in block order.
    pub positions: Vec<usize>,
    /// Region lengths g_1 ..= g_(n+1) around the blocks.
    pub gaps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipWitness {
    /// Equal-length: an anchoring plus per-group repetition counts.
    Len {
        anchoring: Anchoring,
        coefficients: CoefficientVector,
    },
    /// Equality/reversal: a full valid substitution.
    Unify { substitution: Substitution },
}

/// Size guards for the backtracking unifier. Exceeding them is an explicit
/// error, not silent slowness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnifyGuards {
    pub max_vars: usize,
    pub max_word_len: usize,
}

impl Default for UnifyGuards {
    fn default() -> Self {
        UnifyGuards {
            max_vars: 12,
            max_word_len: 30,
        }
    }
}

impl UnifyGuards {
    /// For callers whose instances are structurally bounded elsewhere.
    pub(crate) fn unbounded() -> Self {
        UnifyGuards {
            max_vars: usize::MAX,
            max_word_len: usize::MAX,
        }
    }
}

/// Equal-length membership: searches anchorings of the terminal blocks
/// leftmost-first and, per anchoring, the lexicographically smallest
/// coefficient vector writing the gap profile as a combination of the group
/// decompositions (coefficients >= 1 when non-erasing).
pub fn member_len(
    w: &Word,
    rp: &RelationalPattern,
    erasing: bool,
) -> Result<Option<MembershipWitness>> {
    rp.expect_kind(RelationKind::Len)?;
    let bd = rp.pattern().block_decomposition();
    let n = bd.n();
    let nonempty = bd.nonempty_slots();
    let generators: Vec<Vec<u64>> = rp
        .groups()
        .ids()
        .map(|g| crate::groups::decomposition_vector(rp, g).map(|d| d.as_u64()))
        .collect::<Result<_>>()?;
    let mode = if erasing {
        CombinationMode::Nonnegative
    } else {
        CombinationMode::StrictlyPositive
    };

    if n == 0 {
        // terminal-free: one slot holding the whole word
        let target = vec![w.len() as u64];
        if let Some(coefficients) = nonneg_combination(&target, &generators, mode)? {
            let witness = MembershipWitness::Len {
                anchoring: Anchoring {
                    positions: vec![],
                    gaps: vec![w.len()],
                },
                coefficients,
            };
            verify_len_witness(w, rp, &witness);
            return Ok(Some(witness));
        }
        return Ok(None);
    }

    let blocks = bd.terminal_blocks();
    let first_slot_empty = bd.variable_blocks()[0].is_empty();
    let last_slot_empty = bd.variable_blocks()[n].is_empty();
    let suffix_terminal_len: Vec<usize> = {
        // minimal length still needed from block i on
        let mut v = vec![0usize; n + 1];
        for i in (0..n).rev() {
            v[i] = v[i + 1] + blocks[i].len();
        }
        v
    };

    let mut positions = Vec::with_capacity(n);
    let mut found: Option<MembershipWitness> = None;
    anchor_search(
        w,
        blocks,
        0,
        0,
        &suffix_terminal_len,
        first_slot_empty,
        last_slot_empty,
        &mut positions,
        &mut |positions: &[usize]| -> Result<bool> {
            let mut gaps = Vec::with_capacity(n + 1);
            gaps.push(positions[0]);
            for j in 1..n {
                gaps.push(positions[j] - (positions[j - 1] + blocks[j - 1].len()));
            }
            gaps.push(w.len() - (positions[n - 1] + blocks[n - 1].len()));
            if first_slot_empty && gaps[0] != 0 {
                return Ok(false);
            }
            if last_slot_empty && gaps[n] != 0 {
                return Ok(false);
            }
            let target: Vec<u64> = nonempty.iter().map(|&s| gaps[s] as u64).collect();
            if let Some(coefficients) = nonneg_combination(&target, &generators, mode)? {
                let witness = MembershipWitness::Len {
                    anchoring: Anchoring {
                        positions: positions.to_vec(),
                        gaps,
                    },
                    coefficients,
                };
                verify_len_witness(w, rp, &witness);
                found = Some(witness);
                return Ok(true);
            }
            Ok(false)
        },
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn anchor_search(
    w: &Word,
    blocks: &[Word],
    block_idx: usize,
    from: usize,
    suffix_len: &[usize],
    first_slot_empty: bool,
    last_slot_empty: bool,
    positions: &mut Vec<usize>,
    on_complete: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if block_idx == blocks.len() {
        return on_complete(positions);
    }
    let block = &blocks[block_idx];
    let start_min = if block_idx == 0 && first_slot_empty {
        0
    } else {
        from
    };
    let start_max = w.len().saturating_sub(suffix_len[block_idx]);
    for pos in start_min..=start_max {
        if block_idx == 0 && first_slot_empty && pos != 0 {
            break;
        }
        if block_idx + 1 == blocks.len()
            && last_slot_empty
            && pos + block.len() != w.len()
        {
            continue;
        }
        if w.len() < pos + block.len() {
            break;
        }
        if w.letters()[pos..pos + block.len()] != block.letters()[..] {
            continue;
        }
        positions.push(pos);
        let stop = anchor_search(
            w,
            blocks,
            block_idx + 1,
            pos + block.len(),
            suffix_len,
            first_slot_empty,
            last_slot_empty,
            positions,
            on_complete,
        )?;
        positions.pop();
        if stop {
            return Ok(true);
        }
    }
    Ok(false)
}

fn verify_len_witness(w: &Word, rp: &RelationalPattern, witness: &MembershipWitness) {
    let MembershipWitness::Len {
        anchoring,
        coefficients,
    } = witness
    else {
        unreachable!()
    };
    let bd = rp.pattern().block_decomposition();
    // anchoring reconstructs the word
    let mut cursor = 0usize;
    for (j, block) in bd.terminal_blocks().iter().enumerate() {
        cursor += anchoring.gaps[j];
        assert_eq!(anchoring.positions[j], cursor, "anchoring out of order");
        assert_eq!(
            &w.slice(cursor, cursor + block.len()),
            block,
            "anchored block does not match the word"
        );
        cursor += block.len();
    }
    cursor += anchoring.gaps[bd.n()];
    assert_eq!(cursor, w.len(), "anchoring does not span the word");
    // gap profile equals the claimed combination
    let nonempty = bd.nonempty_slots();
    for (k, &slot) in nonempty.iter().enumerate() {
        let mut total = 0u64;
        for (gid, c) in rp.groups().ids().zip(&coefficients.coefficients) {
            let d = crate::groups::decomposition_vector(rp, gid).unwrap();
            total += c * d.counts()[k] as u64;
        }
        assert_eq!(total, anchoring.gaps[slot] as u64, "gap profile mismatch");
    }
}

/// Equality/reversal membership by backtracking: one word is chosen per
/// group representative (shortest first, groups in canonical order), members
/// derive through the coloring, and the concatenation must reproduce `w`.
pub fn member_unify(
    w: &Word,
    rp: &RelationalPattern,
    erasing: bool,
    guards: &UnifyGuards,
) -> Result<Option<MembershipWitness>> {
    match rp.kind() {
        RelationKind::Eq | RelationKind::Rev => {}
        RelationKind::Len => {
            return Err(Error::WrongKind {
                expected: RelationKind::Eq,
                found: RelationKind::Len,
            })
        }
    }
    let var_count = rp.pattern().vars().len();
    if var_count > guards.max_vars {
        return Err(Error::InstanceTooLarge(format!(
            "{var_count} variables exceed the unify guard {}",
            guards.max_vars
        )));
    }
    if w.len() > guards.max_word_len {
        return Err(Error::InstanceTooLarge(format!(
            "word length {} exceeds the unify guard {}",
            w.len(),
            guards.max_word_len
        )));
    }

    // minimal remaining length from each item on: terminals count 1,
    // variables count 1 only in non-erasing mode
    let items = rp.pattern().items();
    let mut min_rest = vec![0usize; items.len() + 1];
    for i in (0..items.len()).rev() {
        min_rest[i] = min_rest[i + 1]
            + match &items[i] {
                PatternItem::Terminal(_) => 1,
                PatternItem::Variable(_) => usize::from(!erasing),
            };
    }

    let mut assignment: BTreeMap<GroupId, Word> = BTreeMap::new();
    let found = unify(rp, w, 0, 0, erasing, &min_rest, &mut assignment);
    if let Some(assignment) = found {
        let mut subst = Substitution::empty();
        for v in rp.pattern().vars() {
            let g = rp.groups().group_of(&v).expect("var has a group");
            let rep_word = &assignment[&g];
            let image = match rp.groups().orientation_of(&v) {
                Orientation::Plain => rep_word.clone(),
                Orientation::Reversed => rep_word.reversed(),
            };
            subst.insert(v.clone(), image);
        }
        subst.validate(rp)?;
        let applied = subst.apply(rp.pattern())?;
        assert_eq!(&applied, w, "unify witness does not reproduce the word");
        return Ok(Some(MembershipWitness::Unify {
            substitution: subst,
        }));
    }
    Ok(None)
}

fn unify(
    rp: &RelationalPattern,
    w: &Word,
    item_idx: usize,
    cursor: usize,
    erasing: bool,
    min_rest: &[usize],
    assignment: &mut BTreeMap<GroupId, Word>,
) -> Option<BTreeMap<GroupId, Word>> {
    if w.len() - cursor < min_rest[item_idx] {
        return None;
    }
    let items = rp.pattern().items();
    if item_idx == items.len() {
        if cursor == w.len() {
            return Some(assignment.clone());
        }
        return None;
    }
    match &items[item_idx] {
        PatternItem::Terminal(c) => {
            if cursor < w.len() && w.letters()[cursor] == *c {
                unify(rp, w, item_idx + 1, cursor + 1, erasing, min_rest, assignment)
            } else {
                None
            }
        }
        PatternItem::Variable(v) => {
            let g = rp.groups().group_of(v).expect("var has a group");
            let reversed_occurrence = matches!(
                (rp.kind(), rp.groups().orientation_of(v)),
                (RelationKind::Rev, Orientation::Reversed)
            );
            if let Some(rep_word) = assignment.get(&g) {
                let image = if reversed_occurrence {
                    rep_word.reversed()
                } else {
                    rep_word.clone()
                };
                if w.len() - cursor >= image.len()
                    && w.letters()[cursor..cursor + image.len()] == image.letters()[..]
                {
                    return unify(
                        rp,
                        w,
                        item_idx + 1,
                        cursor + image.len(),
                        erasing,
                        min_rest,
                        assignment,
                    );
                }
                return None;
            }
            let min_len = usize::from(!erasing);
            for len in min_len..=w.len() - cursor {
                let segment = w.slice(cursor, cursor + len);
                let rep_word = if reversed_occurrence {
                    segment.reversed()
                } else {
                    segment
                };
                assignment.insert(g, rep_word);
                if let Some(result) = unify(
                    rp,
                    w,
                    item_idx + 1,
                    cursor + len,
                    erasing,
                    min_rest,
                    assignment,
                ) {
                    return Some(result);
                }
                assignment.remove(&g);
            }
            None
        }
    }
}

/// Kind dispatch over the two deciders.
pub fn member(
    w: &Word,
    rp: &RelationalPattern,
    erasing: bool,
    guards: &UnifyGuards,
) -> Result<Option<MembershipWitness>> {
    match rp.kind() {
        RelationKind::Len => member_len(w, rp, erasing),
        RelationKind::Eq | RelationKind::Rev => member_unify(w, rp, erasing, guards),
    }
}

pub fn is_member(w: &Word, rp: &RelationalPattern, erasing: bool, guards: &UnifyGuards) -> Result<bool> {
    Ok(member(w, rp, erasing, guards)?.is_some())
}
