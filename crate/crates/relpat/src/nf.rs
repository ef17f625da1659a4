//! Equal-length normal form: group-sorted variable blocks, then elimination
//! of groups whose decomposition is an integer combination of the others.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::groups::{decomposition_vector, GroupId};
use crate::pattern::{Pattern, PatternItem, RelationKind, RelationalPattern, Var};
use crate::solver::{nonneg_combination, CombinationMode};

/// How "combination of the decompositions of other groups" is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EliminationRule {
    /// Coefficients >= 1 over some nonempty subset of the other groups,
    /// i.e. >= 0 over all of them with at least one positive.
    #[default]
    AnySubset,
    /// Coefficients >= 1 over every other group.
    AllOthers,
}

/// A group removed during normalization, with the certifying combination
/// (generator group representative, coefficient), zero coefficients omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedGroup {
    pub members: Vec<Var>,
    pub combination: Vec<(Var, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub pattern: RelationalPattern,
    pub removed: Vec<RemovedGroup>,
}

/// Reorders every variable block so that members of group 1 precede group 2
/// and so on (canonical group order; stable on original positions within a
/// group). Language-preserving.
pub fn sort_blocks(rp: &RelationalPattern) -> Result<RelationalPattern> {
    rp.expect_kind(RelationKind::Len)?;
    let bd = rp.pattern().block_decomposition();
    let position = |v: &Var| rp.pattern().position_of(v).expect("var occurs");
    let mut blocks: Vec<Vec<Var>> = bd.variable_blocks().to_vec();
    for block in &mut blocks {
        block.sort_by_key(|v| {
            let g = rp.groups().group_of(v).expect("var has a group");
            (g, position(v))
        });
    }
    let mut items = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        items.extend(block.iter().cloned().map(PatternItem::Variable));
        if i < bd.n() {
            items.extend(
                bd.terminal_blocks()[i]
                    .letters()
                    .iter()
                    .map(|&c| PatternItem::Terminal(c)),
            );
        }
    }
    RelationalPattern::new(
        rp.alphabet().clone(),
        Pattern::new(items)?,
        rp.relation().clone(),
    )
}

fn eliminable(rp: &RelationalPattern, gid: GroupId, rule: EliminationRule) -> Result<Option<Vec<(Var, u64)>>> {
    let target = decomposition_vector(rp, gid)?.as_u64();
    let mut reps = Vec::new();
    let mut generators = Vec::new();
    for other in rp.groups().ids() {
        if other == gid {
            continue;
        }
        reps.push(rp.groups().get(other)?.representative().clone());
        generators.push(decomposition_vector(rp, other)?.as_u64());
    }
    if generators.is_empty() {
        return Ok(None);
    }
    let mode = match rule {
        // a nonzero target forces at least one positive coefficient, which
        // is exactly the subset reading
        EliminationRule::AnySubset => CombinationMode::Nonnegative,
        EliminationRule::AllOthers => CombinationMode::StrictlyPositive,
    };
    debug_assert!(target.iter().any(|&t| t > 0));
    match nonneg_combination(&target, &generators, mode)? {
        Some(sol) => Ok(Some(
            reps.into_iter()
                .zip(sol.coefficients)
                .filter(|(_, c)| *c > 0)
                .collect(),
        )),
        None => Ok(None),
    }
}

fn remove_group(rp: &RelationalPattern, gid: GroupId) -> Result<RelationalPattern> {
    let dropped: BTreeSet<Var> = rp
        .groups()
        .get(gid)?
        .members()
        .iter()
        .cloned()
        .collect();
    let items: Vec<PatternItem> = rp
        .pattern()
        .items()
        .iter()
        .filter(|it| match it {
            PatternItem::Variable(v) => !dropped.contains(v),
            PatternItem::Terminal(_) => true,
        })
        .cloned()
        .collect();
    RelationalPattern::new(
        rp.alphabet().clone(),
        Pattern::new(items)?,
        rp.relation().without_vars(&dropped),
    )
}

pub fn normal_form(rp: &RelationalPattern) -> Result<NormalForm> {
    normal_form_with(rp, EliminationRule::default())
}

/// Sorts blocks, then repeatedly removes dependent groups (tested in reverse
/// canonical order) until none remains removable.
pub fn normal_form_with(rp: &RelationalPattern, rule: EliminationRule) -> Result<NormalForm> {
    let mut current = sort_blocks(rp)?;
    let mut removed = Vec::new();
    'outer: loop {
        let ids: Vec<GroupId> = current.groups().ids().collect();
        for &gid in ids.iter().rev() {
            if let Some(combination) = eliminable(&current, gid, rule)? {
                let members = current.groups().get(gid)?.members().to_vec();
                current = remove_group(&current, gid)?;
                removed.push(RemovedGroup {
                    members,
                    combination,
                });
                continue 'outer;
            }
        }
        break;
    }
    Ok(NormalForm {
        pattern: current,
        removed,
    })
}
