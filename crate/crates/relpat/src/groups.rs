//! Variable groups: connected components of the symmetric closure of the
//! relation, with the reversal 2-coloring and per-group decomposition
//! vectors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::pattern::{Pattern, Relation, RelationKind, RelationalPattern, Var};

/// Index of a group in canonical order (by leftmost pattern position of any
/// member).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub usize);

/// Side of the reversal 2-coloring. The representative is always `Plain`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Plain,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    /// Members in order of leftmost occurrence in the pattern.
    members: Vec<Var>,
    /// For rev: the coloring splitting the group into `[x]_=` and `[x]_rev`.
    orientation: Option<BTreeMap<Var, Orientation>>,
}

impl Group {
    pub fn members(&self) -> &[Var] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// The leftmost member; its color is `Plain`.
    pub fn representative(&self) -> &Var {
        &self.members[0]
    }

    pub fn is_free(&self) -> bool {
        self.members.len() == 1
    }

    pub fn orientation_of(&self, v: &Var) -> Option<Orientation> {
        self.orientation.as_ref().and_then(|m| m.get(v)).copied()
    }
}

/// Per-group counts of variables in each nonempty variable block, in block
/// order. Entries sum to the group size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionVector {
    counts: Vec<usize>,
}

impl DecompositionVector {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn as_u64(&self) -> Vec<u64> {
        self.counts.iter().map(|&c| c as u64).collect()
    }
}

/// Partition of `Var(p)` into groups, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    groups: Vec<Group>,
    index: BTreeMap<Var, GroupId>,
}

impl GroupTable {
    /// Partition per the transitive closure of the symmetric closure of the
    /// relation. For rev, every component must be bipartite; the coloring
    /// roots at the leftmost member.
    pub fn compute(pattern: &Pattern, relation: &Relation) -> Result<GroupTable> {
        let vars = pattern.vars();
        let mut adj: BTreeMap<&Var, Vec<&Var>> = vars.iter().map(|v| (v, Vec::new())).collect();
        for (x, y) in relation.pairs() {
            if x == y {
                if relation.kind() == RelationKind::Rev {
                    // A self-pair is an odd cycle under rev.
                    return Err(Error::NotReversalFriendly);
                }
                continue;
            }
            adj.get_mut(x).unwrap().push(y);
            adj.get_mut(y).unwrap().push(x);
        }

        let mut groups = Vec::new();
        let mut index = BTreeMap::new();
        let mut visited: BTreeSet<&Var> = BTreeSet::new();
        for root in &vars {
            if visited.contains(root) {
                continue;
            }
            let mut members_set: BTreeSet<&Var> = BTreeSet::new();
            let mut colors: BTreeMap<&Var, Orientation> = BTreeMap::new();
            let mut queue = VecDeque::new();
            queue.push_back(root);
            visited.insert(root);
            members_set.insert(root);
            colors.insert(root, Orientation::Plain);
            while let Some(v) = queue.pop_front() {
                let vc = colors[v];
                for &u in &adj[v] {
                    let flipped = match vc {
                        Orientation::Plain => Orientation::Reversed,
                        Orientation::Reversed => Orientation::Plain,
                    };
                    if let Some(&uc) = colors.get(u) {
                        if relation.kind() == RelationKind::Rev && uc == vc {
                            return Err(Error::NotReversalFriendly);
                        }
                        let _ = flipped;
                    } else {
                        colors.insert(u, flipped);
                        visited.insert(u);
                        members_set.insert(u);
                        queue.push_back(u);
                    }
                }
            }
            // members in leftmost-occurrence order (vars is position order)
            let members: Vec<Var> = vars
                .iter()
                .filter(|v| members_set.contains(v))
                .cloned()
                .collect();
            let orientation = if relation.kind() == RelationKind::Rev {
                Some(
                    members
                        .iter()
                        .map(|v| (v.clone(), colors[v]))
                        .collect(),
                )
            } else {
                None
            };
            let gid = GroupId(groups.len());
            for m in &members {
                index.insert(m.clone(), gid);
            }
            groups.push(Group {
                members,
                orientation,
            });
        }
        Ok(GroupTable { groups, index })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn get(&self, id: GroupId) -> Result<&Group> {
        self.groups.get(id.0).ok_or(Error::UnknownGroup(id.0))
    }

    pub fn group_of(&self, v: &Var) -> Option<GroupId> {
        self.index.get(v).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = GroupId> {
        (0..self.groups.len()).map(GroupId)
    }

    /// Orientation of `v` within its group (rev only; `Plain` for eq/len).
    pub fn orientation_of(&self, v: &Var) -> Orientation {
        self.group_of(v)
            .and_then(|g| self.groups[g.0].orientation_of(v))
            .unwrap_or(Orientation::Plain)
    }
}

/// The groups of a relational pattern (cached at construction).
pub fn compute_groups(rp: &RelationalPattern) -> &GroupTable {
    rp.groups()
}

/// Counts of the group's variables per nonempty variable block.
pub fn decomposition_vector(rp: &RelationalPattern, group: GroupId) -> Result<DecompositionVector> {
    let g = rp.groups().get(group)?;
    let members: BTreeSet<&Var> = g.members().iter().collect();
    let bd = rp.pattern().block_decomposition();
    let counts = bd
        .nonempty_slots()
        .into_iter()
        .map(|slot| {
            bd.variable_blocks()[slot]
                .iter()
                .filter(|v| members.contains(v))
                .count()
        })
        .collect();
    Ok(DecompositionVector { counts })
}

/// Decomposition vectors for all groups, in canonical order.
pub fn all_decompositions(rp: &RelationalPattern) -> Vec<DecompositionVector> {
    rp.groups()
        .ids()
        .map(|g| decomposition_vector(rp, g).expect("group id from table"))
        .collect()
}
