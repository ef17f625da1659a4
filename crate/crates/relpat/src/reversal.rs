//! Signed (overline) pattern form for the reversal relation,
//! reversal-obedient morphisms and their exhaustive search, and the
//! anti-telltale construction that defeats any finite positive sample of
//! x1 x1^rev x2 x2^rev x3 x3^rev.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::member::{member_unify, MembershipWitness, UnifyGuards};
use crate::pattern::{
    Alphabet, Pattern, PatternItem, Relation, RelationKind, RelationalPattern, Var, Word,
};
use crate::subst::Substitution;

/// A variable occurrence with an orientation mark; `(x^rev)^rev = x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedVariable {
    pub base: Var,
    pub reversed: bool,
}

impl SignedVariable {
    pub fn plain(base: Var) -> Self {
        SignedVariable {
            base,
            reversed: false,
        }
    }

    pub fn flipped(&self) -> Self {
        SignedVariable {
            base: self.base.clone(),
            reversed: !self.reversed,
        }
    }
}

impl std::fmt::Display for SignedVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.reversed {
            write!(f, "{}^rev", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignedItem {
    Terminal(char),
    Variable(SignedVariable),
}

/// Reverse of a signed string: reversed order with every sign flipped.
pub fn reverse_signed(items: &[SignedVariable]) -> Vec<SignedVariable> {
    items.iter().rev().map(SignedVariable::flipped).collect()
}

/// A pattern over signed variables (and possibly terminals).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPattern {
    items: Vec<SignedItem>,
}

impl SignedPattern {
    pub fn new(items: Vec<SignedItem>) -> Self {
        SignedPattern { items }
    }

    pub fn from_variables(vars: Vec<SignedVariable>) -> Self {
        SignedPattern {
            items: vars.into_iter().map(SignedItem::Variable).collect(),
        }
    }

    pub fn items(&self) -> &[SignedItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_terminal_free(&self) -> bool {
        self.items
            .iter()
            .all(|it| matches!(it, SignedItem::Variable(_)))
    }

    pub fn variables(&self) -> Result<Vec<SignedVariable>> {
        self.items
            .iter()
            .map(|it| match it {
                SignedItem::Variable(v) => Ok(v.clone()),
                SignedItem::Terminal(_) => Err(Error::NotTerminalFree),
            })
            .collect()
    }

    /// Distinct bases in first-occurrence order.
    pub fn bases(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for it in &self.items {
            if let SignedItem::Variable(v) = it {
                if !out.contains(&v.base) {
                    out.push(v.base.clone());
                }
            }
        }
        out
    }

    /// Renames bases x1, x2, ... in first-occurrence order and flips each
    /// base so its first occurrence is plain. Two signed patterns denote the
    /// same construction iff their canonical forms agree.
    pub fn canonical(&self) -> SignedPattern {
        let mut rename: BTreeMap<Var, (Var, bool)> = BTreeMap::new();
        let mut next = 1usize;
        let items = self
            .items
            .iter()
            .map(|it| match it {
                SignedItem::Terminal(c) => SignedItem::Terminal(*c),
                SignedItem::Variable(v) => {
                    let (name, flip) = rename.entry(v.base.clone()).or_insert_with(|| {
                        let fresh = Var::new(format!("x{next}"));
                        next += 1;
                        (fresh, v.reversed)
                    });
                    SignedItem::Variable(SignedVariable {
                        base: name.clone(),
                        reversed: v.reversed != *flip,
                    })
                }
            })
            .collect();
        SignedPattern { items }
    }

    /// Expands to a relational pattern: one fresh variable per occurrence
    /// (`base_k`), pairs wiring every occurrence to a pivot of the opposite
    /// orientation. Fails if some base occurs several times in only one
    /// orientation, which the rev relation cannot express.
    pub fn to_relational(&self, alphabet: &Alphabet) -> Result<ExpandedSigned> {
        if self.items.is_empty() {
            return Err(Error::EmptyConstruction);
        }
        let mut counters: BTreeMap<Var, usize> = BTreeMap::new();
        let mut occurrences: Vec<(Var, SignedVariable)> = Vec::new();
        let mut items = Vec::new();
        for it in &self.items {
            match it {
                SignedItem::Terminal(c) => items.push(PatternItem::Terminal(*c)),
                SignedItem::Variable(sv) => {
                    let k = counters.entry(sv.base.clone()).or_insert(0);
                    *k += 1;
                    let fresh = Var::new(format!("{}_{}", sv.base.name(), k));
                    occurrences.push((fresh.clone(), sv.clone()));
                    items.push(PatternItem::Variable(fresh));
                }
            }
        }
        let mut pairs = Vec::new();
        for base in self.bases() {
            let of_base: Vec<&(Var, SignedVariable)> = occurrences
                .iter()
                .filter(|(_, sv)| sv.base == base)
                .collect();
            if of_base.len() == 1 {
                continue; // free occurrence, either orientation
            }
            let pivot_plain = of_base.iter().find(|(_, sv)| !sv.reversed);
            let pivot_rev = of_base.iter().find(|(_, sv)| sv.reversed);
            let (Some((pp, _)), Some((pr, _))) = (pivot_plain, pivot_rev) else {
                return Err(Error::UnrepresentableSignedPattern);
            };
            pairs.push((pp.clone(), pr.clone()));
            for (v, sv) in &of_base {
                if v == pp || v == pr {
                    continue;
                }
                if sv.reversed {
                    pairs.push((pp.clone(), v.clone()));
                } else {
                    pairs.push((v.clone(), pr.clone()));
                }
            }
        }
        let pattern = RelationalPattern::new(
            alphabet.clone(),
            Pattern::new(items)?,
            Relation::new(RelationKind::Rev, pairs),
        )?;
        Ok(ExpandedSigned {
            pattern,
            occurrences,
        })
    }
}

impl std::fmt::Display for SignedPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for it in &self.items {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match it {
                SignedItem::Terminal(c) => write!(f, "{c}")?,
                SignedItem::Variable(v) => write!(f, "{v}")?,
            }
        }
        Ok(())
    }
}

/// A signed pattern expanded to ordinary (pattern, relation) form, keeping
/// the signed identity of each occurrence variable.
#[derive(Debug, Clone)]
pub struct ExpandedSigned {
    pub pattern: RelationalPattern,
    pub occurrences: Vec<(Var, SignedVariable)>,
}

/// Rewrites a reversal pattern in overline form: each group collapses onto
/// its representative, members on the reversed side carry the mark.
pub fn signed_form(rp: &RelationalPattern) -> Result<SignedPattern> {
    rp.expect_kind(RelationKind::Rev)?;
    let items = rp
        .pattern()
        .items()
        .iter()
        .map(|it| match it {
            PatternItem::Terminal(c) => SignedItem::Terminal(*c),
            PatternItem::Variable(v) => {
                let g = rp.groups().group_of(v).expect("var has a group");
                let rep = rp.groups().get(g).expect("valid id").representative().clone();
                let reversed = matches!(
                    rp.groups().orientation_of(v),
                    crate::groups::Orientation::Reversed
                );
                SignedItem::Variable(SignedVariable {
                    base: rep,
                    reversed,
                })
            }
        })
        .collect();
    Ok(SignedPattern { items })
}

/// A morphism on signed strings, keyed by base: a reversed occurrence maps
/// to the sign-flipped reverse of its base's image, so reversal-obedience
/// holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMorphism {
    images: BTreeMap<Var, Vec<SignedVariable>>,
}

impl VariableMorphism {
    pub fn new(images: impl IntoIterator<Item = (Var, Vec<SignedVariable>)>) -> Self {
        VariableMorphism {
            images: images.into_iter().collect(),
        }
    }

    pub fn image(&self, base: &Var) -> Option<&[SignedVariable]> {
        self.images.get(base).map(|v| v.as_slice())
    }

    pub fn images(&self) -> impl Iterator<Item = (&Var, &Vec<SignedVariable>)> {
        self.images.iter()
    }
}

/// Applies the morphism: plain occurrences take the image, reversed ones the
/// sign-flipped reverse of it; terminals pass through.
pub fn apply_morphism(m: &VariableMorphism, sp: &SignedPattern) -> Result<SignedPattern> {
    let mut items = Vec::new();
    for it in sp.items() {
        match it {
            SignedItem::Terminal(c) => items.push(SignedItem::Terminal(*c)),
            SignedItem::Variable(sv) => {
                let img = m
                    .image(&sv.base)
                    .ok_or_else(|| Error::MissingImage(sv.base.clone()))?;
                let expanded = if sv.reversed {
                    reverse_signed(img)
                } else {
                    img.to_vec()
                };
                items.extend(expanded.into_iter().map(SignedItem::Variable));
            }
        }
    }
    Ok(SignedPattern { items })
}

/// Exhaustive search for a reversal-obedient morphism carrying `source` onto
/// `target` (both terminal-free). Finding one decides that the target
/// pattern's language is included in the source pattern's. Decompositions
/// are explored with shorter images first; the first consistent morphism is
/// returned.
pub fn morphism_search(
    source: &SignedPattern,
    target: &SignedPattern,
    guards: &UnifyGuards,
) -> Result<Option<VariableMorphism>> {
    let src = source.variables()?;
    let tgt = target.variables()?;
    if source.bases().len() > guards.max_vars {
        return Err(Error::InstanceTooLarge(format!(
            "{} source bases exceed the guard {}",
            source.bases().len(),
            guards.max_vars
        )));
    }
    if tgt.len() > guards.max_word_len {
        return Err(Error::InstanceTooLarge(format!(
            "target length {} exceeds the guard {}",
            tgt.len(),
            guards.max_word_len
        )));
    }
    let mut images: BTreeMap<Var, Vec<SignedVariable>> = BTreeMap::new();
    if morphism_dfs(&src, &tgt, 0, 0, &mut images) {
        Ok(Some(VariableMorphism { images }))
    } else {
        Ok(None)
    }
}

fn morphism_dfs(
    src: &[SignedVariable],
    tgt: &[SignedVariable],
    si: usize,
    ti: usize,
    images: &mut BTreeMap<Var, Vec<SignedVariable>>,
) -> bool {
    if si == src.len() {
        return ti == tgt.len();
    }
    let sv = &src[si];
    if let Some(img) = images.get(&sv.base) {
        let expected = if sv.reversed {
            reverse_signed(img)
        } else {
            img.clone()
        };
        if tgt.len() - ti >= expected.len() && tgt[ti..ti + expected.len()] == expected[..] {
            return morphism_dfs(src, tgt, si + 1, ti + expected.len(), images);
        }
        return false;
    }
    for len in 0..=tgt.len() - ti {
        let segment = &tgt[ti..ti + len];
        let image = if sv.reversed {
            reverse_signed(segment)
        } else {
            segment.to_vec()
        };
        images.insert(sv.base.clone(), image);
        if morphism_dfs(src, tgt, si + 1, ti + len, images) {
            return true;
        }
        images.remove(&sv.base);
    }
    false
}

/// The three-group reversal pattern x1 x1^rev x2 x2^rev x3 x3^rev as a
/// relational pattern over the given alphabet.
pub fn anti_telltale_source(alphabet: &Alphabet) -> RelationalPattern {
    let items = vec![
        PatternItem::var("x1"),
        PatternItem::var("y1"),
        PatternItem::var("x2"),
        PatternItem::var("y2"),
        PatternItem::var("x3"),
        PatternItem::var("y3"),
    ];
    let pairs = [("x1", "y1"), ("x2", "y2"), ("x3", "y3")]
        .map(|(x, y)| (Var::new(x), Var::new(y)));
    RelationalPattern::new(
        alphabet.clone(),
        Pattern::new(items).expect("nonempty"),
        Relation::new(RelationKind::Rev, pairs),
    )
    .expect("fixed source pattern is well-formed")
}

/// Checks that (a, b, c) splits w as v1 v1^rev v2 v2^rev v3 v3^rev.
fn decomposition_fits(w: &Word, lens: (usize, usize, usize)) -> bool {
    let (a, b, c) = lens;
    if 2 * (a + b + c) != w.len() {
        return false;
    }
    let mut cursor = 0;
    for len in [a, b, c] {
        let v = w.slice(cursor, cursor + len);
        let mirror = w.slice(cursor + len, cursor + 2 * len);
        if mirror != v.reversed() {
            return false;
        }
        cursor += 2 * len;
    }
    true
}

/// Lexicographically smallest valid (|v1|, |v2|, |v3|), if any.
pub fn default_decomposition(w: &Word) -> Option<(usize, usize, usize)> {
    if !w.len().is_multiple_of(2) {
        return None;
    }
    let half = w.len() / 2;
    for a in 0..=half {
        for b in 0..=half - a {
            let c = half - a - b;
            if decomposition_fits(w, (a, b, c)) {
                return Some((a, b, c));
            }
        }
    }
    None
}

/// Result of the anti-telltale construction: the constructed pattern in both
/// signed and expanded form, one verified membership witness per input word,
/// and the morphism carrying the source onto the construction.
#[derive(Debug, Clone)]
pub struct AntiTelltale {
    pub signed: SignedPattern,
    pub expanded: ExpandedSigned,
    pub witnesses: Vec<Substitution>,
    pub morphism: VariableMorphism,
}

/// Builds, for a finite T inside the language of x1 x1^rev x2 x2^rev x3
/// x3^rev, a pattern accepting all of T whose language still sits strictly
/// inside the source's. Letters map to per-word fresh bases (first alphabet
/// symbol to x_(2i-1), second to x_(2i)); a word whose third piece holds
/// some letter exactly once while the first two pieces avoid it entirely
/// folds the first two pieces into one building block.
pub fn anti_telltale(
    alphabet: &Alphabet,
    words: &[Word],
    decompositions: Option<&[(usize, usize, usize)]>,
) -> Result<AntiTelltale> {
    if alphabet.len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let (s0, s1) = (alphabet.symbols()[0], alphabet.symbols()[1]);
    if let Some(d) = decompositions {
        if d.len() != words.len() {
            return Err(Error::InvalidDecomposition);
        }
    }
    let mut alphas: Vec<[Vec<SignedVariable>; 3]> = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        for &c in w.letters() {
            if !alphabet.contains(c) {
                return Err(Error::SymbolNotInAlphabet(c));
            }
        }
        let lens = match decompositions {
            Some(d) => {
                if !decomposition_fits(w, d[i]) {
                    return Err(Error::InvalidDecomposition);
                }
                d[i]
            }
            None => default_decomposition(w).ok_or_else(|| Error::NotAMember(w.to_string()))?,
        };
        let (a, b, c) = lens;
        let v1 = w.slice(0, a);
        let v2 = w.slice(2 * a, 2 * a + b);
        let v3 = w.slice(2 * (a + b), 2 * (a + b) + c);
        let base_a = Var::new(format!("x{}", 2 * i + 1));
        let base_b = Var::new(format!("x{}", 2 * i + 2));
        let inverse = |piece: &Word| -> Vec<SignedVariable> {
            piece
                .letters()
                .iter()
                .map(|&ch| {
                    SignedVariable::plain(if ch == s0 { base_a.clone() } else { base_b.clone() })
                })
                .collect()
        };
        let case_one = alphabet.symbols().iter().any(|&sigma| {
            let other = if sigma == s0 { s1 } else { s0 };
            v3.letters().iter().filter(|&&ch| ch == sigma).count() == 1
                && v1.letters().iter().all(|&ch| ch == other)
                && v2.letters().iter().all(|&ch| ch == other)
        });
        if case_one {
            alphas.push([inverse(&v1.concat(&v2)), inverse(&v3), Vec::new()]);
        } else {
            alphas.push([inverse(&v1), inverse(&v2), inverse(&v3)]);
        }
    }

    let mut building: [Vec<SignedVariable>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for alpha in &alphas {
        for (k, block) in alpha.iter().enumerate() {
            building[k].extend(block.iter().cloned());
        }
    }
    let mut signed_vars = Vec::new();
    for y in &building {
        signed_vars.extend(y.iter().cloned());
        signed_vars.extend(reverse_signed(y));
    }
    if signed_vars.is_empty() {
        return Err(Error::EmptyConstruction);
    }
    let signed = SignedPattern::from_variables(signed_vars);
    let expanded = signed.to_relational(alphabet)?;

    // per-word witnesses: word i's bases spell their letters, all else erased
    let mut witnesses = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let base_a = format!("x{}", 2 * i + 1);
        let base_b = format!("x{}", 2 * i + 2);
        let mut subst = Substitution::empty();
        for (occ_var, sv) in &expanded.occurrences {
            let image = if sv.base.name() == base_a {
                Word::new([s0])
            } else if sv.base.name() == base_b {
                Word::new([s1])
            } else {
                Word::empty()
            };
            subst.insert(occ_var.clone(), image);
        }
        subst.validate(&expanded.pattern)?;
        let produced = subst.apply(expanded.pattern.pattern())?;
        if &produced != w {
            return Err(Error::NotAMember(w.to_string()));
        }
        witnesses.push(subst);
    }

    let morphism = VariableMorphism::new([
        (Var::new("x1"), building[0].clone()),
        (Var::new("x2"), building[1].clone()),
        (Var::new("x3"), building[2].clone()),
    ]);
    let source_signed = signed_form(&anti_telltale_source(alphabet))?;
    let mapped = apply_morphism(&morphism, &source_signed)?;
    assert_eq!(
        mapped, signed,
        "morphism must carry the source onto the construction"
    );
    Ok(AntiTelltale {
        signed,
        expanded,
        witnesses,
        morphism,
    })
}

/// Searches words of the shape s0^(2k) s1 s1 s0^(2x) with k != x, k, x in
/// 1..=max_exp, for one accepted by the source but not by the constructed
/// pattern. Membership is checked on both sides; `None` means no witness in
/// range, not equality.
pub fn properness_witness(
    source: &RelationalPattern,
    constructed: &RelationalPattern,
    max_exp: usize,
) -> Result<Option<Word>> {
    let symbols = source.alphabet().symbols();
    if symbols.len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let (s0, s1) = (symbols[0], symbols[1]);
    let guards = UnifyGuards::unbounded();
    for kappa in 1..=max_exp {
        for xi in 1..=max_exp {
            if kappa == xi {
                continue;
            }
            let mut w = Word::empty();
            for _ in 0..2 * kappa {
                w.push(s0);
            }
            w.push(s1);
            w.push(s1);
            for _ in 0..2 * xi {
                w.push(s0);
            }
            let in_source = member_unify(&w, source, true, &guards)?.is_some();
            if !in_source {
                continue;
            }
            if member_unify(&w, constructed, true, &guards)?.is_none() {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Verified membership of `w` in a reversal pattern.
pub fn rev_member(
    w: &Word,
    rp: &RelationalPattern,
    guards: &UnifyGuards,
) -> Result<Option<MembershipWitness>> {
    member_unify(w, rp, true, guards)
}
