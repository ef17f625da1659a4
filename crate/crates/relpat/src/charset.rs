//! Characteristic-sample generation (single-group bounded-length sets and
//! the per-group witness words with pinned anchorings), equivalence and
//! inclusion deciders for the covered pattern classes, and the
//! telltale/characteristic-set conversions with their family checkers.

use std::collections::BTreeMap;

use crate::classify::{
    are_congruous, find_telltale_conjugates, forbidden_block_shapes, is_p23, ForbiddenBlock,
    ForbiddenVariant, TelltaleConjugatePair,
};
use crate::error::{Error, Result};
use crate::member::{is_member, UnifyGuards};
use crate::oracle::{slice_compare, OracleConfig, SliceRelation};
use crate::pattern::{RelationKind, RelationalPattern, Word};
use crate::subst::{enumerate_single_group_lz, ContentMode, LengthBound, DEFAULT_ENUM_CAP};

/// A finite set of labeled words; no word carries two labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledSample {
    entries: BTreeMap<Word, bool>,
}

impl LabeledSample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_positive(words: impl IntoIterator<Item = Word>) -> Self {
        LabeledSample {
            entries: words.into_iter().map(|w| (w, true)).collect(),
        }
    }

    pub fn insert(&mut self, word: Word, label: bool) -> Result<()> {
        if let Some(&existing) = self.entries.get(&word) {
            if existing != label {
                return Err(Error::ConflictingLabel(word.to_string()));
            }
            return Ok(());
        }
        self.entries.insert(word, label);
        Ok(())
    }

    pub fn merge(&mut self, other: &LabeledSample) -> Result<()> {
        for (w, &l) in &other.entries {
            self.insert(w.clone(), l)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, bool)> {
        self.entries.iter().map(|(w, &l)| (w, l))
    }

    pub fn positives(&self) -> impl Iterator<Item = &Word> {
        self.entries.iter().filter(|(_, &l)| l).map(|(w, _)| w)
    }

    pub fn is_positive_only(&self) -> bool {
        self.entries.values().all(|&l| l)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.entries.contains_key(w)
    }

    /// First word whose label disagrees with the membership closure.
    pub fn inconsistency_with<F>(&self, mut member: F) -> Result<Option<Word>>
    where
        F: FnMut(&Word) -> Result<bool>,
    {
        for (w, &label) in &self.entries {
            if member(w)? != label {
                return Ok(Some(w.clone()));
            }
        }
        Ok(None)
    }
}

/// Union over all groups of the erasing single-group substitutions with one
/// common member length at most `ell`, labeled positive. The terminal
/// skeleton is the z = 0 stratum.
pub fn gen_seps(
    rp: &RelationalPattern,
    ell: usize,
    content: ContentMode,
    include_skeleton: bool,
    cap: u64,
) -> Result<LabeledSample> {
    rp.expect_kind(RelationKind::Len)?;
    let mut sample = LabeledSample::new();
    for group in rp.groups().ids() {
        let items = enumerate_single_group_lz(
            rp,
            group,
            LengthBound {
                z: ell,
                erasing: true,
            },
            content,
            include_skeleton,
            cap,
        )?;
        for (_, w) in items {
            sample.insert(w, true)?;
        }
    }
    Ok(sample)
}

/// The non-erasing sample: one group at length 2, every other variable at
/// length 1, for each choice of group.
pub fn gen_s2_nonerasing(
    rp: &RelationalPattern,
    content: ContentMode,
    cap: u64,
) -> Result<LabeledSample> {
    rp.expect_kind(RelationKind::Len)?;
    let mut sample = LabeledSample::new();
    for group in rp.groups().ids() {
        let items = enumerate_single_group_lz(
            rp,
            group,
            LengthBound {
                z: 2,
                erasing: false,
            },
            content,
            true,
            cap,
        )?;
        for (_, w) in items {
            sample.insert(w, true)?;
        }
    }
    Ok(sample)
}

fn smallest_avoiding(rp: &RelationalPattern, forbidden: &[char]) -> char {
    *rp.alphabet()
        .symbols()
        .iter()
        .find(|c| !forbidden.contains(c))
        .expect("alphabet large enough by precondition")
}

/// Per-group single-letter witness words for alphabets of size at least 3:
/// members in each variable block take the smallest letter differing from
/// the last letter of the preceding terminal block and the first letter of
/// the following one (one-sided at the ends); all other groups erase. One
/// word per group, plus the terminal skeleton.
pub fn witness_set_sigma3(rp: &RelationalPattern) -> Result<LabeledSample> {
    rp.expect_kind(RelationKind::Len)?;
    if rp.alphabet().len() < 3 {
        return Err(Error::AlphabetTooSmall { needed: 3 });
    }
    let bd = rp.pattern().block_decomposition();
    let n = bd.n();
    let mut sample = LabeledSample::new();
    sample.insert(bd.skeleton(), true)?;
    for group in rp.groups().ids() {
        let members = rp.groups().get(group)?.members();
        let mut word = Word::empty();
        for (slot, block) in bd.variable_blocks().iter().enumerate() {
            let mut forbidden = Vec::new();
            if slot >= 1 {
                let prev = &bd.terminal_blocks()[slot - 1];
                forbidden.push(prev.letters()[prev.len() - 1]);
            }
            if slot < n {
                forbidden.push(bd.terminal_blocks()[slot].letters()[0]);
            }
            let c = smallest_avoiding(rp, &forbidden);
            for v in block {
                if members.contains(v) {
                    word.push(c);
                }
            }
            if slot < n {
                word.extend(&bd.terminal_blocks()[slot]);
            }
        }
        sample.insert(word, true)?;
    }
    Ok(sample)
}

fn is_unary(block: &Word) -> Option<char> {
    let first = block.letters()[0];
    block.letters().iter().all(|&c| c == first).then_some(first)
}

fn other_letter(rp: &RelationalPattern, c: char) -> char {
    *rp.alphabet()
        .symbols()
        .iter()
        .find(|&&s| s != c)
        .expect("binary alphabet")
}

// Case table for the group's slice of an interior variable block, keyed on
// the flanking terminal blocks: alternating letters between unary blocks of
// different letters, otherwise a run of the letter both flanks avoid (or
// the smallest letter when both flanks are mixed).
fn interior_block_word(rp: &RelationalPattern, prev: &Word, next: &Word, count: usize) -> Word {
    match (is_unary(prev), is_unary(next)) {
        (Some(sigma_bar), Some(sigma)) if sigma_bar != sigma => {
            let mut w = Word::empty();
            for _ in 0..count / 2 {
                w.push(sigma);
                w.push(sigma_bar);
            }
            if count % 2 == 1 {
                w.push(sigma_bar);
            }
            w
        }
        (Some(sigma_bar), Some(_)) | (Some(sigma_bar), None) | (None, Some(sigma_bar)) => {
            let sigma = other_letter(rp, sigma_bar);
            Word::new(std::iter::repeat_n(sigma, count))
        }
        (None, None) => {
            let sigma = rp.alphabet().symbols()[0];
            Word::new(std::iter::repeat_n(sigma, count))
        }
    }
}

fn unambiguous_around(block: &Word, before: &Word, after: &Word) -> bool {
    // block must not re-anchor across either boundary
    let left = before.concat(&block.slice(0, block.len() - 1));
    if left.contains_subword(block) {
        return false;
    }
    let right = block.slice(1, block.len()).concat(after);
    !right.contains_subword(block)
}

/// Per-group unambiguous witness words for binary alphabets over P_2,3
/// patterns: interior slices from the case table, end slices avoiding the
/// adjacent boundary letter. Every output is machine-checked against the
/// unambiguity conditions before inclusion; a failed check is an internal
/// inconsistency, impossible on valid inputs.
pub fn witness_set_binary_congruous(rp: &RelationalPattern) -> Result<LabeledSample> {
    rp.expect_kind(RelationKind::Len)?;
    if rp.alphabet().len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let report = is_p23(rp)?;
    if !report.satisfied {
        return Err(Error::NotP23(format!(
            "{} violation(s), first: {:?}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    let bd = rp.pattern().block_decomposition();
    let n = bd.n();
    let mut sample = LabeledSample::new();
    for group in rp.groups().ids() {
        let members = rp.groups().get(group)?.members();
        let count_in = |slot: usize| {
            bd.variable_blocks()[slot]
                .iter()
                .filter(|v| members.contains(v))
                .count()
        };
        let mut pieces: Vec<Word> = Vec::with_capacity(n + 1);
        for slot in 0..=n {
            let count = count_in(slot);
            let piece = if n == 0 {
                Word::new(std::iter::repeat_n(rp.alphabet().symbols()[0], count))
            } else if slot == 0 {
                let sigma = other_letter(rp, bd.terminal_blocks()[0].letters()[0]);
                Word::new(std::iter::repeat_n(sigma, count))
            } else if slot == n {
                let last = &bd.terminal_blocks()[n - 1];
                let sigma = other_letter(rp, last.letters()[last.len() - 1]);
                Word::new(std::iter::repeat_n(sigma, count))
            } else {
                interior_block_word(
                    rp,
                    &bd.terminal_blocks()[slot - 1],
                    &bd.terminal_blocks()[slot],
                    count,
                )
            };
            pieces.push(piece);
        }
        for (b, block) in bd.terminal_blocks().iter().enumerate() {
            if !unambiguous_around(block, &pieces[b], &pieces[b + 1]) {
                return Err(Error::UnambiguityCheckFailed);
            }
        }
        let mut word = Word::empty();
        for slot in 0..=n {
            word.extend(&pieces[slot]);
            if slot < n {
                word.extend(&bd.terminal_blocks()[slot]);
            }
        }
        sample.insert(word, true)?;
    }
    Ok(sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Equivalent,
    InclusionHolds,
    Refuted,
    Inapplicable,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Equivalent => write!(f, "equivalent"),
            Decision::InclusionHolds => write!(f, "inclusion_holds"),
            Decision::Refuted => write!(f, "refuted"),
            Decision::Inapplicable => write!(f, "inapplicable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Sigma3,
    S2NonErasing,
    BinaryP23Congruous,
    BinaryP23Incongruous,
    Slice { max_len: usize },
}

impl std::fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodUsed::Sigma3 => write!(f, "sigma3"),
            MethodUsed::S2NonErasing => write!(f, "s2-nonerasing"),
            MethodUsed::BinaryP23Congruous => write!(f, "binary-p23-congruous"),
            MethodUsed::BinaryP23Incongruous => write!(f, "binary-p23-incongruous"),
            MethodUsed::Slice { max_len } => write!(f, "slice({max_len})"),
        }
    }
}

/// Outcome of a decider run. Refuting witnesses are membership-verified on
/// both patterns before return; `bounded` marks verdicts resting on a
/// sampled or length-bounded test rather than a theorem-exact one.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub decision: Decision,
    pub method: MethodUsed,
    pub witness: Option<Word>,
    pub passed_sample: Option<LabeledSample>,
    pub bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Sigma3,
    BinaryP23,
    Slice,
}

#[derive(Debug, Clone, Copy)]
pub struct DecideOptions {
    pub erasing: bool,
    pub slice_len: usize,
    pub cap: u64,
    /// Fallback draws when full content enumeration exceeds the cap.
    pub sample_count: u64,
    pub sample_seed: u64,
    /// Also test the bounded-length sample sets in the congruous path.
    pub include_seps: bool,
    pub oracle: OracleConfig,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            erasing: true,
            slice_len: 12,
            cap: DEFAULT_ENUM_CAP,
            sample_count: 512,
            sample_seed: 1,
            include_seps: true,
            oracle: OracleConfig::default(),
        }
    }
}

// Full content when it fits the cap, else seeded draws; the bool reports
// whether the fallback fired.
fn sample_with_fallback<F>(opts: &DecideOptions, generate: F) -> Result<(LabeledSample, bool)>
where
    F: Fn(ContentMode) -> Result<LabeledSample>,
{
    match generate(ContentMode::All) {
        Ok(sample) => Ok((sample, false)),
        Err(Error::GroupTooLarge { .. }) => {
            let sample = generate(ContentMode::Sampled {
                count: opts.sample_count,
                seed: opts.sample_seed,
            })?;
            Ok((sample, true))
        }
        Err(e) => Err(e),
    }
}

// First sample word rejected by `other`, double-checked against `own`.
fn first_rejected(
    sample: &LabeledSample,
    own: &RelationalPattern,
    other: &RelationalPattern,
    erasing: bool,
    guards: &UnifyGuards,
) -> Result<Option<Word>> {
    for w in sample.positives() {
        if !is_member(w, other, erasing, guards)? {
            assert!(
                is_member(w, own, erasing, guards)?,
                "sample word must belong to its own language"
            );
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

fn sigma3_samples(rp: &RelationalPattern, opts: &DecideOptions) -> Result<(LabeledSample, bool)> {
    if opts.erasing {
        let mut sample = witness_set_sigma3(rp)?;
        let (seps, bounded) =
            sample_with_fallback(opts, |mode| gen_seps(rp, 1, mode, true, opts.cap))?;
        sample.merge(&seps)?;
        Ok((sample, bounded))
    } else {
        sample_with_fallback(opts, |mode| gen_s2_nonerasing(rp, mode, opts.cap))
    }
}

fn sigma3_applicable(a: &RelationalPattern, b: &RelationalPattern) -> Option<String> {
    if a.kind() != RelationKind::Len || b.kind() != RelationKind::Len {
        return Some("sigma3 method needs the equal-length relation".into());
    }
    if a.alphabet().len() < 3 {
        return Some("sigma3 method needs an alphabet of at least 3 symbols".into());
    }
    None
}

fn binary_p23_applicable(
    a: &RelationalPattern,
    b: &RelationalPattern,
    erasing: bool,
) -> Result<Option<String>> {
    if a.kind() != RelationKind::Len || b.kind() != RelationKind::Len {
        return Ok(Some(
            "binary-p23 method needs the equal-length relation".into(),
        ));
    }
    if !erasing {
        return Ok(Some("binary-p23 method covers erasing languages only".into()));
    }
    if a.alphabet().len() != 2 {
        return Ok(Some("binary-p23 method needs a binary alphabet".into()));
    }
    for (name, rp) in [("first", a), ("second", b)] {
        if !is_p23(rp)?.satisfied {
            return Ok(Some(format!("{name} pattern is not in P_2,3")));
        }
        if !forbidden_block_shapes(rp, ForbiddenVariant::MinRunTwo)?.is_empty() {
            return Ok(Some(format!(
                "{name} pattern has a forbidden run-then-single terminal block"
            )));
        }
    }
    Ok(None)
}

fn mutual_sample_test(
    a: &RelationalPattern,
    b: &RelationalPattern,
    sample_a: LabeledSample,
    sample_b: LabeledSample,
    method: MethodUsed,
    bounded: bool,
    opts: &DecideOptions,
) -> Result<Verdict> {
    if let Some(w) = first_rejected(&sample_a, a, b, opts.erasing, &opts.oracle.guards)? {
        return Ok(Verdict {
            decision: Decision::Refuted,
            method,
            witness: Some(w),
            passed_sample: None,
            bounded: false,
        });
    }
    if let Some(w) = first_rejected(&sample_b, b, a, opts.erasing, &opts.oracle.guards)? {
        return Ok(Verdict {
            decision: Decision::Refuted,
            method,
            witness: Some(w),
            passed_sample: None,
            bounded: false,
        });
    }
    let mut passed = sample_a;
    passed.merge(&sample_b)?;
    Ok(Verdict {
        decision: Decision::Equivalent,
        method,
        witness: None,
        passed_sample: Some(passed),
        bounded,
    })
}

/// Decides language equivalence by the applicable theorem: mutual
/// sample-membership for alphabets of size three or more, the congruous /
/// incongruous binary paths for P_2,3 patterns without forbidden blocks, or
/// a slice comparison (flagged bounded) otherwise. An explicitly requested
/// method whose premises fail yields `Inapplicable`.
pub fn decide_equiv(
    a: &RelationalPattern,
    b: &RelationalPattern,
    choice: MethodChoice,
    opts: &DecideOptions,
) -> Result<Verdict> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::PreconditionViolated(
            "equivalence needs a shared alphabet".into(),
        ));
    }
    match choice {
        MethodChoice::Sigma3 => {
            if sigma3_applicable(a, b).is_some() {
                return Ok(inapplicable(if opts.erasing {
                    MethodUsed::Sigma3
                } else {
                    MethodUsed::S2NonErasing
                }));
            }
            decide_sigma3(a, b, opts)
        }
        MethodChoice::BinaryP23 => {
            if binary_p23_applicable(a, b, opts.erasing)?.is_some() {
                return Ok(inapplicable(MethodUsed::BinaryP23Congruous));
            }
            decide_binary_p23(a, b, opts)
        }
        MethodChoice::Slice => decide_slice(a, b, opts),
        MethodChoice::Auto => {
            if a.kind() == RelationKind::Len && b.kind() == RelationKind::Len {
                if sigma3_applicable(a, b).is_none() {
                    return decide_sigma3(a, b, opts);
                }
                if binary_p23_applicable(a, b, opts.erasing)?.is_none() {
                    return decide_binary_p23(a, b, opts);
                }
            }
            decide_slice(a, b, opts)
        }
    }
}

fn inapplicable(method: MethodUsed) -> Verdict {
    Verdict {
        decision: Decision::Inapplicable,
        method,
        witness: None,
        passed_sample: None,
        bounded: false,
    }
}

fn decide_sigma3(
    a: &RelationalPattern,
    b: &RelationalPattern,
    opts: &DecideOptions,
) -> Result<Verdict> {
    let (sample_a, bounded_a) = sigma3_samples(a, opts)?;
    let (sample_b, bounded_b) = sigma3_samples(b, opts)?;
    let method = if opts.erasing {
        MethodUsed::Sigma3
    } else {
        MethodUsed::S2NonErasing
    };
    mutual_sample_test(a, b, sample_a, sample_b, method, bounded_a || bounded_b, opts)
}

fn decide_binary_p23(
    a: &RelationalPattern,
    b: &RelationalPattern,
    opts: &DecideOptions,
) -> Result<Verdict> {
    if are_congruous(a.pattern(), b.pattern()) {
        let forward = decide_inclusion_congruous(a, b, opts)?;
        if forward.decision == Decision::Refuted {
            return Ok(Verdict {
                method: MethodUsed::BinaryP23Congruous,
                ..forward
            });
        }
        let backward = decide_inclusion_congruous(b, a, opts)?;
        if backward.decision == Decision::Refuted {
            return Ok(Verdict {
                method: MethodUsed::BinaryP23Congruous,
                ..backward
            });
        }
        let mut passed = forward.passed_sample.unwrap_or_default();
        if let Some(s) = backward.passed_sample {
            passed.merge(&s)?;
        }
        Ok(Verdict {
            decision: Decision::Equivalent,
            method: MethodUsed::BinaryP23Congruous,
            witness: None,
            passed_sample: Some(passed),
            bounded: forward.bounded || backward.bounded,
        })
    } else {
        let (sample_a, bounded_a) =
            sample_with_fallback(opts, |mode| gen_seps(a, 2, mode, true, opts.cap))?;
        let (sample_b, bounded_b) =
            sample_with_fallback(opts, |mode| gen_seps(b, 2, mode, true, opts.cap))?;
        mutual_sample_test(
            a,
            b,
            sample_a,
            sample_b,
            MethodUsed::BinaryP23Incongruous,
            bounded_a || bounded_b,
            opts,
        )
    }
}

fn decide_slice(
    a: &RelationalPattern,
    b: &RelationalPattern,
    opts: &DecideOptions,
) -> Result<Verdict> {
    let verdict = slice_compare(a, b, opts.slice_len, opts.erasing, &opts.oracle)?;
    let method = MethodUsed::Slice {
        max_len: opts.slice_len,
    };
    match verdict.relation {
        SliceRelation::Equal => Ok(Verdict {
            decision: Decision::Equivalent,
            method,
            witness: None,
            passed_sample: None,
            bounded: true,
        }),
        _ => Ok(Verdict {
            decision: Decision::Refuted,
            method,
            witness: verdict.only_in_a.or(verdict.only_in_b),
            passed_sample: None,
            bounded: false,
        }),
    }
}

/// Inclusion test for congruous binary patterns with the first in P_2,3:
/// every per-group witness word of the first pattern (plus its
/// bounded-length sample when enumerable) must belong to the second
/// language. Passing certifies inclusion of the full languages.
pub fn decide_inclusion_congruous(
    a: &RelationalPattern,
    b: &RelationalPattern,
    opts: &DecideOptions,
) -> Result<Verdict> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::PreconditionViolated(
            "inclusion needs a shared alphabet".into(),
        ));
    }
    if a.alphabet().len() != 2 {
        return Err(Error::PreconditionViolated(
            "congruous inclusion needs a binary alphabet".into(),
        ));
    }
    if a.kind() != RelationKind::Len || b.kind() != RelationKind::Len {
        return Err(Error::PreconditionViolated(
            "congruous inclusion needs the equal-length relation".into(),
        ));
    }
    if !opts.erasing {
        return Err(Error::PreconditionViolated(
            "congruous inclusion covers erasing languages only".into(),
        ));
    }
    if !are_congruous(a.pattern(), b.pattern()) {
        return Err(Error::PreconditionViolated(
            "patterns are incongruous".into(),
        ));
    }
    if !is_p23(a)?.satisfied {
        return Err(Error::PreconditionViolated(
            "first pattern is not in P_2,3".into(),
        ));
    }
    let mut sample = witness_set_binary_congruous(a)?;
    if opts.include_seps {
        // extra refutation power; the positive direction never needs it
        if let Ok(seps) = gen_seps(a, 1, ContentMode::All, true, opts.cap) {
            sample.merge(&seps)?;
        }
    }
    let method = MethodUsed::BinaryP23Congruous;
    if let Some(w) = first_rejected(&sample, a, b, true, &opts.oracle.guards)? {
        return Ok(Verdict {
            decision: Decision::Refuted,
            method,
            witness: Some(w),
            passed_sample: None,
            bounded: false,
        });
    }
    Ok(Verdict {
        decision: Decision::InclusionHolds,
        method,
        witness: None,
        passed_sample: Some(sample),
        bounded: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathHint {
    CongruousTheorem,
    IncongruousSampleTest,
    SliceFallback,
}

/// Structural diagnosis of a pattern pair: congruity, widened forbidden
/// blocks, conjugate sub-patterns in both directions, and whether the
/// incongruous sample test is justified.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub congruous: bool,
    pub forbidden_in_a: Vec<ForbiddenBlock>,
    pub forbidden_in_b: Vec<ForbiddenBlock>,
    pub conjugates_a_b: Option<TelltaleConjugatePair>,
    pub conjugates_b_a: Option<TelltaleConjugatePair>,
    pub incongruous_test_applicable: bool,
    pub hint: PathHint,
}

pub fn classify_incongruous_pair(
    a: &RelationalPattern,
    b: &RelationalPattern,
) -> Result<PairClassification> {
    if a.alphabet().len() != 2 || b.alphabet().len() != 2 {
        return Err(Error::NonBinaryAlphabet);
    }
    let congruous = are_congruous(a.pattern(), b.pattern());
    let forbidden_in_a = forbidden_block_shapes(a, ForbiddenVariant::AnyRun)?;
    let forbidden_in_b = forbidden_block_shapes(b, ForbiddenVariant::AnyRun)?;
    let conjugates_a_b = find_telltale_conjugates(a.alphabet(), a.pattern(), b.pattern())?;
    let conjugates_b_a = find_telltale_conjugates(a.alphabet(), b.pattern(), a.pattern())?;
    let incongruous_test_applicable = !congruous && forbidden_in_a.is_empty();
    let hint = if congruous {
        PathHint::CongruousTheorem
    } else if incongruous_test_applicable {
        PathHint::IncongruousSampleTest
    } else {
        PathHint::SliceFallback
    };
    Ok(PairClassification {
        congruous,
        forbidden_in_a,
        forbidden_in_b,
        conjugates_a_b,
        conjugates_b_a,
        incongruous_test_applicable,
        hint,
    })
}

/// Builds positive characteristic sets from telltales: C_i keeps its
/// telltale (verified against its own language) and, for every earlier
/// language the oracle says L_i is not included in, the shortlex-first word
/// of L_i outside it within the search bound. Fails loudly if the oracle
/// asserts non-inclusion but no separating word exists within the bound.
pub fn charset_from_telltales<F>(
    family: &[RelationalPattern],
    telltales: &[Vec<Word>],
    mut includes: F,
    search_len: usize,
    erasing: bool,
    guards: &UnifyGuards,
) -> Result<Vec<LabeledSample>>
where
    F: FnMut(&RelationalPattern, &RelationalPattern) -> Result<bool>,
{
    if family.len() != telltales.len() {
        return Err(Error::DimensionMismatch);
    }
    let mut out = Vec::with_capacity(family.len());
    for (i, rp) in family.iter().enumerate() {
        let mut sample = LabeledSample::new();
        for w in &telltales[i] {
            if !is_member(w, rp, erasing, guards)? {
                return Err(Error::NotAMember(w.to_string()));
            }
            sample.insert(w.clone(), true)?;
        }
        for other in family.iter().take(i) {
            if includes(rp, other)? {
                continue;
            }
            let witness = shortlex_separator(rp, other, search_len, erasing, guards)?
                .ok_or(Error::WitnessNotFoundWithinBound)?;
            sample.insert(witness, true)?;
        }
        out.push(sample);
    }
    Ok(out)
}

// shortlex-first word in L(a) \ L(b) with length <= bound
fn shortlex_separator(
    a: &RelationalPattern,
    b: &RelationalPattern,
    bound: usize,
    erasing: bool,
    guards: &UnifyGuards,
) -> Result<Option<Word>> {
    let symbols = a.alphabet().symbols();
    let m = symbols.len() as u64;
    for len in 0..=bound {
        let count = m.pow(len as u32);
        for idx in 0..count {
            let mut rem = idx;
            let mut letters = vec![symbols[0]; len];
            for slot in (0..len).rev() {
                letters[slot] = symbols[(rem % m) as usize];
                rem /= m;
            }
            let w = Word::new(letters);
            if is_member(&w, a, erasing, guards)? && !is_member(&w, b, erasing, guards)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Label-stripped projections; every sample must be positive-only.
pub fn telltales_from_charsets(samples: &[LabeledSample]) -> Result<Vec<Vec<Word>>> {
    samples
        .iter()
        .map(|s| {
            if !s.is_positive_only() {
                return Err(Error::NegativeLabelPresent);
            }
            Ok(s.positives().cloned().collect())
        })
        .collect()
}

/// Outcome of checking a candidate family against the characteristic-set or
/// telltale conditions.
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    /// Every set is consistent with its own language.
    pub consistent: bool,
    /// The cross-condition over distinct languages.
    pub condition2: bool,
    pub failures: Vec<String>,
}

impl FamilyCheck {
    pub fn ok(&self) -> bool {
        self.consistent && self.condition2
    }
}

/// Checks both characteristic-set conditions on a finite family:
/// per-language consistency, and for distinct languages never both
/// cross-consistencies. `distinct(i, j)` decides language inequality.
pub fn check_characteristic_family<F>(
    family: &[RelationalPattern],
    samples: &[LabeledSample],
    erasing: bool,
    guards: &UnifyGuards,
    mut distinct: F,
) -> Result<FamilyCheck>
where
    F: FnMut(usize, usize) -> Result<bool>,
{
    if family.len() != samples.len() {
        return Err(Error::DimensionMismatch);
    }
    let consistent_with = |sample: &LabeledSample, rp: &RelationalPattern| -> Result<bool> {
        for (w, label) in sample.entries() {
            if is_member(w, rp, erasing, guards)? != label {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut failures = Vec::new();
    let mut consistent = true;
    for (i, rp) in family.iter().enumerate() {
        if !consistent_with(&samples[i], rp)? {
            consistent = false;
            failures.push(format!("sample {i} is inconsistent with its own language"));
        }
    }
    let mut condition2 = true;
    for i in 0..family.len() {
        for j in 0..family.len() {
            if i == j || !distinct(i, j)? {
                continue;
            }
            if consistent_with(&samples[i], &family[j])?
                && consistent_with(&samples[j], &family[i])?
            {
                condition2 = false;
                failures.push(format!(
                    "samples {i} and {j} are cross-consistent on distinct languages"
                ));
            }
        }
    }
    Ok(FamilyCheck {
        consistent,
        condition2,
        failures,
    })
}

/// Checks the telltale conditions: T_i inside L_i, and whenever T_i fits
/// inside a distinct L_j, L_j is not strictly inside L_i. `subset(i, j)`
/// decides language inclusion.
pub fn check_telltale_family<F, G>(
    family: &[RelationalPattern],
    telltales: &[Vec<Word>],
    erasing: bool,
    guards: &UnifyGuards,
    mut distinct: F,
    mut subset: G,
) -> Result<FamilyCheck>
where
    F: FnMut(usize, usize) -> Result<bool>,
    G: FnMut(usize, usize) -> Result<bool>,
{
    if family.len() != telltales.len() {
        return Err(Error::DimensionMismatch);
    }
    let mut failures = Vec::new();
    let mut consistent = true;
    for (i, rp) in family.iter().enumerate() {
        for w in &telltales[i] {
            if !is_member(w, rp, erasing, guards)? {
                consistent = false;
                failures.push(format!("telltale {i} leaves its language"));
            }
        }
    }
    let mut condition2 = true;
    for i in 0..family.len() {
        'inner: for j in 0..family.len() {
            if i == j || !distinct(i, j)? {
                continue;
            }
            for w in &telltales[i] {
                if !is_member(w, &family[j], erasing, guards)? {
                    continue 'inner;
                }
            }
            if subset(j, i)? {
                condition2 = false;
                failures.push(format!(
                    "telltale {i} fits inside the strictly smaller language {j}"
                ));
            }
        }
    }
    Ok(FamilyCheck {
        consistent,
        condition2,
        failures,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::member::member_len;
    use crate::member::tests::{fixture_235, fixture_25};
    use crate::pattern::{Alphabet, Pattern, PatternItem, Relation, Var};

    fn word(s: &str) -> Word {
        Word::from_str_unchecked(s)
    }

    pub(crate) fn build(
        alphabet: &Alphabet,
        tokens: &[&str],
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
        let r = Relation::new(
            RelationKind::Len,
            pairs.iter().map(|(x, y)| (Var::new(*x), Var::new(*y))),
        );
        RelationalPattern::new(alphabet.clone(), p, r).unwrap()
    }

    #[test]
    fn gen_seps_on_two_variable_group() {
        let rp = build(&Alphabet::binary(), &["x", "aaa", "y"], &[("x", "y")]);
        let sample = gen_seps(&rp, 1, ContentMode::All, true, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(sample.len(), 5);
        assert!(sample.contains(&word("aaa")));
        for w in sample.positives() {
            assert!(member_len(w, &rp, true).unwrap().is_some());
        }
    }

    #[test]
    fn s2_words_belong_to_their_own_language() {
        let rp = fixture_235();
        let sample = gen_s2_nonerasing(
            &rp,
            ContentMode::Sampled { count: 60, seed: 4 },
            DEFAULT_ENUM_CAP,
        )
        .unwrap();
        for w in sample.positives() {
            assert!(member_len(w, &rp, false).unwrap().is_some());
        }
    }

    #[test]
    fn sigma3_witness_example() {
        let alpha = Alphabet::new(['a', 'b', 'c']).unwrap();
        let rp = build(&alpha, &["x1", "ab", "x2"], &[("x1", "x2")]);
        let sample = witness_set_sigma3(&rp).unwrap();
        let words: Vec<String> = sample.positives().map(|w| w.to_string()).collect();
        // skeleton plus exactly one witness word; letters avoid the boundary
        // letters, lexicographic tie-break: b ab a
        assert_eq!(words, vec!["ab", "baba"]);
    }

    #[test]
    fn sigma3_witness_terminal_free_single_group() {
        let alpha = Alphabet::new(['a', 'b', 'c']).unwrap();
        let rp = build(&alpha, &["x1", "x2"], &[("x1", "x2")]);
        let sample = witness_set_sigma3(&rp).unwrap();
        let words: Vec<String> = sample.positives().map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["", "aa"]);
    }

    #[test]
    fn sigma3_witness_size_is_groups_plus_one() {
        let alpha = Alphabet::new(['a', 'b', 'c']).unwrap();
        let rp = build(&alpha, &["x1", "abc", "x2", "ca", "x3"], &[("x1", "x2")]);
        let sample = witness_set_sigma3(&rp).unwrap();
        assert_eq!(sample.len(), rp.groups().len() + 1);
        for w in sample.positives() {
            assert!(member_len(w, &rp, true).unwrap().is_some());
        }
    }

    #[test]
    fn binary_congruous_witness_case_table() {
        // one group of all six variables: s1 = bb, s2 = ba, s3 = aa
        let rp = build(
            &Alphabet::binary(),
            &["x1", "x2", "aaa", "x3", "x4", "bbb", "x5", "x6"],
            &[
                ("x1", "x2"),
                ("x1", "x3"),
                ("x1", "x4"),
                ("x1", "x5"),
                ("x1", "x6"),
            ],
        );
        let sample = witness_set_binary_congruous(&rp).unwrap();
        let words: Vec<String> = sample.positives().map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["bbaaababbbaa"]);
        for w in sample.positives() {
            assert!(member_len(w, &rp, true).unwrap().is_some());
        }
    }

    #[test]
    fn binary_congruous_witness_odd_interior() {
        // interior slice of 3 between unary blocks of different letters:
        // (sigma sigma')^1 sigma' with sigma = next block's letter
        let rp = build(
            &Alphabet::binary(),
            &["x1", "aaa", "x2", "x3", "x4", "bbb", "x5"],
            &[("x1", "x2"), ("x1", "x3"), ("x1", "x4"), ("x1", "x5")],
        );
        let sample = witness_set_binary_congruous(&rp).unwrap();
        let words: Vec<String> = sample.positives().map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["baaabaabbba"]);
    }

    #[test]
    fn binary_congruous_mixed_blocks_tiebreak() {
        let rp = build(
            &Alphabet::binary(),
            &["x1", "x2", "aab", "x3", "x4"],
            &[("x1", "x2"), ("x1", "x3"), ("x1", "x4")],
        );
        let sample = witness_set_binary_congruous(&rp).unwrap();
        let words: Vec<String> = sample.positives().map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["bbaabaa"]);
    }

    #[test]
    fn p23_violation_is_reported() {
        let rp = build(&Alphabet::binary(), &["x1", "a", "x2"], &[("x1", "x2")]);
        assert!(matches!(
            witness_set_binary_congruous(&rp).unwrap_err(),
            Error::NotP23(_)
        ));
    }

    #[test]
    fn decide_equiv_self_is_equivalent() {
        let rp = fixture_235();
        let v = decide_equiv(&rp, &rp, MethodChoice::Auto, &DecideOptions::default()).unwrap();
        assert_eq!(v.decision, Decision::Equivalent);
    }

    #[test]
    fn sigma3_equivalent_pair_with_matching_gap_cones() {
        let alpha = Alphabet::new(['a', 'b', 'c']).unwrap();
        let p = build(&alpha, &["x1", "a", "x2"], &[("x1", "x2")]);
        let q = build(
            &alpha,
            &["y1", "y2", "a", "y3", "y4"],
            &[("y1", "y3"), ("y2", "y4")],
        );
        let opts = DecideOptions::default();
        let v = decide_equiv(&p, &q, MethodChoice::Sigma3, &opts).unwrap();
        assert_eq!(v.decision, Decision::Equivalent);
        assert!(!v.bounded);
        let slice = slice_compare(&p, &q, 8, true, &opts.oracle).unwrap();
        assert_eq!(slice.relation, SliceRelation::Equal);
    }

    #[test]
    fn slice_refutation_finds_first_separating_word() {
        let p = fixture_235();
        let q = fixture_25();
        let opts = DecideOptions {
            erasing: false,
            slice_len: 20,
            ..DecideOptions::default()
        };
        let v = decide_equiv(&p, &q, MethodChoice::Slice, &opts).unwrap();
        assert_eq!(v.decision, Decision::Refuted);
        assert_eq!(v.witness.unwrap(), word("aaabaaaaaaaaaabaaaaa"));
    }

    /// One group of (2,4,2) against its split into two (1,2,1) halves: the
    /// split cone contains the original, not conversely.
    fn refinement_pair() -> (RelationalPattern, RelationalPattern) {
        let tokens = [
            "u1", "u2", "aaa", "v1", "v2", "v3", "v4", "bbb", "w1", "w2",
        ];
        let one_group = build(
            &Alphabet::binary(),
            &tokens,
            &[
                ("u1", "u2"),
                ("u1", "v1"),
                ("u1", "v2"),
                ("u1", "v3"),
                ("u1", "v4"),
                ("u1", "w1"),
                ("u1", "w2"),
            ],
        );
        let split = build(
            &Alphabet::binary(),
            &tokens,
            &[
                ("u1", "v1"),
                ("v1", "v2"),
                ("v2", "w1"),
                ("u2", "v3"),
                ("v3", "v4"),
                ("v4", "w2"),
            ],
        );
        (one_group, split)
    }

    #[test]
    fn inclusion_by_group_refinement() {
        let (coarse, fine) = refinement_pair();
        let opts = DecideOptions::default();
        let v = decide_inclusion_congruous(&coarse, &fine, &opts).unwrap();
        assert_eq!(v.decision, Decision::InclusionHolds);
        assert!(!v.bounded);
        // slice oracle confirms the subset
        let slice = slice_compare(&coarse, &fine, 10, true, &opts.oracle).unwrap();
        assert!(matches!(
            slice.relation,
            SliceRelation::Subset | SliceRelation::Equal
        ));

        // the reverse direction is refuted with a verified witness
        let v = decide_inclusion_congruous(&fine, &coarse, &opts).unwrap();
        assert_eq!(v.decision, Decision::Refuted);
        let w = v.witness.unwrap();
        assert!(member_len(&w, &fine, true).unwrap().is_some());
        assert!(member_len(&w, &coarse, true).unwrap().is_none());
    }

    #[test]
    fn inclusion_preconditions_are_errors() {
        let (coarse, _) = refinement_pair();
        let incongruous = build(
            &Alphabet::binary(),
            &["z1", "z2", "aaa", "z3", "z4"],
            &[("z1", "z2"), ("z1", "z3"), ("z1", "z4")],
        );
        assert!(matches!(
            decide_inclusion_congruous(&coarse, &incongruous, &DecideOptions::default()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn equiv_binary_p23_congruous_path() {
        let (coarse, fine) = refinement_pair();
        let opts = DecideOptions::default();
        let v = decide_equiv(&coarse, &fine, MethodChoice::BinaryP23, &opts).unwrap();
        // inclusion holds one way only, so equivalence is refuted
        assert_eq!(v.decision, Decision::Refuted);
        assert_eq!(v.method, MethodUsed::BinaryP23Congruous);
        let v = decide_equiv(&coarse, &coarse, MethodChoice::BinaryP23, &opts).unwrap();
        assert_eq!(v.decision, Decision::Equivalent);
    }

    #[test]
    fn explicit_method_with_failed_premises_is_inapplicable() {
        let p = fixture_235(); // binary alphabet, has "ab" blocks
        let v = decide_equiv(&p, &p, MethodChoice::Sigma3, &DecideOptions::default()).unwrap();
        assert_eq!(v.decision, Decision::Inapplicable);
        let v = decide_equiv(&p, &p, MethodChoice::BinaryP23, &DecideOptions::default()).unwrap();
        assert_eq!(v.decision, Decision::Inapplicable);
    }

    #[test]
    fn classification_of_the_incongruous_fixture_pair() {
        let report = classify_incongruous_pair(&fixture_235(), &fixture_25()).unwrap();
        assert!(!report.congruous);
        // "ab" blocks are forbidden in the widened sense
        assert!(!report.forbidden_in_a.is_empty());
        assert!(!report.incongruous_test_applicable);
        assert_eq!(report.hint, PathHint::SliceFallback);
    }

    #[test]
    fn classification_of_identical_patterns() {
        let (coarse, _) = refinement_pair();
        let report = classify_incongruous_pair(&coarse, &coarse).unwrap();
        assert!(report.congruous);
        assert_eq!(report.hint, PathHint::CongruousTheorem);
        assert!(report.forbidden_in_a.is_empty());
        assert!(report.conjugates_a_b.is_none());
    }

    #[test]
    fn telltale_projection_round_trip() {
        let sample = LabeledSample::from_positive([word("aaa")]);
        let projected = telltales_from_charsets(&[sample]).unwrap();
        assert_eq!(projected, vec![vec![word("aaa")]]);
        assert_eq!(
            telltales_from_charsets(&[LabeledSample::new()]).unwrap(),
            vec![Vec::<Word>::new()]
        );
        let mut negative = LabeledSample::new();
        negative.insert(word("b"), false).unwrap();
        assert_eq!(
            telltales_from_charsets(&[negative]).unwrap_err(),
            Error::NegativeLabelPresent
        );
    }

    #[test]
    fn charset_from_single_language_keeps_only_the_telltale() {
        let rp = build(&Alphabet::binary(), &["x", "aaa", "y"], &[("x", "y")]);
        let guards = UnifyGuards::default();
        let sets = charset_from_telltales(
            &[rp],
            &[vec![word("aaa")]],
            |_, _| Ok(true),
            8,
            true,
            &guards,
        )
        .unwrap();
        assert_eq!(sets[0].len(), 1);
    }
}
