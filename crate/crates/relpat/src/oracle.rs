//! Brute-force language-slice oracles. Candidate words are swept through the
//! membership deciders — in parallel when the `parallel` feature is on — and
//! results come back as deterministic shortlex-sorted sets.

use crate::error::{Error, Result};
use crate::member::{is_member, UnifyGuards};
use crate::pattern::{RelationalPattern, Word};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Budget on the candidate space: |alphabet|^max_len may not exceed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_candidates: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_candidates: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleConfig {
    pub budget: OracleBudget,
    pub guards: UnifyGuards,
}

fn check_budget(rp: &RelationalPattern, max_len: usize, budget: &OracleBudget) -> Result<()> {
    let m = rp.alphabet().len() as u128;
    let required = m.checked_pow(max_len as u32).unwrap_or(u128::MAX);
    if required > u128::from(budget.max_candidates) {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget.max_candidates,
        });
    }
    Ok(())
}

fn decode(alphabet: &[char], mut idx: u64, len: usize) -> Word {
    let m = alphabet.len() as u64;
    let mut letters = vec![alphabet[0]; len];
    for slot in (0..len).rev() {
        letters[slot] = alphabet[(idx % m) as usize];
        idx /= m;
    }
    Word::new(letters)
}

// Sweeps every word of length <= max_len in shortlex order through `test`,
// keeping those accepted. Order of the result is shortlex because the
// enumeration is and the (indexed) collection preserves it.
#[cfg(feature = "parallel")]
fn sweep<F>(rp: &RelationalPattern, max_len: usize, test: F) -> Result<Vec<Word>>
where
    F: Fn(&Word) -> Result<bool> + Sync,
{
    let alphabet = rp.alphabet().symbols();
    let mut out = Vec::new();
    for len in 0..=max_len {
        let count = (alphabet.len() as u64).pow(len as u32);
        let hits: Vec<Option<Word>> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let w = decode(alphabet, idx, len);
                Ok(test(&w)?.then_some(w))
            })
            .collect::<Result<_>>()?;
        out.extend(hits.into_iter().flatten());
    }
    Ok(out)
}

#[cfg(not(feature = "parallel"))]
fn sweep<F>(rp: &RelationalPattern, max_len: usize, test: F) -> Result<Vec<Word>>
where
    F: Fn(&Word) -> Result<bool> + Sync,
{
    sweep_sequential(rp, max_len, test)
}

fn sweep_sequential<F>(rp: &RelationalPattern, max_len: usize, test: F) -> Result<Vec<Word>>
where
    F: Fn(&Word) -> Result<bool> + Sync,
{
    let alphabet = rp.alphabet().symbols();
    let mut out = Vec::new();
    for len in 0..=max_len {
        let count = (alphabet.len() as u64).pow(len as u32);
        for idx in 0..count {
            let w = decode(alphabet, idx, len);
            if test(&w)? {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Exactly the members of length <= max_len, shortlex-sorted.
pub fn lang_upto(
    rp: &RelationalPattern,
    max_len: usize,
    erasing: bool,
    cfg: &OracleConfig,
) -> Result<Vec<Word>> {
    check_budget(rp, max_len, &cfg.budget)?;
    let words = sweep(rp, max_len, |w| is_member(w, rp, erasing, &cfg.guards))?;
    debug_assert!(words.windows(2).all(|p| p[0] < p[1]));
    Ok(words)
}

/// Sequential twin of [`lang_upto`]; the fallback path and the benchmark
/// baseline.
pub fn lang_upto_sequential(
    rp: &RelationalPattern,
    max_len: usize,
    erasing: bool,
    cfg: &OracleConfig,
) -> Result<Vec<Word>> {
    check_budget(rp, max_len, &cfg.budget)?;
    sweep_sequential(rp, max_len, |w| is_member(w, rp, erasing, &cfg.guards))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceRelation {
    Equal,
    /// First language strictly inside the second, on this slice.
    Subset,
    Superset,
    Incomparable,
}

/// Outcome of comparing two languages restricted to words of length <= bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceVerdict {
    pub relation: SliceRelation,
    /// Shortlex-first word in A but not B, if any.
    pub only_in_a: Option<Word>,
    pub only_in_b: Option<Word>,
    pub bound: usize,
}

/// Compares the two slices with verified counterexamples. Both patterns must
/// share an alphabet.
pub fn slice_compare(
    rp_a: &RelationalPattern,
    rp_b: &RelationalPattern,
    max_len: usize,
    erasing: bool,
    cfg: &OracleConfig,
) -> Result<SliceVerdict> {
    if rp_a.alphabet() != rp_b.alphabet() {
        return Err(Error::PreconditionViolated(
            "slice comparison needs a shared alphabet".into(),
        ));
    }
    check_budget(rp_a, max_len, &cfg.budget)?;
    let in_a = sweep(rp_a, max_len, |w| is_member(w, rp_a, erasing, &cfg.guards))?;
    let in_b = sweep(rp_b, max_len, |w| is_member(w, rp_b, erasing, &cfg.guards))?;
    let set_b: std::collections::BTreeSet<&Word> = in_b.iter().collect();
    let set_a: std::collections::BTreeSet<&Word> = in_a.iter().collect();
    let only_in_a = in_a.iter().find(|w| !set_b.contains(w)).cloned();
    let only_in_b = in_b.iter().find(|w| !set_a.contains(w)).cloned();
    if let Some(w) = &only_in_a {
        assert!(is_member(w, rp_a, erasing, &cfg.guards)?);
        assert!(!is_member(w, rp_b, erasing, &cfg.guards)?);
    }
    if let Some(w) = &only_in_b {
        assert!(is_member(w, rp_b, erasing, &cfg.guards)?);
        assert!(!is_member(w, rp_a, erasing, &cfg.guards)?);
    }
    let relation = match (&only_in_a, &only_in_b) {
        (None, None) => SliceRelation::Equal,
        (None, Some(_)) => SliceRelation::Subset,
        (Some(_), None) => SliceRelation::Superset,
        (Some(_), Some(_)) => SliceRelation::Incomparable,
    };
    Ok(SliceVerdict {
        relation,
        only_in_a,
        only_in_b,
        bound: max_len,
    })
}
