//! Exhaustive nonnegative integer-combination feasibility, the arithmetic
//! core of equal-length membership and normal-form elimination.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinationMode {
    Nonnegative,
    /// Every coefficient at least 1.
    StrictlyPositive,
}

/// Coefficients aligned with the generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    pub coefficients: Vec<u64>,
}

/// Finds coefficients c with sum(c_g * gen_g) = target, or None. The search
/// is exhaustive: each coefficient ranges up to the smallest quotient
/// target[j] / gen_g[j] over coordinates where gen_g is positive, recomputed
/// against the remaining target, and the first (lexicographically smallest)
/// solution is returned.
pub fn nonneg_combination(
    target: &[u64],
    generators: &[Vec<u64>],
    mode: CombinationMode,
) -> Result<Option<CoefficientVector>> {
    for g in generators {
        if g.len() != target.len() {
            return Err(Error::DimensionMismatch);
        }
        if g.iter().all(|&x| x == 0) {
            return Err(Error::ZeroGenerator);
        }
    }
    let mut remaining: Vec<u64> = target.to_vec();
    let mut coeffs: Vec<u64> = Vec::with_capacity(generators.len());
    if search(&mut remaining, generators, mode, &mut coeffs) {
        Ok(Some(CoefficientVector {
            coefficients: coeffs,
        }))
    } else {
        Ok(None)
    }
}

fn search(
    remaining: &mut Vec<u64>,
    generators: &[Vec<u64>],
    mode: CombinationMode,
    coeffs: &mut Vec<u64>,
) -> bool {
    let level = coeffs.len();
    if level == generators.len() {
        return remaining.iter().all(|&x| x == 0);
    }
    let gen = &generators[level];
    let upper = gen
        .iter()
        .zip(remaining.iter())
        .filter(|(&g, _)| g > 0)
        .map(|(&g, &r)| r / g)
        .min()
        .unwrap_or(0);
    let lower = match mode {
        CombinationMode::Nonnegative => 0,
        CombinationMode::StrictlyPositive => 1,
    };
    if lower > upper {
        return false;
    }
    for c in lower..=upper {
        for (r, &g) in remaining.iter_mut().zip(gen.iter()) {
            *r -= c * g;
        }
        coeffs.push(c);
        if search(remaining, generators, mode, coeffs) {
            return true;
        }
        coeffs.pop();
        for (r, &g) in remaining.iter_mut().zip(gen.iter()) {
            *r += c * g;
        }
    }
    false
}
