//! Consistency solver for the sentence scheme where each sentence claims
//! that every later sentence is untrue.
//!
//! A finite truncation reads "every later" over the existing sentences only
//! and is satisfiable in exactly one way; the ultimately periodic infinite
//! scheme admits no consistent assignment at all. The contrast is the point.

use serde::Serialize;
use thiserror::Error;

/// Largest finite sequence length the solver enumerates (2^N candidates).
pub const MAX_FINITE: usize = 20;
/// Largest prefix + loop total for the periodic search.
pub const MAX_PERIODIC: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum YabloError {
    #[error("finite sequence length must be between 1 and {MAX_FINITE}, got {0}")]
    FiniteOutOfRange(usize),
    #[error("loop length must be at least 1")]
    ZeroLoop,
    #[error("prefix_len + loop_len must be at most {MAX_PERIODIC}, got {0}")]
    PeriodicTooLong(usize),
}

/// Truth values for the sentences: a finite prefix and an optional repeating
/// tail. An empty `cycle` means a plain finite sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub prefix: Vec<bool>,
    pub cycle: Vec<bool>,
}

fn bits(candidate: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| candidate >> i & 1 == 1).collect()
}

/// All consistent truth assignments for the first `n` sentences, where
/// sentence `i` claims every later stored sentence is untrue. Exactly one
/// exists: everything false except the last sentence.
pub fn finite_yablo(n: usize) -> Result<Vec<Assignment>, YabloError> {
    if n == 0 || n > MAX_FINITE {
        return Err(YabloError::FiniteOutOfRange(n));
    }
    let mut consistent = Vec::new();
    for candidate in 0u64..(1 << n) {
        let values = bits(candidate, n);
        let ok = (0..n).all(|i| {
            let later_all_false = values[i + 1..].iter().all(|&v| !v);
            values[i] == later_all_false
        });
        if ok {
            consistent.push(Assignment {
                prefix: values,
                cycle: Vec::new(),
            });
        }
    }
    Ok(consistent)
}

/// Whether an ultimately periodic assignment satisfies every sentence of the
/// infinite scheme. Instants at or beyond the prefix see every loop value
/// again later, including their own.
fn periodic_consistent(values: &[bool], prefix_len: usize) -> bool {
    let loop_all_false = values[prefix_len..].iter().all(|&v| !v);
    (0..values.len()).all(|i| {
        let later_all_false = if i < prefix_len {
            values[i + 1..].iter().all(|&v| !v)
        } else {
            loop_all_false
        };
        values[i] == later_all_false
    })
}

/// Searches every ultimately periodic assignment of the given shape for one
/// consistent with the infinite scheme. None exists for any shape: a true
/// loop value refutes itself, and an all-false loop makes its own sentences
/// true.
pub fn periodic_yablo(
    prefix_len: usize,
    loop_len: usize,
) -> Result<Option<Assignment>, YabloError> {
    if loop_len == 0 {
        return Err(YabloError::ZeroLoop);
    }
    let total = prefix_len + loop_len;
    if total > MAX_PERIODIC {
        return Err(YabloError::PeriodicTooLong(total));
    }
    for candidate in 0u64..(1 << total) {
        let values = bits(candidate, total);
        if periodic_consistent(&values, prefix_len) {
            return Ok(Some(Assignment {
                prefix: values[..prefix_len].to_vec(),
                cycle: values[prefix_len..].to_vec(),
            }));
        }
    }
    Ok(None)
}
