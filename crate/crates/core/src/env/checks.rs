use serde::Serialize;

use super::{exact_table, Environment};
use crate::arms::ArmSet;
use crate::error::Result;

/// A triple `A ⊆ B`, `x ∉ B` with `E f(A+x) - E f(A) < E f(B+x) - E f(B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubmodularViolation {
    pub a: ArmSet,
    pub b: ArmSet,
    pub x: usize,
    pub gain_a: f64,
    pub gain_b: f64,
}

/// A pair `A ⊆ B` with `E f(A) > E f(B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub a: ArmSet,
    pub b: ArmSet,
    pub value_a: f64,
    pub value_b: f64,
}

/// Every diminishing-returns violation of the expected value, beyond `tol`.
/// An empty result means the environment is submodular in expectation.
pub fn check_submodular_in_expectation<E: Environment + ?Sized>(
    env: &E,
    tol: f64,
) -> Result<Vec<SubmodularViolation>> {
    let table = exact_table(env)?;
    let ground = env.ground();
    let mut out = Vec::new();
    for b in ground.subsets() {
        for x in ground.complement(b).iter() {
            let gain_b = table[b.with(x).mask() as usize] - table[b.mask() as usize];
            for a in submasks(b) {
                let gain_a = table[a.with(x).mask() as usize] - table[a.mask() as usize];
                if gain_a < gain_b - tol {
                    out.push(SubmodularViolation {
                        a,
                        b,
                        x,
                        gain_a,
                        gain_b,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every pair `A ⊆ B` whose expected values decrease by more than `tol`.
pub fn check_monotone<E: Environment + ?Sized>(
    env: &E,
    tol: f64,
) -> Result<Vec<MonotoneViolation>> {
    let table = exact_table(env)?;
    let mut out = Vec::new();
    for b in env.ground().subsets() {
        let value_b = table[b.mask() as usize];
        for a in submasks(b) {
            let value_a = table[a.mask() as usize];
            if value_a > value_b + tol {
                out.push(MonotoneViolation {
                    a,
                    b,
                    value_a,
                    value_b,
                });
            }
        }
    }
    Ok(out)
}

/// All subsets of `b`, in decreasing mask order, ending with the empty set.
fn submasks(b: ArmSet) -> impl Iterator<Item = ArmSet> {
    let full = b.mask();
    let mut next = Some(full);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & full)
        };
        Some(ArmSet::from_mask(cur))
    })
}
