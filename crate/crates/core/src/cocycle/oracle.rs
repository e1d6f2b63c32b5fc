//! Exhaustive search for a potential.
//!
//! Kept deliberately separate from the character pipeline: group elements
//! are handled as plain lexicographic indices with their own digit
//! arithmetic, and no duality or orbit machinery is used.

use super::{Cocycle, CocycleError, Decision, Witness};
use crate::conditional::CondElement;

pub const DEFAULT_ORACLE_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub decision: Decision,
    /// Number of candidate potentials examined.
    pub candidates: u64,
}

/// Tries every `F ∈ K^atoms` in lexicographic order (first atom most
/// significant) and returns the first with `ρ_γ = F ∘ T^γ − F` for all `γ`.
pub fn brute_force_oracle(c: &Cocycle, bound: u64) -> Result<OracleRun, CocycleError> {
    let moduli: Vec<u64> = c.group().moduli().iter().map(|&n| n as u64).collect();
    let order: u64 = moduli.iter().product();
    let atoms = c.action().base().len();
    let size = (order as u128).checked_pow(atoms as u32).unwrap_or(u128::MAX);
    if size > bound as u128 {
        return Err(CocycleError::TooLarge { size, bound });
    }

    let digits = |mut i: u64| -> Vec<u64> {
        let mut out = vec![0; moduli.len()];
        for (slot, &n) in out.iter_mut().zip(&moduli).rev() {
            *slot = i % n;
            i /= n;
        }
        out
    };
    let undigits = |d: &[u64]| -> u64 { d.iter().zip(&moduli).fold(0, |acc, (&a, &n)| acc * n + a) };
    // difference table: diff[a][b] = index of (a - b)
    let diff: Vec<Vec<u64>> = (0..order)
        .map(|a| {
            let da = digits(a);
            (0..order)
                .map(|b| {
                    let db = digits(b);
                    let d: Vec<u64> = da
                        .iter()
                        .zip(&db)
                        .zip(&moduli)
                        .map(|((&x, &y), &n)| (x + n - y) % n)
                        .collect();
                    undigits(&d)
                })
                .collect()
        })
        .collect();

    let gamma = c.action().group().order();
    let target: Vec<Vec<u64>> = (0..gamma)
        .map(|g| {
            c.component(g)
                .values()
                .iter()
                .map(|v| undigits(&v.coords().iter().map(|&a| a as u64).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let moves: Vec<Vec<usize>> = (0..gamma)
        .map(|g| (0..atoms).map(|x| c.action().apply(g, x)).collect())
        .collect();

    let mut f = vec![0u64; atoms];
    let mut candidates = 0u64;
    loop {
        candidates += 1;
        let works = (0..gamma).all(|g| {
            (0..atoms).all(|x| diff[f[moves[g][x]] as usize][f[x] as usize] == target[g][x])
        });
        if works {
            let k = c.group();
            let values = f
                .iter()
                .map(|&i| {
                    let d: Vec<i64> = digits(i).into_iter().map(|a| a as i64).collect();
                    k.element(&d).expect("digits are reduced")
                })
                .collect();
            let potential = CondElement::new(c.action().base().clone(), values)?;
            return Ok(OracleRun {
                decision: Decision::Coboundary(Witness {
                    potential,
                    trace: None,
                }),
                candidates,
            });
        }
        // odometer step, last atom least significant
        let mut pos = atoms;
        loop {
            if pos == 0 {
                return Ok(OracleRun {
                    decision: Decision::NotCoboundary(None),
                    candidates,
                });
            }
            pos -= 1;
            f[pos] += 1;
            if f[pos] < order {
                break;
            }
            f[pos] = 0;
        }
    }
}
