//! Dyadic perturbation of degenerate margins.
//!
//! With `K = 2^(N1+1)`, set `u_i' = K u_i + 2^i` and `v_j' = K v_j`, then add
//! `Σ 2^i = K - 2` to the last demand. Modulo `K` a supply subset sums to a
//! distinct value in `[0, K-2]` while a demand subset sums to `0` or `K - 2`,
//! so equal subset sums only occur for the empty and the full sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpwalk_core::TransportationInstance;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PerturbError {
    #[error("perturbed margins overflow i64")]
    Overflow,
    #[error("no non-degenerate perturbation found")]
    PerturbationFailed,
}

fn dyadic(inst: &TransportationInstance) -> Option<(Vec<i64>, Vec<i64>)> {
    let n1 = inst.supply_count();
    let scale = 1i64.checked_shl(u32::try_from(n1 + 1).ok()?).filter(|&k| k > 0)?;
    let mut u = Vec::with_capacity(n1);
    for (i, &x) in inst.supplies().iter().enumerate() {
        u.push(x.checked_mul(scale)?.checked_add(1i64 << (i + 1))?);
    }
    let mut v: Vec<i64> = inst.demands().iter().map(|&x| x.checked_mul(scale)).collect::<Option<_>>()?;
    let last = v.last_mut()?;
    *last = last.checked_add(scale - 2)?;
    Some((u, v))
}

/// Random offsets `r_i` in `[1, K)` on the supplies, balanced on the last
/// demand, scaled by `K = 2^(N1+8)`; tried only if the dyadic scheme fails.
fn randomized(inst: &TransportationInstance, rng: &mut ChaCha8Rng) -> Option<(Vec<i64>, Vec<i64>)> {
    let scale = 1i64.checked_shl(u32::try_from(inst.supply_count() + 8).ok()?).filter(|&k| k > 0)?;
    let offsets: Vec<i64> = (0..inst.supply_count()).map(|_| rng.gen_range(1..scale)).collect();
    let extra: i64 = offsets.iter().try_fold(0i64, |s, &r| s.checked_add(r))?;
    let u = inst
        .supplies()
        .iter()
        .zip(&offsets)
        .map(|(&x, &r)| x.checked_mul(scale)?.checked_add(r))
        .collect::<Option<Vec<_>>>()?;
    let mut v: Vec<i64> = inst.demands().iter().map(|&x| x.checked_mul(scale)).collect::<Option<_>>()?;
    let last = v.last_mut()?;
    *last = last.checked_add(extra)?;
    Some((u, v))
}

/// Non-degenerate margins close to a scaled copy of `inst`; forbidden edges
/// are kept. The result is always verified.
pub fn perturb_to_nondegenerate(inst: &TransportationInstance) -> Result<TransportationInstance, PerturbError> {
    let build = |(u, v): (Vec<i64>, Vec<i64>)| {
        TransportationInstance::new(u, v, inst.forbidden().iter().copied())
            .ok()
            .filter(|t| t.check_nondegenerate().holds)
    };
    let first = dyadic(inst);
    let overflowed = first.is_none();
    if let Some(out) = first.and_then(build) {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7072_7475_7262);
    for _ in 0..64 {
        if let Some(out) = randomized(inst, &mut rng).and_then(build) {
            return Ok(out);
        }
    }
    Err(if overflowed { PerturbError::Overflow } else { PerturbError::PerturbationFailed })
}
