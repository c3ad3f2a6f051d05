//! Standard numerical perversities and their interaction with the lattice `W`.
//!
//! A standard numerical perversity is a function `pi` with `pi(0) = 0` such
//! that both `pi` and `id - pi` are nondecreasing (equivalently: increments in
//! `{0,1}`).  Level-`n` membership additionally requires `0 < pi(n) < n`.
//! This module implements the plus-shift `pi+_n`, the set `P_n(rho)` together
//! with its extremal elements, the two-to-one map `phi: P_2 -> W`, and the
//! explicit depth criterion attached to the `S_rho`-perversity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tailed::{enumerate_staircase, TailedFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerversityError {
    #[error("[{}] not a numerical perversity: increments must lie in {{0,1}} and pi(0) = 0", self.code())]
    NotAPerversity,
    #[error("[{}] perversity is not in P_{1}: pi({1}) = {0} violates 0 < pi(n) < n", self.code())]
    NotInPn(u64, u64),
    #[error("[{}] rho is not in W", self.code())]
    RhoNotInW,
    #[error("[{}] enumeration horizon {0} is below the level n = {1}", self.code())]
    HorizonBelowLevel(u64, u64),
}

impl PerversityError {
    pub fn code(&self) -> &'static str {
        match self {
            PerversityError::NotAPerversity => "perv.not_a_perversity",
            PerversityError::NotInPn(..) => "perv.not_in_pn",
            PerversityError::RhoNotInW => "perv.rho_not_in_w",
            PerversityError::HorizonBelowLevel(..) => "perv.horizon_below_level",
        }
    }
}

/// A standard numerical perversity, backed by the staircase representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NumericalPerversity(TailedFunction);

impl NumericalPerversity {
    /// Wraps a staircase function, checking the perversity invariants:
    /// `pi(0) = 0` and increments of `pi` (hence of `id - pi`) in `{0,1}`.
    pub fn new(func: TailedFunction) -> Result<Self, PerversityError> {
        if func.in_wprime() {
            Ok(NumericalPerversity(func))
        } else {
            Err(PerversityError::NotAPerversity)
        }
    }

    /// The identically-zero perversity.
    pub fn zero() -> Self {
        NumericalPerversity(TailedFunction::zero())
    }

    pub fn func(&self) -> &TailedFunction {
        &self.0
    }

    pub fn eval(&self, k: u64) -> u64 {
        self.0.eval(k)
    }

    /// Level-`n` membership: `0 < pi(n) < n`.
    pub fn in_pn(&self, n: u64) -> bool {
        debug_assert!(n >= 2);
        let v = self.eval(n);
        0 < v && v < n
    }

    /// The dual `id - pi`, an involution preserving level membership.
    pub fn numerical_dual(&self) -> Self {
        let bound = self.0.horizon() + 1;
        let values: Vec<u64> = (0..=bound).map(|k| k - self.eval(k)).collect();
        NumericalPerversity(TailedFunction::from_values(values, 1 - self.0.tail_slope()))
    }

    /// The plus-shift `pi+_n`: bump by one wherever `k - pi(k) >= n - pi(n)`.
    ///
    /// Since `k - pi(k)` is weakly increasing the bump set is an upward-closed
    /// interval of `k`, so the result is again eventually linear with the same
    /// tail slope.
    pub fn pi_plus(&self, n: u64) -> Self {
        let threshold = n - self.eval(n);
        let bound = self.0.horizon().max(n) + 1;
        let values: Vec<u64> = (0..=bound)
            .map(|k| {
                let bump = (k - self.eval(k) >= threshold) as u64;
                self.eval(k) + bump
            })
            .collect();
        NumericalPerversity(TailedFunction::from_values(values, self.0.tail_slope()))
    }

    /// Pointwise order on perversities.
    pub fn le(&self, other: &Self) -> bool {
        self.0.le(&other.0)
    }
}

impl fmt::Display for NumericalPerversity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Equality of two staircase functions on the tail `[n, infinity)`.
fn tails_agree_from(a: &TailedFunction, b: &TailedFunction, n: u64) -> bool {
    let bound = a.horizon().max(b.horizon()).max(n) + 1;
    (n..=bound).all(|k| a.eval(k) == b.eval(k)) && a.tail_slope() == b.tail_slope()
}

/// Membership in `P_n(rho)`: level-`n` perversity with `pi+_n <= rho`
/// everywhere and `pi+_n = rho` on `[n, infinity)`.
pub fn in_pn_rho(pi: &NumericalPerversity, rho: &TailedFunction, n: u64) -> bool {
    if !pi.in_pn(n) {
        return false;
    }
    let plus = pi.pi_plus(n);
    plus.func().le(rho) && tails_agree_from(plus.func(), rho, n)
}

/// The largest index `m` with `rho(m) < rho(n)`; well defined for `rho in W`
/// and `n >= 2` since `rho(0) = 0 < rho(n)` and `rho` is weakly increasing.
pub fn pi_max_split_index(rho: &TailedFunction, n: u64) -> u64 {
    let target = rho.eval(n);
    (0..n).rev().find(|&k| rho.eval(k) < target).expect("rho(0) = 0 < rho(n)")
}

/// The minimum element `pi_{rho,n}` of `P_n(rho)`.
pub fn pi_min(rho: &TailedFunction, n: u64) -> Result<NumericalPerversity, PerversityError> {
    if !rho.in_w() {
        return Err(PerversityError::RhoNotInW);
    }
    let offset = n - rho.eval(n) + 1;
    let bound = rho.horizon().max(n) + 1;
    let values: Vec<u64> = (0..=bound)
        .map(|k| {
            if k < n {
                k.saturating_sub(offset)
            } else {
                rho.eval(k) - 1
            }
        })
        .collect();
    NumericalPerversity::new(TailedFunction::from_values(values, rho.tail_slope()))
}

/// The maximum element `pi_hat_{rho,n}` of `P_n(rho)`.
pub fn pi_max(rho: &TailedFunction, n: u64) -> Result<NumericalPerversity, PerversityError> {
    if !rho.in_w() {
        return Err(PerversityError::RhoNotInW);
    }
    let m = pi_max_split_index(rho, n);
    let bound = rho.horizon().max(n) + 1;
    let values: Vec<u64> = (0..=bound)
        .map(|k| if k <= m { rho.eval(k) } else { rho.eval(k) - 1 })
        .collect();
    NumericalPerversity::new(TailedFunction::from_values(values, rho.tail_slope()))
}

/// Brute-force enumeration of `P_n(rho)`.
///
/// Membership forces `pi(k) = rho(k) - 1` for `k >= n`, so only the `2^(n-1)`
/// increment sequences on `[1, n-1]` are free; candidates are emitted in
/// lexicographic order on those increments.  The result is exact and does not
/// depend on `horizon` as long as `horizon >= n`.
pub fn enumerate_pn_rho(
    rho: &TailedFunction,
    n: u64,
    horizon: u64,
) -> Result<Vec<NumericalPerversity>, PerversityError> {
    if horizon < n {
        return Err(PerversityError::HorizonBelowLevel(horizon, n));
    }
    let bound = rho.horizon().max(n) + 1;
    // pi(k) = rho(k) - 1 for k >= n needs rho >= 1 on the tail
    if (n..=bound).any(|k| rho.eval(k) == 0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let steps = n - 1;
    for bits in 0..(1u64 << steps) {
        let mut values = vec![0u64];
        for i in 0..steps {
            let d = (bits >> (steps - 1 - i)) & 1;
            values.push(values.last().unwrap() + d);
        }
        for k in n..=bound {
            values.push(rho.eval(k) - 1);
        }
        let Ok(pi) = NumericalPerversity::new(TailedFunction::from_values(
            values,
            rho.tail_slope(),
        )) else {
            continue;
        };
        if in_pn_rho(&pi, rho, n) {
            out.push(pi);
        }
    }
    Ok(out)
}

/// Closed form for the existence of `pi in P_n(rho)` with `pi+_n = rho`:
/// holds iff `rho(n-1) < rho(n)`.
pub fn exists_pi_plus_eq_rho(rho: &TailedFunction, n: u64) -> bool {
    rho.eval(n - 1) < rho.eval(n)
}

/// `phi: P_2 -> W`, `phi(pi)(k) = k` for `k <= 1` and `pi(k) + 1` for `k >= 2`.
pub fn phi(pi: &NumericalPerversity) -> Result<TailedFunction, PerversityError> {
    if !pi.in_pn(2) {
        return Err(PerversityError::NotInPn(pi.eval(2), 2));
    }
    let bound = pi.func().horizon().max(2) + 1;
    let values: Vec<u64> = (0..=bound)
        .map(|k| if k <= 1 { k } else { pi.eval(k) + 1 })
        .collect();
    Ok(TailedFunction::from_values(values, pi.func().tail_slope()))
}

/// The fiber of `phi` over `rho in W`, as the ordered pair
/// `(pi_{rho,2}, pi_hat_{rho,2})`; the two differ exactly at `k = 1`.
pub fn phi_inverse(
    rho: &TailedFunction,
) -> Result<(NumericalPerversity, NumericalPerversity), PerversityError> {
    let lo = pi_min(rho, 2)?;
    let hi = pi_max(rho, 2)?;
    assert_eq!(phi(&lo).as_ref(), Ok(rho), "phi(pi_min) must recover rho");
    assert_eq!(phi(&hi).as_ref(), Ok(rho), "phi(pi_max) must recover rho");
    Ok((lo, hi))
}

/// The depth bound a sheaf must satisfy at a point of the given codimension
/// for membership in the `D>=0` half of the `p_rho+` t-structure, where `n`
/// is the c-codimension of the closed complement.  Piecewise closed form.
pub fn p_rho_criterion(codim: u64, rho: &TailedFunction, n: u64) -> u64 {
    let rn = rho.eval(n);
    if codim >= n {
        rho.eval(codim)
    } else if codim + rn > n {
        rn - (n - codim)
    } else {
        0
    }
}

/// The same bound through its definition: `(pi_{rho,n})+_n` evaluated at the
/// codimension.  Kept as an independent route; tests pin the two together.
pub fn p_rho_criterion_via_perversity(
    codim: u64,
    rho: &TailedFunction,
    n: u64,
) -> Result<u64, PerversityError> {
    Ok(pi_min(rho, n)?.pi_plus(n).eval(codim))
}

/// Enumerates every standard numerical perversity with horizon at most
/// `max_horizon` (fixed order inherited from the staircase enumeration).
pub fn enumerate_perversities(max_horizon: u64) -> Vec<NumericalPerversity> {
    enumerate_staircase(max_horizon)
        .into_iter()
        .map(|f| NumericalPerversity::new(f).expect("staircase functions are perversities"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tailed::enumerate_w;

    fn perv(s: &str) -> NumericalPerversity {
        NumericalPerversity::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn pn_membership() {
        assert!(!NumericalPerversity::zero().in_pn(2));
        assert!(perv("0,0,1;+0").in_pn(2));
        // P_n subset of P_m for n <= m
        for pi in enumerate_perversities(6) {
            for n in 2..=6u64 {
                if pi.in_pn(n) {
                    for m in n..=8 {
                        assert!(pi.in_pn(m), "{pi} in P_{n} but not P_{m}");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_is_involution() {
        for pi in enumerate_perversities(7) {
            assert_eq!(pi.numerical_dual().numerical_dual(), pi);
            assert_eq!(pi.eval(1) == 0, pi.numerical_dual().eval(1) == 1);
        }
    }

    #[test]
    fn pi_plus_examples() {
        // pi_{rho_3,2} bumps to rho_3 from k = 2 on
        let rho3 = TailedFunction::rho_r(3);
        let pi = pi_min(&rho3, 2).unwrap();
        let plus = pi.pi_plus(2);
        for k in 2..=10 {
            assert_eq!(plus.eval(k), rho3.eval(k));
        }
        // zero perversity, n = 2: bump where k >= 2
        let plus = NumericalPerversity::zero().pi_plus(2);
        assert_eq!(plus, perv("0,0,1;+0"));
    }

    #[test]
    fn pi_plus_is_monotone() {
        let all = enumerate_perversities(6);
        for n in 2..=5u64 {
            for a in &all {
                for b in &all {
                    if a.le(b) {
                        assert!(a.pi_plus(n).le(&b.pi_plus(n)), "{a} <= {b} but plus-shifts disagree (n={n})");
                    }
                }
            }
        }
    }

    #[test]
    fn extremal_examples() {
        let rho3 = TailedFunction::rho_r(3);
        assert_eq!(pi_min(&rho3, 2).unwrap(), perv("0,0,1,2;+0"));
        assert_eq!(pi_max(&rho3, 2).unwrap(), perv("0,1,1,2;+0"));
        let id = TailedFunction::identity();
        let hat = pi_max(&id, 3).unwrap();
        assert_eq!(pi_max_split_index(&id, 3), 2);
        for k in 0..=2 {
            assert_eq!(hat.eval(k), k);
        }
        for k in 3..=10 {
            assert_eq!(hat.eval(k), k - 1);
        }
    }

    #[test]
    fn extremals_bound_the_fiber() {
        for rho in enumerate_w(6) {
            for n in 2..=6u64 {
                let lo = pi_min(&rho, n).unwrap();
                let hi = pi_max(&rho, n).unwrap();
                for pi in enumerate_pn_rho(&rho, n, 8).unwrap() {
                    assert!(lo.le(&pi) && pi.le(&hi), "{pi} escapes [{lo}, {hi}]");
                }
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let two = enumerate_pn_rho(&TailedFunction::rho_r(2), 2, 8).unwrap();
        assert_eq!(two.len(), 2);
        assert!(enumerate_pn_rho(&TailedFunction::zero(), 2, 8).unwrap().is_empty());
    }

    /// Independent count of `P_n(rho)` as unit-step lattice paths confined
    /// between the extremal perversities (valid for `rho in W`).
    fn path_count(rho: &TailedFunction, n: u64) -> u64 {
        let lo = pi_min(rho, n).unwrap();
        let hi = pi_max(rho, n).unwrap();
        let target = rho.eval(n) - 1;
        let mut layer = vec![0u64; (target + 2) as usize];
        layer[0] = 1;
        for k in 1..=n {
            let mut next = vec![0u64; (target + 2) as usize];
            for v in 0..=target {
                if v < lo.eval(k) || v > hi.eval(k) {
                    continue;
                }
                let stay = layer[v as usize];
                let step = if v > 0 { layer[(v - 1) as usize] } else { 0 };
                next[v as usize] = stay + step;
            }
            layer = next;
        }
        layer[target as usize]
    }

    #[test]
    fn enumerate_count_matches_path_oracle() {
        for rho in enumerate_w(6) {
            for n in 2..=6u64 {
                let listed = enumerate_pn_rho(&rho, n, 8).unwrap().len() as u64;
                assert_eq!(listed, path_count(&rho, n), "count mismatch for {rho}, n={n}");
            }
        }
        // the spec's concrete case: rho = id, n = 4
        let id = TailedFunction::identity();
        let listed = enumerate_pn_rho(&id, 4, 8).unwrap();
        assert_eq!(listed.len() as u64, path_count(&id, 4));
    }

    #[test]
    fn exists_pi_plus_examples() {
        let rho2 = TailedFunction::rho_r(2);
        assert!(exists_pi_plus_eq_rho(&rho2, 2));
        assert!(!exists_pi_plus_eq_rho(&rho2, 3));
        let id = TailedFunction::identity();
        for n in 2..=8 {
            assert!(exists_pi_plus_eq_rho(&id, n));
        }
    }

    #[test]
    fn phi_examples() {
        let rho2 = TailedFunction::rho_r(2);
        let pi = pi_min(&rho2, 2).unwrap();
        assert_eq!(phi(&pi).unwrap(), rho2);
        assert!(phi(&NumericalPerversity::zero()).is_err());
        for rho in enumerate_w(7) {
            let (lo, hi) = phi_inverse(&rho).unwrap();
            assert_eq!(lo.eval(1), 0);
            assert_eq!(hi.eval(1), 1);
            let bound = lo.func().horizon().max(hi.func().horizon()) + 2;
            for k in (0..=bound).filter(|&k| k != 1) {
                assert_eq!(lo.eval(k), hi.eval(k), "fiber of {rho} differs off k=1");
            }
        }
    }

    #[test]
    fn p_rho_criterion_examples() {
        let rho3 = TailedFunction::rho_r(3);
        assert_eq!(p_rho_criterion(2, &rho3, 4), 1);
        assert_eq!(p_rho_criterion(1, &rho3, 4), 0);
        for rho in enumerate_w(5) {
            for n in 2..=6 {
                for codim in n..=12 {
                    assert_eq!(p_rho_criterion(codim, &rho, n), rho.eval(codim));
                }
            }
        }
    }

    #[test]
    fn p_rho_two_paths_agree() {
        for rho in enumerate_w(6) {
            for n in 2..=6u64 {
                for codim in 0..=14 {
                    assert_eq!(
                        p_rho_criterion(codim, &rho, n),
                        p_rho_criterion_via_perversity(codim, &rho, n).unwrap(),
                        "paths disagree for {rho}, n={n}, codim={codim}"
                    );
                }
            }
        }
    }

    #[test]
    fn pi_max_plus_recovers_rho_outside_gap() {
        for rho in enumerate_w(6) {
            for n in 2..=6u64 {
                let m = pi_max_split_index(&rho, n);
                let plus = pi_max(&rho, n).unwrap().pi_plus(n);
                let bound = rho.horizon().max(n) + 2;
                for k in 0..=bound {
                    let inside_gap = m < k && k < n;
                    assert_eq!(
                        plus.eval(k) == rho.eval(k),
                        !inside_gap,
                        "pi_hat+ vs rho at k={k} for {rho}, n={n}"
                    );
                }
            }
        }
    }
}
