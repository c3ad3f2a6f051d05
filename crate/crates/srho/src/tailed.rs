//! Exact arithmetic on eventually-linear staircase functions.
//!
//! A [`TailedFunction`] represents a function `f: Z>=0 -> Z>=0` by a finite
//! prefix of values `v_0..v_H` and a tail slope `s` in `{0,1}`, with
//! `f(k) = v_H + s*(k - H)` for `k >= H`.  Every function manipulated here
//! (the `rho_r`, the identity, duals, inclinations, perversities and their
//! plus-shifts) is of this shape, and the shape is closed under join, meet,
//! dual and inclination, so equality and all lattice comparisons are exact
//! and decidable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing or operating on staircase functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionError {
    #[error("[{}] empty encoding: at least one value is required", self.code())]
    Empty,
    #[error("[{}] bad integer in encoding: {0}", self.code())]
    BadInteger(String),
    #[error("[{}] tail slope must be 0 or 1, got {0}", self.code())]
    BadSlope(u64),
    #[error("[{}] encoding must look like `v0,v1,...,vH;+s`", self.code())]
    BadShape,
    #[error("[{}] f(0) must be 0, got {0}", self.code())]
    NonzeroOrigin(u64),
    #[error("[{}] function is not weakly increasing at index {0}", self.code())]
    NonMonotone(usize),
    #[error("[{}] increment at index {0} exceeds 1", self.code())]
    SlopeExceedsOne(usize),
    #[error("[{}] function is not in W (it is not >= rho_2)", self.code())]
    NotInW,
}

impl FunctionError {
    /// Stable diagnostic id for this violation.
    pub fn code(&self) -> &'static str {
        match self {
            FunctionError::Empty => "rho.empty",
            FunctionError::BadInteger(_) => "rho.bad_integer",
            FunctionError::BadSlope(_) => "rho.bad_slope",
            FunctionError::BadShape => "rho.bad_shape",
            FunctionError::NonzeroOrigin(_) => "rho.nonzero_origin",
            FunctionError::NonMonotone(_) => "rho.non_monotone",
            FunctionError::SlopeExceedsOne(_) => "rho.slope_exceeds_one",
            FunctionError::NotInW => "rho.not_in_w",
        }
    }
}

/// An eventually-linear function `Z>=0 -> Z>=0` in canonical form.
///
/// The prefix never carries a trailing segment already described by the tail
/// slope: values are trimmed from the right while `v_H - v_{H-1}` equals the
/// slope.  Two functions are equal as functions iff their canonical forms are
/// identical, so derived `Eq`/`Hash` agree with pointwise equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TailedFunction {
    prefix: Vec<u64>,
    tail_slope: u64,
}

impl TailedFunction {
    /// Builds a function from explicit values and a tail slope, canonicalizing
    /// the prefix.  No monotonicity constraints are imposed here; predicates
    /// like [`in_wprime`](Self::in_wprime) classify the result.
    ///
    /// Panics if `values` is empty or `tail_slope` is not 0 or 1.
    pub fn from_values(values: Vec<u64>, tail_slope: u64) -> Self {
        assert!(!values.is_empty(), "prefix must be nonempty");
        assert!(tail_slope <= 1, "tail slope must be 0 or 1");
        let mut f = TailedFunction {
            prefix: values,
            tail_slope,
        };
        f.canonicalize();
        f
    }

    /// `rho_r(k) = min(k, r)`.
    pub fn rho_r(r: u64) -> Self {
        assert!(r >= 1, "rho_r requires r >= 1");
        Self::from_values((0..=r).collect(), 0)
    }

    /// The identity function, canonical form `0;+1`.
    pub fn identity() -> Self {
        Self::from_values(vec![0], 1)
    }

    /// The zero function, canonical form `0;+0`.
    pub fn zero() -> Self {
        Self::from_values(vec![0], 0)
    }

    fn canonicalize(&mut self) {
        while self.prefix.len() >= 2 {
            let h = self.prefix.len() - 1;
            if self.prefix[h].checked_sub(self.prefix[h - 1]) == Some(self.tail_slope) {
                self.prefix.pop();
            } else {
                break;
            }
        }
    }

    /// Index of the last explicitly stored value.
    pub fn horizon(&self) -> u64 {
        (self.prefix.len() - 1) as u64
    }

    /// Prefix values `v_0..v_H`.
    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    /// Tail slope, 0 or 1.
    pub fn tail_slope(&self) -> u64 {
        self.tail_slope
    }

    /// Evaluates `f(k)`.
    pub fn eval(&self, k: u64) -> u64 {
        let h = self.horizon();
        if k <= h {
            self.prefix[k as usize]
        } else {
            self.prefix[h as usize] + self.tail_slope * (k - h)
        }
    }

    /// Membership in `W'`: `f(0) = 0`, weakly increasing, increments at most 1.
    pub fn in_wprime(&self) -> bool {
        self.classify_wprime().is_ok()
    }

    /// Like [`in_wprime`](Self::in_wprime) but reports which invariant fails.
    pub fn classify_wprime(&self) -> Result<(), FunctionError> {
        if self.prefix[0] != 0 {
            return Err(FunctionError::NonzeroOrigin(self.prefix[0]));
        }
        for k in 1..self.prefix.len() {
            match self.prefix[k].checked_sub(self.prefix[k - 1]) {
                None => return Err(FunctionError::NonMonotone(k)),
                Some(d) if d > 1 => return Err(FunctionError::SlopeExceedsOne(k)),
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Membership in `W = { rho in W' | rho >= rho_2 }`.
    ///
    /// Given monotonicity it suffices to check `f(1) >= 1` and `f(2) >= 2`;
    /// the pointwise route is kept alongside in tests.
    pub fn in_w(&self) -> bool {
        self.in_wprime() && self.eval(1) >= 1 && self.eval(2) >= 2
    }

    /// Pointwise `self(k) <= other(k)` for all `k`.
    ///
    /// Two linear tails are compared by their values up to one step past the
    /// larger horizon together with their slopes.
    pub fn le(&self, other: &Self) -> bool {
        let bound = self.horizon().max(other.horizon()) + 1;
        (0..=bound).all(|k| self.eval(k) <= other.eval(k)) && self.tail_slope <= other.tail_slope
    }

    /// Strict pointwise order: `self <= other` and the two differ somewhere.
    pub fn lt(&self, other: &Self) -> bool {
        self.le(other) && self != other
    }

    fn pointwise(&self, other: &Self, max: bool) -> Self {
        let h = self.horizon().max(other.horizon());
        // Past the crossing index the winner of the two tails is settled; the
        // gap at h bounds how far a slope-1 tail needs to catch a flat one.
        let gap = self.eval(h).abs_diff(other.eval(h));
        let bound = h + gap + 2;
        let values: Vec<u64> = (0..=bound)
            .map(|k| {
                let (a, b) = (self.eval(k), other.eval(k));
                if max {
                    a.max(b)
                } else {
                    a.min(b)
                }
            })
            .collect();
        let slope = if max {
            self.tail_slope.max(other.tail_slope)
        } else {
            self.tail_slope.min(other.tail_slope)
        };
        Self::from_values(values, slope)
    }

    /// Pointwise maximum (lattice join).
    pub fn join(&self, other: &Self) -> Self {
        self.pointwise(other, true)
    }

    /// Pointwise minimum (lattice meet).
    pub fn meet(&self, other: &Self) -> Self {
        self.pointwise(other, false)
    }

    /// The dual `rho_bar` of `rho in W`: `rho_bar(k) = k` for `k <= 1` and
    /// `k - rho(k) + 2` for `k >= 2`; the tail slope flips.
    ///
    /// This closed form is validated against the conjugation route through
    /// numerical perversities (`phi . (id - .) . phi^-1`) in the test suite.
    pub fn dual(&self) -> Result<Self, FunctionError> {
        if !self.in_w() {
            return Err(FunctionError::NotInW);
        }
        let bound = self.horizon().max(2) + 1;
        let values: Vec<u64> = (0..=bound)
            .map(|k| if k <= 1 { k } else { k - self.eval(k) + 2 })
            .collect();
        let out = Self::from_values(values, 1 - self.tail_slope);
        debug_assert!(out.in_w());
        Ok(out)
    }

    /// The `n`-th inclination `t_n rho`: agrees with `rho` on `[0, n]` and
    /// grows with slope 1 afterwards.  It is the maximum element of `W`
    /// agreeing with `rho` on `[0, n]`.
    pub fn inclination(&self, n: u64) -> Self {
        let values: Vec<u64> = (0..=n).map(|k| self.eval(k)).collect();
        Self::from_values(values, 1)
    }
}

impl fmt::Display for TailedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: Vec<String> = self.prefix.iter().map(|v| v.to_string()).collect();
        write!(f, "{};+{}", values.join(","), self.tail_slope)
    }
}

impl FromStr for TailedFunction {
    type Err = FunctionError;

    /// Parses the `v0,v1,...,vH;+s` encoding.
    ///
    /// Inputs violating the staircase invariants (nonzero origin, decrease,
    /// increment above 1, slope outside `{0,1}`) are rejected with a
    /// diagnostic naming the violation.  A valid but non-canonical prefix is
    /// accepted and canonicalized, so `0,1;+1` and `0;+1` denote the same
    /// function.
    fn from_str(s: &str) -> Result<Self, FunctionError> {
        let (values_part, slope_part) = s.split_once(";+").ok_or(FunctionError::BadShape)?;
        if values_part.is_empty() {
            return Err(FunctionError::Empty);
        }
        let values: Vec<u64> = values_part
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| FunctionError::BadInteger(v.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let slope: u64 = slope_part
            .trim()
            .parse()
            .map_err(|_| FunctionError::BadInteger(slope_part.to_string()))?;
        if slope > 1 {
            return Err(FunctionError::BadSlope(slope));
        }
        let f = Self::from_values(values, slope);
        f.classify_wprime()?;
        Ok(f)
    }
}

/// Enumerates every canonical staircase function (`f(0) = 0`, increments in
/// `{0,1}`) with horizon at most `max_horizon`, both tail slopes, in a fixed
/// order: by horizon, then tail slope, then lexicographically on increments.
///
/// There are at most `2^(max_horizon + 1)` such functions.
pub fn enumerate_staircase(max_horizon: u64) -> Vec<TailedFunction> {
    let mut out = Vec::new();
    for h in 0..=max_horizon {
        for slope in 0..=1u64 {
            for bits in 0..(1u64 << h) {
                // increments d_1..d_h, d_1 in the top bit so order is lex
                let incs: Vec<u64> = (0..h).map(|i| (bits >> (h - 1 - i)) & 1).collect();
                if h > 0 && incs[h as usize - 1] == slope {
                    continue; // not canonical
                }
                let mut values = vec![0u64];
                for d in incs {
                    values.push(values.last().unwrap() + d);
                }
                out.push(TailedFunction::from_values(values, slope));
            }
        }
    }
    out
}

/// The elements of `W` among [`enumerate_staircase`], same order.
pub fn enumerate_w(max_horizon: u64) -> Vec<TailedFunction> {
    enumerate_staircase(max_horizon)
        .into_iter()
        .filter(TailedFunction::in_w)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(s: &str) -> TailedFunction {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(TailedFunction::rho_r(2).eval(0), 0);
        assert_eq!(TailedFunction::rho_r(3).eval(5), 3);
        assert_eq!(TailedFunction::identity().eval(17), 17);
        assert_eq!(TailedFunction::rho_r(4).eval(10), 4);
        assert_eq!(TailedFunction::rho_r(1).eval(7), 1);
    }

    #[test]
    fn rho_r_canonical_form() {
        assert_eq!(TailedFunction::rho_r(2).to_string(), "0,1,2;+0");
        assert_eq!(TailedFunction::identity().to_string(), "0;+1");
    }

    #[test]
    fn wprime_membership() {
        assert!(TailedFunction::identity().in_wprime());
        assert!(!TailedFunction::from_values(vec![0, 2], 0).in_wprime());
        for r in 1..=8 {
            assert!(TailedFunction::rho_r(r).in_wprime());
        }
    }

    #[test]
    fn w_membership() {
        assert!(TailedFunction::rho_r(2).in_w());
        assert!(!TailedFunction::zero().in_w());
        // (0,1,1,2,3,...) slope 1: eval at 2 gives 1 < 2
        let g = TailedFunction::from_values(vec![0, 1, 1, 2, 3], 1);
        assert!(!g.in_w());
        // brute-force pointwise comparison agrees with the two-point check
        let rho2 = TailedFunction::rho_r(2);
        for cand in enumerate_staircase(6) {
            // rho_2 is eventually flat, so the finite window decides.
            let brute = cand.in_wprime()
                && (0..=cand.horizon() + 2).all(|k| cand.eval(k) >= rho2.eval(k));
            assert_eq!(cand.in_w(), brute, "disagreement for {cand}");
        }
    }

    #[test]
    fn join_meet_examples() {
        let (r2, r3) = (TailedFunction::rho_r(2), TailedFunction::rho_r(3));
        assert_eq!(r2.join(&r3), r3);
        assert_eq!(r2.meet(&r3), r2);
        assert_eq!(r2.join(&r2), r2);
        let id = TailedFunction::identity();
        for r in 1..=6 {
            assert_eq!(id.meet(&TailedFunction::rho_r(r)), TailedFunction::rho_r(r));
            assert_eq!(id.join(&TailedFunction::rho_r(r)), id);
        }
    }

    #[test]
    fn dual_examples() {
        assert_eq!(
            TailedFunction::identity().dual().unwrap(),
            TailedFunction::rho_r(2)
        );
        // dual(rho_r): k for k <= 1, 2 for 2 <= k <= r, k - (r - 2) for k > r
        for r in 2..=8u64 {
            let d = TailedFunction::rho_r(r).dual().unwrap();
            for k in 0..=r + 6 {
                let expect = if k <= 1 {
                    k
                } else if k <= r {
                    2
                } else {
                    k - (r - 2)
                };
                assert_eq!(d.eval(k), expect, "dual(rho_{r}) at {k}");
            }
        }
        let rho = f("0,1,2,2,3;+1");
        assert_eq!(rho.dual().unwrap().dual().unwrap(), rho);
        assert!(TailedFunction::zero().dual().is_err());
    }

    #[test]
    fn inclination_examples() {
        let id = TailedFunction::identity();
        for n in 0..=6 {
            assert_eq!(id.inclination(n), id);
        }
        let t = TailedFunction::rho_r(2).inclination(3);
        let expect: Vec<u64> = vec![0, 1, 2, 2, 3, 4, 5];
        for (k, v) in expect.iter().enumerate() {
            assert_eq!(t.eval(k as u64), *v);
        }
        // t_m rho >= t_n rho for m <= n
        for rho in enumerate_w(5) {
            for n in 0..=6u64 {
                for m in 0..=n {
                    assert!(rho.inclination(n).le(&rho.inclination(m)));
                }
            }
            // inclination is the maximum of W agreeing with rho on [0, n]
            for n in 2..=5u64 {
                let t = rho.inclination(n);
                assert!(t.in_w());
                for g in enumerate_w(8) {
                    if (0..=n).all(|k| g.eval(k) == rho.eval(k)) {
                        assert!(g.le(&t), "{g} exceeds inclination {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn inclination_idempotence() {
        for rho in enumerate_w(5) {
            for n in 2..=7u64 {
                let t = rho.inclination(n);
                assert_eq!(t.inclination(n), t);
                for m in 0..=n {
                    assert_eq!(t.inclination(m), rho.inclination(m));
                }
            }
        }
    }

    #[test]
    fn parse_display_and_diagnostics() {
        assert_eq!(f("0,1,2;+0"), TailedFunction::rho_r(2));
        // non-canonical but valid inputs are canonicalized
        assert_eq!(f("0,1,2,2;+0"), TailedFunction::rho_r(2));
        assert_eq!(f("0,1;+1"), TailedFunction::identity());
        assert_eq!(
            "1,2;+0".parse::<TailedFunction>().unwrap_err().code(),
            "rho.nonzero_origin"
        );
        assert_eq!(
            "0,2;+0".parse::<TailedFunction>().unwrap_err().code(),
            "rho.slope_exceeds_one"
        );
        assert_eq!(
            "0,1,0;+0".parse::<TailedFunction>().unwrap_err().code(),
            "rho.non_monotone"
        );
        assert_eq!(
            "0,1;+2".parse::<TailedFunction>().unwrap_err().code(),
            "rho.bad_slope"
        );
        assert_eq!(
            "0,1".parse::<TailedFunction>().unwrap_err().code(),
            "rho.bad_shape"
        );
        assert_eq!(
            "0,x;+0".parse::<TailedFunction>().unwrap_err().code(),
            "rho.bad_integer"
        );
    }

    #[test]
    fn enumeration_size_and_uniqueness() {
        use std::collections::HashSet;
        for n in 0..=8u64 {
            let all = enumerate_staircase(n);
            assert_eq!(all.len(), 1usize << (n + 1));
            let set: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len(), "duplicate canonical forms");
            for g in &all {
                assert!(g.horizon() <= n);
                assert!(g.in_wprime());
            }
        }
    }

    #[test]
    fn equality_matches_pointwise_on_window() {
        let all = enumerate_staircase(6);
        for a in &all {
            for b in &all {
                let bound = a.horizon().max(b.horizon()) + 2;
                let pointwise = (0..=bound).all(|k| a.eval(k) == b.eval(k));
                assert_eq!(a == b, pointwise, "{a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn lattice_laws(ai in 0usize..256, bi in 0usize..256, ci in 0usize..256) {
            let all = enumerate_staircase(7);
            let (a, b, c) = (&all[ai % all.len()], &all[bi % all.len()], &all[ci % all.len()]);
            let bound = 2 * a.horizon().max(b.horizon()).max(c.horizon()) + 4;
            // commutativity
            prop_assert_eq!(a.join(b), b.join(a));
            prop_assert_eq!(a.meet(b), b.meet(a));
            // associativity
            prop_assert_eq!(a.join(b).join(c), a.join(&b.join(c)));
            prop_assert_eq!(a.meet(b).meet(c), a.meet(&b.meet(c)));
            // absorption
            prop_assert_eq!(a.join(&a.meet(b)), a.clone());
            prop_assert_eq!(a.meet(&a.join(b)), a.clone());
            // the results really are the pointwise max/min
            let j = a.join(b);
            let m = a.meet(b);
            for k in 0..=bound {
                prop_assert_eq!(j.eval(k), a.eval(k).max(b.eval(k)));
                prop_assert_eq!(m.eval(k), a.eval(k).min(b.eval(k)));
            }
        }

        #[test]
        fn increments_stay_in_unit_range(i in 0usize..512) {
            let all = enumerate_staircase(8);
            let g = &all[i % all.len()];
            for k in 0..=g.horizon() + 4 {
                let d = g.eval(k + 1) - g.eval(k);
                prop_assert!(d <= 1);
            }
        }
    }

    #[test]
    fn dual_is_order_reversing_involution() {
        let ws = enumerate_w(10);
        for rho in &ws {
            assert_eq!(&rho.dual().unwrap().dual().unwrap(), rho);
        }
        for rho in enumerate_w(6) {
            for sigma in enumerate_w(6) {
                assert_eq!(
                    rho.le(&sigma),
                    sigma.dual().unwrap().le(&rho.dual().unwrap()),
                    "order reversal failed for {rho}, {sigma}"
                );
            }
        }
    }
}
