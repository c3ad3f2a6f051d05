//! The example family that is strictly `S_rho` through codimension `n`.
//!
//! From `rho in W` and `n >= 3` (with `rho` not the identity on `[0, n]`) one
//! extracts the indices `d_1 < ... < d_s` where the inclination `t_n rho`
//! finishes a flat step, and builds a product of Segre-type varieties
//! `X_{r_i, e_i}` with the pairwise singular loci removed.  Only the depth
//! bookkeeping survives here: the achievable `(codim, depth)` pairs, which
//! suffice for every `S_sigma` predicate on the structure sheaf.  The depth
//! facts about the building blocks `X_{a,b}` are axiomatic input, not
//! recomputed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ComponentDecl, ModelFile, PointDecl, PointId, Stalk};
use crate::tailed::{enumerate_w, TailedFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GriffithError {
    #[error("[{}] rho must be in W", self.code())]
    RhoNotInW,
    #[error("[{}] n must be at least 3, got {0}", self.code())]
    NBelowThree(u64),
    #[error("[{}] rho restricted to [0, {0}] must differ from the identity", self.code())]
    RhoIsIdentityOnRange(u64),
    #[error("[{}] strictness horizon {0} must be at least n + 2 = {1}", self.code())]
    HorizonTooSmall(u64, u64),
}

impl GriffithError {
    pub fn code(&self) -> &'static str {
        match self {
            GriffithError::RhoNotInW => "griffith.rho_not_in_w",
            GriffithError::NBelowThree(_) => "griffith.n_below_three",
            GriffithError::RhoIsIdentityOnRange(_) => "griffith.rho_is_identity",
            GriffithError::HorizonTooSmall(..) => "griffith.horizon_too_small",
        }
    }
}

/// The combinatorial data of one example: the flat-step indices `d`, the
/// fiber dimensions `e_i = d_i - rho(d_i)` and depths `r_i = rho(d_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GriffithSpec {
    pub rho: TailedFunction,
    pub n: u64,
    pub d: Vec<u64>,
    pub e: Vec<u64>,
    pub r: Vec<u64>,
}

/// Extracts the flat-step sequence: all `m <= n` with
/// `t(m+1) > t(m) = t(m-1)` for `t = t_n rho`.
pub fn d_sequence(rho: &TailedFunction, n: u64) -> Result<GriffithSpec, GriffithError> {
    if !rho.in_w() {
        return Err(GriffithError::RhoNotInW);
    }
    if n < 3 {
        return Err(GriffithError::NBelowThree(n));
    }
    if (0..=n).all(|k| rho.eval(k) == k) {
        return Err(GriffithError::RhoIsIdentityOnRange(n));
    }
    let t = rho.inclination(n);
    let d: Vec<u64> = (1..=n)
        .filter(|&m| t.eval(m + 1) > t.eval(m) && t.eval(m) == t.eval(m - 1))
        .collect();
    assert!(!d.is_empty(), "a non-identity rho always has a flat step");
    let r: Vec<u64> = d.iter().map(|&m| rho.eval(m)).collect();
    let e: Vec<u64> = d.iter().zip(&r).map(|(&m, &ri)| m - ri).collect();
    debug_assert!(r.iter().zip(&d).all(|(ri, di)| ri < di));
    Ok(GriffithSpec {
        rho: rho.clone(),
        n,
        d,
        e,
        r,
    })
}

/// Axiomatic metadata of the Segre-product building block `X_{a,b}`: an
/// `(a+b)`-dimensional variety, smooth away from one closed point of full
/// codimension whose local depth is exactly `a` (so `S_a` but not `S_{a+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegreMetadata {
    pub dim: u64,
    pub singular_point_codim: u64,
    pub singular_point_depth: u64,
}

pub fn segre_depth_axioms(a: u64, b: u64) -> SegreMetadata {
    assert!(a >= 2, "X_{{a,b}} is singular only for a >= 2");
    assert!(b >= 1);
    SegreMetadata {
        dim: a + b,
        singular_point_codim: a + b,
        singular_point_depth: a,
    }
}

/// Stratum label for a profile pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum {
    Smooth,
    /// Index into the `d` sequence (0-based).
    Singular(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProfilePair {
    pub codim: u64,
    pub depth: u64,
    pub stratum: Stratum,
}

/// The multiset of `(codim, depth)` pairs realized by the example, with
/// stratum labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthProfile {
    pub total_dim: u64,
    pub pairs: Vec<ProfilePair>,
}

/// Enumerates the achievable `(codim, depth)` pairs: the smooth stratum
/// carries `(c, c)` for `0 <= c <= sum(d)`, and the stratum through the
/// `i`-th singular point carries `(d_i + c, r_i + c)` for
/// `0 <= c <= sum of the other d_j` (the removed locus keeps the singular
/// strata pairwise disjoint, so offsets never combine).
pub fn build_profile(spec: &GriffithSpec) -> DepthProfile {
    let total: u64 = spec.d.iter().sum();
    let mut pairs = Vec::new();
    for c in 0..=total {
        pairs.push(ProfilePair {
            codim: c,
            depth: c,
            stratum: Stratum::Smooth,
        });
    }
    for (i, (&di, &ri)) in spec.d.iter().zip(&spec.r).enumerate() {
        let others: u64 = total - di;
        for c in 0..=others {
            pairs.push(ProfilePair {
                codim: di + c,
                depth: ri + c,
                stratum: Stratum::Singular(i),
            });
        }
    }
    pairs.sort();
    DepthProfile {
        total_dim: total,
        pairs,
    }
}

/// `true` iff the structure sheaf of the profiled variety is `S_sigma`:
/// `depth >= sigma(codim)` for every realized pair (here `dim_x = codim x`).
pub fn profile_is_s(profile: &DepthProfile, sigma: &TailedFunction) -> bool {
    first_violation(profile, sigma).is_none()
}

/// The lexicographically first pair violating `depth >= sigma(codim)`.
pub fn first_violation(profile: &DepthProfile, sigma: &TailedFunction) -> Option<ProfilePair> {
    profile
        .pairs
        .iter()
        .find(|p| p.depth < sigma.eval(p.codim))
        .copied()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictnessWitness {
    pub rho_prime: TailedFunction,
    pub codim: u64,
    pub depth: u64,
    pub required: u64,
}

/// Outcome of the exhaustive strictness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictnessVerdict {
    /// Count of enumerated `rho'` with `t_n rho' > t_n rho`.
    pub candidates: usize,
    /// One witness per candidate, in enumeration order.
    pub witnesses: Vec<StrictnessWitness>,
    /// Candidates for which the profile unexpectedly stayed `S_{rho'}`.
    pub exceptions: Vec<TailedFunction>,
}

impl StrictnessVerdict {
    pub fn passes(&self) -> bool {
        self.exceptions.is_empty()
    }
}

/// Verifies the strictness claim by brute force: every `rho' in W` (prefix
/// horizon at most `horizon`) with `t_n rho' > t_n rho` must fail on the
/// profile, and the first violating pair is reported for each.
pub fn strictness_check(
    spec: &GriffithSpec,
    horizon: u64,
) -> Result<StrictnessVerdict, GriffithError> {
    if horizon < spec.n + 2 {
        return Err(GriffithError::HorizonTooSmall(horizon, spec.n + 2));
    }
    let profile = build_profile(spec);
    let t = spec.rho.inclination(spec.n);
    let mut verdict = StrictnessVerdict {
        candidates: 0,
        witnesses: Vec::new(),
        exceptions: Vec::new(),
    };
    for rho_prime in enumerate_w(horizon) {
        let tp = rho_prime.inclination(spec.n);
        if !t.lt(&tp) {
            continue;
        }
        verdict.candidates += 1;
        match first_violation(&profile, &rho_prime) {
            Some(pair) => verdict.witnesses.push(StrictnessWitness {
                required: rho_prime.eval(pair.codim),
                codim: pair.codim,
                depth: pair.depth,
                rho_prime,
            }),
            None => verdict.exceptions.push(rho_prime),
        }
    }
    Ok(verdict)
}

/// Point ids of the exported smooth stratum, generic point first.
pub fn smooth_point_ids(profile: &DepthProfile) -> Vec<PointId> {
    (0..=profile.total_dim)
        .map(|c| PointId(format!("s{c}")))
        .collect()
}

/// Exports the profile as a scheme model plus structure-sheaf data: one
/// specialization chain per stratum, singular chains hanging off the smooth
/// chain one step above their entry codimension.
pub fn export_model(spec: &GriffithSpec) -> ModelFile {
    let profile = build_profile(spec);
    let total = profile.total_dim;
    let mut points = Vec::new();
    let mut stalks: BTreeMap<PointId, Stalk> = BTreeMap::new();
    for c in 0..=total {
        let mut targets: Vec<PointId> = Vec::new();
        if c < total {
            targets.push(PointId(format!("s{}", c + 1)));
        }
        for (i, &di) in spec.d.iter().enumerate() {
            if di == c + 1 {
                targets.push(PointId(format!("y{i}_0")));
            }
        }
        points.push(PointDecl {
            id: PointId(format!("s{c}")),
            codim: c,
            components: vec!["X".into()],
            specializes_to: targets,
        });
        stalks.insert(PointId(format!("s{c}")), Stalk { dim: c, depth: c });
    }
    for (i, (&di, &ri)) in spec.d.iter().zip(&spec.r).enumerate() {
        let others = total - di;
        for c in 0..=others {
            let id = PointId(format!("y{i}_{c}"));
            let targets = if c < others {
                vec![PointId(format!("y{i}_{}", c + 1))]
            } else {
                Vec::new()
            };
            points.push(PointDecl {
                id: id.clone(),
                codim: di + c,
                components: vec!["X".into()],
                specializes_to: targets,
            });
            stalks.insert(
                id,
                Stalk {
                    dim: di + c,
                    depth: ri + c,
                },
            );
        }
    }
    ModelFile {
        components: vec![ComponentDecl {
            id: "X".into(),
            dim: total,
        }],
        points,
        sheaves: BTreeMap::from([("structure".to_string(), stalks)]),
        complexes: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_s_rho;

    fn f(s: &str) -> TailedFunction {
        s.parse().unwrap()
    }

    #[test]
    fn d_sequence_examples() {
        let spec = d_sequence(&TailedFunction::rho_r(2), 3).unwrap();
        assert_eq!((spec.d.as_slice(), spec.e.as_slice(), spec.r.as_slice()),
                   (&[3][..], &[1][..], &[2][..]));
        let spec = d_sequence(&TailedFunction::rho_r(3), 5).unwrap();
        assert_eq!((spec.d.as_slice(), spec.e.as_slice(), spec.r.as_slice()),
                   (&[5][..], &[2][..], &[3][..]));
        let spec = d_sequence(&f("0,1,2,2,3,3;+1"), 5).unwrap();
        assert_eq!((spec.d.as_slice(), spec.e.as_slice(), spec.r.as_slice()),
                   (&[3, 5][..], &[1, 2][..], &[2, 3][..]));
    }

    #[test]
    fn d_sequence_rejections() {
        assert_eq!(
            d_sequence(&TailedFunction::identity(), 4).unwrap_err().code(),
            "griffith.rho_is_identity"
        );
        assert_eq!(
            d_sequence(&TailedFunction::rho_r(2), 2).unwrap_err().code(),
            "griffith.n_below_three"
        );
        assert_eq!(
            d_sequence(&TailedFunction::zero(), 4).unwrap_err().code(),
            "griffith.rho_not_in_w"
        );
        // rho agreeing with id on [0, n] is rejected even if not id globally
        assert_eq!(
            d_sequence(&f("0,1,2,3,3;+0"), 3).unwrap_err().code(),
            "griffith.rho_is_identity"
        );
    }

    #[test]
    fn d_sequence_flat_step_postcondition() {
        for rho in enumerate_w(6) {
            for n in 3..=6u64 {
                let Ok(spec) = d_sequence(&rho, n) else { continue };
                let t = rho.inclination(n);
                for &m in &spec.d {
                    assert!(m <= n);
                    assert_eq!(t.eval(m), t.eval(m - 1));
                    assert!(t.eval(m + 1) > t.eval(m));
                }
            }
        }
    }

    #[test]
    fn segre_axioms() {
        assert_eq!(
            segre_depth_axioms(2, 1),
            SegreMetadata { dim: 3, singular_point_codim: 3, singular_point_depth: 2 }
        );
        assert_eq!(
            segre_depth_axioms(3, 2),
            SegreMetadata { dim: 5, singular_point_codim: 5, singular_point_depth: 3 }
        );
        for a in 2..6 {
            for b in 1..5 {
                let meta = segre_depth_axioms(a, b);
                assert!(meta.singular_point_depth < meta.singular_point_codim);
            }
        }
    }

    #[test]
    fn profile_golden_case() {
        let spec = d_sequence(&TailedFunction::rho_r(2), 3).unwrap();
        let profile = build_profile(&spec);
        let pairs: Vec<(u64, u64)> = profile.pairs.iter().map(|p| (p.codim, p.depth)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2), (3, 2), (3, 3)]);
        assert!(profile_is_s(&profile, &TailedFunction::rho_r(2)));
        let violation = first_violation(&profile, &TailedFunction::rho_r(3)).unwrap();
        assert_eq!((violation.codim, violation.depth), (3, 2));
    }

    #[test]
    fn profile_two_strata() {
        let spec = d_sequence(&f("0,1,2,2,3,3;+1"), 5).unwrap();
        let profile = build_profile(&spec);
        assert_eq!(profile.total_dim, 8);
        let has = |codim, depth| {
            profile.pairs.iter().any(|p| p.codim == codim && p.depth == depth)
        };
        for c in 0..=8 {
            assert!(has(c, c));
        }
        for c in 0..=5 {
            assert!(has(3 + c, 2 + c));
        }
        for c in 0..=3 {
            assert!(has(5 + c, 3 + c));
        }
        assert!(profile.pairs.iter().all(|p| p.depth <= p.codim));
    }

    #[test]
    fn profile_satisfies_block_conditions() {
        // each stratum meets the condition from its own building block
        for rho in enumerate_w(5) {
            for n in 3..=5u64 {
                let Ok(spec) = d_sequence(&rho, n) else { continue };
                let profile = build_profile(&spec);
                assert!(profile_is_s(&profile, &rho.inclination(n)));
                for (i, (&di, &ri)) in spec.d.iter().zip(&spec.r).enumerate() {
                    let block = TailedFunction::rho_r(ri).inclination(di);
                    assert!(rho.inclination(n).le(&block));
                    // pairs coming from this stratum (and the smooth one)
                    // satisfy the block's own condition
                    for p in profile.pairs.iter().filter(|p| {
                        p.stratum == Stratum::Smooth || p.stratum == Stratum::Singular(i)
                    }) {
                        assert!(p.depth >= block.eval(p.codim));
                    }
                }
            }
        }
    }

    #[test]
    fn strictness_golden_case() {
        let spec = d_sequence(&TailedFunction::rho_r(2), 3).unwrap();
        let verdict = strictness_check(&spec, 10).unwrap();
        assert!(verdict.passes());
        assert!(verdict.candidates > 0);
        // rho_3 is among the candidates and fails at (3, 2)
        let w = verdict
            .witnesses
            .iter()
            .find(|w| w.rho_prime == TailedFunction::rho_r(3))
            .expect("rho_3 dominates t_3 rho_2");
        assert_eq!((w.codim, w.depth, w.required), (3, 2, 3));
        // t_n rho itself is not a candidate
        assert!(verdict
            .witnesses
            .iter()
            .all(|w| w.rho_prime != spec.rho.inclination(3)));
        assert_eq!(
            strictness_check(&spec, 3).unwrap_err().code(),
            "griffith.horizon_too_small"
        );
    }

    #[test]
    fn profile_depends_only_on_pair_multiset() {
        // permuting the factors permutes the strata but not the pairs
        let spec = d_sequence(&f("0,1,2,2,3,3;+1"), 5).unwrap();
        let mut permuted = spec.clone();
        permuted.d.reverse();
        permuted.e.reverse();
        permuted.r.reverse();
        let a: Vec<(u64, u64)> = build_profile(&spec)
            .pairs
            .iter()
            .map(|p| (p.codim, p.depth))
            .collect();
        let mut b: Vec<(u64, u64)> = build_profile(&permuted)
            .pairs
            .iter()
            .map(|p| (p.codim, p.depth))
            .collect();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn export_model_round_trip() {
        let spec = d_sequence(&f("0,1,2,2,3,3;+1"), 5).unwrap();
        let file = export_model(&spec);
        let model = file.model().expect("exported model validates");
        let sheaf = file.sheaf("structure", &model).unwrap();
        sheaf.validate(&model, None).expect("structure sheaf validates");
        // the sheaf realizes exactly the profile's pairs
        let profile = build_profile(&spec);
        let mut realized: Vec<(u64, u64)> = sheaf
            .stalks
            .values()
            .map(|s| (s.dim, s.depth))
            .collect();
        realized.sort();
        let mut expected: Vec<(u64, u64)> = profile
            .pairs
            .iter()
            .map(|p| (p.codim, p.depth))
            .collect();
        expected.sort();
        assert_eq!(realized, expected);
        // the smooth locus is open and dense
        let u = smooth_point_ids(&profile).into_iter().collect();
        assert!(model.is_open(&u) && model.is_dense(&u));
        // agreement between profile predicates and the model-level check
        for sigma in [TailedFunction::rho_r(2), TailedFunction::rho_r(3), f("0,1,2,2,3,3;+1")] {
            assert_eq!(
                profile_is_s(&profile, &sigma),
                is_s_rho(&sheaf, &sigma, &model).passes
            );
        }
    }
}
