//! Decision engine: relative `S_rho`, IC-definedness, and certificate
//! checking for extension and finite `S_rho`-ification.
//!
//! All verdicts are total and deterministic: a failing check names the
//! lexicographically least witness, and every reported table is ordered by
//! point id.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    in_pd_ge0, induced_perversity, is_s_rho, s_rho_locus, Ccodim, ModelError, PointId,
    SchemeModel, SheafData,
};
use crate::perversity::{p_rho_criterion, pi_min, PerversityError};
use crate::tailed::TailedFunction;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Perversity(#[from] PerversityError),
    #[error("[{}] rho must be in W", self.code())]
    RhoNotInW,
    #[error("[{}] ccodim of the closed complement is {0}, need at least 2", self.code())]
    CcodimTooSmall(Ccodim),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Model(e) => e.code(),
            EngineError::Perversity(e) => e.code(),
            EngineError::RhoNotInW => "engine.rho_not_in_w",
            EngineError::CcodimTooSmall(_) => "engine.ccodim_too_small",
        }
    }
}

/// A depth shortfall at a point, measured against the relative bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthViolation {
    pub point: PointId,
    pub codim: u64,
    pub depth: u64,
    pub required: u64,
}

/// Verdict of the relative `S_rho` condition for the pair `(X, U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeSrhoVerdict {
    pub ccodim_z: Ccodim,
    pub passes: bool,
    pub violations: Vec<DepthViolation>,
    /// The same condition evaluated through the derived category: membership
    /// of the embedded sheaf in `pD^{>=0}` for `p = (pi_{rho,n})+ . codim`.
    /// Always equals `passes`; kept as an independently computed field.
    pub dge0_membership: bool,
    /// The absolute condition `depth >= rho(dim)` on stalks, for comparison.
    pub plain_srho: bool,
}

/// The relative `S_rho` condition: `depth_x(F) >= p_rho_criterion(codim x)`
/// at every stalk of `F`, where the level `n` is `ccodim(X \ U)`.
///
/// With `Z` empty the relative condition degenerates to the absolute one and
/// the verdict reports `is_s_rho`.  A finite `ccodim(Z) < 2` is rejected:
/// the extension theory needs the complement in codimension at least two.
pub fn relative_srho(
    f: &SheafData,
    rho: &TailedFunction,
    model: &SchemeModel,
    u: &BTreeSet<PointId>,
) -> Result<RelativeSrhoVerdict, EngineError> {
    if !rho.in_w() {
        return Err(EngineError::RhoNotInW);
    }
    model.check_open(u)?;
    model.check_dense(u)?;
    f.validate(model, None)?;
    let plain = is_s_rho(f, rho, model).passes;
    let z = model.complement(u);
    let ccodim_z = model.ccodim(&z)?;
    let n = match ccodim_z {
        Ccodim::Infinite => {
            return Ok(RelativeSrhoVerdict {
                ccodim_z,
                passes: plain,
                violations: is_s_rho(f, rho, model)
                    .violations
                    .into_iter()
                    .map(|v| DepthViolation {
                        point: v.point.clone(),
                        codim: model.codim(&v.point),
                        depth: v.depth,
                        required: v.required,
                    })
                    .collect(),
                dge0_membership: plain,
                plain_srho: plain,
            })
        }
        Ccodim::Finite(n) if n >= 2 => n,
        other => return Err(EngineError::CcodimTooSmall(other)),
    };
    let mut violations = Vec::new();
    for (id, stalk) in &f.stalks {
        let codim = model.codim(id);
        let required = p_rho_criterion(codim, rho, n);
        if stalk.depth < required {
            violations.push(DepthViolation {
                point: id.clone(),
                codim,
                depth: stalk.depth,
                required,
            });
        }
    }
    let p_plus = induced_perversity(&pi_min(rho, n)?.pi_plus(n), model);
    let dge0_membership = in_pd_ge0(&f.embed(), &p_plus, model);
    let passes = violations.is_empty();
    debug_assert_eq!(passes, dge0_membership);
    Ok(RelativeSrhoVerdict {
        ccodim_z,
        passes,
        violations,
        dge0_membership,
        plain_srho: plain,
    })
}

/// Verdict on whether the intermediate-extension formula applies to the
/// pushforward data directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcVerdict {
    pub defined: bool,
    pub ccodim_z: Ccodim,
    /// First stalk on `U` breaking the depth bound, when not defined.
    pub witness: Option<DepthViolation>,
    /// Sufficient condition: the data is supported on all of `U` and is
    /// absolutely `S_rho` there.
    pub full_support_and_srho: bool,
}

/// Decides whether `IC` is defined on the given data: every stalk of the
/// sheaf on `U` must already meet the relative depth bound.
pub fn ic_defined(
    f_on_u: &SheafData,
    rho: &TailedFunction,
    model: &SchemeModel,
    u: &BTreeSet<PointId>,
) -> Result<IcVerdict, EngineError> {
    if !rho.in_w() {
        return Err(EngineError::RhoNotInW);
    }
    model.check_open(u)?;
    model.check_dense(u)?;
    f_on_u.validate(model, Some(u))?;
    let z = model.complement(u);
    let ccodim_z = model.ccodim(&z)?;
    let full_support_and_srho =
        f_on_u.support() == *u && is_s_rho(f_on_u, rho, model).passes;
    let n = match ccodim_z {
        Ccodim::Infinite => {
            return Ok(IcVerdict {
                defined: true,
                ccodim_z,
                witness: None,
                full_support_and_srho,
            })
        }
        Ccodim::Finite(n) if n >= 2 => n,
        other => return Err(EngineError::CcodimTooSmall(other)),
    };
    let witness = f_on_u.stalks.iter().find_map(|(id, stalk)| {
        let codim = model.codim(id);
        let required = p_rho_criterion(codim, rho, n);
        (stalk.depth < required).then(|| DepthViolation {
            point: id.clone(),
            codim,
            depth: stalk.depth,
            required,
        })
    });
    Ok(IcVerdict {
        defined: witness.is_none(),
        ccodim_z,
        witness,
        full_support_and_srho,
    })
}

/// An extension problem: open dense `U` in the model, sheaf data on `U`, and
/// the depth condition to extend along.
#[derive(Debug, Clone)]
pub struct ExtensionProblem {
    pub model: SchemeModel,
    pub u: BTreeSet<PointId>,
    pub pushforward: SheafData,
    pub rho: TailedFunction,
}

impl ExtensionProblem {
    pub fn validate(&self) -> Result<(), EngineError> {
        if !self.rho.in_w() {
            return Err(EngineError::RhoNotInW);
        }
        self.model.check_open(&self.u)?;
        self.model.check_dense(&self.u)?;
        self.pushforward.validate(&self.model, Some(&self.u))?;
        Ok(())
    }

    pub fn certify(&self, candidate: &SheafData) -> Result<ExtensionVerdict, EngineError> {
        certify_extension(
            &self.model,
            &self.u,
            &self.pushforward,
            &self.rho,
            candidate,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedClause {
    pub clause: String,
    pub witness: Option<PointId>,
}

/// Verdict of the extension certificate check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionVerdict {
    pub pass: bool,
    pub failures: Vec<FailedClause>,
    pub relative: RelativeSrhoVerdict,
    /// Whether the candidate also meets the relative `S_2` bound; when the
    /// certificate passes this reports the coincidence with the `S_2`
    /// extension.
    pub s2_bound_holds: bool,
}

/// Checks an extension certificate: the candidate must restrict to the given
/// data on `U` (clause `ext.restriction`) and satisfy the relative `S_rho`
/// condition (clause `ext.depth`).
pub fn certify_extension(
    model: &SchemeModel,
    u: &BTreeSet<PointId>,
    pushforward: &SheafData,
    rho: &TailedFunction,
    candidate: &SheafData,
) -> Result<ExtensionVerdict, EngineError> {
    if !rho.in_w() {
        return Err(EngineError::RhoNotInW);
    }
    model.check_open(u)?;
    model.check_dense(u)?;
    pushforward.validate(model, Some(u))?;
    candidate.validate(model, None)?;
    let mut failures = Vec::new();
    let restricted = candidate.restrict(u);
    if restricted != *pushforward {
        let witness = u
            .iter()
            .find(|id| restricted.stalks.get(*id) != pushforward.stalks.get(*id))
            .cloned();
        failures.push(FailedClause {
            clause: "ext.restriction".to_string(),
            witness,
        });
    }
    let relative = relative_srho(candidate, rho, model, u)?;
    if !relative.passes {
        failures.push(FailedClause {
            clause: "ext.depth".to_string(),
            witness: relative.violations.first().map(|v| v.point.clone()),
        });
    }
    let s2_bound_holds =
        relative_srho(candidate, &TailedFunction::rho_r(2), model, u)?.passes;
    Ok(ExtensionVerdict {
        pass: failures.is_empty(),
        failures,
        relative,
        s2_bound_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequiredBound {
    pub point: PointId,
    pub codim: u64,
    pub required: u64,
}

/// Verdict of the finite `S_rho`-ification certificate check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrificationVerdict {
    /// `false` when the hypotheses fail (non-open locus, or complement of
    /// c-codimension below two); nothing is certified in that case.
    pub applicable: bool,
    pub reason: Option<String>,
    /// The `S_rho` locus `U` of the input sheaf.
    pub locus: BTreeSet<PointId>,
    pub ccodim_complement: Option<Ccodim>,
    /// Depth a candidate must reach at each point outside the locus.
    pub required_bounds: Vec<RequiredBound>,
    /// Whether the `S_2` locus of the input equals its `S_rho` locus.
    pub s2_locus_coincides: bool,
    /// Present when a candidate was supplied and the hypotheses hold.
    pub extension: Option<ExtensionVerdict>,
}

impl SrificationVerdict {
    pub fn pass(&self) -> bool {
        self.applicable && self.extension.as_ref().is_none_or(|e| e.pass)
    }
}

/// Checks a finite `S_rho`-ification certificate for `F`: computes the
/// `S_rho` locus `U`, verifies `ccodim(X \ U) >= 2`, tabulates the depth
/// each candidate must attain on the complement, and (when a candidate is
/// supplied) runs the extension certificate against `F|U`.
pub fn certify_srification(
    model: &SchemeModel,
    f: &SheafData,
    rho: &TailedFunction,
    candidate: Option<&SheafData>,
) -> Result<SrificationVerdict, EngineError> {
    if !rho.in_w() {
        return Err(EngineError::RhoNotInW);
    }
    f.validate(model, None)?;
    let locus_report = s_rho_locus(f, rho, model);
    let locus = locus_report.locus;
    let s2_locus_coincides =
        s_rho_locus(f, &TailedFunction::rho_r(2), model).locus == locus;
    if let Some((member, missing)) = locus_report.non_open_witness {
        return Ok(SrificationVerdict {
            applicable: false,
            reason: Some(format!(
                "the S_rho locus is not open: {member} is in it but its generization {missing} is not"
            )),
            locus,
            ccodim_complement: None,
            required_bounds: Vec::new(),
            s2_locus_coincides,
            extension: None,
        });
    }
    let z = model.complement(&locus);
    let ccodim_z = model.ccodim(&z)?;
    let n = match ccodim_z {
        Ccodim::Infinite => {
            // F is already S_rho everywhere; it is its own ification.
            return Ok(SrificationVerdict {
                applicable: true,
                reason: None,
                locus,
                ccodim_complement: Some(ccodim_z),
                required_bounds: Vec::new(),
                s2_locus_coincides,
                extension: match candidate {
                    Some(c) => Some(certify_extension(
                        model,
                        &model.all_point_ids(),
                        f,
                        rho,
                        c,
                    )?),
                    None => None,
                },
            });
        }
        Ccodim::Finite(n) if n >= 2 => n,
        other => {
            return Ok(SrificationVerdict {
                applicable: false,
                reason: Some(format!(
                    "ccodim of the complement of the S_rho locus is {other}, need at least 2"
                )),
                locus,
                ccodim_complement: Some(other),
                required_bounds: Vec::new(),
                s2_locus_coincides,
                extension: None,
            })
        }
    };
    let required_bounds = z
        .iter()
        .map(|id| {
            let codim = model.codim(id);
            RequiredBound {
                point: id.clone(),
                codim,
                required: p_rho_criterion(codim, rho, n),
            }
        })
        .collect();
    let extension = match candidate {
        Some(c) => Some(certify_extension(
            model,
            &locus,
            &f.restrict(&locus),
            rho,
            c,
        )?),
        None => None,
    };
    Ok(SrificationVerdict {
        applicable: true,
        reason: None,
        locus,
        ccodim_complement: Some(ccodim_z),
        required_bounds,
        s2_locus_coincides,
        extension,
    })
}
