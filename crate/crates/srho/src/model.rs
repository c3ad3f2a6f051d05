//! Finite depth-poset models of equidimensional schemes.
//!
//! A [`SchemeModel`] is a finite poset of abstract points carrying declared
//! codimensions and component memberships; `x <= y` means `y` lies in the
//! closure of `x`.  Sheaves are modeled by per-point `(dim, depth)` data,
//! complexes by graded star/shriek support sets.  Every predicate here
//! (c-codimension, openness, perversity checks, t-structure membership,
//! `S_rho` loci) is decidable from that data alone.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perversity::NumericalPerversity;
use crate::tailed::TailedFunction;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub String);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(pub String);

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for ComponentId {
    fn from(s: &str) -> Self {
        ComponentId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("[{}] model declares no components", self.code())]
    NoComponents,
    #[error("[{}] duplicate component id {0}", self.code())]
    DuplicateComponent(ComponentId),
    #[error("[{}] duplicate point id {0}", self.code())]
    DuplicatePoint(PointId),
    #[error("[{}] components must share one dimension (equidimensionality); {0} has dim {1}, expected {2}", self.code())]
    DimMismatch(ComponentId, u64, u64),
    #[error("[{}] point {0} references unknown component {1}", self.code())]
    UnknownComponent(PointId, ComponentId),
    #[error("[{}] point {0} belongs to no component", self.code())]
    NoComponentMembership(PointId),
    #[error("[{}] point {0} specializes to unknown point {1}", self.code())]
    UnknownPoint(PointId, PointId),
    #[error("[{}] point {0} has codim {1} exceeding the model dimension {2}", self.code())]
    CodimExceedsDim(PointId, u64, u64),
    #[error("[{}] specialization {0} -> {1} does not strictly increase codimension ({2} -> {3})", self.code())]
    CodimInversion(PointId, PointId, u64, u64),
    #[error("[{}] component {0} must contain exactly one codim-0 point, found {1}", self.code())]
    GenericPointCount(ComponentId, usize),
    #[error("[{}] set is not specialization-closed: contains {0} but not its specialization {1}", self.code())]
    NotSpecializationClosed(PointId, PointId),
    #[error("[{}] set is not open: {0} is in the set but its generization {1} is not", self.code())]
    OpenSetRequired(PointId, PointId),
    #[error("[{}] set is not dense: generic point {0} is missing", self.code())]
    DenseRequired(PointId),
    #[error("[{}] c-codimension of the complement is {0}, need at least 2", self.code())]
    CcodimTooSmall(Ccodim),
    #[error("[{}] open set is not irreducible: expected one generic point, found {0}", self.code())]
    IrreducibleRequired(usize),
    #[error("[{}] sheaf data references unknown point {0}", self.code())]
    SheafUnknownPoint(PointId),
    #[error("[{}] sheaf data at {0} lies outside the allowed domain", self.code())]
    SheafOutsideDomain(PointId),
    #[error("[{}] sheaf data at {0}: depth {1} exceeds dim {2}", self.code())]
    DepthExceedsDim(PointId, u64, u64),
    #[error("[{}] sheaf data at {0}: dim {1} exceeds codim {2}", self.code())]
    DimExceedsCodim(PointId, u64, u64),
    #[error("[{}] sheaf support is not closed: {0} is in the support but its specialization {1} is not", self.code())]
    SupportNotClosed(PointId, PointId),
    #[error("[{}] complex data references unknown point {0}", self.code())]
    ComplexUnknownPoint(PointId),
    #[error("[{}] no sheaf named {0:?} in the model file", self.code())]
    NoSuchSheaf(String),
    #[error("[{}] no complex named {0:?} in the model file", self.code())]
    NoSuchComplex(String),
    #[error("[{}] model file is not valid JSON: {0}", self.code())]
    BadJson(String),
}

impl ModelError {
    /// Stable diagnostic id naming the violated invariant.
    pub fn code(&self) -> &'static str {
        use ModelError::*;
        match self {
            NoComponents => "model.no_components",
            DuplicateComponent(_) => "model.duplicate_component",
            DuplicatePoint(_) => "model.duplicate_point",
            DimMismatch(..) => "model.dim_mismatch",
            UnknownComponent(..) => "model.unknown_component",
            NoComponentMembership(_) => "model.no_component_membership",
            UnknownPoint(..) => "model.unknown_point",
            CodimExceedsDim(..) => "model.codim_exceeds_dim",
            CodimInversion(..) => "model.codim_inversion",
            GenericPointCount(..) => "model.generic_point_count",
            NotSpecializationClosed(..) => "model.not_specialization_closed",
            OpenSetRequired(..) => "model.open_set_required",
            DenseRequired(_) => "model.dense_required",
            CcodimTooSmall(_) => "model.ccodim_too_small",
            IrreducibleRequired(_) => "model.irreducible_required",
            SheafUnknownPoint(_) => "sheaf.unknown_point",
            SheafOutsideDomain(_) => "sheaf.outside_domain",
            DepthExceedsDim(..) => "sheaf.depth_exceeds_dim",
            DimExceedsCodim(..) => "sheaf.dim_exceeds_codim",
            SupportNotClosed(..) => "sheaf.support_not_closed",
            ComplexUnknownPoint(_) => "complex.unknown_point",
            NoSuchSheaf(_) => "model.no_such_sheaf",
            NoSuchComplex(_) => "model.no_such_complex",
            BadJson(_) => "model.bad_json",
        }
    }
}

/// Componentwise codimension of a closed set; `Infinite` encodes the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ccodim {
    Finite(u64),
    Infinite,
}

impl Ccodim {
    pub fn at_least(self, bound: u64) -> bool {
        match self {
            Ccodim::Finite(v) => v >= bound,
            Ccodim::Infinite => true,
        }
    }
}

impl fmt::Display for Ccodim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ccodim::Finite(v) => v.fmt(f),
            Ccodim::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentDecl {
    pub id: ComponentId,
    pub dim: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointDecl {
    pub id: PointId,
    pub codim: u64,
    pub components: Vec<ComponentId>,
    #[serde(default)]
    pub specializes_to: Vec<PointId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub codim: u64,
    pub components: BTreeSet<ComponentId>,
    /// Direct specialization edges (points lying in this point's closure).
    pub specializes_to: BTreeSet<PointId>,
}

/// A validated finite depth-poset model of an equidimensional scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeModel {
    dim: u64,
    components: BTreeMap<ComponentId, u64>,
    points: BTreeMap<PointId, PointRecord>,
    /// Reflexive-transitive specialization closure: `closure[x]` is every `y`
    /// with `x <= y`, i.e. the points of `closure(x)`.
    closure: BTreeMap<PointId, BTreeSet<PointId>>,
}

impl SchemeModel {
    pub fn new(components: Vec<ComponentDecl>, points: Vec<PointDecl>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(ModelError::NoComponents);
        }
        let dim = components[0].dim;
        let mut comp_map = BTreeMap::new();
        for c in &components {
            if comp_map.insert(c.id.clone(), c.dim).is_some() {
                return Err(ModelError::DuplicateComponent(c.id.clone()));
            }
            if c.dim != dim {
                return Err(ModelError::DimMismatch(c.id.clone(), c.dim, dim));
            }
        }
        let mut point_map: BTreeMap<PointId, PointRecord> = BTreeMap::new();
        for p in &points {
            if p.components.is_empty() {
                return Err(ModelError::NoComponentMembership(p.id.clone()));
            }
            for c in &p.components {
                if !comp_map.contains_key(c) {
                    return Err(ModelError::UnknownComponent(p.id.clone(), c.clone()));
                }
            }
            if p.codim > dim {
                return Err(ModelError::CodimExceedsDim(p.id.clone(), p.codim, dim));
            }
            let record = PointRecord {
                codim: p.codim,
                components: p.components.iter().cloned().collect(),
                specializes_to: p.specializes_to.iter().cloned().collect(),
            };
            if point_map.insert(p.id.clone(), record).is_some() {
                return Err(ModelError::DuplicatePoint(p.id.clone()));
            }
        }
        for (id, rec) in &point_map {
            for target in &rec.specializes_to {
                let Some(t) = point_map.get(target) else {
                    return Err(ModelError::UnknownPoint(id.clone(), target.clone()));
                };
                if t.codim <= rec.codim {
                    return Err(ModelError::CodimInversion(
                        id.clone(),
                        target.clone(),
                        rec.codim,
                        t.codim,
                    ));
                }
            }
        }
        for cid in comp_map.keys() {
            let generic = point_map
                .values()
                .filter(|rec| rec.codim == 0 && rec.components.contains(cid))
                .count();
            if generic != 1 {
                return Err(ModelError::GenericPointCount(cid.clone(), generic));
            }
        }
        // codim strictly increases along edges, so the edge relation is a DAG
        // and a straightforward DFS computes the closure.
        let mut closure: BTreeMap<PointId, BTreeSet<PointId>> = BTreeMap::new();
        let mut order: Vec<PointId> = point_map.keys().cloned().collect();
        order.sort_by_key(|id| std::cmp::Reverse(point_map[id].codim));
        for id in order {
            let mut reach: BTreeSet<PointId> = BTreeSet::new();
            reach.insert(id.clone());
            for target in &point_map[&id].specializes_to {
                reach.extend(closure[target].iter().cloned());
            }
            closure.insert(id, reach);
        }
        Ok(SchemeModel {
            dim,
            components: comp_map,
            points: point_map,
            closure,
        })
    }

    /// Common dimension of all components.
    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn components(&self) -> &BTreeMap<ComponentId, u64> {
        &self.components
    }

    pub fn points(&self) -> &BTreeMap<PointId, PointRecord> {
        &self.points
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.points.contains_key(id)
    }

    pub fn codim(&self, id: &PointId) -> u64 {
        self.points[id].codim
    }

    /// All points of `closure(x)`, including `x` itself.
    pub fn specializations(&self, id: &PointId) -> &BTreeSet<PointId> {
        &self.closure[id]
    }

    /// All `x` with `id` in `closure(x)`, including `id` itself.
    pub fn generizations(&self, id: &PointId) -> BTreeSet<PointId> {
        self.closure
            .iter()
            .filter(|(_, reach)| reach.contains(id))
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn generic_points(&self) -> BTreeSet<PointId> {
        self.points
            .iter()
            .filter(|(_, rec)| rec.codim == 0)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn all_point_ids(&self) -> BTreeSet<PointId> {
        self.points.keys().cloned().collect()
    }

    pub fn complement(&self, set: &BTreeSet<PointId>) -> BTreeSet<PointId> {
        self.points
            .keys()
            .filter(|id| !set.contains(*id))
            .cloned()
            .collect()
    }

    /// Checks that `set` is closed, i.e. specialization-closed.
    pub fn check_specialization_closed(&self, set: &BTreeSet<PointId>) -> Result<(), ModelError> {
        for x in set {
            for y in self.specializations(x) {
                if !set.contains(y) {
                    return Err(ModelError::NotSpecializationClosed(x.clone(), y.clone()));
                }
            }
        }
        Ok(())
    }

    /// Openness: closed under generization.
    pub fn is_open(&self, set: &BTreeSet<PointId>) -> bool {
        self.check_open(set).is_ok()
    }

    pub fn check_open(&self, set: &BTreeSet<PointId>) -> Result<(), ModelError> {
        for y in set {
            for x in self.generizations(y) {
                if !set.contains(&x) {
                    return Err(ModelError::OpenSetRequired(y.clone(), x));
                }
            }
        }
        Ok(())
    }

    /// Density: contains every generic point.
    pub fn is_dense(&self, set: &BTreeSet<PointId>) -> bool {
        self.check_dense(set).is_ok()
    }

    pub fn check_dense(&self, set: &BTreeSet<PointId>) -> Result<(), ModelError> {
        for g in self.generic_points() {
            if !set.contains(&g) {
                return Err(ModelError::DenseRequired(g));
            }
        }
        Ok(())
    }

    /// Componentwise codimension of a closed set `Z`:
    /// `min` over components meeting `Z` of the least codimension of a
    /// `Z`-point in that component; infinite when `Z` is empty.
    pub fn ccodim(&self, z: &BTreeSet<PointId>) -> Result<Ccodim, ModelError> {
        self.check_specialization_closed(z)?;
        let mut best: Option<u64> = None;
        for cid in self.components.keys() {
            let in_component = z
                .iter()
                .filter(|id| self.points[*id].components.contains(cid))
                .map(|id| self.points[id].codim)
                .min();
            if let Some(v) = in_component {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok(best.map_or(Ccodim::Infinite, Ccodim::Finite))
    }

    /// Plain codimension of a nonempty set: least codimension of its points.
    pub fn set_codim(&self, set: &BTreeSet<PointId>) -> Option<u64> {
        set.iter().map(|id| self.codim(id)).min()
    }
}

/// A perversity assignment on a model, as a total map point -> integer.
pub type PerversityMap = BTreeMap<PointId, i64>;

/// Checks the defining inequalities of a perversity: whenever
/// `codim(y) >= codim(x)`, both `p(y) >= p(x)` and
/// `codim(y) - p(y) >= codim(x) - p(x)`.
pub fn perversity_check(p: &PerversityMap, model: &SchemeModel) -> bool {
    let ids: Vec<&PointId> = model.points().keys().collect();
    assert!(
        ids.iter().all(|id| p.contains_key(*id)),
        "perversity map must be total on the model's points"
    );
    for x in &ids {
        for y in &ids {
            let (cx, cy) = (model.codim(x) as i64, model.codim(y) as i64);
            if cy >= cx && (p[*y] < p[*x] || cy - p[*y] < cx - p[*x]) {
                return false;
            }
        }
    }
    true
}

/// The standard perversity `p_pi = pi . codim` induced by a numerical
/// perversity.
pub fn induced_perversity(pi: &NumericalPerversity, model: &SchemeModel) -> PerversityMap {
    model
        .points()
        .iter()
        .map(|(id, rec)| (id.clone(), pi.eval(rec.codim) as i64))
        .collect()
}

/// The minimal standard perversity `s` for the pair `(X, U)`.
pub fn standard_s(model: &SchemeModel, u: &BTreeSet<PointId>) -> Result<PerversityMap, ModelError> {
    let threshold = standard_threshold(model, u)?;
    Ok(model
        .points()
        .iter()
        .map(|(id, rec)| (id.clone(), if rec.codim < threshold { 0 } else { 1 }))
        .collect())
}

/// The maximal standard perversity `c` for the pair `(X, U)`.
pub fn standard_c(model: &SchemeModel, u: &BTreeSet<PointId>) -> Result<PerversityMap, ModelError> {
    let threshold = standard_threshold(model, u)?;
    Ok(model
        .points()
        .iter()
        .map(|(id, rec)| {
            let v = if rec.codim < threshold {
                rec.codim
            } else {
                rec.codim - 1
            };
            (id.clone(), v as i64)
        })
        .collect())
}

fn standard_threshold(model: &SchemeModel, u: &BTreeSet<PointId>) -> Result<u64, ModelError> {
    model.check_open(u)?;
    model.check_dense(u)?;
    let z = model.complement(u);
    match model.ccodim(&z)? {
        Ccodim::Infinite => Ok(model.dim() + 1),
        Ccodim::Finite(v) if v >= 2 => Ok(v),
        other => Err(ModelError::CcodimTooSmall(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stalk {
    pub dim: u64,
    pub depth: u64,
}

/// Per-point `(dim, depth)` data for a coherent sheaf; absent points carry a
/// vanishing stalk.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SheafData {
    pub stalks: BTreeMap<PointId, Stalk>,
}

impl SheafData {
    pub fn new(stalks: BTreeMap<PointId, Stalk>) -> Self {
        SheafData { stalks }
    }

    pub fn support(&self) -> BTreeSet<PointId> {
        self.stalks.keys().cloned().collect()
    }

    pub fn restrict(&self, set: &BTreeSet<PointId>) -> SheafData {
        SheafData {
            stalks: self
                .stalks
                .iter()
                .filter(|(id, _)| set.contains(*id))
                .map(|(id, s)| (id.clone(), *s))
                .collect(),
        }
    }

    /// Validates the sheaf invariants against a model.  When `domain` is
    /// given, stalks must lie inside it and the support-closure condition is
    /// checked relative to it (for data living on an open subset).
    pub fn validate(
        &self,
        model: &SchemeModel,
        domain: Option<&BTreeSet<PointId>>,
    ) -> Result<(), ModelError> {
        for (id, stalk) in &self.stalks {
            if !model.contains(id) {
                return Err(ModelError::SheafUnknownPoint(id.clone()));
            }
            if let Some(dom) = domain {
                if !dom.contains(id) {
                    return Err(ModelError::SheafOutsideDomain(id.clone()));
                }
            }
            if stalk.depth > stalk.dim {
                return Err(ModelError::DepthExceedsDim(id.clone(), stalk.depth, stalk.dim));
            }
            if stalk.dim > model.codim(id) {
                return Err(ModelError::DimExceedsCodim(
                    id.clone(),
                    stalk.dim,
                    model.codim(id),
                ));
            }
        }
        for id in self.stalks.keys() {
            for y in model.specializations(id) {
                let inside = domain.is_none_or(|dom| dom.contains(y));
                if inside && !self.stalks.contains_key(y) {
                    return Err(ModelError::SupportNotClosed(id.clone(), y.clone()));
                }
            }
        }
        Ok(())
    }

    /// Embeds the sheaf as complex data: star support `{0}`, shriek support
    /// with minimum equal to the depth.
    pub fn embed(&self) -> ComplexData {
        ComplexData {
            points: self
                .stalks
                .iter()
                .map(|(id, stalk)| {
                    (
                        id.clone(),
                        Supports {
                            star: BTreeSet::from([0]),
                            shriek: BTreeSet::from([stalk.depth as i64]),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Supports {
    #[serde(default)]
    pub star: BTreeSet<i64>,
    #[serde(default)]
    pub shriek: BTreeSet<i64>,
}

/// Graded support data for an object of the derived category:
/// `star = { k : H^k(i*_x F) != 0 }` and `shriek = { k : H^k(i^!_x F) != 0 }`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexData {
    pub points: BTreeMap<PointId, Supports>,
}

impl ComplexData {
    pub fn validate(&self, model: &SchemeModel) -> Result<(), ModelError> {
        for id in self.points.keys() {
            if !model.contains(id) {
                return Err(ModelError::ComplexUnknownPoint(id.clone()));
            }
        }
        Ok(())
    }

    fn supports(&self, id: &PointId) -> Option<&Supports> {
        self.points.get(id)
    }
}

/// Membership in `pD^{<=0}`: at every point, `H^k(i*_x F) = 0` for `k > p(x)`.
/// Empty supports pass vacuously.
pub fn in_pd_le0(f: &ComplexData, p: &PerversityMap, model: &SchemeModel) -> bool {
    model.points().keys().all(|id| {
        f.supports(id)
            .and_then(|s| s.star.iter().max())
            .is_none_or(|&max| max <= p[id])
    })
}

/// Membership in `pD^{>=0}`: at every point, `H^k(i^!_x F) = 0` for `k < p(x)`.
pub fn in_pd_ge0(f: &ComplexData, p: &PerversityMap, model: &SchemeModel) -> bool {
    model.points().keys().all(|id| {
        f.supports(id)
            .and_then(|s| s.shriek.iter().min())
            .is_none_or(|&min| min >= p[id])
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrhoViolation {
    pub point: PointId,
    pub dim: u64,
    pub depth: u64,
    pub required: u64,
}

/// Verdict of the `S_rho` test: pass/fail plus every violating point, in
/// point-id order (so the first entry is the lexicographically least witness).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrhoVerdict {
    pub passes: bool,
    pub violations: Vec<SrhoViolation>,
}

/// Tests `depth_x(F) >= rho(dim_x(F))` at every support point.
pub fn is_s_rho(f: &SheafData, rho: &TailedFunction, model: &SchemeModel) -> SrhoVerdict {
    let mut violations = Vec::new();
    for (id, stalk) in &f.stalks {
        debug_assert!(model.contains(id));
        let required = rho.eval(stalk.dim);
        if stalk.depth < required {
            violations.push(SrhoViolation {
                point: id.clone(),
                dim: stalk.dim,
                depth: stalk.depth,
                required,
            });
        }
    }
    SrhoVerdict {
        passes: violations.is_empty(),
        violations,
    }
}

/// The `S_rho` locus of a sheaf together with an openness report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrhoLocus {
    pub locus: BTreeSet<PointId>,
    /// `Some((member, missing_generization))` when the locus fails to be
    /// generization-closed; openness is asserted on generated models but the
    /// model format cannot guarantee it, so counterexamples are reported
    /// rather than assumed away.
    pub non_open_witness: Option<(PointId, PointId)>,
}

/// Points at which the sheaf is `S_rho` (vacuously so off the support).
pub fn s_rho_locus(f: &SheafData, rho: &TailedFunction, model: &SchemeModel) -> SrhoLocus {
    let locus: BTreeSet<PointId> = model
        .points()
        .keys()
        .filter(|id| {
            f.stalks
                .get(*id)
                .is_none_or(|stalk| stalk.depth >= rho.eval(stalk.dim))
        })
        .cloned()
        .collect();
    let mut non_open_witness = None;
    'outer: for y in &locus {
        for x in model.generizations(y) {
            if !locus.contains(&x) {
                non_open_witness = Some((y.clone(), x));
                break 'outer;
            }
        }
    }
    SrhoLocus {
        locus,
        non_open_witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityWarning {
    pub codim_z: u64,
    pub codim_u: u64,
    pub message: String,
}

/// For irreducible `U`, warns when `codim(Z) <= codim(U) + 1`: the category
/// of middle objects reduces to zero there.  Never blocks computation.
pub fn triviality_warning(
    model: &SchemeModel,
    u: &BTreeSet<PointId>,
) -> Result<Option<TrivialityWarning>, ModelError> {
    // irreducibility: a unique minimal point under specialization
    let minimal: Vec<&PointId> = u
        .iter()
        .filter(|y| {
            model
                .generizations(y)
                .into_iter()
                .all(|x| &x == *y || !u.contains(&x))
        })
        .collect();
    if minimal.len() != 1 {
        return Err(ModelError::IrreducibleRequired(minimal.len()));
    }
    let codim_u = model.codim(minimal[0]);
    let z = model.complement(u);
    let Some(codim_z) = model.set_codim(&z) else {
        return Ok(None);
    };
    if codim_z <= codim_u + 1 {
        Ok(Some(TrivialityWarning {
            codim_z,
            codim_u,
            message: format!(
                "codim(Z) = {codim_z} <= codim(U) + 1 = {}: the middle category is trivial",
                codim_u + 1
            ),
        }))
    } else {
        Ok(None)
    }
}

/// On-disk model file: components, points, and named sheaf/complex data sets.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelFile {
    pub components: Vec<ComponentDecl>,
    pub points: Vec<PointDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sheaves: BTreeMap<String, BTreeMap<PointId, Stalk>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, BTreeMap<PointId, Supports>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::BadJson(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    /// Builds and validates the scheme model.
    pub fn model(&self) -> Result<SchemeModel, ModelError> {
        SchemeModel::new(self.components.clone(), self.points.clone())
    }

    /// Fetches and validates a named sheaf against `model`.
    pub fn sheaf(&self, name: &str, model: &SchemeModel) -> Result<SheafData, ModelError> {
        let stalks = self
            .sheaves
            .get(name)
            .ok_or_else(|| ModelError::NoSuchSheaf(name.to_string()))?;
        let data = SheafData::new(stalks.clone());
        // support closure is checked relative to the whole model only when the
        // data spans it; callers restricting to an open set re-validate there.
        for (id, stalk) in &data.stalks {
            if !model.contains(id) {
                return Err(ModelError::SheafUnknownPoint(id.clone()));
            }
            if stalk.depth > stalk.dim {
                return Err(ModelError::DepthExceedsDim(id.clone(), stalk.depth, stalk.dim));
            }
            if stalk.dim > model.codim(id) {
                return Err(ModelError::DimExceedsCodim(
                    id.clone(),
                    stalk.dim,
                    model.codim(id),
                ));
            }
        }
        Ok(data)
    }

    pub fn complex(&self, name: &str, model: &SchemeModel) -> Result<ComplexData, ModelError> {
        let points = self
            .complexes
            .get(name)
            .ok_or_else(|| ModelError::NoSuchComplex(name.to_string()))?;
        let data = ComplexData {
            points: points.clone(),
        };
        data.validate(model)?;
        Ok(data)
    }
}
