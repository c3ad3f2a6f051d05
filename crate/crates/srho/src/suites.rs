//! Exhaustive verification suites shared by the CLI and the acceptance tests.
//!
//! Each suite sweeps a finite, horizon-bounded family and reports one
//! `CheckResult` per claim: how many candidates were examined and which (if
//! any) broke the claim.  The suites re-derive everything through at least
//! two routes, so a pass is a cross-check, not a tautology.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::griffith::{
    build_profile, d_sequence, first_violation, profile_is_s, strictness_check,
};
use crate::perversity::{
    enumerate_perversities, enumerate_pn_rho, exists_pi_plus_eq_rho, phi, pi_max, pi_min,
    p_rho_criterion, p_rho_criterion_via_perversity, NumericalPerversity,
};
use crate::tailed::{enumerate_staircase, enumerate_w, TailedFunction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub candidates: usize,
    pub exceptions: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.exceptions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            if check.passed() {
                writeln!(
                    f,
                    "{}/{}: PASS ({} candidates)",
                    self.name, check.name, check.candidates
                )?;
            } else {
                writeln!(
                    f,
                    "{}/{}: FAIL ({} candidates, {} exceptions)",
                    self.name,
                    check.name,
                    check.candidates,
                    check.exceptions.len()
                )?;
                for e in check.exceptions.iter().take(5) {
                    writeln!(f, "  exception: {e}")?;
                }
            }
        }
        write!(
            f,
            "{}: {}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

struct Check {
    name: &'static str,
    candidates: usize,
    exceptions: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, candidates: 0, exceptions: Vec::new() }
    }

    fn record(&mut self, ok: bool, witness: impl Fn() -> String) {
        self.candidates += 1;
        if !ok {
            self.exceptions.push(witness());
        }
    }

    fn done(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            candidates: self.candidates,
            exceptions: self.exceptions,
        }
    }
}

/// Nonemptiness, extremal elements, and the plus-shift existence criterion
/// of the level-`n` perversity sets, swept exhaustively.
pub fn prop33_suite(horizon: u64) -> SuiteReport {
    // P_2(f) is nonempty exactly when f lies in W, over every staircase
    // function with f(k) = k for k <= 1
    let mut nonempty = Check::new("p2_nonempty_iff_in_w");
    for f in enumerate_staircase(horizon) {
        if f.eval(1) != 1 {
            continue;
        }
        let members = enumerate_pn_rho(&f, 2, horizon.max(2)).expect("horizon >= 2");
        nonempty.record(!members.is_empty() == f.in_w(), || {
            format!("f = {f}: {} members, in_w = {}", members.len(), f.in_w())
        });
    }

    // the closed-form pi_min / pi_max are the elementwise min / max of the
    // enumerated membership list
    let mut extremal = Check::new("pmin_pmax_extremal");
    let window = 2 * horizon;
    for rho in enumerate_w(horizon) {
        for n in 2..=6u64 {
            let members = enumerate_pn_rho(&rho, n, horizon.max(n)).unwrap();
            let lo = pi_min(&rho, n).unwrap();
            let hi = pi_max(&rho, n).unwrap();
            let ok = !members.is_empty()
                && (0..=window).all(|k| {
                    let vals = members.iter().map(|pi| pi.eval(k));
                    vals.clone().min() == Some(lo.eval(k))
                        && vals.max() == Some(hi.eval(k))
                });
            extremal.record(ok, || format!("rho = {rho}, n = {n}"));
        }
    }

    // rho(n-1) < rho(n) decides whether some member has plus-shift exactly rho
    let mut exists = Check::new("exists_plus_closed_form");
    for rho in enumerate_w(horizon) {
        for n in 2..=6u64 {
            let brute = enumerate_pn_rho(&rho, n, horizon.max(n))
                .unwrap()
                .iter()
                .any(|pi| *pi.pi_plus(n).func() == rho);
            exists.record(brute == exists_pi_plus_eq_rho(&rho, n), || {
                format!("rho = {rho}, n = {n}: brute = {brute}")
            });
        }
    }

    SuiteReport {
        name: "prop33".to_string(),
        checks: vec![nonempty.done(), extremal.done(), exists.done()],
    }
}

/// The two-to-one map onto `W`, its compatibility with duality, and the
/// closed-form duals of the classical conditions.
pub fn duality_suite(horizon: u64) -> SuiteReport {
    let p2: Vec<NumericalPerversity> = enumerate_perversities(horizon)
        .into_iter()
        .filter(|pi| pi.in_pn(2))
        .collect();
    let w = enumerate_w(horizon);

    // fibers over W have size exactly two and equal {pi_min, pi_max}
    let mut two_to_one = Check::new("phi_two_to_one");
    let mut fibers: BTreeMap<String, Vec<&NumericalPerversity>> = BTreeMap::new();
    for pi in &p2 {
        fibers.entry(phi(pi).unwrap().to_string()).or_default().push(pi);
    }
    for rho in &w {
        let fiber = fibers.get(&rho.to_string()).map_or(&[][..], Vec::as_slice);
        let lo = pi_min(rho, 2).unwrap();
        let hi = pi_max(rho, 2).unwrap();
        let ok = fiber.len() == 2
            && fiber.iter().any(|pi| **pi == lo)
            && fiber.iter().any(|pi| **pi == hi);
        two_to_one.record(ok, || {
            format!("rho = {rho}: fiber size {}", fiber.len())
        });
    }
    // ... and phi hits nothing outside W
    let mut onto = Check::new("phi_image_in_w");
    for pi in &p2 {
        let image = phi(pi).unwrap();
        onto.record(image.in_w(), || format!("pi = {}: phi = {image}", pi.func()));
    }

    // numerical duality on P_2 conjugates to function duality on W
    let mut conj = Check::new("duality_conjugation");
    for pi in &p2 {
        let lhs = phi(&pi.numerical_dual()).unwrap();
        let rhs = phi(pi).unwrap().dual().unwrap();
        conj.record(lhs == rhs, || {
            format!("pi = {}: phi(dual pi) = {lhs}, dual(phi pi) = {rhs}", pi.func())
        });
    }

    let mut involution = Check::new("dual_involution");
    for rho in &w {
        let back = rho.dual().unwrap().dual().unwrap();
        involution.record(back == *rho, || format!("rho = {rho}: back = {back}"));
    }

    // dual(rho_r)(k) = k - min(k, r) + 2 for k >= 2, and dual(id) = rho_2
    let mut table = Check::new("dual_classical_table");
    for r in 2..=8u64 {
        let d = TailedFunction::rho_r(r).dual().unwrap();
        let ok = (0..=20u64)
            .all(|k| d.eval(k) == if k <= 1 { k } else { k - k.min(r) + 2 });
        table.record(ok, || format!("r = {r}: dual = {d}"));
    }
    table.record(
        TailedFunction::identity().dual().unwrap() == TailedFunction::rho_r(2),
        || "dual(id) != rho_2".to_string(),
    );

    SuiteReport {
        name: "duality".to_string(),
        checks: vec![
            two_to_one.done(),
            onto.done(),
            conj.done(),
            involution.done(),
            table.done(),
        ],
    }
}

/// Agreement of the piecewise depth-bound formula with its definition
/// through `pi_min` and the plus-shift.
pub fn prho_paths_suite(horizon: u64) -> SuiteReport {
    let mut agree = Check::new("two_path_agreement");
    for rho in enumerate_w(horizon) {
        for n in 2..=8u64 {
            for codim in 0..=2 * horizon {
                let direct = p_rho_criterion(codim, &rho, n);
                let derived = p_rho_criterion_via_perversity(codim, &rho, n).unwrap();
                agree.record(direct == derived, || {
                    format!("rho = {rho}, n = {n}, codim = {codim}: {direct} vs {derived}")
                });
            }
        }
    }
    SuiteReport {
        name: "prho-paths".to_string(),
        checks: vec![agree.done()],
    }
}

/// The strictness property of the example family, swept over every
/// admissible `(rho, n)` at the given horizons, plus the pinned golden case.
pub fn griffith_suite(rho_horizon: u64, strict_horizon: u64) -> SuiteReport {
    let mut satisfies = Check::new("profile_satisfies_inclination");
    let mut strict = Check::new("strictness_exhaustive");
    for rho in enumerate_w(rho_horizon) {
        for n in 3..=rho_horizon.min(6) {
            let Ok(spec) = d_sequence(&rho, n) else { continue };
            let profile = build_profile(&spec);
            satisfies.record(profile_is_s(&profile, &rho.inclination(n)), || {
                format!("rho = {rho}, n = {n}")
            });
            match strictness_check(&spec, strict_horizon) {
                Ok(verdict) => strict.record(verdict.passes(), || {
                    format!(
                        "rho = {rho}, n = {n}: {} surviving rho'",
                        verdict.exceptions.len()
                    )
                }),
                Err(e) => strict.record(false, || format!("rho = {rho}, n = {n}: {e}")),
            }
        }
    }

    let mut golden = Check::new("golden_case");
    let spec = d_sequence(&TailedFunction::rho_r(2), 3).unwrap();
    golden.record(
        spec.d == [3] && spec.e == [1] && spec.r == [2],
        || format!("d = {:?}, e = {:?}, r = {:?}", spec.d, spec.e, spec.r),
    );
    let profile = build_profile(&spec);
    let pairs: Vec<(u64, u64)> = profile.pairs.iter().map(|p| (p.codim, p.depth)).collect();
    golden.record(
        pairs == [(0, 0), (1, 1), (2, 2), (3, 2), (3, 3)],
        || format!("pairs = {pairs:?}"),
    );
    golden.record(profile_is_s(&profile, &TailedFunction::rho_r(2)), || {
        "golden profile fails its own condition".to_string()
    });
    golden.record(
        first_violation(&profile, &TailedFunction::rho_r(3))
            .map(|p| (p.codim, p.depth))
            == Some((3, 2)),
        || "expected first violation (3, 2) under the next condition".to_string(),
    );

    SuiteReport {
        name: "griffith".to_string(),
        checks: vec![satisfies.done(), strict.done(), golden.done()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_reduced_horizons() {
        assert!(prop33_suite(6).passed());
        assert!(duality_suite(6).passed());
        assert!(prho_paths_suite(6).passed());
        assert!(griffith_suite(5, 8).passed());
    }

    #[test]
    fn report_rendering_is_stable() {
        let a = format!("{}", duality_suite(5));
        let b = format!("{}", duality_suite(5));
        assert_eq!(a, b);
        assert!(a.contains("duality/phi_two_to_one: PASS"));
        assert!(a.ends_with("duality: PASS"));
    }

    #[test]
    fn failures_carry_witnesses() {
        let mut check = Check::new("demo");
        check.record(true, || unreachable!());
        check.record(false, || "bad candidate".to_string());
        let result = check.done();
        assert!(!result.passed());
        assert_eq!(result.candidates, 2);
        assert_eq!(result.exceptions, vec!["bad candidate".to_string()]);
    }
}
