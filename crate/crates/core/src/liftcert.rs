//! Lifting pairs of surfaces over GF(2) and GF(3) to the integers, checking
//! the reductions of the lift, and assembling certificates that combine the
//! computed facts with the cited steps that are not mechanized.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::audit::audit_all;
use crate::counting::{count_table, fixture_table, CountOptions, CountTable, Strategy};
use crate::geometry::{load_fixture, smoothness_check, GeometryError, SurfaceSpec};
use crate::lattice::{
    detect_hyperbolic_plane, enumerate_classes, lambda10, lambda6a, lambda6b, lift_contradiction,
    overlattice_candidates, GramLattice,
};
use crate::mpoly::MultiPoly;
use crate::zeta::rank_bound;
use crate::{IntPoly, Integers};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("cannot lift {a} and {b}: {reason}")]
    ShapeMismatch { a: String, b: String, reason: String },
    #[error("{0} is not a characteristic-0 spec")]
    NotCharacteristicZero(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The integer in {-2, ..., 3} congruent to `r2` mod 2 and `r3` mod 3.
pub fn crt6(r2: &BigInt, r3: &BigInt) -> i64 {
    let (a, b) = (r2.mod_floor(&BigInt::from(2)), r3.mod_floor(&BigInt::from(3)));
    (-2..=3i64)
        .find(|x| BigInt::from(x.rem_euclid(2)) == a && BigInt::from(x.rem_euclid(3)) == b)
        .expect("CRT has a solution mod 6")
}

fn lift_form(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let z = Integers::new();
    let mut out = MultiPoly::zero(z, a.vars().clone());
    let monos = a.terms().map(|(m, _)| m.clone()).chain(b.terms().map(|(m, _)| m.clone()));
    let mut seen: Vec<crate::mpoly::Monomial> = Vec::new();
    for m in monos {
        if seen.contains(&m) {
            continue;
        }
        let c = crt6(&a.coeff(&m), &b.coeff(&m));
        if c != 0 {
            out.add_term(m.clone(), BigInt::from(c));
        }
        seen.push(m);
    }
    out
}

/// Coefficient-wise CRT lift of a GF(2) spec and a GF(3) spec of the same shape.
pub fn crt_lift(name: &str, a: &SurfaceSpec, b: &SurfaceSpec) -> Result<SurfaceSpec, LiftError> {
    let mismatch = |reason: &str| LiftError::ShapeMismatch { a: a.name.clone(), b: b.name.clone(), reason: reason.into() };
    if (a.characteristic, b.characteristic) != (2, 3) {
        return Err(mismatch("characteristics must be 2 and 3"));
    }
    if a.ambient != b.ambient {
        return Err(mismatch("ambient types differ"));
    }
    if a.linear.len() != b.linear.len() || a.cubic.is_some() != b.cubic.is_some() {
        return Err(mismatch("form counts differ"));
    }
    let linear = a.linear.iter().zip(&b.linear).map(|(x, y)| lift_form(x, y)).collect();
    let quadric = lift_form(&a.quadric, &b.quadric);
    let cubic = a.cubic.as_ref().zip(b.cubic.as_ref()).map(|(x, y)| lift_form(x, y));
    Ok(SurfaceSpec::new(name, a.ambient, 0, linear, quadric, cubic)?)
}

fn form_names(spec: &SurfaceSpec) -> Vec<String> {
    let mut names: Vec<String> = (0..spec.linear.len()).map(|i| format!("linear[{i}]")).collect();
    names.push("quadric".into());
    if spec.cubic.is_some() {
        names.push("cubic".into());
    }
    names
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionCheck {
    pub p: u32,
    pub fixture: String,
    pub pass: bool,
    /// First form whose reduction differs.
    pub mismatch: Option<String>,
}

/// Reduces the lift form by form modulo 2 and 3 and compares with `a`, `b`.
pub fn verify_reductions(lift: &SurfaceSpec, a: &SurfaceSpec, b: &SurfaceSpec) -> Result<Vec<ReductionCheck>, LiftError> {
    if lift.characteristic != 0 {
        return Err(LiftError::NotCharacteristicZero(lift.name.clone()));
    }
    let names = form_names(lift);
    Ok([(2u32, a), (3u32, b)]
        .into_iter()
        .map(|(p, fixture)| {
            let m = BigInt::from(p);
            let mismatch = if lift.ambient != fixture.ambient || form_names(fixture) != names {
                Some("shape".to_string())
            } else {
                lift.forms()
                    .iter()
                    .zip(fixture.forms())
                    .zip(&names)
                    .find(|((l, f), _)| l.map_coeffs(Integers::new(), |c| c.mod_floor(&m)) != **f)
                    .map(|(_, n)| n.clone())
            };
            ReductionCheck { p, fixture: fixture.name.clone(), pass: mismatch.is_none(), mismatch }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Degree10,
    Degree6,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Degree10 => "degree10",
            Target::Degree6 => "degree6",
        }
    }

    pub fn parse(s: &str) -> Option<Target> {
        match s {
            "degree10" => Some(Target::Degree10),
            "degree6" => Some(Target::Degree6),
            _ => None,
        }
    }

    /// Lift name and the fixtures it reduces to mod 2 and mod 3.
    pub fn surfaces(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Target::Degree10 => ("lift10", "s2", "s3"),
            Target::Degree6 => ("lift6", "x2", "x3"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fact {
    pub id: String,
    pub statement: String,
    pub status: Status,
    /// Function or input the fact comes from.
    pub provenance: String,
    pub data: Value,
}

/// A step of the argument that is cited rather than computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assumption {
    pub id: String,
    pub statement: String,
    pub citations: Vec<String>,
    pub acknowledged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub statement: String,
    pub picard_rank: u32,
    pub facts: Vec<String>,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub target: Target,
    /// The lifted surface in fixture syntax.
    pub lift: String,
    pub facts: Vec<Fact>,
    pub assumptions: Vec<Assumption>,
    pub notes: Vec<String>,
    pub conclusion: Option<Conclusion>,
    /// Required facts that are missing or did not pass, and unacknowledged steps.
    pub blocking: Vec<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "certificate for {}", self.target.label());
        let _ = writeln!(s, "\nlift:\n{}", self.lift.trim_end());
        let _ = writeln!(s, "\nfacts:");
        for f in &self.facts {
            let _ = writeln!(s, "  [{:?}] {}: {}", f.status, f.id, f.statement);
        }
        let _ = writeln!(s, "\ncited steps:");
        for a in &self.assumptions {
            let _ = writeln!(s, "  {}: {}", a.id, a.statement);
            for c in &a.citations {
                let _ = writeln!(s, "    - {c}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "\nnote: {n}");
        }
        match &self.conclusion {
            Some(c) => {
                let _ = writeln!(s, "\nconclusion: {}", c.statement);
            }
            None => {
                let _ = writeln!(s, "\nno conclusion; blocked by: {}", self.blocking.join(", "));
            }
        }
        s
    }
}

const VAN_LUIJK: &str =
    "R. van Luijk, K3 surfaces with Picard number one and infinitely many rational points, Algebra Number Theory 1 (2007) 1-15";
const VAN_LUIJK_JNT: &str =
    "R. van Luijk, An elliptic K3 surface associated to Heron triangles, J. Number Theory 123 (2007) 92-119";
const ELSENHANS_JAHNEL: &str =
    "A.-S. Elsenhans and J. Jahnel, The Picard group of a K3 surface and its reduction modulo p, Algebra Number Theory 5 (2011) 1027-1040, Theorem 1.4";
const RIEMANN_ROCH: &str = "Riemann-Roch theorem for surfaces: chi(D) = D^2/2 + 2 on a K3 surface";
const ADJUNCTION: &str = "adjunction formula: a smooth rational curve on a K3 surface has self-intersection -2";
const HUYBRECHTS: &str = "D. Huybrechts, Lectures on K3 Surfaces, Cambridge Univ. Press 2016, Chapter 2 (linear systems)";
const VAN_GEEMEN: &str = "B. van Geemen, Some remarks on Brauer groups of K3 surfaces, Adv. Math. 197 (2005) 222-247, (5.4)";
const BRAUER_FINITE: &str = "Wedderburn's little theorem: the Brauer group of a finite field is trivial";

fn assumptions(target: Target) -> Vec<Assumption> {
    let a = |id: &str, statement: &str, citations: &[&str]| Assumption {
        id: id.into(),
        statement: statement.into(),
        citations: citations.iter().map(|s| s.to_string()).collect(),
        acknowledged: true,
    };
    let specialization = a(
        "specialization",
        "The lift is smooth over Z localized at 2 and 3 because its fibres there are smooth; reduction then embeds the geometric Picard lattice of the generic fibre isometrically into that of each special fibre, so its rank is at most the rank bound at each prime.",
        &[VAN_LUIJK, VAN_LUIJK_JNT],
    );
    let primitive = a(
        "primitive-specialization",
        "At one of the two primes the specialization embedding has torsion-free cokernel, so a rank-2 geometric Picard lattice of the lift is isometric to the Picard lattice of that special fibre.",
        &[ELSENHANS_JAHNEL],
    );
    match target {
        Target::Degree10 => vec![
            specialization,
            primitive,
            a(
                "line-exclusion",
                "A class N with N^2 = 0 and N.H = 1 is effective by Riemann-Roch and is then represented by a line, whose square must be -2; so no such class exists and the index-5 overlattices do not occur.",
                &[RIEMANN_ROCH, ADJUNCTION],
            ),
            a(
                "frobenius-orbits",
                "Frobenius-invariant classes on the GF(2) fibre are represented by GF(2)-divisors; the two isotropic degree-5 classes are effective, and whether Frobenius fixes or swaps them, a GF(2)-hyperplane section splits in a way the section audit rules out.",
                &[BRAUER_FINITE, RIEMANN_ROCH],
            ),
        ],
        Target::Degree6 => vec![
            specialization,
            primitive,
            a(
                "pencil-exclusion",
                "If E is an effective class with mE = F for the class F of an elliptic pencil, then E and F induce the same morphism to P^1, forcing E = F and contradicting torsion-freeness of the Picard group.",
                &[RIEMANN_ROCH, HUYBRECHTS],
            ),
            a(
                "hyperbolic-plane-exclusion",
                "The even rank-2 lattice of discriminant -1 (the hyperbolic plane) is not the geometric Picard lattice of these surfaces.",
                &[VAN_GEEMEN],
            ),
        ],
    }
}

fn fact(id: &str, statement: &str, pass: bool, provenance: &str, data: Value) -> Fact {
    Fact {
        id: id.into(),
        statement: statement.into(),
        status: if pass { Status::Pass } else { Status::Fail },
        provenance: provenance.into(),
        data,
    }
}

fn failed(id: &str, statement: &str, provenance: &str, err: impl std::fmt::Display) -> Fact {
    Fact {
        id: id.into(),
        statement: statement.into(),
        status: Status::Inconclusive,
        provenance: provenance.into(),
        data: json!({ "error": err.to_string() }),
    }
}

/// Where count tables come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountSource {
    Fixtures,
    Computed(CountOptions),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertificateOptions {
    pub counts: CountSource,
    pub audit: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { counts: CountSource::Fixtures, audit: true }
    }
}

/// Facts the conclusion depends on.
pub fn required_facts(target: Target) -> Vec<&'static str> {
    match target {
        Target::Degree10 => vec![
            "smooth-s2",
            "smooth-s3",
            "counts-s3",
            "rank-bound-s3",
            "lattice-s3",
            "isotropic-classes",
            "overlattice-s3",
            "audit-s2",
            "reductions-lift10",
        ],
        Target::Degree6 => vec![
            "smooth-x2",
            "smooth-x3",
            "counts-x2",
            "counts-x3",
            "rank-bound-x2",
            "rank-bound-x3",
            "lattice-x2",
            "lattice-x3",
            "overlattice-x2",
            "overlattice-x3",
            "discriminant-obstruction",
            "reductions-lift6",
        ],
    }
}

fn smooth_fact(name: &str) -> Fact {
    let id = format!("smooth-{name}");
    let statement = format!("{name} is a smooth surface");
    match load_fixture(name).map_err(|e| e.to_string()).and_then(|s| smoothness_check(&s).map_err(|e| e.to_string())) {
        Ok(v) => fact(&id, &statement, v.is_smooth_surface(), "geometry::smoothness_check", json!({ "verdict": v.to_string() })),
        Err(e) => failed(&id, &statement, "geometry::smoothness_check", e),
    }
}

fn table_for(name: &str, source: CountSource) -> Result<CountTable, String> {
    match source {
        CountSource::Fixtures => fixture_table(name).map_err(|e| e.to_string()),
        CountSource::Computed(opts) => {
            let spec = load_fixture(name).map_err(|e| e.to_string())?;
            count_table(&spec, 1..=10, Strategy::default_for(spec.ambient), &opts).map_err(|e| e.to_string())
        }
    }
}

fn count_facts(name: &str, source: CountSource) -> Vec<Fact> {
    let (cid, rid) = (format!("counts-{name}"), format!("rank-bound-{name}"));
    let cst = format!("point counts of {name} over GF(p^n), n = 1..10, satisfy the Weil bounds");
    let rst = format!("the geometric Picard rank of {name} is at most 2");
    let prov = match source {
        CountSource::Fixtures => "fixture count table",
        CountSource::Computed(_) => "counting::count_table",
    };
    let table = match table_for(name, source) {
        Ok(t) => t,
        Err(e) => return vec![failed(&cid, &cst, prov, &e), failed(&rid, &rst, "zeta::rank_bound", e)],
    };
    let counts: Vec<String> = table.entries.iter().map(|(_, c)| c.to_string()).collect();
    let counts_ok = table.is_consistent() && table.prefix().len() >= 10;
    let cf = fact(&cid, &cst, counts_ok, prov, json!({ "p": table.p, "counts": counts }));
    let rf = match rank_bound(&table, 2) {
        Ok(w) => fact(
            &rid,
            &rst,
            w.rank_upper_bound() == 2,
            "zeta::rank_bound",
            json!({
                "known_classes": w.k,
                "unit_roots": w.unit_roots(),
                "upper_bound": w.rank_upper_bound(),
                "completions": w.candidates.len(),
                "c": w.c.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            }),
        ),
        Err(e) => failed(&rid, &rst, "zeta::rank_bound", e),
    };
    vec![cf, rf]
}

fn lattice_fact(id: &str, surface: &str, l: &GramLattice, disc: i64) -> Fact {
    fact(
        id,
        &format!("the classes {} and {} on {surface} span a lattice with Gram matrix {l} and discriminant {disc}", l.labels[0], l.labels[1]),
        l.discriminant() == disc,
        "lattice::GramLattice::discriminant (Gram matrix input)",
        json!({ "gram": l.gram, "labels": l.labels, "discriminant": l.discriminant() }),
    )
}

/// Index-p overlattice analysis for every prime p with p^2 | disc; each
/// survivor is tagged with the cited step excluding it.
fn overlattice_fact(id: &str, surface: &str, l: &GramLattice, exclude: impl Fn(&GramLattice) -> &'static str) -> Fact {
    let disc = l.discriminant().abs();
    let primes: Vec<i64> = (2..=disc).filter(|&p| (2..p).all(|d| p % d != 0) && disc % (p * p) == 0).collect();
    let mut rows = Vec::new();
    let mut ok = true;
    for &p in &primes {
        match overlattice_candidates(l, p) {
            Ok(cands) => {
                for c in cands {
                    let excluded_by = c.overlattice.as_ref().map(&exclude);
                    rows.push(json!({
                        "p": p,
                        "representative": [c.representative.0, c.representative.1],
                        "square": c.square,
                        "pairings": c.pairings,
                        "integrality": c.exclusion.as_ref().map(|e| e.to_string()),
                        "overlattice": c.overlattice.as_ref().map(|g| g.gram),
                        "overlattice_discriminant": c.overlattice_discriminant(),
                        "hyperbolic_plane": c.overlattice.as_ref().map(detect_hyperbolic_plane),
                        "excluded_by": excluded_by,
                    }));
                }
            }
            Err(_) => ok = false,
        }
    }
    fact(
        id,
        &format!("every proper finite-index overlattice of {l} on {surface} is excluded by integrality or by a cited step"),
        ok,
        "lattice::overlattice_candidates",
        json!({ "primes": primes, "candidates": rows }),
    )
}

fn reductions_fact(target: Target) -> (Fact, String) {
    let (lift, a, b) = target.surfaces();
    let id = format!("reductions-{lift}");
    let statement = format!("{lift} reduces to {a} mod 2 and to {b} mod 3, form by form");
    let run = || -> Result<(SurfaceSpec, Vec<ReductionCheck>), String> {
        let (sa, sb) = (load_fixture(a).map_err(|e| e.to_string())?, load_fixture(b).map_err(|e| e.to_string())?);
        let l = crt_lift(lift, &sa, &sb).map_err(|e| e.to_string())?;
        let checks = verify_reductions(&l, &sa, &sb).map_err(|e| e.to_string())?;
        Ok((l, checks))
    };
    match run() {
        Ok((l, checks)) => (
            fact(&id, &statement, checks.iter().all(|c| c.pass), "liftcert::verify_reductions", json!({ "checks": checks })),
            l.to_fixture_text(),
        ),
        Err(e) => (failed(&id, &statement, "liftcert::verify_reductions", e), String::new()),
    }
}

fn degree10_facts(opts: &CertificateOptions) -> Vec<Fact> {
    type Job<'a> = Box<dyn Fn() -> Vec<Fact> + Send + Sync + 'a>;
    let mut jobs: Vec<Job> = vec![
        Box::new(|| vec![smooth_fact("s2")]),
        Box::new(|| vec![smooth_fact("s3")]),
        Box::new(|| count_facts("s3", opts.counts)),
        Box::new(|| {
            let l = lambda10();
            let classes = enumerate_classes(&l, 0, (1, 0), 5, 10).expect("positive bound");
            let expected = vec![(0, 1), (1, -1)];
            vec![
                lattice_fact("lattice-s3", "the GF(3) fibre", &l, -25),
                fact(
                    "isotropic-classes",
                    "the classes N with N^2 = 0 and N.H = 5 are exactly M and H - M, and M.(H - M) = 5",
                    classes.is_complete() && classes.within_bound == expected && l.pairing((0, 1), (1, -1)) == 5,
                    "lattice::enumerate_classes",
                    json!({ "solutions": classes.within_bound, "complete": classes.is_complete() }),
                ),
                overlattice_fact("overlattice-s3", "the GF(3) fibre", &l, |_| "line-exclusion"),
            ]
        }),
    ];
    if opts.audit {
        jobs.push(Box::new(|| {
            let statement = "every GF(2)-hyperplane section of s2 is reduced, and a singular subscheme of degree >= 5 forces a GF(4)-component of degree >= 6";
            let f = match load_fixture("s2").map_err(|e| e.to_string()).and_then(|s| audit_all(&s).map_err(|e| e.to_string())) {
                Ok(sum) => fact(
                    "audit-s2",
                    statement,
                    sum.all_pass(),
                    "audit::audit_all",
                    json!({
                        "sections": sum.reports.len(),
                        "passed": sum.passed,
                        "failed": sum.failed,
                        "inconclusive": sum.inconclusive,
                        "factored": sum.reports.iter().filter(|r| r.component_degrees.is_some()).count(),
                    }),
                ),
                Err(e) => failed("audit-s2", statement, "audit::audit_all", e),
            };
            vec![f]
        }));
    }
    jobs.par_iter().flat_map(|j| j()).collect()
}

fn degree6_facts(opts: &CertificateOptions) -> Vec<Fact> {
    type Job<'a> = Box<dyn Fn() -> Vec<Fact> + Send + Sync + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| vec![smooth_fact("x2")]),
        Box::new(|| vec![smooth_fact("x3")]),
        Box::new(|| count_facts("x2", opts.counts)),
        Box::new(|| count_facts("x3", opts.counts)),
        Box::new(|| {
            let (a, b) = (lambda6a(), lambda6b());
            let verdict = lift_contradiction(&a, &b);
            let hyper = |g: &GramLattice| if detect_hyperbolic_plane(g) { "hyperbolic-plane-exclusion" } else { "pencil-exclusion" };
            vec![
                lattice_fact("lattice-x2", "the GF(2) fibre", &a, -16),
                lattice_fact("lattice-x3", "the GF(3) fibre", &b, -9),
                overlattice_fact("overlattice-x2", "the GF(2) fibre", &a, |_| "pencil-exclusion"),
                overlattice_fact("overlattice-x3", "the GF(3) fibre", &b, hyper),
                fact(
                    "discriminant-obstruction",
                    "no rank-2 lattice can be isometric to both fibre lattices: -9 is not a square multiple of -16",
                    verdict.is_contradiction(),
                    "lattice::lift_contradiction",
                    serde_json::to_value(&verdict).expect("serializes"),
                ),
            ]
        }),
    ];
    jobs.par_iter().flat_map(|j| j()).collect()
}

/// Conclusion gate: every required fact present with status pass and every
/// cited step acknowledged.
pub fn assemble(target: Target, lift: String, facts: Vec<Fact>, assumptions: Vec<Assumption>, notes: Vec<String>) -> Certificate {
    let mut blocking: Vec<String> = required_facts(target)
        .into_iter()
        .filter(|id| !facts.iter().any(|f| f.id == *id && f.status == Status::Pass))
        .map(String::from)
        .collect();
    for f in facts.iter().filter(|f| f.status != Status::Pass) {
        if !blocking.contains(&f.id) {
            blocking.push(f.id.clone());
        }
    }
    blocking.extend(assumptions.iter().filter(|a| !a.acknowledged).map(|a| a.id.clone()));
    if assumptions.len() != 4 {
        blocking.push("cited steps incomplete".into());
    }
    let conclusion = blocking.is_empty().then(|| Conclusion {
        statement: match target {
            Target::Degree10 => "the degree-10 lift has geometric Picard rank 1".into(),
            Target::Degree6 => "the degree-6 lift has geometric Picard rank 1".into(),
        },
        picard_rank: 1,
        facts: facts.iter().map(|f| f.id.clone()).collect(),
        assumptions: assumptions.iter().map(|a| a.id.clone()).collect(),
    });
    Certificate { target, lift, facts, assumptions, notes, conclusion, blocking }
}

pub fn build_certificate(target: Target, opts: &CertificateOptions) -> Certificate {
    let (mut facts, notes) = match target {
        Target::Degree10 => (degree10_facts(opts), Vec::new()),
        Target::Degree6 => (
            degree6_facts(opts),
            vec!["index-3 overlattices of (6 3 / 3 0): integrality admits (m, n) = (0, 1) and (1, 2) mod 3 and excludes (1, 1); the class (H + F)/3 is therefore not a candidate, while (H + 2F)/3 is, with a hyperbolic-plane overlattice".into()],
        ),
    };
    let (red, lift) = reductions_fact(target);
    facts.push(red);
    let order = required_facts(target);
    facts.sort_by_key(|f| order.iter().position(|id| *id == f.id).unwrap_or(usize::MAX));
    assemble(target, lift, facts, assumptions(target), notes)
}

/// Integer coefficient of largest absolute value, for readability checks.
pub fn max_abs_coeff(spec: &SurfaceSpec) -> i64 {
    spec.forms()
        .iter()
        .flat_map(|f| f.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>())
        .map(|c: BigInt| if c.is_zero() { 0 } else { c.to_i64().map_or(i64::MAX, i64::abs) })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::reduce_mod;

    #[test]
    fn crt_examples() {
        let b = |x: i64| BigInt::from(x);
        assert_eq!(crt6(&b(1), &b(2)), -1);
        assert_eq!(crt6(&b(0), &b(0)), 0);
        assert_eq!(crt6(&b(1), &b(1)), 1);
        assert_eq!(crt6(&b(0), &b(1)), -2);
        for r2 in 0..2 {
            for r3 in 0..3 {
                let x = crt6(&b(r2), &b(r3));
                assert!((-2..=3).contains(&x));
                assert_eq!((x.rem_euclid(2), x.rem_euclid(3)), (r2, r3));
            }
        }
    }

    #[test]
    fn fixture_lifts_round_trip() {
        for t in [Target::Degree10, Target::Degree6] {
            let (name, a, b) = t.surfaces();
            let (sa, sb) = (load_fixture(a).unwrap(), load_fixture(b).unwrap());
            let lift = crt_lift(name, &sa, &sb).unwrap();
            assert!(max_abs_coeff(&lift) <= 3);
            assert!(verify_reductions(&lift, &sa, &sb).unwrap().iter().all(|c| c.pass));
            let r2 = reduce_mod(&lift, 2).unwrap();
            let r3 = reduce_mod(&lift, 3).unwrap();
            assert_eq!((r2.quadric, r3.quadric), (sa.quadric.clone(), sb.quadric.clone()));
        }
    }

    #[test]
    fn corrupted_lifts() {
        let (sa, sb) = (load_fixture("x2").unwrap(), load_fixture("x3").unwrap());
        let lift = crt_lift("bumped", &sa, &sb).unwrap();
        let (m, c) = lift.quadric.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let bump = |d: i64| {
            let mut q = lift.quadric.clone();
            q.add_term(m.clone(), BigInt::from(d));
            lift.with_quadric("bumped", q).unwrap()
        };
        assert!(verify_reductions(&bump(6), &sa, &sb).unwrap().iter().all(|c| c.pass));
        let bad = verify_reductions(&bump(1), &sa, &sb).unwrap();
        assert!(bad.iter().any(|c| c.mismatch.as_deref() == Some("quadric")));
        assert!(!c.is_zero());
        assert!(crt_lift("x", &sb, &sa).is_err());
        assert!(crt_lift("x", &load_fixture("s2").unwrap(), &sb).is_err());
    }

    #[test]
    fn degree6_certificate_concludes() {
        let cert = build_certificate(Target::Degree6, &CertificateOptions::default());
        assert!(cert.blocking.is_empty(), "{:?}", cert.blocking);
        assert_eq!(cert.conclusion.as_ref().unwrap().picard_rank, 1);
        assert_eq!(cert.assumptions.len(), 4);
        for i in 0..cert.facts.len() {
            let mut facts = cert.facts.clone();
            let gone = facts.remove(i);
            let c = assemble(cert.target, cert.lift.clone(), facts, cert.assumptions.clone(), vec![]);
            assert!(c.conclusion.is_none(), "removing {} kept the conclusion", gone.id);
        }
        let again = build_certificate(Target::Degree6, &CertificateOptions::default());
        assert_eq!(cert.to_json(), again.to_json());
    }

    #[test]
    fn unacknowledged_step_blocks() {
        let cert = build_certificate(Target::Degree6, &CertificateOptions::default());
        let mut steps = cert.assumptions.clone();
        steps[0].acknowledged = false;
        let c = assemble(cert.target, cert.lift.clone(), cert.facts.clone(), steps, vec![]);
        assert!(c.conclusion.is_none());
        assert_eq!(c.blocking, vec!["specialization".to_string()]);
    }
}
