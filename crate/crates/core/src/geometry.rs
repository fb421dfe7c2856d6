//! Surface fixtures, reduction mod p, Jacobian singular subschemes and the
//! smoothness check on standard affine charts.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::ffield::{FieldError, GaloisField};
use crate::gbases::{GbError, IdealPresentation};
use crate::grassmann::{plucker_vars, standard_charts, Parametrization};
use crate::mpoly::{vars, MultiPoly, PolyError, Vars};
use crate::ring::Ring;
use crate::{FqPoly, IntPoly, Integers};

pub const P4_NAMES: [&str; 5] = ["x", "y", "z", "v", "w"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid surface spec: {0}")]
    Invalid(String),
    #[error("reduction of {name} mod {p} differs from the registered fixture {fixture}")]
    LiftInconsistency { name: String, p: u32, fixture: String },
    #[error("operation needs a positive characteristic spec")]
    NeedsPositiveCharacteristic,
    #[error("field characteristic {field} does not match spec characteristic {spec}")]
    CharacteristicMismatch { field: u32, spec: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// Type (1,1,1,2) complete intersection in Gr(2,5) ⊂ P^9.
    GrassmannCi,
    /// Type (2,3) complete intersection in P^4.
    P4Ci,
}

impl Ambient {
    pub fn label(self) -> &'static str {
        match self {
            Ambient::GrassmannCi => "grassmann-ci",
            Ambient::P4Ci => "p4-ci",
        }
    }

    pub fn vars(self) -> Vars {
        match self {
            Ambient::GrassmannCi => plucker_vars(),
            Ambient::P4Ci => vars(&P4_NAMES),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A surface given by integer forms; in positive characteristic the
/// coefficients are stored reduced to [0, p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub name: String,
    pub ambient: Ambient,
    pub characteristic: u32,
    pub linear: Vec<IntPoly>,
    pub quadric: IntPoly,
    pub cubic: Option<IntPoly>,
}

fn reduce_poly(p: &IntPoly, m: u32) -> IntPoly {
    let m = BigInt::from(m);
    p.map_coeffs(Integers::new(), |c| c.mod_floor(&m))
}

impl SurfaceSpec {
    /// Validates shape and degrees, and reduces coefficients if p > 0.
    pub fn new(
        name: &str,
        ambient: Ambient,
        characteristic: u32,
        linear: Vec<IntPoly>,
        quadric: IntPoly,
        cubic: Option<IntPoly>,
    ) -> Result<Self, GeometryError> {
        let v = ambient.vars();
        let rebase = |p: IntPoly| p.rebase(v.clone());
        let mut spec = SurfaceSpec {
            name: name.to_string(),
            ambient,
            characteristic,
            linear: linear.into_iter().map(rebase).collect::<Result<_, _>>()?,
            quadric: rebase(quadric)?,
            cubic: cubic.map(rebase).transpose()?,
        };
        if characteristic > 0 {
            spec.linear = spec.linear.iter().map(|p| reduce_poly(p, characteristic)).collect();
            spec.quadric = reduce_poly(&spec.quadric, characteristic);
            spec.cubic = spec.cubic.as_ref().map(|p| reduce_poly(p, characteristic));
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let check = |p: &IntPoly, d: u32, what: &str| -> Result<(), GeometryError> {
            if p.is_zero() || !p.is_homogeneous() || p.degree() != Some(d) {
                return Err(GeometryError::Invalid(format!(
                    "{what} must be a nonzero homogeneous form of degree {d}: {p}"
                )));
            }
            Ok(())
        };
        match self.ambient {
            Ambient::GrassmannCi => {
                if self.linear.len() != 3 || self.cubic.is_some() {
                    return Err(GeometryError::Invalid(
                        "grassmann-ci needs exactly 3 linear forms, 1 quadric and no cubic".into(),
                    ));
                }
                for l in &self.linear {
                    check(l, 1, "linear form")?;
                }
                check(&self.quadric, 2, "quadric")?;
            }
            Ambient::P4Ci => {
                let Some(c) = &self.cubic else {
                    return Err(GeometryError::Invalid("p4-ci needs a cubic".into()));
                };
                if !self.linear.is_empty() {
                    return Err(GeometryError::Invalid("p4-ci takes no linear forms".into()));
                }
                check(&self.quadric, 2, "quadric")?;
                check(c, 3, "cubic")?;
            }
        }
        if self.characteristic != 0 && !is_prime(self.characteristic) {
            return Err(GeometryError::Invalid(format!("characteristic {} is not prime", self.characteristic)));
        }
        Ok(())
    }

    pub fn vars(&self) -> Vars {
        self.ambient.vars()
    }

    /// Defining forms in order: linear forms, quadric, cubic.
    pub fn forms(&self) -> Vec<&IntPoly> {
        self.linear.iter().chain(Some(&self.quadric)).chain(self.cubic.as_ref()).collect()
    }

    /// Defining forms over a finite field of the spec's characteristic (or
    /// any characteristic for a characteristic-0 spec).
    pub fn forms_over(&self, field: &GaloisField) -> Result<Vec<FqPoly>, GeometryError> {
        let p = field.characteristic();
        if self.characteristic != 0 && self.characteristic != p {
            return Err(GeometryError::CharacteristicMismatch { field: p, spec: self.characteristic });
        }
        let m = BigInt::from(p);
        Ok(self
            .forms()
            .into_iter()
            .map(|f| {
                f.map_coeffs(field.clone(), |c| {
                    field.from_int(c.mod_floor(&m).to_i64().expect("reduced"))
                })
            })
            .collect())
    }

    /// True iff every defining form vanishes at the projective point.
    pub fn contains_point(&self, field: &GaloisField, point: &[crate::FieldElement]) -> Result<bool, GeometryError> {
        for f in self.forms_over(field)? {
            if !field.is_zero(f.evaluate(point)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_fixture_text(&self) -> String {
        let mut s = format!("name={}\nambient={}\nchar={}\n", self.name, self.ambient, self.characteristic);
        if !self.linear.is_empty() {
            s.push_str("linear:\n");
            for l in &self.linear {
                s.push_str(&format!("{l}\n"));
            }
        }
        s.push_str(&format!("quadric:\n{}\n", self.quadric));
        if let Some(c) = &self.cubic {
            s.push_str(&format!("cubic:\n{c}\n"));
        }
        s
    }

    /// Copy with the quadric replaced (used for controls and tests).
    pub fn with_quadric(&self, name: &str, quadric: IntPoly) -> Result<Self, GeometryError> {
        SurfaceSpec::new(
            name,
            self.ambient,
            self.characteristic,
            self.linear.clone(),
            quadric,
            self.cubic.clone(),
        )
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Parses the fixture text format.
pub fn parse_fixture(text: &str) -> Result<SurfaceSpec, GeometryError> {
    let mut header: HashMap<&str, &str> = HashMap::new();
    let mut sections: HashMap<&str, Vec<(usize, &str)>> = HashMap::new();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let err = |msg: &str| GeometryError::Parse { line: i + 1, msg: msg.to_string() };
        if line.is_empty() {
            continue;
        }
        if let Some(sec) = line.strip_suffix(':') {
            if !["linear", "quadric", "cubic"].contains(&sec) {
                return Err(err("unknown section"));
            }
            current = Some(sec);
            sections.entry(sec).or_default();
        } else if let (None, Some((k, v))) = (current, line.split_once('=')) {
            header.insert(k.trim(), v.trim());
        } else if let Some(sec) = current {
            sections.entry(sec).or_default().push((i + 1, line));
        } else {
            return Err(err("expected `key=value` header"));
        }
    }
    let get = |k: &str| header.get(k).copied().ok_or(GeometryError::Parse { line: 0, msg: format!("missing `{k}=`") });
    let ambient = match get("ambient")? {
        "grassmann-ci" => Ambient::GrassmannCi,
        "p4-ci" => Ambient::P4Ci,
        other => return Err(GeometryError::Parse { line: 0, msg: format!("unknown ambient `{other}`") }),
    };
    let characteristic: u32 = get("char")?
        .parse()
        .map_err(|_| GeometryError::Parse { line: 0, msg: "bad `char=`".into() })?;
    let v = ambient.vars();
    let polys = |sec: &str| -> Result<Vec<IntPoly>, GeometryError> {
        sections
            .get(sec)
            .map(|ls| {
                ls.iter()
                    .map(|(n, l)| {
                        MultiPoly::parse(Integers::new(), v.clone(), l)
                            .map_err(|e| GeometryError::Parse { line: *n, msg: e.to_string() })
                    })
                    .collect()
            })
            .unwrap_or(Ok(Vec::new()))
    };
    let linear = polys("linear")?;
    let mut quadric = polys("quadric")?;
    let mut cubic = polys("cubic")?;
    if quadric.len() != 1 || cubic.len() > 1 {
        return Err(GeometryError::Invalid("exactly one quadric and at most one cubic".into()));
    }
    SurfaceSpec::new(get("name")?, ambient, characteristic, linear, quadric.remove(0), cubic.pop())
}

const FIXTURES: [(&str, &str); 5] = [
    ("s2", include_str!("../fixtures/s2.surface")),
    ("s3", include_str!("../fixtures/s3.surface")),
    ("x2", include_str!("../fixtures/x2.surface")),
    ("x3", include_str!("../fixtures/x3.surface")),
    // s3 with x12*x14 added to the quadric; singular
    ("s3-singular", include_str!("../fixtures/s3-singular.surface")),
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

pub fn load_fixture(name: &str) -> Result<SurfaceSpec, GeometryError> {
    let text = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| GeometryError::UnknownFixture(name.to_string()))?;
    parse_fixture(text)
}

/// Registered reductions of the characteristic-0 lifts.
pub fn registered_reduction(name: &str, p: u32) -> Option<&'static str> {
    match (name, p) {
        ("lift10", 2) => Some("s2"),
        ("lift10", 3) => Some("s3"),
        ("lift6", 2) => Some("x2"),
        ("lift6", 3) => Some("x3"),
        _ => None,
    }
}

/// Coefficient-wise reduction of a characteristic-0 spec; for registered
/// lifts the result must equal the registered fixture.
pub fn reduce_mod(spec: &SurfaceSpec, p: u32) -> Result<SurfaceSpec, GeometryError> {
    if spec.characteristic != 0 {
        return Err(GeometryError::Invalid(format!("{} is not a characteristic-0 spec", spec.name)));
    }
    let reduced = SurfaceSpec::new(
        &format!("{}_mod{}", spec.name, p),
        spec.ambient,
        p,
        spec.linear.clone(),
        spec.quadric.clone(),
        spec.cubic.clone(),
    )?;
    match registered_reduction(&spec.name, p) {
        Some(fixture) => {
            let reg = load_fixture(fixture)?;
            let same = reg.ambient == reduced.ambient
                && reg.linear == reduced.linear
                && reg.quadric == reduced.quadric
                && reg.cubic == reduced.cubic;
            if !same {
                return Err(GeometryError::LiftInconsistency {
                    name: spec.name.clone(),
                    p,
                    fixture: fixture.to_string(),
                });
            }
            Ok(reg)
        }
        None => Ok(reduced),
    }
}

/// An affine chart of the ambient space with the spec's forms restricted to it.
#[derive(Clone, Debug)]
pub struct ChartEquations {
    pub label: String,
    pub vars: Vars,
    pub equations: Vec<FqPoly>,
}

/// Restricts forms to the standard charts: the 10 charts U_ij of Gr(2,5) or
/// the 5 coordinate charts of P^4.
pub fn chart_equations(
    ambient: Ambient,
    forms: &[FqPoly],
) -> Result<Vec<ChartEquations>, GeometryError> {
    match ambient {
        Ambient::GrassmannCi => standard_charts()
            .iter()
            .map(|ch| {
                let (i, j) = ch.pivots();
                Ok(ChartEquations {
                    label: format!("U{i}{j}"),
                    vars: ch.param_vars(),
                    equations: forms.iter().map(|f| ch.pullback(f)).collect::<Result<_, _>>()?,
                })
            })
            .collect(),
        Ambient::P4Ci => (0..5)
            .map(|k| {
                let rest: Vec<&str> = P4_NAMES.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, n)| *n).collect();
                let v = vars(&rest);
                let equations = forms
                    .iter()
                    .map(|f| {
                        let one = MultiPoly::one(f.ring().clone(), f.vars().clone());
                        f.substitute(&[(P4_NAMES[k], one)])?.rebase(v.clone())
                    })
                    .collect::<Result<_, PolyError>>()?;
                Ok(ChartEquations { label: format!("{}=1", P4_NAMES[k]), vars: v, equations })
            })
            .collect(),
    }
}

/// All c x c minors of a matrix of polynomials (rows x columns), by Laplace
/// expansion with memoized sub-determinants.
pub fn minors<R: Ring>(matrix: &[Vec<MultiPoly<R>>], c: usize) -> Vec<MultiPoly<R>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    if c == 0 || c > rows || c > cols {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rsel in subsets(rows, c) {
        let mut memo: HashMap<u32, MultiPoly<R>> = HashMap::new();
        for csel in subsets(cols, c) {
            let mask = csel.iter().fold(0u32, |m, &j| m | 1 << j);
            let d = det_rec(matrix, &rsel, 0, mask, &mut memo);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    out
}

fn det_rec<R: Ring>(
    m: &[Vec<MultiPoly<R>>],
    rsel: &[usize],
    k: usize,
    mask: u32,
    memo: &mut HashMap<u32, MultiPoly<R>>,
) -> MultiPoly<R> {
    if let Some(d) = memo.get(&mask) {
        return d.clone();
    }
    let row = &m[rsel[k]];
    let d = if k + 1 == rsel.len() {
        row[mask.trailing_zeros() as usize].clone()
    } else {
        let mut acc = MultiPoly::zero(row[0].ring().clone(), row[0].vars().clone());
        let mut sign_neg = false;
        for j in 0..32 {
            if mask >> j & 1 == 0 {
                continue;
            }
            if !row[j].is_zero() {
                let sub = det_rec(m, rsel, k + 1, mask & !(1 << j), memo);
                let term = row[j].mul(&sub);
                acc = if sign_neg { acc.sub(&term) } else { acc.add(&term) };
            }
            sign_neg = !sign_neg;
        }
        acc
    };
    memo.insert(mask, d.clone());
    d
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn jacobian<R: Ring>(eqs: &[MultiPoly<R>]) -> Vec<Vec<MultiPoly<R>>> {
    eqs.iter().map(|f| (0..f.nvars()).map(|i| f.derivative(i)).collect()).collect()
}

/// Affine singular subscheme of V(eqs) of codimension `codim`: the
/// equations plus all codim x codim minors of their Jacobian matrix.
pub fn singular_subscheme(
    field: &GaloisField,
    vars: Vars,
    eqs: &[FqPoly],
    codim: usize,
) -> Result<IdealPresentation<GaloisField>, GeometryError> {
    let mut gens: Vec<FqPoly> = eqs.to_vec();
    gens.extend(minors(&jacobian(eqs), codim));
    Ok(IdealPresentation::new(field.clone(), vars, gens)?)
}

#[derive(Clone, Debug)]
pub enum SmoothnessVerdict {
    Smooth { dim: i64 },
    Singular { chart: String, witness: IdealPresentation<GaloisField> },
    WrongDimension { dim: i64 },
    ResourcesExceeded { chart: String, error: GbError },
}

impl SmoothnessVerdict {
    pub fn is_smooth_surface(&self) -> bool {
        matches!(self, SmoothnessVerdict::Smooth { dim: 2 })
    }
}

impl fmt::Display for SmoothnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothnessVerdict::Smooth { dim } => write!(f, "smooth of dimension {dim}"),
            SmoothnessVerdict::Singular { chart, witness } => {
                write!(f, "singular on chart {chart} ({} generators)", witness.generators().len())
            }
            SmoothnessVerdict::WrongDimension { dim } => write!(f, "dimension {dim}, expected 2"),
            SmoothnessVerdict::ResourcesExceeded { chart, error } => {
                write!(f, "resources exceeded on chart {chart}: {error}")
            }
        }
    }
}

enum ChartOutcome {
    Done { dim: i64, singular_empty: bool, witness: IdealPresentation<GaloisField> },
    Exceeded(GbError),
}

/// Jacobian criterion on every standard chart over GF(p): smooth iff each
/// chart's singular ideal contains 1, every chart has dimension <= 2 and
/// some chart has dimension exactly 2.
pub fn smoothness_check(spec: &SurfaceSpec) -> Result<SmoothnessVerdict, GeometryError> {
    if spec.characteristic == 0 {
        return Err(GeometryError::NeedsPositiveCharacteristic);
    }
    let field = GaloisField::prime(spec.characteristic)?;
    let forms = spec.forms_over(&field)?;
    let charts = chart_equations(spec.ambient, &forms)?;
    let outcomes: Vec<(String, Result<ChartOutcome, GeometryError>)> = charts
        .par_iter()
        .map(|ch| {
            let run = || -> Result<ChartOutcome, GeometryError> {
                let codim = ch.vars.len() - 2;
                let plain = IdealPresentation::new(field.clone(), ch.vars.clone(), ch.equations.clone())?;
                let sing = singular_subscheme(&field, ch.vars.clone(), &ch.equations, codim)?;
                let res = plain
                    .groebner_basis()
                    .and_then(|g| Ok((g.dimension(), sing.groebner_basis()?.contains_one())));
                match res {
                    Ok((dim, singular_empty)) => Ok(ChartOutcome::Done { dim, singular_empty, witness: sing }),
                    Err(e @ GbError::ResourcesExceeded { .. }) => Ok(ChartOutcome::Exceeded(e)),
                    Err(e) => Err(e.into()),
                }
            };
            (ch.label.clone(), run())
        })
        .collect();
    let mut max_dim = -1;
    for (label, out) in outcomes {
        match out? {
            ChartOutcome::Exceeded(error) => return Ok(SmoothnessVerdict::ResourcesExceeded { chart: label, error }),
            ChartOutcome::Done { singular_empty: false, witness, .. } => {
                return Ok(SmoothnessVerdict::Singular { chart: label, witness })
            }
            ChartOutcome::Done { dim, .. } => max_dim = max_dim.max(dim),
        }
    }
    if max_dim != 2 {
        return Ok(SmoothnessVerdict::WrongDimension { dim: max_dim });
    }
    Ok(SmoothnessVerdict::Smooth { dim: 2 })
}
