//! Hyperplane-section audit of a Grassmannian surface over GF(2): every
//! section is checked for reducedness, the degree of its singular subscheme
//! is computed, and sections with a large singular subscheme get a plane
//! model over GF(4) whose factorization bounds the component degrees.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ffield::{FieldError, GaloisField};
use crate::gbases::{eliminate, factor_bivariate, GbError, IdealPresentation, MonomialOrder};
use crate::geometry::{chart_equations, jacobian, minors, singular_subscheme, Ambient, GeometryError, SurfaceSpec};
use crate::grassmann::{plucker_relations, plucker_vars, standard_charts, PLUCKER_NAMES};
use crate::linalg::{common_generalized_kernel_dim, Matrix};
use crate::mpoly::{vars, MultiPoly, PolyError, Vars};
use crate::FqPoly;

/// Singular-subscheme degree from which a plane model is required.
pub const SING_DEGREE_THRESHOLD: u64 = 5;
/// Component degree a large singular subscheme forces.
pub const LARGE_COMPONENT: u32 = 6;
/// Projection centers tried before a section is declared inconclusive.
pub const PROJECTION_RETRIES: usize = 20;
/// Degree of a hyperplane section of the surface.
pub const SECTION_DEGREE: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("the audit needs a grassmann-ci surface over GF(2), got {ambient} in characteristic {characteristic}")]
    WrongSurface { ambient: Ambient, characteristic: u32 },
    #[error("the linear forms of the surface are dependent")]
    DependentLinearForms,
    #[error("hyperplane class must be nonzero and below 2^7, got {0}")]
    BadClass(u8),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    /// Coefficients on the complement coordinates, bit k for coordinate k.
    pub bits: u8,
    pub hyperplane: String,
    pub reduced: bool,
    /// `None` when the singular locus is positive dimensional.
    pub sing_degree: Option<u64>,
    /// Degrees of the GF(4)-irreducible components of the plane model,
    /// largest first; only computed when the singular subscheme is large.
    pub component_degrees: Option<Vec<u32>>,
    pub outcome: Outcome,
    pub note: Option<String>,
}

impl SectionReport {
    pub fn pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for SectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sing = self.sing_degree.map_or("-".to_string(), |d| d.to_string());
        let comps = self.component_degrees.as_ref().map_or("-".to_string(), |c| format!("{c:?}"));
        write!(
            f,
            "{:07b} reduced={} sing_degree={} components={} {:?}",
            self.bits, self.reduced, sing, comps, self.outcome
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditSummary {
    pub surface: String,
    pub reports: Vec<SectionReport>,
    pub passed: usize,
    pub failed: Vec<u8>,
    pub inconclusive: Vec<u8>,
}

impl AuditSummary {
    pub fn all_pass(&self) -> bool {
        self.passed == self.reports.len() && !self.reports.is_empty()
    }
}

impl fmt::Display for AuditSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}/{} sections pass", self.surface, self.passed, self.reports.len())?;
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn gf2() -> GaloisField {
    GaloisField::prime(2).expect("2 is prime")
}

fn check_surface(spec: &SurfaceSpec) -> Result<(), AuditError> {
    if spec.ambient != Ambient::GrassmannCi || spec.characteristic != 2 {
        return Err(AuditError::WrongSurface { ambient: spec.ambient, characteristic: spec.characteristic });
    }
    Ok(())
}

fn linear_coeffs(field: &GaloisField, l: &FqPoly) -> Vec<crate::FieldElement> {
    (0..10)
        .map(|i| {
            let mut e = vec![0u16; 10];
            e[i] = 1;
            l.coeff(&crate::mpoly::Monomial::new(e))
        })
        .map(|c| if field.is_zero(c) { field.zero() } else { c })
        .collect()
}

/// Reduced row echelon form of the coefficient vectors and its pivots.
fn echelon(field: &GaloisField, forms: &[FqPoly]) -> (Matrix<GaloisField>, Vec<usize>) {
    let mut m = Matrix::from_rows(field.clone(), forms.iter().map(|l| linear_coeffs(field, l)).collect());
    let pivots = m.rref();
    (m, pivots)
}

/// Plücker coordinates outside the pivots of the surface's linear forms.
pub fn complement_coordinates(spec: &SurfaceSpec) -> Result<Vec<usize>, AuditError> {
    check_surface(spec)?;
    let f = gf2();
    let (_, pivots) = echelon(&f, &spec.forms_over(&f)?[..3]);
    if pivots.len() != 3 {
        return Err(AuditError::DependentLinearForms);
    }
    Ok((0..10).filter(|i| !pivots.contains(i)).collect())
}

/// The linear form of a hyperplane class.
pub fn section_form(spec: &SurfaceSpec, bits: u8) -> Result<FqPoly, AuditError> {
    if bits == 0 || bits >= 128 {
        return Err(AuditError::BadClass(bits));
    }
    let comp = complement_coordinates(spec)?;
    let f = gf2();
    let mut h = MultiPoly::zero(f.clone(), plucker_vars());
    for (k, &i) in comp.iter().enumerate() {
        if bits >> k & 1 == 1 {
            h = h.add(&MultiPoly::var(f.clone(), plucker_vars(), i));
        }
    }
    Ok(h)
}

/// All 127 hyperplane classes.
pub fn enumerate_sections(spec: &SurfaceSpec) -> Result<Vec<(u8, FqPoly)>, AuditError> {
    (1..128u8).map(|b| Ok((b, section_form(spec, b)?))).collect()
}

/// The section curve as an ideal on the P^5 cut out by the four linear
/// forms: Plücker relations and the quadric, restricted.
#[derive(Clone, Debug)]
pub struct SectionCurve {
    pub vars: Vars,
    pub gens: Vec<FqPoly>,
}

pub fn section_curve(spec: &SurfaceSpec, h: &FqPoly) -> Result<SectionCurve, AuditError> {
    check_surface(spec)?;
    let f = gf2();
    let forms = spec.forms_over(&f)?;
    let mut linear: Vec<FqPoly> = forms[..3].to_vec();
    linear.push(h.clone());
    let (m, pivots) = echelon(&f, &linear);
    if pivots.len() != 4 {
        return Err(AuditError::DependentLinearForms);
    }
    let free: Vec<usize> = (0..10).filter(|i| !pivots.contains(i)).collect();
    let names: Vec<&str> = free.iter().map(|&i| PLUCKER_NAMES[i]).collect();
    let v = vars(&names);
    let images: Vec<FqPoly> = (0..10)
        .map(|i| {
            if let Some(k) = free.iter().position(|&j| j == i) {
                return MultiPoly::var(f.clone(), v.clone(), k);
            }
            let row = pivots.iter().position(|&p| p == i).expect("pivot");
            let mut img = MultiPoly::zero(f.clone(), v.clone());
            for (k, &j) in free.iter().enumerate() {
                let c = *m.get(row, j);
                if !f.is_zero(c) {
                    img = img.sub(&MultiPoly::var(f.clone(), v.clone(), k).scale(&c));
                }
            }
            img
        })
        .collect();
    let mut gens: Vec<FqPoly> = plucker_relations(f.clone());
    gens.push(forms[3].clone());
    let gens = gens.iter().map(|g| g.compose(&images)).collect::<Result<Vec<_>, _>>()?;
    Ok(SectionCurve { vars: v, gens })
}

/// Numerator N(t) of the Hilbert series N(t) / (1 - t)^n of S / M for a
/// monomial ideal M, by pivoting on single variables.
fn hilbert_numerator(gens: &[Vec<u16>]) -> Vec<i64> {
    let mut gens: Vec<Vec<u16>> = gens.to_vec();
    minimalize(&mut gens);
    if gens.iter().all(|g| g.iter().filter(|&&e| e > 0).count() <= 1) {
        let mut out = vec![1i64];
        for g in &gens {
            let d: u16 = g.iter().sum();
            out = poly_sub(&out, &shift(&out, d as usize));
        }
        return out;
    }
    let g = gens.iter().find(|g| g.iter().filter(|&&e| e > 0).count() > 1).expect("mixed generator");
    let v = g.iter().position(|&e| e > 0).expect("nonzero");
    let n = g.len();
    let mut pivot = vec![0u16; n];
    pivot[v] = 1;
    let mut plus = gens.clone();
    plus.push(pivot.clone());
    let colon: Vec<Vec<u16>> = gens.iter().map(|g| g.iter().zip(&pivot).map(|(a, b)| a.saturating_sub(*b)).collect()).collect();
    poly_add(&hilbert_numerator(&plus), &shift(&hilbert_numerator(&colon), 1))
}

fn minimalize(gens: &mut Vec<Vec<u16>>) {
    gens.sort_by_key(|g| g.iter().sum::<u16>());
    gens.dedup();
    let mut out: Vec<Vec<u16>> = Vec::new();
    for g in gens.drain(..) {
        if !out.iter().any(|o| o.iter().zip(&g).all(|(a, b)| a <= b)) {
            out.push(g);
        }
    }
    *gens = out;
}

fn shift(p: &[i64], k: usize) -> Vec<i64> {
    let mut out = vec![0; k];
    out.extend_from_slice(p);
    out
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    (0..a.len().max(b.len())).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect()
}

fn poly_sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    (0..a.len().max(b.len())).map(|i| a.get(i).unwrap_or(&0) - b.get(i).unwrap_or(&0)).collect()
}

/// Projective dimension and degree of Proj(S / I) for a homogeneous ideal
/// with the given leading monomials; dimension -1 for the empty scheme.
pub fn projective_dimension_degree(nvars: usize, leading: &[Vec<u16>]) -> (i64, u64) {
    let mut num = hilbert_numerator(leading);
    let mut k = nvars as i64;
    loop {
        if k == 0 {
            return (-1, 0);
        }
        let at_one: i64 = num.iter().sum();
        if at_one != 0 {
            return (k - 1, at_one as u64);
        }
        // divide by 1 - t
        let mut q = Vec::with_capacity(num.len());
        let mut acc = 0;
        for &c in &num[..num.len() - 1] {
            acc += c;
            q.push(acc);
        }
        num = q;
        k -= 1;
    }
}

/// Singular subscheme of the section curve in P^5: the curve ideal plus the
/// 4 x 4 minors of its Jacobian. Returns its projective dimension and degree.
pub fn homogeneous_sing(curve: &SectionCurve) -> Result<(i64, u64), AuditError> {
    let f = gf2();
    let mut gens = curve.gens.clone();
    gens.extend(minors(&jacobian(&curve.gens), 4));
    let gb = IdealPresentation::new(f, curve.vars.clone(), gens)?.groebner_basis()?;
    let lms: Vec<Vec<u16>> = gb.leading_monomials().iter().map(|m| m.exps().to_vec()).collect();
    Ok(projective_dimension_degree(curve.vars.len(), &lms))
}

/// Per standard chart: the dimension of the singular locus and, when it is
/// finite, the length of the part lying on the Schubert cell of the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellContribution {
    pub chart: String,
    pub dimension: i64,
    pub cell_length: Option<usize>,
}

pub fn cell_contributions(spec: &SurfaceSpec, h: &FqPoly) -> Result<Vec<CellContribution>, AuditError> {
    check_surface(spec)?;
    let f = gf2();
    let mut forms = spec.forms_over(&f)?;
    forms.push(h.clone());
    let charts = chart_equations(Ambient::GrassmannCi, &forms)?;
    charts
        .iter()
        .zip(standard_charts())
        .map(|(ch, sc)| {
            let sing = singular_subscheme(&f, ch.vars.clone(), &ch.equations, 5)?;
            let gb = sing.groebner_basis()?;
            let dimension = gb.dimension();
            let cell_length = if dimension <= 0 {
                let n = gb.quotient_dimension()?;
                let mats = gb.multiplication_matrices(&sc.cell_coordinates())?;
                Some(common_generalized_kernel_dim(&f, n, &mats))
            } else {
                None
            };
            Ok(CellContribution { chart: ch.label.clone(), dimension, cell_length })
        })
        .collect()
}

/// Irreducible factors of a plane model over GF(4).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneModel {
    /// Affine equation F(1, y, z) of the image curve.
    pub equation: FqPoly,
    /// Degrees of the irreducible factors, largest first.
    pub degrees: Vec<u32>,
    pub squarefree: bool,
    /// Rows of the coordinate change x = A z; the model uses z0, z1, z2.
    pub projection: Vec<Vec<crate::FieldElement>>,
}

fn gf4() -> GaloisField {
    GaloisField::new(2, 2).expect("GF(4)")
}

fn random_invertible<R: Rng>(f: &GaloisField, n: usize, rng: &mut R) -> Matrix<GaloisField> {
    loop {
        let m = Matrix::from_rows(f.clone(), (0..n).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect());
        if m.rank() == n {
            return m;
        }
    }
}

/// Projects the curve from a random center to P^2 over GF(4). `None` when
/// the image has the wrong degree or meets the line at infinity in a
/// component.
pub fn try_plane_model<R: Rng>(curve: &SectionCurve, rng: &mut R) -> Result<Option<PlaneModel>, AuditError> {
    let f4 = gf4();
    let n = curve.vars.len();
    let a = random_invertible(&f4, n, rng);
    let znames: Vec<String> = (0..n).map(|i| format!("z{i}")).collect();
    let zrefs: Vec<&str> = znames.iter().map(String::as_str).collect();
    let zv = vars(&zrefs);
    let images: Vec<FqPoly> = (0..n)
        .map(|i| {
            let mut img = MultiPoly::zero(f4.clone(), zv.clone());
            for j in 0..n {
                img = img.add(&MultiPoly::var(f4.clone(), zv.clone(), j).scale(a.get(i, j)));
            }
            img
        })
        .collect();
    let gens = curve
        .gens
        .iter()
        .map(|g| g.map_coeffs(f4.clone(), |c| f4.from_int(i64::from(gf2().packed(*c)))).compose(&images))
        .collect::<Result<Vec<_>, _>>()?;
    let ideal = IdealPresentation::new(f4.clone(), zv, gens)?.with_order(MonomialOrder::GrevLex);
    let elim = eliminate(&ideal, &zrefs[..3])?;
    let Some(model) = elim.generators().iter().filter(|g| !g.is_zero()).min_by_key(|g| g.degree()) else {
        return Ok(None);
    };
    if model.degree() != Some(SECTION_DEGREE) {
        return Ok(None);
    }
    let yz = vars(&["y", "z"]);
    let one = MultiPoly::one(f4.clone(), yz.clone());
    let affine = model.compose(&[one, MultiPoly::var(f4.clone(), yz.clone(), 0), MultiPoly::var(f4.clone(), yz, 1)])?;
    if affine.degree() != Some(SECTION_DEGREE) {
        return Ok(None);
    }
    let factors = factor_bivariate(&affine)?;
    let squarefree = factors.iter().all(|(_, e)| *e == 1);
    let mut degrees: Vec<u32> = factors
        .iter()
        .flat_map(|(g, e)| std::iter::repeat_n(g.degree().unwrap_or(0), *e as usize))
        .collect();
    degrees.sort_unstable_by(|x, y| y.cmp(x));
    let projection = (0..n).map(|i| a.row(i).to_vec()).collect();
    Ok(Some(PlaneModel { equation: affine, degrees, squarefree, projection }))
}

/// Two independent valid projections that agree on the degree multiset.
fn plane_model_degrees(curve: &SectionCurve, seed: u64) -> Result<Result<Vec<u32>, String>, AuditError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<u32>> = Vec::new();
    for _ in 0..PROJECTION_RETRIES {
        if let Some(m) = try_plane_model(curve, &mut rng)? {
            if !m.squarefree {
                continue;
            }
            found.push(m.degrees);
            if found.len() == 2 {
                break;
            }
        }
    }
    Ok(match found.as_slice() {
        [a, b] if a == b => Ok(a.clone()),
        [a, b] => Err(format!("projections disagree: {a:?} vs {b:?}")),
        _ => Err(format!("fewer than two valid projections in {PROJECTION_RETRIES} tries")),
    })
}

pub fn audit_section(spec: &SurfaceSpec, bits: u8) -> Result<SectionReport, AuditError> {
    let h = section_form(spec, bits)?;
    let cells = cell_contributions(spec, &h)?;
    let reduced = cells.iter().all(|c| c.dimension <= 0);
    let mut report = SectionReport {
        bits,
        hyperplane: h.to_string(),
        reduced,
        sing_degree: None,
        component_degrees: None,
        outcome: Outcome::Fail,
        note: None,
    };
    if !reduced {
        report.note = Some("positive-dimensional singular locus".into());
        return Ok(report);
    }
    let curve = section_curve(spec, &h)?;
    let (dim, deg) = homogeneous_sing(&curve)?;
    if dim > 0 {
        report.reduced = false;
        report.note = Some("positive-dimensional singular locus".into());
        return Ok(report);
    }
    report.sing_degree = Some(deg);
    if deg < SING_DEGREE_THRESHOLD {
        report.outcome = Outcome::Pass;
        return Ok(report);
    }
    match plane_model_degrees(&curve, u64::from(bits))? {
        Ok(degrees) => {
            report.outcome =
                if degrees.first().is_some_and(|&d| d >= LARGE_COMPONENT) { Outcome::Pass } else { Outcome::Fail };
            report.component_degrees = Some(degrees);
        }
        Err(note) => {
            report.outcome = Outcome::Inconclusive;
            report.note = Some(note);
        }
    }
    Ok(report)
}

pub fn audit_all(spec: &SurfaceSpec) -> Result<AuditSummary, AuditError> {
    check_surface(spec)?;
    let reports = (1..128u8).into_par_iter().map(|b| audit_section(spec, b)).collect::<Result<Vec<_>, _>>()?;
    let pick = |o: Outcome| reports.iter().filter(|r| r.outcome == o).map(|r| r.bits).collect::<Vec<_>>();
    Ok(AuditSummary {
        surface: spec.name.clone(),
        passed: reports.iter().filter(|r| r.pass()).count(),
        failed: pick(Outcome::Fail),
        inconclusive: pick(Outcome::Inconclusive),
        reports,
    })
}

/// Evaluates a polynomial over GF(2) at a point over an extension.
pub fn eval_over(poly: &FqPoly, field: &GaloisField, point: &[crate::FieldElement]) -> crate::FieldElement {
    let lifted = poly.map_coeffs(field.clone(), |c| field.from_int(i64::from(poly.ring().packed(*c))));
    lifted.evaluate(point).expect("arity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::load_fixture;

    #[test]
    fn hilbert_series_of_simple_schemes() {
        // a point in P^2: <x, y>
        assert_eq!(projective_dimension_degree(3, &[vec![1, 0, 0], vec![0, 1, 0]]), (0, 1));
        // a conic in P^2
        assert_eq!(projective_dimension_degree(3, &[vec![2, 0, 0]]), (1, 2));
        // x^2, xy, y^3 in P^2: a fat point of length 4
        assert_eq!(projective_dimension_degree(3, &[vec![2, 0, 0], vec![1, 1, 0], vec![0, 3, 0]]), (0, 4));
        // the irrelevant ideal
        assert_eq!(projective_dimension_degree(2, &[vec![1, 0], vec![0, 1]]), (-1, 0));
        // a twisted cubic degenerates to <y^2, yz, z^2>
        assert_eq!(projective_dimension_degree(4, &[vec![0, 2, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 2, 0]]), (1, 3));
    }

    #[test]
    fn section_classes() {
        let s2 = load_fixture("s2").unwrap();
        let secs = enumerate_sections(&s2).unwrap();
        assert_eq!(secs.len(), 127);
        assert!(section_form(&s2, 0).is_err());
        let comp = complement_coordinates(&s2).unwrap();
        assert_eq!(comp.len(), 7);
        assert!(audit_all(&load_fixture("s3").unwrap()).is_err());
    }

    #[test]
    fn forms_differing_by_a_linear_form_agree() {
        let s2 = load_fixture("s2").unwrap();
        let f = gf2();
        let h = section_form(&s2, 5).unwrap();
        let l1 = s2.forms_over(&f).unwrap()[0].clone();
        let a = section_curve(&s2, &h).unwrap();
        let b = section_curve(&s2, &h.add(&l1)).unwrap();
        assert_eq!(a.vars, b.vars);
        assert_eq!(a.gens, b.gens);
    }

    #[test]
    fn reducible_plane_curve_factors() {
        let f4 = gf4();
        let v = vars(&["x", "y"]);
        let line = MultiPoly::parse(f4.clone(), v.clone(), "x + y").unwrap();
        let mut conic = MultiPoly::parse(f4.clone(), v.clone(), "x^2 + x*y + y + 1").unwrap();
        conic = conic.add(&MultiPoly::parse(f4.clone(), v.clone(), "y^2").unwrap().scale(&f4.generator()));
        let mut degs: Vec<u32> =
            factor_bivariate(&line.mul(&conic)).unwrap().iter().map(|(g, _)| g.degree().unwrap()).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 2]);
    }

    #[test]
    fn homogeneous_and_cell_degrees_agree() {
        let s2 = load_fixture("s2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let bits = rng.gen_range(1..128u8);
            let h = section_form(&s2, bits).unwrap();
            let cells = cell_contributions(&s2, &h).unwrap();
            assert!(cells.iter().all(|c| c.dimension <= 0));
            let total: usize = cells.iter().map(|c| c.cell_length.unwrap()).sum();
            let (dim, deg) = homogeneous_sing(&section_curve(&s2, &h).unwrap()).unwrap();
            assert!(dim <= 0);
            assert_eq!(total as u64, deg, "section {bits:07b}");
        }
    }
}
