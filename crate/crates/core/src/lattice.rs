//! Rank-2 integral lattices given by Gram matrices: discriminants, classes
//! with prescribed square and degree, index-p overlattices, hyperbolic-plane
//! detection and the discriminant obstruction to a common rank-2 lift.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("bound must be positive")]
    BadBound,
}

/// A rank-2 lattice with Gram matrix `gram` in the basis `labels`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramLattice {
    pub gram: [[i64; 2]; 2],
    pub labels: [String; 2],
}

impl GramLattice {
    pub fn new(gram: [[i64; 2]; 2], labels: [&str; 2]) -> Result<Self, LatticeError> {
        if gram[0][1] != gram[1][0] {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(GramLattice { gram, labels: labels.map(str::to_string) })
    }

    pub fn discriminant(&self) -> i64 {
        let g = &self.gram;
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
    }

    /// Every vector has even square.
    pub fn is_even(&self) -> bool {
        self.gram[0][0] % 2 == 0 && self.gram[1][1] % 2 == 0
    }

    pub fn pairing(&self, u: (i64, i64), v: (i64, i64)) -> i64 {
        let g = &self.gram;
        u.0 * (g[0][0] * v.0 + g[0][1] * v.1) + u.1 * (g[1][0] * v.0 + g[1][1] * v.1)
    }

    pub fn square(&self, u: (i64, i64)) -> i64 {
        self.pairing(u, u)
    }

    /// Gram matrix in the basis given by the columns of `u`.
    pub fn transform(&self, u: [[i64; 2]; 2]) -> GramLattice {
        let col = |j: usize| (u[0][j], u[1][j]);
        let gram = [
            [self.pairing(col(0), col(0)), self.pairing(col(0), col(1))],
            [self.pairing(col(1), col(0)), self.pairing(col(1), col(1))],
        ];
        GramLattice { gram, labels: self.labels.clone() }
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.gram;
        write!(f, "({} {} / {} {})", g[0][0], g[0][1], g[1][0], g[1][1])
    }
}

/// The lattice of H, M on a degree-10 surface with an elliptic pencil.
pub fn lambda10() -> GramLattice {
    GramLattice::new([[10, 5], [5, 0]], ["H", "M"]).expect("symmetric")
}

/// The lattice of H, F on the degree-6 surface with a pencil of degree 4.
pub fn lambda6a() -> GramLattice {
    GramLattice::new([[6, 4], [4, 0]], ["H", "F"]).expect("symmetric")
}

/// The lattice of H, F on the degree-6 surface with a pencil of degree 3.
pub fn lambda6b() -> GramLattice {
    GramLattice::new([[6, 3], [3, 0]], ["H", "F"]).expect("symmetric")
}

/// The hyperbolic plane U.
pub fn hyperbolic_plane() -> GramLattice {
    GramLattice::new([[0, 1], [1, 0]], ["e", "f"]).expect("symmetric")
}

/// Integer points (m, n) with N = m e1 + n e2, N^2 = `self_int` and
/// N . v = `pairing_value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSearch {
    pub within_bound: Vec<(i64, i64)>,
    /// Complete solution set, when the linear constraint cuts the quadric in
    /// finitely many points.
    pub exact: Option<Vec<(i64, i64)>>,
}

impl ClassSearch {
    /// The sweep found everything that exists.
    pub fn is_complete(&self) -> bool {
        self.exact.as_ref() == Some(&self.within_bound)
    }
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2).max(0)..=r + 2).find(|x| x * x == n)
}

/// Integer roots of a x^2 + b x + c; `None` if the polynomial vanishes.
fn integer_roots(a: i128, b: i128, c: i128) -> Option<Vec<i128>> {
    if a == 0 {
        if b == 0 {
            return if c == 0 { None } else { Some(vec![]) };
        }
        return Some(if c % b == 0 { vec![-c / b] } else { vec![] });
    }
    let disc = b * b - 4 * a * c;
    let Some(r) = isqrt(disc) else { return Some(vec![]) };
    let mut out: Vec<i128> = [-b + r, -b - r].into_iter().filter(|x| x % (2 * a) == 0).map(|x| x / (2 * a)).collect();
    out.sort();
    out.dedup();
    Some(out)
}

pub fn enumerate_classes(
    lattice: &GramLattice,
    self_int: i64,
    pairing_vector: (i64, i64),
    pairing_value: i64,
    bound: i64,
) -> Result<ClassSearch, LatticeError> {
    if bound < 1 {
        return Err(LatticeError::BadBound);
    }
    let ok = |m: i64, n: i64| lattice.square((m, n)) == self_int && lattice.pairing(pairing_vector, (m, n)) == pairing_value;
    let within_bound: Vec<(i64, i64)> =
        (-bound..=bound).flat_map(|m| (-bound..=bound).map(move |n| (m, n))).filter(|&(m, n)| ok(m, n)).collect();
    // the linear constraint alpha m + beta n = value
    let alpha = lattice.pairing(pairing_vector, (1, 0)) as i128;
    let beta = lattice.pairing(pairing_vector, (0, 1)) as i128;
    let g = lattice.gram.map(|r| r.map(|x| x as i128));
    let (value, target) = (pairing_value as i128, self_int as i128);
    let exact = if beta != 0 || alpha != 0 {
        // solve for the variable with nonzero coefficient in terms of the other
        let swap = beta == 0;
        let (a1, b1) = if swap { (beta, alpha) } else { (alpha, beta) };
        // x free, y = (value - a1 x) / b1; quadric in (x, y) order
        let (gxx, gxy, gyy) = if swap { (g[1][1], g[0][1], g[0][0]) } else { (g[0][0], g[0][1], g[1][1]) };
        // b1^2 Q = gxx b1^2 x^2 + 2 gxy b1 x (value - a1 x) + gyy (value - a1 x)^2
        let qa = gxx * b1 * b1 - 2 * gxy * b1 * a1 + gyy * a1 * a1;
        let qb = 2 * gxy * b1 * value - 2 * gyy * a1 * value;
        let qc = gyy * value * value - target * b1 * b1;
        integer_roots(qa, qb, qc).map(|xs| {
            let mut sols: Vec<(i64, i64)> = xs
                .into_iter()
                .filter(|x| (value - a1 * x) % b1 == 0)
                .map(|x| {
                    let y = (value - a1 * x) / b1;
                    if swap { (y as i64, x as i64) } else { (x as i64, y as i64) }
                })
                .filter(|&(m, n)| ok(m, n))
                .collect();
            sols.sort();
            sols
        })
    } else {
        None
    };
    Ok(ClassSearch { within_bound, exact })
}

/// Why an index-p candidate cannot be a class of an even overlattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    NonIntegralPairing { basis: String, value: String },
    NonIntegralSquare { value: String },
    OddSquare { value: i64 },
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exclusion::NonIntegralPairing { basis, value } => write!(f, "N.{basis} = {value} is not an integer"),
            Exclusion::NonIntegralSquare { value } => write!(f, "N^2 = {value} is not an integer"),
            Exclusion::OddSquare { value } => write!(f, "N^2 = {value} is odd"),
        }
    }
}

/// N = (m e1 + n e2) / p for a representative (m, n) of a point of P^1(F_p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlatticeCandidate {
    pub p: i64,
    pub representative: (i64, i64),
    pub square: String,
    pub pairings: [String; 2],
    pub exclusion: Option<Exclusion>,
    /// Gram matrix of L + ZN in a basis containing N, for survivors.
    pub overlattice: Option<GramLattice>,
}

impl OverlatticeCandidate {
    pub fn survives(&self) -> bool {
        self.exclusion.is_none()
    }

    pub fn overlattice_discriminant(&self) -> Option<i64> {
        self.overlattice.as_ref().map(GramLattice::discriminant)
    }
}

fn is_prime(p: i64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn show(r: Ratio<i64>) -> String {
    if r.is_integer() { r.to_integer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) }
}

/// Candidates for an index-p overlattice of L: one per point of P^1(F_p),
/// normalized so that the first nonzero coordinate is 1. Empty unless p^2
/// divides the discriminant.
pub fn overlattice_candidates(lattice: &GramLattice, p: i64) -> Result<Vec<OverlatticeCandidate>, LatticeError> {
    if !is_prime(p) {
        return Err(LatticeError::NotPrime(p));
    }
    let disc = lattice.discriminant();
    if disc % (p * p) != 0 {
        return Ok(Vec::new());
    }
    let reps = std::iter::once((0, 1)).chain((0..p).map(|n| (1, n)));
    Ok(reps
        .map(|(m, n)| {
            let square = Ratio::new(lattice.square((m, n)), p * p);
            let pairings = [Ratio::new(lattice.pairing((m, n), (1, 0)), p), Ratio::new(lattice.pairing((m, n), (0, 1)), p)];
            let exclusion = if let Some(i) = (0..2).find(|&i| !pairings[i].is_integer()) {
                Some(Exclusion::NonIntegralPairing { basis: lattice.labels[i].clone(), value: show(pairings[i]) })
            } else if !square.is_integer() {
                Some(Exclusion::NonIntegralSquare { value: show(square) })
            } else if square.to_integer().is_odd() {
                Some(Exclusion::OddSquare { value: square.to_integer() })
            } else {
                None
            };
            let overlattice = exclusion.is_none().then(|| {
                let (s, a, b) = (square.to_integer(), pairings[0].to_integer(), pairings[1].to_integer());
                if m == 0 {
                    // N = e2 / p, basis {e1, N}
                    GramLattice {
                        gram: [[lattice.gram[0][0], a], [a, s]],
                        labels: [lattice.labels[0].clone(), "N".to_string()],
                    }
                } else {
                    // N = (e1 + n e2) / p, basis {N, e2}
                    GramLattice {
                        gram: [[s, b], [b, lattice.gram[1][1]]],
                        labels: ["N".to_string(), lattice.labels[1].clone()],
                    }
                }
            });
            OverlatticeCandidate {
                p,
                representative: (m, n),
                square: show(square),
                pairings: pairings.map(show),
                exclusion,
                overlattice,
            }
        })
        .collect())
}

/// Even rank-2 lattices of discriminant -1 are isometric to U.
pub fn detect_hyperbolic_plane(lattice: &GramLattice) -> bool {
    lattice.is_even() && lattice.discriminant() == -1
}

/// Whether a surface with Picard lattice `a` can share a rank-2 lift with one
/// whose lattice is `b`: the lift's lattice embeds with finite index s in the
/// first, so disc(b) = s^2 disc(a) must have a positive integer solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LiftVerdict {
    Impossible { disc_a: i64, disc_b: i64, reason: String },
    Possible { disc_a: i64, disc_b: i64, index: i64 },
}

impl LiftVerdict {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, LiftVerdict::Impossible { .. })
    }
}

pub fn lift_contradiction(a: &GramLattice, b: &GramLattice) -> LiftVerdict {
    let (da, db) = (a.discriminant(), b.discriminant());
    let impossible = |reason: String| LiftVerdict::Impossible { disc_a: da, disc_b: db, reason };
    if da == 0 || db == 0 {
        return if da == db {
            LiftVerdict::Possible { disc_a: da, disc_b: db, index: 1 }
        } else {
            impossible("exactly one discriminant vanishes".into())
        };
    }
    if db % da != 0 {
        return impossible(format!("{da} does not divide {db}"));
    }
    let ratio = db / da;
    match isqrt(ratio as i128) {
        Some(s) if s > 0 => LiftVerdict::Possible { disc_a: da, disc_b: db, index: s as i64 },
        _ => impossible(format!("{db} / {da} = {ratio} is not a positive square")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_discriminants() {
        assert_eq!(lambda10().discriminant(), -25);
        assert_eq!(lambda6a().discriminant(), -16);
        assert_eq!(lambda6b().discriminant(), -9);
        assert!(GramLattice::new([[1, 2], [3, 4]], ["a", "b"]).is_err());
    }

    #[test]
    fn degree_ten_pencils() {
        let l = lambda10();
        let s = enumerate_classes(&l, 0, (1, 0), 5, 5).unwrap();
        assert_eq!(s.within_bound, vec![(0, 1), (1, -1)]);
        assert!(s.is_complete());
        assert_eq!(l.pairing((0, 1), (1, -1)), 5);
        let s = enumerate_classes(&l, 0, (1, 0), 0, 5).unwrap();
        assert_eq!(s.within_bound, vec![(0, 0)]);
        assert!(s.is_complete());
    }

    #[test]
    fn exact_solver_matches_wide_sweep() {
        for (l, si, v, val) in [
            (lambda10(), 0, (1, 0), 5),
            (lambda6a(), 0, (1, 0), 4),
            (lambda6b(), 0, (1, 0), 3),
            (lambda6a(), -2, (1, 0), 1),
            (lambda10(), 10, (0, 1), 5),
        ] {
            let s = enumerate_classes(&l, si, v, val, 50).unwrap();
            assert!(s.is_complete(), "{l} {si} {val}: {s:?}");
        }
        // the isotropic line x = 0 of U meets N.e = 0 everywhere
        let u = hyperbolic_plane();
        let s = enumerate_classes(&u, 0, (0, 1), 0, 3).unwrap();
        assert_eq!(s.exact, None);
        assert_eq!(s.within_bound.len(), 7);
    }

    #[test]
    fn overlattice_survivors() {
        let survivors = |l: &GramLattice, p| -> Vec<(i64, i64)> {
            overlattice_candidates(l, p).unwrap().into_iter().filter(|c| c.survives()).map(|c| c.representative).collect()
        };
        assert_eq!(survivors(&lambda10(), 5), vec![(0, 1), (1, 4)]);
        assert_eq!(survivors(&lambda6a(), 2), vec![(0, 1)]);
        assert_eq!(survivors(&lambda6b(), 3), vec![(0, 1), (1, 2)]);
        assert!(overlattice_candidates(&lambda10(), 3).unwrap().is_empty());
        assert!(overlattice_candidates(&lambda10(), 4).is_err());
        for c in overlattice_candidates(&lambda6b(), 3).unwrap() {
            match c.survives() {
                true => assert_eq!(c.overlattice_discriminant(), Some(-1)),
                false => assert!(c.exclusion.is_some()),
            }
        }
        let b = overlattice_candidates(&lambda6b(), 3).unwrap();
        let c12 = b.iter().find(|c| c.representative == (1, 2)).unwrap();
        assert!(detect_hyperbolic_plane(c12.overlattice.as_ref().unwrap()));
        let c11 = b.iter().find(|c| c.representative == (1, 1)).unwrap();
        assert!(!c11.survives());
    }

    #[test]
    fn hyperbolic_plane_detection() {
        assert!(detect_hyperbolic_plane(&hyperbolic_plane()));
        assert!(!detect_hyperbolic_plane(&lambda10()));
        assert!(!detect_hyperbolic_plane(&GramLattice::new([[1, 0], [0, -1]], ["a", "b"]).unwrap()));
    }

    #[test]
    fn lift_verdicts() {
        assert!(lift_contradiction(&lambda6a(), &lambda6b()).is_contradiction());
        assert!(!lift_contradiction(&lambda10(), &lambda10()).is_contradiction());
        let a = GramLattice::new([[2, 0], [0, -2]], ["a", "b"]).unwrap();
        let b = GramLattice::new([[8, 0], [0, -8]], ["a", "b"]).unwrap();
        assert_eq!(lift_contradiction(&a, &b), LiftVerdict::Possible { disc_a: -4, disc_b: -64, index: 4 });
    }
}
