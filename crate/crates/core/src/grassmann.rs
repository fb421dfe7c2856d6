//! The Grassmannian Gr(2,5) in its Plücker embedding: relations, the
//! coordinate map on 2x5 matrices, Schubert cells and standard affine charts.

use std::sync::OnceLock;

use thiserror::Error;

use crate::mpoly::{vars, MultiPoly, PolyError, Vars};
use crate::ring::Ring;

/// Plücker coordinate names in the fixed order x12, x13, ..., x45.
pub const PLUCKER_NAMES: [&str; 10] =
    ["x12", "x13", "x14", "x15", "x23", "x24", "x25", "x34", "x35", "x45"];

/// Column pairs (1-based) of the Plücker coordinates, same order as the names.
pub const PLUCKER_PAIRS: [(usize, usize); 10] =
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)];

/// The five quadrics cutting out Gr(2,5) in P^9.
pub const PLUCKER_RELATIONS: [&str; 5] = [
    "x12*x34 + x23*x14 - x13*x24",
    "x12*x35 + x23*x15 - x13*x25",
    "x12*x45 + x24*x15 - x14*x25",
    "x13*x45 + x34*x15 - x14*x35",
    "x23*x45 + x34*x25 - x24*x35",
];

const PARAM_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrassmannError {
    #[error("matrix has rank < 2")]
    Degenerate,
    #[error("invalid pivot pair ({0}, {1})")]
    InvalidPivots(usize, usize),
}

pub fn plucker_vars() -> Vars {
    static V: OnceLock<Vars> = OnceLock::new();
    V.get_or_init(|| vars(&PLUCKER_NAMES)).clone()
}

/// Index of x_ij (1-based, i < j) in [`PLUCKER_NAMES`].
pub fn pair_index(i: usize, j: usize) -> usize {
    PLUCKER_PAIRS
        .iter()
        .position(|&pr| pr == (i, j))
        .expect("1 <= i < j <= 5")
}

pub fn plucker_relations<R: Ring>(ring: R) -> Vec<MultiPoly<R>> {
    PLUCKER_RELATIONS
        .iter()
        .map(|s| MultiPoly::parse(ring.clone(), plucker_vars(), s).expect("valid relation"))
        .collect()
}

/// Minors x_ij = r1_i r2_j - r1_j r2_i of a 2x5 matrix.
pub fn plucker_coords<R: Ring>(
    ring: &R,
    m: &[[R::Elem; 5]; 2],
) -> Result<[R::Elem; 10], GrassmannError> {
    let out: [R::Elem; 10] = std::array::from_fn(|k| {
        let (i, j) = PLUCKER_PAIRS[k];
        ring.sub(
            &ring.mul(&m[0][i - 1], &m[1][j - 1]),
            &ring.mul(&m[0][j - 1], &m[1][i - 1]),
        )
    });
    if out.iter().all(|x| ring.is_zero(x)) {
        return Err(GrassmannError::Degenerate);
    }
    Ok(out)
}

/// q^6 + q^5 + 2q^4 + 2q^3 + 2q^2 + q + 1.
pub fn grassmann_cardinality(q: u64) -> u128 {
    let q = q as u128;
    q.pow(6) + q.pow(5) + 2 * q.pow(4) + 2 * q.pow(3) + 2 * q * q + q + 1
}

/// Entry of a parametrized 2x5 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    Zero,
    One,
    Param(usize),
}

/// A family of 2x5 matrices whose free entries are affine parameters.
pub trait Parametrization {
    fn template(&self) -> &[[Entry; 5]; 2];
    fn pivots(&self) -> (usize, usize);

    fn dim(&self) -> usize {
        self.template()
            .iter()
            .flatten()
            .filter(|e| matches!(e, Entry::Param(_)))
            .count()
    }

    fn param_vars(&self) -> Vars {
        vars(&PARAM_NAMES[..self.dim()])
    }

    /// Position (row, column) of each parameter, 0-based.
    fn param_positions(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![(0, 0); self.dim()];
        for (r, row) in self.template().iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                if let Entry::Param(k) = e {
                    pos[*k] = (r, c);
                }
            }
        }
        pos
    }

    fn matrix<R: Ring>(&self, ring: &R, values: &[R::Elem]) -> [[R::Elem; 5]; 2] {
        let t = self.template();
        std::array::from_fn(|r| {
            std::array::from_fn(|c| match t[r][c] {
                Entry::Zero => ring.zero(),
                Entry::One => ring.one(),
                Entry::Param(k) => values[k].clone(),
            })
        })
    }

    /// The ten Plücker coordinates as polynomials in the parameters.
    fn plucker_pullbacks<R: Ring>(&self, ring: R) -> Vec<MultiPoly<R>> {
        let pv = self.param_vars();
        let entry = |e: Entry| match e {
            Entry::Zero => MultiPoly::zero(ring.clone(), pv.clone()),
            Entry::One => MultiPoly::one(ring.clone(), pv.clone()),
            Entry::Param(k) => MultiPoly::var(ring.clone(), pv.clone(), k),
        };
        let t = self.template();
        PLUCKER_PAIRS
            .iter()
            .map(|&(i, j)| {
                entry(t[0][i - 1])
                    .mul(&entry(t[1][j - 1]))
                    .sub(&entry(t[0][j - 1]).mul(&entry(t[1][i - 1])))
            })
            .collect()
    }

    /// Pulls back a form in the Plücker coordinates to the parameters.
    fn pullback<R: Ring>(&self, form: &MultiPoly<R>) -> Result<MultiPoly<R>, PolyError> {
        let form = form.rebase(plucker_vars())?;
        form.compose(&self.plucker_pullbacks(form.ring().clone()))
    }
}

/// Schubert cell: matrices in reduced row echelon form with leftmost pivots in
/// columns i < j (1-based). Dimension 9 - i - j; (1,2) is the big cell with
/// rows (1,0,a,b,c), (0,1,d,e,f).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchubertCell {
    pivots: (usize, usize),
    template: [[Entry; 5]; 2],
}

impl SchubertCell {
    pub fn new(i: usize, j: usize) -> Result<Self, GrassmannError> {
        if !(1 <= i && i < j && j <= 5) {
            return Err(GrassmannError::InvalidPivots(i, j));
        }
        let mut t = [[Entry::Zero; 5]; 2];
        let mut k = 0;
        for c in 1..=5 {
            if c == i {
                t[0][c - 1] = Entry::One;
            } else if c > i && c != j {
                t[0][c - 1] = Entry::Param(k);
                k += 1;
            }
        }
        for c in 1..=5 {
            if c == j {
                t[1][c - 1] = Entry::One;
            } else if c > j {
                t[1][c - 1] = Entry::Param(k);
                k += 1;
            }
        }
        Ok(SchubertCell { pivots: (i, j), template: t })
    }
}

impl Parametrization for SchubertCell {
    fn template(&self) -> &[[Entry; 5]; 2] {
        &self.template
    }
    fn pivots(&self) -> (usize, usize) {
        self.pivots
    }
}

/// The ten cells, pivots (1,2), (1,3), ..., (4,5).
pub fn enumerate_cells() -> Vec<SchubertCell> {
    PLUCKER_PAIRS
        .iter()
        .map(|&(i, j)| SchubertCell::new(i, j).expect("valid pivots"))
        .collect()
}

/// Standard open chart U_ij = {x_ij != 0} ≅ A^6: identity in columns i, j,
/// free entries elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardChart {
    pivots: (usize, usize),
    template: [[Entry; 5]; 2],
}

impl StandardChart {
    pub fn new(i: usize, j: usize) -> Result<Self, GrassmannError> {
        if !(1 <= i && i < j && j <= 5) {
            return Err(GrassmannError::InvalidPivots(i, j));
        }
        let mut t = [[Entry::Zero; 5]; 2];
        let mut k = 0;
        for (r, row) in t.iter_mut().enumerate() {
            for c in 1..=5 {
                row[c - 1] = if c == i {
                    if r == 0 { Entry::One } else { Entry::Zero }
                } else if c == j {
                    if r == 1 { Entry::One } else { Entry::Zero }
                } else {
                    k += 1;
                    Entry::Param(k - 1)
                };
            }
        }
        Ok(StandardChart { pivots: (i, j), template: t })
    }

    /// Chart parameters that vanish on the Schubert cell with the same pivots
    /// (the entries left of the pivot in each row); the cell is the
    /// coordinate subspace where exactly these vanish.
    pub fn cell_coordinates(&self) -> Vec<usize> {
        let (i, j) = self.pivots;
        let mut out = Vec::new();
        for (r, row) in self.template.iter().enumerate() {
            let pivot = if r == 0 { i } else { j };
            for (c, e) in row.iter().enumerate() {
                if let Entry::Param(k) = e {
                    if c + 1 < pivot {
                        out.push(*k);
                    }
                }
            }
        }
        out
    }
}

impl Parametrization for StandardChart {
    fn template(&self) -> &[[Entry; 5]; 2] {
        &self.template
    }
    fn pivots(&self) -> (usize, usize) {
        self.pivots
    }
}

/// The ten standard charts, pivots in the same order as the cells.
pub fn standard_charts() -> Vec<StandardChart> {
    PLUCKER_PAIRS
        .iter()
        .map(|&(i, j)| StandardChart::new(i, j).expect("valid pivots"))
        .collect()
}

/// Pulls back a form through a cell.
pub fn chart_pullback<R: Ring>(
    form: &MultiPoly<R>,
    cell: &impl Parametrization,
) -> Result<MultiPoly<R>, PolyError> {
    cell.pullback(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::GaloisField;
    use crate::ring::Integers;

    #[test]
    fn cell_dimensions_and_order() {
        let dims: Vec<usize> = enumerate_cells().iter().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![6, 5, 4, 3, 4, 3, 2, 2, 1, 0]);
        let total = |q: u64| -> u128 {
            enumerate_cells().iter().map(|c| (q as u128).pow(c.dim() as u32)).sum()
        };
        for q in [2, 3, 4, 5, 7, 9] {
            assert_eq!(total(q), grassmann_cardinality(q));
        }
        assert_eq!(grassmann_cardinality(2), 155);
        assert_eq!(grassmann_cardinality(3), 1210);
        assert_eq!(grassmann_cardinality(4), 5797);
    }

    #[test]
    fn plucker_coordinate_examples() {
        let f3 = GaloisField::new(3, 1).unwrap();
        let e = |v: i64| f3.from_int(v);
        let std = [[e(1), e(0), e(0), e(0), e(0)], [e(0), e(1), e(0), e(0), e(0)]];
        let x = plucker_coords(&f3, &std).unwrap();
        assert_eq!(x[0], e(1));
        assert!(x[1..].iter().all(|&v| v == e(0)));
        let m = [[e(1), e(0), e(1), e(0), e(0)], [e(0), e(1), e(0), e(1), e(0)]];
        let x = plucker_coords(&f3, &m).unwrap();
        let want = [1, 0, 1, 0, -1, 0, 0, 1, 0, 0];
        assert_eq!(x.to_vec(), want.iter().map(|&v| e(v)).collect::<Vec<_>>());
        let g1 = &plucker_relations(f3.clone())[0];
        assert_eq!(g1.evaluate(&x).unwrap(), e(0));
        let bad = [[e(1), e(0), e(0), e(0), e(0)], [e(2), e(0), e(0), e(0), e(0)]];
        assert_eq!(plucker_coords(&f3, &bad), Err(GrassmannError::Degenerate));
    }

    #[test]
    fn pullback_examples() {
        let z = Integers::new();
        let big = SchubertCell::new(1, 2).unwrap();
        let pb = big.plucker_pullbacks(z);
        let want = MultiPoly::parse(z, big.param_vars(), "a*e - b*d").unwrap();
        assert_eq!(pb[pair_index(3, 4)], want);
        let point = SchubertCell::new(4, 5).unwrap();
        assert_eq!(point.dim(), 0);
        let pbp = point.plucker_pullbacks(z);
        assert!(pbp[pair_index(4, 5)].is_constant() && !pbp[pair_index(4, 5)].is_zero());
        for cell in enumerate_cells() {
            for g in plucker_relations(z) {
                assert!(chart_pullback(&g, &cell).unwrap().is_zero());
            }
        }
        for chart in standard_charts() {
            for g in plucker_relations(z) {
                assert!(chart.pullback(&g).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn chart_contains_cell() {
        for (cell, chart) in enumerate_cells().iter().zip(standard_charts()) {
            let zeros = chart.cell_coordinates();
            assert_eq!(6 - zeros.len(), cell.dim());
            let (i, j) = cell.pivots();
            assert_eq!(chart.pivots(), (i, j));
        }
        assert!(standard_charts()[0].cell_coordinates().is_empty());
    }
}
