//! Brute-force enumeration of Schubert cells or leading-coordinate strata.

use crate::geometry::{Ambient, SurfaceSpec};
use crate::grassmann::{enumerate_cells, Parametrization};
use crate::FqPoly;

use super::kernel::{powers, CPoly, Kernel, Odometer, MAX_CVARS};
use super::{check_budget, par_ranges, spec_field, CountError, CountOptions};

/// Affine space of free coordinates with the defining forms restricted to it.
pub(crate) struct Chart {
    pub nfree: usize,
    pub linear: Vec<CPoly>,
    pub rest: Vec<CPoly>,
}

/// Stratum of P^4 where the coordinates before `k` vanish and coordinate `k` is 1.
pub(crate) fn p4_stratum(forms: &[FqPoly], k: usize) -> Chart {
    let restrict = |f: &FqPoly| {
        let terms = f
            .terms()
            .filter(|(m, _)| m.exps()[..k].iter().all(|&e| e == 0))
            .map(|(m, c)| {
                let mut e = [0u8; MAX_CVARS];
                for (slot, &x) in e.iter_mut().zip(&m.exps()[k + 1..]) {
                    *slot = x as u8;
                }
                (c.raw(), e)
            })
            .collect();
        CPoly { terms }
    };
    Chart { nfree: 4 - k, linear: Vec::new(), rest: forms.iter().map(restrict).collect() }
}

pub(crate) fn grassmann_charts(forms: &[FqPoly]) -> Result<Vec<Chart>, CountError> {
    enumerate_cells()
        .iter()
        .map(|cell| {
            let d = cell.dim();
            let keep: Vec<usize> = (0..d).collect();
            let pulled = forms
                .iter()
                .map(|f| cell.pullback(f).map(|p| CPoly::from_poly(&p, &keep)))
                .collect::<Result<Vec<_>, _>>()?;
            let (linear, rest) = pulled.split_at(3);
            Ok(Chart { nfree: d, linear: linear.to_vec(), rest: rest.to_vec() })
        })
        .collect()
}

/// Splits `c` as A + B x_v; `None` if some term has degree > 1 in x_v.
fn split_affine(c: &CPoly, v: usize) -> Option<(CPoly, CPoly)> {
    let (mut a, mut b) = (CPoly::default(), CPoly::default());
    for &(coef, mut e) in &c.terms {
        match e[v] {
            0 => a.terms.push((coef, e)),
            1 => {
                e[v] = 0;
                b.terms.push((coef, e));
            }
            _ => return None,
        }
    }
    Some((a, b))
}

enum Candidates {
    All,
    One(u32),
    Empty,
}

/// Number of points of the chart where every form vanishes.
pub(crate) fn count_chart(k: &Kernel, chart: &Chart, parts: usize) -> u128 {
    let t = k.t;
    let vanish = |forms: &[CPoly], pw: &[[u32; 5]]| forms.iter().all(|f| t.is_zero(f.eval(&t, pw)));
    if chart.nfree == 0 {
        return u128::from(vanish(&chart.linear, &[]) && vanish(&chart.rest, &[]));
    }
    let last = chart.nfree - 1;
    let split: Option<Vec<(CPoly, CPoly)>> = chart.linear.iter().map(|l| split_affine(l, last)).collect();
    let total = k.q.pow(last as u32);
    par_ranges(total, parts, |lo, hi| {
        let mut odo = Odometer::new(&t, last, lo);
        let mut pw = odo.pw.clone();
        pw.push(powers(&t, 0));
        let mut acc = 0u128;
        for _ in lo..hi {
            pw[..last].copy_from_slice(&odo.pw);
            let cand = match &split {
                None => Candidates::All,
                Some(split) => {
                    let mut cand = Candidates::All;
                    for (a, b) in split {
                        let (av, bv) = (a.eval(&t, &pw), b.eval(&t, &pw));
                        let next = if t.is_zero(bv) {
                            if t.is_zero(av) { continue } else { Candidates::Empty }
                        } else {
                            let x = t.neg(t.mul(av, t.inv(bv)));
                            match cand {
                                Candidates::One(y) if y != x => Candidates::Empty,
                                _ => Candidates::One(x),
                            }
                        };
                        cand = next;
                        if matches!(cand, Candidates::Empty) {
                            break;
                        }
                    }
                    cand
                }
            };
            match cand {
                Candidates::Empty => {}
                Candidates::One(x) => {
                    pw[last] = powers(&t, x);
                    acc += u128::from(vanish(&chart.rest, &pw));
                }
                Candidates::All => {
                    for x in 0..=t.order {
                        pw[last] = powers(&t, x);
                        if (split.is_some() || vanish(&chart.linear, &pw)) && vanish(&chart.rest, &pw) {
                            acc += 1;
                        }
                    }
                }
            }
            odo.advance(&t);
        }
        acc
    })
}

/// Exact number of GF(p^n)-points by enumerating every point of the ambient
/// space: the ten Schubert cells of Gr(2,5) or the five strata of P^4.
pub fn count_naive(spec: &SurfaceSpec, n: u32, opts: &CountOptions) -> Result<u128, CountError> {
    let field = spec_field(spec, n)?;
    let q = field.order() as u128;
    let needed = match spec.ambient {
        Ambient::GrassmannCi => q.pow(6),
        Ambient::P4Ci => q.pow(4),
    };
    check_budget(needed, opts)?;
    let kernel = Kernel::new(&field)?;
    let forms = spec.forms_over(&field)?;
    let charts = match spec.ambient {
        Ambient::GrassmannCi => grassmann_charts(&forms)?,
        Ambient::P4Ci => (0..5).map(|k| p4_stratum(&forms, k)).collect(),
    };
    Ok(charts.iter().map(|c| count_chart(&kernel, c, opts.parts)).sum())
}
