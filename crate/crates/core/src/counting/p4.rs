//! Quadric-solving enumeration for (2,3) complete intersections in P^4.

use crate::geometry::{Ambient, SurfaceSpec};

use super::kernel::{powers, CPoly, Kernel, Odometer};
use super::naive::{p4_stratum, Chart};
use super::{check_budget, par_ranges, spec_field, CountError, CountOptions, Strategy};

/// Coefficients of the quadric in the last free coordinate.
fn split_quadratic(c: &CPoly, v: usize) -> [CPoly; 3] {
    let mut out: [CPoly; 3] = Default::default();
    for &(coef, mut e) in &c.terms {
        let d = e[v] as usize;
        e[v] = 0;
        out[d].terms.push((coef, e));
    }
    out
}

fn count_stratum(k: &Kernel, chart: &Chart, parts: usize) -> u128 {
    let t = k.t;
    let (quadric, cubic) = (&chart.rest[0], &chart.rest[1]);
    if chart.nfree == 0 {
        return u128::from(t.is_zero(quadric.eval(&t, &[])) && t.is_zero(cubic.eval(&t, &[])));
    }
    let last = chart.nfree - 1;
    let [c0, c1, c2] = split_quadratic(quadric, last);
    par_ranges(k.q.pow(last as u32), parts, |lo, hi| {
        let mut odo = Odometer::new(&t, last, lo);
        let mut pw = odo.pw.clone();
        pw.push(powers(&t, 0));
        let mut acc = 0u128;
        for _ in lo..hi {
            pw[..last].copy_from_slice(&odo.pw);
            let (a, b, c) = (c2.eval(&t, &pw), c1.eval(&t, &pw), c0.eval(&t, &pw));
            match k.quadratic_roots(a, b, c) {
                Some((roots, m)) => {
                    for &w in &roots[..m] {
                        pw[last] = powers(&t, w);
                        acc += u128::from(t.is_zero(cubic.eval(&t, &pw)));
                    }
                }
                None => {
                    for w in 0..=t.order {
                        pw[last] = powers(&t, w);
                        acc += u128::from(t.is_zero(cubic.eval(&t, &pw)));
                    }
                }
            }
            odo.advance(&t);
        }
        acc
    })
}

/// Exact number of GF(p^n)-points of a quadric-cubic intersection in P^4:
/// per stratum, enumerate all free coordinates but the last and solve the
/// quadric for the last one.
pub fn count_p4(spec: &SurfaceSpec, n: u32, opts: &CountOptions) -> Result<u128, CountError> {
    if spec.ambient != Ambient::P4Ci {
        return Err(CountError::WrongAmbient { strategy: Strategy::P4, ambient: spec.ambient });
    }
    let field = spec_field(spec, n)?;
    let q = field.order() as u128;
    check_budget(q.pow(3) + q.pow(2) + q + 1, opts)?;
    let kernel = Kernel::new(&field)?;
    let forms = spec.forms_over(&field)?;
    Ok((0..5).map(|k| count_stratum(&kernel, &p4_stratum(&forms, k), opts.parts)).sum())
}
