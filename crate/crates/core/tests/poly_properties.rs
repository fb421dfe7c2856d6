use k3pic::ffield::GaloisField;
use k3pic::mpoly::{cyclotomic, vars, MultiPoly, UniPoly};
use k3pic::ring::{Rationals, Ring};
use k3pic::FieldElement;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

type Terms = Vec<(Vec<u16>, u32)>;

fn terms(nvars: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(0u16..=3, nvars), any::<u32>()), 0..6)
}

fn poly(f: &GaloisField, names: &[&str], t: &Terms) -> MultiPoly<GaloisField> {
    MultiPoly::from_terms(
        f.clone(),
        vars(names),
        t.iter().map(|(e, c)| (e.clone(), f.from_packed(c % f.order() as u32))),
    )
}

fn point(f: &GaloisField, seeds: &[u32]) -> Vec<FieldElement> {
    seeds.iter().map(|s| f.from_packed(s % f.order() as u32)).collect()
}

fn gf() -> impl Strategy<Value = GaloisField> {
    prop::sample::select(vec![(2u32, 1u32), (2, 3), (3, 1), (3, 2), (5, 1)])
        .prop_map(|(p, n)| GaloisField::new(p, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(f in gf(), a in terms(3), b in terms(3), pt in prop::collection::vec(any::<u32>(), 3)) {
        let names = ["x", "y", "z"];
        let (pa, pb) = (poly(&f, &names, &a), poly(&f, &names, &b));
        let pt = point(&f, &pt);
        let (ea, eb) = (pa.evaluate(&pt).unwrap(), pb.evaluate(&pt).unwrap());
        prop_assert_eq!(pa.mul(&pb).evaluate(&pt).unwrap(), Ring::mul(&f, &ea, &eb));
        prop_assert_eq!(pa.add(&pb).evaluate(&pt).unwrap(), Ring::add(&f, &ea, &eb));
        prop_assert_eq!(pa.pow(3).evaluate(&pt).unwrap(), Ring::pow(&f, &ea, 3));
    }

    #[test]
    fn substitution_commutes_with_evaluation(f in gf(), a in terms(3), g in terms(2), h in terms(2), pt in prop::collection::vec(any::<u32>(), 2)) {
        let outer = poly(&f, &["x", "y", "z"], &a);
        let (pg, ph) = (poly(&f, &["y", "z"], &g), poly(&f, &["y", "z"], &h));
        let composed = outer.substitute(&[("x", pg.clone()), ("y", ph.clone())]).unwrap();
        let pt = point(&f, &pt);
        let direct = outer
            .evaluate(&[pg.evaluate(&pt).unwrap(), ph.evaluate(&pt).unwrap(), pt[1]])
            .unwrap();
        prop_assert_eq!(composed.evaluate(&pt).unwrap(), direct);
    }

    #[test]
    fn derivative_obeys_the_product_rule(f in gf(), a in terms(3), b in terms(3)) {
        let names = ["x", "y", "z"];
        let (pa, pb) = (poly(&f, &names, &a), poly(&f, &names, &b));
        for i in 0..3 {
            let lhs = pa.mul(&pb).derivative(i);
            let rhs = pa.derivative(i).mul(&pb).add(&pa.mul(&pb.derivative(i)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

fn divisors(m: u32) -> Vec<u32> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn cyclotomic_products_give_t_power_minus_one() {
    let q = Rationals::new();
    for m in 1..=66u32 {
        let prod = divisors(m).into_iter().fold(UniPoly::one(q), |acc, d| acc.mul(&cyclotomic(d)));
        let mut coeffs = vec![0i64; m as usize + 1];
        coeffs[0] = -1;
        coeffs[m as usize] = 1;
        assert_eq!(prod, UniPoly::from_i64s(q, &coeffs), "m = {m}");
    }
}

#[test]
fn cyclotomic_vanishes_at_primitive_roots() {
    for m in 1..=66u32 {
        let phi = cyclotomic(m);
        let totient = (1..=m).filter(|&k| gcd(k, m) == 1).count();
        assert_eq!(phi.degree(), Some(totient), "degree of the {m}-th cyclotomic polynomial");
        let coeffs: Vec<f64> = phi.coeffs().iter().map(|c: &BigRational| {
            assert!(c.is_integer());
            c.to_f64().unwrap()
        }).collect();
        for k in (1..=m).filter(|&k| gcd(k, m) == 1) {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let (re, im) = coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
                let a = theta * i as f64;
                (re + c * a.cos(), im + c * a.sin())
            });
            assert!(re.abs() < 1e-6 && im.abs() < 1e-6, "m = {m}, k = {k}");
        }
    }
}
