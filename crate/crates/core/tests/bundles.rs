use std::collections::BTreeMap;

use kcontact::bundles::{
    contact_forms, d_contact, interior_sum, interior_sum_1, pair, pontryagin_chart, reeb_family, reeb_parameters,
    Chart, KVectorField,
};
use kcontact::symcore::{Poly, Symbol};
use proptest::prelude::*;

fn random_field(chart: &Chart, seeds: &[(i64, usize, u32)]) -> KVectorField {
    let coords = chart.coordinates().to_vec();
    let mut z = KVectorField::zero(chart);
    for (slot, (c, j, e)) in seeds.iter().enumerate() {
        let a = slot % chart.k();
        let target = &coords[(slot * 7 + j) % coords.len()];
        let value = Poly::int(*c) * Poly::var(&coords[j % coords.len()]).pow(*e);
        let old = z.get(a, target);
        z.set(a, target, old + value).unwrap();
    }
    z
}

fn seeds() -> impl Strategy<Value = Vec<(i64, usize, u32)>> {
    prop::collection::vec((-4i64..=4, 0usize..64, 0u32..=2), 1..12)
}

#[test]
fn d_of_contact_forms_is_d_contact() {
    for n in 1..=4 {
        for k in 1..=4 {
            let chart = pontryagin_chart(n, k).unwrap();
            let etas = contact_forms(&chart).unwrap();
            let omegas = d_contact(&chart).unwrap();
            assert_eq!(etas.len(), k);
            for (eta, omega) in etas.iter().zip(&omegas) {
                assert_eq!(&eta.exterior_derivative(), omega, "n = {n}, k = {k}");
            }
        }
    }
}

#[test]
fn contact_forms_in_darboux_shape() {
    let chart = pontryagin_chart(2, 2).unwrap();
    let etas = contact_forms(&chart).unwrap();
    for (a, eta) in etas.iter().enumerate() {
        assert_eq!(eta.get(chart.diss(a)), Poly::one());
        for i in 0..2 {
            assert_eq!(eta.get(chart.base(i)), -Poly::var(chart.mom(i, a)));
            assert!(eta.get(chart.vel(i, a)).is_zero());
        }
    }
}

proptest! {
    #[test]
    fn interior_sum_is_linear(s1 in seeds(), s2 in seeds(), c in -3i64..=3, e in 0u32..=1) {
        let chart = pontryagin_chart(2, 2).unwrap();
        let omegas = d_contact(&chart).unwrap();
        let etas = contact_forms(&chart).unwrap();
        let (z, w) = (random_field(&chart, &s1), random_field(&chart, &s2));
        let f = Poly::int(c) * Poly::var(chart.base(1)).pow(e);
        let combined = z.scale(&f).add(&w).unwrap();
        let lhs = interior_sum(&combined, &omegas).unwrap();
        let (iz, iw) = (interior_sum(&z, &omegas).unwrap(), interior_sum(&w, &omegas).unwrap());
        for x in chart.coordinates() {
            prop_assert_eq!(lhs.get(x), iz.get(x) * &f + iw.get(x));
        }
        let lhs1 = interior_sum_1(&combined, &etas).unwrap();
        let rhs1 = interior_sum_1(&z, &etas).unwrap() * &f + interior_sum_1(&w, &etas).unwrap();
        prop_assert_eq!(lhs1, rhs1);
    }

    #[test]
    fn reeb_relations_survive_substitution(values in prop::collection::vec((-9i64..=9, 1i64..=5), 8)) {
        let chart = pontryagin_chart(2, 2).unwrap();
        let family = reeb_family(&chart).unwrap();
        let params = reeb_parameters(&chart).unwrap();
        prop_assert_eq!(params.len(), values.len());
        let map: BTreeMap<Symbol, Poly> = params
            .iter()
            .zip(&values)
            .map(|(s, (n, d))| (s.clone(), Poly::frac(*n, *d)))
            .collect();
        let reeb = family.substitute(&map).unwrap();
        let etas = contact_forms(&chart).unwrap();
        let omegas = d_contact(&chart).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { Poly::one() } else { Poly::zero() };
                prop_assert_eq!(pair(&etas[b], reeb.component(a)), want);
                prop_assert!(omegas[b].contract(reeb.component(a)).is_zero());
            }
        }
    }
}

#[test]
fn reeb_family_needs_pontryagin_chart() {
    let chart = pontryagin_chart(1, 2).unwrap();
    let velocity = chart.with_kind(kcontact::bundles::ChartKind::Velocity);
    assert!(reeb_family(&velocity).is_err());
    assert!(pontryagin_chart(0, 2).is_err());
}
