mod common;

use cartan_core::prolong::{reduce_defining_degree, BeginningPart, ProlongError, Prolonger};
use cartan_core::superpoly::Polynomial;
use cartan_core::vecfield::VectorField;
use common::{beginning, contact};

fn monomial_count(p: &Prolonger, w: i64) -> usize {
    if w < 0 {
        0
    } else {
        p.table().monomials_of_weight(w as u32, |_| true).len()
    }
}

/// `K_f = 2fY_t + Σ_i (−Y_{q_i}(f) Y_{p_i} + Y_{p_i}(f) Y_{q_i})`.
fn contact_field(p: &Prolonger, n: usize, f: &Polynomial) -> VectorField {
    let cf = p.coframe();
    let spec = p.spec();
    let idx = |name: &str| spec.index_of(name).unwrap();
    let two = p.field().from_i64(2);
    let mut k = cf.y(idx("z")).left_mul(&f.scale(&two));
    for i in 1..=n {
        let yp = cf.y(idx(&format!("p{i}")));
        let yq = cf.y(idx(&format!("q{i}")));
        k = k.sub(&yp.left_mul(&yq.apply(f)));
        k = k.add(&yq.left_mul(&yp.apply(f)));
    }
    k
}

#[test]
fn contact_dimensions_and_generating_functions() {
    for n in [1, 2] {
        let p = contact(n);
        let table = p.complete_prolong(3);
        let half = p.field().from_i64(2).inv().unwrap();
        for c in &table.components {
            assert_eq!(c.dim(), monomial_count(&p, c.degree + 2), "n = {n}, degree {}", c.degree);
            for (x, g) in c.fields.iter().zip(&c.generating) {
                let f = g.values[0].scale(&half);
                assert_eq!(*x, contact_field(&p, n, &f), "n = {n}: {}", x.render());
            }
        }
    }
}

#[test]
fn contact_oracle_agrees() {
    for n in [1, 2] {
        let p = contact(n);
        let a = p.complete_prolong(2);
        let b = p.oracle_prolong(2);
        for (x, y) in a.components.iter().zip(&b.components) {
            assert!(p.same_span(x, y), "n = {n}, degree {}", x.degree);
        }
    }
}

#[test]
fn symplectic_beginning_gives_poisson_algebra() {
    for n in [1, 2] {
        let p = contact(n);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("sp-n{n}.json")), 3).unwrap();
        assert_eq!(h.defining_degrees, vec![0]);
        assert!(h.recurrence_agrees());
        let ops = h.operators();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].render(&p), "Y_t F_t");
        let t = p.table().index_of("t").unwrap();
        for c in &h.table.components {
            assert_eq!(c.dim(), {
                let w = c.degree + 2;
                if w < 0 {
                    0
                } else {
                    p.table().monomials_of_weight(w as u32, |i| i != t).len()
                }
            });
            for g in &c.generating {
                assert!(g.values[0].partial(t).is_zero());
            }
        }
    }
}

#[test]
fn grading_element_alone_does_not_prolong() {
    for n in [1, 2] {
        let p = contact(n);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("id-n{n}.json")), 4).unwrap();
        assert!(h.recurrence_agrees());
        assert_eq!(h.component(0).unwrap().dim(), 1);
        for s in 1..=4 {
            assert!(h.component(s).unwrap().is_zero());
        }
        assert!(h.table.stabilized);
    }
}

#[test]
fn cubic_beginning_gives_derivations_of_poisson() {
    for n in [1, 2] {
        let p = contact(n);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("w1-n{n}.json")), 3).unwrap();
        assert_eq!(h.defining_degrees, vec![1]);
        assert!(h.recurrence_agrees());
        let t = p.table().index_of("t").unwrap();
        let po = |w: i64| p.table().monomials_of_weight(w as u32, |i| i != t).len();
        assert_eq!(h.component(0).unwrap().dim(), po(2) + 1);
        for s in 1..=3 {
            assert_eq!(h.component(s).unwrap().dim(), po(s + 2), "degree {s}");
        }
        let ops: Vec<String> = h.operators().iter().map(|o| o.render(&p)).collect();
        assert_eq!(ops.len(), 2 * n);
        assert!(ops.iter().all(|o| o.contains("Y_t")), "{ops:?}");
    }
}

#[test]
fn linear_in_t_beginning_gives_sp_2n_plus_2() {
    for n in [1i64, 2] {
        let p = contact(n as usize);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("w2-n{n}.json")), 3).unwrap();
        assert!(h.recurrence_agrees());
        let expected = vec![1, 2 * n as usize, (2 * n * n + n + 1) as usize, 2 * n as usize, 1, 0];
        assert_eq!(h.dims(), expected);
        assert_eq!(h.total() as i64, 2 * n * n + 5 * n + 3);
    }
}

#[test]
fn two_supplied_degrees_need_one_pass() {
    let p = contact(1);
    let sp = beginning(&p, "sp-n1.json");
    let w1 = beginning(&p, "w1-n1.json");
    let both = BeginningPart {
        supplied: sp.supplied.into_iter().chain(w1.supplied).collect(),
    };
    let h = reduce_defining_degree(&p, &both, 2).unwrap();
    assert_eq!(h.defining_degrees, vec![0]);

    let g1 = p.complete_component(1);
    let tp = Polynomial::parse(p.table(), "t*p1").unwrap();
    let bad = beginning(&p, "sp-n1.json").with(1, vec![p.field_with_generating(&g1, &[tp]).unwrap()]);
    match reduce_defining_degree(&p, &bad, 2) {
        Err(ProlongError::NotContained { degree, .. }) => assert_eq!(degree, 1),
        other => panic!("expected a containment error, got {other:?}"),
    }
}
