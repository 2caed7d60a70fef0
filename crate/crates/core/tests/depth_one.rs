mod common;

use cartan_core::prolong::{reduce_defining_degree, FieldCoords, Prolonger};
use cartan_core::scalar::kernel_of;
use cartan_core::superpoly::Polynomial;
use cartan_core::vecfield::VectorField;
use cartan_core::{RowSpace, SparseVec};
use common::{beginning, prolonger};

fn divergence(x: &VectorField) -> Polynomial {
    let table = x.table().clone();
    let mut d = Polynomial::zero(&table);
    for j in 0..table.len() {
        d = d.add(&x.coeff(j).nabla(j).unwrap());
    }
    d
}

/// Degree-`s` fields whose divergence (with super signs) is constant.
fn constant_divergence(p: &Prolonger, s: i64) -> RowSpace {
    let coords = FieldCoords::new(p.table(), s);
    let fields: Vec<VectorField> = (0..coords.len())
        .map(|k| coords.decode(&SparseVec::unit(k, p.field())))
        .collect();
    let mut index = std::collections::BTreeMap::new();
    let mut rows: Vec<Vec<(usize, cartan_core::Scalar)>> = Vec::new();
    for (c, x) in fields.iter().enumerate() {
        for (mono, v) in divergence(x).terms() {
            if mono.is_one() {
                continue;
            }
            let r = *index.entry(mono.clone()).or_insert_with(|| {
                rows.push(Vec::new());
                rows.len() - 1
            });
            rows[r].push((c, v.clone()));
        }
    }
    let rows: Vec<SparseVec> = rows.into_iter().map(SparseVec::from_entries).collect();
    RowSpace::from_vectors(p.field(), &kernel_of(p.field(), coords.len(), &rows))
}

#[test]
fn projective_beginning_gives_sl() {
    for n in [2usize, 3] {
        let p = prolonger(&format!("depth1-n{n}.json"), None);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("h11-n{n}.json")), 2).unwrap();
        assert_eq!(h.dims(), vec![n, n * n, n, 0]);
        assert_eq!(h.total(), n * n + 2 * n);
        assert!(h.recurrence_agrees());
        let comps = &h.table.components;
        for a in comps {
            for b in comps {
                if let Some(c) = h.component(a.degree + b.degree) {
                    assert!(p.brackets_into(a, b, c));
                }
            }
        }
    }
}

#[test]
fn divergence_beginning_gives_constant_divergence() {
    for n in [2usize, 3] {
        let p = prolonger(&format!("depth1-n{n}.json"), None);
        let h = reduce_defining_degree(&p, &beginning(&p, &format!("h12-n{n}.json")), 3).unwrap();
        assert!(h.recurrence_agrees());
        for s in 0..=3 {
            let coords = FieldCoords::new(p.table(), s);
            let got = coords.span(&h.component(s).unwrap().fields);
            assert!(got.same_span(&constant_divergence(&p, s)), "n = {n}, degree {s}");
        }
        // ∂_i of the divergence, one operator per coordinate
        assert_eq!(h.operators().len(), n);
    }
}

#[test]
fn super_projective_beginning_and_signed_system() {
    let p = prolonger("super-2-1.json", None);
    let h = reduce_defining_degree(&p, &beginning(&p, "super-h11.json"), 3).unwrap();
    assert_eq!(h.dims(), vec![3, 9, 3, 0, 0]);
    assert!(h.recurrence_agrees());
    let table = p.table().clone();
    let n = table.len();
    let half = p.field().from_i64(2).inv().unwrap();
    let odd = |i: usize| table.is_odd(i);
    let sgn = |i: usize, f: &Polynomial| odd(i) && f.parity() == Some(true);
    // residuals of the second-order system for one field
    let residuals = |x: &VectorField, signed: bool| -> Vec<Polynomial> {
        let f = |k: usize| x.coeff(k).clone();
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i != k && j != k {
                        out.push(f(k).partial(j).partial(i));
                    }
                }
            }
            for i in (0..n).filter(|&i| i != k) {
                let plain = f(i).nabla(i).unwrap().partial(k);
                if !odd(k) {
                    // ½ ∂_k² f^k = (−1)^{p(x^i)p(f^i)} ∂_k ∇_i f^i
                    let rhs = if signed && sgn(i, &f(i)) { plain.neg() } else { plain };
                    out.push(f(k).partial(k).partial(k).scale(&half).sub(&rhs));
                } else {
                    // ∂_k ∇_j f^j = ∂_k ∇_i f^i
                    let rhs = plain;
                    for j in (0..n).filter(|&j| j != k) {
                        out.push(f(j).nabla(j).unwrap().partial(k).sub(&rhs));
                    }
                }
            }
        }
        out
    };
    let h1 = h.component(1).unwrap();
    for x in &h1.fields {
        assert!(residuals(x, true).iter().all(|r| r.is_zero()), "{}", x.render());
    }
    assert!(h1.fields.iter().any(|x| residuals(x, false).iter().any(|r| !r.is_zero())));
    // the signed system cuts h_1 out of all quadratic fields
    let coords = FieldCoords::new(&table, 1);
    let mut rows: std::collections::BTreeMap<(usize, cartan_core::superpoly::Monomial), Vec<_>> = Default::default();
    for c in 0..coords.len() {
        let x = coords.decode(&SparseVec::unit(c, p.field()));
        for (e, r) in residuals(&x, true).iter().enumerate() {
            for (mono, v) in r.terms() {
                rows.entry((e, mono.clone())).or_default().push((c, v.clone()));
            }
        }
    }
    let rows: Vec<SparseVec> = rows.into_values().map(SparseVec::from_entries).collect();
    let solutions = RowSpace::from_vectors(p.field(), &kernel_of(p.field(), coords.len(), &rows));
    assert!(solutions.same_span(&coords.span(&h1.fields)));
}
