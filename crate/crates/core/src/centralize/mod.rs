//! The commutant frame `Y_1..Y_n` of a realization and its dual coframe.

use std::fmt;
use std::sync::Arc;

use crate::algspec::GradedAlgebraSpec;
use crate::realize::{coframe_of, Realization};
use crate::superpoly::Polynomial;
use crate::vecfield::{OneForm, VectorField};

/// Fields `Y_j` commuting with every `X_i`, and forms `θ^k` with `θ^k(Y_j) = δ^k_j`.
#[derive(Debug, Clone)]
pub struct Coframe {
    realization: Realization,
    fields: Vec<VectorField>,
    forms: Vec<OneForm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoframeViolation {
    Duality { form: usize, field: usize },
    Commutes { i: usize, j: usize, residual: String },
    AntiIsomorphism { i: usize, j: usize, residual: String },
    Lowest { field: usize },
}

impl fmt::Display for CoframeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoframeViolation::Duality { form, field } => write!(f, "theta{}(Y{}) is wrong", form + 1, field + 1),
            CoframeViolation::Commutes { i, j, residual } => {
                write!(f, "[X{}, Y{}] = {}", i + 1, j + 1, residual)
            }
            CoframeViolation::AntiIsomorphism { i, j, residual } => {
                write!(f, "[Y{}, Y{}] misses by {}", i + 1, j + 1, residual)
            }
            CoframeViolation::Lowest { field } => write!(f, "Y{} does not start with its coordinate field", field + 1),
        }
    }
}

impl Coframe {
    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn spec(&self) -> &Arc<GradedAlgebraSpec> {
        self.realization.spec()
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn forms(&self) -> &[OneForm] {
        &self.forms
    }

    pub fn y(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    pub fn theta(&self, k: usize) -> &OneForm {
        &self.forms[k]
    }

    pub fn verify(&self) -> Vec<CoframeViolation> {
        let spec = self.spec();
        let table = spec.table();
        let n = spec.dim();
        let xs = self.realization.fields();
        let mut out = Vec::new();
        for k in 0..n {
            for j in 0..n {
                let v = self.forms[k].pair(&self.fields[j]);
                let ok = if k == j { v == Polynomial::one(table) } else { v.is_zero() };
                if !ok {
                    out.push(CoframeViolation::Duality { form: k, field: j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let r = xs[i].bracket(&self.fields[j]);
                if !r.is_zero() {
                    out.push(CoframeViolation::Commutes {
                        i,
                        j,
                        residual: r.render(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                // [Y_i, Y_j] = -Σ_k c^k_ij Y_k
                let mut r = self.fields[i].bracket(&self.fields[j]);
                for (k, c) in spec.bracket(i, j).iter() {
                    r.add_scaled(c, &self.fields[k]);
                }
                if !r.is_zero() {
                    out.push(CoframeViolation::AntiIsomorphism {
                        i,
                        j,
                        residual: r.render(),
                    });
                }
            }
        }
        for j in 0..n {
            if self.fields[j].standard_component(-1) != VectorField::partial(table, j) {
                out.push(CoframeViolation::Lowest { field: j });
            }
        }
        out
    }
}

/// Builds `Y_j = Σ_p Y_(p)` from `Y_(-1) = ∂_j`: each `∂_i`-derivative of
/// `Y_(p)` is prescribed by the lower components, and every coefficient
/// monomial is recovered from the derivative in its first variable.
pub fn centralizer_fields(real: &Realization) -> Vec<VectorField> {
    let spec = real.spec();
    let table = spec.table();
    let n = spec.dim();
    let depth = spec.depth() as i64;
    let xs = real.fields();
    // standard components of every X_i, up to the largest possible degree
    let x_parts: Vec<Vec<VectorField>> = xs
        .iter()
        .map(|x| (-1..depth).map(|p| x.standard_component(p)).collect())
        .collect();
    let part = |i: usize, p: i64| -> &VectorField { &x_parts[i][(p + 1) as usize] };
    (0..n)
        .map(|j| {
            let mut comps: Vec<VectorField> = vec![VectorField::partial(table, j)];
            // coefficients have standard degree at most their weight, i.e. < depth
            for p in 0..(depth - 1) {
                let mut prescribed = Vec::with_capacity(n);
                for i in 0..n {
                    let mut r = VectorField::zero(table);
                    for s in -1..p {
                        let q = p - 1 - s;
                        let lower = &comps[(s + 1) as usize];
                        if q < depth - 1 && !lower.is_zero() {
                            r = r.sub(&part(i, q).bracket(lower));
                        }
                    }
                    prescribed.push(r);
                }
                let mut yp = VectorField::zero(table);
                for m in 0..n {
                    let mut g = Polynomial::zero(table);
                    let mut seen = std::collections::BTreeSet::new();
                    for (i, r) in prescribed.iter().enumerate() {
                        for (mono, c) in r.coeff(m).terms() {
                            let Some(up) = mono.raised(table, i) else { continue };
                            if up.first_var() == Some(i) && seen.insert(up.clone()) {
                                g.add_term(up, c);
                            }
                        }
                    }
                    yp.set_coeff(m, g);
                }
                for (i, r) in prescribed.iter().enumerate() {
                    let got = VectorField::partial(table, i).bracket(&yp);
                    assert_eq!(
                        &got, r,
                        "commutant component {p} of Y{} is not integrable along x{}",
                        j + 1,
                        i + 1
                    );
                }
                comps.push(yp);
            }
            let mut y = VectorField::zero(table);
            for c in &comps {
                y = y.add(c);
            }
            y
        })
        .collect()
}

/// The coframe `θ` dual to `Y`, by back-substitution in decreasing depth.
pub fn dual_coframe(spec: &GradedAlgebraSpec, ys: &[VectorField]) -> Vec<OneForm> {
    coframe_of(spec, ys)
}

pub fn centralize(real: &Realization) -> Coframe {
    let fields = centralizer_fields(real);
    let forms = dual_coframe(real.spec(), &fields);
    let cf = Coframe {
        realization: real.clone(),
        fields,
        forms,
    };
    debug_assert!(cf.verify().is_empty(), "{:?}", cf.verify());
    cf
}

/// `Ŷ = Y∘Π` for odd `Y` (`Π` the parity operator), plain `Y` otherwise.
pub fn hat_apply(y: &VectorField, f: &Polynomial) -> Polynomial {
    match y.parity() {
        Some(true) => y.apply(&f.parity_op()),
        _ => y.apply(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::{realize, ColumnOrder};

    #[test]
    fn g2_commutant() {
        let spec = Arc::new(
            GradedAlgebraSpec::from_json(
                r#"{"generators": [
        {"name": "e1", "degree": -1}, {"name": "e2", "degree": -1}, {"name": "e3", "degree": -2},
        {"name": "e4", "degree": -3}, {"name": "e5", "degree": -3}],
        "brackets": [{"i": 1, "j": 2, "k": 3, "coeff": 1}, {"i": 1, "j": 3, "k": 4, "coeff": 1},
                     {"i": 2, "j": 3, "k": 5, "coeff": 1}]}"#,
            )
            .unwrap(),
        );
        let real = realize(&spec, &ColumnOrder::default()).unwrap();
        let cf = centralize(&real);
        assert!(cf.verify().is_empty());
        let ys: Vec<String> = cf.fields().iter().map(|y| y.render()).collect();
        assert_eq!(
            ys,
            vec!["d1 + x3*d4", "d2 - x1*d3 - x1^(2)*d4 + x3*d5", "d3", "d4", "d5"]
        );
        let th: Vec<String> = cf.forms().iter().map(|w| w.render()).collect();
        assert_eq!(
            th,
            vec!["dx1", "dx2", "dx3 + x1*dx2", "dx4 + x1^(2)*dx2 - x3*dx1", "dx5 - x3*dx2"]
        );
    }

    #[test]
    fn hat_flips_odd_arguments() {
        let t = crate::superpoly::table_from(
            crate::scalar::Field::RATIONALS,
            &[("t", false, 2), ("th1", true, 1)],
        )
        .unwrap();
        let y = VectorField::parse(&t, "dth1 - th1*dt").unwrap();
        let f = Polynomial::parse(&t, "th1").unwrap();
        assert_eq!(hat_apply(&y, &f).render(), "-1");
        let even = VectorField::parse(&t, "dt").unwrap();
        let g = Polynomial::parse(&t, "t").unwrap();
        assert_eq!(hat_apply(&even, &g), even.apply(&g));
    }
    #[test]
    fn odd_heisenberg_commutant() {
        let mut gens = vec![r#"{"name": "z", "degree": -2, "coordinate": "t"}"#.to_string()];
        let mut brackets = Vec::new();
        for i in 1..=6 {
            gens.push(format!(r#"{{"name": "f{i}", "degree": -1, "parity": "odd", "coordinate": "th{i}"}}"#));
            brackets.push(format!(r#"{{"i": "f{i}", "j": "f{i}", "k": "z", "coeff": 2}}"#));
        }
        let text = format!(
            r#"{{"field": {{"char": 0, "i": true}}, "generators": [{}], "brackets": [{}]}}"#,
            gens.join(","),
            brackets.join(",")
        );
        let spec = Arc::new(GradedAlgebraSpec::from_json(&text).unwrap());
        let real = realize(&spec, &ColumnOrder::default()).unwrap();
        assert_eq!(real.fields()[1].render(), "th1*dt + dth1");
        let cf = centralize(&real);
        assert!(cf.verify().is_empty(), "{:?}", cf.verify());
        assert_eq!(cf.y(1).render(), "-th1*dt + dth1");
        assert_eq!(cf.theta(0).render(), "th6*dth6 + th5*dth5 + th4*dth4 + th3*dth3 + th2*dth2 + th1*dth1 + dt");
    }
}
