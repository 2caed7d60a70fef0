//! Complete and partial prolongations, degree by degree.
//!
//! A field `X` of weighted degree `s` is stored through its coordinates
//! `F^k = θ^k(X)` in the commutant frame, `X = Σ F^k Y_k`. The coordinates
//! along the central directions of the negative part are the generating
//! functions; for depth above one they determine `X`.

mod operators;
mod partial;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algspec::GradedAlgebraSpec;
use crate::centralize::{centralize, Coframe};
use crate::realize::Realization;
use crate::scalar::{Field, LinearSystem, RowSpace, Scalar, SolvePolicy, SparseVec};
use crate::superpoly::{Monomial, PolyError, Polynomial, VariableTable};
use crate::vecfield::VectorField;

pub use operators::{annihilator_operators, partial_component, DiffOperator, OperatorSet, OperatorTerm, Symmetrization};
pub use partial::{defining_degree, reduce_defining_degree, BeginningPart, PartialProlong};

#[derive(Debug, Error)]
pub enum ProlongError {
    #[error("supplied component at degree {degree} is not inside the ambient component: {witness}")]
    NotContained { degree: i64, witness: String },
    #[error("no field of degree {degree} has generating functions {tuple}")]
    NotGenerating { degree: i64, tuple: String },
    #[error("degree {degree}: {reason}")]
    Degree { degree: i64, reason: String },
    #[error("the dual of the degree {degree} component is not spanned by Y-words")]
    Functionals { degree: i64 },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The generating functions of one field, one polynomial per central coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingTuple {
    pub coordinates: Vec<usize>,
    pub values: Vec<Polynomial>,
}

impl GeneratingTuple {
    pub fn render(&self) -> Vec<String> {
        self.values.iter().map(|p| p.render()).collect()
    }
}

/// A basis of one homogeneous component together with its generating tuples.
#[derive(Debug, Clone)]
pub struct ProlongComponent {
    pub degree: i64,
    pub fields: Vec<VectorField>,
    pub generating: Vec<GeneratingTuple>,
}

impl ProlongComponent {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn is_zero(&self) -> bool {
        self.fields.is_empty()
    }
}

/// Per-degree components of a prolongation up to a degree cap.
#[derive(Debug, Clone)]
pub struct ProlongTable {
    pub components: Vec<ProlongComponent>,
    /// Three consecutive zero components at the top of the table.
    pub stabilized: bool,
}

impl ProlongTable {
    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn total(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn component(&self, s: i64) -> Option<&ProlongComponent> {
        self.components.iter().find(|c| c.degree == s)
    }

    fn from_components(components: Vec<ProlongComponent>) -> ProlongTable {
        let zeros = components.iter().rev().take_while(|c| c.is_zero()).count();
        ProlongTable {
            stabilized: zeros >= 3,
            components,
        }
    }
}

/// Coordinates of homogeneous fields of one weighted degree in the `x^μ ∂_m` basis.
#[derive(Debug, Clone)]
pub struct FieldCoords {
    table: Arc<VariableTable>,
    degree: i64,
    index: BTreeMap<(usize, Monomial), usize>,
    keys: Vec<(usize, Monomial)>,
}

impl FieldCoords {
    pub fn new(table: &Arc<VariableTable>, degree: i64) -> FieldCoords {
        let mut keys = Vec::new();
        for m in 0..table.len() {
            let w = degree + table.weight(m) as i64;
            if w < 0 {
                continue;
            }
            for mono in table.monomials_of_weight(w as u32, |_| true) {
                keys.push((m, mono));
            }
        }
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        FieldCoords {
            table: table.clone(),
            degree,
            index,
            keys,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Panics on a term of the wrong weighted degree.
    pub fn encode(&self, x: &VectorField) -> SparseVec {
        let mut entries = Vec::new();
        for m in 0..self.table.len() {
            for (mono, c) in x.coeff(m).terms() {
                let k = self
                    .index
                    .get(&(m, mono.clone()))
                    .unwrap_or_else(|| panic!("field {} is not of degree {}", x.render(), self.degree));
                entries.push((*k, c.clone()));
            }
        }
        SparseVec::from_entries(entries)
    }

    pub fn decode(&self, v: &SparseVec) -> VectorField {
        let mut coeffs = vec![Polynomial::zero(&self.table); self.table.len()];
        for (k, c) in v.iter() {
            let (m, mono) = &self.keys[k];
            coeffs[*m].add_term(mono.clone(), c);
        }
        VectorField::from_coeffs(&self.table, coeffs).expect("coefficients share the table")
    }

    pub fn span<'a, I: IntoIterator<Item = &'a VectorField>>(&self, fields: I) -> RowSpace {
        let vs: Vec<SparseVec> = fields.into_iter().map(|x| self.encode(x)).collect();
        RowSpace::from_vectors(self.table.field(), &vs)
    }
}

/// Everything needed to compute components: the realization, its commutant
/// frame and the choice of generating coordinates.
#[derive(Debug, Clone)]
pub struct Prolonger {
    coframe: Coframe,
    generating: Vec<usize>,
    first_level: Vec<usize>,
}

impl Prolonger {
    pub fn new(real: &Realization) -> Prolonger {
        Prolonger::from_coframe(centralize(real))
    }

    pub fn from_coframe(coframe: Coframe) -> Prolonger {
        let spec = coframe.spec().clone();
        Prolonger {
            generating: spec.center_of_negative(),
            first_level: spec.level(1),
            coframe,
        }
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    pub fn spec(&self) -> &Arc<GradedAlgebraSpec> {
        self.coframe.spec()
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        self.spec().table()
    }

    pub fn field(&self) -> Field {
        self.spec().field()
    }

    pub fn generating_coordinates(&self) -> &[usize] {
        &self.generating
    }

    pub fn depth(&self) -> i64 {
        self.spec().depth() as i64
    }

    /// `θ^k(X)` for every `k`.
    pub fn coordinates(&self, x: &VectorField) -> Vec<Polynomial> {
        self.coframe.forms().iter().map(|th| th.pair(x)).collect()
    }

    pub fn generating_tuple(&self, x: &VectorField) -> GeneratingTuple {
        GeneratingTuple {
            coordinates: self.generating.clone(),
            values: self.generating.iter().map(|&k| self.coframe.theta(k).pair(x)).collect(),
        }
    }

    /// `Σ F^k Y_k`.
    pub fn from_coordinates(&self, coords: &[Polynomial]) -> VectorField {
        let mut x = VectorField::zero(self.table());
        for (k, f) in coords.iter().enumerate() {
            if !f.is_zero() {
                x = x.add(&self.coframe.y(k).left_mul(f));
            }
        }
        x
    }

    fn component_from_fields(&self, degree: i64, fields: Vec<VectorField>) -> ProlongComponent {
        let generating = fields.iter().map(|x| self.generating_tuple(x)).collect();
        ProlongComponent {
            degree,
            fields,
            generating,
        }
    }

    /// Brings a spanning set to the row-reduced basis of its span.
    pub fn normalize(&self, degree: i64, fields: &[VectorField]) -> ProlongComponent {
        let coords = FieldCoords::new(self.table(), degree);
        let space = coords.span(fields);
        let basis = space.basis().iter().map(|v| coords.decode(v)).collect();
        self.component_from_fields(degree, basis)
    }

    /// `X` preserves the distribution cut out by the forms beyond the first level.
    pub fn distribution_check(&self, x: &VectorField) -> bool {
        let spec = self.spec();
        self.first_level.iter().all(|&i| {
            let b = x.bracket(self.coframe.y(i));
            (0..spec.dim())
                .filter(|&k| spec.weight(k) >= 2)
                .all(|k| self.coframe.theta(k).pair(&b).is_zero())
        })
    }

    pub fn negative_component(&self, s: i64) -> ProlongComponent {
        let real = self.coframe.realization();
        let fields: Vec<VectorField> = (0..self.spec().dim())
            .filter(|&i| -(self.spec().weight(i) as i64) == s)
            .map(|i| real.fields()[i].clone())
            .collect();
        self.component_from_fields(s, fields)
    }

    fn parities(&self) -> Vec<bool> {
        if self.table().vars().iter().any(|v| v.odd) {
            vec![false, true]
        } else {
            vec![false]
        }
    }

    /// The degree-`s` component of the complete prolongation, from the linear
    /// equations on the frame coordinates
    /// `Y_i(F^k) − Σ_j (−1)^{p_i π(F^j)} c^k_ij F^j = 0` (`i` of the first level,
    /// `k` beyond it). Non-generating coordinates are eliminated first, so the
    /// basis is indexed by the free generating-function coefficients.
    pub fn complete_component(&self, s: i64) -> ProlongComponent {
        let spec = self.spec().clone();
        let table = self.table().clone();
        let field = self.field();
        let n = spec.dim();
        let mut columns: Vec<(usize, Monomial)> = Vec::new();
        for &px in &self.parities() {
            for k in 0..n {
                let w = s + spec.weight(k) as i64;
                if w < 0 {
                    continue;
                }
                for mono in table.monomials_of_weight(w as u32, |_| true) {
                    if mono.parity(&table) == (px ^ spec.is_odd(k)) {
                        columns.push((k, mono));
                    }
                }
            }
        }
        if columns.is_empty() {
            return self.component_from_fields(s, Vec::new());
        }
        let upper: Vec<usize> = (0..n).filter(|&k| spec.weight(k) >= 2).collect();
        let mut rows: BTreeMap<(usize, usize, Monomial), Vec<(usize, Scalar)>> = BTreeMap::new();
        for (col, (j, mono)) in columns.iter().enumerate() {
            let mu = Polynomial::term(&table, mono.clone(), field.one());
            let pi = mono.parity(&table);
            for &i in &self.first_level {
                if spec.weight(*j) >= 2 {
                    let yi = self.coframe.y(i).apply(&mu);
                    for (nu, c) in yi.terms() {
                        rows.entry((i, *j, nu.clone())).or_default().push((col, c.clone()));
                    }
                }
                for (k, c) in spec.bracket(i, *j).iter() {
                    if !upper.contains(&k) {
                        continue;
                    }
                    let sign_neg = !(spec.is_odd(i) && pi);
                    let c = if sign_neg { -c } else { c.clone() };
                    rows.entry((i, k, mono.clone())).or_default().push((col, c));
                }
            }
        }
        let mut sys = LinearSystem::new(field, columns.len());
        for (_, entries) in rows {
            sys.push_homogeneous(SparseVec::from_entries(entries)).expect("columns in range");
        }
        let rank_of = |(k, _): &(usize, Monomial)| match self.generating.iter().position(|g| g == k) {
            None => (0usize, 0usize),
            Some(p) => (1, p),
        };
        let mut order: Vec<usize> = (0..columns.len()).collect();
        order.sort_by_key(|&c| (rank_of(&columns[c]), c));
        sys.set_column_order(order).expect("a permutation");
        let outcome = sys.solve(SolvePolicy::KernelBasis).expect("homogeneous");
        let fields = outcome
            .kernel
            .iter()
            .map(|v| {
                let mut coords = vec![Polynomial::zero(&table); n];
                for (c, a) in v.iter() {
                    let (k, mono) = &columns[c];
                    coords[*k].add_term(mono.clone(), a);
                }
                self.from_coordinates(&coords)
            })
            .collect();
        self.component_from_fields(s, fields)
    }

    /// Brute force: all degree-`s` fields `X` with `[X_i, X]` in `lower` for
    /// every `i` of the first level, searched over the basis `f·Y_j`.
    pub fn oracle_component(&self, lower: &ProlongComponent, s: i64) -> ProlongComponent {
        if s < 0 {
            return self.negative_component(s);
        }
        assert_eq!(lower.degree, s - 1, "the oracle needs the component just below");
        let spec = self.spec().clone();
        let table = self.table().clone();
        let field = self.field();
        let n = spec.dim();
        let mut candidates = Vec::new();
        for j in 0..n {
            let w = s + spec.weight(j) as i64;
            for mono in table.monomials_of_weight(w as u32, |_| true) {
                let f = Polynomial::term(&table, mono, field.one());
                candidates.push(self.coframe.y(j).left_mul(&f));
            }
        }
        let below = FieldCoords::new(&table, s - 1);
        let first = &self.first_level;
        let nc = candidates.len();
        let nl = lower.dim();
        let lambda = |a: usize, b: usize| nc + a * nl + b;
        let lower_vecs: Vec<SparseVec> = lower.fields.iter().map(|x| below.encode(x)).collect();
        let mut rows: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
        let xs = self.coframe.realization().fields();
        for (a, &i) in first.iter().enumerate() {
            for (c, cand) in candidates.iter().enumerate() {
                for (r, v) in below.encode(&xs[i].bracket(cand)).iter() {
                    rows.entry((a, r)).or_default().push((c, v.clone()));
                }
            }
            for (b, lv) in lower_vecs.iter().enumerate() {
                for (r, v) in lv.iter() {
                    rows.entry((a, r)).or_default().push((lambda(a, b), -v));
                }
            }
        }
        let mut sys = LinearSystem::new(field, nc + first.len() * nl);
        for (_, entries) in rows {
            sys.push_homogeneous(SparseVec::from_entries(entries)).expect("columns in range");
        }
        let outcome = sys.solve(SolvePolicy::KernelBasis).expect("homogeneous");
        let mut fields = Vec::new();
        for v in &outcome.kernel {
            let mut x = VectorField::zero(&table);
            for (c, a) in v.iter() {
                if c < nc {
                    x.add_scaled(a, &candidates[c]);
                }
            }
            if !x.is_zero() {
                fields.push(x);
            }
        }
        self.normalize(s, &fields)
    }

    pub fn same_span(&self, a: &ProlongComponent, b: &ProlongComponent) -> bool {
        a.degree == b.degree && {
            let coords = FieldCoords::new(self.table(), a.degree);
            coords.span(&a.fields).same_span(&coords.span(&b.fields))
        }
    }

    pub fn contains(&self, component: &ProlongComponent, x: &VectorField) -> bool {
        let coords = FieldCoords::new(self.table(), component.degree);
        coords.span(&component.fields).contains(&coords.encode(x))
    }

    /// Coordinates of `x` in the basis of `component`, if it lies there.
    pub fn express(&self, component: &ProlongComponent, x: &VectorField) -> Option<Vec<Scalar>> {
        let coords = FieldCoords::new(self.table(), component.degree);
        let field = self.field();
        let mut sys = LinearSystem::new(field, component.dim());
        let target = coords.encode(x);
        let basis: Vec<SparseVec> = component.fields.iter().map(|f| coords.encode(f)).collect();
        let mut rows: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (b, v) in basis.iter().enumerate() {
            for (r, c) in v.iter() {
                rows.entry(r).or_default().push((b, c.clone()));
            }
        }
        for (r, _) in target.iter() {
            rows.entry(r).or_default();
        }
        for (r, entries) in rows {
            let rhs = target.get(r).cloned().unwrap_or_else(|| field.zero());
            sys.push_row(SparseVec::from_entries(entries), rhs).expect("columns in range");
        }
        sys.solve(SolvePolicy::FreeVarsZero).ok().and_then(|o| o.particular)
    }

    /// The field of `component` whose generating functions are `tuple`.
    pub fn field_with_generating(
        &self,
        component: &ProlongComponent,
        tuple: &[Polynomial],
    ) -> Result<VectorField, ProlongError> {
        let field = self.field();
        let fail = || ProlongError::NotGenerating {
            degree: component.degree,
            tuple: tuple.iter().map(|p| p.render()).collect::<Vec<_>>().join(", "),
        };
        if tuple.len() != self.generating.len() {
            return Err(fail());
        }
        let mut rows: BTreeMap<(usize, Monomial), (Vec<(usize, Scalar)>, Scalar)> = BTreeMap::new();
        for (b, g) in component.generating.iter().enumerate() {
            for (a, p) in g.values.iter().enumerate() {
                for (mono, c) in p.terms() {
                    rows.entry((a, mono.clone()))
                        .or_insert_with(|| (Vec::new(), field.zero()))
                        .0
                        .push((b, c.clone()));
                }
            }
        }
        for (a, p) in tuple.iter().enumerate() {
            for (mono, c) in p.terms() {
                rows.entry((a, mono.clone()))
                    .or_insert_with(|| (Vec::new(), field.zero()))
                    .1 = c.clone();
            }
        }
        let mut sys = LinearSystem::new(field, component.dim());
        for (_, (entries, rhs)) in rows {
            sys.push_row(SparseVec::from_entries(entries), rhs).expect("columns in range");
        }
        let x = sys
            .solve(SolvePolicy::FreeVarsZero)
            .map_err(|_| fail())?
            .particular
            .expect("requested particular solution");
        let mut out = VectorField::zero(self.table());
        for (b, a) in x.iter().enumerate() {
            out.add_scaled(a, &component.fields[b]);
        }
        Ok(out)
    }

    /// Components `−d ..= s_max` of the complete prolongation.
    pub fn complete_prolong(&self, s_max: i64) -> ProlongTable {
        let comps = (-self.depth()..=s_max).map(|s| self.complete_component(s)).collect();
        ProlongTable::from_components(comps)
    }

    /// The same table grown by the recurrence alone.
    pub fn oracle_prolong(&self, s_max: i64) -> ProlongTable {
        let mut comps: Vec<ProlongComponent> = (-self.depth()..0).map(|s| self.negative_component(s)).collect();
        for s in 0..=s_max {
            let next = self.oracle_component(comps.last().expect("negative part is nonempty"), s);
            comps.push(next);
        }
        ProlongTable::from_components(comps)
    }

    /// `[a, b] ⊂ target` for every pair of basis fields.
    pub fn brackets_into(&self, a: &ProlongComponent, b: &ProlongComponent, target: &ProlongComponent) -> bool {
        assert_eq!(a.degree + b.degree, target.degree);
        let coords = FieldCoords::new(self.table(), target.degree);
        let space = coords.span(&target.fields);
        a.fields
            .iter()
            .all(|x| b.fields.iter().all(|y| space.contains(&coords.encode(&x.bracket(y)))))
    }
}
