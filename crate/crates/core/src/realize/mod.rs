//! Embedding a graded nilpotent algebra into polynomial vector fields via
//! Maurer–Cartan forms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algspec::GradedAlgebraSpec;
use crate::scalar::{LinearError, LinearSystem, SolvePolicy, SparseVec};
use crate::superpoly::{Monomial, Polynomial, VariableTable};
use crate::vecfield::{tensor, wedge, OneForm, TwoForm, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("Maurer-Cartan system for form {form} is inconsistent: {source}")]
    Inconsistent { form: usize, source: LinearError },
    #[error("realization rejected: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<RealizationViolation>),
    #[error("bad column order: {0}")]
    ColumnOrder(String),
    #[error("expected {expected} entries, got {got}")]
    Count { expected: usize, got: usize },
    #[error("bad realization file: {0}")]
    Schema(String),
    #[error("supplied forms do not match the supplied fields: form {0}")]
    Mismatch(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizationViolation {
    Duality { form: usize, field: usize, value: String },
    MaurerCartan { form: usize, l: usize, m: usize, residual: String },
    Bracket { i: usize, j: usize, residual: String },
    Degree { field: usize },
    Origin { field: usize },
}

impl fmt::Display for RealizationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizationViolation::Duality { form, field, value } => {
                write!(f, "form {} on field {} gives {}", form + 1, field + 1, value)
            }
            RealizationViolation::MaurerCartan { form, l, m, residual } => write!(
                f,
                "Maurer-Cartan fails for form {} on slots ({}, {}): residual {}",
                form + 1,
                l + 1,
                m + 1,
                residual
            ),
            RealizationViolation::Bracket { i, j, residual } => {
                write!(f, "bracket of fields {} and {} is off by {}", i + 1, j + 1, residual)
            }
            RealizationViolation::Degree { field } => write!(f, "field {} has the wrong degree", field + 1),
            RealizationViolation::Origin { field } => {
                write!(f, "field {} does not evaluate to its basis vector at 0", field + 1)
            }
        }
    }
}

/// Pivot priority for the free coefficients of the Maurer–Cartan solve.
///
/// The default ranks `dx^m` slots by depth descending then index, and the
/// monomials within a slot in ascending monomial order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnOrder {
    pub slots: Option<Vec<usize>>,
    pub monomials_descending: bool,
}

impl ColumnOrder {
    /// Parses `{"slots": ["x3", "x1", ...], "monomials": "ascending"|"descending"}`.
    pub fn from_json(text: &str, table: &VariableTable) -> Result<ColumnOrder, RealizeError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| RealizeError::ColumnOrder(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| RealizeError::ColumnOrder("expected an object".into()))?;
        let mut order = ColumnOrder::default();
        for (key, val) in obj {
            match key.as_str() {
                "slots" => {
                    let names = val
                        .as_array()
                        .ok_or_else(|| RealizeError::ColumnOrder("slots must be a list".into()))?;
                    let mut slots = Vec::new();
                    for n in names {
                        let name = n
                            .as_str()
                            .ok_or_else(|| RealizeError::ColumnOrder("slot names must be strings".into()))?;
                        let i = table
                            .index_of(name)
                            .ok_or_else(|| RealizeError::ColumnOrder(format!("unknown coordinate {name:?}")))?;
                        if slots.contains(&i) {
                            return Err(RealizeError::ColumnOrder(format!("repeated coordinate {name:?}")));
                        }
                        slots.push(i);
                    }
                    order.slots = Some(slots);
                }
                "monomials" => match val.as_str() {
                    Some("ascending") => order.monomials_descending = false,
                    Some("descending") => order.monomials_descending = true,
                    _ => return Err(RealizeError::ColumnOrder("monomials must be ascending or descending".into())),
                },
                other => return Err(RealizeError::ColumnOrder(format!("unknown key {other:?}"))),
            }
        }
        Ok(order)
    }

    fn slot_rank(&self, spec: &GradedAlgebraSpec) -> Vec<usize> {
        let n = spec.dim();
        let mut listed: Vec<usize> = self.slots.clone().unwrap_or_default();
        let mut rest: Vec<usize> = (0..n).filter(|i| !listed.contains(i)).collect();
        rest.sort_by_key(|&i| (std::cmp::Reverse(spec.weight(i)), i));
        listed.extend(rest);
        let mut rank = vec![0; n];
        for (r, &i) in listed.iter().enumerate() {
            rank[i] = r;
        }
        rank
    }
}

/// Forms `ω^i`, fields `X_i` with `ω^i(X_j) = δ^i_j`, for one spec.
#[derive(Debug, Clone)]
pub struct Realization {
    spec: Arc<GradedAlgebraSpec>,
    forms: Vec<OneForm>,
    fields: Vec<VectorField>,
}

impl Realization {
    pub fn spec(&self) -> &Arc<GradedAlgebraSpec> {
        &self.spec
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        self.spec.table()
    }

    pub fn forms(&self) -> &[OneForm] {
        &self.forms
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    /// `V^i_k`, the coefficient of `dx^k` in `ω^i`.
    pub fn v(&self, i: usize, k: usize) -> &Polynomial {
        self.forms[i].coeff(k)
    }

    /// Checks duality, Maurer–Cartan, brackets, degrees and values at 0.
    pub fn verify(&self) -> Vec<RealizationViolation> {
        verify_parts(&self.spec, &self.forms, &self.fields)
    }
}

/// `-Σ_{a,b} c^k_ab T_{ω^a ω^b}` over all ordered pairs.
pub fn maurer_cartan_rhs(spec: &GradedAlgebraSpec, forms: &[OneForm], k: usize) -> TwoForm {
    let table = spec.table();
    let mut out = TwoForm::zero(table);
    for (a, b, kk, c) in spec.structure_constants() {
        if kk == k {
            out = out.sub(&tensor(&forms[a], &forms[b]).scale(c));
        }
    }
    out
}

/// The same right-hand side written with wedges: `-Σ_{a<b} c^k_ab ω^a∧ω^b - Σ_a c^k_aa T_{ω^a ω^a}`.
pub fn maurer_cartan_rhs_wedge(spec: &GradedAlgebraSpec, forms: &[OneForm], k: usize) -> TwoForm {
    let table = spec.table();
    let mut out = TwoForm::zero(table);
    for (a, b, kk, c) in spec.structure_constants() {
        if kk != k || a > b {
            continue;
        }
        let term = if a == b {
            tensor(&forms[a], &forms[a])
        } else {
            wedge(&forms[a], &forms[b])
        };
        out = out.sub(&term.scale(c));
    }
    out
}

fn verify_parts(spec: &GradedAlgebraSpec, forms: &[OneForm], fields: &[VectorField]) -> Vec<RealizationViolation> {
    let n = spec.dim();
    let mut out = Vec::new();
    for (i, w) in forms.iter().enumerate() {
        for (j, x) in fields.iter().enumerate() {
            let v = w.pair(x);
            let expected = if i == j { Polynomial::one(spec.table()) } else { Polynomial::zero(spec.table()) };
            if v != expected {
                out.push(RealizationViolation::Duality {
                    form: i,
                    field: j,
                    value: v.render(),
                });
            }
        }
    }
    for (k, w) in forms.iter().enumerate() {
        let residual = w.exterior_d().sub(&maurer_cartan_rhs(spec, forms, k));
        let first = residual.slots().next().map(|((l, m), r)| (l, m, r.render()));
        if let Some((l, m, r)) = first {
            out.push(RealizationViolation::MaurerCartan {
                form: k,
                l,
                m,
                residual: r,
            });
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut expected = VectorField::zero(spec.table());
            for (k, c) in spec.bracket(i, j).iter() {
                expected.add_scaled(c, &fields[k]);
            }
            let residual = fields[i].bracket(&fields[j]).sub(&expected);
            if !residual.is_zero() {
                out.push(RealizationViolation::Bracket {
                    i,
                    j,
                    residual: residual.render(),
                });
            }
        }
    }
    for (i, x) in fields.iter().enumerate() {
        if x.weighted_degree() != Some(-(spec.weight(i) as i64)) || x.parity() != Some(spec.is_odd(i)) {
            out.push(RealizationViolation::Degree { field: i });
        }
        let at0 = x.eval_at_origin();
        let ok = at0
            .iter()
            .enumerate()
            .all(|(m, c)| if m == i { c.is_one() } else { c.is_zero() });
        if !ok {
            out.push(RealizationViolation::Origin { field: i });
        }
    }
    out
}

/// Solves the Maurer–Cartan equations level by level, choosing free
/// coefficients by `order` and setting the rest to zero.
pub fn solve_forms(spec: &Arc<GradedAlgebraSpec>, order: &ColumnOrder) -> Result<Vec<OneForm>, RealizeError> {
    let n = spec.dim();
    let table = spec.table().clone();
    let slot_rank = order.slot_rank(spec);
    let mut forms: Vec<OneForm> = (0..n).map(|k| OneForm::differential(&table, k)).collect();
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by_key(|&k| (spec.weight(k), k));
    for k in by_depth {
        let sk = spec.weight(k);
        if sk == 1 {
            continue;
        }
        // unknowns: (slot m, monomial) with weight s_k - s_m and parity p_k + p_m
        let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
        for m in 0..n {
            let sm = spec.weight(m);
            if sm >= sk {
                continue;
            }
            let want_odd = spec.is_odd(k) ^ spec.is_odd(m);
            for mono in table.monomials_of_weight(sk - sm, |_| true) {
                if mono.parity(&table) == want_odd {
                    unknowns.push((m, mono));
                }
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        let rhs = maurer_cartan_rhs(spec, &forms, k);
        // equations indexed by (l, m, monomial) with l <= m
        let mut rows: Vec<Vec<(usize, crate::scalar::Scalar)>> = Vec::new();
        let mut row_of: HashMap<(usize, usize, Monomial), usize> = HashMap::new();
        let mut touch = |key: (usize, usize, Monomial), col: usize, c: crate::scalar::Scalar, rows: &mut Vec<Vec<_>>| {
            let r = *row_of.entry(key).or_insert_with(|| {
                rows.push(Vec::new());
                rows.len() - 1
            });
            rows[r].push((col, c));
        };
        for (col, (j, mono)) in unknowns.iter().enumerate() {
            let p = Polynomial::term(&table, mono.clone(), table.field().one());
            // contributes ∂_l μ to slot (l, j) for l <= j and -σ_{jm} ∂_m μ to (j, m) for m >= j
            for l in 0..=*j {
                for (dm, c) in p.partial(l).terms() {
                    touch((l, *j, dm.clone()), col, c.clone(), &mut rows);
                }
            }
            for m in *j..n {
                let both_odd = table.is_odd(*j) && table.is_odd(m);
                for (dm, c) in p.partial(m).terms() {
                    let c = if both_odd { c.clone() } else { -c };
                    touch((*j, m, dm.clone()), col, c, &mut rows);
                }
            }
        }
        let mut rhs_rows = vec![table.field().zero(); rows.len()];
        for ((l, m), poly) in rhs.slots() {
            for (mono, c) in poly.terms() {
                match row_of.get(&(l, m, mono.clone())) {
                    Some(&r) => rhs_rows[r] = c.clone(),
                    None => {
                        // nothing can absorb this term
                        let idx = rows.len();
                        rows.push(Vec::new());
                        rhs_rows.push(c.clone());
                        row_of.insert((l, m, mono.clone()), idx);
                    }
                }
            }
        }
        let mut sys = LinearSystem::new(table.field(), unknowns.len());
        for (row, b) in rows.into_iter().zip(rhs_rows) {
            sys.push_row(SparseVec::from_entries(row), b).expect("columns in range");
        }
        let mut cols: Vec<usize> = (0..unknowns.len()).collect();
        cols.sort_by(|&a, &b| {
            let (ma, ua) = &unknowns[a];
            let (mb, ub) = &unknowns[b];
            slot_rank[*ma].cmp(&slot_rank[*mb]).then_with(|| {
                if order.monomials_descending {
                    ub.cmp(ua)
                } else {
                    ua.cmp(ub)
                }
            })
        });
        sys.set_column_order(cols).expect("a permutation");
        let sol = sys
            .solve(SolvePolicy::FreeVarsZero)
            .map_err(|source| RealizeError::Inconsistent { form: k, source })?
            .particular
            .expect("particular solution requested");
        let mut w = OneForm::differential(&table, k);
        for ((m, mono), c) in unknowns.iter().zip(sol) {
            if !c.is_zero() {
                let mut coeff = w.coeff(*m).clone();
                coeff.add_term(mono.clone(), &c);
                w.set_coeff(*m, coeff);
            }
        }
        forms[k] = w;
    }
    Ok(forms)
}

/// Fields `X_j = Σ_i B[j][i] ∂_i` with `Σ_i B[j][i] V^k_i = δ_jk`, solved in
/// increasing depth; no division.
pub fn dualize(spec: &GradedAlgebraSpec, forms: &[OneForm]) -> Vec<VectorField> {
    let n = spec.dim();
    let table = spec.table();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (spec.weight(k), k));
    (0..n)
        .map(|j| {
            let mut b = vec![Polynomial::zero(table); n];
            for &k in &order {
                let mut v = if j == k { Polynomial::one(table) } else { Polynomial::zero(table) };
                for i in 0..n {
                    if i != k && spec.weight(i) < spec.weight(k) && !b[i].is_zero() {
                        v = v.sub(&b[i].mul(forms[k].coeff(i)));
                    }
                }
                b[k] = v;
            }
            VectorField::from_coeffs(table, b).expect("same table")
        })
        .collect()
}

/// Forms `θ^k` with `θ^k(Y_j) = δ^k_j` for fields whose `∂_m` coefficients
/// vanish unless `s_m >= s_j`; solved in decreasing depth.
pub fn coframe_of(spec: &GradedAlgebraSpec, fields: &[VectorField]) -> Vec<OneForm> {
    let n = spec.dim();
    let table = spec.table();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(spec.weight(j)), j));
    (0..n)
        .map(|k| {
            let mut a = vec![Polynomial::zero(table); n];
            for &j in &order {
                let mut v = if j == k { Polynomial::one(table) } else { Polynomial::zero(table) };
                for m in 0..n {
                    if m != j && spec.weight(m) > spec.weight(j) && !a[m].is_zero() {
                        v = v.sub(&fields[j].coeff(m).mul(&a[m]));
                    }
                }
                a[j] = v;
            }
            OneForm::from_coeffs(table, a).expect("same table")
        })
        .collect()
}

/// Solve the forms and dualize.
pub fn realize(spec: &Arc<GradedAlgebraSpec>, order: &ColumnOrder) -> Result<Realization, RealizeError> {
    let forms = solve_forms(spec, order)?;
    let fields = dualize(spec, &forms);
    let r = Realization {
        spec: spec.clone(),
        forms,
        fields,
    };
    let violations = r.verify();
    // the theory guarantees a valid output for a valid spec
    assert!(violations.is_empty(), "solver produced an invalid realization: {violations:?}");
    Ok(r)
}

/// User-supplied data, either side of the duality.
#[derive(Debug, Clone)]
pub enum SuppliedRealization {
    Forms(Vec<OneForm>),
    Fields(Vec<VectorField>),
}

/// Wraps supplied forms or fields after checking every invariant.
pub fn ingest_realization(
    spec: &Arc<GradedAlgebraSpec>,
    data: SuppliedRealization,
) -> Result<Realization, RealizeError> {
    let n = spec.dim();
    let (forms, fields) = match data {
        SuppliedRealization::Forms(forms) => {
            if forms.len() != n {
                return Err(RealizeError::Count {
                    expected: n,
                    got: forms.len(),
                });
            }
            let fields = dualize(spec, &forms);
            (forms, fields)
        }
        SuppliedRealization::Fields(fields) => {
            if fields.len() != n {
                return Err(RealizeError::Count {
                    expected: n,
                    got: fields.len(),
                });
            }
            let forms = coframe_of(spec, &fields);
            (forms, fields)
        }
    };
    let violations = verify_parts(spec, &forms, &fields);
    if !violations.is_empty() {
        return Err(RealizeError::Rejected(violations));
    }
    Ok(Realization {
        spec: spec.clone(),
        forms,
        fields,
    })
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRealization {
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    #[serde(default)]
    forms: Option<Vec<String>>,
    #[serde(default)]
    fields: Option<Vec<String>>,
}

impl SuppliedRealization {
    /// `{"fields": [...]}` or `{"forms": [...]}`; when both are present the
    /// fields are used and the forms must agree with them.
    pub fn from_json(text: &str, table: &Arc<VariableTable>) -> Result<(SuppliedRealization, Option<Vec<OneForm>>), RealizeError> {
        let raw: RawRealization =
            serde_json::from_str(text).map_err(|e| RealizeError::Schema(e.to_string()))?;
        let parse_forms = |v: &[String]| -> Result<Vec<OneForm>, RealizeError> {
            v.iter()
                .map(|t| OneForm::parse(table, t).map_err(|e| RealizeError::Schema(e.to_string())))
                .collect()
        };
        match (raw.fields, raw.forms) {
            (Some(fs), forms) => {
                let fields = fs
                    .iter()
                    .map(|t| VectorField::parse(table, t).map_err(|e| RealizeError::Schema(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let forms = forms.as_deref().map(parse_forms).transpose()?;
                Ok((SuppliedRealization::Fields(fields), forms))
            }
            (None, Some(forms)) => Ok((SuppliedRealization::Forms(parse_forms(&forms)?), None)),
            (None, None) => Err(RealizeError::Schema("expected \"fields\" or \"forms\"".to_string())),
        }
    }
}

/// Reads a realization file for `spec` and checks it.
pub fn realization_from_json(spec: &Arc<GradedAlgebraSpec>, text: &str) -> Result<Realization, RealizeError> {
    let (data, forms) = SuppliedRealization::from_json(text, spec.table())?;
    let real = ingest_realization(spec, data)?;
    if let Some(forms) = forms {
        if forms.len() != real.forms.len() {
            return Err(RealizeError::Count {
                expected: real.forms.len(),
                got: forms.len(),
            });
        }
        if let Some(k) = forms.iter().zip(&real.forms).position(|(a, b)| a != b) {
            return Err(RealizeError::Mismatch(k));
        }
    }
    Ok(real)
}

impl Realization {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "forms": self.forms.iter().map(|w| w.render()).collect::<Vec<_>>(),
            "fields": self.fields.iter().map(|x| x.render()).collect::<Vec<_>>(),
        })
    }
}
