//! Differential operators in the `Ŷ`'s that cut a partial prolong out of the
//! complete one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ProlongComponent, ProlongError, Prolonger};
use crate::centralize::hat_apply;
use crate::scalar::{LinearSystem, RowSpace, Scalar, SolvePolicy, SparseVec};
use crate::superpoly::{Monomial, Polynomial};
use crate::vecfield::VectorField;

/// How a word of `Ŷ`'s is turned into an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetrization {
    /// Sum over the distinct rearrangements, signed by the odd letters.
    Symmetric,
    /// The word as written, leftmost letter applied last.
    Ordered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorTerm {
    pub coeff: Scalar,
    /// Sorted letters; odd letters appear at most once.
    pub word: Vec<usize>,
    /// Coordinate `j` of `θ^j(X)` the word acts on.
    pub target: usize,
}

/// `X ↦ Σ a · S(Ŷ_{i_1} … Ŷ_{i_t}) θ^j(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    /// Degree of the component the operator was derived from.
    pub degree: i64,
    pub symmetrization: Symmetrization,
    pub terms: Vec<OperatorTerm>,
}

/// The operators for one defining component, with any caveats met on the way.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub degree: i64,
    pub operators: Vec<DiffOperator>,
    pub warnings: Vec<String>,
}

impl DiffOperator {
    pub fn apply(&self, prolonger: &Prolonger, x: &VectorField) -> Polynomial {
        let coords = prolonger.coordinates(x);
        self.apply_to_coordinates(prolonger, &coords)
    }

    pub fn apply_to_coordinates(&self, prolonger: &Prolonger, coords: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(prolonger.table());
        for t in &self.terms {
            let v = word_action(prolonger, &t.word, &coords[t.target], self.symmetrization);
            out = out.add(&v.scale(&t.coeff));
        }
        out
    }

    /// `2*S(Y_p1 Y_q1)F_t - Y_t F_t` style text.
    pub fn render(&self, prolonger: &Prolonger) -> String {
        let table = prolonger.table();
        let mut out = String::new();
        for t in &self.terms {
            let (neg, c) = t.coeff.coefficient_prefix();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if let Some(c) = c {
                let _ = write!(out, "{c}*");
            }
            let letters: Vec<String> = t.word.iter().map(|&i| format!("Y_{}", table.name(i))).collect();
            if t.word.len() > 1 && self.symmetrization == Symmetrization::Symmetric {
                let _ = write!(out, "S({})", letters.join(" "));
            } else {
                out.push_str(&letters.join(" "));
            }
            let _ = write!(out, " F_{}", table.name(t.target));
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }

    pub fn max_word_length(&self) -> usize {
        self.terms.iter().map(|t| t.word.len()).max().unwrap_or(0)
    }
}

/// Distinct rearrangements of a sorted word, each with the sign of the
/// permutation it induces on the odd letters.
fn rearrangements(word: &[usize], odd: &dyn Fn(usize) -> bool) -> Vec<(bool, Vec<usize>)> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in word {
        *counts.entry(l).or_default() += 1;
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(word.len());
    fn rec(
        counts: &mut BTreeMap<usize, usize>,
        cur: &mut Vec<usize>,
        len: usize,
        odd: &dyn Fn(usize) -> bool,
        out: &mut Vec<(bool, Vec<usize>)>,
    ) {
        if cur.len() == len {
            let odds: Vec<usize> = cur.iter().copied().filter(|&l| odd(l)).collect();
            let mut inv = 0;
            for a in 0..odds.len() {
                for b in (a + 1)..odds.len() {
                    if odds[a] > odds[b] {
                        inv += 1;
                    }
                }
            }
            out.push((inv % 2 == 1, cur.clone()));
            return;
        }
        let letters: Vec<usize> = counts.iter().filter(|(_, &c)| c > 0).map(|(&l, _)| l).collect();
        for l in letters {
            *counts.get_mut(&l).expect("present") -= 1;
            cur.push(l);
            rec(counts, cur, len, odd, out);
            cur.pop();
            *counts.get_mut(&l).expect("present") += 1;
        }
    }
    rec(&mut counts, &mut cur, word.len(), odd, &mut out);
    out
}

fn apply_word(prolonger: &Prolonger, word: &[usize], f: &Polynomial) -> Polynomial {
    let mut v = f.clone();
    for &l in word.iter().rev() {
        if v.is_zero() {
            break;
        }
        v = hat_apply(prolonger.coframe().y(l), &v);
    }
    v
}

fn word_action(prolonger: &Prolonger, word: &[usize], f: &Polynomial, sym: Symmetrization) -> Polynomial {
    match sym {
        Symmetrization::Ordered => apply_word(prolonger, word, f),
        Symmetrization::Symmetric => {
            let spec = prolonger.spec();
            let odd = |i: usize| spec.is_odd(i);
            let mut out = Polynomial::zero(prolonger.table());
            for (neg, w) in rearrangements(word, &odd) {
                let v = apply_word(prolonger, &w, f);
                out = if neg { out.sub(&v) } else { out.add(&v) };
            }
            out
        }
    }
}

/// Sorted letter multisets of total weight `w`, odd letters at most once.
fn words_of_weight(prolonger: &Prolonger, w: i64) -> Vec<Vec<usize>> {
    let spec = prolonger.spec();
    let n = spec.dim();
    let mut out = Vec::new();
    fn rec(
        spec: &crate::algspec::GradedAlgebraSpec,
        n: usize,
        from: usize,
        left: i64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for l in from..n {
            let wl = spec.weight(l) as i64;
            if wl > left {
                continue;
            }
            cur.push(l);
            let next = if spec.is_odd(l) { l + 1 } else { l };
            rec(spec, n, next, left - wl, cur, out);
            cur.pop();
        }
    }
    if w >= 0 {
        rec(spec, n, 0, w, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Operators whose common kernel inside `ambient` is the span of `defining`.
///
/// Every functional `X ↦ S(Ŷ_w) θ^j(X)` with `j` a generating coordinate is
/// constant on `ambient`; an independent set of them is a basis of the dual,
/// in which each functional vanishing on `defining` is expanded.
pub fn annihilator_operators(
    prolonger: &Prolonger,
    ambient: &ProlongComponent,
    defining: &[VectorField],
) -> Result<OperatorSet, ProlongError> {
    let field = prolonger.field();
    let degree = ambient.degree;
    let m = ambient.dim();
    let mut h_rows = Vec::new();
    for x in defining {
        match prolonger.express(ambient, x) {
            Some(c) => h_rows.push(SparseVec::from_dense(&c)),
            None => {
                return Err(ProlongError::NotContained {
                    degree,
                    witness: x.render(),
                })
            }
        }
    }
    let annihilator = crate::scalar::kernel_of(field, m, &h_rows);
    let mut warnings = Vec::new();
    let p = field.characteristic();
    let mut chosen = None;
    for sym in [Symmetrization::Symmetric, Symmetrization::Ordered] {
        let mut space = RowSpace::new(field);
        let mut picked: Vec<((Vec<usize>, usize), SparseVec)> = Vec::new();
        'outer: for &j in prolonger.generating_coordinates() {
            let w = degree + prolonger.spec().weight(j) as i64;
            for word in words_of_weight(prolonger, w) {
                let vals: Vec<Scalar> = ambient
                    .fields
                    .iter()
                    .map(|x| {
                        let f = prolonger.coframe().theta(j).pair(x);
                        word_action(prolonger, &word, &f, sym).constant_term()
                    })
                    .collect();
                let v = SparseVec::from_dense(&vals);
                if space.insert(&v) {
                    picked.push(((word, j), v));
                    if space.rank() == m {
                        break 'outer;
                    }
                }
            }
        }
        if space.rank() == m {
            chosen = Some((sym, picked));
            break;
        }
        warnings.push(format!(
            "degree {degree}: symmetrized Y-words do not span the dual in characteristic {p}; using ordered words"
        ));
    }
    let Some((sym, picked)) = chosen else {
        return Err(ProlongError::Functionals { degree });
    };
    if p > 0 && sym == Symmetrization::Symmetric && picked.iter().any(|((w, _), _)| w.len() as u64 >= p) {
        warnings.push(format!(
            "degree {degree}: words of length at least {p} are symmetrized without normalization; rely on the recurrence check"
        ));
    }
    // β with Σ_r β_r φ_r = α, for each annihilating α
    let mut betas = Vec::new();
    for alpha in &annihilator {
        let mut sys = LinearSystem::new(field, picked.len());
        for b in 0..m {
            let row = SparseVec::from_entries(
                picked
                    .iter()
                    .enumerate()
                    .filter_map(|(r, (_, v))| v.get(b).map(|c| (r, c.clone()))),
            );
            sys.push_row(row, alpha.get(b).cloned().unwrap_or_else(|| field.zero()))
                .expect("columns in range");
        }
        let beta = sys
            .solve(SolvePolicy::FreeVarsZero)
            .map_err(|_| ProlongError::Functionals { degree })?
            .particular
            .expect("requested particular solution");
        betas.push(SparseVec::from_dense(&beta));
    }
    let reduced = RowSpace::from_vectors(field, &betas);
    let operators = reduced
        .basis()
        .iter()
        .map(|beta| DiffOperator {
            degree,
            symmetrization: sym,
            terms: beta
                .iter()
                .map(|(r, c)| {
                    let ((word, j), _) = &picked[r];
                    OperatorTerm {
                        coeff: c.clone(),
                        word: word.clone(),
                        target: *j,
                    }
                })
                .collect(),
        })
        .collect();
    Ok(OperatorSet {
        degree,
        operators,
        warnings,
    })
}

/// The subspace of `candidates` annihilated by every operator.
pub fn partial_component(
    prolonger: &Prolonger,
    operators: &[DiffOperator],
    candidates: &ProlongComponent,
) -> ProlongComponent {
    if operators.is_empty() || candidates.is_zero() {
        return candidates.clone();
    }
    let field = prolonger.field();
    let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, Scalar)>> = BTreeMap::new();
    for (b, x) in candidates.fields.iter().enumerate() {
        let coords = prolonger.coordinates(x);
        for (l, op) in operators.iter().enumerate() {
            for (mono, c) in op.apply_to_coordinates(prolonger, &coords).terms() {
                rows.entry((l, mono.clone())).or_default().push((b, c.clone()));
            }
        }
    }
    let mut sys = LinearSystem::new(field, candidates.dim());
    for (_, entries) in rows {
        sys.push_homogeneous(SparseVec::from_entries(entries)).expect("columns in range");
    }
    let kernel = sys.solve(SolvePolicy::KernelBasis).expect("homogeneous").kernel;
    let fields: Vec<VectorField> = kernel
        .iter()
        .map(|v| {
            let mut x = VectorField::zero(prolonger.table());
            for (b, a) in v.iter() {
                x.add_scaled(a, &candidates.fields[b]);
            }
            x
        })
        .collect();
    prolonger.normalize(candidates.degree, &fields)
}
