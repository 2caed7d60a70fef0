//! Partial prolongs of a prescribed beginning part.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::operators::{annihilator_operators, partial_component, DiffOperator, OperatorSet};
use super::{ProlongComponent, ProlongError, ProlongTable, Prolonger};
use crate::superpoly::Polynomial;
use crate::vecfield::VectorField;

/// Prescribed components `h_k ⊂ g_k` for some degrees `k ≥ 0`; any degree
/// not listed is taken as large as the prolongation allows.
#[derive(Debug, Clone, Default)]
pub struct BeginningPart {
    pub supplied: BTreeMap<i64, Vec<VectorField>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeginning {
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    components: Vec<RawComponent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    degree: i64,
    #[serde(default)]
    fields: Option<Vec<String>>,
    #[serde(default)]
    generating: Option<Vec<RawTuple>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTuple {
    Single(String),
    Tuple(Vec<String>),
}

impl BeginningPart {
    pub fn new() -> BeginningPart {
        BeginningPart::default()
    }

    pub fn with(mut self, degree: i64, fields: Vec<VectorField>) -> BeginningPart {
        self.supplied.insert(degree, fields);
        self
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.supplied.keys().next_back().copied()
    }

    /// Fields are given directly or through their generating functions.
    pub fn from_json(text: &str, prolonger: &Prolonger) -> Result<BeginningPart, ProlongError> {
        let raw: RawBeginning = serde_json::from_str(text).map_err(|e| ProlongError::Schema(e.to_string()))?;
        let table = prolonger.table();
        let mut out = BeginningPart::new();
        for c in raw.components {
            if c.degree < 0 {
                return Err(ProlongError::Degree {
                    degree: c.degree,
                    reason: "the negative part is fixed by the algebra".to_string(),
                });
            }
            if out.supplied.contains_key(&c.degree) {
                return Err(ProlongError::Schema(format!("degree {} listed twice", c.degree)));
            }
            let mut fields = Vec::new();
            match (c.fields, c.generating) {
                (Some(fs), None) => {
                    for f in fs {
                        fields.push(VectorField::parse(table, &f)?);
                    }
                }
                (None, Some(gs)) => {
                    let ambient = prolonger.complete_component(c.degree);
                    for g in gs {
                        let texts = match g {
                            RawTuple::Single(s) => vec![s],
                            RawTuple::Tuple(v) => v,
                        };
                        let tuple = texts
                            .iter()
                            .map(|t| Polynomial::parse(table, t))
                            .collect::<Result<Vec<_>, _>>()?;
                        fields.push(prolonger.field_with_generating(&ambient, &tuple)?);
                    }
                }
                _ => {
                    return Err(ProlongError::Schema(format!(
                        "degree {}: give exactly one of \"fields\" and \"generating\"",
                        c.degree
                    )))
                }
            }
            for x in &fields {
                if x.weighted_degree().is_some_and(|d| d != c.degree) {
                    return Err(ProlongError::Degree {
                        degree: c.degree,
                        reason: format!("{} has degree {}", x.render(), x.weighted_degree().unwrap_or(0)),
                    });
                }
            }
            out.supplied.insert(c.degree, fields);
        }
        Ok(out)
    }
}

/// Components of `h_*` up to the cap, with the operators that produced them.
#[derive(Debug, Clone)]
pub struct PartialProlong {
    pub table: ProlongTable,
    pub operator_sets: Vec<OperatorSet>,
    pub defining_degrees: Vec<i64>,
    pub warnings: Vec<String>,
    /// For each degree grown by the operators: does the recurrence agree?
    pub recurrence_checks: Vec<(i64, bool)>,
}

impl PartialProlong {
    pub fn dims(&self) -> Vec<usize> {
        self.table.dims()
    }

    pub fn total(&self) -> usize {
        self.table.total()
    }

    pub fn component(&self, s: i64) -> Option<&ProlongComponent> {
        self.table.component(s)
    }

    pub fn operators(&self) -> Vec<&DiffOperator> {
        self.operator_sets.iter().flat_map(|s| s.operators.iter()).collect()
    }

    pub fn recurrence_agrees(&self) -> bool {
        self.recurrence_checks.iter().all(|(_, ok)| *ok)
    }
}

/// The smallest supplied degree where `h_m` differs from `g_m`.
pub fn defining_degree(prolonger: &Prolonger, beginning: &BeginningPart) -> Result<Option<i64>, ProlongError> {
    for (&s, fields) in &beginning.supplied {
        let g = prolonger.complete_component(s);
        for x in fields {
            if !prolonger.contains(&g, x) {
                return Err(ProlongError::NotContained {
                    degree: s,
                    witness: x.render(),
                });
            }
        }
        if !prolonger.same_span(&g, &prolonger.normalize(s, fields)) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Grows `h_*` degree by degree. Each time a supplied component is smaller
/// than what the operators found so far allow, it becomes a new defining
/// component and contributes its own operators.
pub fn reduce_defining_degree(
    prolonger: &Prolonger,
    beginning: &BeginningPart,
    s_max: i64,
) -> Result<PartialProlong, ProlongError> {
    let mut comps: Vec<ProlongComponent> = (-prolonger.depth()..0).map(|s| prolonger.negative_component(s)).collect();
    let mut sets: Vec<OperatorSet> = Vec::new();
    let mut defining = Vec::new();
    let mut warnings = Vec::new();
    let mut checks = Vec::new();
    for s in 0..=s_max {
        let complete = prolonger.complete_component(s);
        let ops: Vec<DiffOperator> = sets.iter().flat_map(|set| set.operators.iter().cloned()).collect();
        let cand = partial_component(prolonger, &ops, &complete);
        let comp = match beginning.supplied.get(&s) {
            Some(sup) => {
                for x in sup {
                    if !prolonger.contains(&cand, x) {
                        return Err(ProlongError::NotContained {
                            degree: s,
                            witness: x.render(),
                        });
                    }
                }
                let given = prolonger.normalize(s, sup);
                if prolonger.same_span(&cand, &given) {
                    cand
                } else {
                    let set = annihilator_operators(prolonger, &cand, sup)?;
                    warnings.extend(set.warnings.iter().cloned());
                    defining.push(s);
                    sets.push(set);
                    let ops: Vec<DiffOperator> =
                        sets.iter().flat_map(|set| set.operators.iter().cloned()).collect();
                    let cut = partial_component(prolonger, &ops, &complete);
                    assert!(
                        prolonger.same_span(&cut, &given),
                        "operators at degree {s} do not cut out the supplied component"
                    );
                    cut
                }
            }
            None => {
                let prev = comps.last().expect("negative part is nonempty");
                let oracle = prolonger.oracle_component(prev, s);
                checks.push((s, prolonger.same_span(&oracle, &cand)));
                cand
            }
        };
        comps.push(comp);
    }
    Ok(PartialProlong {
        table: ProlongTable::from_components(comps),
        operator_sets: sets,
        defining_degrees: defining,
        warnings,
        recurrence_checks: checks,
    })
}
