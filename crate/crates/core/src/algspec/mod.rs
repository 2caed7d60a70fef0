//! Negatively graded Lie (super)algebras given by structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::scalar::{kernel_of, Field, RowSpace, Scalar, SparseVec};
use crate::superpoly::{PolyError, Variable, VariableTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid algebra: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl From<PolyError> for SpecError {
    fn from(e: PolyError) -> SpecError {
        SpecError::Schema(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Degree,
    Parity,
    Antisymmetry,
    Jacobi,
    Generation,
}

/// A failed check with 0-based witness indices and the offending value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    pub residual: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{:?} at ({}): {}", self.kind, idx.join(", "), self.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// Negative degree `-s`.
    pub degree: i32,
    pub odd: bool,
    /// Name of the dual coordinate; defaults to `x<k>`.
    pub coordinate: String,
}

impl Generator {
    pub fn weight(&self) -> u32 {
        (-self.degree) as u32
    }
}

/// `[e_i, e_j] = Σ_k c^k_ij e_k`, stored for both orders.
#[derive(Debug, Clone)]
pub struct GradedAlgebraSpec {
    field: Field,
    generators: Vec<Generator>,
    brackets: BTreeMap<(usize, usize), SparseVec>,
    table: Arc<VariableTable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub depth: u32,
    /// Dimensions of `n_{-1}, ..., n_{-d}`.
    pub dims: Vec<usize>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl GradedAlgebraSpec {
    /// Builds a spec from generators and bracket triples `(i, j, k, c)`,
    /// completing by super-antisymmetry. Conflicting entries are violations.
    pub fn new(
        field: Field,
        generators: Vec<Generator>,
        triples: Vec<(usize, usize, usize, Scalar)>,
    ) -> Result<GradedAlgebraSpec, SpecError> {
        let n = generators.len();
        if n == 0 {
            return Err(SpecError::Schema("no generators".into()));
        }
        for g in &generators {
            if g.degree >= 0 {
                return Err(SpecError::Schema(format!("generator {} has non-negative degree", g.name)));
            }
        }
        for (k, g) in generators.iter().enumerate() {
            if generators[..k].iter().any(|h| h.name == g.name) {
                return Err(SpecError::Schema(format!("duplicate generator {}", g.name)));
            }
        }
        let mut entries: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        let mut violations = Vec::new();
        for (i, j, k, c) in triples {
            if i >= n || j >= n || k >= n {
                return Err(SpecError::Schema(format!("bracket index out of range ({i}, {j}, {k})")));
            }
            if !field.contains(&c) {
                return Err(SpecError::Schema(format!("coefficient {c} not in {field}")));
            }
            let both_odd = generators[i].odd && generators[j].odd;
            // c^k_ji = -(-1)^{p_i p_j} c^k_ij
            let mirror = if both_odd { c.clone() } else { -&c };
            for (key, val) in [((i, j, k), c.clone()), ((j, i, k), mirror)] {
                match entries.get(&key) {
                    Some(old) if *old != val => violations.push(Violation {
                        kind: ViolationKind::Antisymmetry,
                        indices: vec![key.0, key.1, key.2],
                        residual: format!("{old} vs {val}"),
                    }),
                    _ => {
                        entries.insert(key, val);
                    }
                }
            }
            if i == j && !both_odd && !c.is_zero() {
                violations.push(Violation {
                    kind: ViolationKind::Antisymmetry,
                    indices: vec![i, i, k],
                    residual: format!("[e, e] = {c} for even e"),
                });
            }
        }
        if !violations.is_empty() {
            return Err(SpecError::Invalid(violations));
        }
        let mut brackets: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
        for ((i, j, k), c) in entries {
            brackets.entry((i, j)).or_default().push((k, c));
        }
        let brackets = brackets
            .into_iter()
            .map(|(key, v)| (key, SparseVec::from_entries(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let table = VariableTable::new(
            field,
            generators
                .iter()
                .map(|g| Variable {
                    name: g.coordinate.clone(),
                    odd: g.odd,
                    weight: g.weight(),
                })
                .collect(),
        )?;
        Ok(GradedAlgebraSpec {
            field,
            generators,
            brackets,
            table,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Coordinates dual to the basis, weighted by depth.
    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.generators[i].weight()
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.generators[i].odd
    }

    pub fn depth(&self) -> u32 {
        self.generators.iter().map(|g| g.weight()).max().unwrap_or(0)
    }

    /// Basis indices of `n_{-s}`.
    pub fn level(&self, s: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weight(i) == s).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        (1..=self.depth()).map(|s| self.level(s).len()).collect()
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn bracket(&self, i: usize, j: usize) -> SparseVec {
        self.brackets.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.brackets
            .get(&(i, j))
            .and_then(|v| v.get(k).cloned())
            .unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero `(i, j, k, c^k_ij)` over all ordered pairs.
    pub fn structure_constants(&self) -> impl Iterator<Item = (usize, usize, usize, &Scalar)> + '_ {
        self.brackets
            .iter()
            .flat_map(|(&(i, j), v)| v.iter().map(move |(k, c)| (i, j, k, c)))
    }

    /// Bilinear extension of the bracket to coefficient vectors.
    pub fn bracket_vectors(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let c = a * b;
                out = out.axpy(&c, &self.bracket(i, j));
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for (i, j, k, c) in self.structure_constants() {
            if self.weight(k) != self.weight(i) + self.weight(j) {
                violations.push(Violation {
                    kind: ViolationKind::Degree,
                    indices: vec![i, j, k],
                    residual: c.to_string(),
                });
            }
            if self.is_odd(k) != (self.is_odd(i) ^ self.is_odd(j)) {
                violations.push(Violation {
                    kind: ViolationKind::Parity,
                    indices: vec![i, j, k],
                    residual: c.to_string(),
                });
            }
        }
        // (-1)^{p_a p_c}[a,[b,c]] + (-1)^{p_b p_a}[b,[c,a]] + (-1)^{p_c p_b}[c,[a,b]] = 0
        let unit = |i: usize| SparseVec::unit(i, self.field);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut total = SparseVec::new();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let inner = self.bracket(y, z);
                        let term = self.bracket_vectors(&unit(x), &inner);
                        let neg = self.is_odd(x) && self.is_odd(z);
                        let sgn = if neg { -self.field.one() } else { self.field.one() };
                        total = total.axpy(&sgn, &term);
                    }
                    if let Some((k, r)) = total.leading() {
                        violations.push(Violation {
                            kind: ViolationKind::Jacobi,
                            indices: vec![a, b, c, k],
                            residual: r.to_string(),
                        });
                    }
                }
            }
        }
        let span = self.generated_span();
        if span.rank() < n {
            let missing = (0..n).find(|&i| !span.contains(&unit(i))).expect("some basis vector is missing");
            violations.push(Violation {
                kind: ViolationKind::Generation,
                indices: vec![missing],
                residual: format!("rank {} of {}", span.rank(), n),
            });
        }
        ValidationReport {
            depth: self.depth(),
            dims: self.dims(),
            violations,
        }
    }

    /// Span of iterated brackets of `n_{-1}`.
    fn generated_span(&self) -> RowSpace {
        let mut span = RowSpace::new(self.field);
        let ones = self.level(1);
        let mut frontier: Vec<SparseVec> = ones.iter().map(|&i| SparseVec::unit(i, self.field)).collect();
        for v in &frontier {
            span.insert(v);
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in &frontier {
                for &i in &ones {
                    let w = self.bracket_vectors(&SparseVec::unit(i, self.field), v);
                    if span.insert(&w) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        span
    }

    /// Kernel of all `ad e_j`, echelon-reduced with pivots preferring deeper
    /// generators (depth descending, index ascending).
    pub fn center_basis(&self) -> Vec<SparseVec> {
        let n = self.dim();
        let order = self.depth_order();
        let mut pos = vec![0; n];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        // unknowns v_i, equations Σ_i v_i c^k_ji = 0 for every j, k
        let mut rows: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
        for (j, i, k, c) in self.structure_constants() {
            rows.entry((j, k)).or_default().push((pos[i], c.clone()));
        }
        let rows: Vec<SparseVec> = rows.into_values().map(SparseVec::from_entries).collect();
        let kernel = kernel_of(self.field, n, &rows);
        let reduced = RowSpace::from_vectors(self.field, &kernel);
        reduced.basis().iter().map(|v| v.remap(|p| order[p])).collect()
    }

    /// Generating coordinates: pivots of the reduced center basis.
    pub fn center_of_negative(&self) -> Vec<usize> {
        let order = self.depth_order();
        let mut pivots: Vec<usize> = self
            .center_basis()
            .iter()
            .map(|v| {
                *order
                    .iter()
                    .find(|&&i| v.get(i).is_some())
                    .expect("kernel vectors are nonzero")
            })
            .collect();
        pivots.sort_by_key(|&i| (std::cmp::Reverse(self.weight(i)), i));
        pivots
    }

    /// Basis indices sorted by depth descending, then index.
    pub fn depth_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.weight(i)), i));
        order
    }

    pub fn from_json(text: &str) -> Result<GradedAlgebraSpec, SpecError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::Schema(e.to_string()))?;
        raw.into_spec(None)
    }

    /// As `from_json`, replacing the declared field.
    pub fn from_json_with_field(text: &str, field: Field) -> Result<GradedAlgebraSpec, SpecError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::Schema(e.to_string()))?;
        raw.into_spec(Some(field))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = self
            .generators
            .iter()
            .map(|g| {
                serde_json::json!({
                    "name": g.name,
                    "degree": g.degree,
                    "parity": if g.odd { "odd" } else { "even" },
                    "coordinate": g.coordinate,
                })
            })
            .collect();
        let brackets: Vec<serde_json::Value> = self
            .structure_constants()
            .filter(|&(i, j, _, _)| i <= j)
            .map(|(i, j, k, c)| serde_json::json!({"i": i + 1, "j": j + 1, "k": k + 1, "coeff": c.to_string()}))
            .collect();
        serde_json::json!({
            "field": {"char": self.field.characteristic(), "i": self.field.has_imaginary_unit()},
            "generators": gens,
            "brackets": brackets,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    field: Option<RawField>,
    generators: Vec<RawGenerator>,
    #[serde(default)]
    brackets: Vec<RawBracket>,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawField {
    #[serde(default)]
    pub(crate) char: u64,
    #[serde(default)]
    pub(crate) i: bool,
}

impl RawField {
    pub(crate) fn resolve(&self) -> Result<Field, SpecError> {
        Field::new(self.char, self.i).map_err(|e| SpecError::Schema(e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    degree: i32,
    #[serde(default)]
    parity: Option<String>,
    #[serde(default)]
    coordinate: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub(crate) enum IndexRef {
    Number(usize),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub(crate) enum ScalarText {
    Int(i64),
    Text(String),
}

impl ScalarText {
    pub(crate) fn resolve(&self, field: Field) -> Result<Scalar, SpecError> {
        match self {
            ScalarText::Int(v) => Ok(field.from_i64(*v)),
            ScalarText::Text(s) => field.parse(s).map_err(|e| SpecError::Schema(e.to_string())),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    i: IndexRef,
    j: IndexRef,
    k: IndexRef,
    coeff: ScalarText,
}

impl RawSpec {
    fn into_spec(self, field_override: Option<Field>) -> Result<GradedAlgebraSpec, SpecError> {
        let field = match field_override {
            Some(f) => f,
            None => match &self.field {
                Some(f) => f.resolve()?,
                None => Field::RATIONALS,
            },
        };
        let mut gens = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            let odd = match g.parity.as_deref() {
                None | Some("even") | Some("0") => false,
                Some("odd") | Some("1") => true,
                Some(other) => return Err(SpecError::Schema(format!("unknown parity {other:?}"))),
            };
            gens.push(Generator {
                name: g.name.clone(),
                degree: g.degree,
                odd,
                coordinate: g.coordinate.clone().unwrap_or_else(|| format!("x{}", k + 1)),
            });
        }
        let resolve = |r: &IndexRef| -> Result<usize, SpecError> {
            match r {
                IndexRef::Number(k) if *k >= 1 && *k <= gens.len() => Ok(k - 1),
                IndexRef::Number(k) => Err(SpecError::Schema(format!("generator index {k} out of range"))),
                IndexRef::Name(s) => gens
                    .iter()
                    .position(|g| &g.name == s)
                    .ok_or_else(|| SpecError::Schema(format!("unknown generator {s:?}"))),
            }
        };
        let mut triples = Vec::new();
        for b in &self.brackets {
            triples.push((resolve(&b.i)?, resolve(&b.j)?, resolve(&b.k)?, b.coeff.resolve(field)?));
        }
        GradedAlgebraSpec::new(field, gens, triples)
    }
}
