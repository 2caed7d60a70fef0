//! Exact sparse Gauss–Jordan elimination.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("column {column} out of range for {unknowns} unknowns")]
    ColumnOutOfRange { column: usize, unknowns: usize },
    #[error("column order is not a permutation of 0..{0}")]
    BadColumnOrder(usize),
    #[error("no solution: row {row} reduces to 0 = {residual}")]
    NoSolution { row: usize, residual: Scalar },
}

/// Sparse vector: entries sorted by index, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec::default()
    }

    /// Builds from arbitrary entries, summing duplicates and dropping zeros.
    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(entries: I) -> SparseVec {
        let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, v) in entries {
            match map.get_mut(&i) {
                Some(e) => *e += &v,
                None => {
                    map.insert(i, v);
                }
            }
        }
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn unit(index: usize, field: Field) -> SparseVec {
        SparseVec {
            entries: vec![(index, field.one())],
        }
    }

    pub fn from_dense(values: &[Scalar]) -> SparseVec {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: Field) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = other.entries.get(b).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(self.entries[a].clone());
                a += 1;
            } else if ib < ia {
                out.push((ib, c * &other.entries[b].1));
                b += 1;
            } else {
                let v = &self.entries[a].1 + &(c * &other.entries[b].1);
                if !v.is_zero() {
                    out.push((ia, v));
                }
                a += 1;
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn dot_dense(&self, dense: &[Scalar], field: Field) -> Scalar {
        let mut acc = field.zero();
        for (i, v) in &self.entries {
            acc += &(v * &dense[*i]);
        }
        acc
    }

    pub fn dot(&self, other: &SparseVec, field: Field) -> Scalar {
        let mut acc = field.zero();
        for (i, v) in &self.entries {
            if let Some(w) = other.get(*i) {
                acc += &(v * w);
            }
        }
        acc
    }

    /// Re-indexes entries through `map` (which must be injective).
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> SparseVec {
        let mut entries: Vec<_> = self.entries.iter().map(|(i, v)| (map(*i), v.clone())).collect();
        entries.sort_by_key(|e| e.0);
        SparseVec { entries }
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }
}

/// Reduced row echelon form maintained incrementally.
///
/// Pivots are the smallest index of each row, every pivot is 1 and pivot
/// columns are cleared from all other rows.
#[derive(Debug, Clone)]
pub struct RowSpace {
    field: Field,
    rows: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl RowSpace {
    pub fn new(field: Field) -> RowSpace {
        RowSpace {
            field,
            rows: Vec::new(),
            pivot_row: BTreeMap::new(),
        }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(field: Field, vs: I) -> RowSpace {
        let mut rs = RowSpace::new(field);
        for v in vs {
            rs.insert(v);
        }
        rs
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after clearing every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        // pivot rows carry no other pivot columns, so the multipliers are the
        // original entries of v
        for (col, c) in v.iter() {
            if let Some(&r) = self.pivot_row.get(&col) {
                out = out.axpy(&-c, &self.rows[r]);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((col, lead)) = r.leading() else {
            return false;
        };
        let inv = lead.inv().expect("leading entry is nonzero");
        let r = r.scaled(&inv);
        for row in self.rows.iter_mut() {
            if let Some(c) = row.get(col) {
                let c = -c;
                *row = row.axpy(&c, &r);
            }
        }
        self.pivot_row.insert(col, self.rows.len());
        self.rows.push(r);
        true
    }

    /// Basis rows ordered by pivot.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.pivot_row.values().map(|&r| self.rows[r].clone()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.pivot_row.keys().copied().collect()
    }

    pub fn is_subspace_of(&self, other: &RowSpace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn same_span(&self, other: &RowSpace) -> bool {
        self.rank() == other.rank() && self.is_subspace_of(other)
    }

    /// Coordinates of `v` in terms of `basis()`, if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(
            self.pivot_row
                .keys()
                .map(|col| v.get(*col).cloned().unwrap_or_else(|| self.field.zero()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePolicy {
    FreeVarsZero,
    KernelBasis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    /// Present for `FreeVarsZero`: every non-pivot unknown set to zero.
    pub particular: Option<Vec<Scalar>>,
    /// Present for `KernelBasis`: one vector per free column, with a 1 there.
    pub kernel: Vec<SparseVec>,
    pub pivot_columns: Vec<usize>,
}

/// A linear system `A x = b` over one field with a pivot priority on unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    field: Field,
    unknowns: usize,
    rows: Vec<SparseVec>,
    rhs: Vec<Scalar>,
    column_order: Option<Vec<usize>>,
}

impl LinearSystem {
    pub fn new(field: Field, unknowns: usize) -> LinearSystem {
        LinearSystem {
            field,
            unknowns,
            rows: Vec::new(),
            rhs: Vec::new(),
            column_order: None,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Scalar] {
        &self.rhs
    }

    pub fn push_row(&mut self, row: SparseVec, rhs: Scalar) -> Result<(), LinearError> {
        if let Some(m) = row.max_index() {
            if m >= self.unknowns {
                return Err(LinearError::ColumnOutOfRange {
                    column: m,
                    unknowns: self.unknowns,
                });
            }
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn push_homogeneous(&mut self, row: SparseVec) -> Result<(), LinearError> {
        let z = self.field.zero();
        self.push_row(row, z)
    }

    /// `order[k]` is the unknown with the k-th highest pivot priority.
    pub fn set_column_order(&mut self, order: Vec<usize>) -> Result<(), LinearError> {
        let mut seen = vec![false; self.unknowns];
        if order.len() != self.unknowns {
            return Err(LinearError::BadColumnOrder(self.unknowns));
        }
        for &c in &order {
            if c >= self.unknowns || seen[c] {
                return Err(LinearError::BadColumnOrder(self.unknowns));
            }
            seen[c] = true;
        }
        self.column_order = Some(order);
        Ok(())
    }

    /// Maximum residual check: does `x` satisfy every row exactly?
    pub fn is_solution(&self, x: &[Scalar]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(r, b)| r.dot_dense(x, self.field) == *b)
    }

    pub fn solve(&self, policy: SolvePolicy) -> Result<SolveOutcome, LinearError> {
        let n = self.unknowns;
        let (rank_of, col_of): (Vec<usize>, Vec<usize>) = match &self.column_order {
            Some(order) => {
                let mut rank = vec![0; n];
                for (k, &c) in order.iter().enumerate() {
                    rank[c] = k;
                }
                (rank, order.clone())
            }
            None => ((0..n).collect(), (0..n).collect()),
        };
        // the right-hand side rides along as the last column
        let rhs_col = n;
        let mut space = RowSpace::new(self.field);
        for (idx, (row, b)) in self.rows.iter().zip(&self.rhs).enumerate() {
            let mut v = row.remap(|c| rank_of[c]);
            if !b.is_zero() {
                v = v.axpy(&self.field.one(), &SparseVec::from_entries([(rhs_col, b.clone())]));
            }
            let reduced = space.reduce(&v);
            if let Some((c, residual)) = reduced.leading() {
                if c == rhs_col {
                    return Err(LinearError::NoSolution {
                        row: idx,
                        residual: residual.clone(),
                    });
                }
            }
            space.insert(&reduced);
        }
        let pivots: BTreeMap<usize, &SparseVec> =
            space.pivot_row.iter().map(|(&c, &r)| (c, &space.rows[r])).collect();
        let pivot_columns: Vec<usize> = pivots.keys().map(|&k| col_of[k]).collect();
        let mut outcome = SolveOutcome {
            particular: None,
            kernel: Vec::new(),
            pivot_columns,
        };
        match policy {
            SolvePolicy::FreeVarsZero => {
                let mut x = vec![self.field.zero(); n];
                for (&k, row) in &pivots {
                    if let Some(b) = row.get(rhs_col) {
                        x[col_of[k]] = b.clone();
                    }
                }
                outcome.particular = Some(x);
            }
            SolvePolicy::KernelBasis => {
                for free in 0..n {
                    if pivots.contains_key(&free) {
                        continue;
                    }
                    let mut entries = vec![(col_of[free], self.field.one())];
                    for (&k, row) in &pivots {
                        if let Some(c) = row.get(free) {
                            entries.push((col_of[k], -c));
                        }
                    }
                    outcome.kernel.push(SparseVec::from_entries(entries));
                }
            }
        }
        Ok(outcome)
    }
}

/// Null space of the rows (natural column order), echelon-normalized.
pub fn kernel_of(field: Field, unknowns: usize, rows: &[SparseVec]) -> Vec<SparseVec> {
    let mut sys = LinearSystem::new(field, unknowns);
    for r in rows {
        sys.push_homogeneous(r.clone()).expect("row within range");
    }
    sys.solve(SolvePolicy::KernelBasis)
        .expect("homogeneous systems are consistent")
        .kernel
}
