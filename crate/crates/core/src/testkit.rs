//! Random inputs for property suites: graded nilpotent superalgebras of depth
//! 2 or 3, column orders, and homogeneous vector fields.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algspec::{Generator, GradedAlgebraSpec};
use crate::realize::ColumnOrder;
use crate::scalar::{kernel_of, Field, Scalar, SparseVec};
use crate::superpoly::{Polynomial, VariableTable};
use crate::vecfield::VectorField;

/// Size limits for [`random_algebra`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_first: usize,
    pub max_second: usize,
    pub max_third: usize,
    /// Probability that a degree −1 generator is odd.
    pub odd: f64,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape {
            max_first: 3,
            max_second: 2,
            max_third: 2,
            odd: 0.3,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small(field: Field, rng: &mut impl Rng) -> Scalar {
    field.from_i64(rng.random_range(-2..=2))
}

fn nonzero(field: Field, rng: &mut impl Rng) -> Scalar {
    loop {
        let c = small(field, rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// A valid spec over `field`. Degree −2 brackets are random; degree −3
/// brackets are a random point of the linear space cut out by Jacobi.
pub fn random_algebra(seed: u64, field: Field, shape: Shape) -> GradedAlgebraSpec {
    let mut rng = rng(seed);
    loop {
        if let Some(spec) = attempt(&mut rng, field, shape) {
            return spec;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng, field: Field, shape: Shape) -> Option<GradedAlgebraSpec> {
    let n1 = rng.random_range(1..=shape.max_first);
    let odd1: Vec<bool> = (0..n1).map(|_| rng.random_bool(shape.odd)).collect();
    let pairs: Vec<(usize, usize)> = (0..n1)
        .flat_map(|i| (i..n1).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j || odd1[i])
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let n2 = rng.random_range(1..=shape.max_second.min(pairs.len()));
    let odd2: Vec<bool> = (0..n2)
        .map(|_| {
            let (i, j) = pairs[rng.random_range(0..pairs.len())];
            odd1[i] ^ odd1[j]
        })
        .collect();
    // c[(i, j)] = [e_i, e_j] as a vector over the second level
    let mut c2: Vec<((usize, usize), Vec<Scalar>)> = Vec::new();
    for &(i, j) in &pairs {
        let v: Vec<Scalar> = (0..n2)
            .map(|a| {
                if odd2[a] == (odd1[i] ^ odd1[j]) {
                    small(field, rng)
                } else {
                    field.zero()
                }
            })
            .collect();
        c2.push(((i, j), v));
    }
    let depth3 = shape.max_third > 0 && rng.random_bool(0.5);
    let (odd3, c3) = if depth3 {
        let n3 = rng.random_range(1..=shape.max_third);
        let odd3: Vec<bool> = (0..n3).map(|_| rng.random_bool(0.5)).collect();
        // unknowns d^k_{x,a} = coefficient of f_k in [e_x, e'_a]
        let mut unknowns = Vec::new();
        for x in 0..n1 {
            for a in 0..n2 {
                for k in 0..n3 {
                    if odd3[k] == (odd1[x] ^ odd2[a]) {
                        unknowns.push((x, a, k));
                    }
                }
            }
        }
        if unknowns.is_empty() {
            return None;
        }
        let col = |x: usize, a: usize, k: usize| unknowns.iter().position(|&u| u == (x, a, k));
        let bracket2 = |y: usize, z: usize| -> Vec<Scalar> {
            let (key, neg) = if y <= z { ((y, z), false) } else { ((z, y), !(odd1[y] && odd1[z])) };
            match c2.iter().find(|(p, _)| *p == key) {
                Some((_, v)) => v.iter().map(|c| if neg { -c } else { c.clone() }).collect(),
                None => vec![field.zero(); n2],
            }
        };
        let mut rows = Vec::new();
        for a in 0..n1 {
            for b in 0..n1 {
                for cc in 0..n1 {
                    let mut row: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n3];
                    for (x, y, z) in [(a, b, cc), (b, cc, a), (cc, a, b)] {
                        let neg = odd1[x] && odd1[z];
                        for (m, c) in bracket2(y, z).iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let c = if neg { -c } else { c.clone() };
                            for (k, r) in row.iter_mut().enumerate() {
                                if let Some(u) = col(x, m, k) {
                                    r.push((u, c.clone()));
                                }
                            }
                        }
                    }
                    for r in row {
                        let v = SparseVec::from_entries(r);
                        if !v.is_zero() {
                            rows.push(v);
                        }
                    }
                }
            }
        }
        let kernel = kernel_of(field, unknowns.len(), &rows);
        if kernel.is_empty() {
            return None;
        }
        let mut d = SparseVec::new();
        for v in &kernel {
            d = d.axpy(&small(field, rng), v);
        }
        let c3: Vec<(usize, usize, usize, Scalar)> =
            d.iter().map(|(u, c)| (unknowns[u].0, unknowns[u].1, unknowns[u].2, c.clone())).collect();
        (odd3, c3)
    } else {
        (Vec::new(), Vec::new())
    };
    let mut generators = Vec::new();
    let mut k = 0;
    for (level, odds) in [(1, &odd1), (2, &odd2), (3, &odd3)] {
        for &odd in odds.iter() {
            k += 1;
            generators.push(Generator {
                name: format!("e{k}"),
                degree: -level,
                odd,
                coordinate: if odd { format!("th{k}") } else { format!("x{k}") },
            });
        }
    }
    let mut triples = Vec::new();
    for ((i, j), v) in &c2 {
        for (a, c) in v.iter().enumerate() {
            if !c.is_zero() {
                triples.push((*i, *j, n1 + a, c.clone()));
            }
        }
    }
    for (x, a, kk, c) in c3 {
        triples.push((x, n1 + a, n1 + n2 + kk, c));
    }
    let spec = GradedAlgebraSpec::new(field, generators, triples).ok()?;
    spec.validate().is_valid().then_some(spec)
}

/// A random slot permutation and monomial direction.
pub fn random_column_order(seed: u64, n: usize) -> ColumnOrder {
    let mut rng = rng(seed);
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(&mut rng);
    ColumnOrder {
        slots: Some(slots),
        monomials_descending: rng.random_bool(0.5),
    }
}

/// A field of the given parity with at most `terms` random monomial terms of
/// standard degree at most `max_degree`.
pub fn random_field(rng: &mut impl Rng, table: &Arc<VariableTable>, odd: bool, terms: usize, max_degree: u32) -> VectorField {
    let field = table.field();
    let max_weight = max_degree * table.vars().iter().map(|v| v.weight).max().unwrap_or(1);
    let monomials: Vec<_> = (0..=max_weight)
        .flat_map(|w| table.monomials_of_weight(w, |_| true))
        .filter(|m| m.standard_degree() <= max_degree)
        .collect();
    let mut x = VectorField::zero(table);
    for _ in 0..terms {
        let m = monomials[rng.random_range(0..monomials.len())].clone();
        let slots: Vec<usize> = (0..table.len())
            .filter(|&i| m.parity(table) ^ table.is_odd(i) == odd)
            .collect();
        if slots.is_empty() {
            continue;
        }
        let i = slots[rng.random_range(0..slots.len())];
        let f = Polynomial::term(table, m, nonzero(field, rng));
        x = x.add(&VectorField::monomial(table, f, i));
    }
    x
}
