//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use cartan_core::algspec::GradedAlgebraSpec;
use cartan_core::centralize::{centralize, hat_apply};
use cartan_core::prolong::{reduce_defining_degree, BeginningPart, FieldCoords, PartialProlong, Prolonger};
use cartan_core::realize::{maurer_cartan_rhs, realization_from_json, realize, ColumnOrder, Realization};
use cartan_core::scalar::kernel_of;
use cartan_core::superpoly::{table_from, Monomial, Polynomial};
use cartan_core::testkit::{random_algebra, random_column_order, random_field, rng, Shape};
use cartan_core::vecfield::{OneForm, VectorField};
use cartan_core::{Field, RowSpace, Scalar, SparseVec};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn spec(name: &str) -> Arc<GradedAlgebraSpec> {
    Arc::new(GradedAlgebraSpec::from_json(&read(name)).unwrap())
}

fn computed(name: &str) -> Realization {
    realize(&spec(name), &ColumnOrder::default()).unwrap()
}

fn supplied(spec_name: &str, real_name: &str) -> Realization {
    realization_from_json(&spec(spec_name), &read(real_name)).unwrap()
}

fn contact(n: usize) -> Prolonger {
    Prolonger::new(&supplied(&format!("heisenberg-n{n}.json"), &format!("heisenberg-n{n}-realization.json")))
}

fn partial(p: &Prolonger, name: &str, s_max: i64) -> Result<PartialProlong, String> {
    let b = BeginningPart::from_json(&read(name), p).map_err(|e| e.to_string())?;
    reduce_defining_degree(p, &b, s_max).map_err(|e| e.to_string())
}

fn oracle_agrees(p: &Prolonger, s_max: i64) -> Check {
    let a = p.complete_prolong(s_max);
    let b = p.oracle_prolong(s_max);
    for (x, y) in a.components.iter().zip(&b.components) {
        ensure!(p.same_span(x, y), "oracle disagrees at degree {}", x.degree);
    }
    Ok(())
}

fn weighted_monomials(p: &Prolonger, w: i64, allow: impl Fn(usize) -> bool) -> usize {
    if w < 0 {
        0
    } else {
        p.table().monomials_of_weight(w as u32, allow).len()
    }
}

const G2_FORMS: [&str; 5] = ["dx1", "dx2", "dx3 + x2*dx1", "dx4 - x1*dx3", "dx5 - x2*dx3 - x2^(2)*dx1"];
const G2_FIELDS: [&str; 5] = [
    "d1 - x2*d3 - x1*x2*d4 - x2^(2)*d5",
    "d2",
    "d3 + x1*d4 + x2*d5",
    "d4",
    "d5",
];

fn ac1() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_cartan"))
        .arg("embed")
        .arg(fixture("g2.json"))
        .output()
        .map_err(|e| e.to_string())?;
    let mut expected = String::new();
    for (k, w) in G2_FORMS.iter().enumerate() {
        expected.push_str(&format!("omega{} = {w}\n", k + 1));
    }
    for (k, x) in G2_FIELDS.iter().enumerate() {
        expected.push_str(&format!("X{} = {x}\n", k + 1));
    }
    let got = String::from_utf8_lossy(&out.stdout);
    ensure!(out.status.success() && got == expected, "embed printed:\n{got}");
    let real = computed("g2.json");
    for k in 0..5 {
        let residual = real.forms()[k].exterior_d().sub(&maurer_cartan_rhs(real.spec(), real.forms(), k));
        ensure!(residual.is_zero(), "Maurer-Cartan residual in form {}", k + 1);
    }
    Ok(())
}

fn ac2() -> Check {
    let real = computed("g2.json");
    let table = real.table();
    let cf = centralize(&real);
    let ys = ["d1 + x3*d4", "d2 - x1*d3 - x1^(2)*d4 + x3*d5", "d3", "d4", "d5"];
    let thetas = ["dx1", "dx2", "dx3 + x1*dx2", "dx4 - x3*dx1 + x1^(2)*dx2", "dx5 - x3*dx2"];
    for k in 0..5 {
        ensure!(*cf.y(k) == VectorField::parse(table, ys[k]).unwrap(), "Y{} = {}", k + 1, cf.y(k).render());
        ensure!(
            *cf.theta(k) == OneForm::parse(table, thetas[k]).unwrap(),
            "theta{} = {}",
            k + 1,
            cf.theta(k).render()
        );
    }
    let mut pairs = 0;
    for x in real.fields() {
        for y in cf.fields() {
            ensure!(x.bracket(y).is_zero(), "[{}, {}] != 0", x.render(), y.render());
            pairs += 1;
        }
    }
    ensure!(pairs == 25, "{pairs} pairs");
    ensure!(cf.verify().is_empty(), "{:?}", cf.verify());
    Ok(())
}

fn ac3() -> Check {
    let p = Prolonger::new(&computed("g2.json"));
    let table = p.complete_prolong(4);
    ensure!(table.dims() == vec![2, 1, 2, 4, 2, 1, 2, 0], "dims {:?}", table.dims());
    let g0 = table.component(0).unwrap();
    let printed = [
        "x1*d2 - x1^(2)*d3 - 2*x1^(3)*d4 + x4*d5",
        "x2*d2 + x3*d3 + x4*d4 + 2*x5*d5",
        "-x2*d1 + x2^(2)*d3 + (x1*x2^(2) - x5)*d4 + x2^(3)*d5",
        "-x1*d1 - x3*d3 - 2*x4*d4 - x5*d5",
    ];
    let fields: Vec<VectorField> = printed.iter().map(|s| VectorField::parse(p.table(), s).unwrap()).collect();
    let coords = FieldCoords::new(p.table(), 0);
    ensure!(
        coords.span(&fields).same_span(&coords.span(&g0.fields)),
        "degree 0 differs from span of X_alpha, X_beta, X_gamma, X_delta"
    );
    let grading = VectorField::parse(p.table(), "-x1*d1 - x2*d2 - 2*x3*d3 - 3*x4*d4 - 3*x5*d5").unwrap();
    ensure!(p.contains(g0, &grading), "grading operator missing");
    for c in &table.components {
        for x in &c.fields {
            ensure!(p.distribution_check(x), "{} leaves the distribution", x.render());
        }
    }
    oracle_agrees(&p, 4)
}

/// `K_f = 2fY_t + Σ_i (−Y_{q_i}(f) Y_{p_i} + Y_{p_i}(f) Y_{q_i})`.
fn contact_field(p: &Prolonger, n: usize, f: &Polynomial) -> VectorField {
    let cf = p.coframe();
    let idx = |name: &str| p.spec().index_of(name).unwrap();
    let mut k = cf.y(idx("z")).left_mul(&f.scale(&p.field().from_i64(2)));
    for i in 1..=n {
        let yp = cf.y(idx(&format!("p{i}")));
        let yq = cf.y(idx(&format!("q{i}")));
        k = k.sub(&yp.left_mul(&yq.apply(f)));
        k = k.add(&yq.left_mul(&yp.apply(f)));
    }
    k
}

fn ac4() -> Check {
    for n in [1, 2] {
        let p = contact(n);
        let table = p.complete_prolong(3);
        let half = p.field().from_i64(2).inv().unwrap();
        for c in &table.components {
            let expected = weighted_monomials(&p, c.degree + 2, |_| true);
            ensure!(c.dim() == expected, "n = {n}, degree {}: {} vs {expected}", c.degree, c.dim());
            for (x, g) in c.fields.iter().zip(&c.generating) {
                let f = g.values[0].scale(&half);
                ensure!(*x == contact_field(&p, n, &f), "n = {n}: {} is not K_f", x.render());
            }
        }
    }
    Ok(())
}

fn ac5() -> Check {
    for n in [1usize, 2] {
        let p = contact(n);
        let t = p.table().index_of("t").unwrap();
        let po = |s: i64| weighted_monomials(&p, s + 2, |i| i != t);

        let h = partial(&p, &format!("sp-n{n}.json"), 3)?;
        ensure!(h.recurrence_agrees(), "sp, n = {n}: recurrence");
        for c in h.table.components.iter().filter(|c| c.degree >= 0) {
            ensure!(c.dim() == po(c.degree), "sp, n = {n}, degree {}: dim {}", c.degree, c.dim());
            ensure!(
                c.generating.iter().all(|g| g.values[0].partial(t).is_zero()),
                "sp, n = {n}: Y_t(f) != 0 at degree {}",
                c.degree
            );
        }

        let h = partial(&p, &format!("id-n{n}.json"), 4)?;
        ensure!(h.recurrence_agrees(), "id, n = {n}: recurrence");
        ensure!(h.component(0).unwrap().dim() == 1, "id, n = {n}: h_0");
        for s in 1..=4 {
            ensure!(h.component(s).unwrap().is_zero(), "id, n = {n}: h_{s} != 0");
        }

        let h = partial(&p, &format!("w1-n{n}.json"), 3)?;
        ensure!(h.recurrence_agrees(), "W1, n = {n}: recurrence");
        let h0 = h.component(0).unwrap();
        ensure!(h0.dim() == po(0) + 1, "W1, n = {n}: dim h_0 = {}", h0.dim());
        let kt = contact_field(&p, n, &Polynomial::var(p.table(), t));
        ensure!(p.contains(h0, &kt), "W1, n = {n}: K_t missing");
        for s in 1..=3 {
            let c = h.component(s).unwrap();
            ensure!(c.dim() == po(s), "W1, n = {n}, degree {s}: dim {}", c.dim());
            ensure!(c.generating.iter().all(|g| g.values[0].partial(t).is_zero()), "W1, n = {n}: not in po at {s}");
        }

        let h = partial(&p, &format!("w2-n{n}.json"), 3)?;
        ensure!(h.recurrence_agrees(), "W2, n = {n}: recurrence");
        let expected = vec![1, 2 * n, 2 * n * n + n + 1, 2 * n, 1, 0];
        ensure!(h.dims() == expected, "W2, n = {n}: dims {:?}", h.dims());
        ensure!(h.total() == 2 * n * n + 5 * n + 3, "W2, n = {n}: total {}", h.total());
    }
    Ok(())
}

fn divergence(x: &VectorField) -> Polynomial {
    let table = x.table().clone();
    let mut d = Polynomial::zero(&table);
    for j in 0..table.len() {
        d = d.add(&x.coeff(j).nabla(j).unwrap());
    }
    d
}

/// Kernel of a map from degree-`s` fields to polynomial lists, in field coordinates.
fn solutions(p: &Prolonger, s: i64, map: impl Fn(&VectorField) -> Vec<Polynomial>) -> (FieldCoords, RowSpace) {
    let coords = FieldCoords::new(p.table(), s);
    let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, Scalar)>> = BTreeMap::new();
    for c in 0..coords.len() {
        let x = coords.decode(&SparseVec::unit(c, p.field()));
        for (e, r) in map(&x).iter().enumerate() {
            for (mono, v) in r.terms() {
                rows.entry((e, mono.clone())).or_default().push((c, v.clone()));
            }
        }
    }
    let rows: Vec<SparseVec> = rows.into_values().map(SparseVec::from_entries).collect();
    let span = RowSpace::from_vectors(p.field(), &kernel_of(p.field(), coords.len(), &rows));
    (coords, span)
}

fn ac6() -> Check {
    for n in [2usize, 3] {
        let p = Prolonger::new(&computed(&format!("depth1-n{n}.json")));
        let h = partial(&p, &format!("h11-n{n}.json"), 2)?;
        ensure!(h.dims() == vec![n, n * n, n, 0], "h11, n = {n}: dims {:?}", h.dims());
        ensure!(h.total() == n * n + 2 * n && h.recurrence_agrees(), "h11, n = {n}");

        let h = partial(&p, &format!("h12-n{n}.json"), 3)?;
        ensure!(h.recurrence_agrees(), "h12, n = {n}: recurrence");
        ensure!(h.operators().len() == n, "h12, n = {n}: {} operators", h.operators().len());
        for s in 0..=3 {
            let (coords, constant) = solutions(&p, s, |x| {
                vec![divergence(x).filter(|m| !m.is_one())]
            });
            let got = coords.span(&h.component(s).unwrap().fields);
            ensure!(got.same_span(&constant), "h12, n = {n}, degree {s}: not the constant-divergence fields");
        }
    }

    let p = Prolonger::new(&computed("super-2-1.json"));
    let h = partial(&p, "super-h11.json", 3)?;
    ensure!(h.dims() == vec![3, 9, 3, 0, 0], "super: dims {:?}", h.dims());
    ensure!(h.recurrence_agrees(), "super: recurrence");
    let table = p.table().clone();
    let dim = table.len();
    let half = p.field().from_i64(2).inv().unwrap();
    let odd = |i: usize| table.is_odd(i);
    let residuals = |x: &VectorField, signed: bool| -> Vec<Polynomial> {
        let f = |k: usize| x.coeff(k).clone();
        let mut out = Vec::new();
        for k in 0..dim {
            for i in (0..dim).filter(|&i| i != k) {
                for j in (0..dim).filter(|&j| j != k) {
                    out.push(f(k).partial(j).partial(i));
                }
            }
            for i in (0..dim).filter(|&i| i != k) {
                let plain = f(i).nabla(i).unwrap().partial(k);
                if !odd(k) {
                    let flip = signed && odd(i) && f(i).parity() == Some(true);
                    let rhs = if flip { plain.neg() } else { plain };
                    out.push(f(k).partial(k).partial(k).scale(&half).sub(&rhs));
                } else {
                    for j in (0..dim).filter(|&j| j != k) {
                        out.push(f(j).nabla(j).unwrap().partial(k).sub(&plain));
                    }
                }
            }
        }
        out
    };
    let h1 = h.component(1).unwrap();
    let (coords, signed) = solutions(&p, 1, |x| residuals(x, true));
    ensure!(signed.same_span(&coords.span(&h1.fields)), "super: signed system does not cut out h_1");
    ensure!(
        h1.fields.iter().any(|x| residuals(x, false).iter().any(|r| !r.is_zero())),
        "super: the unsigned system is not distinguished"
    );
    Ok(())
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (pos, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[pos + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn ac7() -> Check {
    let p = Prolonger::new(&computed("he16.json"));
    let real = p.coframe().realization();
    for w in 0..=3u32 {
        for mono in p.table().monomials_of_weight(w, |_| true) {
            let f = Polynomial::term(p.table(), mono, p.field().one());
            for x in real.fields() {
                for y in p.coframe().fields() {
                    ensure!(x.apply(&hat_apply(y, &f)) == hat_apply(y, &x.apply(&f)), "X and hat Y do not commute");
                }
            }
        }
    }
    let h = partial(&p, "kas.json", 4)?;
    ensure!(h.defining_degrees == vec![1], "defining degrees {:?}", h.defining_degrees);
    ensure!(h.operators().len() == 10, "{} operators", h.operators().len());
    ensure!(h.component(1).unwrap().dim() == 16, "dim h_1 = {}", h.component(1).unwrap().dim());
    ensure!(h.recurrence_agrees(), "recurrence disagrees with the operator solutions");
    oracle_agrees(&p, 2)?;

    let table = p.table().clone();
    let t = table.index_of("t").unwrap();
    let odd: Vec<usize> = (0..table.len()).filter(|&k| table.is_odd(k)).collect();
    let i = p.field().imaginary_unit().unwrap();
    for s in 1..=4i64 {
        let w = s + 2;
        let mut tuples = Vec::new();
        for size in 0..=3usize {
            let size_w = size as i64;
            if w < size_w || (w - size_w) % 2 != 0 {
                continue;
            }
            let mut exps = vec![0u32; table.len()];
            exps[t] = ((w - size_w) / 2) as u32;
            let f = Polynomial::term(&table, Monomial::from_exponents(&table, exps).unwrap(), p.field().one());
            let mut df = f.clone();
            for _ in 0..(3 - size) {
                df = df.partial(t);
            }
            for j in subsets(&odd, size) {
                let mut theta = Polynomial::one(&table);
                for &k in &j {
                    theta = theta.mul(&Polynomial::var(&table, k));
                }
                let star = theta.hodge_star(&[t]).unwrap();
                tuples.push(f.mul(&theta).sub(&df.mul(&star).scale(&i)));
            }
        }
        let g = p.complete_component(s);
        let mut fields = Vec::new();
        for f in &tuples {
            fields.push(p.field_with_generating(&g, std::slice::from_ref(f)).map_err(|e| e.to_string())?);
        }
        let coords = FieldCoords::new(&table, s);
        ensure!(
            coords.span(&fields).same_span(&coords.span(&h.component(s).unwrap().fields)),
            "degree {s}: solutions differ from the four shape families"
        );
    }
    Ok(())
}

fn ac8() -> Check {
    for (name, ch) in [("heisenberg-char5.json", 5u64), ("heisenberg-char2.json", 2)] {
        let p = Prolonger::new(&computed(name));
        ensure!(p.field().characteristic() == ch, "{name}: characteristic");
        oracle_agrees(&p, 4).map_err(|e| format!("{name}: {e}"))?;
    }
    let t = table_from(Field::prime(5).unwrap(), &[("x", false, 1)]).unwrap();
    let x2 = Polynomial::parse(&t, "x^(2)").unwrap();
    let x3 = Polynomial::parse(&t, "x^(3)").unwrap();
    ensure!(x2.mul(&x3).is_zero(), "binom(5, 2) does not vanish mod 5");
    let x = Polynomial::var(&t, 0);
    let mut power = Polynomial::one(&t);
    for _ in 0..5 {
        power = power.mul(&x);
    }
    ensure!(power.is_zero(), "x^5 != 0 mod 5");
    let x5 = Polynomial::parse(&t, "x^(5)").unwrap();
    ensure!(x5.partial(0) == Polynomial::parse(&t, "x^(4)").unwrap(), "d x^(5) != x^(4)");
    let t2 = table_from(Field::prime(2).unwrap(), &[("y", false, 1)]).unwrap();
    let y = Polynomial::var(&t2, 0);
    ensure!(y.mul(&y).is_zero(), "y*y != 0 mod 2");
    Ok(())
}

const CASES: u64 = 200;

fn ac9() -> Check {
    let algebra = |seed: u64| Arc::new(random_algebra(seed, Field::RATIONALS, Shape::default()));
    let table = table_from(
        Field::RATIONALS,
        &[("x1", false, 1), ("x2", false, 2), ("th1", true, 1), ("th2", true, 2)],
    )
    .unwrap();
    for seed in 0..CASES {
        let mut r = rng(seed);
        let parity = [seed & 1 == 1, seed & 2 == 2, seed & 4 == 4];
        let x = random_field(&mut r, &table, parity[0], 3, 2);
        let y = random_field(&mut r, &table, parity[1], 3, 2);
        let z = random_field(&mut r, &table, parity[2], 3, 2);
        let swap = y.bracket(&x.bracket(&z));
        let swap = if parity[0] && parity[1] { swap.neg() } else { swap };
        ensure!(
            x.bracket(&y.bracket(&z)) == x.bracket(&y).bracket(&z).add(&swap),
            "super Jacobi fails for seed {seed}"
        );
        let spec = algebra(seed);
        ensure!(spec.validate().is_valid(), "random algebra {seed} is invalid");
    }
    for seed in 0..CASES {
        let spec = algebra(seed);
        let real = realize(&spec, &random_column_order(seed ^ 0x5eed, spec.dim())).map_err(|e| e.to_string())?;
        for k in 0..spec.dim() {
            let residual = real.forms()[k].exterior_d().sub(&maurer_cartan_rhs(&spec, real.forms(), k));
            ensure!(residual.is_zero(), "Maurer-Cartan fails for seed {seed}, form {}", k + 1);
        }
    }
    for seed in 0..CASES {
        let cf = centralize(&realize(&algebra(seed), &ColumnOrder::default()).unwrap());
        ensure!(cf.verify().is_empty(), "seed {seed}: {:?}", cf.verify());
    }
    for seed in 0..CASES {
        let spec = algebra(seed);
        let base = realize(&spec, &ColumnOrder::default()).unwrap();
        let other = realize(&spec, &random_column_order(seed, spec.dim())).unwrap();
        let ingested = realization_from_json(&spec, &base.to_json().to_string()).map_err(|e| e.to_string())?;
        let dims = Prolonger::new(&base).complete_prolong(1).dims();
        ensure!(Prolonger::new(&other).complete_prolong(1).dims() == dims, "seed {seed}: column order changes dims");
        ensure!(Prolonger::new(&ingested).complete_prolong(1).dims() == dims, "seed {seed}: ingest changes dims");
    }
    for (spec_name, real_name, s_max) in [
        ("g2.json", "g2-realization.json", 4),
        ("heisenberg-n1.json", "heisenberg-n1-realization.json", 3),
        ("heisenberg-n2.json", "heisenberg-n2-realization.json", 2),
    ] {
        let a = Prolonger::new(&computed(spec_name)).complete_prolong(s_max).dims();
        let b = Prolonger::new(&supplied(spec_name, real_name)).complete_prolong(s_max).dims();
        ensure!(a == b, "{spec_name}: solved {a:?} vs supplied data {b:?}");
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check); 9] = [
        ("AC1", "g(2) realization", ac1),
        ("AC2", "g(2) centralizer", ac2),
        ("AC3", "g(2) prolongation", ac3),
        ("AC4", "contact algebra", ac4),
        ("AC5", "contact partial prolongs", ac5),
        ("AC6", "depth-1 partial prolongs", ac6),
        ("AC7", "kas over Q(i)", ac7),
        ("AC8", "characteristic p", ac8),
        ("AC9", "property suites", ac9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(payload) => Err(payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string())),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("{id} PASS  {name} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL  {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
