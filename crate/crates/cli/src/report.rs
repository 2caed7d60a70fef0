//! Text and JSON renderings of command results.

use std::fmt::Write;

use cartan_core::algspec::{GradedAlgebraSpec, ValidationReport};
use cartan_core::centralize::Coframe;
use cartan_core::prolong::{PartialProlong, ProlongComponent, ProlongTable, Prolonger, Symmetrization};
use cartan_core::realize::Realization;
use cartan_core::Field;
use serde_json::{json, Value};

use crate::Format;

fn field_json(field: Field) -> Value {
    json!({"char": field.characteristic(), "i": field.has_imaginary_unit()})
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn list(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn validation(spec: &GradedAlgebraSpec, report: &ValidationReport, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = format!("depth {}, dims {}\n", report.depth, list(&report.dims));
            for v in &report.violations {
                let _ = writeln!(out, "{v}");
            }
            out
        }
        Format::Json => {
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "kind": format!("{:?}", v.kind),
                        "indices": v.indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "residual": v.residual,
                    })
                })
                .collect();
            pretty(&json!({
                "field": field_json(spec.field()),
                "valid": report.is_valid(),
                "depth": report.depth,
                "dims": report.dims,
                "violations": violations,
            }))
        }
    }
}

/// `omega1 = ...` and `X1 = ...` lines, or a file `--realization` accepts.
pub fn realization(real: &Realization, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for (k, w) in real.forms().iter().enumerate() {
                let _ = writeln!(out, "omega{} = {}", k + 1, w.render());
            }
            for (k, x) in real.fields().iter().enumerate() {
                let _ = writeln!(out, "X{} = {}", k + 1, x.render());
            }
            out
        }
        Format::Json => pretty(&real.to_json()),
    }
}

pub fn coframe(cf: &Coframe, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for (k, y) in cf.fields().iter().enumerate() {
                let _ = writeln!(out, "Y{} = {}", k + 1, y.render());
            }
            for (k, w) in cf.forms().iter().enumerate() {
                let _ = writeln!(out, "theta{} = {}", k + 1, w.render());
            }
            out
        }
        Format::Json => {
            let ys: Vec<String> = cf.fields().iter().map(|y| y.render()).collect();
            let thetas: Vec<String> = cf.forms().iter().map(|w| w.render()).collect();
            pretty(&json!({"y": ys, "theta": thetas}))
        }
    }
}

pub struct Prolongation<'a> {
    pub prolonger: &'a Prolonger,
    pub complete: &'a ProlongTable,
    pub partial: Option<&'a PartialProlong>,
    pub checks: Option<&'a [(i64, bool)]>,
    pub max_degree: i64,
    pub bases: bool,
}

impl Prolongation<'_> {
    fn table(&self) -> &ProlongTable {
        self.partial.map(|h| &h.table).unwrap_or(self.complete)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => pretty(&self.json()),
        }
    }

    fn text(&self) -> String {
        let p = self.prolonger;
        let table = self.table();
        let mut out = format!(
            "field {}, depth {}, max degree {}\n",
            p.field(),
            p.depth(),
            self.max_degree
        );
        match self.partial {
            None => {
                let _ = writeln!(out, "{:>4}  {:>5}", "s", "dim");
                for c in &table.components {
                    let _ = writeln!(out, "{:>4}  {:>5}", c.degree, c.dim());
                }
                let _ = writeln!(out, "total {}", table.total());
            }
            Some(h) => {
                let _ = writeln!(out, "{:>4}  {:>5}  {:>5}", "s", "g_s", "h_s");
                for (g, c) in self.complete.components.iter().zip(&h.table.components) {
                    let _ = writeln!(out, "{:>4}  {:>5}  {:>5}", c.degree, g.dim(), c.dim());
                }
                let _ = writeln!(out, "total {}", table.total());
                let degrees: Vec<String> = h.defining_degrees.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(out, "defining degrees: {}", degrees.join(", "));
                for set in &h.operator_sets {
                    for op in &set.operators {
                        let _ = writeln!(out, "  [{}] {}", set.degree, op.render(p));
                    }
                }
                for (s, ok) in &h.recurrence_checks {
                    let verdict = if *ok { "agrees" } else { "DISAGREES" };
                    let _ = writeln!(out, "recurrence at degree {s}: {verdict}");
                }
                for w in &h.warnings {
                    let _ = writeln!(out, "warning: {w}");
                }
            }
        }
        if let Some(checks) = self.checks {
            for (s, ok) in checks {
                let verdict = if *ok { "agrees" } else { "DISAGREES" };
                let _ = writeln!(out, "oracle at degree {s}: {verdict}");
            }
        }
        if table.stabilized {
            out.push_str("stabilized: the top three components vanish\n");
        }
        if self.bases {
            for c in &table.components {
                self.basis_text(&mut out, c);
            }
        }
        out
    }

    fn basis_text(&self, out: &mut String, c: &ProlongComponent) {
        let _ = writeln!(out, "\ndegree {} (dim {})", c.degree, c.dim());
        let show_generating = self.prolonger.depth() > 1;
        for (x, g) in c.fields.iter().zip(&c.generating) {
            let _ = writeln!(out, "  {}", x.render());
            if show_generating {
                let _ = writeln!(out, "      F = ({})", g.render().join(", "));
            }
        }
    }

    fn json(&self) -> Value {
        let p = self.prolonger;
        let table = self.table();
        let names = |idx: &[usize]| -> Vec<String> { idx.iter().map(|&i| p.table().name(i).to_string()).collect() };
        let components: Vec<Value> = table
            .components
            .iter()
            .map(|c| {
                let mut v = json!({"degree": c.degree, "dim": c.dim()});
                if self.bases {
                    v["fields"] = json!(c.fields.iter().map(|x| x.render()).collect::<Vec<_>>());
                    v["generating"] = json!(c.generating.iter().map(|g| g.render()).collect::<Vec<_>>());
                }
                v
            })
            .collect();
        let mut out = json!({
            "field": field_json(p.field()),
            "depth": p.depth(),
            "max_degree": self.max_degree,
            "generating_coordinates": names(p.generating_coordinates()),
            "dims": table.dims(),
            "total": table.total(),
            "stabilized": table.stabilized,
            "components": components,
        });
        if let Some(h) = self.partial {
            let operators: Vec<Value> = h
                .operator_sets
                .iter()
                .flat_map(|set| set.operators.iter().map(move |op| (set.degree, op)))
                .map(|(degree, op)| {
                    let terms: Vec<Value> = op
                        .terms
                        .iter()
                        .map(|t| {
                            json!({
                                "coeff": t.coeff.to_string(),
                                "word": names(&t.word),
                                "target": p.table().name(t.target),
                            })
                        })
                        .collect();
                    json!({
                        "degree": degree,
                        "symmetrization": match op.symmetrization {
                            Symmetrization::Symmetric => "symmetric",
                            Symmetrization::Ordered => "ordered",
                        },
                        "text": op.render(p),
                        "terms": terms,
                    })
                })
                .collect();
            out["partial"] = json!({
                "ambient_dims": self.complete.dims(),
                "defining_degrees": h.defining_degrees,
                "operators": operators,
                "recurrence": h.recurrence_checks.iter().map(|(s, ok)| json!({"degree": s, "agrees": ok})).collect::<Vec<_>>(),
                "warnings": h.warnings,
            });
        }
        if let Some(checks) = self.checks {
            out["oracle"] = json!(checks.iter().map(|(s, ok)| json!({"degree": s, "agrees": ok})).collect::<Vec<_>>());
        }
        out
    }
}
