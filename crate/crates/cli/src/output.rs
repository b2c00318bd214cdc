//! Markdown, JSON and CSV rendering of command results.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use nefwall::classify::TypeOrbit;
use nefwall::contfrac::Convergent;
use nefwall::diophantine::PellSolution;
use nefwall::moduli::{
    Cohomology, CohomologyReport, Component, ComponentShape, EventKind, WallEvent,
};
use nefwall::{Conditionality, Rational};

use crate::Format;

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn md_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    out
}

fn conditionality_line<I: IntoIterator<Item = Conditionality>>(items: I) -> String {
    let c = items
        .into_iter()
        .max()
        .unwrap_or(Conditionality::Unconditional);
    format!("\nConditionality: {}\n", c.as_str())
}

fn projective(dim: &BigInt, copies: &BigInt) -> String {
    if copies.is_one() {
        format!("P^{dim}")
    } else {
        format!("{copies} copies of P^{dim}")
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn empty_for_every_ample(n: usize, format: Format) -> String {
    match format {
        Format::Json => json(&serde_json::json!({ "n": n, "empty_for_every_ample": true })),
        Format::Csv => csv_table(
            &["n", "empty_for_every_ample"],
            vec![vec![n.to_string(), "true".into()]],
        ),
        Format::Markdown => format!(
            "The moduli space is empty for every ample divisor on the blowup at {n} points.\n"
        ),
    }
}

fn event_text(n: usize, e: &WallEvent) -> String {
    match e.kind {
        EventKind::BlowupModification => {
            format!("none; previous P^{} blown up {n} times", n - 11)
        }
        _ => match (&e.dim, &e.copies) {
            (Some(dim), Some(copies)) => projective(dim, copies),
            _ => String::new(),
        },
    }
}

pub fn walls(n: usize, events: &[WallEvent], format: Format) -> String {
    match format {
        Format::Json => json(events),
        Format::Csv => {
            let rows = events
                .iter()
                .map(|e| {
                    vec![
                        opt(&e.divisor),
                        e.family.clone().unwrap_or_default(),
                        e.t.to_string(),
                        e.kind.as_str().to_string(),
                        opt(&e.dim),
                        opt(&e.copies),
                        e.conditionality.as_str().to_string(),
                    ]
                })
                .collect();
            csv_table(
                &[
                    "divisor",
                    "type",
                    "t",
                    "kind",
                    "dim",
                    "copies",
                    "conditionality",
                ],
                rows,
            )
        }
        Format::Markdown => {
            let typed = events.iter().any(|e| e.family.is_some());
            let mut header = vec!["D"];
            if typed {
                header.push("Type");
            }
            header.extend(["t_D", "New component"]);
            let rows = events
                .iter()
                .filter(|e| e.kind != EventKind::EmptinessBoundary)
                .map(|e| {
                    let mut r = vec![opt(&e.divisor)];
                    if typed {
                        r.push(e.family.clone().unwrap_or_default());
                    }
                    r.push(e.t.to_string());
                    r.push(event_text(n, e));
                    r
                })
                .collect();
            let mut out = format!(
                "Empty for t > {}.\n\n",
                Rational::new(n as i64, 3).expect("nonzero")
            );
            out.push_str(&md_table(&header, rows));
            out.push_str(&conditionality_line(
                events.iter().map(|e| e.conditionality),
            ));
            out
        }
    }
}

pub fn orbits(orbits: &[TypeOrbit], format: Format) -> String {
    match format {
        Format::Json => json(orbits),
        Format::Csv => {
            let rows = orbits
                .iter()
                .map(|o| {
                    vec![
                        o.display_divisor().to_string(),
                        o.family.clone().unwrap_or_default(),
                        o.t_wall.to_string(),
                        o.chi.to_string(),
                        o.copies.to_string(),
                        o.conditionality.as_str().to_string(),
                    ]
                })
                .collect();
            csv_table(
                &["divisor", "type", "t", "chi", "copies", "conditionality"],
                rows,
            )
        }
        Format::Markdown => {
            let typed = orbits.iter().any(|o| o.family.is_some());
            let mut header = vec!["D"];
            if typed {
                header.push("Type");
            }
            header.extend(["t_D", "chi", "Copies"]);
            let rows = orbits
                .iter()
                .map(|o| {
                    let mut r = vec![o.display_divisor().to_string()];
                    if typed {
                        r.push(o.family.clone().unwrap_or_default());
                    }
                    r.extend([
                        o.t_wall.to_string(),
                        o.chi.to_string(),
                        o.copies.to_string(),
                    ]);
                    r
                })
                .collect();
            let mut out = md_table(&header, rows);
            out.push_str(&conditionality_line(
                orbits.iter().map(|o| o.conditionality),
            ));
            out
        }
    }
}

fn component_text(c: &Component) -> String {
    let base = projective(&c.dim, &c.copies);
    match (c.description, c.blown_up_points) {
        (ComponentShape::BlowupOfProjectiveSpace, Some(p)) => {
            format!("{base} blown up at {p} points")
        }
        _ => base,
    }
}

pub fn components(t: &Rational, comps: &[Component], format: Format) -> String {
    match format {
        Format::Json => json(comps),
        Format::Csv => {
            let rows = comps
                .iter()
                .map(|c| {
                    vec![
                        c.divisor.to_string(),
                        c.dim.to_string(),
                        c.copies.to_string(),
                        opt(&c.blown_up_points),
                        c.conditionality.as_str().to_string(),
                    ]
                })
                .collect();
            csv_table(
                &[
                    "divisor",
                    "dim",
                    "copies",
                    "blown_up_points",
                    "conditionality",
                ],
                rows,
            )
        }
        Format::Markdown => {
            if comps.is_empty() {
                return format!("The moduli space is empty at t = {t}.\n");
            }
            let mut out = format!("Components at t = {t}:\n\n");
            for c in comps {
                out.push_str(&format!("- {} (D = {})\n", component_text(c), c.divisor));
            }
            out.push_str(&conditionality_line(comps.iter().map(|c| c.conditionality)));
            out
        }
    }
}

pub fn convergents(cs: &[Convergent], format: Format) -> String {
    let rows = || {
        cs.iter()
            .map(|c| vec![c.k.to_string(), c.p.to_string(), c.q.to_string()])
            .collect::<Vec<_>>()
    };
    match format {
        Format::Json => json(cs),
        Format::Csv => csv_table(&["k", "p", "q"], rows()),
        Format::Markdown => md_table(
            &["k", "p_k/q_k"],
            cs.iter()
                .map(|c| vec![c.k.to_string(), format!("{}/{}", c.p, c.q)])
                .collect(),
        ),
    }
}

pub fn pell(sols: &[PellSolution], format: Format) -> String {
    let rows: Vec<Vec<String>> = sols
        .iter()
        .map(|s| vec![s.x.to_string(), s.y.to_string()])
        .collect();
    match format {
        Format::Json => json(sols),
        Format::Csv => csv_table(&["x", "y"], rows),
        Format::Markdown if sols.is_empty() => "No positive solutions.\n".to_string(),
        Format::Markdown => md_table(&["x", "y"], rows),
    }
}

fn cohomology_row(name: &str, c: &Cohomology) -> Vec<String> {
    vec![
        name.to_string(),
        c.h0.to_string(),
        c.h1.to_string(),
        c.h2.to_string(),
    ]
}

pub fn cohomology(r: &CohomologyReport, format: Format) -> String {
    let rows = vec![
        cohomology_row("D", &r.d),
        cohomology_row("2D", &r.twice_d),
        cohomology_row("2D-K", &r.twice_d_minus_k),
    ];
    match format {
        Format::Json => json(r),
        Format::Csv => csv_table(&["bundle", "h0", "h1", "h2"], rows),
        Format::Markdown => {
            let mut out = format!("D = {}\n\n", r.divisor);
            out.push_str(&md_table(&["Bundle", "h^0", "h^1", "h^2"], rows));
            out.push_str(&conditionality_line([r.conditionality]));
            out
        }
    }
}
