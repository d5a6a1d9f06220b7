//! Chart serialization: JSON is the canonical machine format, SVG the
//! derived presentation (dots for F3 generators, slope-coded product lines,
//! negative-slope differentials).

use resolution::ChartContext;
use serde::Serialize;

#[derive(Serialize)]
pub struct ChartClassOut {
    pub id: String,
    pub s: u32,
    pub t: u32,
    pub name: Option<String>,
}

#[derive(Serialize)]
pub struct ChartLineOut {
    pub op: String,
    pub from: String,
    pub to: String,
    pub sign: i8,
}

#[derive(Serialize)]
pub struct ChartDiffOut {
    pub page: u32,
    pub from: String,
    pub to: String,
    pub sign: Option<i8>,
    pub provenance: String,
}

#[derive(Serialize)]
pub struct ChartOut {
    pub classes: Vec<ChartClassOut>,
    pub lines: Vec<ChartLineOut>,
    pub differentials: Vec<ChartDiffOut>,
}

fn class_id(s: u32, t: u32, i: usize) -> String {
    format!("{s}:{t}:{i}")
}

/// Snapshot of a chart over a stem range, with structure lines for the
/// named multiplicative generators.
pub fn chart_json(
    ctx: &ChartContext,
    min_stem: i64,
    max_stem: i64,
    ops: &[&str],
    diffs: &[(u32, String, String, String)],
) -> ChartOut {
    let mut classes = Vec::new();
    let mut lines = Vec::new();
    for s in 0..=ctx.res.max_s {
        for t in 0..=ctx.res.max_t {
            let stem = t as i64 - s as i64;
            if stem < min_stem || stem > max_stem {
                continue;
            }
            for i in 0..ctx.res.dim(s, t) {
                let c = resolution::ExtClass { s, t, index: i };
                let name = ctx
                    .registry
                    .names()
                    .find(|(_, cc)| **cc == c)
                    .map(|(n, _)| n.clone());
                classes.push(ChartClassOut {
                    id: class_id(s, t, i),
                    s,
                    t,
                    name,
                });
                for op in ops {
                    let v = vec![(c, gf3::ONE)];
                    for (tgt, coeff) in ctx.product_by_name(op, &v) {
                        let tstem = tgt.t as i64 - tgt.s as i64;
                        if tstem < min_stem || tstem > max_stem {
                            continue;
                        }
                        lines.push(ChartLineOut {
                            op: op.to_string(),
                            from: class_id(s, t, i),
                            to: class_id(tgt.s, tgt.t, tgt.index),
                            sign: if coeff == gf3::ONE { 1 } else { -1 },
                        });
                    }
                }
            }
        }
    }
    let differentials = diffs
        .iter()
        .map(|(page, from, to, prov)| ChartDiffOut {
            page: *page,
            from: from.clone(),
            to: to.clone(),
            sign: None,
            provenance: prov.clone(),
        })
        .collect();
    ChartOut {
        classes,
        lines,
        differentials,
    }
}

/// SVG rendering: one dot per class, product lines, dashed differentials.
pub fn chart_svg(chart: &ChartOut) -> String {
    let unit = 16.0;
    let max_stem = chart
        .classes
        .iter()
        .map(|c| c.t as i64 - c.s as i64)
        .max()
        .unwrap_or(0);
    let min_stem = chart
        .classes
        .iter()
        .map(|c| c.t as i64 - c.s as i64)
        .min()
        .unwrap_or(0);
    let max_s = chart.classes.iter().map(|c| c.s).max().unwrap_or(0);
    let width = ((max_stem - min_stem + 2) as f64) * unit;
    let height = ((max_s + 2) as f64) * unit;
    let pos = |s: u32, t: u32, idx_offset: f64| {
        let stem = t as f64 - s as f64;
        (
            (stem - min_stem as f64 + 1.0) * unit + idx_offset * 4.0,
            height - (s as f64 + 1.0) * unit,
        )
    };
    let mut lookup = std::collections::BTreeMap::new();
    let mut dupes: std::collections::BTreeMap<(u32, u32), usize> = Default::default();
    let mut body = String::new();
    for c in &chart.classes {
        let off = dupes.entry((c.s, c.t)).or_insert(0);
        let (x, y) = pos(c.s, c.t, *off as f64);
        *off += 1;
        lookup.insert(c.id.clone(), (x, y));
        body.push_str(&format!(
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.2" fill="black"><title>{}</title></circle>"#,
            c.name.clone().unwrap_or_else(|| c.id.clone())
        ));
        body.push('\n');
    }
    for l in &chart.lines {
        if let (Some(&(x1, y1)), Some(&(x2, y2))) = (lookup.get(&l.from), lookup.get(&l.to)) {
            body.push_str(&format!(
                r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="steelblue" stroke-width="0.7"/>"#,
            ));
            body.push('\n');
        }
    }
    for d in &chart.differentials {
        if let (Some(&(x1, y1)), Some(&(x2, y2))) = (lookup.get(&d.from), lookup.get(&d.to)) {
            body.push_str(&format!(
                r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="crimson" stroke-width="0.8" stroke-dasharray="3 2"/>"#,
            ));
            body.push('\n');
        }
    }
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">
<rect width="100%" height="100%" fill="white"/>
{body}</svg>
"#
    )
}
