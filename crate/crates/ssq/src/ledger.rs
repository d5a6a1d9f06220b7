//! The differential ledger: one line per declared or derived spectral
//! sequence fact, each carrying its provenance. Loading validates degree
//! bookkeeping against the charts and rejects contradictions.

use gf3::F3;
use resolution::{ChartContext, ExtClass};
use std::collections::BTreeMap;

pub type ClassVec = Vec<(ExtClass, F3)>;

#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    /// d_page(source) = target, up to a unit unless `exact`
    Differential {
        page: u32,
        source: String,
        target: String,
        exact: bool,
        negative: bool,
    },
    /// declared permanent cycle
    Permanent { class: String },
    /// class is zero in E_page of the sphere chart (a relation fact)
    SphereDead { class: String, page: u32 },
    /// d_page in the sphere chart
    SphereDifferential { page: u32, source: String, target: String },
    /// sphere class alive at E_page
    SpherePermanent { class: String, through_page: u32 },
    /// reduction data: the two cell-projection images of a chart class
    Reduction { class: String, br: String, brr: String },
    /// declared homotopy-level assumption consumed by certificates
    Assume { id: String, text: String },
    /// exactly one of the alternatives holds
    Disjunction { id: String, branches: Vec<Entry> },
}

#[derive(Clone, Debug)]
pub struct LedgerEntry {
    pub entry: Entry,
    pub provenance: String,
}

#[derive(Default)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

fn split_provenance(line: &str) -> (String, String) {
    if let Some(open) = line.find('[') {
        let close = line.rfind(']').unwrap_or(line.len());
        (
            line[..open].trim().to_string(),
            line[open + 1..close].trim().to_string(),
        )
    } else {
        (line.trim().to_string(), String::new())
    }
}

fn parse_entry_body(body: &str) -> Result<Entry, String> {
    let words: Vec<&str> = body.split_whitespace().collect();
    if words.is_empty() {
        return Err("empty entry".into());
    }
    let kind = words[0];
    if let Some(page_str) = kind.strip_prefix('d') {
        if let Ok(page) = page_str.parse::<u32>() {
            // d<r> <mono...> -> [-] <mono...> [@V1] [!exact]
            let rest = body[kind.len()..].trim();
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| format!("differential needs an arrow: {body}"))?;
            let mut rhs = rhs.trim().to_string();
            let mut exact = false;
            if let Some(stripped) = rhs.strip_suffix("!exact") {
                exact = true;
                rhs = stripped.trim().to_string();
            }
            if let Some(stripped) = rhs.strip_suffix("@V1") {
                rhs = stripped.trim().to_string();
            }
            let negative = rhs.starts_with('-');
            let rhs = rhs.trim_start_matches('-').trim().to_string();
            return Ok(Entry::Differential {
                page,
                source: lhs.trim().replace('*', " "),
                target: rhs.replace('*', " "),
                exact,
                negative,
            });
        }
    }
    match kind {
        "perm" => Ok(Entry::Permanent {
            class: body["perm".len()..].trim().trim_end_matches("@V1").trim().replace('*', " "),
        }),
        "sphere_dead" => {
            // sphere_dead <mono...> E<r>
            let rest = body["sphere_dead".len()..].trim();
            let (mono, page) = rest
                .rsplit_once(" E")
                .ok_or("sphere_dead needs a page marker E<r>")?;
            Ok(Entry::SphereDead {
                class: mono.trim().replace('*', " "),
                page: page.trim().parse().map_err(|e| format!("{e}"))?,
            })
        }
        "sphere_d" => {
            let rest = body["sphere_d".len()..].trim();
            let (page, rest) = rest
                .split_once(' ')
                .ok_or("sphere_d needs a page")?;
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or("sphere_d needs an arrow")?;
            Ok(Entry::SphereDifferential {
                page: page.parse().map_err(|e| format!("{e}"))?,
                source: lhs.trim().replace('*', " "),
                target: rhs.trim().replace('*', " "),
            })
        }
        "sphere_perm" => {
            let rest = body["sphere_perm".len()..].trim();
            let (mono, page) = rest
                .rsplit_once(" E")
                .ok_or("sphere_perm needs a page marker E<r>")?;
            Ok(Entry::SpherePermanent {
                class: mono.trim().replace('*', " "),
                through_page: page.trim().parse().map_err(|e| format!("{e}"))?,
            })
        }
        "reduction" => {
            // reduction <mono> : br = <combo|0> ; brr = <combo|0>
            let rest = body["reduction".len()..].trim();
            let (class, maps) = rest.split_once(':').ok_or("reduction needs ':'")?;
            let mut br = String::new();
            let mut brr = String::new();
            for part in maps.split(';') {
                let (k, v) = part.split_once('=').ok_or("reduction map needs '='")?;
                match k.trim() {
                    "br" => br = v.trim().to_string(),
                    "brr" => brr = v.trim().to_string(),
                    other => return Err(format!("unknown reduction key {other}")),
                }
            }
            Ok(Entry::Reduction {
                class: class.trim().replace('*', " "),
                br,
                brr,
            })
        }
        "assume" => {
            let rest = body["assume".len()..].trim();
            let (id, text) = rest.split_once(' ').unwrap_or((rest, ""));
            Ok(Entry::Assume {
                id: id.to_string(),
                text: text.trim().to_string(),
            })
        }
        other => Err(format!("unknown entry kind {other}")),
    }
}

impl Ledger {
    pub fn parse(text: &str) -> Result<Ledger, String> {
        let mut entries = Vec::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((no, raw)) = lines.next() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("branch ") {
                // branch <id> { entry | entry | ... } [prov]
                let (head, prov) = split_provenance(rest);
                let open = head.find('{').ok_or(format!("line {}: branch needs {{", no + 1))?;
                let close = head.rfind('}').ok_or(format!("line {}: branch needs }}", no + 1))?;
                let id = head[..open].trim().to_string();
                let mut branches = Vec::new();
                for alt in head[open + 1..close].split('|') {
                    let alt = alt.trim();
                    if alt == "nothing" {
                        branches.push(Entry::Assume {
                            id: format!("{id}-nothing"),
                            text: "no differential in this branch".into(),
                        });
                    } else {
                        branches.push(
                            parse_entry_body(alt)
                                .map_err(|e| format!("line {}: {e}", no + 1))?,
                        );
                    }
                }
                entries.push(LedgerEntry {
                    entry: Entry::Disjunction { id, branches },
                    provenance: prov,
                });
                continue;
            }
            let (body, prov) = split_provenance(line);
            let entry =
                parse_entry_body(&body).map_err(|e| format!("line {}: {e}", no + 1))?;
            entries.push(LedgerEntry {
                entry,
                provenance: prov,
            });
        }
        Ok(Ledger { entries })
    }

    pub fn assumptions(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .filter_map(|e| match &e.entry {
                Entry::Assume { id, text } => Some((id.clone(), text.clone())),
                _ => None,
            })
            .collect()
    }

    /// Degree bookkeeping and contradiction checks against the charts.
    /// Every differential must satisfy target = (s + r, t + r - 1); no class
    /// may be both an accepted differential target and declared permanent.
    pub fn validate(
        &self,
        v1: &ChartContext,
        sphere: &ChartContext,
    ) -> Result<(), String> {
        let mut killed: BTreeMap<(u32, u32), Vec<(usize, u32)>> = BTreeMap::new();
        let mut permanents: Vec<(usize, (u32, u32))> = Vec::new();
        let mut check_diff = |idx: usize,
                              chart: &ChartContext,
                              page: u32,
                              source: &str,
                              target: &str|
         -> Result<Option<((u32, u32), (u32, u32))>, String> {
            let sv = chart
                .eval_expr(source)
                .map_err(|e| format!("entry {idx}: unresolved source {source}: {e}"))?;
            if sv.is_empty() {
                return Err(format!("entry {idx}: source {source} is zero in the chart"));
            }
            let tv = chart
                .eval_expr(target)
                .map_err(|e| format!("entry {idx}: unresolved target {target}: {e}"))?;
            if tv.is_empty() {
                return Err(format!("entry {idx}: target {target} is zero in the chart"));
            }
            let (s, t) = (sv[0].0.s, sv[0].0.t);
            let (s2, t2) = (tv[0].0.s, tv[0].0.t);
            if s2 != s + page || t2 != t + page - 1 {
                return Err(format!(
                    "entry {idx}: bidegree mismatch: d{page} from ({s},{t}) should land \
                     at ({},{}) but {target} is at ({s2},{t2})",
                    s + page,
                    t + page - 1
                ));
            }
            Ok(Some(((s, t), (s2, t2))))
        };
        for (idx, le) in self.entries.iter().enumerate() {
            match &le.entry {
                Entry::Differential {
                    page,
                    source,
                    target,
                    ..
                } => {
                    if let Some((_, tgt)) = check_diff(idx, v1, *page, source, target)? {
                        killed.entry(tgt).or_default().push((idx, *page));
                    }
                }
                Entry::SphereDifferential {
                    page,
                    source,
                    target,
                } => {
                    check_diff(idx, sphere, *page, source, target)?;
                }
                Entry::Permanent { class } => {
                    let v = v1
                        .eval_expr(class)
                        .map_err(|e| format!("entry {idx}: {e}"))?;
                    if v.is_empty() {
                        return Err(format!(
                            "entry {idx}: permanent class {class} is zero in the chart"
                        ));
                    }
                    permanents.push((idx, (v[0].0.s, v[0].0.t)));
                }
                Entry::SphereDead { class, .. } => {
                    let v = sphere
                        .eval_expr(class)
                        .map_err(|e| format!("entry {idx}: {e}"))?;
                    if v.is_empty() {
                        return Err(format!(
                            "entry {idx}: sphere relation class {class} is zero already in E2"
                        ));
                    }
                }
                _ => {}
            }
        }
        // a class killed on two different pages in the same one-dimensional
        // group is contradictory
        for ((s, t), hits) in &killed {
            if v1.res.dim(*s, *t) == 1 && hits.len() > 1 {
                let pages: Vec<u32> = hits.iter().map(|(_, p)| *p).collect();
                let mut uniq = pages.clone();
                uniq.dedup();
                if uniq.len() > 1 {
                    return Err(format!(
                        "contradiction: the class at ({s},{t}) is killed on pages {:?}",
                        pages
                    ));
                }
            }
        }
        // permanent vs killed
        for (idx, cell) in &permanents {
            if let Some(hits) = killed.get(cell) {
                if v1.res.dim(cell.0, cell.1) == 1 {
                    return Err(format!(
                        "contradiction: entry {idx} declares ({},{}) permanent but entries \
                         {:?} kill it",
                        cell.0, cell.1, hits
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quoted_example() {
        let l = Ledger::parse("d6 v2^3*h0 -> b0^5 @V1 [Lemma 7.3]").unwrap();
        assert_eq!(l.entries.len(), 1);
        match &l.entries[0].entry {
            Entry::Differential {
                page,
                source,
                target,
                exact,
                ..
            } => {
                assert_eq!(*page, 6);
                assert_eq!(source, "v2^3 h0");
                assert_eq!(target, "b0^5");
                assert!(!exact);
            }
            other => panic!("wrong entry {other:?}"),
        }
        assert_eq!(l.entries[0].provenance, "Lemma 7.3");
    }

    #[test]
    fn parses_branch_and_assume() {
        let text = "
assume beta1-F [the beta1 F hypothesis is a homotopy-level input]
branch stem68 { d4 b0*v2^2*k0 -> v2 b0^5 h1 @V1 | d4 eta1*h1 -> v2 b0^4 h1 @V1 } [only one occurs]
";
        let l = Ledger::parse(text).unwrap();
        assert_eq!(l.entries.len(), 2);
        assert_eq!(l.assumptions().len(), 1);
        match &l.entries[1].entry {
            Entry::Disjunction { branches, .. } => assert_eq!(branches.len(), 2),
            other => panic!("wrong entry {other:?}"),
        }
    }

    #[test]
    fn reduction_lines() {
        let l = Ledger::parse(
            "reduction v3h1 : br = - g1 ; brr = eta1 [computer-assisted]",
        )
        .unwrap();
        match &l.entries[0].entry {
            Entry::Reduction { class, br, brr } => {
                assert_eq!(class, "v3h1");
                assert_eq!(br, "- g1");
                assert_eq!(brr, "eta1");
            }
            other => panic!("wrong entry {other:?}"),
        }
    }
}
