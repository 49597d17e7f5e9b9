//! Canonical forms and equivalence classes of an inequality list.

use std::collections::HashMap;
use std::fmt::Write as _;

use bellcg::format::serialize_table;
use bellcg::localpoly::detect_lifting;
use bellcg::symmetry::canonical_form;
use bellcg::CgTable;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct CanonEntry {
    pub index: usize,
    pub name: String,
    pub canonical: CgTable,
    pub lifted_from: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonResult {
    pub entries: Vec<CanonEntry>,
    /// Indices into `entries` of mutually equivalent inequalities, ordered
    /// by first appearance.
    pub groups: Vec<Vec<usize>>,
}

pub fn canon(tables: &[CgTable]) -> CanonResult {
    let entries: Vec<CanonEntry> = tables
        .par_iter()
        .enumerate()
        .map(|(i, t)| CanonEntry {
            index: i + 1,
            name: t
                .name()
                .map(str::to_string)
                .unwrap_or_else(|| format!("#{}", i + 1)),
            canonical: canonical_form(t),
            lifted_from: detect_lifting(t).map(|l| l.reduced.scenario().to_string()),
        })
        .collect();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<&CgTable, usize> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        match seen.get(&e.canonical) {
            Some(&g) => groups[g].push(i),
            None => {
                seen.insert(&e.canonical, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    CanonResult { entries, groups }
}

impl CanonResult {
    /// Canonical tables in the inequality file format, followed by the
    /// grouping as comment lines so the output parses as an inequality file.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            serialize_table(&mut out, &e.canonical.clone().with_name(e.name.clone()));
        }
        if !self.entries.is_empty() {
            out.push('\n');
        }
        for (g, members) in self.groups.iter().enumerate() {
            let names: Vec<&str> = members
                .iter()
                .map(|&i| self.entries[i].name.as_str())
                .collect();
            writeln!(
                out,
                "# group {} ({}): {}",
                g + 1,
                members.len(),
                names.join(", ")
            )
            .unwrap();
        }
        for e in self.entries.iter().filter(|e| e.lifted_from.is_some()) {
            writeln!(
                out,
                "# lifted: {} from {}",
                e.name,
                e.lifted_from.as_deref().unwrap_or_default()
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellcg::fixtures;
    use bellcg::symmetry::{apply_relabeling, Relabeling};
    use bellcg::Scenario;

    #[test]
    fn flipped_chsh_groups_with_chsh() {
        let t = fixtures::chsh();
        let flipped = apply_relabeling(&t, &Relabeling::flip_bob(t.scenario(), 1))
            .unwrap()
            .with_name("CHSH_flipped");
        let r = canon(&[t, flipped]);
        assert_eq!(r.groups, vec![vec![0, 1]]);
        assert!(r.render().contains("# group 1 (2): CHSH, CHSH_flipped"));
    }

    #[test]
    fn fixtures_are_singletons() {
        let r = canon(&fixtures::all());
        assert_eq!(r.groups.len(), 5);
        assert!(r.groups.iter().all(|g| g.len() == 1));
        let reparsed = bellcg::format::parse_file(&r.render()).unwrap();
        assert_eq!(reparsed.len(), 5);
    }

    #[test]
    fn lifted_i3322_is_flagged() {
        let lifted = fixtures::i3322()
            .embed(Scenario::new(4, 4).unwrap())
            .unwrap();
        let r = canon(&[lifted]);
        assert_eq!(r.entries[0].lifted_from.as_deref(), Some("3x3"));
        assert!(r.render().contains("# lifted: I3322 from 3x3"));
    }

    #[test]
    fn empty_input() {
        let r = canon(&[]);
        assert!(r.groups.is_empty());
        assert_eq!(r.render(), "");
    }
}
