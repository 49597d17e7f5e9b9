//! Plain-text inequality file format.
//!
//! ```text
//! # comment
//! inequality CHSH
//! scenario 2 2
//! bound 0
//! c -1 0
//! e -1 0
//! d 1 1
//!   1 -1
//! end
//! ```
//!
//! `d` is followed by `nA - 1` continuation rows. Blocks may repeat; their
//! order is preserved.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{CgTable, Scenario};

#[derive(Default)]
struct Block {
    start: usize,
    name: Option<String>,
    scenario: Option<Scenario>,
    bound: Option<i64>,
    c: Option<Vec<i64>>,
    e: Option<Vec<i64>>,
    d: Option<Vec<Vec<i64>>>,
}

impl Block {
    fn finish(self, line: usize) -> Result<CgTable> {
        let missing = |what: &str| {
            Error::parse(
                line,
                format!("block starting at line {} has no `{what}` line", self.start),
            )
        };
        let scenario = self.scenario.ok_or_else(|| missing("scenario"))?;
        let bound = self.bound.ok_or_else(|| missing("bound"))?;
        let c = self.c.ok_or_else(|| missing("c"))?;
        let e = self.e.ok_or_else(|| missing("e"))?;
        let d = self.d.ok_or_else(|| missing("d"))?;
        if d.len() != scenario.n_a() {
            return Err(Error::parse(
                line,
                format!(
                    "`d` has {} rows, scenario {} needs {}",
                    d.len(),
                    scenario,
                    scenario.n_a()
                ),
            ));
        }
        let table = CgTable::new(scenario, d, c, e, bound)
            .map_err(|err| Error::parse(line, err.to_string()))?;
        Ok(match self.name {
            Some(n) => table.with_name(n),
            None => table,
        })
    }
}

fn integers(line: usize, fields: &[&str]) -> Result<Vec<i64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<i64>()
                .map_err(|_| Error::parse(line, format!("non-integer coefficient `{f}`")))
        })
        .collect()
}

fn expect_len(line: usize, key: &str, values: &[i64], want: usize) -> Result<()> {
    if values.len() != want {
        return Err(Error::parse(
            line,
            format!("`{key}` has {} entries, expected {want}", values.len()),
        ));
    }
    Ok(())
}

/// Parses every inequality block in `text`, in file order.
pub fn parse_file(text: &str) -> Result<Vec<CgTable>> {
    let mut tables = Vec::new();
    let mut block: Option<Block> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let key = fields[0];

        let Some(cur) = block.as_mut() else {
            if key != "inequality" {
                return Err(Error::parse(
                    line,
                    format!("expected `inequality`, found `{key}`"),
                ));
            }
            let name = content["inequality".len()..].trim();
            block = Some(Block {
                start: line,
                name: (!name.is_empty()).then(|| name.to_string()),
                ..Block::default()
            });
            continue;
        };

        // Continuation rows of `d` start with an integer rather than a keyword.
        let is_number = key.parse::<i64>().is_ok() || key.parse::<f64>().is_ok();
        if is_number {
            let (Some(scenario), Some(d)) = (cur.scenario, cur.d.as_mut()) else {
                return Err(Error::parse(
                    line,
                    "coefficient row outside of a `d` section",
                ));
            };
            if d.len() >= scenario.n_a() {
                return Err(Error::parse(
                    line,
                    format!("`d` has more than {} rows", scenario.n_a()),
                ));
            }
            let row = integers(line, &fields)?;
            expect_len(line, "d", &row, scenario.n_b())?;
            d.push(row);
            continue;
        }

        let args = &fields[1..];
        match key {
            "end" => {
                if !args.is_empty() {
                    return Err(Error::parse(line, "unexpected tokens after `end`"));
                }
                let done = block.take().expect("block in progress");
                tables.push(done.finish(line)?);
            }
            "inequality" => {
                return Err(Error::parse(line, "nested `inequality` before `end`"));
            }
            "scenario" => {
                if cur.scenario.is_some() {
                    return Err(Error::parse(line, "duplicate `scenario`"));
                }
                if args.len() != 2 {
                    return Err(Error::parse(line, "`scenario` needs two setting counts"));
                }
                let counts: Vec<usize> = args
                    .iter()
                    .map(|a| {
                        a.parse::<usize>()
                            .map_err(|_| Error::parse(line, format!("invalid setting count `{a}`")))
                    })
                    .collect::<Result<_>>()?;
                cur.scenario = Some(
                    Scenario::new(counts[0], counts[1])
                        .map_err(|e| Error::parse(line, e.to_string()))?,
                );
            }
            "bound" | "c" | "e" | "d" => {
                let Some(scenario) = cur.scenario else {
                    return Err(Error::parse(line, format!("`{key}` before `scenario`")));
                };
                let values = integers(line, args)?;
                match key {
                    "bound" => {
                        if cur.bound.is_some() {
                            return Err(Error::parse(line, "duplicate `bound`"));
                        }
                        expect_len(line, "bound", &values, 1)?;
                        cur.bound = Some(values[0]);
                    }
                    "c" => {
                        if cur.c.is_some() {
                            return Err(Error::parse(line, "duplicate `c`"));
                        }
                        expect_len(line, "c", &values, scenario.n_a())?;
                        cur.c = Some(values);
                    }
                    "e" => {
                        if cur.e.is_some() {
                            return Err(Error::parse(line, "duplicate `e`"));
                        }
                        expect_len(line, "e", &values, scenario.n_b())?;
                        cur.e = Some(values);
                    }
                    _ => {
                        if cur.d.is_some() {
                            return Err(Error::parse(line, "duplicate `d`"));
                        }
                        expect_len(line, "d", &values, scenario.n_b())?;
                        cur.d = Some(vec![values]);
                    }
                }
            }
            other => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
        }
    }

    if let Some(open) = block {
        let last = text.lines().count();
        return Err(Error::parse(
            last,
            format!("block starting at line {} is missing `end`", open.start),
        ));
    }
    Ok(tables)
}

fn join(values: &[i64]) -> String {
    values
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes one block.
pub fn serialize_table(out: &mut String, table: &CgTable) {
    let s = table.scenario();
    match table.name() {
        Some(name) => writeln!(out, "inequality {name}"),
        None => writeln!(out, "inequality"),
    }
    .unwrap();
    writeln!(out, "scenario {} {}", s.n_a(), s.n_b()).unwrap();
    writeln!(out, "bound {}", table.bound()).unwrap();
    writeln!(out, "c {}", join(table.c())).unwrap();
    writeln!(out, "e {}", join(table.e())).unwrap();
    for (x, row) in table.d().iter().enumerate() {
        let lead = if x == 0 { "d " } else { "  " };
        writeln!(out, "{lead}{}", join(row)).unwrap();
    }
    writeln!(out, "end").unwrap();
}

pub fn serialize_file(tables: &[CgTable]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        serialize_table(&mut out, t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const CHSH_BLOCK: &str =
        "inequality CHSH\nscenario 2 2\nbound 0\nc -1 0\ne -1 0\nd 1 1\n1 -1\nend\n";

    #[test]
    fn parses_chsh_block() {
        let tables = parse_file(CHSH_BLOCK).unwrap();
        assert_eq!(tables, vec![fixtures::chsh()]);
    }

    #[test]
    fn empty_input() {
        assert!(parse_file("").unwrap().is_empty());
        assert!(parse_file("# only a comment\n\n").unwrap().is_empty());
        assert_eq!(serialize_file(&[]), "");
    }

    #[test]
    fn wrong_c_length_names_line() {
        let text = CHSH_BLOCK.replace("c -1 0", "c -1 0 0");
        match parse_file(&text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("`c`"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_integer_rejected() {
        let text = CHSH_BLOCK.replace("e -1 0", "e -1 0.5");
        assert!(matches!(
            parse_file(&text),
            Err(Error::Parse { line: 5, .. })
        ));
    }

    #[test]
    fn missing_end_and_missing_rows() {
        let text = CHSH_BLOCK.replace("end\n", "");
        assert!(matches!(parse_file(&text), Err(Error::Parse { .. })));
        let text = CHSH_BLOCK.replace("1 -1\n", "");
        assert!(matches!(
            parse_file(&text),
            Err(Error::Parse { line: 7, .. })
        ));
    }

    #[test]
    fn comments_and_indentation() {
        let text = "# header\ninequality CHSH  # trailing\n  scenario 2 2\n bound 0\nc -1 0\ne -1 0\nd 1 1\n   1 -1\nend\n";
        assert_eq!(parse_file(text).unwrap(), vec![fixtures::chsh()]);
    }

    #[test]
    fn two_blocks_in_order() {
        let tables = vec![fixtures::chsh(), fixtures::i3322()];
        let text = serialize_file(&tables);
        assert_eq!(text.matches("inequality").count(), 2);
        assert_eq!(parse_file(&text).unwrap(), tables);
    }

    #[test]
    fn unnamed_table_round_trips() {
        let t = fixtures::chsh().without_name();
        assert_eq!(
            parse_file(&serialize_file(std::slice::from_ref(&t))).unwrap(),
            vec![t]
        );
    }
}
