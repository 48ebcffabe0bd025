//! Election file serialization: a line-oriented text format and an
//! equivalent JSON object format. Reading a written election reproduces it
//! bit-for-bit on the canonical form.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::election::{
    validate, DistrictProfile, Election, HarmoniousOrder, Ranking, RankingGroup,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    /// Infer from a file extension; `.json` is JSON, anything else text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Text,
        }
    }
}

pub fn read_election_file(path: &Path) -> Result<Election> {
    let file = std::fs::File::open(path)?;
    read_election(file, Format::from_path(path))
}

pub fn write_election_file(election: &Election, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_election(election, file, Format::from_path(path))
}

pub fn read_election(reader: impl Read, format: Format) -> Result<Election> {
    let election = match format {
        Format::Json => serde_json::from_reader(reader)
            .map_err(|e| Error::ParseError(format!("json: {e}")))?,
        Format::Text => parse_text(reader)?,
    };
    validate(&election)?;
    Ok(election)
}

pub fn write_election(
    election: &Election,
    mut writer: impl Write,
    format: Format,
) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut writer, election)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(writer)?;
        }
        Format::Text => write_text(election, writer)?,
    }
    Ok(())
}

fn write_text(election: &Election, mut w: impl Write) -> Result<()> {
    writeln!(
        w,
        "election m={} k={}",
        election.num_candidates,
        election.districts.len()
    )?;
    if let Some(order) = &election.harmonious_order {
        writeln!(w, "harmonious order={}", join(order.order()))?;
    }
    for d in &election.districts {
        writeln!(w, "district n={} counts={}", d.population, join(&d.top_counts))?;
        if let Some(order) = &d.harmonious_order {
            writeln!(w, "harmonious order={}", join(order.order()))?;
        }
        if let Some(rankings) = &d.rankings {
            for g in rankings {
                writeln!(w, "ranking mult={} order={}", g.mult, join(g.order.order()))?;
            }
        }
    }
    Ok(())
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

struct LineParser<'a> {
    line_no: usize,
    line: &'a str,
}

impl<'a> LineParser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::ParseError(format!("line {}: {msg}: `{}`", self.line_no, self.line))
    }

    /// Extracts the value of a `key=value` token.
    fn field(&self, token: Option<&'a str>, key: &str) -> Result<&'a str> {
        let token = token.ok_or_else(|| self.err(&format!("missing `{key}=`")))?;
        token
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| self.err(&format!("expected `{key}=<value>`")))
    }

    fn parse_int(&self, s: &str) -> Result<u64> {
        s.parse()
            .map_err(|_| self.err(&format!("`{s}` is not a non-negative integer")))
    }

    fn parse_list(&self, s: &str) -> Result<Vec<u64>> {
        s.split(',').map(|tok| self.parse_int(tok.trim())).collect()
    }
}

fn parse_text(reader: impl Read) -> Result<Election> {
    let reader = BufReader::new(reader);
    let mut election: Option<Election> = None;
    let mut expected_districts = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let p = LineParser { line_no: idx + 1, line: trimmed };
        let mut tokens = trimmed.split_whitespace();
        let keyword = tokens.next().unwrap_or_default();
        match keyword {
            "election" => {
                if election.is_some() {
                    return Err(p.err("duplicate `election` header"));
                }
                let m = p.parse_int(p.field(tokens.next(), "m")?)? as usize;
                expected_districts = p.parse_int(p.field(tokens.next(), "k")?)? as usize;
                election = Some(Election::new(m, Vec::new()));
            }
            "district" => {
                let e = election
                    .as_mut()
                    .ok_or_else(|| p.err("`district` before `election` header"))?;
                let population = p.parse_int(p.field(tokens.next(), "n")?)?;
                let counts = p.parse_list(p.field(tokens.next(), "counts")?)?;
                e.districts.push(DistrictProfile {
                    population,
                    top_counts: counts,
                    rankings: None,
                    harmonious_order: None,
                });
            }
            "harmonious" => {
                let e = election
                    .as_mut()
                    .ok_or_else(|| p.err("`harmonious` before `election` header"))?;
                let m = e.num_candidates;
                let values = p.parse_list(p.field(tokens.next(), "order")?)?;
                let order =
                    HarmoniousOrder::new(values.iter().map(|&v| v as u32).collect(), m)?;
                match e.districts.last_mut() {
                    // Before any district line: the election-level default.
                    None => e.harmonious_order = Some(order),
                    Some(d) => d.harmonious_order = Some(order),
                }
            }
            "ranking" => {
                let e = election
                    .as_mut()
                    .ok_or_else(|| p.err("`ranking` before `election` header"))?;
                let m = e.num_candidates;
                let mult = p.parse_int(p.field(tokens.next(), "mult")?)?;
                let values = p.parse_list(p.field(tokens.next(), "order")?)?;
                let order = Ranking::new(values.iter().map(|&v| v as u32).collect(), m)?;
                let d = e
                    .districts
                    .last_mut()
                    .ok_or_else(|| p.err("`ranking` before any `district` line"))?;
                d.rankings
                    .get_or_insert_with(Vec::new)
                    .push(RankingGroup { order, mult });
            }
            _ => return Err(p.err("unknown keyword")),
        }
    }

    let election =
        election.ok_or_else(|| Error::ParseError("empty input: no `election` header".into()))?;
    if election.districts.len() != expected_districts {
        return Err(Error::ParseError(format!(
            "header declares k={expected_districts} districts, found {}",
            election.districts.len()
        )));
    }
    Ok(election)
}
