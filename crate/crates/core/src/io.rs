//! Text formats: filtration files, op scripts, point CSVs and vineyard output.
//!
//! Filtration lines are `i v0 .. vk` (add) or `d v0 .. vk` (delete); script
//! lines are `<code> P [v0 .. vk]`. In both, `#` starts a comment and blank
//! lines are skipped. Errors carry 1-based source line numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::chains::Simplex;
use crate::dpc::{Trajectories, Vineyard};
use crate::error::{Error, Result};
use crate::filtration::{Dir, ZigzagFiltration};
use crate::ops::Op;

fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn simplex_at(line: usize, text: &str) -> Result<Simplex> {
    Simplex::parse(text).map_err(|e| Error::Parse { line, msg: strip(e) })
}

fn strip(e: Error) -> String {
    match e {
        Error::Contract(m) | Error::Invalid(m) => m,
        e => e.to_string(),
    }
}

/// Parses without validating; also returns the source line of every step.
pub fn parse_filtration_unchecked(text: &str) -> Result<(ZigzagFiltration, Vec<usize>)> {
    let mut f = ZigzagFiltration::new();
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let dir = match tag {
            "i" => Dir::Add,
            "d" => Dir::Delete,
            _ => return Err(Error::Parse { line: n + 1, msg: format!("expected `i` or `d`, found `{tag}`") }),
        };
        f.push(dir, simplex_at(n + 1, rest)?);
        lines.push(n + 1);
    }
    Ok((f, lines))
}

/// Parses and validates. A validation failure names the line of the first
/// offending step; a complex left non-empty points one past the last line.
pub fn parse_filtration(text: &str) -> Result<ZigzagFiltration> {
    let (f, lines) = parse_filtration_unchecked(text)?;
    if let Err(v) = f.validate() {
        let first = &v[0];
        let line = lines.get(first.pos).copied().unwrap_or(text.lines().count() + 1);
        let msg = match &first.simplex {
            Some(s) => format!("{} ({s})", first.rule),
            None => first.rule.to_string(),
        };
        return Err(Error::Parse { line, msg });
    }
    Ok(f)
}

pub fn format_filtration(f: &ZigzagFiltration) -> String {
    let mut out = String::new();
    for s in f.steps() {
        let tag = if s.dir == Dir::Add { 'i' } else { 'd' };
        let _ = writeln!(out, "{tag} {}", s.simplex);
    }
    out
}

pub fn parse_script(text: &str) -> Result<Vec<Op>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: n + 1, msg };
        let mut toks = line.split_whitespace();
        let code = toks.next().expect("non-empty");
        let p: usize = toks
            .next()
            .ok_or_else(|| bad(format!("`{code}` needs a position")))?
            .parse()
            .map_err(|_| bad("position must be a non-negative integer".into()))?;
        let rest: Vec<&str> = toks.collect();
        let expansion = matches!(code, "oe" | "ie");
        if expansion == rest.is_empty() {
            let want = if expansion { "a simplex after the position" } else { "nothing after the position" };
            return Err(bad(format!("`{code}` takes {want}")));
        }
        let op = match code {
            "fs" => Op::ForwardSwitch(p),
            "bs" => Op::BackwardSwitch(p),
            "os" => Op::OutwardSwitch(p),
            "is" => Op::InwardSwitch(p),
            "oc" => Op::OutwardContraction(p),
            "ic" => Op::InwardContraction(p),
            "oe" => Op::OutwardExpansion(p, simplex_at(n + 1, &rest.join(" "))?),
            "ie" => Op::InwardExpansion(p, simplex_at(n + 1, &rest.join(" "))?),
            _ => return Err(bad(format!("unknown op `{code}`"))),
        };
        out.push(op);
    }
    Ok(out)
}

pub fn format_script(script: &[Op]) -> String {
    script.iter().map(|op| format!("{op}\n")).collect()
}

/// Reads `t,id,x,y[,z]` rows. Times must run `0..=s` and every point must
/// appear exactly once at every time.
pub fn parse_points(text: &str) -> Result<Trajectories> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let dims = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["t", "id", "x", "y"] => 2,
        ["t", "id", "x", "y", "z"] => 3,
        [] => return Ok(Trajectories { ids: Vec::new(), samples: Vec::new() }),
        _ => return Err(Error::Parse { line: 1, msg: format!("header must be `t,id,x,y[,z]`, found `{}`", header.join(",")) }),
    };
    let mut rows: BTreeMap<(usize, u32), ([f64; 3], usize)> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |msg: String| Error::Parse { line, msg };
        if rec.len() != dims + 2 {
            return Err(bad(format!("expected {} fields, found {}", dims + 2, rec.len())));
        }
        let t: usize = rec[0].parse().map_err(|_| bad(format!("time `{}` is not a non-negative integer", &rec[0])))?;
        let id: u32 = rec[1].parse().map_err(|_| bad(format!("id `{}` is not a non-negative integer", &rec[1])))?;
        let mut p = [0.0; 3];
        for k in 0..dims {
            let v: f64 = rec[k + 2].parse().map_err(|_| bad(format!("coordinate `{}` is not a number", &rec[k + 2])))?;
            if !v.is_finite() {
                return Err(bad(format!("coordinate `{}` is not finite", &rec[k + 2])));
            }
            p[k] = v;
        }
        if rows.insert((t, id), (p, line)).is_some() {
            return Err(bad(format!("point {id} appears twice at time {t}")));
        }
    }
    let Some(&(s, _)) = rows.keys().next_back() else {
        return Ok(Trajectories { ids: Vec::new(), samples: Vec::new() });
    };
    let ids: Vec<u32> = {
        let mut v: Vec<u32> = rows.keys().map(|k| k.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut samples = Vec::with_capacity(s + 1);
    for t in 0..=s {
        let mut row = Vec::with_capacity(ids.len());
        for &id in &ids {
            let (p, _) = rows.get(&(t, id)).ok_or_else(|| Error::Invalid(format!("point {id} is missing at time {t}")))?;
            row.push(*p);
        }
        samples.push(row);
    }
    Ok(Trajectories { ids, samples })
}

pub fn format_points(tr: &Trajectories) -> String {
    let mut out = String::from("t,id,x,y,z\n");
    for (t, row) in tr.samples.iter().enumerate() {
        for (id, p) in tr.ids.iter().zip(row) {
            let _ = writeln!(out, "{t},{id},{},{},{}", p[0], p[1], p[2]);
        }
    }
    out
}

/// Per band a header line, then `dim birth death vine_id` sorted.
pub fn format_vineyard(v: &Vineyard) -> String {
    let mut out = String::new();
    for (k, b) in v.bands.iter().enumerate() {
        let _ = writeln!(out, "band {k} delta_hi {} delta_lo {}", b.delta_hi, b.delta_lo);
        let mut bars = b.bars.clone();
        bars.sort_unstable();
        for (iv, id) in bars {
            let _ = writeln!(out, "{} {} {} {id}", iv.dim, iv.birth, iv.death);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: &str = "# F_tri\ni 0\ni 1\ni 0 1\n\nd 0 1  # gone\nd 1\nd 0\n";

    #[test]
    fn filtration_round_trip() {
        let f = parse_filtration(TRI).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(parse_filtration(&format_filtration(&f)).unwrap(), f);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse_filtration("i 0\nx 1\n"), Err(Error::Parse { line: 2, msg: "expected `i` or `d`, found `x`".into() }));
        assert!(matches!(parse_filtration("i 0\n\ni 0 1\nd 0 1\nd 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_filtration("i 0\ni 1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_filtration("i 0\n# end\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_filtration("").unwrap().is_empty());
    }

    #[test]
    fn script_round_trip() {
        let text = "fs 0\nbs 1\nos 2\nis 3\noe 4 0 1\nie 5 2\noc 6\nic 7\n";
        let s = parse_script(text).unwrap();
        assert_eq!(format_script(&s), text);
        assert!(matches!(parse_script("fs 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_script("\nie 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_script("zz 3\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn points() {
        let tr = parse_points("t,id,x,y\n0,5,0,0\n0,2,1,0\n1,2,1,1\n1,5,0,1\n").unwrap();
        assert_eq!(tr.ids, vec![2, 5]);
        assert_eq!(tr.samples[1][0], [1.0, 1.0, 0.0]);
        assert_eq!(parse_points(&format_points(&tr)).unwrap(), tr);
        assert!(parse_points("t,id,x,y\n0,1,0,0\n1,2,0,0\n").is_err());
        assert!(matches!(parse_points("t,id,x,y\n0,1,0,0\n0,1,0,0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_points("").unwrap().ids.is_empty());
    }
}
