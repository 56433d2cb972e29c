//! Text formats for spectra.
//!
//! * newline-separated decimals, one probability per line;
//! * CSV rows `index,probability`, with an optional header line;
//! * a single comma-separated line (`0.5,0.3,0.2`);
//! * the families `geometric q=<q>` and `gibbs N=<N>`.
//!
//! Blank lines and lines starting with `#` are ignored. Finite spectra are
//! written with shortest round-trip formatting, so parsing the output of
//! [`to_text`] or [`to_csv`] gives back an equal spectrum.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::spectrum::{canonicalize, Spectrum, Tolerance};

fn parse_number(token: &str) -> Result<f64> {
    let token = token.trim();
    token.parse::<f64>().map_err(|_| Error::Parse(format!("`{token}` is not a number")))
}

/// `geometric q=<q>` or `gibbs N=<N>`; `None` if `text` names neither family.
fn parse_family(text: &str, tol: Tolerance) -> Option<Result<Spectrum>> {
    let text = text.trim();
    let (name, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let family = name.to_ascii_lowercase();
    let key = match family.as_str() {
        "geometric" => "q",
        "gibbs" => "n",
        _ => return None,
    };
    let parsed = (|| {
        let (k, v) =
            rest.trim().split_once('=').ok_or_else(|| Error::Parse(format!("expected `{name} {key}=<value>`")))?;
        if !k.trim().eq_ignore_ascii_case(key) {
            return Err(Error::Parse(format!("expected `{name} {key}=<value>`")));
        }
        let value = parse_number(v)?;
        let s = if key == "q" { Spectrum::geometric(value)? } else { GibbsParams::new(value)?.spectrum() };
        Ok(s.with_tolerance(tol))
    })();
    Some(parsed)
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

/// Parses any supported format.
pub fn parse_spectrum(text: &str, tol: Tolerance) -> Result<Spectrum> {
    if let Some(family) = parse_family(text, tol) {
        return family;
    }
    let lines = data_lines(text);
    if lines.is_empty() {
        return Err(Error::Empty);
    }
    let values = if lines.len() == 1 {
        lines[0].split(',').map(parse_number).collect::<Result<Vec<_>>>()?
    } else if lines.iter().any(|l| l.contains(',')) {
        parse_csv_rows(&lines)?
    } else {
        lines.iter().map(|l| parse_number(l)).collect::<Result<Vec<_>>>()?
    };
    canonicalize(&values, tol)
}

fn parse_csv_rows(lines: &[&str]) -> Result<Vec<f64>> {
    let mut rows = lines;
    let first: Vec<&str> = lines[0].split(',').collect();
    if first.len() == 2 && first.iter().any(|f| f.trim().parse::<f64>().is_err()) {
        rows = &lines[1..];
    }
    let mut values = Vec::with_capacity(rows.len());
    for (line_no, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("row {}: expected `index,probability`", line_no + 1)));
        }
        fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("row {}: bad index `{}`", line_no + 1, fields[0].trim())))?;
        values.push(parse_number(fields[1])?);
    }
    Ok(values)
}

/// A CLI spectrum argument: a family name, an existing file, or an inline list.
pub fn parse_source(arg: &str, tol: Tolerance) -> Result<Spectrum> {
    if let Some(family) = parse_family(arg, tol) {
        return family;
    }
    let path = Path::new(arg.trim());
    if path.is_file() {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        return parse_spectrum(&text, tol);
    }
    parse_spectrum(arg, tol)
}

/// Newline-separated form, or the family line for geometric spectra.
pub fn to_text(s: &Spectrum) -> String {
    match (s.entries(), s.ratio()) {
        (Some(p), _) => p.iter().map(|x| format!("{x}\n")).collect(),
        (_, Some(q)) => format!("geometric q={q}\n"),
        (None, None) => unreachable!("spectrum is finite or geometric"),
    }
}

/// CSV form with an `index,probability` header, 1-based indices.
pub fn to_csv(s: &Spectrum) -> String {
    match s.entries() {
        Some(p) => {
            let mut out = String::from("index,probability\n");
            for (i, x) in p.iter().enumerate() {
                out.push_str(&format!("{},{x}\n", i + 1));
            }
            out
        }
        None => to_text(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance::DEFAULT;

    #[test]
    fn parses_all_formats() {
        let expected = Spectrum::finite(&[0.5, 0.3, 0.2]).unwrap();
        assert_eq!(parse_spectrum("0.3,0.5,0.2", TOL).unwrap(), expected);
        assert_eq!(parse_spectrum("0.5\n0.3\n\n# note\n0.2\n", TOL).unwrap(), expected);
        assert_eq!(parse_spectrum("index,probability\n1,0.5\n2,0.3\n3,0.2\n", TOL).unwrap(), expected);
        assert_eq!(parse_spectrum("1,0.5\n2,0.3\n3,0.2", TOL).unwrap(), expected);
        assert_eq!(parse_spectrum("gibbs N=1", TOL).unwrap().ratio(), Some(0.5));
        assert_eq!(parse_spectrum("geometric q=0.25", TOL).unwrap().ratio(), Some(0.25));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_spectrum("0.5,0.4", TOL).is_err());
        assert!(parse_spectrum("", TOL).is_err());
        assert!(parse_spectrum("0.5,abc", TOL).is_err());
        assert!(parse_spectrum("gibbs q=1", TOL).is_err());
        assert!(parse_spectrum("geometric q=1.5", TOL).is_err());
        assert!(parse_spectrum("x,0.5\n2,0.5\n3,0", TOL).is_err());
    }

    #[test]
    fn round_trips() {
        let s = Spectrum::finite(&[0.1, 0.2, 0.7]).unwrap();
        assert_eq!(parse_spectrum(&to_text(&s), TOL).unwrap(), s);
        assert_eq!(parse_spectrum(&to_csv(&s), TOL).unwrap(), s);
        let g = GibbsParams::new(10.0).unwrap().spectrum();
        assert_eq!(parse_spectrum(&to_text(&g), TOL).unwrap(), g);
    }

    #[test]
    fn source_reads_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.txt");
        std::fs::write(&path, "0.6\n0.4\n").unwrap();
        let s = parse_source(path.to_str().unwrap(), TOL).unwrap();
        assert_eq!(s.entries().unwrap(), &[0.6, 0.4]);
    }
}
