//! Plain-text vector files: one value per line, with an optional
//! `# n=<int> d=<int> nk=<comma list>` header.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorHeader {
    pub n: usize,
    pub d: usize,
    pub nk: Vec<usize>,
}

impl VectorHeader {
    pub fn for_sizes(nk: &[usize]) -> Self {
        Self {
            n: nk.iter().product(),
            d: nk.len(),
            nk: nk.to_vec(),
        }
    }
}

impl std::fmt::Display for VectorHeader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let nk: Vec<String> = self.nk.iter().map(usize::to_string).collect();
        write!(f, "# n={} d={} nk={}", self.n, self.d, nk.join(","))
    }
}

fn parse_header(line: usize, text: &str) -> Result<VectorHeader> {
    let err = |message: String| Error::Parse { line, message };
    let (mut n, mut d, mut nk) = (None, None, None);
    for field in text.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("malformed header field `{field}`")))?;
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad integer `{s}` in header")))
        };
        match key {
            "n" => n = Some(int(value)?),
            "d" => d = Some(int(value)?),
            "nk" => nk = Some(value.split(',').map(int).collect::<Result<Vec<_>>>()?),
            _ => return Err(err(format!("unknown header key `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| err("header lacks n".into()))?;
    let nk = nk.unwrap_or_else(|| vec![n]);
    let d = d.unwrap_or(nk.len());
    if d != nk.len() || nk.iter().product::<usize>() != n {
        return Err(err(format!("inconsistent header n={n} d={d} nk={nk:?}")));
    }
    Ok(VectorHeader { n, d, nk })
}

/// Reads a vector file. Blank lines are skipped; a `#` line carrying `n=`
/// is parsed as the header, other `#` lines are comments.
pub fn read_vector<R: BufRead>(reader: R) -> Result<(Vec<f64>, Option<VectorHeader>)> {
    let mut values = Vec::new();
    let mut header = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if rest.contains("n=") && header.is_none() && values.is_empty() {
                header = Some(parse_header(idx + 1, rest)?);
            }
            continue;
        }
        let v = t.parse::<f64>().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("not a number: `{t}`"),
        })?;
        values.push(v);
    }
    if let Some(h) = &header {
        if h.n != values.len() {
            return Err(Error::LengthMismatch {
                expected: h.n,
                got: values.len(),
            });
        }
    }
    Ok((values, header))
}

pub fn read_vector_file(path: &std::path::Path) -> Result<(Vec<f64>, Option<VectorHeader>)> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_vector(std::io::BufReader::new(file))
}

/// Writes one value per line using the shortest round-trip representation.
pub fn write_vector<W: Write>(
    mut w: W,
    values: &[f64],
    header: Option<&VectorHeader>,
) -> Result<()> {
    if let Some(h) = header {
        writeln!(w, "{h}")?;
    }
    for v in values {
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_header_and_values() {
        let text = "# n=4 d=2 nk=2,2\n0.1\n0.2\n\n0.3\n0.4\n";
        let (v, h) = read_vector(text.as_bytes()).unwrap();
        assert_eq!(v, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(h, Some(VectorHeader::for_sizes(&[2, 2])));
    }

    #[test]
    fn header_must_match_length() {
        let r = read_vector("# n=3\n1\n2\n".as_bytes());
        assert!(matches!(
            r,
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn bad_value_reports_line() {
        let r = read_vector("1.0\nabc\n".as_bytes());
        assert!(matches!(r, Err(Error::Parse { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(
            values in prop::collection::vec(-1e300f64..1e300, 1..50)
        ) {
            let h = VectorHeader::for_sizes(&[values.len()]);
            let mut buf = Vec::new();
            write_vector(&mut buf, &values, Some(&h)).unwrap();
            let (back, hb) = read_vector(buf.as_slice()).unwrap();
            prop_assert_eq!(back, values);
            prop_assert_eq!(hb, Some(h));
        }
    }
}
