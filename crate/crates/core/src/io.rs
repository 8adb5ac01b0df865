//! Flat-file formats.
//!
//! Text: a header line `n <count>` followed by one `u v` line per directed
//! edge `u -> v`, 0-indexed. The line order is the canonical stream order.
//!
//! Binary: magic `TRNY`, little-endian `u32` vertex count, then the
//! row-major upper-triangle bitmap, least significant bit first. A set bit
//! orients the pair from the lower to the higher index.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::tournament::{pair_count, pair_index, Tournament};

pub const MAGIC: &[u8; 4] = b"TRNY";

/// A tournament together with the edge order its file listed.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub tournament: Tournament,
    /// Pair indices in file order.
    pub edge_order: Vec<usize>,
}

pub fn write_text(t: &Tournament, mut w: impl Write) -> Result<()> {
    writeln!(w, "n {}", t.n())?;
    for (u, v) in t.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_text(r: impl BufRead) -> Result<Ingested> {
    let mut lines = r.lines().enumerate();
    let n = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::Parse { line: 1, msg: "missing `n <count>` header".into() });
        };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next().map(str::parse::<usize>), parts.next()) {
            (Some("n"), Some(Ok(n)), None) => break n,
            _ => return Err(Error::Parse { line: i + 1, msg: format!("bad header `{line}`") }),
        }
    };
    let total = pair_count(n);
    let mut seen = vec![false; total];
    let mut bits = vec![0u64; total.div_ceil(64)];
    let mut edge_order = Vec::with_capacity(total);
    let mut last_line = 1;
    for (i, line) in lines {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        let mut parts = line.split_whitespace().map(str::parse::<usize>);
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => (u, v),
            _ => return Err(err(format!("expected `u v`, got `{line}`"))),
        };
        if u >= n || v >= n {
            return Err(err(format!("vertex out of range for n={n}")));
        }
        if u == v {
            return Err(err(format!("self loop on {u}")));
        }
        let idx = pair_index(n, u.min(v), u.max(v));
        if seen[idx] {
            return Err(err(format!("pair {{{u},{v}}} already oriented")));
        }
        seen[idx] = true;
        if u < v {
            bits[idx / 64] |= 1 << (idx % 64);
        }
        edge_order.push(idx);
    }
    if edge_order.len() != total {
        return Err(Error::Parse {
            line: last_line + 1,
            msg: format!("{} of {total} pairs missing", total - edge_order.len()),
        });
    }
    Ok(Ingested { tournament: Tournament::from_raw_bits(n, bits), edge_order })
}

pub fn write_binary(t: &Tournament, mut w: impl Write) -> Result<()> {
    let n = u32::try_from(t.n()).map_err(|_| Error::Format("n exceeds u32".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    let len = pair_count(t.n()).div_ceil(8);
    let bytes: Vec<u8> = t
        .raw_bits()
        .iter()
        .flat_map(|word| word.to_le_bytes())
        .take(len)
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<Tournament> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head).map_err(|_| Error::Format("truncated header".into()))?;
    if &head[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let n = u32::from_le_bytes(head[4..].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let total = pair_count(n);
    let want = total.div_ceil(8);
    if body.len() != want {
        return Err(Error::Format(format!("bitpack has {} bytes, expected {want}", body.len())));
    }
    let mut bits = vec![0u64; total.div_ceil(64)];
    for (i, &b) in body.iter().enumerate() {
        bits[i / 8] |= (b as u64) << (8 * (i % 8));
    }
    if !total.is_multiple_of(64) {
        if let Some(last) = bits.last_mut() {
            *last &= (1u64 << (total % 64)) - 1;
        }
    }
    Ok(Tournament::from_raw_bits(n, bits))
}

/// Reads either format, sniffing the binary magic.
pub fn read_path(path: impl AsRef<Path>) -> Result<Ingested> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        let tournament = read_binary(&bytes[..])?;
        let edge_order = (0..pair_count(tournament.n())).collect();
        Ok(Ingested { tournament, edge_order })
    } else {
        read_text(&bytes[..])
    }
}

pub fn write_permutation(pi: &Permutation, mut w: impl Write) -> Result<()> {
    let line: Vec<String> = pi.order().iter().map(|v| v.to_string()).collect();
    writeln!(w, "{}", line.join(" "))?;
    Ok(())
}
