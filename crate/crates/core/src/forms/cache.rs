//! On-disk coefficient cache and lambda export.
//!
//! ```text
//! CUSPSUM1 weight=12 level=1 nmax=4
//! 1,1
//! 2,-24
//! 3,252
//! 4,-1472
//! sha256=<hex digest of every byte above this line>
//! ```

use super::{Eigenform, IntegerSeries};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const MAGIC: &str = "CUSPSUM1";

pub fn cache_store(form: &Eigenform, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut hasher = Sha256::new();
    let mut emit = |line: String| -> Result<()> {
        hasher.update(line.as_bytes());
        out.write_all(line.as_bytes())?;
        Ok(())
    };
    emit(format!(
        "{MAGIC} weight={} level=1 nmax={}\n",
        form.weight(),
        form.n_max()
    ))?;
    for (n, c) in form.coefficients().coeffs().iter().enumerate().skip(1) {
        emit(format!("{n},{c}\n"))?;
    }
    let digest = hex::encode(hasher.finalize());
    writeln!(out, "sha256={digest}")?;
    out.flush()?;
    Ok(())
}

fn header_field<'a>(fields: &[&'a str], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::CacheFormat(format!("header lacks {key}")))
}

/// Load a cache file; `expected_weight` guards against mixing forms.
pub fn cache_load(path: &Path, expected_weight: Option<u32>) -> Result<Eigenform> {
    let reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut lines: Vec<String> = Vec::new();
    let mut digest: Option<String> = None;
    for line in reader.lines() {
        let line = line?;
        if digest.is_some() {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::CacheFormat("data after checksum line".into()));
        }
        if let Some(d) = line.strip_prefix("sha256=") {
            digest = Some(d.trim().to_string());
            continue;
        }
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        lines.push(line);
    }
    let digest = digest.ok_or(Error::Checksum)?;
    if hex::encode(hasher.finalize()) != digest {
        return Err(Error::Checksum);
    }

    let header = lines.first().ok_or_else(|| Error::CacheFormat("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let parse_u = |key: &str| -> Result<u64> {
        header_field(&fields, key)?
            .parse()
            .map_err(|_| Error::CacheFormat(format!("bad {key}")))
    };
    let weight = parse_u("weight")? as u32;
    let nmax = parse_u("nmax")? as usize;
    if parse_u("level")? != 1 {
        return Err(Error::CacheFormat("only level 1 is supported".into()));
    }
    if let Some(k) = expected_weight {
        if k != weight {
            return Err(Error::WeightMismatch {
                expected: k,
                found: weight,
            });
        }
    }
    if lines.len() != nmax + 1 {
        return Err(Error::CacheFormat(format!(
            "expected {nmax} coefficient lines, found {}",
            lines.len() - 1
        )));
    }
    let mut coeffs = Vec::with_capacity(nmax + 1);
    coeffs.push(BigInt::zero());
    for (i, line) in lines.iter().enumerate().skip(1) {
        let (n, c) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected n,a(n)".into() })?;
        if n.parse::<usize>().ok() != Some(i) {
            return Err(Error::Parse { line: i + 1, msg: format!("expected index {i}") });
        }
        let c: BigInt = c
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: "bad integer".into() })?;
        coeffs.push(c);
    }
    Eigenform::from_coefficients(weight, IntegerSeries::new(coeffs)?)
}

/// `n,lambda` rows with 17 significant digits.
pub fn write_lambda_csv<W: Write>(form: &Eigenform, out: &mut W) -> Result<()> {
    writeln!(out, "n,lambda")?;
    for (n, l) in form.lambda_table().iter().enumerate().skip(1) {
        writeln!(out, "{n},{l:.16e}")?;
    }
    Ok(())
}
