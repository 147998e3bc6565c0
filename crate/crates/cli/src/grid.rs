//! Parameter grid expressions: comma-separated values with `lo:hi` /
//! `lo:hi:step` ranges, e.g. `0:16`, `1,2`, `0:1:0.25`.

use crate::{CmdError, CmdResult};

pub fn parse_u32_grid(text: &str) -> CmdResult<Vec<u32>> {
    let mut out = Vec::new();
    for item in split_items(text)? {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(parse_u32(single)?),
            [lo, hi] => push_u32_range(&mut out, parse_u32(lo)?, parse_u32(hi)?, 1)?,
            [lo, hi, step] => {
                push_u32_range(&mut out, parse_u32(lo)?, parse_u32(hi)?, parse_u32(step)?)?
            }
            _ => return Err(CmdError::Usage(format!("bad grid item '{item}'"))),
        }
    }
    Ok(out)
}

pub fn parse_f64_grid(text: &str) -> CmdResult<Vec<f64>> {
    let mut out = Vec::new();
    for item in split_items(text)? {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(parse_f64(single)?),
            [lo, hi] => push_f64_range(&mut out, parse_f64(lo)?, parse_f64(hi)?, 1.0)?,
            [lo, hi, step] => {
                push_f64_range(&mut out, parse_f64(lo)?, parse_f64(hi)?, parse_f64(step)?)?
            }
            _ => return Err(CmdError::Usage(format!("bad grid item '{item}'"))),
        }
    }
    Ok(out)
}

fn split_items(text: &str) -> CmdResult<Vec<&str>> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CmdError::Usage(format!("empty grid expression '{text}'")));
    }
    Ok(items)
}

fn parse_u32(text: &str) -> CmdResult<u32> {
    text.trim()
        .parse()
        .map_err(|_| CmdError::Usage(format!("'{text}' is not a non-negative integer")))
}

fn parse_f64(text: &str) -> CmdResult<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| CmdError::Usage(format!("'{text}' is not a number")))?;
    if !v.is_finite() {
        return Err(CmdError::Usage(format!("'{text}' is not finite")));
    }
    Ok(v)
}

fn push_u32_range(out: &mut Vec<u32>, lo: u32, hi: u32, step: u32) -> CmdResult<()> {
    if step == 0 {
        return Err(CmdError::Usage("range step must be positive".to_string()));
    }
    if lo > hi {
        return Err(CmdError::Usage(format!("descending range {lo}:{hi}")));
    }
    let mut v = lo;
    loop {
        out.push(v);
        match v.checked_add(step) {
            Some(next) if next <= hi => v = next,
            _ => break,
        }
    }
    Ok(())
}

fn push_f64_range(out: &mut Vec<f64>, lo: f64, hi: f64, step: f64) -> CmdResult<()> {
    if step <= 0.0 {
        return Err(CmdError::Usage("range step must be positive".to_string()));
    }
    if lo > hi {
        return Err(CmdError::Usage(format!("descending range {lo}:{hi}")));
    }
    // Integer stepping avoids drift: lo + k*step, inclusive of hi within a
    // half-step tolerance.
    let mut k = 0u64;
    loop {
        let v = lo + k as f64 * step;
        if v > hi + step * 1e-9 {
            break;
        }
        out.push(v.min(hi));
        k += 1;
    }
    Ok(())
}

/// Nine significant digits, scientific notation; infinities print as `inf`.
pub fn sig9(value: f64) -> String {
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{value:.8e}")
}
