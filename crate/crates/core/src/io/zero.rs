use std::collections::HashMap;

use crate::cube::{check_dim, ZeroMatrix};
use crate::error::{Error, Result};

/// One row of `0`/`1` per line. `#` starts a comment and blank lines are
/// skipped. A comment of the form `# n=<N>` fixes the dimension, which is
/// how a matrix with no rows is written.
pub fn parse_zero_matrix(text: &str) -> Result<ZeroMatrix> {
    let mut n: Option<(usize, usize)> = None;
    let mut declared: Option<(usize, usize)> = None;
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(d) = comment.and_then(|c| c.trim().strip_prefix("n=")) {
            let d: usize = d.trim().parse().map_err(|_| Error::Syntax {
                line,
                message: format!("bad dimension {d:?}"),
            })?;
            declared = Some((d, line));
        }
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let mut bits = 0u64;
        for (j, c) in body.chars().enumerate() {
            match c {
                '0' => {}
                '1' if j < 64 => bits |= 1 << j,
                '1' => {}
                _ => {
                    return Err(Error::Syntax {
                        line,
                        message: format!("unexpected character {c:?}"),
                    })
                }
            }
        }
        let width = body.len();
        match n {
            None => {
                check_dim(width).map_err(|e| Error::Syntax {
                    line,
                    message: e.to_string(),
                })?;
                n = Some((width, line));
            }
            Some((w, _)) if w != width => {
                return Err(Error::RaggedRow {
                    line,
                    expected: w,
                    found: width,
                })
            }
            Some(_) => {}
        }
        if let Some(&first) = seen.get(&bits) {
            return Err(Error::DuplicateRow { first, second: line });
        }
        seen.insert(bits, line);
        rows.push(bits);
    }
    let n = match (n, declared) {
        (Some((w, _)), Some((d, line))) if w != d => {
            return Err(Error::RaggedRow {
                line,
                expected: d,
                found: w,
            })
        }
        (Some((w, _)), _) => w,
        (None, Some((d, line))) => {
            check_dim(d).map_err(|e| Error::Syntax {
                line,
                message: e.to_string(),
            })?;
            d
        }
        (None, None) => {
            return Err(Error::Syntax {
                line: text.lines().count().max(1),
                message: "no rows and no `# n=` line".into(),
            })
        }
    };
    ZeroMatrix::from_bits(n, rows)
}

/// Canonical text for `m`; rows in canonical order. A matrix without rows is
/// written as its `# n=` line only.
pub fn emit_zero_matrix(m: &ZeroMatrix) -> String {
    if m.k() == 0 {
        return format!("# n={}\n", m.n());
    }
    let mut out = String::with_capacity(m.k() * (m.n() + 1));
    for row in m.rows() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}
