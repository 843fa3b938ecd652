use std::fmt::Write;

use crate::cube::{check_dim, Cube, Dnf};
use crate::error::{Error, Result};

/// Single-output PLA, cubes in DNF order.
pub fn emit_pla(d: &Dnf) -> String {
    let mut out = format!(".i {}\n.o 1\n.p {}\n", d.dim(), d.length());
    for c in d.cubes() {
        let _ = writeln!(out, "{c} 1");
    }
    out.push_str(".e\n");
    out
}

/// Reads what [`emit_pla`] writes. `#` lines are comments; `.p`, when
/// present, must match the number of cubes.
pub fn parse_pla(text: &str) -> Result<Dnf> {
    let mut n: Option<usize> = None;
    let mut declared: Option<(usize, usize)> = None;
    let mut cubes = Vec::new();
    let mut ended = false;
    let mut last = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let syntax = |message: String| Error::Syntax { line, message };
        if ended {
            return Err(syntax("text after .e".into()));
        }
        last = line;
        if let Some(rest) = body.strip_prefix('.') {
            let mut f = rest.split_whitespace();
            let key = f.next().unwrap_or("");
            let arg = f.next();
            let num = || -> Result<usize> {
                arg.and_then(|a| a.parse().ok())
                    .ok_or_else(|| syntax(format!("`.{key}` needs a count")))
            };
            match key {
                "i" => {
                    let v = num()?;
                    check_dim(v).map_err(|e| syntax(e.to_string()))?;
                    n = Some(v);
                }
                "o" if num()? == 1 => {}
                "o" => return Err(syntax("only single-output PLA is supported".into())),
                "p" => declared = Some((num()?, line)),
                "e" | "end" => ended = true,
                _ => return Err(syntax(format!("unsupported directive .{key}"))),
            }
            continue;
        }
        let Some(n) = n else {
            return Err(syntax("cube before .i".into()));
        };
        let (input, output) = match body.split_whitespace().collect::<Vec<_>>().as_slice() {
            [i, o] => (*i, *o),
            _ => return Err(syntax(format!("expected `<cube> 1`, got {body:?}"))),
        };
        if output != "1" {
            return Err(syntax(format!("output column must be 1, got {output:?}")));
        }
        if input.len() != n {
            return Err(Error::RaggedRow {
                line,
                expected: n,
                found: input.len(),
            });
        }
        cubes.push(Cube::parse(input).map_err(|e| syntax(e.to_string()))?);
    }
    let Some(n) = n else {
        return Err(Error::Syntax {
            line: last.max(1),
            message: "missing .i".into(),
        });
    };
    if let Some((p, line)) = declared {
        if p != cubes.len() {
            return Err(Error::Syntax {
                line,
                message: format!(".p says {p} cubes, found {}", cubes.len()),
            });
        }
    }
    Dnf::new(n, cubes)
}
