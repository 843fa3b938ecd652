use std::collections::BTreeSet;

use crate::cube::{check_dim, ZeroMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_EXPANSION_CAP: usize = 1 << 20;

/// A product of clauses set to zero. Literals are `(variable, positive)`
/// with 0-based variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NelsonCnf {
    pub n: usize,
    pub clauses: Vec<Vec<(usize, bool)>>,
}

impl NelsonCnf {
    /// DIMACS text: `c` comment lines, a `p cnf <n> <q>` header, then
    /// 0-terminated clauses of signed 1-based variables.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<(usize, bool)> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('c') || body.starts_with('%') {
                continue;
            }
            let syntax = |message: String| Error::Syntax { line, message };
            if body.starts_with('p') {
                if header.is_some() {
                    return Err(syntax("second problem line".into()));
                }
                let f: Vec<&str> = body.split_whitespace().collect();
                let (n, q) = match f.as_slice() {
                    ["p", "cnf", n, q] => (n.parse::<usize>(), q.parse::<usize>()),
                    _ => return Err(syntax(format!("expected `p cnf <vars> <clauses>`, got {body:?}"))),
                };
                let (Ok(n), Ok(q)) = (n, q) else {
                    return Err(syntax("bad counts in problem line".into()));
                };
                check_dim(n).map_err(|e| syntax(e.to_string()))?;
                header = Some((n, q));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(syntax("clause before the problem line".into()));
            };
            for tok in body.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| syntax(format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(syntax("empty clause".into()));
                    }
                    current.sort_unstable();
                    current.dedup();
                    if current.windows(2).any(|w| w[0].0 == w[1].0) {
                        return Err(syntax(format!("clause {} is a tautology", clauses.len() + 1)));
                    }
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let v = lit.unsigned_abs() as usize;
                if v > n {
                    return Err(syntax(format!("variable {v} out of range 1..={n}")));
                }
                current.push((v - 1, lit > 0));
            }
            last_line = line;
        }
        let Some((n, q)) = header else {
            return Err(Error::Syntax {
                line: 1,
                message: "missing problem line".into(),
            });
        };
        if !current.is_empty() {
            return Err(Error::Syntax {
                line: last_line,
                message: "last clause is not terminated by 0".into(),
            });
        }
        if clauses.len() != q {
            return Err(Error::Syntax {
                line: last_line.max(1),
                message: format!("header announces {q} clauses, found {}", clauses.len()),
            });
        }
        Ok(NelsonCnf { n, clauses })
    }

    /// The zeros of the product: every clause contributes the subcube of
    /// points falsifying it.
    pub fn zero_matrix(&self, cap: usize) -> Result<ZeroMatrix> {
        let n = self.n;
        let mut zeros = BTreeSet::new();
        for (ci, clause) in self.clauses.iter().enumerate() {
            let clause_no = ci + 1;
            let over = Error::ExpansionCap { clause: clause_no, cap };
            let free = n - clause.len();
            if free >= usize::BITS as usize - 1 || 1usize << free > cap {
                return Err(over);
            }
            let (mut fixed, mut value) = (0u64, 0u64);
            for &(v, positive) in clause {
                fixed |= 1 << v;
                if !positive {
                    value |= 1 << v;
                }
            }
            let free_mask = !fixed & crate::cube::full_mask(n);
            // all submasks of the free variables
            let mut sub = 0u64;
            loop {
                zeros.insert(value | sub);
                if zeros.len() > cap {
                    return Err(over);
                }
                sub = sub.wrapping_sub(free_mask) & free_mask;
                if sub == 0 {
                    break;
                }
            }
        }
        ZeroMatrix::from_bits(n, zeros.into_iter().collect())
    }
}

pub fn parse_nelson_cnf(text: &str, expansion_cap: usize) -> Result<ZeroMatrix> {
    NelsonCnf::parse(text)?.zero_matrix(expansion_cap)
}
