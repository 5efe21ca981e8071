//! Loop-word text format: `@(x,y,...) +1 +2 -1 -2`, components separated by `;`.

use std::fmt;

use crate::error::ParseError;
use crate::lattice::{Loop, Path, Vertex};
use crate::sequence::LoopSequence;

pub(crate) fn write_loop(f: &mut fmt::Formatter<'_>, l: &Loop) -> fmt::Result {
    match l.base() {
        None => write!(f, "null"),
        Some(b) => {
            write!(f, "@{b}")?;
            for s in l.steps() {
                write!(f, " {s:+}")?;
            }
            Ok(())
        }
    }
}

pub fn format_loop(l: &Loop) -> String {
    l.to_string()
}

pub fn format_sequence(s: &LoopSequence) -> String {
    if s.is_null() {
        return "null".into();
    }
    s.loops()
        .iter()
        .map(format_loop)
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Parse one loop word. Returns the canonical core and whether backtracks were erased.
pub fn parse_loop(text: &str) -> Result<(Loop, bool), ParseError> {
    let text = text.trim();
    let rest = text
        .strip_prefix('@')
        .ok_or_else(|| ParseError::Syntax(format!("expected '@(' at start of {text:?}")))?;
    let close = rest
        .find(')')
        .ok_or_else(|| ParseError::Syntax("missing ')'".into()))?;
    let inner = rest[..close]
        .trim()
        .strip_prefix('(')
        .ok_or_else(|| ParseError::Syntax("missing '('".into()))?;
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<i32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ParseError::Syntax(format!("bad coordinate: {e}")))?;
    let start = Vertex::new(&coords)?;
    let steps = rest[close + 1..]
        .split_whitespace()
        .map(|t| {
            let v: i8 = t
                .parse()
                .map_err(|_| ParseError::Syntax(format!("bad step {t:?}")))?;
            if !(t.starts_with('+') || t.starts_with('-')) || v == 0 {
                return Err(ParseError::Syntax(format!("bad step {t:?}")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let path = Path::from_steps(&start, &steps)?;
    let lp = Loop::core_of(&path)?;
    let erased = lp.len() != path.len();
    Ok((lp, erased))
}

/// Parse a `;`-separated sequence. Warnings list components whose backtracks were erased.
pub fn parse_sequence(text: &str) -> Result<(LoopSequence, Vec<String>), ParseError> {
    let mut loops = Vec::new();
    let mut warnings = Vec::new();
    let parts: Vec<&str> = text.split(';').collect();
    for (i, part) in parts.iter().enumerate() {
        let (lp, erased) = parse_loop(part)?;
        if erased {
            warnings.push(format!("component {}: backtracks erased", i + 1));
        }
        loops.push(lp);
    }
    if loops.iter().all(Loop::is_null) {
        return Err(ParseError::EmptySequence);
    }
    if let Some(i) = loops.iter().position(Loop::is_null) {
        return Err(ParseError::NullComponent(i + 1));
    }
    let s = LoopSequence::new(loops)?;
    Ok((s, warnings))
}
