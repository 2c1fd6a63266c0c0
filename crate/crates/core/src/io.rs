//! Text format for instances and matchings.
//!
//! ```text
//! grinblat 1 <n> <ground_size>
//! rel 1 <k>
//! <k lines, one class each: two or more element ids separated by spaces>
//! rel 2 <k>
//! ...
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Matchings are written one
//! line per relation, `<i> <a> <b>` with `i` counted from 1.

use std::fmt::Write;

use crate::error::{ParseError, ParseErrorKind};
use crate::relations::{Element, Instance, Matching, Partition};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-blank line with comments stripped, and its 1-based number.
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn eof(&self) -> ParseError {
        ParseError { line: self.last + 1, kind: ParseErrorKind::UnexpectedEof }
    }
}

fn num(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>().map_err(|_| ParseError { line, kind: ParseErrorKind::BadNumber(tok.to_string()) })
}

fn text(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError { line, kind: ParseErrorKind::Utf8 }
    })
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text(bytes)?);
    let (hl, head) = lines.next().ok_or(ParseError { line: 1, kind: ParseErrorKind::BadHeader })?;
    if head.len() != 4 || head[0] != "grinblat" {
        return Err(ParseError { line: hl, kind: ParseErrorKind::BadHeader });
    }
    if head[1] != "1" {
        return Err(ParseError { line: hl, kind: ParseErrorKind::Version(head[1].to_string()) });
    }
    let n = num(hl, head[2])?;
    let ground = num(hl, head[3])?;
    if ground > u32::MAX as usize {
        return Err(ParseError { line: hl, kind: ParseErrorKind::BadNumber(head[3].to_string()) });
    }
    let mut seen = vec![u32::MAX; ground];
    let mut rels = Vec::with_capacity(n);
    for r in 1..=n {
        let (ll, toks) = lines.next().ok_or_else(|| lines.eof())?;
        if toks.len() != 3 || toks[0] != "rel" {
            return Err(ParseError { line: ll, kind: ParseErrorKind::BadRelationHeader { expected: r } });
        }
        if num(ll, toks[1])? != r {
            return Err(ParseError { line: ll, kind: ParseErrorKind::RelationOrder(num(ll, toks[1])?) });
        }
        let k = num(ll, toks[2])?;
        let mut classes = Vec::with_capacity(k);
        for _ in 0..k {
            let (cl, toks) = lines.next().ok_or_else(|| lines.eof())?;
            if toks.len() < 2 {
                return Err(ParseError { line: cl, kind: ParseErrorKind::ClassTooSmall(toks.len()) });
            }
            let mut class = Vec::with_capacity(toks.len());
            for tok in toks {
                let e = num(cl, tok)?;
                if e >= ground {
                    return Err(ParseError {
                        line: cl,
                        kind: ParseErrorKind::OutOfRange {
                            element: e.min(u32::MAX as usize) as Element,
                            ground_size: ground,
                        },
                    });
                }
                if seen[e] == r as u32 {
                    return Err(ParseError { line: cl, kind: ParseErrorKind::DuplicateElement(e as Element) });
                }
                seen[e] = r as u32;
                class.push(e as Element);
            }
            classes.push(class);
        }
        rels.push(Partition::new(classes).expect("validated while parsing"));
    }
    if let Some((l, _)) = lines.next() {
        return Err(ParseError { line: l, kind: ParseErrorKind::Trailing });
    }
    Ok(Instance::new(ground, rels).expect("validated while parsing"))
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    writeln!(s, "grinblat 1 {} {}", inst.len(), inst.ground_size()).expect("string write");
    for (i, p) in inst.relations().iter().enumerate() {
        writeln!(s, "rel {} {}", i + 1, p.classes().len()).expect("string write");
        for c in p.classes() {
            let line: Vec<String> = c.iter().map(|e| e.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
    }
    s
}

pub fn write_matching(m: &Matching) -> String {
    let mut s = String::new();
    for (i, (a, b)) in m.pairs.iter().enumerate() {
        writeln!(s, "{} {a} {b}", i + 1).expect("string write");
    }
    s
}

/// Reads lines `<i> <a> <b>`; relation numbers must run 1, 2, ... in order.
pub fn parse_matching(bytes: &[u8]) -> Result<Matching, ParseError> {
    let mut lines = Lines::new(text(bytes)?);
    let mut pairs = Vec::new();
    while let Some((l, toks)) = lines.next() {
        if toks.len() != 3 {
            return Err(ParseError { line: l, kind: ParseErrorKind::BadMatchingLine });
        }
        let i = num(l, toks[0])?;
        if i != pairs.len() + 1 {
            return Err(ParseError { line: l, kind: ParseErrorKind::RelationOrder(i) });
        }
        let a = num(l, toks[1])?;
        let b = num(l, toks[2])?;
        if a > u32::MAX as usize || b > u32::MAX as usize {
            return Err(ParseError { line: l, kind: ParseErrorKind::BadMatchingLine });
        }
        pairs.push((a as Element, b as Element));
    }
    Ok(Matching::new(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_lower_bound_family;

    #[test]
    fn round_trip_lower_bound() {
        let inst = gen_lower_bound_family(4);
        let text = write_instance(&inst);
        assert!(text.starts_with("grinblat 1 4 9\nrel 1 3\n0 1 2\n"));
        let back = parse_instance(text.as_bytes()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn empty_instance_is_header_only() {
        let inst = Instance::new(0, vec![]).unwrap();
        assert_eq!(write_instance(&inst), "grinblat 1 0 0\n");
        assert_eq!(parse_instance(b"grinblat 1 0 0\n").unwrap(), inst);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# two relations\ngrinblat 1 2 4\n\nrel 1 1\n0 1 # first\nrel 2 1\n2 3\n";
        let inst = parse_instance(text.as_bytes()).unwrap();
        assert_eq!(inst.len(), 2);
    }

    #[test]
    fn errors_name_line_and_cause() {
        let e = parse_instance(b"grinblat 1 1 5\nrel 1 1\n4 4\n").unwrap_err();
        assert_eq!(e, ParseError { line: 3, kind: ParseErrorKind::DuplicateElement(4) });
        let e = parse_instance(b"grinblat 1 1 5\nrel 1 1\n0 5\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::OutOfRange { element: 5, ground_size: 5 });
        let e = parse_instance(b"grinblat 1 1 5\nrel 1 1\n3\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ClassTooSmall(1));
        let e = parse_instance(b"grinblat 2 1 5\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Version("2".into()));
        let e = parse_instance(b"grinblat 1 2 5\nrel 1 0\n").unwrap_err();
        assert_eq!(e, ParseError { line: 3, kind: ParseErrorKind::UnexpectedEof });
        let e = parse_instance(b"grinblat 1 0 5\nrel 1 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Trailing);
        let e = parse_instance(b"grinblat 1 1 5\nrel 1 1\n0 1\n1 2\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Trailing);
        let e = parse_instance(b"grinblat 1 1 5\nrel 1 2\n0 1\n1 2\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateElement(1));
    }

    #[test]
    fn matching_round_trip() {
        let m = Matching::new(vec![(0, 1), (5, 3)]);
        let text = write_matching(&m);
        assert_eq!(text, "1 0 1\n2 5 3\n");
        assert_eq!(parse_matching(text.as_bytes()).unwrap(), m);
        assert_eq!(parse_matching(b"2 0 1\n").unwrap_err().kind, ParseErrorKind::RelationOrder(2));
    }
}
