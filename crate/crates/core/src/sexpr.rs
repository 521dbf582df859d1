//! S-expression reader for the tree text format: a leaf is `(label)`, an
//! internal node is `(label child child ...)`.

use crate::error::{JepError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SNode {
    pub label: String,
    pub line: usize,
    pub column: usize,
    pub children: Vec<SNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<(Tok, usize, usize)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' => {
                out.push((Tok::Open, line, col));
                chars.next();
                col += 1;
            }
            ')' => {
                out.push((Tok::Close, line, col));
                chars.next();
                col += 1;
            }
            _ => {
                let (l0, c0) = (line, col);
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                out.push((Tok::Atom(atom), l0, c0));
            }
        }
    }
    out
}

/// Parses exactly one s-expression tree from `text`.
pub fn parse(text: &str) -> Result<SNode> {
    let toks = tokenize(text);
    let mut pos = 0;
    let node = parse_node(&toks, &mut pos)?;
    if let Some((_, l, c)) = toks.get(pos) {
        return Err(JepError::parse(*l, *c, "trailing input after tree"));
    }
    Ok(node)
}

fn end_position(toks: &[(Tok, usize, usize)]) -> (usize, usize) {
    toks.last().map(|(_, l, c)| (*l, *c + 1)).unwrap_or((1, 1))
}

fn parse_node(toks: &[(Tok, usize, usize)], pos: &mut usize) -> Result<SNode> {
    let (line, column) = match toks.get(*pos) {
        Some((Tok::Open, l, c)) => (*l, *c),
        Some((_, l, c)) => return Err(JepError::parse(*l, *c, "expected '('")),
        None => {
            let (l, c) = end_position(toks);
            return Err(JepError::parse(l, c, "unexpected end of input"));
        }
    };
    *pos += 1;
    let label = match toks.get(*pos) {
        Some((Tok::Atom(a), _, _)) => a.clone(),
        Some((_, l, c)) => return Err(JepError::parse(*l, *c, "expected a label")),
        None => {
            let (l, c) = end_position(toks);
            return Err(JepError::parse(l, c, "unexpected end of input"));
        }
    };
    *pos += 1;
    let mut children = Vec::new();
    loop {
        match toks.get(*pos) {
            Some((Tok::Close, _, _)) => {
                *pos += 1;
                break;
            }
            Some((Tok::Open, _, _)) => children.push(parse_node(toks, pos)?),
            Some((Tok::Atom(_), l, c)) => {
                return Err(JepError::parse(*l, *c, "children must be parenthesized"))
            }
            None => {
                let (l, c) = end_position(toks);
                return Err(JepError::parse(l, c, "unclosed '('"));
            }
        }
    }
    Ok(SNode {
        label,
        line,
        column,
        children,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested() {
        let n = parse(" (a\n (b) (c (d) (e)))").unwrap();
        assert_eq!(n.label, "a");
        assert_eq!(n.children.len(), 2);
        assert_eq!((n.children[1].line, n.children[1].column), (2, 6));
    }

    #[test]
    fn reports_positions() {
        match parse("(a (b)").unwrap_err() {
            JepError::Parse { message, .. } => assert!(message.contains("unclosed")),
            e => panic!("{e}"),
        }
        match parse("(a b)").unwrap_err() {
            JepError::Parse { line, column, .. } => assert_eq!((line, column), (1, 4)),
            e => panic!("{e}"),
        }
        assert!(parse("(a) (b)").is_err());
    }
}
