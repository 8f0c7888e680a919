//! Undirected Graphviz DOT output, with a small parser used to check that
//! whatever we emit reads back.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DotNode {
    pub id: String,
    pub attrs: Attrs,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DotEdge {
    pub source: String,
    pub target: String,
    pub attrs: Attrs,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DotGraph {
    pub name: String,
    pub graph_attrs: Attrs,
    pub node_defaults: Attrs,
    pub nodes: Vec<DotNode>,
    pub edges: Vec<DotEdge>,
}

pub fn attrs<K: Into<String>, V: Into<String>>(pairs: impl IntoIterator<Item = (K, V)>) -> Attrs {
    pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_attrs(out: &mut String, a: &Attrs) {
    if a.is_empty() {
        return;
    }
    out.push_str(" [");
    for (i, (k, v)) in a.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}={}", k, quote(v));
    }
    out.push(']');
}

impl DotGraph {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Default::default() }
    }

    pub fn node(&self, id: &str) -> Option<&DotNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn render(&self) -> String {
        let mut out = format!("graph {} {{\n", quote(&self.name));
        for (k, v) in &self.graph_attrs {
            let _ = writeln!(out, "  {}={};", k, quote(v));
        }
        if !self.node_defaults.is_empty() {
            out.push_str("  node");
            write_attrs(&mut out, &self.node_defaults);
            out.push_str(";\n");
        }
        for n in &self.nodes {
            out.push_str("  ");
            out.push_str(&quote(&n.id));
            write_attrs(&mut out, &n.attrs);
            out.push_str(";\n");
        }
        for e in &self.edges {
            let _ = write!(out, "  {} -- {}", quote(&e.source), quote(&e.target));
            write_attrs(&mut out, &e.attrs);
            out.push_str(";\n");
        }
        out.push_str("}\n");
        out
    }
}

pub fn attr<'a>(a: &'a Attrs, key: &str) -> Option<&'a str> {
    a.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id(String),
    Open,
    Close,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    EdgeOp,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let err = |m: String| Error::Format(format!("DOT: {m}"));
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => {
                out.push(match c {
                    '{' => Token::Open,
                    '}' => Token::Close,
                    '[' => Token::LBracket,
                    ']' => Token::RBracket,
                    '=' => Token::Eq,
                    ';' => Token::Semi,
                    _ => Token::Comma,
                });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                out.push(Token::EdgeOp);
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'>') => return Err(err("directed edge in an undirected graph".into())),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err("unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some('n') => s.push('\n'),
                                Some(&e) => s.push(e),
                                None => return Err(err("dangling escape".into())),
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Token::Id(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' || c == '#' => {
                let start = i;
                while i < chars.len() && {
                    let d = chars[i];
                    d.is_alphanumeric() || d == '_' || d == '.' || d == '#' || (d == '-' && chars.get(i + 1) != Some(&'-'))
                } {
                    i += 1;
                }
                out.push(Token::Id(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Format("DOT: unexpected end".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        let got = self.next()?;
        if got != t {
            return Err(Error::Format(format!("DOT: expected {t:?}, found {got:?}")));
        }
        Ok(())
    }

    fn id(&mut self) -> Result<String> {
        match self.next()? {
            Token::Id(s) => Ok(s),
            t => Err(Error::Format(format!("DOT: expected identifier, found {t:?}"))),
        }
    }

    fn attr_list(&mut self) -> Result<Attrs> {
        let mut out = Vec::new();
        while self.peek() == Some(&Token::LBracket) {
            self.pos += 1;
            while self.peek() != Some(&Token::RBracket) {
                let k = self.id()?;
                self.expect(Token::Eq)?;
                let v = self.id()?;
                out.push((k, v));
                if matches!(self.peek(), Some(Token::Comma) | Some(Token::Semi)) {
                    self.pos += 1;
                }
            }
            self.pos += 1;
        }
        Ok(out)
    }
}

/// Parses the undirected subset of DOT that [`DotGraph::render`] emits:
/// graph attributes, `node` defaults, node and edge statements (edge chains
/// allowed), quoted or bare identifiers, `//` comments.
pub fn parse(src: &str) -> Result<DotGraph> {
    let mut p = Parser { tokens: tokenize(src)?, pos: 0 };
    let mut head = p.id()?;
    if head == "strict" {
        head = p.id()?;
    }
    if head != "graph" {
        return Err(Error::Format(format!("DOT: expected `graph`, found `{head}`")));
    }
    let mut g = DotGraph::default();
    if let Some(Token::Id(_)) = p.peek() {
        g.name = p.id()?;
    }
    p.expect(Token::Open)?;
    loop {
        match p.peek() {
            Some(Token::Close) => {
                p.pos += 1;
                break;
            }
            Some(Token::Semi) => p.pos += 1,
            Some(Token::Id(_)) => {
                let first = p.id()?;
                if (first == "node" || first == "edge" || first == "graph") && p.peek() == Some(&Token::LBracket) {
                    let a = p.attr_list()?;
                    match first.as_str() {
                        "node" => g.node_defaults.extend(a),
                        "graph" => g.graph_attrs.extend(a),
                        _ => {}
                    }
                } else if p.peek() == Some(&Token::Eq) {
                    p.pos += 1;
                    let v = p.id()?;
                    g.graph_attrs.push((first, v));
                } else if p.peek() == Some(&Token::EdgeOp) {
                    let mut chain = vec![first];
                    while p.peek() == Some(&Token::EdgeOp) {
                        p.pos += 1;
                        chain.push(p.id()?);
                    }
                    let a = p.attr_list()?;
                    for w in chain.windows(2) {
                        g.edges.push(DotEdge { source: w[0].clone(), target: w[1].clone(), attrs: a.clone() });
                    }
                } else {
                    let a = p.attr_list()?;
                    g.nodes.push(DotNode { id: first, attrs: a });
                }
            }
            Some(t) => return Err(Error::Format(format!("DOT: unexpected {t:?}"))),
            None => return Err(Error::Format("DOT: missing closing brace".into())),
        }
    }
    if p.pos != p.tokens.len() {
        return Err(Error::Format("DOT: trailing input after graph".into()));
    }
    Ok(g)
}
