//! Plain-text reaction format.
//!
//! Line oriented: `#` starts a comment, blank lines are skipped. A reaction
//! line is `complex -> complex` or `complex <-> complex`, optionally followed
//! by `; k = <number>` (reversible lines may carry `; k = <fwd>, <rev>`).
//! A complex is `0` (the empty complex) or a `+`-separated list of terms,
//! each an optional positive integer coefficient followed by an identifier.
//! Numbers accept decimals and fractions `p/q`. An optional `species A B C`
//! header pins the species order; otherwise species are registered in order
//! of first appearance.

use crate::model::{Complex, RateAssignment, Reaction, ReactionNetwork, Species};
use std::collections::HashMap;
use std::fmt;

/// A parse problem located in the input text (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Parses the text format. Total: any input yields a network or diagnostics.
///
/// Rates are returned iff every reaction line carries a rate annotation.
pub fn parse_network(
    text: &str,
) -> Result<(ReactionNetwork, Option<RateAssignment>), Vec<ParseDiagnostic>> {
    let mut p = Parser::default();
    for (idx, raw_line) in text.lines().enumerate() {
        p.parse_line(idx + 1, raw_line);
    }
    p.finish()
}

/// Emits one reaction per line in edge order; inverse of [`parse_network`].
///
/// A `species` header is prepended only when the table order could not be
/// reconstructed from first appearance in the reaction lines.
pub fn format_network(net: &ReactionNetwork, rates: Option<&RateAssignment>) -> String {
    let mut out = String::new();
    if needs_species_header(net) {
        out.push_str("species");
        for sp in &net.species {
            out.push(' ');
            out.push_str(&sp.name);
        }
        out.push('\n');
    }
    for (e, r) in net.edges.iter().enumerate() {
        out.push_str(&format_complex(net, &net.vertices[r.source]));
        out.push_str(" -> ");
        out.push_str(&format_complex(net, &net.vertices[r.target]));
        if let Some(ra) = rates {
            out.push_str(&format!(" ; k = {}", ra.k[e]));
        }
        out.push('\n');
    }
    out
}

fn format_complex(net: &ReactionNetwork, cx: &Complex) -> String {
    if cx.is_zero() {
        return "0".to_string();
    }
    let mut terms = Vec::new();
    for (i, &c) in cx.coeffs.iter().enumerate() {
        if c == 1 {
            terms.push(net.species[i].name.clone());
        } else if c > 1 {
            terms.push(format!("{} {}", c, net.species[i].name));
        }
    }
    terms.join(" + ")
}

fn needs_species_header(net: &ReactionNetwork) -> bool {
    // Replay first-appearance registration over the emitted reactions.
    let mut seen = Vec::new();
    for r in &net.edges {
        for v in [r.source, r.target] {
            for (i, &c) in net.vertices[v].coeffs.iter().enumerate() {
                if c > 0 && !seen.contains(&i) {
                    seen.push(i);
                }
            }
        }
    }
    seen != (0..net.species.len()).collect::<Vec<_>>()
}

#[derive(Default)]
struct Parser {
    species: Vec<Species>,
    species_index: HashMap<String, usize>,
    vertices: Vec<Vec<(usize, u32)>>, // sparse (species, coeff), canonical sorted
    vertex_index: HashMap<Vec<(usize, u32)>, usize>,
    edges: Vec<Reaction>,
    rates: Vec<Option<f64>>,
    edge_lines: Vec<usize>,
    diagnostics: Vec<ParseDiagnostic>,
}

impl Parser {
    fn intern_species(&mut self, name: &str) -> usize {
        if let Some(&i) = self.species_index.get(name) {
            return i;
        }
        let id = self.species.len();
        self.species.push(Species {
            id,
            name: name.to_string(),
        });
        self.species_index.insert(name.to_string(), id);
        id
    }

    fn intern_vertex(&mut self, sparse: Vec<(usize, u32)>) -> usize {
        if let Some(&i) = self.vertex_index.get(&sparse) {
            return i;
        }
        let id = self.vertices.len();
        self.vertex_index.insert(sparse.clone(), id);
        self.vertices.push(sparse);
        id
    }

    fn error(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            line,
            column,
            message: message.into(),
        });
    }

    fn parse_line(&mut self, line_no: usize, raw: &str) {
        let mut lx = Lexer::new(raw);
        let Some(first) = lx.peek() else {
            return; // blank or comment-only line
        };

        // `species` header: the keyword followed by another identifier.
        if let Token::Ident(word) = &first.tok {
            if word == "species" {
                let mut ahead = lx.clone();
                ahead.next();
                if matches!(ahead.peek().map(|t| t.tok), Some(Token::Ident(_))) {
                    lx.next();
                    self.parse_species_header(line_no, &mut lx);
                    return;
                }
            }
        }

        self.parse_reaction_line(line_no, &mut lx);
    }

    fn parse_species_header(&mut self, line_no: usize, lx: &mut Lexer) {
        loop {
            match lx.next() {
                Some(Spanned {
                    tok: Token::Ident(name),
                    col,
                }) => {
                    if self.species_index.contains_key(&name) {
                        self.error(
                            line_no,
                            col,
                            format!("species `{name}` is already registered"),
                        );
                    } else {
                        self.intern_species(&name);
                    }
                }
                Some(Spanned {
                    tok: Token::Comma, ..
                }) => {} // commas between names are allowed
                Some(Spanned { col, .. }) => {
                    self.error(line_no, col, "expected species name");
                    return;
                }
                None => return,
            }
        }
    }

    fn parse_reaction_line(&mut self, line_no: usize, lx: &mut Lexer) {
        let Some(lhs) = self.parse_complex(line_no, lx) else {
            return;
        };
        let (reversible, arrow_col) = match lx.next() {
            Some(Spanned {
                tok: Token::Arrow,
                col,
            }) => (false, col),
            Some(Spanned {
                tok: Token::RevArrow,
                col,
            }) => (true, col),
            Some(Spanned { col, .. }) => {
                self.error(line_no, col, "expected `->` or `<->`");
                return;
            }
            None => {
                self.error(line_no, lx.end_col(), "expected `->` or `<->`");
                return;
            }
        };
        let Some(rhs) = self.parse_complex(line_no, lx) else {
            return;
        };

        let mut fwd_rate = None;
        let mut rev_rate = None;
        match lx.next() {
            None => {}
            Some(Spanned {
                tok: Token::Semicolon,
                ..
            }) => {
                let Some((a, b)) = self.parse_rate_clause(line_no, lx, reversible) else {
                    return;
                };
                fwd_rate = Some(a);
                rev_rate = b;
            }
            Some(Spanned { col, .. }) => {
                self.error(line_no, col, "unexpected trailing input after reaction");
                return;
            }
        }

        let src = self.intern_vertex(lhs);
        let tgt = self.intern_vertex(rhs);
        self.add_edge(line_no, arrow_col, src, tgt, fwd_rate);
        if reversible {
            self.add_edge(line_no, arrow_col, tgt, src, rev_rate.or(fwd_rate));
        }
    }

    fn add_edge(&mut self, line: usize, col: usize, src: usize, tgt: usize, rate: Option<f64>) {
        if src == tgt {
            self.error(line, col, "reaction source and target are the same complex");
            return;
        }
        if self
            .edges
            .iter()
            .any(|r| r.source == src && r.target == tgt)
        {
            self.error(line, col, "duplicate reaction for this (source, target) pair");
            return;
        }
        self.edges.push(Reaction {
            source: src,
            target: tgt,
        });
        self.rates.push(rate);
        self.edge_lines.push(line);
    }

    /// `k = <number>` with an optional `, <number>` on reversible lines.
    fn parse_rate_clause(
        &mut self,
        line_no: usize,
        lx: &mut Lexer,
        reversible: bool,
    ) -> Option<(f64, Option<f64>)> {
        match lx.next() {
            Some(Spanned {
                tok: Token::Ident(word),
                ..
            }) if word == "k" => {}
            Some(Spanned { col, .. }) => {
                self.error(line_no, col, "expected `k` after `;`");
                return None;
            }
            None => {
                self.error(line_no, lx.end_col(), "expected `k = <rate>` after `;`");
                return None;
            }
        }
        match lx.next() {
            Some(Spanned {
                tok: Token::Equals, ..
            }) => {}
            got => {
                let col = got.map_or(lx.end_col(), |s| s.col);
                self.error(line_no, col, "expected `=` after `k`");
                return None;
            }
        }
        let fwd = self.parse_rate_number(line_no, lx)?;
        match lx.next() {
            None => Some((fwd, None)),
            Some(Spanned {
                tok: Token::Comma,
                col,
            }) => {
                if !reversible {
                    self.error(line_no, col, "second rate is only valid on `<->` lines");
                    return None;
                }
                let rev = self.parse_rate_number(line_no, lx)?;
                if let Some(Spanned { col, .. }) = lx.next() {
                    self.error(line_no, col, "unexpected trailing input after rates");
                    return None;
                }
                Some((fwd, Some(rev)))
            }
            Some(Spanned { col, .. }) => {
                self.error(line_no, col, "unexpected trailing input after rate");
                None
            }
        }
    }

    fn parse_rate_number(&mut self, line_no: usize, lx: &mut Lexer) -> Option<f64> {
        match lx.next() {
            Some(Spanned {
                tok: Token::Number(text),
                col,
            }) => match parse_number(&text) {
                Some(v) if v > 0.0 => Some(v),
                Some(_) => {
                    self.error(line_no, col, "rate constant must be strictly positive");
                    None
                }
                None => {
                    self.error(line_no, col, format!("malformed number `{text}`"));
                    None
                }
            },
            Some(Spanned { col, .. }) => {
                self.error(line_no, col, "expected a rate value");
                None
            }
            None => {
                self.error(line_no, lx.end_col(), "expected a rate value");
                None
            }
        }
    }

    /// A complex: `0` or `term (+ term)*`. Returns canonical sparse coeffs.
    fn parse_complex(&mut self, line_no: usize, lx: &mut Lexer) -> Option<Vec<(usize, u32)>> {
        let mut coeffs: HashMap<usize, u32> = HashMap::new();

        // Lone `0` is the empty complex (only if not followed by a species).
        if let Some(Spanned {
            tok: Token::Number(text),
            ..
        }) = lx.peek()
        {
            if text == "0" {
                let mut ahead = lx.clone();
                ahead.next();
                if !matches!(ahead.peek().map(|t| t.tok), Some(Token::Ident(_))) {
                    lx.next();
                    return Some(Vec::new());
                }
            }
        }

        loop {
            // term: [coefficient] identifier
            let mut coeff = 1u32;
            if let Some(Spanned {
                tok: Token::Number(text),
                col,
            }) = lx.peek()
            {
                lx.next();
                match text.parse::<u32>() {
                    Ok(c) if c > 0 => coeff = c,
                    Ok(_) => {
                        self.error(line_no, col, "stoichiometric coefficient must be positive");
                        return None;
                    }
                    Err(_) => {
                        self.error(
                            line_no,
                            col,
                            format!("expected an integer coefficient, got `{text}`"),
                        );
                        return None;
                    }
                }
            }
            match lx.next() {
                Some(Spanned {
                    tok: Token::Ident(name),
                    ..
                }) => {
                    let sp = self.intern_species(&name);
                    *coeffs.entry(sp).or_insert(0) += coeff;
                }
                Some(Spanned { col, .. }) => {
                    self.error(line_no, col, "expected a species term");
                    return None;
                }
                None => {
                    self.error(line_no, lx.end_col(), "expected a species term");
                    return None;
                }
            }
            match lx.peek() {
                Some(Spanned {
                    tok: Token::Plus, ..
                }) => {
                    lx.next();
                }
                _ => break,
            }
        }

        let mut sparse: Vec<(usize, u32)> = coeffs.into_iter().collect();
        sparse.sort_unstable();
        Some(sparse)
    }

    fn finish(mut self) -> Result<(ReactionNetwork, Option<RateAssignment>), Vec<ParseDiagnostic>> {
        // Rates must be all-or-nothing across reaction lines.
        let with = self.rates.iter().filter(|r| r.is_some()).count();
        if with > 0 && with < self.rates.len() {
            let first_missing = self.rates.iter().position(|r| r.is_none()).unwrap();
            self.diagnostics.push(ParseDiagnostic {
                line: self.edge_lines[first_missing],
                column: 1,
                message: "mixed rate annotations: this reaction has no rate while others do"
                    .to_string(),
            });
        }

        if !self.diagnostics.is_empty() {
            return Err(self.diagnostics);
        }

        let n = self.species.len();
        let vertices = self
            .vertices
            .iter()
            .map(|sparse| {
                let mut coeffs = vec![0u32; n];
                for &(s, c) in sparse {
                    coeffs[s] = c;
                }
                Complex::new(coeffs)
            })
            .collect();
        let net = ReactionNetwork {
            species: self.species,
            vertices,
            edges: self.edges,
        };
        let rates = if with > 0 && with == self.rates.len() {
            Some(RateAssignment {
                k: self.rates.into_iter().map(|r| r.unwrap()).collect(),
            })
        } else {
            None
        };
        Ok((net, rates))
    }
}

/// Accepts decimals (`1.5`, `2e-3`) and fractions (`p/q`).
fn parse_number(text: &str) -> Option<f64> {
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num.trim().parse().ok()?;
        let d: f64 = den.trim().parse().ok()?;
        if d == 0.0 {
            return None;
        }
        return Some(n / d);
    }
    text.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Number(String),
    Plus,
    Arrow,
    RevArrow,
    Semicolon,
    Equals,
    Comma,
    Unexpected(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Spanned {
    tok: Token,
    col: usize, // 1-based column of the first character
}

#[derive(Clone)]
struct Lexer {
    chars: Vec<char>,
    pos: usize,
}

impl Lexer {
    fn new(line: &str) -> Self {
        let visible = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        Lexer {
            chars: visible.chars().collect(),
            pos: 0,
        }
    }

    fn end_col(&self) -> usize {
        self.chars.len() + 1
    }

    fn peek(&self) -> Option<Spanned> {
        self.clone().next()
    }

    fn next(&mut self) -> Option<Spanned> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.chars.len() {
            return None;
        }
        let start = self.pos;
        let col = start + 1;
        let c = self.chars[start];
        let tok = match c {
            '+' => {
                self.pos += 1;
                Token::Plus
            }
            ';' => {
                self.pos += 1;
                Token::Semicolon
            }
            '=' => {
                self.pos += 1;
                Token::Equals
            }
            ',' => {
                self.pos += 1;
                Token::Comma
            }
            '-' if self.chars.get(start + 1) == Some(&'>') => {
                self.pos += 2;
                Token::Arrow
            }
            '<' if self.chars.get(start + 1) == Some(&'-')
                && self.chars.get(start + 2) == Some(&'>') =>
            {
                self.pos += 3;
                Token::RevArrow
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                Token::Ident(self.chars[start..self.pos].iter().collect())
            }
            c if c.is_ascii_digit() || c == '.' => {
                // number-ish: digits, dot, fraction slash, exponent with sign
                while self.pos < self.chars.len() {
                    let ch = self.chars[self.pos];
                    if ch.is_ascii_digit() || ch == '.' || ch == '/' {
                        self.pos += 1;
                    } else if (ch == 'e' || ch == 'E')
                        && self.pos > start
                        && self.chars[self.pos - 1].is_ascii_digit()
                    {
                        self.pos += 1;
                        if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                            self.pos += 1;
                        }
                    } else {
                        break;
                    }
                }
                Token::Number(self.chars[start..self.pos].iter().collect())
            }
            other => {
                self.pos += 1;
                Token::Unexpected(other)
            }
        };
        Some(Spanned { tok, col })
    }
}
