//! Recursive-descent parser producing unresolved syntax items.

use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostics, ParseDiagnostic, SourceFile, Span, FORMAT_VERSION};

#[derive(Debug, Clone)]
pub enum RawTerm {
    Name(String, Span),
    App(String, Vec<RawTerm>, Span),
}

#[derive(Debug, Clone)]
pub enum RawFormula {
    Rel(String, Vec<RawTerm>, Span),
    Eq(RawTerm, RawTerm, Span),
    Top(Span),
    Bottom(Span),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Vec<RawFormula>, Span),
    Exists {
        var: String,
        sort: String,
        body: Box<RawFormula>,
        span: Span,
    },
}

impl RawFormula {
    pub fn span(&self) -> Span {
        match self {
            RawFormula::Rel(_, _, s)
            | RawFormula::Eq(_, _, s)
            | RawFormula::Top(s)
            | RawFormula::Bottom(s)
            | RawFormula::Or(_, s)
            | RawFormula::Exists { span: s, .. } => *s,
            RawFormula::And(l, r) => Span {
                start: l.span().start,
                end: r.span().end,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Named {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Item {
    Theory(Named),
    Sort(Named),
    Fn {
        name: Named,
        args: Vec<Named>,
        result: Named,
    },
    Rel {
        name: Named,
        args: Vec<Named>,
    },
    Axiom {
        name: Named,
        context: Option<Vec<(Named, Named)>>,
        premise: RawFormula,
        conclusion: RawFormula,
        span: Span,
    },
    Points {
        names: Vec<Named>,
        sort: Option<Named>,
    },
    Assume(Vec<RawFormula>),
    Goal(RawFormula),
}

const DECL_KEYWORDS: &[&str] = &[
    "theory", "sort", "fn", "rel", "axiom", "points", "assume", "goal",
];

struct Parser<'a> {
    src: &'a SourceFile,
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn span_of(&self, t: &Token) -> Span {
        self.src.span(t.start, t.end)
    }

    fn here(&self) -> Span {
        let t = &self.toks[self.at];
        self.src.span(t.start, t.end)
    }

    fn last_end(&self) -> usize {
        if self.at == 0 {
            0
        } else {
            self.toks[self.at - 1].end
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<Token> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            Err(ParseDiagnostic::error(
                self.here(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Named> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let t = self.bump();
                Ok(Named {
                    name,
                    span: self.span_of(&t),
                })
            }
            other => Err(ParseDiagnostic::error(
                self.here(),
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Skips to just past the next `.` that ends a declaration.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Dot => {
                    self.bump();
                    match self.peek() {
                        Tok::Eof => return,
                        Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) => return,
                        _ => {}
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn header(&mut self) -> PResult<()> {
        if self.is_keyword("obs") && matches!(self.peek_at(1), Tok::Number(_)) {
            let kw = self.bump();
            let num = self.bump();
            let Tok::Number(v) = num.tok else { unreachable!() };
            if v != u64::from(FORMAT_VERSION) {
                return Err(ParseDiagnostic::error(
                    self.src.span(kw.start, num.end),
                    format!("unsupported format version {v}; expected obs {FORMAT_VERSION}"),
                ));
            }
        }
        Ok(())
    }

    fn item(&mut self) -> PResult<Item> {
        let kw = self.ident("a declaration")?;
        let item = match kw.name.as_str() {
            "theory" => Item::Theory(self.ident("a theory name")?),
            "sort" => Item::Sort(self.ident("a sort name")?),
            "fn" => {
                let name = self.ident("a function name")?;
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    self.name_list(Tok::RParen, "a sort")?
                } else {
                    Vec::new()
                };
                self.expect(Tok::Colon)?;
                let result = self.ident("a result sort")?;
                Item::Fn { name, args, result }
            }
            "rel" => {
                let name = self.ident("a relation name")?;
                self.expect(Tok::LParen)?;
                let args = self.name_list(Tok::RParen, "a sort")?;
                Item::Rel { name, args }
            }
            "axiom" => {
                let name = self.ident("an axiom name")?;
                self.expect(Tok::Colon)?;
                let start = self.toks[self.at].start;
                let context = if *self.peek() == Tok::LBracket {
                    self.bump();
                    Some(self.typed_list()?)
                } else {
                    None
                };
                let premise = self.formula()?;
                self.expect(Tok::Turnstile)?;
                let conclusion = self.formula()?;
                let span = self.src.span(start, self.last_end());
                Item::Axiom {
                    name,
                    context,
                    premise,
                    conclusion,
                    span,
                }
            }
            "points" => {
                let mut names = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    names.push(self.ident("a point name")?);
                }
                if names.is_empty() {
                    return Err(ParseDiagnostic::error(self.here(), "expected at least one point name"));
                }
                let sort = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ident("a sort")?)
                } else {
                    None
                };
                Item::Points { names, sort }
            }
            "assume" => {
                let mut atoms = vec![self.formula()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    atoms.push(self.formula()?);
                }
                Item::Assume(atoms)
            }
            "goal" => Item::Goal(self.formula()?),
            other => {
                return Err(ParseDiagnostic::error(
                    kw.span,
                    format!("unknown declaration `{other}`"),
                ))
            }
        };
        self.expect(Tok::Dot)?;
        Ok(item)
    }

    fn name_list(&mut self, close: Tok, what: &str) -> PResult<Vec<Named>> {
        let mut out = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.ident(what)?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                self.expect(close)?;
                return Ok(out);
            }
        }
    }

    /// `x:S, y:T ]` (the opening bracket is already consumed).
    fn typed_list(&mut self) -> PResult<Vec<(Named, Named)>> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.bump();
            return Ok(out);
        }
        loop {
            let var = self.ident("a variable")?;
            self.expect(Tok::Colon)?;
            let sort = self.ident("a sort")?;
            out.push((var, sort));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                self.expect(Tok::RBracket)?;
                return Ok(out);
            }
        }
    }

    fn formula(&mut self) -> PResult<RawFormula> {
        let left = self.unary()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            let right = self.formula()?;
            Ok(RawFormula::And(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> PResult<RawFormula> {
        let start = self.toks[self.at].start;
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "true" => {
                let t = self.bump();
                Ok(RawFormula::Top(self.span_of(&t)))
            }
            Tok::Ident(kw) if kw == "false" => {
                let t = self.bump();
                Ok(RawFormula::Bottom(self.span_of(&t)))
            }
            Tok::Ident(kw) if kw == "exists" => {
                self.bump();
                let var = self.ident("a bound variable")?;
                self.expect(Tok::Colon)?;
                let sort = self.ident("a sort")?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(RawFormula::Exists {
                    var: var.name,
                    sort: sort.name,
                    body: Box::new(body),
                    span: self.src.span(start, self.last_end()),
                })
            }
            Tok::Vee => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let mut list = Vec::new();
                if *self.peek() == Tok::RBracket {
                    self.bump();
                } else {
                    loop {
                        list.push(self.formula()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            self.expect(Tok::RBracket)?;
                            break;
                        }
                    }
                }
                Ok(RawFormula::Or(list, self.src.span(start, self.last_end())))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let lhs = self.term()?;
                if *self.peek() == Tok::Equals {
                    self.bump();
                    let rhs = self.term()?;
                    Ok(RawFormula::Eq(lhs, rhs, self.src.span(start, self.last_end())))
                } else {
                    match lhs {
                        RawTerm::App(name, args, span) => Ok(RawFormula::Rel(name, args, span)),
                        RawTerm::Name(name, span) => Err(ParseDiagnostic::error(
                            span,
                            format!("expected a formula; `{name}` needs arguments or `=`"),
                        )),
                    }
                }
            }
            other => Err(ParseDiagnostic::error(
                self.here(),
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }

    fn term(&mut self) -> PResult<RawTerm> {
        let start = self.toks[self.at].start;
        let name = self.ident("a term")?;
        if *self.peek() != Tok::LParen {
            return Ok(RawTerm::Name(name.name, name.span));
        }
        self.bump();
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
        } else {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    self.expect(Tok::RParen)?;
                    break;
                }
            }
        }
        Ok(RawTerm::App(name.name, args, self.src.span(start, self.last_end())))
    }
}

pub fn parse(src: &SourceFile) -> Result<Vec<Item>, Diagnostics> {
    let toks = tokenize(src).map_err(|d| vec![d])?;
    let mut p = Parser { src, toks, at: 0 };
    let mut diags = Vec::new();
    if let Err(d) = p.header() {
        diags.push(d);
    }
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        match p.item() {
            Ok(item) => items.push(item),
            Err(d) => {
                diags.push(d);
                p.recover();
            }
        }
    }
    if diags.is_empty() {
        Ok(items)
    } else {
        Err(diags)
    }
}
