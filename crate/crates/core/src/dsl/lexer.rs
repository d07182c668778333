use super::{ParseDiagnostic, SourceFile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(u64),
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Turnstile,
    Amp,
    Vee,
    Equals,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Vee => "`\\/`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &SourceFile) -> Result<Vec<Token>, ParseDiagnostic> {
    let text = &src.text;
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let single = |tok| Some((tok, i + c.len_utf8()));
        let simple = match c {
            '.' => single(Tok::Dot),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            '&' => single(Tok::Amp),
            '=' => single(Tok::Equals),
            _ => None,
        };
        if let Some((tok, end)) = simple {
            chars.next();
            out.push(Token { tok, start: i, end });
            continue;
        }
        if c == '|' || c == '\\' {
            chars.next();
            let want = if c == '|' { '-' } else { '/' };
            match chars.peek() {
                Some(&(_, d)) if d == want => {
                    chars.next();
                    let tok = if c == '|' { Tok::Turnstile } else { Tok::Vee };
                    out.push(Token {
                        tok,
                        start: i,
                        end: i + 2,
                    });
                    continue;
                }
                _ => {
                    return Err(ParseDiagnostic::error(
                        src.span(i, i + 1),
                        format!("unexpected character `{c}`"),
                    ))
                }
            }
        }
        if is_ident_start(c) {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !is_ident_continue(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(Token {
                tok: Tok::Ident(text[i..end].to_string()),
                start: i,
                end,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let n = text[i..end].parse::<u64>().map_err(|_| {
                ParseDiagnostic::error(src.span(i, end), "number out of range")
            })?;
            out.push(Token {
                tok: Tok::Number(n),
                start: i,
                end,
            });
            continue;
        }
        return Err(ParseDiagnostic::error(
            src.span(i, i + c.len_utf8()),
            format!("unexpected character `{c}`"),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        start: text.len(),
        end: text.len(),
    });
    Ok(out)
}
