//! Lexer and recursive-descent parser for the concrete formula syntax.
//!
//! Grammar, loosest to tightest: `<->`, `->` (right associative), `|`, `&`,
//! then the prefix operators `!`, `X`, `G`, `F`, `B[i,j]`, `A[i,j]`.

use std::fmt;

use crate::formula::{Agent, Formula};

/// Parse failure with position and the set of tokens that would have been
/// accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut column = 1usize;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Lexed {
                tok: $tok,
                line,
                column,
            });
            column += $len;
        }};
    }

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '!' => {
                chars.next();
                push!(Tok::Bang, 1);
            }
            '&' => {
                chars.next();
                push!(Tok::Amp, 1);
            }
            '|' => {
                chars.next();
                push!(Tok::Pipe, 1);
            }
            '(' => {
                chars.next();
                push!(Tok::LParen, 1);
            }
            ')' => {
                chars.next();
                push!(Tok::RParen, 1);
            }
            '[' => {
                chars.next();
                push!(Tok::LBracket, 1);
            }
            ']' => {
                chars.next();
                push!(Tok::RBracket, 1);
            }
            ',' => {
                chars.next();
                push!(Tok::Comma, 1);
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    push!(Tok::Arrow, 2);
                } else {
                    return Err(ParseError {
                        line,
                        column,
                        found: "`-`".into(),
                        expected: vec!["`->`".into()],
                    });
                }
            }
            '<' => {
                chars.next();
                if chars.peek() == Some(&'-') {
                    chars.next();
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        push!(Tok::DoubleArrow, 3);
                        continue;
                    }
                }
                return Err(ParseError {
                    line,
                    column,
                    found: "`<`".into(),
                    expected: vec!["`<->`".into()],
                });
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let len = word.len();
                push!(Tok::Word(word), len);
            }
            other => {
                return Err(ParseError {
                    line,
                    column,
                    found: format!("`{other}`"),
                    expected: vec!["a token".into()],
                });
            }
        }
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&str>) -> ParseError {
        let at = &self.toks[self.pos];
        ParseError {
            line: at.line,
            column: at.column,
            found: at.tok.describe(),
            expected: expected.into_iter().map(String::from).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.implication()?;
        while self.peek() == &Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            f = Formula::iff(f, rhs);
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Word(w) => match w.as_str() {
                "X" => {
                    self.bump();
                    Ok(Formula::next(self.unary()?))
                }
                "G" => {
                    self.bump();
                    Ok(Formula::always(self.unary()?))
                }
                "F" => {
                    self.bump();
                    Ok(Formula::sometime(self.unary()?))
                }
                "B" | "A" if self.peek2() == &Tok::LBracket => {
                    let believe = w == "B";
                    self.bump();
                    self.bump();
                    let i = self.agent()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let j = self.agent()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    let child = self.unary()?;
                    Ok(if believe {
                        Formula::believe(i, j, child)
                    } else {
                        Formula::assume(i, j, child)
                    })
                }
                _ => self.atom(),
            },
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Word(w) => {
                self.bump();
                Ok(match w.as_str() {
                    "Ua" => Formula::SortAtom(Agent::A),
                    "Ub" => Formula::SortAtom(Agent::B),
                    "D" => Formula::DiagAtom,
                    "true" => Formula::Truth,
                    "false" => Formula::Falsity,
                    _ => Formula::Prop(w),
                })
            }
            _ => Err(self.error(vec!["a formula"])),
        }
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        if let Tok::Word(w) = self.peek() {
            if w.len() == 1 {
                if let Some(ag) = Agent::from_tag(w.chars().next().unwrap()) {
                    self.bump();
                    return Ok(ag);
                }
            }
        }
        Err(self.error(vec!["agent tag `a` or `b`"]))
    }
}

/// Parses a formula. Whitespace-insensitive; on failure the error carries the
/// position and the expected-token set.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(vec!["end of input"]));
    }
    Ok(f)
}
