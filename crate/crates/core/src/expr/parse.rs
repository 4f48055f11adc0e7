//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := base ('^' ['-'|'+'] number)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')'
//! func   := sin | cos | exp | ln | sqrt
//! ident  := 'x' digits            (1-based coordinate index)
//! number := decimal literal | pi | e
//! ```

use std::f64::consts::{E, PI};

use super::{BinaryOp, Node, ParseError, UnaryOp};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

pub(super) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    dimension: usize,
    /// current token and its byte offset
    tok: Tok,
    tok_at: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, dimension: usize) -> Self {
        Parser {
            src,
            pos: 0,
            dimension,
            tok: Tok::End,
            tok_at: 0,
        }
    }

    pub(super) fn parse(mut self) -> Result<Node, ParseError> {
        self.advance()?;
        let node = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.unexpected("expected operator or end of input"));
        }
        Ok(node)
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match &self.tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        };
        ParseError::Syntax {
            offset: self.tok_at,
            message: format!("{what}, found {found}"),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_at = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        self.tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.number()?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            _ => {
                let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok(())
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > s
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return Err(ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        // exponent only when followed by digits, so `2e` stays `2` then `e`
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        self.src[start..p]
            .parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            })
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinaryOp::Add,
                Tok::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinaryOp::Mul,
                Tok::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            let inner = self.factor()?;
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.base()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.advance()?;
        let sign = match self.tok {
            Tok::Op('-') => {
                self.advance()?;
                -1.0
            }
            Tok::Op('+') => {
                self.advance()?;
                1.0
            }
            _ => 1.0,
        };
        let exponent = match &self.tok {
            Tok::Num(v) => *v,
            Tok::Ident(s) if s == "pi" => PI,
            Tok::Ident(s) if s == "e" => E,
            _ => return Err(self.unexpected("expected a constant exponent")),
        };
        self.advance()?;
        Ok(Node::Pow(Box::new(base), sign * exponent))
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.tok_at;
                self.advance()?;
                self.identifier(&name, at)
            }
            _ => Err(self.unexpected("expected a number, variable, function or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(self.unexpected("expected `)`"));
        }
        self.advance()
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Node, ParseError> {
        let func = match name {
            "pi" => return Ok(Node::Const(PI)),
            "e" => return Ok(Node::Const(E)),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "exp" => Some(UnaryOp::Exp),
            "ln" => Some(UnaryOp::Ln),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        };
        if let Some(op) = func {
            if self.tok != Tok::LParen {
                return Err(self.unexpected(&format!("expected `(` after `{name}`")));
            }
            self.advance()?;
            let arg = self.expr()?;
            self.expect_rparen()?;
            return Ok(Node::Unary(op, Box::new(arg)));
        }
        let digits = name.strip_prefix('x').filter(|d| {
            !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())
        });
        let Some(digits) = digits else {
            return Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: at,
            });
        };
        let index: usize = digits.parse().map_err(|_| ParseError::UnknownIdentifier {
            name: name.to_string(),
            offset: at,
        })?;
        if index == 0 || index > self.dimension {
            return Err(ParseError::VariableOutOfRange {
                index,
                dimension: self.dimension,
                offset: at,
            });
        }
        Ok(Node::Var(index - 1))
    }
}
