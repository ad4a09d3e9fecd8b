use super::lexer::{tokenize, Token, TokenKind};
use super::{Func, Node, ParseError};

/// Largest magnitude accepted for an integer exponent.
const MAX_EXPONENT: i64 = 4096;

pub(crate) struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    pub fn new(source: &str, variables: &'a [String]) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(source)?,
            cursor: 0,
            variables,
        })
    }

    pub fn parse_all(mut self) -> Result<Node, ParseError> {
        let node = self.expr()?;
        let tok = self.peek();
        match tok.kind {
            TokenKind::Eof => Ok(node),
            TokenKind::RParen => Err(self.error(tok.pos, "unmatched ')'")),
            _ => Err(self.error(tok.pos, "unexpected trailing input")),
        }
    }

    fn peek(&self) -> Token {
        self.tokens[self.cursor].clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.cursor].clone();
        if !matches!(t.kind, TokenKind::Eof) {
            self.cursor += 1;
        }
        t
    }

    fn error(&self, pos: usize, message: &str) -> ParseError {
        ParseError::Syntax {
            pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                TokenKind::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                TokenKind::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if matches!(self.peek().kind, TokenKind::Minus) {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek().kind, TokenKind::Caret) {
            self.bump();
            let k = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), k as i32));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let mut sign = 1;
        if matches!(self.peek().kind, TokenKind::Minus) {
            self.bump();
            sign = -1;
        }
        let tok = self.bump();
        let base = match tok.kind {
            TokenKind::Number { value, integral: true } => value,
            _ => return Err(self.error(tok.pos, "exponent must be an integer literal")),
        };
        if base > MAX_EXPONENT as f64 {
            return Err(self.error(tok.pos, "exponent too large"));
        }
        let base = base as i64;
        let mut value = base;
        if matches!(self.peek().kind, TokenKind::Caret) {
            self.bump();
            let inner = self.exponent()?;
            if inner < 0 && base.abs() != 1 {
                return Err(self.error(tok.pos, "exponent must be an integer"));
            }
            value = match u32::try_from(inner.abs()) {
                Ok(k) => base
                    .checked_pow(k)
                    .ok_or_else(|| self.error(tok.pos, "exponent too large"))?,
                Err(_) => return Err(self.error(tok.pos, "exponent too large")),
            };
        }
        if value > MAX_EXPONENT {
            return Err(self.error(tok.pos, "exponent too large"));
        }
        Ok(sign * value)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::Number { value, .. } => Ok(Node::Num(value)),
            TokenKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    let open = self.bump();
                    if !matches!(open.kind, TokenKind::LParen) {
                        return Err(self.error(open.pos, &format!("expected '(' after {name}")));
                    }
                    let arg = self.expr()?;
                    self.close_paren()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                if name == "i" {
                    return Ok(Node::ImagUnit);
                }
                match self.variables.iter().position(|v| *v == name) {
                    Some(k) => Ok(Node::Var(k)),
                    None => Err(ParseError::Undeclared { name, pos: tok.pos }),
                }
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            TokenKind::Eof => Err(self.error(tok.pos, "unexpected end of input")),
            _ => Err(self.error(tok.pos, "expected a number, variable or '('")),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::RParen => Ok(()),
            TokenKind::Eof => Err(self.error(tok.pos, "unclosed paren")),
            _ => Err(self.error(tok.pos, "expected ')'")),
        }
    }
}
