use super::lexer::{Token, TokenKind};
use super::{BinOp, Expr, ExprError, Func};

/// Recursive-descent parser for
///
/// ```text
/// expr   := term (('+'|'-') term)*
/// term   := factor (('*'|'/') factor)*
/// factor := '-' factor | power
/// power  := atom ('^' factor)?
/// atom   := NUMBER | 't' | 'x' | FUNC '(' expr ')' | '(' expr ')'
/// ```
pub fn parse(tokens: &[Token]) -> Result<Expr, ExprError> {
    let end = tokens
        .last()
        .map(|t| t.offset + token_len(&t.kind))
        .unwrap_or(0);
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };
    let e = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(p.unexpected(tok, &["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}

fn token_len(kind: &TokenKind) -> usize {
    match kind {
        TokenKind::Ident(s) => s.len(),
        // numbers only need a position past the start for end-of-input errors
        _ => 1,
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, tok: &Token, expected: &[&str]) -> ExprError {
        ExprError::Syntax {
            offset: tok.offset,
            found: tok.kind.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eof(&self, expected: &[&str]) -> ExprError {
        ExprError::Syntax {
            offset: self.end,
            found: "end of input".to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&TokenKind::Plus) {
                BinOp::Add
            } else if self.eat(&TokenKind::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(&TokenKind::Star) {
                BinOp::Mul
            } else if self.eat(&TokenKind::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            // exponent is a factor, which makes `^` right-associative
            let exp = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        const ATOM: &[&str] = &["number", "`t`", "`x`", "function", "`(`"];
        let Some(tok) = self.bump() else {
            return Err(self.eof(ATOM));
        };
        match &tok.kind {
            TokenKind::Number(v) => Ok(Expr::Num(*v)),
            TokenKind::Ident(name) if name == "t" => Ok(Expr::T),
            TokenKind::Ident(name) if name == "x" => Ok(Expr::X),
            TokenKind::Ident(name) => {
                let Some(func) = Func::from_name(name) else {
                    return Err(ExprError::UnknownIdent {
                        offset: tok.offset,
                        name: name.clone(),
                    });
                };
                self.expect(&TokenKind::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(tok, ATOM)),
        }
    }

    fn expect(&mut self, kind: &TokenKind, label: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(tok) if &tok.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.unexpected(tok, &[label])),
            None => Err(self.eof(&[label])),
        }
    }
}
