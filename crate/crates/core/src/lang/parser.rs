//! Recursive-descent parser for procedure declarations.
//!
//! The parser produces a normal form so that rendering and re-parsing is an
//! identity on ASTs:
//! - a procedure body is always `Stmt::Seq` whose items are neither `Seq`
//!   nor `Skip` (nested `begin … end` blocks are spliced in, empty
//!   statements dropped);
//! - a branch of an `if` holding `begin … end` becomes `Skip` when empty, the
//!   lone statement when it has one item, and `Seq` otherwise.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::token::{tokenize, LexError, Token, TokenKind};
use super::{Dialect, Expr, ProcDecl, Span, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("expected {expected} but found {found} at {span}")]
    Unexpected {
        expected: String,
        found: String,
        span: Span,
    },
    #[error("unbound variable {name:?} at {span} (the only variable is the parameter {param:?})")]
    UnboundVariable {
        name: String,
        param: String,
        span: Span,
    },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex(e) => e.span(),
            ParseError::Unexpected { span, .. } | ParseError::UnboundVariable { span, .. } => *span,
        }
    }
}

/// Parses one procedure declaration. The whole text must be consumed.
pub fn parse_decl(text: &str, dialect: Dialect) -> Result<ProcDecl, ParseError> {
    let tokens = tokenize(text, dialect)?;
    let mut comments = Vec::new();
    let mut code = Vec::new();
    for t in tokens {
        if t.kind == TokenKind::Comment {
            comments.push(t.text().unwrap_or_default());
        } else {
            code.push(t);
        }
    }
    let mut p = Parser {
        tokens: code,
        pos: 0,
        end: text.len(),
        param: String::new(),
    };
    let (name, param, body) = p.decl()?;
    Ok(ProcDecl {
        name,
        param,
        body,
        comments,
        dialect,
        source: String::from(text),
    })
}

/// True iff the declaration has exactly one parameter of type string. The
/// grammar only admits that shape, so every parsed declaration passes; the
/// check exists so analyzers can state it explicitly.
pub fn validate_signature(decl: &ProcDecl) -> bool {
    decl.dialect.is_valid_identifier(&decl.param) && decl.dialect.is_valid_identifier(&decl.name)
}

enum Parsed {
    Empty,
    One(Stmt),
    Block(Vec<Stmt>),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    param: String,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> Span {
        self.peek()
            .map_or(Span::new(self.end, self.end), |t| t.span)
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            Some(t) => format!("{} {:?}", t.kind, t.lexeme),
            None => "end of input".to_string(),
        };
        Err(ParseError::Unexpected {
            expected: expected.to_string(),
            found,
            span: self.here(),
        })
    }

    fn at_keyword(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(word))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().is_some_and(|t| t.is_punct(c))
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.at_keyword(word) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{word}`"))
        }
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.at_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let s = t.lexeme.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn decl(&mut self) -> Result<(String, String, Stmt), ParseError> {
        self.keyword("procedure")?;
        let name = self.ident("procedure name")?;
        if !self.at_punct('(') {
            return self.unexpected("parameter list `(s: string)`");
        }
        self.pos += 1;
        let param = self.ident("parameter name")?;
        self.punct(':')?;
        self.keyword("string")?;
        self.punct(')')?;
        self.punct(';')?;
        self.param = param.clone();
        if !self.at_keyword("begin") {
            return self.unexpected("`begin`");
        }
        let body = self.compound()?;
        if self.at_punct(';') {
            self.pos += 1;
        }
        if self.peek().is_some() {
            return self.unexpected("end of input");
        }
        Ok((name, param, Stmt::Seq(body)))
    }

    /// `begin stmt {; stmt} end`, returned as a flat item list.
    fn compound(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.keyword("begin")?;
        let mut items = Vec::new();
        loop {
            match self.stmt()? {
                Parsed::Empty => {}
                Parsed::One(s) => items.push(s),
                Parsed::Block(inner) => items.extend(inner),
            }
            if self.at_punct(';') {
                self.pos += 1;
                continue;
            }
            if self.at_keyword("end") {
                self.pos += 1;
                return Ok(items);
            }
            return self.unexpected("`;` or `end`");
        }
    }

    fn branch(&mut self) -> Result<Stmt, ParseError> {
        Ok(match self.stmt()? {
            Parsed::Empty => Stmt::Skip,
            Parsed::One(s) => s,
            Parsed::Block(mut items) => match items.len() {
                0 => Stmt::Skip,
                1 => items.pop().unwrap_or(Stmt::Skip),
                _ => Stmt::Seq(items),
            },
        })
    }

    fn stmt(&mut self) -> Result<Parsed, ParseError> {
        let Some(tok) = self.peek() else {
            return self.unexpected("statement");
        };
        if tok.is_punct(';') || tok.is_keyword("end") || tok.is_keyword("else") {
            return Ok(Parsed::Empty);
        }
        if tok.is_keyword("begin") {
            return Ok(Parsed::Block(self.compound()?));
        }
        if tok.is_keyword("if") {
            self.pos += 1;
            let lhs = self.expr()?;
            self.punct('=')?;
            let rhs = self.expr()?;
            self.keyword("then")?;
            let then = Box::new(self.branch()?);
            let otherwise = if self.at_keyword("else") {
                self.pos += 1;
                Some(Box::new(self.branch()?))
            } else {
                None
            };
            return Ok(Parsed::One(Stmt::If {
                lhs,
                rhs,
                then,
                otherwise,
            }));
        }
        if tok.is_keyword("print") {
            self.pos += 1;
            self.punct('(')?;
            let arg = self.expr()?;
            self.punct(')')?;
            return Ok(Parsed::One(Stmt::Print(arg)));
        }
        if tok.kind == TokenKind::Identifier {
            let callee = self.ident("procedure name")?;
            self.punct('(')?;
            let arg = self.expr()?;
            self.punct(')')?;
            return Ok(Parsed::One(Stmt::Call { callee, arg }));
        }
        self.unexpected("statement")
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.primary()?;
        while self.at_punct('+') {
            self.pos += 1;
            let right = self.primary()?;
            left = Expr::concat(left, right);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("expression");
        };
        match tok.kind {
            TokenKind::StringLiteral => {
                self.pos += 1;
                Ok(Expr::Lit(tok.text().unwrap_or_default()))
            }
            TokenKind::Identifier => {
                self.pos += 1;
                if self.at_punct('(') {
                    self.pos += 1;
                    let a = self.expr()?;
                    self.punct(',')?;
                    let b = self.expr()?;
                    self.punct(')')?;
                    Ok(Expr::call(tok.lexeme, a, b))
                } else if tok.lexeme == self.param {
                    Ok(Expr::Var(tok.lexeme))
                } else {
                    Err(ParseError::UnboundVariable {
                        name: tok.lexeme,
                        param: self.param.clone(),
                        span: tok.span,
                    })
                }
            }
            TokenKind::Punctuation if tok.is_punct('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.punct(')')?;
                Ok(e)
            }
            _ => self.unexpected("expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn loop_text() {
        let d = parse_decl(
            "procedure loop (s: string); begin loop (s) end",
            Dialect::Plain,
        )
        .unwrap();
        assert_eq!(d.name, "loop");
        assert_eq!(d.param, "s");
        assert_eq!(
            d.body,
            Stmt::Seq(vec![Stmt::Call {
                callee: "loop".into(),
                arg: Expr::var("s")
            }])
        );
        assert!(validate_signature(&d));
    }

    #[test]
    fn diag1_text() {
        let src =
            "procedure diag1 (s: string);\nbegin\n  if halts1 (s, s) = 'yes' then diag1 (s)\nend";
        let d = parse_decl(src, Dialect::Plain).unwrap();
        assert_eq!(
            d.body,
            Stmt::Seq(vec![Stmt::If {
                lhs: Expr::call("halts1", Expr::var("s"), Expr::var("s")),
                rhs: Expr::lit("yes"),
                then: Box::new(Stmt::Call {
                    callee: "diag1".into(),
                    arg: Expr::var("s")
                }),
                otherwise: None,
            }])
        );
    }

    #[test]
    fn missing_parameter_list() {
        let err = parse_decl("procedure x", Dialect::Plain).unwrap_err();
        match err {
            ParseError::Unexpected {
                expected, found, ..
            } => {
                assert!(expected.contains("parameter list"));
                assert_eq!(found, "end of input");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stop_and_comments() {
        let d = parse_decl(
            "procedure stop (s: string); { first } begin { second } end",
            Dialect::Plain,
        )
        .unwrap();
        assert_eq!(d.body, Stmt::Seq(vec![]));
        assert_eq!(
            d.comments,
            vec![" first ".to_string(), " second ".to_string()]
        );
        assert!(validate_signature(&d));
    }

    #[test]
    fn normal_form() {
        let d = parse_decl(
            "procedure p (s: string); begin ; begin print (s); ; print ('a') end; if s = 'a' then begin end else begin print (s) end; end",
            Dialect::Plain,
        )
        .unwrap();
        let Stmt::Seq(items) = &d.body else { panic!() };
        assert_eq!(items.len(), 3);
        assert_eq!(
            items[2],
            Stmt::If {
                lhs: Expr::var("s"),
                rhs: Expr::lit("a"),
                then: Box::new(Stmt::Skip),
                otherwise: Some(Box::new(Stmt::Print(Expr::var("s")))),
            }
        );
    }

    #[test]
    fn dangling_else_binds_innermost() {
        let d = parse_decl(
            "procedure p (s: string); begin if s = 'a' then if s = 'b' then print (s) else print ('c') end",
            Dialect::Plain,
        )
        .unwrap();
        let Stmt::Seq(items) = &d.body else { panic!() };
        let Stmt::If {
            then, otherwise, ..
        } = &items[0]
        else {
            panic!()
        };
        assert!(otherwise.is_none());
        assert!(matches!(
            **then,
            Stmt::If {
                otherwise: Some(_),
                ..
            }
        ));
    }

    #[test]
    fn concat_is_left_associative() {
        let d = parse_decl(
            "procedure p (s: string); begin print (s + 'a' + ('b' + s)) end",
            Dialect::Plain,
        )
        .unwrap();
        let Stmt::Seq(items) = &d.body else { panic!() };
        assert_eq!(
            items[0],
            Stmt::Print(Expr::concat(
                Expr::concat(Expr::var("s"), Expr::lit("a")),
                Expr::concat(Expr::lit("b"), Expr::var("s"))
            ))
        );
    }

    #[test]
    fn unbound_variable() {
        assert!(matches!(
            parse_decl(
                "procedure p (s: string); begin print (t) end",
                Dialect::Plain
            ),
            Err(ParseError::UnboundVariable { .. })
        ));
    }

    #[test]
    fn trailing_semicolon_and_garbage() {
        assert!(parse_decl("procedure p (s: string); begin end;", Dialect::Plain).is_ok());
        assert!(parse_decl("procedure p (s: string); begin end end", Dialect::Plain).is_err());
        assert!(parse_decl(
            "procedure p (s: string, t: string); begin end",
            Dialect::Plain
        )
        .is_err());
        assert!(parse_decl("garbage", Dialect::Plain).is_err());
    }

    #[test]
    fn dialect_applies_to_names() {
        let src = "procedure A_ (s: string); begin print('A_') end";
        assert!(parse_decl(src, Dialect::Plain).is_err());
        assert_eq!(parse_decl(src, Dialect::Underscored).unwrap().name, "A_");
    }
}
