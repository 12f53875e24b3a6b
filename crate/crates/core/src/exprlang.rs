//! A small expression language evaluated under one arithmetic.
//!
//! ```text
//! relation := expr ( ('==' | '!=' | '<' | '<<' | '<<<') expr )?
//! expr     := term ( ('+' | '-') term )*
//! term     := factor ( '*' factor )*
//! factor   := NUMBER | '(' expr ')'
//! ```
//!
//! Binary operators are left-associative and evaluated strictly left to
//! right, which matters because non-Diophantine addition need not be
//! associative. `-` is the clamped subtraction of [`Arithmetic::sub_idx`].

use std::fmt;

use thiserror::Error;

use crate::arith::{Arithmetic, Kind};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    EqEq,
    Neq,
    Lt,
    Mll,
    Mlll,
}

impl TokenKind {
    fn describe(self) -> &'static str {
        match self {
            TokenKind::Number => "number",
            TokenKind::Plus => "'+'",
            TokenKind::Minus => "'-'",
            TokenKind::Star => "'*'",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::EqEq => "'=='",
            TokenKind::Neq => "'!='",
            TokenKind::Lt => "'<'",
            TokenKind::Mll => "'<<'",
            TokenKind::Mlll => "'<<<'",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset in the input.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unexpected character {ch:?} at offset {offset}")]
    Lex { offset: usize, ch: char },
    #[error("expected {} at offset {offset}, found {found}", expected.join(" or "))]
    Parse {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
}

impl SyntaxError {
    pub fn offset(&self) -> usize {
        match self {
            SyntaxError::Lex { offset, .. } | SyntaxError::Parse { offset, .. } => *offset,
        }
    }
}

/// Longest-match tokenizer: `<<<` before `<<` before `<`.
pub fn tokenize(input: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                if i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    return Err(SyntaxError::Lex { offset: i, ch: '.' });
                }
            }
            TokenKind::Number
        } else {
            let rest = &bytes[i..];
            let (kind, len) = if rest.starts_with(b"<<<") {
                (TokenKind::Mlll, 3)
            } else if rest.starts_with(b"<<") {
                (TokenKind::Mll, 2)
            } else if rest.starts_with(b"==") {
                (TokenKind::EqEq, 2)
            } else if rest.starts_with(b"!=") {
                (TokenKind::Neq, 2)
            } else {
                match c {
                    b'<' => (TokenKind::Lt, 1),
                    b'+' => (TokenKind::Plus, 1),
                    b'-' => (TokenKind::Minus, 1),
                    b'*' => (TokenKind::Star, 1),
                    b'(' => (TokenKind::LParen, 1),
                    b')' => (TokenKind::RParen, 1),
                    _ => {
                        let ch = input[i..].chars().next().unwrap_or('?');
                        return Err(SyntaxError::Lex { offset: i, ch });
                    }
                }
            };
            i += len;
            kind
        };
        tokens.push(Token {
            kind,
            lexeme: input[start..i].to_string(),
            position: start,
        });
    }
    Ok(tokens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Neq,
    Lt,
    Mll,
    Mlll,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "==",
            Rel::Neq => "!=",
            Rel::Lt => "<",
            Rel::Mll => "<<",
            Rel::Mlll => "<<<",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Literal(f64),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    /// Only ever at the root.
    Relation(Rel, Box<Ast>, Box<Ast>),
}

impl Ast {
    pub fn lit(v: f64) -> Ast {
        Ast::Literal(v)
    }

    pub fn bin(op: BinOp, l: Ast, r: Ast) -> Ast {
        Ast::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn rel(rel: Rel, l: Ast, r: Ast) -> Ast {
        Ast::Relation(rel, Box::new(l), Box::new(r))
    }

    fn precedence(&self) -> u8 {
        match self {
            Ast::Literal(_) => 3,
            Ast::Binary(op, ..) => op.precedence(),
            Ast::Relation(..) => 0,
        }
    }
}

/// Prints with the minimal parentheses that re-parse to the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Literal(v) => write!(f, "{v}"),
            Ast::Binary(op, l, r) => {
                let p = op.precedence();
                if l.precedence() < p {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if r.precedence() <= p {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Ast::Relation(rel, l, r) => write!(f, "{l} {} {r}", rel.symbol()),
        }
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error(&self, expected: Vec<&'static str>) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::Parse {
                offset: t.position,
                expected,
                found: format!("'{}'", t.lexeme),
            },
            None => SyntaxError::Parse {
                offset: self.end,
                expected,
                found: "end of input".into(),
            },
        }
    }

    fn relation(&mut self) -> Result<Ast, SyntaxError> {
        let lhs = self.expr()?;
        let rel = match self.peek().map(|t| t.kind) {
            Some(TokenKind::EqEq) => Rel::Eq,
            Some(TokenKind::Neq) => Rel::Neq,
            Some(TokenKind::Lt) => Rel::Lt,
            Some(TokenKind::Mll) => Rel::Mll,
            Some(TokenKind::Mlll) => Rel::Mlll,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.expr()?;
        Ok(Ast::rel(rel, lhs, rhs))
    }

    fn expr(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| t.kind) {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Ast::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.factor()?;
        while self.peek().map(|t| t.kind) == Some(TokenKind::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Ast::bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Ast, SyntaxError> {
        let expected = vec![TokenKind::Number.describe(), TokenKind::LParen.describe()];
        match self.peek() {
            Some(t) if t.kind == TokenKind::Number => {
                let v: f64 = t.lexeme.parse().map_err(|_| self.error(expected))?;
                self.pos += 1;
                Ok(Ast::Literal(v))
            }
            Some(t) if t.kind == TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek().map(|t| t.kind) != Some(TokenKind::RParen) {
                    return Err(self.error(vec![
                        TokenKind::Plus.describe(),
                        TokenKind::Minus.describe(),
                        TokenKind::Star.describe(),
                        TokenKind::RParen.describe(),
                    ]));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error(expected)),
        }
    }
}

/// Parses a token stream; `input_len` positions end-of-input errors.
pub fn parse_tokens(tokens: &[Token], input_len: usize) -> Result<Ast, SyntaxError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        end: input_len,
    };
    let ast = p.relation()?;
    if p.pos < tokens.len() {
        let mut expected = vec!["end of input"];
        if !matches!(ast, Ast::Relation(..)) {
            expected.push("operator");
        }
        return Err(p.error(expected));
    }
    Ok(ast)
}

pub fn parse(input: &str) -> Result<Ast, SyntaxError> {
    let tokens = tokenize(input)?;
    parse_tokens(&tokens, input.len())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    /// Index of the resulting carrier value.
    Value(usize),
    Bool(bool),
}

/// A value rendered for output, with its numeric value for comparisons.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalResult {
    Value { value: f64, text: String },
    Bool(bool),
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalResult::Value { text, .. } => f.write_str(text),
            EvalResult::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Literals must sit on the grid; unlike `Carrier::index_of` no rounding to
/// a nearby point is applied beyond the grid tolerance.
fn literal_index(ar: &Arithmetic, v: f64) -> Result<usize, Error> {
    ar.index(v)
}

fn eval_value(ast: &Ast, ar: &Arithmetic) -> Result<usize, Error> {
    match ast {
        Ast::Literal(v) => literal_index(ar, *v),
        Ast::Binary(op, l, r) => {
            let a = eval_value(l, ar)?;
            let b = eval_value(r, ar)?;
            match op {
                BinOp::Add => ar.add_idx(a, b),
                BinOp::Sub => ar.sub_idx(a, b),
                BinOp::Mul => ar.mul_idx(a, b),
            }
        }
        Ast::Relation(..) => Err(Error::InvalidArgument(
            "relations may only appear at the top level".into(),
        )),
    }
}

/// Evaluates under `ar`. `<<` uses the projective sense (`b + a = b`) in
/// projective arithmetics and the dual sense (`b + a = succ(b)`) in dual ones.
pub fn eval(ast: &Ast, ar: &Arithmetic) -> Result<Outcome, Error> {
    match ast {
        Ast::Relation(rel, l, r) => {
            let a = eval_value(l, ar)?;
            let b = eval_value(r, ar)?;
            let holds = match rel {
                Rel::Eq => a == b,
                Rel::Neq => a != b,
                Rel::Lt => a < b,
                Rel::Mll => match ar.kind() {
                    Kind::Projective => ar.mll_idx(a, b)?,
                    Kind::Dual => ar.mll_dual_idx(a, b)?,
                },
                Rel::Mlll => ar.mlll_idx(a, b)?,
            };
            Ok(Outcome::Bool(holds))
        }
        _ => eval_value(ast, ar).map(Outcome::Value),
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Arith(#[from] Error),
}

/// Parses and evaluates `input`, rendering values with the carrier's
/// precision.
pub fn eval_str(input: &str, ar: &Arithmetic) -> Result<EvalResult, EvalError> {
    let ast = parse(input)?;
    Ok(match eval(&ast, ar)? {
        Outcome::Value(i) => EvalResult::Value {
            value: ar.value(i),
            text: ar.format(i),
        },
        Outcome::Bool(b) => EvalResult::Bool(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tokenize_examples() {
        use TokenKind::*;
        assert_eq!(kinds("2+2"), vec![Number, Plus, Number]);
        assert_eq!(kinds("1 <<< 5"), vec![Number, Mlll, Number]);
        assert_eq!(kinds("1<<5<3"), vec![Number, Mll, Number, Lt, Number]);
        assert_eq!(kinds("0.5 != 0.25"), vec![Number, Neq, Number]);
        assert_eq!(
            tokenize("2 $ 2"),
            Err(SyntaxError::Lex { offset: 2, ch: '$' })
        );
        assert_eq!(tokenize("1."), Err(SyntaxError::Lex { offset: 1, ch: '.' }));
    }

    #[test]
    fn positions_increase_and_lexemes_reconstruct() {
        let input = " (1 + 22) <<< 3.25*4 ";
        let toks = tokenize(input).unwrap();
        assert!(toks.windows(2).all(|w| w[0].position < w[1].position));
        let joined: String = toks.iter().map(|t| t.lexeme.as_str()).collect();
        let stripped: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(joined, stripped);
    }

    #[test]
    fn parse_examples() {
        use BinOp::*;
        assert_eq!(
            parse("2+3*4").unwrap(),
            Ast::bin(Add, Ast::lit(2.), Ast::bin(Mul, Ast::lit(3.), Ast::lit(4.)))
        );
        assert_eq!(
            parse("1+2+3").unwrap(),
            Ast::bin(Add, Ast::bin(Add, Ast::lit(1.), Ast::lit(2.)), Ast::lit(3.))
        );
        match parse("(2+") {
            Err(SyntaxError::Parse {
                offset, expected, ..
            }) => {
                assert_eq!(offset, 3);
                assert!(expected.contains(&"number"));
                assert!(expected.contains(&"'('"));
            }
            other => panic!("{other:?}"),
        }
        match parse("(2") {
            Err(SyntaxError::Parse { expected, .. }) => assert!(expected.contains(&"')'")),
            other => panic!("{other:?}"),
        }
        assert!(parse("1 == 2 == 3").is_err());
        assert!(parse("(1 == 2)").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn pretty_print_keeps_grouping() {
        for s in [
            "1 - (2 - 3)",
            "(1 + 2) * 3",
            "1 + 2 * 3",
            "1 + 2 + 3 == 1 + (2 + 3)",
        ] {
            let ast = parse(s).unwrap();
            assert_eq!(ast.to_string(), s);
            assert_eq!(parse(&ast.to_string()).unwrap(), ast);
        }
    }

    fn run(spec: &str, expr: &str) -> String {
        let ar: Arithmetic = spec.parse().unwrap();
        eval_str(expr, &ar).unwrap().to_string()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(run("projective:pow:1.5@int:0:100", "2+2"), "3");
        assert_eq!(
            run("projective:pow:1.5@int:0:100", "(2+3)+3 == 2+(3+3)"),
            "false"
        );
        assert_eq!(run("projective:pow:2@int:0:100", "1 << 5"), "true");
        assert_eq!(run("projective:id@int:0:100", "2+2"), "4");
        assert_eq!(run("dual:id@int:0:100", "2+2"), "4");
        assert_eq!(run("dual:id@int:0:100", "1 << 5"), "true");
        assert_eq!(run("projective:id@int:0:100", "3 < 5"), "true");
        assert_eq!(run("projective:id@int:0:100", "7 - 3 - 1"), "3");
        assert_eq!(
            run("projective:atanh:1@grid:0:1:0.001", "0.5 + 0.5"),
            "0.800"
        );
    }

    #[test]
    fn eval_errors() {
        let ar: Arithmetic = "projective:atanh:1@grid:0:1:0.001".parse().unwrap();
        assert!(matches!(
            eval_str("0.0005 + 0", &ar),
            Err(EvalError::Arith(Error::OffCarrier { .. }))
        ));
        assert!(matches!(
            eval_str("0.5 * 0.5", &ar),
            Err(EvalError::Arith(Error::MultiplicationUnavailable))
        ));
        let d: Arithmetic = "dual:id@int:0:10".parse().unwrap();
        assert!(matches!(
            eval_str("9+9", &d),
            Err(EvalError::Arith(Error::CarrierExhausted))
        ));
        assert!(matches!(
            eval_str("9 +", &d),
            Err(EvalError::Syntax(SyntaxError::Parse { offset: 3, .. }))
        ));
    }
}
