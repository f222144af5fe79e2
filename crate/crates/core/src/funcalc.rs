//! A small expression language over one real variable.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?            right associative, binds tighter than '-'
//! atom    := number | var | 'e' | func '(' expr ')' | ('min' | 'max') '(' expr (',' expr)* ')'
//!          | 'piece' '(' var '<=' const ':' expr (';' var '<=' const ':' expr)* ';' 'else' ':' expr ')'
//!          | '(' expr ')'
//! func    := 'exp' | 'ln' | 'sqrt'
//! ```
//!
//! Piecewise guards are closed on the left branch: `x <= c` selects its
//! branch when the variable is at most `c`, and guards must strictly increase.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> Self {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("unknown identifier `{name}` at {span}")]
    UnknownIdentifier { name: String, span: SourceSpan },
    #[error("piecewise guards must be strictly increasing (at {span})")]
    GuardOrder { span: SourceSpan },
    #[error("empty expression")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainErrorKind {
    LogOfNonPositive,
    SqrtOfNegative,
    DivisionByZero,
    ZeroToNegativePower,
    NonFinite,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainErrorKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainErrorKind::SqrtOfNegative => "square root of a negative value",
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::ZeroToNegativePower => "zero raised to a negative power",
            DomainErrorKind::NonFinite => "non-finite intermediate value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("domain error at {span}: {kind} (variable = {at})")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub span: SourceSpan,
    pub at: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

#[derive(Clone, Debug)]
enum Kind {
    Num(f64),
    Var,
    /// `1 - var`, evaluated from the complement the caller supplies; only
    /// produced by folding.
    Comp,
    Neg(Box<Node>),
    Call(Func, Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Ext(Extremum, Vec<Node>),
    Piece { branches: Vec<(f64, Node)>, otherwise: Box<Node> },
}

#[derive(Clone, Debug)]
struct Node {
    kind: Kind,
    span: SourceSpan,
}

/// A parsed function of one variable. Immutable; evaluation is pure.
#[derive(Clone, Debug)]
pub struct Expr {
    root: Node,
    // `root` with constant subtrees folded, for evaluation
    folded: Node,
    var: String,
    text: String,
}

impl Expr {
    /// Parses `text`, taking the variable to be `x` if it appears (and `p`
    /// does not), otherwise `p`.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let var = if mentions(text, "x") && !mentions(text, "p") { "x" } else { "p" };
        Self::parse_in(text, var)
    }

    /// Parses `text` with `var` as the only admissible variable name.
    pub fn parse_in(text: &str, var: &str) -> Result<Expr, ParseError> {
        let tokens = lex(text)?;
        if tokens.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut parser = Parser { tokens: &tokens, pos: 0, var, len: text.len() };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError::Syntax { message: format!("unexpected `{}`", tok.kind), span: tok.span });
        }
        let folded = fold(&root);
        Ok(Expr { root, folded, var: var.to_string(), text: text.to_string() })
    }

    pub fn variable(&self) -> &str {
        &self.var
    }

    pub fn source(&self) -> &str {
        &self.text
    }

    pub fn eval(&self, value: f64) -> Result<f64, EvalError> {
        eval_node(&self.folded, value, 1.0 - value)
    }

    /// The value at `1 - c`, with every literal `1 - var` taken to be `c`
    /// exactly. Resolves `-ln(1-p)` and the like for `c` far below the
    /// spacing of doubles near 1.
    pub fn eval_complement(&self, c: f64) -> Result<f64, EvalError> {
        eval_node(&self.folded, 1.0 - c, c)
    }

    /// Canonical, fully parenthesised rendering that reparses to the same function.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.root, &self.var, &mut out);
        out
    }

    pub fn uses_variable(&self) -> bool {
        uses_var(&self.root)
    }

    /// For a top-level piecewise expression, the absolute jump between the
    /// two adjoining branches at every guard.
    pub fn piecewise_jumps(&self) -> Option<Vec<(f64, f64)>> {
        let Kind::Piece { branches, otherwise } = &self.root.kind else {
            return None;
        };
        let mut jumps = Vec::with_capacity(branches.len());
        for (i, (guard, branch)) in branches.iter().enumerate() {
            let next = branches.get(i + 1).map(|(_, n)| n).unwrap_or(otherwise);
            let left = eval_node(branch, *guard, 1.0 - *guard).unwrap_or(f64::NAN);
            let right = eval_node(next, *guard, 1.0 - *guard).unwrap_or(f64::NAN);
            jumps.push((*guard, (left - right).abs()));
        }
        Some(jumps)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

fn mentions(text: &str, ident: &str) -> bool {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).any(|w| w == ident)
}

fn finite(v: f64, span: SourceSpan, at: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError { kind: DomainErrorKind::NonFinite, span, at })
    }
}

fn eval_node(node: &Node, x: f64, cx: f64) -> Result<f64, EvalError> {
    let fail = |kind| Err(EvalError { kind, span: node.span, at: x });
    let v = match &node.kind {
        Kind::Num(v) => *v,
        Kind::Var => x,
        Kind::Comp => cx,
        Kind::Neg(inner) => -eval_node(inner, x, cx)?,
        Kind::Call(func, arg) => {
            let a = eval_node(arg, x, cx)?;
            match func {
                Func::Exp => a.exp(),
                Func::Ln if a <= 0.0 => return fail(DomainErrorKind::LogOfNonPositive),
                Func::Ln => a.ln(),
                Func::Sqrt if a < 0.0 => return fail(DomainErrorKind::SqrtOfNegative),
                Func::Sqrt => a.sqrt(),
            }
        }
        Kind::Bin(op, lhs, rhs) => {
            let a = eval_node(lhs, x, cx)?;
            let b = eval_node(rhs, x, cx)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if b == 0.0 => return fail(DomainErrorKind::DivisionByZero),
                BinOp::Div => a / b,
                BinOp::Pow if a == 0.0 && b < 0.0 => return fail(DomainErrorKind::ZeroToNegativePower),
                BinOp::Pow if b.fract() == 0.0 && b.abs() <= 64.0 => a.powi(b as i32),
                BinOp::Pow => a.powf(b),
            }
        }
        Kind::Ext(which, args) => {
            let mut acc = eval_node(&args[0], x, cx)?;
            for arg in &args[1..] {
                let v = eval_node(arg, x, cx)?;
                acc = match which {
                    Extremum::Min => acc.min(v),
                    Extremum::Max => acc.max(v),
                };
            }
            acc
        }
        Kind::Piece { branches, otherwise } => {
            let chosen = branches.iter().find(|(guard, _)| x <= *guard).map(|(_, n)| n).unwrap_or(otherwise);
            eval_node(chosen, x, cx)?
        }
    };
    finite(v, node.span, x)
}

/// Replaces every variable-free subtree that evaluates cleanly by its value.
/// Subtrees that raise a domain error are kept so the error keeps its span.
fn fold(node: &Node) -> Node {
    if !uses_var(node) {
        if let Ok(v) = eval_node(node, 0.0, 1.0) {
            return Node { kind: Kind::Num(v), span: node.span };
        }
    }
    let kind = match &node.kind {
        Kind::Num(_) | Kind::Var | Kind::Comp => node.kind.clone(),
        Kind::Neg(n) => Kind::Neg(Box::new(fold(n))),
        Kind::Call(f, n) => Kind::Call(*f, Box::new(fold(n))),
        Kind::Bin(op, a, b) => {
            let (a, b) = (fold(a), fold(b));
            match (op, &a.kind, &b.kind) {
                (BinOp::Sub, Kind::Num(one), Kind::Var) if *one == 1.0 => Kind::Comp,
                _ => Kind::Bin(*op, Box::new(a), Box::new(b)),
            }
        }
        Kind::Ext(e, args) => Kind::Ext(*e, args.iter().map(fold).collect()),
        Kind::Piece { branches, otherwise } => Kind::Piece {
            branches: branches.iter().map(|(g, n)| (*g, fold(n))).collect(),
            otherwise: Box::new(fold(otherwise)),
        },
    };
    Node { kind, span: node.span }
}

fn uses_var(node: &Node) -> bool {
    match &node.kind {
        Kind::Num(_) => false,
        Kind::Var | Kind::Comp => true,
        Kind::Neg(n) | Kind::Call(_, n) => uses_var(n),
        Kind::Bin(_, a, b) => uses_var(a) || uses_var(b),
        Kind::Ext(_, args) => args.iter().any(uses_var),
        Kind::Piece { .. } => true,
    }
}

fn render_num(v: f64, out: &mut String) {
    // `{:?}` is the shortest representation that round-trips
    let s = format!("{v:?}");
    if v < 0.0 {
        out.push('(');
        out.push_str(&s);
        out.push(')');
    } else {
        out.push_str(&s);
    }
}

fn render_node(node: &Node, var: &str, out: &mut String) {
    match &node.kind {
        Kind::Num(v) => render_num(*v, out),
        Kind::Var => out.push_str(var),
        Kind::Comp => {
            out.push_str("(1 - ");
            out.push_str(var);
            out.push(')');
        }
        Kind::Neg(inner) => {
            out.push_str("(-");
            render_node(inner, var, out);
            out.push(')');
        }
        Kind::Call(func, arg) => {
            out.push_str(match func {
                Func::Exp => "exp(",
                Func::Ln => "ln(",
                Func::Sqrt => "sqrt(",
            });
            render_node(arg, var, out);
            out.push(')');
        }
        Kind::Bin(op, a, b) => {
            out.push('(');
            render_node(a, var, out);
            out.push_str(match op {
                BinOp::Add => " + ",
                BinOp::Sub => " - ",
                BinOp::Mul => " * ",
                BinOp::Div => " / ",
                BinOp::Pow => " ^ ",
            });
            render_node(b, var, out);
            out.push(')');
        }
        Kind::Ext(which, args) => {
            out.push_str(if *which == Extremum::Min { "min(" } else { "max(" });
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_node(arg, var, out);
            }
            out.push(')');
        }
        Kind::Piece { branches, otherwise } => {
            out.push_str("piece(");
            for (guard, branch) in branches {
                out.push_str(var);
                out.push_str(" <= ");
                render_num(*guard, out);
                out.push_str(" : ");
                render_node(branch, var, out);
                out.push_str(" ; ");
            }
            out.push_str("else : ");
            render_node(otherwise, var, out);
            out.push(')');
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2*e` stays a product
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let span = SourceSpan::new(start, i);
            let v: f64 = text[start..i].parse().map_err(|_| ParseError::Syntax {
                message: format!("malformed number `{}`", &text[start..i]),
                span,
            })?;
            out.push(Token { kind: Tok::Num(v), span });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { kind: Tok::Ident(text[start..i].to_string()), span: SourceSpan::new(start, i) });
            continue;
        }
        let sym = match c {
            b'<' if bytes.get(i + 1) == Some(&b'=') => "<=",
            b'+' => "+",
            b'-' => "-",
            b'*' => "*",
            b'/' => "/",
            b'^' => "^",
            b'(' => "(",
            b')' => ")",
            b',' => ",",
            b';' => ";",
            b':' => ":",
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    message: format!("unexpected character `{ch}`"),
                    span: SourceSpan::new(i, i + ch.len_utf8()),
                });
            }
        };
        i += sym.len();
        out.push(Token { kind: Tok::Sym(sym), span: SourceSpan::new(start, i) });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    var: &'a str,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: Tok::Sym(s), .. }) if *s == sym)
    }

    fn end_span(&self) -> SourceSpan {
        SourceSpan::new(self.len, self.len)
    }

    fn expect(&mut self, sym: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(Token { kind: Tok::Sym(s), span }) if *s == sym => {
                self.pos += 1;
                Ok(*span)
            }
            Some(tok) => Err(ParseError::Syntax { message: format!("expected `{sym}`, found `{}`", tok.kind), span: tok.span }),
            None => Err(ParseError::Syntax { message: format!("expected `{sym}` at end of input"), span: self.end_span() }),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.at_sym("+") {
                BinOp::Add
            } else if self.at_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Node { kind: Kind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at_sym("*") {
                BinOp::Mul
            } else if self.at_sym("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Node { kind: Kind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.at_sym("-") {
            let start = self.peek().map(|t| t.span).unwrap_or(self.end_span());
            self.pos += 1;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Node { kind: Kind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.at_sym("^") {
            self.pos += 1;
            let exponent = self.unary()?;
            let span = base.span.join(exponent.span);
            return Ok(Node { kind: Kind::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)), span });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Some(tok) = self.peek() else {
            return Err(ParseError::Syntax { message: "unexpected end of input".into(), span: self.end_span() });
        };
        self.pos += 1;
        match &tok.kind {
            Tok::Num(v) => Ok(Node { kind: Kind::Num(*v), span: tok.span }),
            Tok::Sym("(") => {
                let inner = self.expr()?;
                let close = self.expect(")")?;
                Ok(Node { kind: inner.kind, span: tok.span.join(close) })
            }
            Tok::Sym(s) => Err(ParseError::Syntax { message: format!("unexpected `{s}`"), span: tok.span }),
            Tok::Ident(name) => self.ident(name, tok.span),
        }
    }

    fn ident(&mut self, name: &str, span: SourceSpan) -> Result<Node, ParseError> {
        match name {
            _ if name == self.var => Ok(Node { kind: Kind::Var, span }),
            "e" => Ok(Node { kind: Kind::Num(std::f64::consts::E), span }),
            "exp" | "ln" | "sqrt" => {
                let func = match name {
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    _ => Func::Sqrt,
                };
                self.expect("(")?;
                let arg = self.expr()?;
                let close = self.expect(")")?;
                Ok(Node { kind: Kind::Call(func, Box::new(arg)), span: span.join(close) })
            }
            "min" | "max" => {
                let which = if name == "min" { Extremum::Min } else { Extremum::Max };
                self.expect("(")?;
                let mut args = vec![self.expr()?];
                while self.at_sym(",") {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                let close = self.expect(")")?;
                Ok(Node { kind: Kind::Ext(which, args), span: span.join(close) })
            }
            "piece" => self.piece(span),
            _ => Err(ParseError::UnknownIdentifier { name: name.to_string(), span }),
        }
    }

    fn piece(&mut self, start: SourceSpan) -> Result<Node, ParseError> {
        self.expect("(")?;
        let mut branches: Vec<(f64, Node)> = Vec::new();
        loop {
            match self.peek() {
                Some(Token { kind: Tok::Ident(name), .. }) if name == "else" => {
                    self.pos += 1;
                    self.expect(":")?;
                    let otherwise = self.expr()?;
                    let close = self.expect(")")?;
                    if branches.is_empty() {
                        return Err(ParseError::Syntax {
                            message: "piece needs at least one guarded branch".into(),
                            span: start.join(close),
                        });
                    }
                    return Ok(Node {
                        kind: Kind::Piece { branches, otherwise: Box::new(otherwise) },
                        span: start.join(close),
                    });
                }
                Some(Token { kind: Tok::Ident(name), span }) if name == self.var => {
                    let guard_start = *span;
                    self.pos += 1;
                    self.expect("<=")?;
                    let guard = self.expr()?;
                    let guard_span = guard_start.join(guard.span);
                    if uses_var(&guard) {
                        return Err(ParseError::Syntax {
                            message: "piecewise guard must be a constant".into(),
                            span: guard_span,
                        });
                    }
                    let c = eval_node(&guard, 0.0, 1.0).map_err(|e| ParseError::Syntax {
                        message: format!("guard does not evaluate: {}", e.kind),
                        span: guard_span,
                    })?;
                    if branches.last().is_some_and(|(prev, _)| !(c > *prev)) {
                        return Err(ParseError::GuardOrder { span: guard_span });
                    }
                    self.expect(":")?;
                    let branch = self.expr()?;
                    self.expect(";")?;
                    branches.push((c, branch));
                }
                Some(tok) => {
                    return Err(ParseError::Syntax {
                        message: format!("expected `{} <= c` or `else`, found `{}`", self.var, tok.kind),
                        span: tok.span,
                    })
                }
                None => {
                    return Err(ParseError::Syntax { message: "unterminated piece(...)".into(), span: self.end_span() })
                }
            }
        }
    }
}

/// A real function of one variable: either a parsed [`Expr`] or native code.
///
/// Cheap to clone. `eval` maps evaluation failures to NaN so callers on hot
/// paths can test finiteness once; `try_eval` keeps the error.
#[derive(Clone)]
pub struct RealFn {
    inner: Inner,
}

#[derive(Clone)]
enum Inner {
    Expr(Arc<Expr>),
    Native(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RealFn {
    pub fn native<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RealFn { inner: Inner::Native(Arc::new(f)) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.inner {
            Inner::Expr(e) => e.eval(x).unwrap_or(f64::NAN),
            Inner::Native(f) => f(x),
        }
    }

    /// `f(1 - c)`; exact in `c` for expressions written with `1 - var`.
    pub fn eval_complement(&self, c: f64) -> f64 {
        match &self.inner {
            Inner::Expr(e) => e.eval_complement(c).unwrap_or(f64::NAN),
            Inner::Native(f) => f(1.0 - c),
        }
    }

    pub fn try_eval(&self, x: f64) -> Result<f64, EvalError> {
        match &self.inner {
            Inner::Expr(e) => e.eval(x),
            Inner::Native(f) => {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError { kind: DomainErrorKind::NonFinite, span: SourceSpan::new(0, 0), at: x })
                }
            }
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.inner {
            Inner::Expr(e) => Some(e),
            Inner::Native(_) => None,
        }
    }
}

impl From<Expr> for RealFn {
    fn from(e: Expr) -> Self {
        RealFn { inner: Inner::Expr(Arc::new(e)) }
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner {
            Inner::Expr(e) => write!(f, "RealFn({})", e.source()),
            Inner::Native(_) => f.write_str("RealFn(<native>)"),
        }
    }
}
