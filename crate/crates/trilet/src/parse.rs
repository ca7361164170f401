//! Surface-syntax parser.
//!
//! A source file is a prelude of `type P;` and `val x : A;` declarations
//! followed by one subject term. Types use `->`, `/\`, `\/`, `bot` with
//! precedence `/\` > `\/` > `->`; terms are `fn x => e`, `fix u => e`,
//! left-associative application, and parenthesized contextual annotations
//! `(e : G |- A, ...)` where an omitted `G |-` means the empty context.
//! `//` starts a line comment. Linear variables and lets have no surface
//! syntax; they exist only in tool output.

use crate::syntax::{ContextualAnnotation, Term, Type, TypingContext, VarSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub atoms: Vec<String>,
    pub prelude: TypingContext,
    pub subject: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate declaration of {name}")]
    DuplicateDecl { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown atom {name}")]
    UnknownAtom { line: usize, col: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,     // ->
    And,       // /\
    Or,        // \/
    Turnstile, // |-
    FatArrow,  // =>
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    KwFn,
    KwFix,
    KwType,
    KwVal,
    KwBot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Arrow => "`->`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::KwFn => "`fn`".into(),
            Tok::KwFix => "`fix`".into(),
            Tok::KwType => "`type`".into(),
            Tok::KwVal => "`val`".into(),
            Tok::KwBot => "`bot`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_ws_and_comments();
        let (line, col) = (lx.line, lx.col);
        if lx.pos >= lx.src.len() {
            out.push((Tok::Eof, line, col));
            return Ok(out);
        }
        let c = lx.src[lx.pos];
        let tok = match c {
            b'(' => {
                lx.bump(1);
                Tok::LParen
            }
            b')' => {
                lx.bump(1);
                Tok::RParen
            }
            b';' => {
                lx.bump(1);
                Tok::Semi
            }
            b',' => {
                lx.bump(1);
                Tok::Comma
            }
            b':' => {
                lx.bump(1);
                Tok::Colon
            }
            b'-' if lx.peek(1) == Some(b'>') => {
                lx.bump(2);
                Tok::Arrow
            }
            b'=' if lx.peek(1) == Some(b'>') => {
                lx.bump(2);
                Tok::FatArrow
            }
            b'/' if lx.peek(1) == Some(b'\\') => {
                lx.bump(2);
                Tok::And
            }
            b'\\' if lx.peek(1) == Some(b'/') => {
                lx.bump(2);
                Tok::Or
            }
            b'|' if lx.peek(1) == Some(b'-') => {
                lx.bump(2);
                Tok::Turnstile
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = lx.pos;
                while lx.pos < lx.src.len()
                    && (lx.src[lx.pos].is_ascii_alphanumeric()
                        || lx.src[lx.pos] == b'_'
                        || lx.src[lx.pos] == b'\'')
                {
                    lx.bump(1);
                }
                let word = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap();
                match word {
                    "fn" => Tok::KwFn,
                    "fix" => Tok::KwFix,
                    "type" => Tok::KwType,
                    "val" => Tok::KwVal,
                    "bot" => Tok::KwBot,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        out.push((tok, line, col));
    }
}

impl<'a> Lexer<'a> {
    fn peek(&self, off: usize) -> Option<u8> {
        self.src.get(self.pos + off).copied()
    }

    fn bump(&mut self, n: usize) {
        for _ in 0..n {
            if self.pos < self.src.len() {
                if self.src[self.pos] == b'\n' {
                    self.line += 1;
                    self.col = 1;
                } else {
                    self.col += 1;
                }
                self.pos += 1;
            }
        }
    }

    fn skip_ws_and_comments(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.bump(1);
            }
            if self.pos + 1 < self.src.len()
                && self.src[self.pos] == b'/'
                && self.src[self.pos + 1] == b'/'
            {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.bump(1);
                }
                continue;
            }
            break;
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
    atoms: Vec<String>,
    // enclosing binders, innermost last
    binders: Vec<(String, VarSpace)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.idx + 1).min(self.toks.len() - 1)].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.idx];
        (l, c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn err<T>(&self, msg: String) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg })
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected identifier, found {}", other.describe())),
        }
    }

    // types ---------------------------------------------------------------

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.ty_union()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            Ok(Type::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_union(&mut self) -> Result<Type, ParseError> {
        let mut lhs = self.ty_inter()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.ty_inter()?;
            lhs = Type::union(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ty_inter(&mut self) -> Result<Type, ParseError> {
        let mut lhs = self.ty_atom()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.ty_atom()?;
            lhs = Type::inter(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::KwBot => {
                self.bump();
                Ok(Type::Bot)
            }
            Tok::Ident(name) => {
                let (line, col) = self.here();
                self.bump();
                if self.atoms.contains(&name) {
                    Ok(Type::Base(name))
                } else {
                    Err(ParseError::UnknownAtom { line, col, name })
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            other => self.err(format!("expected a type, found {}", other.describe())),
        }
    }

    // terms ---------------------------------------------------------------

    fn term_open(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::KwFn => {
                self.bump();
                let x = self.ident()?;
                self.expect(&Tok::FatArrow)?;
                self.binders.push((x.clone(), VarSpace::Ord));
                let body = self.term_open()?;
                self.binders.pop();
                Ok(Term::Lam(x, Box::new(body)))
            }
            Tok::KwFix => {
                self.bump();
                let u = self.ident()?;
                self.expect(&Tok::FatArrow)?;
                self.binders.push((u.clone(), VarSpace::Fix));
                let body = self.term_open()?;
                self.binders.pop();
                Ok(Term::Fix(u, Box::new(body)))
            }
            _ => self.term_app(),
        }
    }

    fn term_app(&mut self) -> Result<Term, ParseError> {
        // `fn`/`fix` as an argument must be parenthesized, so application
        // arguments start with an identifier or `(`
        let mut head = self.term_atom()?;
        while matches!(self.peek(), Tok::Ident(_) | Tok::LParen) {
            let arg = self.term_atom()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                let space = self
                    .binders
                    .iter()
                    .rev()
                    .find(|(n, _)| *n == name)
                    .map(|(_, s)| *s)
                    .unwrap_or(VarSpace::Ord);
                Ok(match space {
                    VarSpace::Ord => Term::Var(name),
                    VarSpace::Fix => Term::FixVar(name),
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.term_open()?;
                if *self.peek() == Tok::Colon {
                    self.bump();
                    let annos = self.annotation_entries()?;
                    self.expect(&Tok::RParen)?;
                    Ok(Term::Anno(Box::new(e), annos))
                } else {
                    self.expect(&Tok::RParen)?;
                    Ok(e)
                }
            }
            other => self.err(format!("expected a term, found {}", other.describe())),
        }
    }

    fn annotation_entries(&mut self) -> Result<Vec<ContextualAnnotation>, ParseError> {
        let mut out = vec![self.annotation_entry()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.annotation_entry()?);
        }
        Ok(out)
    }

    fn annotation_entry(&mut self) -> Result<ContextualAnnotation, ParseError> {
        // explicit empty context: `|- A`
        if *self.peek() == Tok::Turnstile {
            self.bump();
            let ty = self.ty()?;
            return Ok(ContextualAnnotation::plain(ty));
        }
        // `x : A, y : B |- C` — a context exactly when an identifier is
        // followed by a colon
        if matches!(self.peek(), Tok::Ident(_)) && *self.peek2() == Tok::Colon {
            let mut ctx = TypingContext::empty();
            loop {
                let (line, col) = self.here();
                let name = self.ident()?;
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                if ctx.push(&name, VarSpace::Ord, ty).is_err() {
                    return Err(ParseError::DuplicateDecl { line, col, name });
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(&Tok::Turnstile)?;
            let ty = self.ty()?;
            return Ok(ContextualAnnotation { context: ctx, ty });
        }
        let ty = self.ty()?;
        Ok(ContextualAnnotation::plain(ty))
    }

    // files ---------------------------------------------------------------

    fn file(&mut self) -> Result<SourceFile, ParseError> {
        let mut prelude = TypingContext::empty();
        loop {
            match self.peek() {
                Tok::KwType => {
                    self.bump();
                    let (line, col) = self.here();
                    let name = self.ident()?;
                    self.expect(&Tok::Semi)?;
                    if self.atoms.contains(&name) {
                        return Err(ParseError::DuplicateDecl { line, col, name });
                    }
                    self.atoms.push(name);
                }
                Tok::KwVal => {
                    self.bump();
                    let (line, col) = self.here();
                    let name = self.ident()?;
                    self.expect(&Tok::Colon)?;
                    let ty = self.ty()?;
                    self.expect(&Tok::Semi)?;
                    if prelude.push(&name, VarSpace::Ord, ty).is_err() {
                        return Err(ParseError::DuplicateDecl { line, col, name });
                    }
                }
                _ => break,
            }
        }
        let subject = self.term_open()?;
        if *self.peek() != Tok::Eof {
            return self.err(format!(
                "expected end of input after the subject term, found {}",
                self.peek().describe()
            ));
        }
        Ok(SourceFile {
            atoms: self.atoms.clone(),
            prelude,
            subject,
        })
    }
}

/// Parse a whole source file.
pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        atoms: Vec::new(),
        binders: Vec::new(),
    };
    p.file()
}

/// Parse a type against a declared atom set (for `--against`).
pub fn parse_type(text: &str, atoms: &[String]) -> Result<Type, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        atoms: atoms.to_vec(),
        binders: Vec::new(),
    };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!(
            "expected end of input after the type, found {}",
            p.peek().describe()
        ));
    }
    Ok(t)
}

/// Parse a bare term under the given atoms (used by tests).
pub fn parse_term(text: &str, atoms: &[String]) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        atoms: atoms.to_vec(),
        binders: Vec::new(),
    };
    let e = p.term_open()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!(
            "expected end of input after the term, found {}",
            p.peek().describe()
        ));
    }
    Ok(e)
}
