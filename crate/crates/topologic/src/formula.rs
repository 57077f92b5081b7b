//! Abstract syntax, grammar, printing and syntactic classification of the
//! bimodal language: atoms, `top`, `bot`, `~`, `&`, the knowledge modality
//! `K` and the effort modality `[]`, together with the derived connectives
//! `|`, `->`, `<->`, `L` (dual of `K`) and `<>` (dual of `[]`).
//!
//! `L` and `<>` are first-class AST nodes so that the L'/L'' and PNF/DNF
//! recognizers can work purely syntactically; `desugar` eliminates all
//! derived connectives into the core `{~, &, K, [], top, bot}` fragment.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

pub const RESERVED_WORDS: [&str; 4] = ["K", "L", "top", "bot"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    K(Box<Formula>),
    L(Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
}

pub fn atom(name: &str) -> Formula {
    Formula::Atom(name.to_string())
}
pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}
pub fn and(f: Formula, g: Formula) -> Formula {
    Formula::And(Box::new(f), Box::new(g))
}
pub fn or(f: Formula, g: Formula) -> Formula {
    Formula::Or(Box::new(f), Box::new(g))
}
pub fn implies(f: Formula, g: Formula) -> Formula {
    Formula::Implies(Box::new(f), Box::new(g))
}
pub fn iff(f: Formula, g: Formula) -> Formula {
    Formula::Iff(Box::new(f), Box::new(g))
}
pub fn k(f: Formula) -> Formula {
    Formula::K(Box::new(f))
}
pub fn l(f: Formula) -> Formula {
    Formula::L(Box::new(f))
}
pub fn bx(f: Formula) -> Formula {
    Formula::Box(Box::new(f))
}
pub fn dia(f: Formula) -> Formula {
    Formula::Dia(Box::new(f))
}

/// Left-associated conjunction of a nonempty list; `top` for the empty list.
pub fn and_all<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => Formula::Top,
        Some(first) => it.fold(first, and),
    }
}

/// Left-associated disjunction of a nonempty list; `bot` for the empty list.
pub fn or_all<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => Formula::Bot,
        Some(first) => it.fold(first, or),
    }
}

impl Formula {
    /// Eliminates `|`, `->`, `<->`, `L` and `<>` into the core connectives.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        match self {
            Atom(_) | Top | Bot => self.clone(),
            Not(f) => not(f.desugar()),
            And(f, g) => and(f.desugar(), g.desugar()),
            Or(f, g) => not(and(not(f.desugar()), not(g.desugar()))),
            Implies(f, g) => not(and(f.desugar(), not(g.desugar()))),
            Iff(f, g) => {
                let fd = f.desugar();
                let gd = g.desugar();
                // (f -> g) & (g -> f) on the core fragment
                and(
                    not(and(fd.clone(), not(gd.clone()))),
                    not(and(gd, not(fd))),
                )
            }
            K(f) => k(f.desugar()),
            L(f) => not(k(not(f.desugar()))),
            Box(f) => bx(f.desugar()),
            Dia(f) => not(bx(not(f.desugar()))),
        }
    }

    /// All subformulas of the desugared form in deterministic post-order,
    /// first occurrence kept, `self` (desugared) last.
    pub fn subformulas(&self) -> Vec<Formula> {
        fn walk(f: &Formula, out: &mut Vec<Formula>) {
            use Formula::*;
            match f {
                Atom(_) | Top | Bot => {}
                Not(g) | K(g) | Box(g) | L(g) | Dia(g) => walk(g, out),
                And(g, h) | Or(g, h) | Implies(g, h) | Iff(g, h) => {
                    walk(g, out);
                    walk(h, out);
                }
            }
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        let mut out = Vec::new();
        walk(&self.desugar(), &mut out);
        out
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        fn walk(f: &Formula, out: &mut Vec<String>) {
            use Formula::*;
            match f {
                Atom(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Top | Bot => {}
                Not(g) | K(g) | Box(g) | L(g) | Dia(g) => walk(g, out),
                And(g, h) | Or(g, h) | Implies(g, h) | Iff(g, h) => {
                    walk(g, out);
                    walk(h, out);
                }
            }
        }
        walk(self, &mut names);
        names.sort();
        names
    }

    /// Modal/connective nesting depth (atoms and constants are depth 0).
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Atom(_) | Top | Bot => 0,
            Not(f) | K(f) | L(f) | Box(f) | Dia(f) => 1 + f.depth(),
            And(f, g) | Or(f, g) | Implies(f, g) | Iff(f, g) => 1 + f.depth().max(g.depth()),
        }
    }

    /// Membership in L': generated from atoms, `top`, `bot` by `&`, `~` and
    /// the compound prefix `<> K`, recognized on the sugared AST.
    pub fn in_l_prime(&self) -> bool {
        use Formula::*;
        match self {
            Atom(_) | Top | Bot => true,
            And(f, g) => f.in_l_prime() && g.in_l_prime(),
            Not(f) => f.in_l_prime(),
            Dia(f) => matches!(f.as_ref(), K(g) if g.in_l_prime()),
            _ => false,
        }
    }

    /// Membership in L'': `K f` or `L f` with `f` in L'.
    pub fn in_l_double_prime(&self) -> bool {
        use Formula::*;
        match self {
            K(f) | L(f) => f.in_l_prime(),
            _ => false,
        }
    }

    /// Flattens nested conjunctions into the list of conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::And(g, h) = f {
                walk(g, out);
                walk(h, out);
            } else {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Flattens nested disjunctions into the list of disjuncts.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::Or(g, h) = f {
                walk(g, out);
                walk(h, out);
            } else {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// PNF shape: a conjunction of at least one L' component, exactly one
    /// `K`-component over L', and any number of `L`-components over L'.
    pub fn is_pnf(&self) -> bool {
        let mut base = 0usize;
        let mut known = 0usize;
        for c in self.conjuncts() {
            match c {
                Formula::K(f) if f.in_l_prime() => known += 1,
                Formula::L(f) if f.in_l_prime() => {}
                f if f.in_l_prime() => base += 1,
                _ => return false,
            }
        }
        base >= 1 && known == 1
    }

    /// DNF shape: a finite disjunction of PNF blocks.
    pub fn is_dnf(&self) -> bool {
        self.disjuncts().iter().all(|d| d.is_pnf())
    }

    pub fn classify(&self) -> SyntaxClass {
        SyntaxClass {
            in_l_prime: self.in_l_prime(),
            in_l_double_prime: self.in_l_double_prime(),
            is_pnf: self.is_pnf(),
            is_dnf: self.is_dnf(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyntaxClass {
    pub in_l_prime: bool,
    pub in_l_double_prime: bool,
    pub is_pnf: bool,
    pub is_dnf: bool,
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Atom(_) | Top | Bot => PREC_ATOM,
        Not(_) | K(_) | L(_) | Box(_) | Dia(_) => PREC_UNARY,
        And(_, _) => PREC_AND,
        Or(_, _) => PREC_OR,
        Implies(_, _) => PREC_IMP,
        Iff(_, _) => PREC_IFF,
    }
}

fn write_formula(f: &Formula, min_prec: u8, out: &mut String) {
    use Formula::*;
    let p = prec(f);
    let parens = p < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Atom(a) => out.push_str(a),
        Top => out.push_str("top"),
        Bot => out.push_str("bot"),
        Not(g) => {
            out.push('~');
            write_formula(g, PREC_UNARY, out);
        }
        K(g) => {
            out.push_str("K ");
            write_formula(g, PREC_UNARY, out);
        }
        L(g) => {
            out.push_str("L ");
            write_formula(g, PREC_UNARY, out);
        }
        Box(g) => {
            out.push_str("[] ");
            write_formula(g, PREC_UNARY, out);
        }
        Dia(g) => {
            out.push_str("<> ");
            write_formula(g, PREC_UNARY, out);
        }
        And(g, h) => {
            // left associative
            write_formula(g, PREC_AND, out);
            out.push_str(" & ");
            write_formula(h, PREC_AND + 1, out);
        }
        Or(g, h) => {
            write_formula(g, PREC_OR, out);
            out.push_str(" | ");
            write_formula(h, PREC_OR + 1, out);
        }
        Implies(g, h) => {
            // right associative
            write_formula(g, PREC_IMP + 1, out);
            out.push_str(" -> ");
            write_formula(h, PREC_IMP, out);
        }
        Iff(g, h) => {
            write_formula(g, PREC_IFF, out);
            out.push_str(" <-> ");
            write_formula(h, PREC_IFF + 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Canonical minimal-parenthesization form; round-trips through `parse`.
pub fn print(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, 0, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bot,
    KTok,
    LTok,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    BoxTok,
    DiaTok,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some((t, at)) = lx.next_token()? {
            out.push((t, at));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let at = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'~' => {
                self.pos += 1;
                Tok::Tilde
            }
            b'&' => {
                self.pos += 1;
                Tok::Amp
            }
            b'|' => {
                self.pos += 1;
                Tok::Pipe
            }
            b'-' => {
                if self.src.get(self.pos + 1) == Some(&b'>') {
                    self.pos += 2;
                    Tok::Arrow
                } else {
                    return Err(Error::Parse {
                        offset: at,
                        message: "expected '->'".into(),
                    });
                }
            }
            b'<' => match self.src.get(self.pos + 1) {
                Some(&b'-') if self.src.get(self.pos + 2) == Some(&b'>') => {
                    self.pos += 3;
                    Tok::DArrow
                }
                Some(&b'>') => {
                    self.pos += 2;
                    Tok::DiaTok
                }
                _ => {
                    return Err(Error::Parse {
                        offset: at,
                        message: "expected '<->' or '<>'".into(),
                    })
                }
            },
            b'[' => {
                if self.src.get(self.pos + 1) == Some(&b']') {
                    self.pos += 2;
                    Tok::BoxTok
                } else {
                    return Err(Error::Parse {
                        offset: at,
                        message: "expected '[]'".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "top" => Tok::Top,
                    "bot" => Tok::Bot,
                    "K" => Tok::KTok,
                    "L" => Tok::LTok,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                return Err(Error::Parse {
                    offset: at,
                    message: format!("unexpected character {:?}", c as char),
                })
            }
        };
        Ok(Some((tok, at)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    // formula := iff
    fn formula(&mut self) -> Result<Formula> {
        self.iff()
    }

    // iff := imp ("<->" imp)*     (left associative)
    fn iff(&mut self) -> Result<Formula> {
        let mut f = self.imp()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.bump();
            let g = self.imp()?;
            f = iff(f, g);
        }
        Ok(f)
    }

    // imp := or ("->" imp)?       (right associative)
    fn imp(&mut self) -> Result<Formula> {
        let f = self.or_level()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let g = self.imp()?;
            Ok(implies(f, g))
        } else {
            Ok(f)
        }
    }

    // or := and ("|" and)*
    fn or_level(&mut self) -> Result<Formula> {
        let mut f = self.and_level()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let g = self.and_level()?;
            f = or(f, g);
        }
        Ok(f)
    }

    // and := unary ("&" unary)*
    fn and_level(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let g = self.unary()?;
            f = and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(not(self.unary()?))
            }
            Some(Tok::KTok) => {
                self.bump();
                Ok(k(self.unary()?))
            }
            Some(Tok::LTok) => {
                self.bump();
                Ok(l(self.unary()?))
            }
            Some(Tok::BoxTok) => {
                self.bump();
                Ok(bx(self.unary()?))
            }
            Some(Tok::DiaTok) => {
                self.bump();
                Ok(dia(self.unary()?))
            }
            Some(Tok::Top) => {
                self.bump();
                Ok(Formula::Top)
            }
            Some(Tok::Bot) => {
                self.bump();
                Ok(Formula::Bot)
            }
            Some(Tok::Ident(_)) => {
                if let Tok::Ident(name) = self.bump() {
                    Ok(Formula::Atom(name))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LParen) => {
                let open_at = self.offset();
                self.bump();
                let f = self.formula()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(f)
                } else {
                    Err(Error::Parse {
                        offset: open_at,
                        message: "unbalanced parenthesis".into(),
                    })
                }
            }
            Some(Tok::RParen) => self.err("unbalanced parenthesis"),
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses the concrete grammar. Errors carry a byte offset.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_implication() {
        assert_eq!(parse("K A -> A").unwrap(), implies(k(atom("A")), atom("A")));
    }

    #[test]
    fn parse_precedence_unary_over_and() {
        assert_eq!(
            parse("<> K p & L q").unwrap(),
            and(dia(k(atom("p"))), l(atom("q")))
        );
    }

    #[test]
    fn parse_closedness_scheme() {
        assert_eq!(
            parse("[] L I1 -> I1").unwrap(),
            implies(bx(l(atom("I1"))), atom("I1"))
        );
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&implies(k(atom("A")), atom("A"))), "K A -> A");
        assert_eq!(
            print(&and(atom("a"), and(atom("b"), atom("c")))),
            "a & (b & c)"
        );
        assert_eq!(
            print(&and(and(atom("a"), atom("b")), atom("c"))),
            "a & b & c"
        );
        assert_eq!(print(&dia(k(atom("A")))), "<> K A");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse("(A & B") {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 0);
                assert!(message.contains("unbalanced"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("A @ B") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reserved_words_are_not_atoms() {
        // "K" alone is a dangling modality, not an atom
        assert!(parse("K").is_err());
        assert_eq!(parse("top").unwrap(), Formula::Top);
    }

    #[test]
    fn subformulas_atomic() {
        assert_eq!(atom("A").subformulas(), vec![atom("A")]);
    }

    #[test]
    fn subformulas_k_and() {
        let f = k(and(atom("A"), atom("B")));
        assert_eq!(
            f.subformulas(),
            vec![
                atom("A"),
                atom("B"),
                and(atom("A"), atom("B")),
                k(and(atom("A"), atom("B"))),
            ]
        );
    }

    #[test]
    fn subformulas_desugars_dia_k() {
        // <> K A desugars to ~ [] ~ K A
        let f = dia(k(atom("A")));
        assert_eq!(
            f.subformulas(),
            vec![
                atom("A"),
                k(atom("A")),
                not(k(atom("A"))),
                bx(not(k(atom("A")))),
                not(bx(not(k(atom("A"))))),
            ]
        );
    }

    #[test]
    fn classify_l_prime() {
        assert!(parse("A & ~B").unwrap().classify().in_l_prime);
        assert!(parse("<> K (A & <> K B)").unwrap().classify().in_l_prime);
        let f = parse("K (<> K A)").unwrap();
        let c = f.classify();
        assert!(c.in_l_double_prime);
        assert!(!c.in_l_prime);
    }

    #[test]
    fn l_prime_closure_rules() {
        let f = parse("A & ~B").unwrap();
        assert!(not(f.clone()).in_l_prime());
        assert!(dia(k(f)).in_l_prime());
    }

    #[test]
    fn pnf_and_dnf_shapes() {
        assert!(parse("A & K B & L C").unwrap().is_pnf());
        assert!(parse("A & K B").unwrap().is_pnf());
        assert!(!parse("A & L C").unwrap().is_pnf());
        assert!(!parse("K A").unwrap().is_pnf());
        assert!(parse("A & K B | top & K C & L D").unwrap().is_dnf());
        assert!(!parse("K A | A").unwrap().is_dnf());
    }

    #[test]
    fn desugar_idempotent() {
        let f = parse("<> K A <-> (B | ~C -> L D)").unwrap();
        let d = f.desugar();
        assert_eq!(d.desugar(), d);
    }
}
