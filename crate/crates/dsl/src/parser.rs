use std::collections::{BTreeMap, BTreeSet};

use drtcalc_core::equiv::{Answer, Relation};
use drtcalc_core::term::{act_set, sym};
use drtcalc_core::{Action, ActionTable, CheckDirective, Model, Spec, Term};

use crate::lexer::{lex, Pos, Tok};
use crate::ParseError;

/// Terms before name resolution.
#[derive(Clone, Debug)]
enum Ast {
    Name(String, Pos),
    Act(String, Pos),
    Tau,
    Delta,
    Alt(Box<Ast>, Box<Ast>),
    Seq(Box<Ast>, Box<Ast>),
    Par(Box<Ast>, Box<Ast>),
    LMerge(Box<Ast>, Box<Ast>),
    CMerge(Box<Ast>, Box<Ast>),
    Delay(u32, Box<Ast>),
    Iter(u32, Box<Ast>, Pos),
    Encap(Vec<(String, Pos)>, Box<Ast>),
    Hide(Vec<(String, Pos)>, Box<Ast>),
    Timeout(Box<Ast>),
    Shift(Box<Ast>),
    Tf(Box<Ast>),
    Rec(String, Body, Pos),
}

#[derive(Clone, Debug)]
enum Body {
    Named(String, Pos),
    Inline(Vec<(String, Pos, Ast)>),
}

struct Parser<'m> {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    model: &'m mut Model,
}

const KEYWORDS: [&str; 9] = ["u", "tau", "delta", "sigma", "encap", "hide", "to", "tf", "shift"];

impl<'m> Parser<'m> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }
    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }
    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }
    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::at(self.pos(), format!("expected {wanted}, found {}", self.peek().describe()))
    }
    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let p = self.pos();
        match self.bump() {
            Tok::Ident(s) => Ok((s, p)),
            _ => {
                self.i -= 1;
                Err(self.unexpected("a name"))
            }
        }
    }
    fn num(&mut self) -> Result<u32, ParseError> {
        match self.bump() {
            Tok::Num(n) => Ok(n),
            _ => {
                self.i -= 1;
                Err(self.unexpected("a number"))
            }
        }
    }

    /// Action name, optionally with arguments: `r1(d0)`, `c3(d0,1)`.
    fn action_name(&mut self) -> Result<(String, Pos), ParseError> {
        let (mut name, p) = self.ident()?;
        if self.peek() == &Tok::LParen {
            self.bump();
            name.push('(');
            loop {
                match self.bump() {
                    Tok::Ident(s) => name.push_str(&s),
                    Tok::Num(n) => name.push_str(&n.to_string()),
                    _ => {
                        self.i -= 1;
                        return Err(self.unexpected("an action argument"));
                    }
                }
                if self.eat(&Tok::Comma) {
                    name.push(',');
                    continue;
                }
                self.expect(Tok::RParen)?;
                name.push(')');
                break;
            }
        }
        Ok((name, p))
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (kw, p) = self.ident()?;
        match kw.as_str() {
            "actions" => {
                loop {
                    let (a, ap) = self.action_name()?;
                    self.model.table.add_action(&a).map_err(|e| ParseError::at(ap, e.to_string()))?;
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::Semi)
            }
            "comm" => {
                loop {
                    let (a, ap) = self.action_name()?;
                    self.expect(Tok::Bar)?;
                    let (b, _) = self.action_name()?;
                    self.expect(Tok::Eq)?;
                    let (c, _) = self.action_name()?;
                    for x in [&a, &b, &c] {
                        if !self.model.table.contains(x) {
                            return Err(ParseError::at(ap, format!("undeclared action `{x}`")));
                        }
                    }
                    self.model.table.add_comm(&a, &b, &c).map_err(|e| ParseError::at(ap, e.to_string()))?;
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::Semi)
            }
            "handshaking" => {
                self.expect(Tok::Semi)?;
                self.model.table.set_handshaking().map_err(|e| ParseError::at(p, e.to_string()))
            }
            "proc" => {
                let (name, np) = self.ident()?;
                self.expect(Tok::Eq)?;
                let ast = self.term()?;
                self.expect(Tok::Semi)?;
                if self.model.proc(&name).is_some() {
                    return Err(ParseError::at(np, format!("process `{name}` defined twice")));
                }
                let t = self.resolve(&ast, &BTreeSet::new())?;
                self.model.add_proc(&name, t);
                Ok(())
            }
            "spec" => {
                let (name, np) = self.ident()?;
                self.expect(Tok::LBrace)?;
                let mut eqs = Vec::new();
                while self.peek() != &Tok::RBrace {
                    let (x, xp) = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let t = self.term()?;
                    self.expect(Tok::Semi)?;
                    eqs.push((x, xp, t));
                }
                self.expect(Tok::RBrace)?;
                self.eat(&Tok::Semi);
                if self.model.specs.contains_key(&name) {
                    return Err(ParseError::at(np, format!("specification `{name}` defined twice")));
                }
                let spec = self.resolve_body(&eqs, Some(name.clone()), np)?;
                self.model.add_spec(&name, spec);
                Ok(())
            }
            "check" => {
                let rp = self.pos();
                let (mut rel, _) = self.ident()?;
                while self.eat(&Tok::Dash) {
                    rel.push('-');
                    rel.push_str(&self.ident()?.0);
                }
                let relation = Relation::parse(&rel)
                    .ok_or_else(|| ParseError::at(rp, format!("unknown relation `{rel}`")))?;
                let l = self.term()?;
                self.expect(Tok::Tilde)?;
                let r = self.term()?;
                let mut expect = None;
                if self.peek() == &Tok::Ident("expect".into()) {
                    self.bump();
                    let (ans, ap) = self.ident()?;
                    expect = Some(match ans.as_str() {
                        "yes" => Answer::Yes,
                        "no" => Answer::No,
                        "unknown" => Answer::Unknown,
                        _ => return Err(ParseError::at(ap, format!("expected yes, no or unknown, found `{ans}`"))),
                    });
                }
                self.expect(Tok::Semi)?;
                let lhs = self.resolve(&l, &BTreeSet::new())?;
                let rhs = self.resolve(&r, &BTreeSet::new())?;
                self.model.checks.push(CheckDirective { relation, lhs, rhs, expect, line: p.line });
                Ok(())
            }
            _ => Err(ParseError::at(p, format!("unknown statement `{kw}`"))),
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut l = self.merge()?;
        while self.eat(&Tok::Plus) {
            let r = self.merge()?;
            l = Ast::Alt(Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn merge(&mut self) -> Result<Ast, ParseError> {
        let mut l = self.seq()?;
        loop {
            let mk: fn(Box<Ast>, Box<Ast>) -> Ast = match self.peek() {
                Tok::Par => Ast::Par,
                Tok::LMerge => Ast::LMerge,
                Tok::Bar => Ast::CMerge,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.seq()?;
            l = mk(Box::new(l), Box::new(r));
        }
    }

    fn seq(&mut self) -> Result<Ast, ParseError> {
        let l = self.atom()?;
        if self.eat(&Tok::Dot) {
            let r = self.seq()?;
            return Ok(Ast::Seq(Box::new(l), Box::new(r)));
        }
        Ok(l)
    }

    fn paren_term(&mut self) -> Result<Ast, ParseError> {
        self.expect(Tok::LParen)?;
        let t = self.term()?;
        self.expect(Tok::RParen)?;
        Ok(t)
    }

    fn set(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                out.push(self.action_name()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
        }
        Ok(out)
    }

    fn set_arg(&mut self) -> Result<(Vec<(String, Pos)>, Ast), ParseError> {
        self.expect(Tok::LParen)?;
        let s = self.set()?;
        self.expect(Tok::Comma)?;
        let t = self.term()?;
        self.expect(Tok::RParen)?;
        Ok((s, t))
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let p = self.pos();
        match self.peek().clone() {
            Tok::LParen => self.paren_term(),
            Tok::Lt => {
                self.bump();
                let (x, _) = self.ident()?;
                self.expect(Tok::Bar)?;
                let body = if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Gt {
                    let (n, np) = self.ident()?;
                    Body::Named(n, np)
                } else {
                    let mut eqs = Vec::new();
                    loop {
                        let (v, vp) = self.ident()?;
                        self.expect(Tok::Eq)?;
                        let t = self.term()?;
                        eqs.push((v, vp, t));
                        if !self.eat(&Tok::Semi) || self.peek() == &Tok::Gt {
                            break;
                        }
                    }
                    Body::Inline(eqs)
                };
                self.expect(Tok::Gt)?;
                Ok(Ast::Rec(x, body, p))
            }
            Tok::Ident(id) => match id.as_str() {
                "tau" => {
                    self.bump();
                    Ok(Ast::Tau)
                }
                "delta" => {
                    self.bump();
                    Ok(Ast::Delta)
                }
                "u" if self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    self.bump();
                    let (a, ap) = self.action_name()?;
                    self.expect(Tok::RParen)?;
                    Ok(match a.as_str() {
                        "tau" => Ast::Tau,
                        "delta" => Ast::Delta,
                        _ => Ast::Act(a, ap),
                    })
                }
                "sigma" => {
                    self.bump();
                    if self.eat(&Tok::Caret) {
                        let n = self.num()?;
                        Ok(Ast::Delay(n, Box::new(self.paren_term()?)))
                    } else if self.eat(&Tok::Star) {
                        let n = self.num()?;
                        Ok(Ast::Iter(n, Box::new(self.paren_term()?), p))
                    } else {
                        Ok(Ast::Delay(1, Box::new(self.paren_term()?)))
                    }
                }
                "encap" | "hide" if self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    let (s, t) = self.set_arg()?;
                    Ok(if id == "encap" { Ast::Encap(s, Box::new(t)) } else { Ast::Hide(s, Box::new(t)) })
                }
                "to" | "tf" | "shift" if self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    let t = Box::new(self.paren_term()?);
                    Ok(match id.as_str() {
                        "to" => Ast::Timeout(t),
                        "tf" => Ast::Tf(t),
                        _ => Ast::Shift(t),
                    })
                }
                _ => {
                    let (n, np) = self.action_name()?;
                    Ok(Ast::Name(n, np))
                }
            },
            _ => Err(self.unexpected("a term")),
        }
    }

    fn check_action(&self, a: &str, p: Pos) -> Result<(), ParseError> {
        if self.model.table.contains(a) {
            Ok(())
        } else {
            Err(ParseError::at(p, format!("undeclared action `{a}`")))
        }
    }

    fn resolve(&self, a: &Ast, scope: &BTreeSet<String>) -> Result<Term, ParseError> {
        let r = |x: &Ast| self.resolve(x, scope);
        Ok(match a {
            Ast::Name(n, p) => {
                if scope.contains(n) {
                    Term::var(n)
                } else if let Some(t) = self.model.proc(n) {
                    t.clone()
                } else if self.model.table.contains(n) {
                    Term::delayable(Action::obs(n))
                } else if KEYWORDS.contains(&n.as_str()) {
                    return Err(ParseError::at(*p, format!("`{n}` needs an argument")));
                } else {
                    return Err(ParseError::at(*p, format!("unknown name `{n}`")));
                }
            }
            Ast::Act(n, p) => {
                self.check_action(n, *p)?;
                Term::u(n)
            }
            Ast::Tau => Term::tau(),
            Ast::Delta => Term::delta(),
            Ast::Alt(x, y) => Term::alt(r(x)?, r(y)?),
            Ast::Seq(x, y) => Term::seq(r(x)?, r(y)?),
            Ast::Par(x, y) => Term::par(r(x)?, r(y)?),
            Ast::LMerge(x, y) => Term::lmerge(r(x)?, r(y)?),
            Ast::CMerge(x, y) => Term::cmerge(r(x)?, r(y)?),
            Ast::Delay(n, x) => Term::delay_n(*n, r(x)?),
            Ast::Iter(n, x, p) => {
                if *n == 0 {
                    return Err(ParseError::at(*p, "degenerate iteration: sigma*0 is unguarded".to_string()));
                }
                Term::time_iter(*n, r(x)?)
            }
            Ast::Encap(s, x) | Ast::Hide(s, x) => {
                for (a, p) in s {
                    self.check_action(a, *p)?;
                }
                let set = act_set(s.iter().map(|(a, _)| a.as_str()));
                if matches!(a, Ast::Encap(..)) {
                    Term::encap(set, r(x)?)
                } else {
                    Term::abstr(set, r(x)?)
                }
            }
            Ast::Timeout(x) => Term::timeout(r(x)?),
            Ast::Shift(x) => Term::shift(r(x)?),
            Ast::Tf(x) => Term::tf(r(x)?),
            Ast::Rec(x, body, p) => {
                let spec = match body {
                    Body::Named(n, np) => self
                        .model
                        .specs
                        .get(n)
                        .cloned()
                        .ok_or_else(|| ParseError::at(*np, format!("unknown specification `{n}`")))?,
                    Body::Inline(eqs) => self.resolve_body(eqs, None, *p)?,
                };
                if spec.get(x).is_none() {
                    return Err(ParseError::at(*p, format!("`{x}` is not a variable of the specification")));
                }
                spec.constant(x)
            }
        })
    }

    fn resolve_body(&self, eqs: &[(String, Pos, Ast)], label: Option<String>, p: Pos) -> Result<Spec, ParseError> {
        let scope: BTreeSet<String> = eqs.iter().map(|(x, _, _)| x.clone()).collect();
        let mut out = BTreeMap::new();
        for (x, xp, t) in eqs {
            if out.contains_key(x.as_str()) {
                return Err(ParseError::at(*xp, format!("variable `{x}` has two equations")));
            }
            out.insert(sym(x), self.resolve(t, &scope)?);
        }
        if out.is_empty() {
            return Err(ParseError::at(p, "empty specification".to_string()));
        }
        let spec = Spec::labelled(out, label);
        spec.check_well_formed().map_err(|e| ParseError::at(p, e.to_string()))?;
        Ok(spec)
    }
}

/// Parse a model file.
pub fn parse(src: &str) -> Result<Model, ParseError> {
    let mut model = Model::default();
    let mut p = Parser { toks: lex(src)?, i: 0, model: &mut model };
    while p.peek() != &Tok::Eof {
        p.statement()?;
    }
    Ok(model)
}

/// Parse one closed term against the names declared in `model`.
pub fn parse_term_in(model: &Model, src: &str) -> Result<Term, ParseError> {
    let mut m = model.clone();
    let mut p = Parser { toks: lex(src)?, i: 0, model: &mut m };
    let ast = p.term()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    p.resolve(&ast, &BTreeSet::new())
}

/// Parse a term against an action table only.
pub fn parse_term(table: &ActionTable, src: &str) -> Result<Term, ParseError> {
    parse_term_in(&Model::new(table.clone()), src)
}
