use std::collections::BTreeMap;

use drtcalc_core::{act_set, sym, Action, ActSet, ActionTable, Model, Spec, Sym, Term};
use serde::{Deserialize, Serialize};

use crate::ParError;

/// Data count and the six timing parameters, all in time slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParParams {
    pub data: usize,
    pub t_s: u32,
    pub t_r: u32,
    pub t_k: u32,
    pub t_l: u32,
    /// Sender time-out.
    pub t_sp: u32,
    /// Receiver acknowledgement time.
    pub t_rp: u32,
}

impl ParParams {
    /// Unit processing times with the given data count and time-out.
    pub fn unit(data: usize, t_sp: u32) -> ParParams {
        ParParams { data, t_s: 1, t_r: 1, t_k: 1, t_l: 1, t_sp, t_rp: 1 }
    }

    pub fn validate(&self) -> Result<(), ParError> {
        if self.data == 0 {
            return Err(ParError::InvalidParams("at least one datum is needed".into()));
        }
        let times = [self.t_s, self.t_r, self.t_k, self.t_l, self.t_sp, self.t_rp];
        if times.contains(&0) {
            return Err(ParError::InvalidParams("all times must be positive".into()));
        }
        Ok(())
    }

    /// Length of a full protocol cycle, `t_K + t_R + t_R' + t_L`.
    pub fn cycle(&self) -> u32 {
        self.t_k + self.t_r + self.t_rp + self.t_l
    }

    pub fn cycle_ok(&self) -> bool {
        self.t_sp > self.cycle()
    }

    pub(crate) fn require_cycle(&self) -> Result<(), ParError> {
        self.validate()?;
        if self.cycle_ok() {
            Ok(())
        } else {
            Err(ParError::Premature { t_sp: self.t_sp, cycle: self.cycle() })
        }
    }

    pub(crate) fn data_names(&self) -> Vec<String> {
        (0..self.data).map(|i| format!("d{i}")).collect()
    }
}

fn u(name: String) -> Term {
    Term::u(&name)
}

fn v(name: String) -> Term {
    Term::var(&name)
}

fn sigma(n: u32, t: Term) -> Term {
    Term::delay_n(n, t)
}

/// `sum_{k <= n} sigma^k(u(error)) . then(k)`, or without continuation.
fn errors(n: u32, then: impl Fn(u32) -> Option<Term>) -> Vec<Term> {
    (0..=n)
        .map(|k| {
            let e = sigma(k, Term::u("error"));
            match then(k) {
                Some(t) => Term::seq(e, t),
                None => e,
            }
        })
        .collect()
}

fn spec(eqs: Vec<(String, Term)>, label: &str) -> Spec {
    let map: BTreeMap<Sym, Term> = eqs.into_iter().map(|(k, t)| (sym(&k), t)).collect();
    Spec::labelled(map, Some(label.to_string()))
}

fn frames(p: &ParParams) -> Vec<(String, u32)> {
    p.data_names().into_iter().flat_map(|d| [(d.clone(), 0), (d, 1)]).collect()
}

fn table(p: &ParParams) -> Result<ActionTable, ParError> {
    let mut t = ActionTable::new();
    for d in p.data_names() {
        t.add_action(&format!("r1({d})"))?;
        t.add_action(&format!("s2({d})"))?;
    }
    for (d, b) in frames(p) {
        for i in [3, 4] {
            t.add_comm(&format!("s{i}({d},{b})"), &format!("r{i}({d},{b})"), &format!("c{i}({d},{b})"))?;
        }
    }
    for i in [5, 6] {
        t.add_comm(&format!("s{i}(ack)"), &format!("r{i}(ack)"), &format!("c{i}(ack)"))?;
    }
    t.add_action("error")?;
    t.set_handshaking()?;
    Ok(t)
}

fn encapsulated(p: &ParParams) -> ActSet {
    let mut h: Vec<String> = Vec::new();
    for (d, b) in frames(p) {
        for i in [3, 4] {
            h.push(format!("s{i}({d},{b})"));
            h.push(format!("r{i}({d},{b})"));
        }
    }
    for i in [5, 6] {
        h.push(format!("s{i}(ack)"));
        h.push(format!("r{i}(ack)"));
    }
    act_set(h.iter().map(String::as_str))
}

/// Internal actions: frame and acknowledgement transfers and channel errors.
pub fn hidden_actions(p: &ParParams) -> ActSet {
    let mut i: Vec<String> = Vec::new();
    for (d, b) in frames(p) {
        i.push(format!("c3({d},{b})"));
        i.push(format!("c4({d},{b})"));
    }
    i.extend(["c5(ack)".into(), "c6(ack)".into(), "error".into()]);
    act_set(i.iter().map(String::as_str))
}

fn sender(p: &ParParams) -> Spec {
    let mut eqs = Vec::new();
    for b in [0, 1] {
        let mut s: Vec<Term> =
            p.data_names().iter().map(|d| Term::seq(u(format!("r1({d})")), sigma(p.t_s, v(format!("SF_{d}_{b}"))))).collect();
        s.push(Term::delay(v(format!("S_{b}"))));
        eqs.push((format!("S_{b}"), Term::sum(s)));
        for d in p.data_names() {
            let mut wait: Vec<Term> =
                (0..p.t_sp).map(|k| Term::seq(sigma(k, Term::u("r5(ack)")), v(format!("S_{}", 1 - b)))).collect();
            wait.push(sigma(p.t_sp, v(format!("SF_{d}_{b}"))));
            eqs.push((format!("SF_{d}_{b}"), Term::seq(u(format!("s3({d},{b})")), Term::sum(wait))));
        }
    }
    spec(eqs, "S")
}

fn receiver(p: &ParParams) -> Spec {
    let ack = || sigma(p.t_rp, Term::u("s6(ack)"));
    let mut eqs = Vec::new();
    for b in [0, 1] {
        let mut s = Vec::new();
        for d in p.data_names() {
            s.push(Term::seq_all(vec![
                u(format!("r4({d},{b})")),
                sigma(p.t_r, u(format!("s2({d})"))),
                ack(),
                v(format!("R_{}", 1 - b)),
            ]));
        }
        for d in p.data_names() {
            s.push(Term::seq_all(vec![u(format!("r4({d},{})", 1 - b)), ack(), v(format!("R_{b}"))]));
        }
        s.push(Term::delay(v(format!("R_{b}"))));
        eqs.push((format!("R_{b}"), Term::sum(s)));
    }
    spec(eqs, "R")
}

fn channel_k(p: &ParParams) -> Spec {
    let mut s = Vec::new();
    for (d, b) in frames(p) {
        let mut out = vec![sigma(p.t_k, u(format!("s4({d},{b})")))];
        out.extend(errors(p.t_k, |_| None));
        s.push(Term::seq_all(vec![u(format!("r3({d},{b})")), Term::sum(out), Term::var("K")]));
    }
    s.push(Term::delay(Term::var("K")));
    spec(vec![("K".into(), Term::sum(s))], "K")
}

fn channel_l(p: &ParParams) -> Spec {
    let mut out = vec![sigma(p.t_l, Term::u("s5(ack)"))];
    out.extend(errors(p.t_l, |_| None));
    let body = Term::alt(Term::seq_all(vec![Term::u("r6(ack)"), Term::sum(out), Term::var("L")]), Term::delay(Term::var("L")));
    spec(vec![("L".into(), body)], "L")
}

/// The protocol: specifications `S`, `R`, `K`, `L` and processes `System`
/// (encapsulated parallel composition) and `Hidden` (with internal actions
/// abstracted).
pub fn build_par_model(p: &ParParams) -> Result<Model, ParError> {
    p.validate()?;
    let mut m = Model::new(table(p)?);
    let (s, r, k, l) = (sender(p), receiver(p), channel_k(p), channel_l(p));
    let system = Term::encap(
        encapsulated(p),
        Term::par(s.constant(&sym("S_0")), Term::par(k.constant(&sym("K")), Term::par(l.constant(&sym("L")), r.constant(&sym("R_0"))))),
    );
    m.add_spec("S", s);
    m.add_spec("R", r);
    m.add_spec("K", k);
    m.add_spec("L", l);
    m.add_proc("Hidden", Term::abstr(hidden_actions(p), system.clone()));
    m.add_proc("System", system);
    Ok(m)
}

/// The expanded protocol over communication actions, before abstraction.
fn expanded(p: &ParParams) -> Spec {
    let mut eqs = Vec::new();
    let c = |i: u32, d: &str, b: u32| u(format!("c{i}({d},{b})"));
    for b in [0, 1] {
        let mut x: Vec<Term> =
            p.data_names().iter().map(|d| Term::seq(u(format!("r1({d})")), sigma(p.t_s, v(format!("Y_{d}_{b}"))))).collect();
        x.push(Term::delay(v(format!("X_{b}"))));
        eqs.push((format!("X_{b}"), Term::sum(x)));
        for d in p.data_names() {
            let d = d.as_str();
            let resend = |name: &str| {
                let name = name.to_string();
                errors(p.t_k, move |k| Some(sigma(p.t_sp - k, v(format!("{name}_{d}_{b}")))))
            };
            let mut y = vec![Term::seq_all(vec![
                sigma(p.t_k, c(4, d, b)),
                sigma(p.t_r, u(format!("s2({d})"))),
                sigma(p.t_rp, Term::u("c6(ack)")),
                v(format!("Z_{d}_{b}")),
            ])];
            y.extend(resend("Y"));
            eqs.push((format!("Y_{d}_{b}"), Term::seq(c(3, d, b), Term::sum(y))));

            let back = Term::seq(sigma(p.t_l, Term::u("c5(ack)")), v(format!("X_{}", 1 - b)));
            let mut z = vec![back.clone()];
            z.extend(errors(p.t_l, |k| Some(sigma(p.t_sp - (p.t_k + p.t_r + p.t_rp + k), v(format!("U_{d}_{b}"))))));
            eqs.push((format!("Z_{d}_{b}"), Term::sum(z)));

            let mut uu = vec![Term::seq_all(vec![sigma(p.t_k, c(4, d, b)), sigma(p.t_rp, Term::u("c6(ack)")), v(format!("V_{d}_{b}"))])];
            uu.extend(resend("U"));
            eqs.push((format!("U_{d}_{b}"), Term::seq(c(3, d, b), Term::sum(uu))));

            let mut vv = vec![back];
            vv.extend(errors(p.t_l, |k| Some(sigma(p.t_sp - (p.t_k + p.t_rp + k), v(format!("U_{d}_{b}"))))));
            eqs.push((format!("V_{d}_{b}"), Term::sum(vv)));
        }
    }
    spec(eqs, "X")
}

fn tau_then(t: Term) -> Term {
    Term::seq(Term::tau(), t)
}

/// After abstraction, timing kept.
fn abstracted(p: &ParParams) -> Spec {
    let mut eqs = Vec::new();
    let mut x: Vec<Term> =
        p.data_names().iter().map(|d| Term::seq(u(format!("r1({d})")), sigma(p.t_s, v(format!("Y2_{d}"))))).collect();
    x.push(Term::delay(Term::var("X2")));
    eqs.push(("X2".into(), Term::sum(x)));
    let lost = |n: u32, var: &'static str| (0..=n).map(move |k| sigma(k, tau_then(sigma(p.t_sp - k, Term::var(var)))));
    for d in p.data_names() {
        let ok = sigma(p.t_k, tau_then(sigma(p.t_r, Term::seq(u(format!("s2({d})")), sigma(p.t_rp, Term::var("Z2"))))));
        let mut y = vec![ok];
        let again = format!("Y2_{d}");
        y.extend((0..=p.t_k).map(|k| sigma(k, tau_then(sigma(p.t_sp - k, Term::var(&again))))));
        eqs.push((again, Term::sum(y)));
    }
    let retry = |n: u32, base: u32| (0..=n).map(move |k| sigma(k, tau_then(sigma(p.t_sp - (base + k), Term::var("U2")))));
    let mut z = vec![sigma(p.t_l, tau_then(Term::var("X2")))];
    z.extend(retry(p.t_l, p.t_k + p.t_r + p.t_rp));
    eqs.push(("Z2".into(), Term::sum(z)));
    let mut uu = vec![sigma(p.t_k, tau_then(sigma(p.t_rp, Term::var("V2"))))];
    uu.extend(lost(p.t_k, "U2"));
    eqs.push(("U2".into(), Term::sum(uu)));
    let mut vv = vec![sigma(p.t_l, tau_then(Term::var("X2")))];
    vv.extend(retry(p.t_l, p.t_k + p.t_rp));
    eqs.push(("V2".into(), Term::sum(vv)));
    spec(eqs, "X2")
}

/// The simplification with dormant silent steps removed.
fn simplified(p: &ParParams) -> Spec {
    let mut eqs = Vec::new();
    let mut x: Vec<Term> =
        p.data_names().iter().map(|d| Term::seq(u(format!("r1({d})")), sigma(p.t_s, v(format!("Y3_{d}"))))).collect();
    x.push(Term::delay(Term::var("X3")));
    eqs.push(("X3".into(), Term::sum(x)));
    for d in p.data_names() {
        let next = Term::alt(sigma(p.t_rp + p.t_l, tau_then(Term::var("X3"))), sigma(p.t_sp - (p.t_k + p.t_r), Term::var("Z3")));
        let y = Term::alt(Term::seq(sigma(p.t_k + p.t_r, u(format!("s2({d})"))), next), sigma(p.t_sp, v(format!("Y3_{d}"))));
        eqs.push((format!("Y3_{d}"), y));
    }
    let z = Term::alt(sigma(p.t_k + p.t_rp + p.t_l, tau_then(Term::var("X3"))), sigma(p.t_sp, Term::var("Z3")));
    eqs.push(("Z3".into(), z));
    spec(eqs, "X3")
}

/// The same process written with time iteration.
fn iterated(p: &ParParams) -> Spec {
    let x = || Term::var("X3s");
    let mut s = Vec::new();
    for d in p.data_names() {
        let deliver = Term::time_iter(p.t_sp, sigma(p.t_s + p.t_k + p.t_r, u(format!("s2({d})"))));
        let next = Term::alt(
            sigma(p.t_rp + p.t_l, tau_then(x())),
            Term::time_iter(p.t_sp, sigma(p.t_rp + p.t_l + p.t_sp - p.t_r, tau_then(x()))),
        );
        s.push(Term::seq_all(vec![Term::delayable(Action::obs(&format!("r1({d})"))), deliver, next]));
    }
    spec(vec![("X3s".into(), Term::sum(s))], "X3s")
}

fn buffer(p: &ParParams) -> Spec {
    let s = p
        .data_names()
        .iter()
        .map(|d| {
            Term::seq_all(vec![
                Term::delayable(Action::obs(&format!("r1({d})"))),
                Term::delayable(Action::obs(&format!("s2({d})"))),
                Term::var("B"),
            ])
        })
        .collect();
    spec(vec![("B".into(), Term::sum(s))], "B")
}

/// Reference specifications with their root processes:
/// `X` (expanded, internal actions hidden), `X2` (abstracted),
/// `X3` (dormant silent steps removed), `X3s` (time-iteration form) and the
/// one-place buffer `B`. The timed ones need a time-out longer than a cycle.
pub fn reference_specs(p: &ParParams) -> Result<Model, ParError> {
    p.require_cycle()?;
    let mut m = Model::new(table(p)?);
    let x = expanded(p);
    m.add_proc("X", Term::abstr(hidden_actions(p), x.constant(&sym("X_0"))));
    m.add_spec("X", x);
    for (name, root, s) in [("X2", "X2", abstracted(p)), ("X3", "X3", simplified(p)), ("X3s", "X3s", iterated(p)), ("B", "B", buffer(p))] {
        m.add_proc(name, s.constant(&sym(root)));
        m.add_spec(name, s);
    }
    Ok(m)
}
