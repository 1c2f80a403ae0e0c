//! Seeded random generation of closed terms and small guarded
//! specifications.

use std::collections::BTreeMap;

use drtcalc_core::term::{act_set, sym, ActSet};
use drtcalc_core::{Action, ActionTable, Spec, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Observable actions of generated terms.
pub const ACTIONS: [&str; 4] = ["a", "b", "c", "d"];

/// `a | b = c`; handshaking.
pub fn standard_table() -> ActionTable {
    let mut t = ActionTable::new();
    for a in ACTIONS {
        t.add_action(a).unwrap();
    }
    t.add_comm("a", "b", "c").unwrap();
    t.set_handshaking().unwrap();
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    /// Merges, encapsulation and abstraction.
    pub concurrency: bool,
    pub abstraction: bool,
    /// Timeout operator.
    pub timeout: bool,
    /// Shift and time-free projection.
    pub shift_tf: bool,
    /// Small guarded recursion constants and time iterations as leaves.
    pub recursion: bool,
    pub tau: bool,
}

impl GenOptions {
    pub fn full() -> GenOptions {
        GenOptions { concurrency: true, abstraction: true, timeout: true, shift_tf: true, recursion: true, tau: true }
    }
    /// Choice, sequencing, delay, timeout and recursion only.
    pub fn bpa() -> GenOptions {
        GenOptions { concurrency: false, abstraction: false, ..GenOptions::full() }
    }
    /// The operators the elimination result covers.
    pub fn recursion_free() -> GenOptions {
        GenOptions { recursion: false, shift_tf: false, ..GenOptions::full() }
    }
    pub fn with_shift(self) -> GenOptions {
        GenOptions { shift_tf: true, ..self }
    }
}

impl Default for GenOptions {
    fn default() -> GenOptions {
        GenOptions::full()
    }
}

/// Deterministic in `(seed, size, opts)`; the result has at most `size`
/// nodes outside recursion bodies.
pub fn gen_closed_term(seed: u64, size: usize, opts: GenOptions) -> Term {
    gen_term(&mut rng(seed), size.max(1), opts)
}

pub fn gen_action(r: &mut Rng8, tau: bool) -> Action {
    let k = if tau { 5 } else { 4 };
    match r.gen_range(0..k) {
        4 => Action::Tau,
        i => Action::obs(ACTIONS[i]),
    }
}

/// A member of Act, τ or δ.
pub fn gen_any_action(r: &mut Rng8) -> Action {
    match r.gen_range(0..6) {
        4 => Action::Tau,
        5 => Action::Delta,
        i => Action::obs(ACTIONS[i]),
    }
}

pub fn gen_set(r: &mut Rng8) -> ActSet {
    let names: Vec<&str> = ACTIONS.iter().copied().filter(|_| r.gen_bool(0.4)).collect();
    act_set(names)
}

fn leaf(r: &mut Rng8, opts: GenOptions) -> Term {
    if opts.recursion && r.gen_ratio(1, 6) {
        return gen_rec_constant(r, opts.tau);
    }
    match r.gen_range(0..10) {
        0 => Term::delta(),
        1 if opts.tau => Term::tau(),
        _ => Term::act(gen_action(r, false)),
    }
}

pub fn gen_term(r: &mut Rng8, size: usize, opts: GenOptions) -> Term {
    if size <= 1 {
        return leaf(r, opts);
    }
    let mut unary: Vec<u8> = vec![0];
    if opts.timeout {
        unary.push(1);
    }
    if opts.concurrency {
        unary.push(2);
    }
    if opts.abstraction {
        unary.push(3);
    }
    if opts.shift_tf {
        unary.extend([4, 5]);
    }
    if opts.recursion {
        unary.push(6);
    }
    let mut binary: Vec<u8> = vec![10, 10, 11, 11];
    if opts.concurrency {
        binary.extend([12, 12, 13, 14]);
    }
    let pick = if size >= 3 && r.gen_ratio(2, 3) {
        *binary.choose(r).unwrap()
    } else {
        *unary.choose(r).unwrap()
    };
    if pick >= 10 {
        let left = r.gen_range(1..size - 1);
        let x = gen_term(r, left, opts);
        let y = gen_term(r, size - 1 - left, opts);
        return match pick {
            10 => Term::alt(x, y),
            11 => Term::seq(x, y),
            12 => Term::par(x, y),
            13 => Term::lmerge(x, y),
            _ => Term::cmerge(x, y),
        };
    }
    let x = gen_term(r, size - 1, opts);
    match pick {
        0 => Term::delay(x),
        1 => Term::timeout(x),
        2 => Term::encap(gen_set(r), x),
        3 => Term::abstr(gen_set(r), x),
        4 => Term::shift(x),
        5 => Term::tf(x),
        // iteration bodies become right-hand sides, where abstraction is not allowed
        _ if has_abstraction(&x) => Term::delay(x),
        _ => Term::time_iter(r.gen_range(1..=2), x),
    }
}

fn has_abstraction(t: &Term) -> bool {
    t.any_node(true, &mut |n| matches!(n.node(), drtcalc_core::Node::Abstr(..)))
}

/// A guarded specification over one or two variables whose variables
/// occur only in tail position, so the process is regular.
pub fn gen_spec(r: &mut Rng8, tau: bool) -> Spec {
    let vars: Vec<&str> = if r.gen_bool(0.5) { vec!["X"] } else { vec!["X", "Y"] };
    let mut eqs = BTreeMap::new();
    for x in &vars {
        let n = r.gen_range(1..=3);
        let mut items = Vec::new();
        for _ in 0..n {
            let v = Term::var(vars.choose(r).unwrap());
            items.push(match r.gen_range(0..5) {
                0 | 1 => Term::seq(Term::act(gen_action(r, false)), v),
                2 => Term::delay(v),
                3 => Term::seq(Term::delay(Term::act(gen_action(r, false))), v),
                _ => Term::act(gen_action(r, tau)),
            });
        }
        eqs.insert(sym(x), Term::sum(items));
    }
    Spec::new(eqs)
}

pub fn gen_rec_constant(r: &mut Rng8, tau: bool) -> Term {
    match r.gen_range(0..3) {
        0 => Term::delayable(gen_action(r, false)),
        _ => {
            let spec = gen_spec(r, tau);
            let x = if spec.get("Y").is_some() && r.gen_bool(0.5) { "Y" } else { "X" };
            spec.constant(x)
        }
    }
}
