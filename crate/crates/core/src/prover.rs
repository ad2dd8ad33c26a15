//! Backward proof search for the five calculi, plus the bounded-alternation
//! provability predicates and the minimal alternation measures of proofs.
//!
//! Unfocussed one-sided rules (`mall`; `amall` replaces id/one by wkid/w1):
//!
//!   ------ id        ---- one       |- G           |- G, A, B
//!   x, ~x            1              ------- bot    ----------- par
//!                                   |- G, bot      |- G, A # B
//!
//!   --------- top    |- G, A   |- D, B      |- G, Ai        |- G, A   |- G, B
//!   |- G, top        ---------------- *     --------- +     ---------------- &
//!   (no rule for 0)  |- G, D, A * B         |- G, A0+A1     |- G, A & B
//!
//!   ------------ wkid     --------- w1
//!   |- G, x, ~x           |- G, 1
//!
//! Focussed systems add a single `v>` (foci) or `^>` (co-foci) zone.
//! Deterministic rules: id/one/top/bot/par as above, plus
//!
//!   |- as, Ps v> Ps'             |- as, Ps ^> Ms
//!   ---------------- dec        ---------------- codec
//!   |- as, Ps, Ps'               |- as, Ps, Ms
//!
//! (`Ps'`, `Ms` nonempty; co-deciding may leave further with-formulas in
//! the context so that singleton co-foci stay complete). Nondeterministic:
//!
//!   |- G v> D, Ai        |- G v> S, A   |- D v> P, B      |- G, as, Ns
//!   ------------- +      ------------------------- *      ------------ rel
//!   |- G v> D, A0+A1     |- G, D v> S, P, A * B           |- G v> as, Ns
//!
//! Co-nondeterministic:
//!
//!   |- G ^> D, A   |- G ^> D, B      |- G, Ps, Os
//!   --------------------------- &    ------------ corel
//!   |- G ^> D, A & B                 |- G ^> Ps, Os
//!
//! Units 0 and 1 may sit in decide/co-decide contexts like atoms (they
//! have no applicable rule there); every unit may be released. The primed
//! system treats c-formulas like atoms (rel releases them, dec never
//! selects them) and has five extra deterministic initial sequents over
//! c-contexts.
//!
//! All rules strictly shrink (connective count, zone rank), so plain
//! memoization terminates without cycle detection.

use crate::formula::{MallFormula, MallRef, Name};
use crate::qbf::Side;
use crate::sequent::{Discipline, Phase, ProofTree, RuleLabel, Sequent, SystemId};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A query ran past its search-node budget. Reported separately from
/// "unprovable" so callers never conflate the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "search-node budget exceeded")
    }
}

impl std::error::Error for BudgetExceeded {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureError {
    Unprovable,
    BudgetExceeded,
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::Unprovable => write!(f, "sequent is not provable in this system"),
            MeasureError::BudgetExceeded => write!(f, "search-node budget exceeded"),
        }
    }
}

impl std::error::Error for MeasureError {}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

// ---------------------------------------------------------------------------
// Hash-consed formulas
// ---------------------------------------------------------------------------

type Id = u32;

/// Memo keys: canonical sorted context ids plus a focus id (u32::MAX for
/// plain sequents).
type SeqKey = (Box<[Id]>, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Bot,
    One,
    Zero,
    Top,
    Lit { name: u32, neg: bool },
    Par(Id, Id),
    Tensor(Id, Id),
    Plus(Id, Id),
    With(Id, Id),
}

#[derive(Default)]
struct Interner {
    map: HashMap<Node, Id>,
    nodes: Vec<Node>,
    is_c: Vec<bool>,
    /// literal leaves of c-formulas, for the c-initial patterns
    c_lits: Vec<Vec<(u32, bool)>>,
    refs: Vec<MallRef>,
    names: Vec<Name>,
    name_ids: HashMap<Name, u32>,
}

impl Interner {
    fn name_id(&mut self, n: &Name) -> u32 {
        if let Some(&id) = self.name_ids.get(n) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(n.clone());
        self.name_ids.insert(n.clone(), id);
        id
    }

    fn add(&mut self, node: Node, public: MallRef) -> Id {
        if let Some(&id) = self.map.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Id;
        let (is_c, lits) = match node {
            Node::Bot => (true, Vec::new()),
            Node::Plus(l, r) => {
                let lit = |i: Id| matches!(self.nodes[i as usize], Node::Lit { .. });
                let leaf_lit = |i: Id| match self.nodes[i as usize] {
                    Node::Lit { name, neg } => vec![(name, neg)],
                    _ => Vec::new(),
                };
                let c = (self.is_c[l as usize] && (lit(r) || self.is_c[r as usize]))
                    || (lit(l) && self.is_c[r as usize]);
                if c {
                    let mut lits = if self.is_c[l as usize] {
                        self.c_lits[l as usize].clone()
                    } else {
                        leaf_lit(l)
                    };
                    lits.extend(if self.is_c[r as usize] {
                        self.c_lits[r as usize].clone()
                    } else {
                        leaf_lit(r)
                    });
                    lits.sort();
                    lits.dedup();
                    (true, lits)
                } else {
                    (false, Vec::new())
                }
            }
            _ => (false, Vec::new()),
        };
        self.nodes.push(node);
        self.is_c.push(is_c);
        self.c_lits.push(lits);
        self.refs.push(public);
        self.map.insert(node, id);
        id
    }

    fn intern(&mut self, f: &MallFormula) -> Id {
        use MallFormula as M;
        match f {
            M::Bot => self.add(Node::Bot, Arc::new(M::Bot)),
            M::One => self.add(Node::One, Arc::new(M::One)),
            M::Zero => self.add(Node::Zero, Arc::new(M::Zero)),
            M::Top => self.add(Node::Top, Arc::new(M::Top)),
            M::Var(x) => {
                let name = self.name_id(x);
                self.add(Node::Lit { name, neg: false }, Arc::new(f.clone()))
            }
            M::NegVar(x) => {
                let name = self.name_id(x);
                self.add(Node::Lit { name, neg: true }, Arc::new(f.clone()))
            }
            M::Par(l, r) | M::Tensor(l, r) | M::Plus(l, r) | M::With(l, r) => {
                let li = self.intern(l);
                let ri = self.intern(r);
                let public = Arc::new(match f {
                    M::Par(..) => M::Par(
                        self.refs[li as usize].clone(),
                        self.refs[ri as usize].clone(),
                    ),
                    M::Tensor(..) => M::Tensor(
                        self.refs[li as usize].clone(),
                        self.refs[ri as usize].clone(),
                    ),
                    M::Plus(..) => M::Plus(
                        self.refs[li as usize].clone(),
                        self.refs[ri as usize].clone(),
                    ),
                    _ => M::With(
                        self.refs[li as usize].clone(),
                        self.refs[ri as usize].clone(),
                    ),
                });
                let node = match f {
                    M::Par(..) => Node::Par(li, ri),
                    M::Tensor(..) => Node::Tensor(li, ri),
                    M::Plus(..) => Node::Plus(li, ri),
                    _ => Node::With(li, ri),
                };
                self.add(node, public)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Prover
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum MState {
    StartSigma,
    StartPi,
    InDec,
    InCodec,
}

impl MState {
    fn step_dec(self) -> (u32, MState) {
        let cost = match self {
            MState::StartSigma => 1,
            MState::StartPi => 2,
            MState::InDec => 0,
            MState::InCodec => 1,
        };
        (cost, MState::InDec)
    }

    fn step_codec(self) -> (u32, MState) {
        let cost = match self {
            MState::StartSigma => 2,
            MState::StartPi => 1,
            MState::InDec => 1,
            MState::InCodec => 0,
        };
        (cost, MState::InCodec)
    }
}

/// Memoizing backward-search engine. One instance may be reused across
/// queries; verdicts are cached per system, so corpora with shared
/// subproblems decide quickly.
pub struct Prover {
    interner: Interner,
    budget: u64,
    /// restrict affine initial rules to literal-only discards
    lw: bool,
    memo: HashMap<(SystemId, bool, SeqKey), bool>,
    sig_memo: HashMap<(SystemId, Side, u32, SeqKey), bool>,
    mm_memo: HashMap<(SystemId, MState, SeqKey), Option<u32>>,
}

impl Default for Prover {
    fn default() -> Self {
        Prover::new()
    }
}

impl Prover {
    pub fn new() -> Prover {
        Prover::with_budget(DEFAULT_BUDGET)
    }

    pub fn with_budget(budget: u64) -> Prover {
        Prover {
            interner: Interner::default(),
            budget,
            lw: false,
            memo: HashMap::new(),
            sig_memo: HashMap::new(),
            mm_memo: HashMap::new(),
        }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn intern_plain(&mut self, s: &Sequent) -> Vec<Id> {
        assert!(s.is_plain(), "top-level queries take plain sequents");
        let mut ctx: Vec<Id> = s.ctx.iter().map(|f| self.interner.intern(f)).collect();
        ctx.sort_unstable();
        ctx
    }

    /// Provability verdict. The same verdict is produced for every
    /// discipline of a focussed system, so none is taken here.
    pub fn decide(&mut self, system: SystemId, s: &Sequent) -> Result<bool, BudgetExceeded> {
        let ctx = self.intern_plain(s);
        let mut used = 0u64;
        if system.is_focussed() {
            self.foc_plain(system, ctx, &mut used)
        } else {
            self.unf_plain(system, ctx, &mut used)
        }
    }

    /// Search for a proof; `Ok(None)` means unprovable. Returned proofs
    /// are always bi-focussed for focussed systems (hence valid under
    /// every discipline) and pass [`check_proof`].
    pub fn prove(
        &mut self,
        system: SystemId,
        _discipline: Discipline,
        s: &Sequent,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        let ctx = self.intern_plain(s);
        let mut used = 0u64;
        let provable = if system.is_focussed() {
            self.foc_plain(system, ctx.clone(), &mut used)?
        } else {
            self.unf_plain(system, ctx.clone(), &mut used)?
        };
        if !provable {
            return Ok(None);
        }
        let tree = if system.is_focussed() {
            self.build_foc_plain(system, ctx, &mut used)?
        } else {
            self.build_unf(system, ctx, &mut used)?
        };
        Ok(Some(tree.expect("decide said provable")))
    }

    /// Affine provability using only literal-discarding initial rules:
    /// wkid and w1 may drop literal occurrences but nothing larger.
    /// Proofs found under this restriction therefore have literal-only
    /// weakened formulas. Top-closures stay unrestricted; discarding a
    /// context is that rule's own power, not weakening.
    pub fn decide_literal_weakening(
        &mut self,
        system: SystemId,
        s: &Sequent,
    ) -> Result<bool, BudgetExceeded> {
        assert!(
            system.is_affine(),
            "weakening restriction needs an affine system"
        );
        self.lw = true;
        let result = self.decide(system, s);
        self.lw = false;
        result
    }

    /// As [`Prover::decide_literal_weakening`], returning the proof.
    pub fn prove_literal_weakening(
        &mut self,
        system: SystemId,
        s: &Sequent,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        assert!(
            system.is_affine(),
            "weakening restriction needs an affine system"
        );
        self.lw = true;
        let result = self.prove(system, Discipline::Multi, s);
        self.lw = false;
        result
    }

    /// Least-level bounded-alternation provability (`Sigma^f_k`).
    /// Unfocussed system ids are routed to their focussed counterparts,
    /// which have the same provable sequents.
    pub fn sigma_f_provable(
        &mut self,
        system: SystemId,
        s: &Sequent,
        k: usize,
    ) -> Result<bool, BudgetExceeded> {
        let sys = focussed_counterpart(system);
        let ctx = self.intern_plain(s);
        let mut used = 0u64;
        self.sig(sys, ctx, k as u32, &mut used)
    }

    pub fn pi_f_provable(
        &mut self,
        system: SystemId,
        s: &Sequent,
        k: usize,
    ) -> Result<bool, BudgetExceeded> {
        let sys = focussed_counterpart(system);
        let ctx = self.intern_plain(s);
        let mut used = 0u64;
        self.pi(sys, ctx, k as u32, &mut used)
    }

    /// Minimum over all proofs of the branch-maximal number of
    /// decide/co-decide blocks, counted with the sigma convention: a
    /// proof with only dec steps measures 1, one with neither dec nor
    /// codec measures 0.
    pub fn sigma_measure(&mut self, system: SystemId, s: &Sequent) -> Result<usize, MeasureError> {
        self.measure(system, s, MState::StartSigma)
    }

    /// As [`Prover::sigma_measure`] with the pi convention (codec-only
    /// proofs measure 1).
    pub fn pi_measure(&mut self, system: SystemId, s: &Sequent) -> Result<usize, MeasureError> {
        self.measure(system, s, MState::StartPi)
    }

    fn measure(
        &mut self,
        system: SystemId,
        s: &Sequent,
        state: MState,
    ) -> Result<usize, MeasureError> {
        let sys = focussed_counterpart(system);
        let ctx = self.intern_plain(s);
        let mut used = 0u64;
        match self.mm_plain(sys, ctx, state, &mut used) {
            Err(BudgetExceeded) => Err(MeasureError::BudgetExceeded),
            Ok(None) => Err(MeasureError::Unprovable),
            Ok(Some(v)) => Ok(v as usize),
        }
    }

    // -- shared helpers ----------------------------------------------------

    fn node(&self, id: Id) -> Node {
        self.interner.nodes[id as usize]
    }

    fn is_c(&self, id: Id) -> bool {
        self.interner.is_c[id as usize]
    }

    /// Positive for decide purposes: tensor or plus, minus c-formulas in
    /// the primed system.
    fn is_positive(&self, sys: SystemId, id: Id) -> bool {
        match self.node(id) {
            Node::Tensor(..) => true,
            Node::Plus(..) => sys != SystemId::FocMallPrime || !self.is_c(id),
            _ => false,
        }
    }

    fn is_with(&self, id: Id) -> bool {
        matches!(self.node(id), Node::With(..))
    }

    fn tick(&self, used: &mut u64) -> Result<(), BudgetExceeded> {
        *used += 1;
        if *used > self.budget {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    /// Apply the par and bot rules to a fixpoint, then test for an
    /// initial sequent of the system. Confluent, so one pass suffices.
    fn saturate(&self, sys: SystemId, ctx: &[Id]) -> (Vec<Id>, bool) {
        let mut out = Vec::with_capacity(ctx.len());
        let mut stack: Vec<Id> = ctx.to_vec();
        while let Some(f) = stack.pop() {
            match self.node(f) {
                Node::Par(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Node::Bot => {}
                _ => out.push(f),
            }
        }
        out.sort_unstable();
        let closed = self.closed(sys, &out);
        (out, closed)
    }

    fn closed(&self, sys: SystemId, ctx: &[Id]) -> bool {
        if ctx.iter().any(|&f| matches!(self.node(f), Node::Top)) {
            return true;
        }
        match sys {
            SystemId::Amall | SystemId::FocMallW => {
                let has_one = ctx.iter().any(|&f| matches!(self.node(f), Node::One));
                if has_one {
                    if !self.lw {
                        return true;
                    }
                    // literal-only discards: exactly one non-literal, the 1
                    let mut non_lit = ctx
                        .iter()
                        .filter(|&&f| !matches!(self.node(f), Node::Lit { .. }));
                    let first = non_lit.next();
                    if non_lit.next().is_none()
                        && first.is_some_and(|&f| matches!(self.node(f), Node::One))
                    {
                        return true;
                    }
                }
                self.dual_pair_closure(ctx)
            }
            SystemId::Mall | SystemId::FocMall => {
                (ctx.len() == 1 && matches!(self.node(ctx[0]), Node::One))
                    || (ctx.len() == 2 && self.exact_dual_pair(ctx[0], ctx[1]))
            }
            SystemId::FocMallPrime => self.closed_prime(ctx),
        }
    }

    fn dual_pair_closure(&self, ctx: &[Id]) -> bool {
        if self.lw
            && !ctx
                .iter()
                .all(|&f| matches!(self.node(f), Node::Lit { .. }))
        {
            return false;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for &f in ctx {
            if let Node::Lit { name, neg: n } = self.node(f) {
                if n {
                    neg.push(name);
                } else {
                    pos.push(name);
                }
            }
        }
        pos.iter().any(|n| neg.contains(n))
    }

    fn exact_dual_pair(&self, a: Id, b: Id) -> bool {
        match (self.node(a), self.node(b)) {
            (Node::Lit { name: n1, neg: x }, Node::Lit { name: n2, neg: y }) => n1 == n2 && x != y,
            _ => false,
        }
    }

    /// The five initial sequents of the c-formula system: the whole
    /// context is c-formulas apart from the displayed literals or 1, and
    /// parenthesized literals must occur inside their c-formula.
    fn closed_prime(&self, ctx: &[Id]) -> bool {
        let mut cs: Vec<Id> = Vec::new();
        let mut others: Vec<Id> = Vec::new();
        for &f in ctx {
            if self.is_c(f) {
                cs.push(f);
            } else {
                others.push(f);
            }
        }
        let contains =
            |c: Id, name: u32, neg: bool| self.interner.c_lits[c as usize].contains(&(name, neg));
        match others.as_slice() {
            // |- cs, 1
            [one] if matches!(self.node(*one), Node::One) => true,
            // |- cs, x, ~x
            [a, b] => self.exact_dual_pair(*a, *b),
            // |- cs, c(x), ~x  and  |- cs, c(~x), x
            [lit] => match self.node(*lit) {
                Node::Lit { name, neg } => cs.iter().any(|&c| contains(c, name, !neg)),
                _ => false,
            },
            // |- cs, c(x), d(~x), distinct occurrences
            [] => {
                for (i, &c) in cs.iter().enumerate() {
                    for (j, &d) in cs.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        if self.interner.c_lits[c as usize]
                            .iter()
                            .any(|&(name, neg)| !neg && contains(d, name, true))
                        {
                            return true;
                        }
                    }
                }
                false
            }
            _ => false,
        }
    }

    /// Leaves of nested withs, i.e. the sequents a full co-phase on this
    /// co-focus releases.
    fn with_leaves(&self, id: Id, out: &mut Vec<Id>) {
        match self.node(id) {
            Node::With(l, r) => {
                self.with_leaves(l, out);
                self.with_leaves(r, out);
            }
            _ => out.push(id),
        }
    }

    // -- focussed decision procedure ----------------------------------------

    fn foc_plain(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let (sat, closed) = self.saturate(sys, &ctx);
        if closed {
            return Ok(true);
        }
        let key = (sys, self.lw, (sat.clone().into_boxed_slice(), u32::MAX));
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = self.foc_plain_expand(sys, &sat, used)?;
        self.memo.insert(key, result);
        Ok(result)
    }

    fn foc_plain_expand(
        &mut self,
        sys: SystemId,
        sat: &[Id],
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        // the co-nondeterministic phase has priority: deciding requires a
        // with-free context
        if let Some(&m) = sat.iter().find(|&&f| self.is_with(f)) {
            let rest = remove_one(sat, m);
            let mut leaves = Vec::new();
            self.with_leaves(m, &mut leaves);
            for leaf in leaves {
                let mut next = rest.clone();
                next.push(leaf);
                if !self.foc_plain(sys, next, used)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let mut tried = Vec::new();
        for &p in sat.iter() {
            if !self.is_positive(sys, p) || tried.contains(&p) {
                continue;
            }
            tried.push(p);
            let rest = remove_one(sat, p);
            if self.foc_down(sys, rest, p, used)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn foc_down(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        focus: Id,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let key = (sys, self.lw, (ctx.clone().into_boxed_slice(), focus));
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = self.foc_down_expand(sys, &ctx, focus, used)?;
        self.memo.insert(key, result);
        Ok(result)
    }

    fn foc_down_expand(
        &mut self,
        sys: SystemId,
        ctx: &[Id],
        focus: Id,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        if self.is_positive(sys, focus) {
            match self.node(focus) {
                Node::Plus(l, r) => Ok(self.foc_down(sys, ctx.to_vec(), l, used)?
                    || self.foc_down(sys, ctx.to_vec(), r, used)?),
                Node::Tensor(l, r) => {
                    for (left, right) in multiset_splits(ctx) {
                        if self.foc_down(sys, left, l, used)?
                            && self.foc_down(sys, right, r, used)?
                        {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
                _ => unreachable!("positive formulas are tensor or plus"),
            }
        } else {
            // release
            let mut next = ctx.to_vec();
            next.push(focus);
            self.foc_plain(sys, next, used)
        }
    }

    // -- unfocussed decision procedure --------------------------------------

    // Exhaustive rule application over the unfocussed figure; memoization
    // makes the interleavings collapse.
    fn unf_plain(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        if self.closed(sys, &ctx) {
            return Ok(true);
        }
        let key = (sys, self.lw, (ctx.clone().into_boxed_slice(), u32::MAX));
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = self.unf_expand(sys, &ctx, used)?;
        self.memo.insert(key, result);
        Ok(result)
    }

    fn unf_expand(
        &mut self,
        sys: SystemId,
        ctx: &[Id],
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let mut tried = Vec::new();
        for &f in ctx.iter() {
            if tried.contains(&f) {
                continue;
            }
            tried.push(f);
            let rest = remove_one(ctx, f);
            match self.node(f) {
                Node::Bot => {
                    if self.unf_plain(sys, rest, used)? {
                        return Ok(true);
                    }
                }
                Node::Par(l, r) => {
                    let mut next = rest;
                    next.push(l);
                    next.push(r);
                    if self.unf_plain(sys, next, used)? {
                        return Ok(true);
                    }
                }
                Node::Plus(l, r) => {
                    for child in [l, r] {
                        let mut next = rest.clone();
                        next.push(child);
                        if self.unf_plain(sys, next, used)? {
                            return Ok(true);
                        }
                    }
                }
                Node::With(l, r) => {
                    let mut a = rest.clone();
                    a.push(l);
                    let mut b = rest;
                    b.push(r);
                    if self.unf_plain(sys, a, used)? && self.unf_plain(sys, b, used)? {
                        return Ok(true);
                    }
                }
                Node::Tensor(l, r) => {
                    for (mut left, mut right) in multiset_splits(&rest) {
                        left.push(l);
                        right.push(r);
                        if self.unf_plain(sys, left, used)? && self.unf_plain(sys, right, used)? {
                            return Ok(true);
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(false)
    }

    // -- bounded-alternation predicates -------------------------------------

    // Sigma^f_0 = Pi^f_0: provable by deterministic rules alone.
    // Sigma^f_{k+1}: some derivation through deterministic and
    // nondeterministic rules whose open leaves are Pi^f_k.
    // Pi^f_{k+1}: every maximal bottom-up path through deterministic and
    // co-nondeterministic rules ends Sigma^f_k-provable.

    fn sig(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        k: u32,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let (sat, closed) = self.saturate(sys, &ctx);
        if closed {
            return Ok(true);
        }
        if k == 0 {
            return Ok(false);
        }
        let key = (
            sys,
            Side::Sigma,
            k,
            (sat.clone().into_boxed_slice(), u32::MAX),
        );
        if let Some(&v) = self.sig_memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        // stopping the nondeterministic prefix here leaves a Pi^f_{k-1}
        // obligation
        let mut result = self.pi(sys, sat.clone(), k - 1, used)?;
        if !result && !sat.iter().any(|&f| self.is_with(f)) {
            let mut tried = Vec::new();
            for &p in sat.iter() {
                if !self.is_positive(sys, p) || tried.contains(&p) {
                    continue;
                }
                tried.push(p);
                let rest = remove_one(&sat, p);
                if self.sig_down(sys, rest, p, k, used)? {
                    result = true;
                    break;
                }
            }
        }
        self.sig_memo.insert(key, result);
        Ok(result)
    }

    fn sig_down(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        focus: Id,
        k: u32,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let key = (sys, Side::Sigma, k, (ctx.clone().into_boxed_slice(), focus));
        if let Some(&v) = self.sig_memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = if self.is_positive(sys, focus) {
            match self.node(focus) {
                Node::Plus(l, r) => {
                    self.sig_down(sys, ctx.clone(), l, k, used)?
                        || self.sig_down(sys, ctx.clone(), r, k, used)?
                }
                Node::Tensor(l, r) => {
                    let mut ok = false;
                    for (left, right) in multiset_splits(&ctx) {
                        if self.sig_down(sys, left, l, k, used)?
                            && self.sig_down(sys, right, r, k, used)?
                        {
                            ok = true;
                            break;
                        }
                    }
                    ok
                }
                _ => unreachable!(),
            }
        } else {
            let mut next = ctx.clone();
            next.push(focus);
            self.sig(sys, next, k, used)?
        };
        self.sig_memo.insert(key, result);
        Ok(result)
    }

    fn pi(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        k: u32,
        used: &mut u64,
    ) -> Result<bool, BudgetExceeded> {
        let (sat, closed) = self.saturate(sys, &ctx);
        if closed {
            return Ok(true);
        }
        if k == 0 {
            return Ok(false);
        }
        let key = (sys, Side::Pi, k, (sat.clone().into_boxed_slice(), u32::MAX));
        if let Some(&v) = self.sig_memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = match sat.iter().find(|&&f| self.is_with(f)) {
            // no co-nondeterministic step applies: the path is maximal here
            None => self.sig(sys, sat.clone(), k - 1, used)?,
            Some(&m) => {
                // the co-phase is invertible, so one co-decide order covers
                // all maximal paths
                let rest = remove_one(&sat, m);
                let mut leaves = Vec::new();
                self.with_leaves(m, &mut leaves);
                let mut all = true;
                for leaf in leaves {
                    let mut next = rest.clone();
                    next.push(leaf);
                    if !self.pi(sys, next, k, used)? {
                        all = false;
                        break;
                    }
                }
                all
            }
        };
        self.sig_memo.insert(key, result);
        Ok(result)
    }

    // -- minimal alternation measure ----------------------------------------

    // Minimax over the proof space: min over rule choices, max over
    // premises, of the number of dec/codec blocks entered along a branch.
    // None = no proof in this subtree.

    fn mm_plain(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        state: MState,
        used: &mut u64,
    ) -> Result<Option<u32>, BudgetExceeded> {
        let (sat, closed) = self.saturate(sys, &ctx);
        if closed {
            return Ok(Some(0));
        }
        let key = (sys, state, (sat.clone().into_boxed_slice(), u32::MAX));
        if let Some(&v) = self.mm_memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = if let Some(&m) = sat.iter().find(|&&f| self.is_with(f)) {
            let (cost, next_state) = state.step_codec();
            let rest = remove_one(&sat, m);
            let mut leaves = Vec::new();
            self.with_leaves(m, &mut leaves);
            let mut worst = Some(0u32);
            for leaf in leaves {
                let mut next = rest.clone();
                next.push(leaf);
                match (self.mm_plain(sys, next, next_state, used)?, worst) {
                    (None, _) => {
                        worst = None;
                        break;
                    }
                    (Some(v), Some(w)) => worst = Some(w.max(v)),
                    (Some(_), None) => unreachable!(),
                }
            }
            worst.map(|w| w + cost)
        } else {
            let (cost, next_state) = state.step_dec();
            let mut best: Option<u32> = None;
            let mut tried = Vec::new();
            for &p in sat.iter() {
                if !self.is_positive(sys, p) || tried.contains(&p) {
                    continue;
                }
                tried.push(p);
                let rest = remove_one(&sat, p);
                if let Some(v) = self.mm_down(sys, rest, p, next_state, used)? {
                    let total = v + cost;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
            }
            best
        };
        self.mm_memo.insert(key, result);
        Ok(result)
    }

    fn mm_down(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        focus: Id,
        state: MState,
        used: &mut u64,
    ) -> Result<Option<u32>, BudgetExceeded> {
        let key = (sys, state, (ctx.clone().into_boxed_slice(), focus));
        if let Some(&v) = self.mm_memo.get(&key) {
            return Ok(v);
        }
        self.tick(used)?;
        let result = if self.is_positive(sys, focus) {
            match self.node(focus) {
                Node::Plus(l, r) => {
                    let a = self.mm_down(sys, ctx.clone(), l, state, used)?;
                    let b = self.mm_down(sys, ctx.clone(), r, state, used)?;
                    match (a, b) {
                        (Some(x), Some(y)) => Some(x.min(y)),
                        (x, y) => x.or(y),
                    }
                }
                Node::Tensor(l, r) => {
                    let mut best: Option<u32> = None;
                    for (left, right) in multiset_splits(&ctx) {
                        if let (Some(x), Some(y)) = (
                            self.mm_down(sys, left, l, state, used)?,
                            self.mm_down(sys, right, r, state, used)?,
                        ) {
                            let v = x.max(y);
                            best = Some(best.map_or(v, |b| b.min(v)));
                        }
                    }
                    best
                }
                _ => unreachable!(),
            }
        } else {
            let mut next = ctx.clone();
            next.push(focus);
            self.mm_plain(sys, next, state, used)?
        };
        self.mm_memo.insert(key, result);
        Ok(result)
    }

    // -- proof reconstruction ------------------------------------------------

    fn public_seq(&self, ctx: &[Id], phase: Phase) -> Sequent {
        Sequent::from_refs(
            ctx.iter()
                .map(|&f| self.interner.refs[f as usize].clone())
                .collect(),
            phase,
        )
    }

    fn closure_label(&self, sys: SystemId, ctx: &[Id]) -> RuleLabel {
        if ctx.iter().any(|&f| matches!(self.node(f), Node::Top)) {
            return RuleLabel::Top;
        }
        match sys {
            SystemId::Amall | SystemId::FocMallW => {
                if self.dual_pair_closure(ctx) {
                    RuleLabel::WkId
                } else {
                    RuleLabel::WOne
                }
            }
            SystemId::Mall | SystemId::FocMall => {
                if ctx.len() == 2 {
                    RuleLabel::Id
                } else {
                    RuleLabel::One
                }
            }
            SystemId::FocMallPrime => {
                if ctx.len() == 2 && self.exact_dual_pair(ctx[0], ctx[1]) {
                    RuleLabel::Id
                } else if ctx.len() == 1 && matches!(self.node(ctx[0]), Node::One) {
                    RuleLabel::One
                } else {
                    RuleLabel::CInit
                }
            }
        }
    }

    /// Emit the saturation steps (par, bot) one node at a time, ending at
    /// `k(saturated_ctx)`.
    fn build_saturation(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        k: &mut SaturationCont,
        used: &mut u64,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        let mut sorted = ctx;
        sorted.sort_unstable();
        if let Some(&f) = sorted
            .iter()
            .find(|&&f| matches!(self.node(f), Node::Par(..) | Node::Bot))
        {
            let rest = remove_one(&sorted, f);
            let (label, next) = match self.node(f) {
                Node::Par(l, r) => {
                    let mut next = rest;
                    next.push(l);
                    next.push(r);
                    (RuleLabel::Par, next)
                }
                Node::Bot => (RuleLabel::Bot, rest),
                _ => unreachable!(),
            };
            let conclusion = self.public_seq(&sorted, Phase::Plain);
            let sub = self.build_saturation(sys, next, k, used)?;
            return Ok(sub.map(|p| ProofTree::node(sys, label, conclusion, vec![p])));
        }
        if self.closed(sys, &sorted) {
            let label = self.closure_label(sys, &sorted);
            let conclusion = self.public_seq(&sorted, Phase::Plain);
            return Ok(Some(ProofTree::leaf(sys, label, conclusion)));
        }
        k(self, sorted, used)
    }

    fn build_foc_plain(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        used: &mut u64,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        self.build_saturation(
            sys,
            ctx,
            &mut move |this, sat, used| {
                let conclusion = this.public_seq(&sat, Phase::Plain);
                if let Some(&m) = sat.iter().find(|&&f| this.is_with(f)) {
                    let rest = remove_one(&sat, m);
                    let premise = this.build_foc_up(sys, rest.clone(), m, used)?;
                    return Ok(premise
                        .map(|p| ProofTree::node(sys, RuleLabel::Codec, conclusion, vec![p])));
                }
                let mut tried = Vec::new();
                for &p in sat.iter() {
                    if !this.is_positive(sys, p) || tried.contains(&p) {
                        continue;
                    }
                    tried.push(p);
                    let rest = remove_one(&sat, p);
                    if this.foc_down(sys, rest.clone(), p, used)? {
                        let premise = this.build_foc_down(sys, rest, p, used)?;
                        return Ok(premise
                            .map(|t| ProofTree::node(sys, RuleLabel::Dec, conclusion, vec![t])));
                    }
                }
                Ok(None)
            },
            used,
        )
    }

    fn build_foc_up(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        cofocus: Id,
        used: &mut u64,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        let conclusion = self.public_seq(
            &ctx,
            Phase::FocusUp(vec![self.interner.refs[cofocus as usize].clone()]),
        );
        match self.node(cofocus) {
            Node::With(l, r) => {
                let a = self.build_foc_up(sys, ctx.clone(), l, used)?;
                let b = self.build_foc_up(sys, ctx, r, used)?;
                match (a, b) {
                    (Some(a), Some(b)) => Ok(Some(ProofTree::node(
                        sys,
                        RuleLabel::With,
                        conclusion,
                        vec![a, b],
                    ))),
                    _ => Ok(None),
                }
            }
            _ => {
                let mut next = ctx;
                next.push(cofocus);
                let sub = self.build_foc_plain(sys, next, used)?;
                Ok(sub.map(|p| ProofTree::node(sys, RuleLabel::Corel, conclusion, vec![p])))
            }
        }
    }

    fn build_foc_down(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        focus: Id,
        used: &mut u64,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        let conclusion = self.public_seq(
            &ctx,
            Phase::FocusDown(vec![self.interner.refs[focus as usize].clone()]),
        );
        if self.is_positive(sys, focus) {
            match self.node(focus) {
                Node::Plus(l, r) => {
                    for child in [l, r] {
                        if self.foc_down(sys, ctx.clone(), child, used)? {
                            let premise = self.build_foc_down(sys, ctx, child, used)?;
                            return Ok(premise.map(|p| {
                                ProofTree::node(sys, RuleLabel::Plus, conclusion, vec![p])
                            }));
                        }
                    }
                    Ok(None)
                }
                Node::Tensor(l, r) => {
                    for (left, right) in multiset_splits(&ctx) {
                        if self.foc_down(sys, left.clone(), l, used)?
                            && self.foc_down(sys, right.clone(), r, used)?
                        {
                            let a = self.build_foc_down(sys, left, l, used)?;
                            let b = self.build_foc_down(sys, right, r, used)?;
                            if let (Some(a), Some(b)) = (a, b) {
                                return Ok(Some(ProofTree::node(
                                    sys,
                                    RuleLabel::Tensor,
                                    conclusion,
                                    vec![a, b],
                                )));
                            }
                        }
                    }
                    Ok(None)
                }
                _ => unreachable!(),
            }
        } else {
            let mut next = ctx;
            next.push(focus);
            let sub = self.build_foc_plain(sys, next, used)?;
            Ok(sub.map(|p| ProofTree::node(sys, RuleLabel::Rel, conclusion, vec![p])))
        }
    }

    fn build_unf(
        &mut self,
        sys: SystemId,
        ctx: Vec<Id>,
        used: &mut u64,
    ) -> Result<Option<ProofTree>, BudgetExceeded> {
        let mut sorted = ctx;
        sorted.sort_unstable();
        let conclusion = self.public_seq(&sorted, Phase::Plain);
        if self.closed(sys, &sorted) {
            let label = self.closure_label(sys, &sorted);
            return Ok(Some(ProofTree::leaf(sys, label, conclusion)));
        }
        let mut tried = Vec::new();
        for &f in sorted.iter() {
            if tried.contains(&f) {
                continue;
            }
            tried.push(f);
            let rest = remove_one(&sorted, f);
            match self.node(f) {
                Node::Bot => {
                    if self.unf_plain(sys, rest.clone(), used)? {
                        let p = self.build_unf(sys, rest, used)?.unwrap();
                        return Ok(Some(ProofTree::node(
                            sys,
                            RuleLabel::Bot,
                            conclusion,
                            vec![p],
                        )));
                    }
                }
                Node::Par(l, r) => {
                    let mut next = rest;
                    next.push(l);
                    next.push(r);
                    if self.unf_plain(sys, next.clone(), used)? {
                        let p = self.build_unf(sys, next, used)?.unwrap();
                        return Ok(Some(ProofTree::node(
                            sys,
                            RuleLabel::Par,
                            conclusion,
                            vec![p],
                        )));
                    }
                }
                Node::Plus(l, r) => {
                    for child in [l, r] {
                        let mut next = rest.clone();
                        next.push(child);
                        if self.unf_plain(sys, next.clone(), used)? {
                            let p = self.build_unf(sys, next, used)?.unwrap();
                            return Ok(Some(ProofTree::node(
                                sys,
                                RuleLabel::Plus,
                                conclusion,
                                vec![p],
                            )));
                        }
                    }
                }
                Node::With(l, r) => {
                    let mut a = rest.clone();
                    a.push(l);
                    let mut b = rest.clone();
                    b.push(r);
                    if self.unf_plain(sys, a.clone(), used)?
                        && self.unf_plain(sys, b.clone(), used)?
                    {
                        let pa = self.build_unf(sys, a, used)?.unwrap();
                        let pb = self.build_unf(sys, b, used)?.unwrap();
                        return Ok(Some(ProofTree::node(
                            sys,
                            RuleLabel::With,
                            conclusion,
                            vec![pa, pb],
                        )));
                    }
                }
                Node::Tensor(l, r) => {
                    for (mut left, mut right) in multiset_splits(&rest) {
                        left.push(l);
                        right.push(r);
                        if self.unf_plain(sys, left.clone(), used)?
                            && self.unf_plain(sys, right.clone(), used)?
                        {
                            let pa = self.build_unf(sys, left, used)?.unwrap();
                            let pb = self.build_unf(sys, right, used)?.unwrap();
                            return Ok(Some(ProofTree::node(
                                sys,
                                RuleLabel::Tensor,
                                conclusion,
                                vec![pa, pb],
                            )));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    }
}

/// Continuation invoked by [`Prover::build_saturation`] on the saturated,
/// unclosed context.
type SaturationCont =
    dyn FnMut(&mut Prover, Vec<Id>, &mut u64) -> Result<Option<ProofTree>, BudgetExceeded>;

fn focussed_counterpart(sys: SystemId) -> SystemId {
    match sys {
        SystemId::Mall => SystemId::FocMall,
        SystemId::Amall => SystemId::FocMallW,
        other => other,
    }
}

fn remove_one(ctx: &[Id], f: Id) -> Vec<Id> {
    let mut out = Vec::with_capacity(ctx.len().saturating_sub(1));
    let mut removed = false;
    for &g in ctx {
        if !removed && g == f {
            removed = true;
        } else {
            out.push(g);
        }
    }
    debug_assert!(removed);
    out
}

/// All splits of a sorted multiset into an ordered pair of sub-multisets.
fn multiset_splits(ctx: &[Id]) -> Vec<(Vec<Id>, Vec<Id>)> {
    let mut groups: Vec<(Id, usize)> = Vec::new();
    for &f in ctx {
        match groups.last_mut() {
            Some((g, n)) if *g == f => *n += 1,
            _ => groups.push((f, 1)),
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; groups.len()];
    loop {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &(g, n)) in groups.iter().enumerate() {
            for _ in 0..counts[i] {
                left.push(g);
            }
            for _ in counts[i]..n {
                right.push(g);
            }
        }
        out.push((left, right));
        // odometer increment
        let mut i = 0;
        loop {
            if i == groups.len() {
                return out;
            }
            if counts[i] < groups[i].1 {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Saturation on public sequents
// ---------------------------------------------------------------------------

/// Apply the deterministic rewriting rules (par unfolding, bot deletion)
/// to a fixpoint. Maximal application is order-independent, so the result
/// is canonical. Expects a plain sequent.
pub fn deterministic_saturate(s: &Sequent) -> Sequent {
    debug_assert!(s.is_plain());
    let mut out: Vec<MallRef> = Vec::with_capacity(s.ctx.len());
    let mut stack: Vec<MallRef> = s.ctx.clone();
    while let Some(f) = stack.pop() {
        match &*f {
            MallFormula::Par(l, r) => {
                stack.push(l.clone());
                stack.push(r.clone());
            }
            MallFormula::Bot => {}
            _ => out.push(f),
        }
    }
    Sequent::from_refs(out, Phase::Plain)
}

// ---------------------------------------------------------------------------
// Proof checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub msg: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid proof at {:?}: {}", self.path, self.msg)
    }
}

impl std::error::Error for CheckError {}

pub fn check_proof(p: &ProofTree) -> bool {
    check_proof_with(p, None).is_ok()
}

/// Schema-check every node against its system's rules; `discipline`
/// additionally enforces singleton foci/co-foci where it demands them.
pub fn check_proof_with(p: &ProofTree, discipline: Option<Discipline>) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_node(p, discipline, &mut path)
}

fn err(path: &[usize], msg: impl Into<String>) -> CheckError {
    CheckError {
        path: path.to_vec(),
        msg: msg.into(),
    }
}

fn remove_one_ref(v: &[MallRef], f: &MallFormula) -> Option<Vec<MallRef>> {
    let pos = v.iter().position(|g| &**g == f)?;
    let mut out = v.to_vec();
    out.remove(pos);
    Some(out)
}

fn multiset_union(a: &[MallRef], b: &[MallRef]) -> Vec<MallRef> {
    let mut out: Vec<MallRef> = a.to_vec();
    out.extend(b.iter().cloned());
    out.sort();
    out
}

fn multiset_eq(a: &[MallRef], b: &[MallRef]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

fn is_dead(sys: SystemId, f: &MallFormula) -> bool {
    // formulas with no applicable rule that may sit in dec/codec contexts
    match f {
        MallFormula::Zero | MallFormula::One => true,
        _ => sys == SystemId::FocMallPrime && f.is_c_formula(),
    }
}

fn ctx_is_atoms_positives(sys: SystemId, ctx: &[MallRef], allow_with: bool) -> bool {
    ctx.iter().all(|f| {
        f.is_literal()
            || is_dead(sys, f)
            || is_positive_for(sys, f)
            || (allow_with && matches!(&**f, MallFormula::With(..)))
    })
}

fn is_positive_for(sys: SystemId, f: &MallFormula) -> bool {
    match f {
        MallFormula::Tensor(..) => true,
        MallFormula::Plus(..) => sys != SystemId::FocMallPrime || !f.is_c_formula(),
        _ => false,
    }
}

fn check_closed_prime(ctx: &[MallRef]) -> bool {
    let (cs, others): (Vec<&MallRef>, Vec<&MallRef>) = ctx.iter().partition(|f| f.is_c_formula());
    let lits_of = |c: &MallRef| c.literals();
    let contains = |c: &MallRef, want: &(Name, bool)| lits_of(c).iter().any(|l| l == want);
    match others.as_slice() {
        [one] if ***one == MallFormula::One => true,
        [a, b] => match (&***a, &***b) {
            (MallFormula::Var(x), MallFormula::NegVar(y))
            | (MallFormula::NegVar(x), MallFormula::Var(y)) => x == y,
            _ => false,
        },
        [lit] => match &***lit {
            MallFormula::Var(x) => cs.iter().any(|c| contains(c, &(x.clone(), true))),
            MallFormula::NegVar(x) => cs.iter().any(|c| contains(c, &(x.clone(), false))),
            _ => false,
        },
        [] => cs.iter().enumerate().any(|(i, c)| {
            lits_of(c).iter().any(|(n, neg)| {
                !neg && cs
                    .iter()
                    .enumerate()
                    .any(|(j, d)| i != j && contains(d, &(n.clone(), true)))
            })
        }),
        _ => false,
    }
}

fn check_node(
    p: &ProofTree,
    discipline: Option<Discipline>,
    path: &mut Vec<usize>,
) -> Result<(), CheckError> {
    for (i, premise) in p.premises.iter().enumerate() {
        if premise.system != p.system {
            path.push(i);
            return Err(err(path, "premise from a different system"));
        }
        path.push(i);
        check_node(premise, discipline, path)?;
        path.pop();
    }
    check_rule(p, discipline, path)
}

fn check_rule(
    p: &ProofTree,
    discipline: Option<Discipline>,
    path: &[usize],
) -> Result<(), CheckError> {
    use MallFormula as M;
    use RuleLabel as R;
    let sys = p.system;
    let c = &p.conclusion;
    let arity = |n: usize| -> Result<(), CheckError> {
        if p.premises.len() == n {
            Ok(())
        } else {
            Err(err(path, format!("rule {} expects {} premises", p.rule, n)))
        }
    };
    let plain_ctx = || -> Result<&Vec<MallRef>, CheckError> {
        if c.is_plain() {
            Ok(&c.ctx)
        } else {
            Err(err(
                path,
                format!("rule {} needs a plain conclusion", p.rule),
            ))
        }
    };
    match p.rule {
        R::Id => {
            arity(0)?;
            if sys.is_affine() {
                return Err(err(path, "id is replaced by wkid in affine systems"));
            }
            let ctx = plain_ctx()?;
            let ok = ctx.len() == 2
                && match (&*ctx[0], &*ctx[1]) {
                    (M::Var(x), M::NegVar(y)) | (M::NegVar(x), M::Var(y)) => x == y,
                    _ => false,
                };
            if ok {
                Ok(())
            } else {
                Err(err(path, "id needs exactly a dual pair of literals"))
            }
        }
        R::WkId => {
            arity(0)?;
            if !sys.is_affine() {
                return Err(err(path, "wkid only exists in affine systems"));
            }
            let ctx = plain_ctx()?;
            let pairs = ctx.iter().any(|f| match &**f {
                M::Var(x) => ctx.iter().any(|g| matches!(&**g, M::NegVar(y) if y == x)),
                _ => false,
            });
            if pairs {
                Ok(())
            } else {
                Err(err(path, "wkid needs a dual pair somewhere in the context"))
            }
        }
        R::One => {
            arity(0)?;
            if sys.is_affine() {
                return Err(err(path, "one is replaced by w1 in affine systems"));
            }
            let ctx = plain_ctx()?;
            if ctx.len() == 1 && *ctx[0] == M::One {
                Ok(())
            } else {
                Err(err(path, "one needs the singleton sequent 1"))
            }
        }
        R::WOne => {
            arity(0)?;
            if !sys.is_affine() {
                return Err(err(path, "w1 only exists in affine systems"));
            }
            let ctx = plain_ctx()?;
            if ctx.iter().any(|f| **f == M::One) {
                Ok(())
            } else {
                Err(err(path, "w1 needs a 1 in the sequent"))
            }
        }
        R::Top => {
            arity(0)?;
            let ctx = plain_ctx()?;
            if ctx.iter().any(|f| **f == M::Top) {
                Ok(())
            } else {
                Err(err(path, "top needs a top in the sequent"))
            }
        }
        R::CInit => {
            arity(0)?;
            if sys != SystemId::FocMallPrime {
                return Err(err(path, "cinit only exists in the primed system"));
            }
            let ctx = plain_ctx()?;
            if check_closed_prime(ctx) {
                Ok(())
            } else {
                Err(err(path, "sequent matches none of the c-initial patterns"))
            }
        }
        R::Bot => {
            arity(1)?;
            let ctx = plain_ctx()?;
            let premise = &p.premises[0].conclusion;
            if !premise.is_plain() {
                return Err(err(path, "bot premise must be plain"));
            }
            match remove_one_ref(ctx, &M::Bot) {
                Some(rest) if multiset_eq(&rest, &premise.ctx) => Ok(()),
                _ => Err(err(path, "bot premise must drop exactly one bot")),
            }
        }
        R::Par => {
            arity(1)?;
            let ctx = plain_ctx()?;
            let premise = &p.premises[0].conclusion;
            if !premise.is_plain() {
                return Err(err(path, "par premise must be plain"));
            }
            for f in ctx.iter() {
                if let M::Par(l, r) = &**f {
                    let mut rest = remove_one_ref(ctx, f).unwrap();
                    rest.push(l.clone());
                    rest.push(r.clone());
                    if multiset_eq(&rest, &premise.ctx) {
                        return Ok(());
                    }
                }
            }
            Err(err(path, "no par formula matches the premise"))
        }
        R::Plus => {
            arity(1)?;
            let premise = &p.premises[0].conclusion;
            if sys.is_focussed() {
                let (ctx, foci) = down_zone(c, path)?;
                let (pctx, pfoci) = down_zone(premise, path)?;
                if !multiset_eq(ctx, pctx) {
                    return Err(err(path, "plus must not touch the context"));
                }
                for f in foci.iter() {
                    if let M::Plus(l, r) = &**f {
                        let rest = remove_one_ref(foci, f).unwrap();
                        for child in [l, r] {
                            let mut want = rest.clone();
                            want.push(child.clone());
                            if multiset_eq(&want, pfoci) {
                                return Ok(());
                            }
                        }
                    }
                }
                Err(err(path, "no focused plus formula matches the premise"))
            } else {
                let ctx = plain_ctx()?;
                if !premise.is_plain() {
                    return Err(err(path, "plus premise must be plain"));
                }
                for f in ctx.iter() {
                    if let M::Plus(l, r) = &**f {
                        let rest = remove_one_ref(ctx, f).unwrap();
                        for child in [l, r] {
                            let mut want = rest.clone();
                            want.push(child.clone());
                            if multiset_eq(&want, &premise.ctx) {
                                return Ok(());
                            }
                        }
                    }
                }
                Err(err(path, "no plus formula matches the premise"))
            }
        }
        R::With => {
            arity(2)?;
            let p0 = &p.premises[0].conclusion;
            let p1 = &p.premises[1].conclusion;
            if sys.is_focussed() {
                let (ctx, foci) = up_zone(c, path)?;
                let (c0, f0) = up_zone(p0, path)?;
                let (c1, f1) = up_zone(p1, path)?;
                if !multiset_eq(ctx, c0) || !multiset_eq(ctx, c1) {
                    return Err(err(path, "with must not touch the context"));
                }
                for f in foci.iter() {
                    if let M::With(l, r) = &**f {
                        let rest = remove_one_ref(foci, f).unwrap();
                        let mut wl = rest.clone();
                        wl.push(l.clone());
                        let mut wr = rest;
                        wr.push(r.clone());
                        if multiset_eq(&wl, f0) && multiset_eq(&wr, f1) {
                            return Ok(());
                        }
                    }
                }
                Err(err(path, "no co-focused with formula matches the premises"))
            } else {
                let ctx = plain_ctx()?;
                if !p0.is_plain() || !p1.is_plain() {
                    return Err(err(path, "with premises must be plain"));
                }
                for f in ctx.iter() {
                    if let M::With(l, r) = &**f {
                        let rest = remove_one_ref(ctx, f).unwrap();
                        let mut wl = rest.clone();
                        wl.push(l.clone());
                        let mut wr = rest;
                        wr.push(r.clone());
                        if multiset_eq(&wl, &p0.ctx) && multiset_eq(&wr, &p1.ctx) {
                            return Ok(());
                        }
                    }
                }
                Err(err(path, "no with formula matches the premises"))
            }
        }
        R::Tensor => {
            arity(2)?;
            let p0 = &p.premises[0].conclusion;
            let p1 = &p.premises[1].conclusion;
            if sys.is_focussed() {
                let (ctx, foci) = down_zone(c, path)?;
                let (c0, f0) = down_zone(p0, path)?;
                let (c1, f1) = down_zone(p1, path)?;
                if !multiset_eq(&multiset_union(c0, c1), ctx) {
                    return Err(err(path, "tensor premises must split the context"));
                }
                for f in foci.iter() {
                    if let M::Tensor(l, r) = &**f {
                        let rest = remove_one_ref(foci, f).unwrap();
                        if let (Some(s0), Some(s1)) = (remove_one_ref(f0, l), remove_one_ref(f1, r))
                        {
                            if multiset_eq(&multiset_union(&s0, &s1), &rest) {
                                return Ok(());
                            }
                        }
                    }
                }
                Err(err(path, "no focused tensor matches the premises"))
            } else {
                let ctx = plain_ctx()?;
                if !p0.is_plain() || !p1.is_plain() {
                    return Err(err(path, "tensor premises must be plain"));
                }
                for f in ctx.iter() {
                    if let M::Tensor(l, r) = &**f {
                        let rest = remove_one_ref(ctx, f).unwrap();
                        if let (Some(s0), Some(s1)) =
                            (remove_one_ref(&p0.ctx, l), remove_one_ref(&p1.ctx, r))
                        {
                            if multiset_eq(&multiset_union(&s0, &s1), &rest) {
                                return Ok(());
                            }
                        }
                    }
                }
                Err(err(path, "no tensor formula matches the premises"))
            }
        }
        R::Dec => {
            arity(1)?;
            if !sys.is_focussed() {
                return Err(err(path, "dec needs a focussed system"));
            }
            let ctx = plain_ctx()?;
            let premise = &p.premises[0].conclusion;
            let (pctx, foci) = down_zone(premise, path)?;
            if foci.is_empty() {
                return Err(err(path, "dec foci must be nonempty"));
            }
            if discipline.is_some_and(|d| d.singleton_dec()) && foci.len() != 1 {
                return Err(err(path, "dec foci must be a singleton in this discipline"));
            }
            if !foci.iter().all(|f| is_positive_for(sys, f)) {
                return Err(err(path, "dec foci must be positive"));
            }
            if !multiset_eq(&multiset_union(pctx, foci), ctx) {
                return Err(err(path, "dec premise must partition the sequent"));
            }
            if !ctx_is_atoms_positives(sys, pctx, false) {
                return Err(err(path, "dec context must hold atoms and positives only"));
            }
            Ok(())
        }
        R::Codec => {
            arity(1)?;
            if !sys.is_focussed() {
                return Err(err(path, "codec needs a focussed system"));
            }
            let ctx = plain_ctx()?;
            let premise = &p.premises[0].conclusion;
            let (pctx, cofoci) = up_zone(premise, path)?;
            if cofoci.is_empty() {
                return Err(err(path, "codec co-foci must be nonempty"));
            }
            if discipline.is_some_and(|d| d.singleton_codec()) && cofoci.len() != 1 {
                return Err(err(
                    path,
                    "codec co-foci must be a singleton in this discipline",
                ));
            }
            if !cofoci.iter().all(|f| matches!(&**f, M::With(..))) {
                return Err(err(path, "codec co-foci must be with-formulas"));
            }
            if !multiset_eq(&multiset_union(pctx, cofoci), ctx) {
                return Err(err(path, "codec premise must partition the sequent"));
            }
            if !ctx_is_atoms_positives(sys, pctx, true) {
                return Err(err(
                    path,
                    "codec context must hold atoms, positives and withs only",
                ));
            }
            Ok(())
        }
        R::Rel => {
            arity(1)?;
            let (ctx, foci) = down_zone(c, path)?;
            if foci.iter().any(|f| is_positive_for(sys, f)) {
                return Err(err(path, "rel foci must not contain positives"));
            }
            let premise = &p.premises[0].conclusion;
            if !premise.is_plain() {
                return Err(err(path, "rel premise must be plain"));
            }
            if multiset_eq(&multiset_union(ctx, foci), &premise.ctx) {
                Ok(())
            } else {
                Err(err(path, "rel premise must merge foci into the context"))
            }
        }
        R::Corel => {
            arity(1)?;
            let (ctx, cofoci) = up_zone(c, path)?;
            if cofoci.iter().any(|f| matches!(&**f, M::With(..))) {
                return Err(err(path, "corel co-foci must not contain withs"));
            }
            let premise = &p.premises[0].conclusion;
            if !premise.is_plain() {
                return Err(err(path, "corel premise must be plain"));
            }
            if multiset_eq(&multiset_union(ctx, cofoci), &premise.ctx) {
                Ok(())
            } else {
                Err(err(
                    path,
                    "corel premise must merge co-foci into the context",
                ))
            }
        }
    }
}

fn down_zone<'a>(
    s: &'a Sequent,
    path: &[usize],
) -> Result<(&'a Vec<MallRef>, &'a Vec<MallRef>), CheckError> {
    match &s.phase {
        Phase::FocusDown(foci) => Ok((&s.ctx, foci)),
        _ => Err(err(path, "expected a v> sequent")),
    }
}

fn up_zone<'a>(
    s: &'a Sequent,
    path: &[usize],
) -> Result<(&'a Vec<MallRef>, &'a Vec<MallRef>), CheckError> {
    match &s.phase {
        Phase::FocusUp(foci) => Ok((&s.ctx, foci)),
        _ => Err(err(path, "expected a ^> sequent")),
    }
}
