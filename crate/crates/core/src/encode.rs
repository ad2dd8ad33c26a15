//! Translations between the QBF and MALL worlds: the quantifier-free
//! positive/negative encodings, assignment cedents, the full prenex
//! encoding with one-directional extension variables, the literal-guarding
//! translation into weakening-free MALL, and weakened-formula extraction
//! from affine proofs.

use crate::formula::{limp, name, plimp, MallFormula, MallRef, Name, QbfFormula, Quantifier};
use crate::prover::{check_proof_with, CheckError};
use crate::qbf::Assignment;
use crate::sequent::{Phase, ProofTree, RuleLabel, Sequent};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodeError {
    NotPrenex,
    NotQuantifierFree,
    HasConstants,
    ReservedVariable(Name),
}

impl fmt::Display for EncodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeError::NotPrenex => write!(f, "input must be prenex"),
            EncodeError::NotQuantifierFree => write!(f, "input must be quantifier-free"),
            EncodeError::HasConstants => {
                write!(f, "input must be free of truth constants (simplify first)")
            }
            EncodeError::ReservedVariable(v) => {
                write!(f, "variable `{v}` uses the reserved `_y` prefix")
            }
        }
    }
}

impl std::error::Error for EncodeError {}

/// Connective-wise negative encoding: or -> par, and -> with.
pub fn negtrans(phi: &QbfFormula) -> Result<MallFormula, EncodeError> {
    quantifier_free_map(phi, &|l, r| MallFormula::par(l, r), &|l, r| {
        MallFormula::with(l, r)
    })
}

/// Connective-wise positive encoding: or -> plus, and -> tensor.
pub fn postrans(phi: &QbfFormula) -> Result<MallFormula, EncodeError> {
    quantifier_free_map(phi, &|l, r| MallFormula::plus(l, r), &|l, r| {
        MallFormula::tensor(l, r)
    })
}

fn quantifier_free_map(
    phi: &QbfFormula,
    or_op: &dyn Fn(MallFormula, MallFormula) -> MallFormula,
    and_op: &dyn Fn(MallFormula, MallFormula) -> MallFormula,
) -> Result<MallFormula, EncodeError> {
    use QbfFormula::*;
    match phi {
        False | True => Err(EncodeError::HasConstants),
        Var(x) => Ok(MallFormula::Var(x.clone())),
        NegVar(x) => Ok(MallFormula::NegVar(x.clone())),
        Or(l, r) => Ok(or_op(
            quantifier_free_map(l, or_op, and_op)?,
            quantifier_free_map(r, or_op, and_op)?,
        )),
        And(l, r) => Ok(and_op(
            quantifier_free_map(l, or_op, and_op)?,
            quantifier_free_map(r, or_op, and_op)?,
        )),
        Exists(..) | Forall(..) => Err(EncodeError::NotQuantifierFree),
    }
}

/// The cedent alpha^n(xs): n copies of x for x in alpha, n copies of ~x
/// otherwise.
pub fn assignment_cedent(alpha: &Assignment, xs: &[Name], n: usize) -> Vec<MallFormula> {
    let mut out = Vec::with_capacity(xs.len() * n);
    for x in xs {
        let lit = if alpha.contains(x) {
            MallFormula::Var(x.clone())
        } else {
            MallFormula::NegVar(x.clone())
        };
        for _ in 0..n {
            out.push(lit.clone());
        }
    }
    out
}

/// Fresh extension-variable state for one encoding run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingContext {
    /// copy count, max(1, matrix literal count)
    pub n: usize,
    /// prefix variables, outermost first
    pub xs: Vec<Name>,
    /// extension variables handed out so far, innermost layer first
    pub ys: Vec<Name>,
    layer: usize,
}

impl EncodingContext {
    pub fn for_formula(phi: &QbfFormula) -> Result<EncodingContext, EncodeError> {
        if !phi.is_prenex() {
            return Err(EncodeError::NotPrenex);
        }
        for v in phi.all_vars() {
            if v.starts_with("_y") {
                return Err(EncodeError::ReservedVariable(v));
            }
        }
        let (prefix, matrix) = phi.prefix_and_matrix();
        if matrix.has_constants() {
            return Err(EncodeError::HasConstants);
        }
        Ok(EncodingContext {
            n: matrix.literal_count().max(1),
            xs: prefix.into_iter().map(|(_, x)| x).collect(),
            ys: Vec::new(),
            layer: 0,
        })
    }

    /// Next fresh `_y` variable; the reserved prefix is rejected by the
    /// QBF parser, so these can never collide with input variables.
    pub fn fresh(&mut self) -> Name {
        self.layer += 1;
        let y = name(&format!("_y{}", self.layer));
        self.ys.push(y.clone());
        y
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qltrans {
    pub formula: MallFormula,
    pub context: EncodingContext,
}

/// Encode a prenex, constant-free QBF. Base case: the positive encoding
/// when the innermost quantifier is existential (or when there are no
/// quantifiers at all), the negative one when it is universal. Each
/// quantifier layer wraps with a fresh extension variable y:
///
///   exists x: (ql(phi) -o y) -o ((x^n -o y) + (~x^n -o y))
///   forall x: (ql(phi) ->+ y) -o ((x^n -o y) & (~x^n -o y))
///
/// where `x^n -o y` abbreviates `~x # ... # ~x # y` with n copies.
pub fn qltrans(phi: &QbfFormula) -> Result<Qltrans, EncodeError> {
    let mut context = EncodingContext::for_formula(phi)?;
    let (prefix, matrix) = phi.prefix_and_matrix();
    let innermost = prefix.last().map(|(q, _)| *q);
    let mut acc = match innermost {
        Some(Quantifier::Forall) => negtrans(matrix)?,
        _ => postrans(matrix)?,
    };
    let n = context.n;
    for (q, x) in prefix.iter().rev() {
        let y = context.fresh();
        let x_pow = literal_power(&MallFormula::Var(x.clone()), n, &y);
        let negx_pow = literal_power(&MallFormula::NegVar(x.clone()), n, &y);
        acc = match q {
            Quantifier::Exists => limp(
                &limp(&acc, MallFormula::Var(y.clone())),
                MallFormula::plus(x_pow, negx_pow),
            ),
            Quantifier::Forall => limp(
                &plimp(&acc, MallFormula::Var(y.clone())),
                MallFormula::with(x_pow, negx_pow),
            ),
        };
    }
    Ok(Qltrans {
        formula: acc,
        context,
    })
}

/// `lit^n -o y`: n negated copies of the literal, par'd onto y.
fn literal_power(lit: &MallFormula, n: usize, y: &Name) -> MallFormula {
    let mut acc = MallFormula::Var(y.clone());
    for _ in 0..n {
        acc = MallFormula::par(lit.dual(), acc);
    }
    acc
}

/// Replace every literal occurrence a by `bot + a`.
pub fn prime_translate(a: &MallFormula) -> MallFormula {
    use MallFormula::*;
    match a {
        Var(_) | NegVar(_) => MallFormula::plus(Bot, a.clone()),
        Bot | One | Zero | Top => a.clone(),
        Par(l, r) => MallFormula::par(prime_translate(l), prime_translate(r)),
        Tensor(l, r) => MallFormula::tensor(prime_translate(l), prime_translate(r)),
        Plus(l, r) => MallFormula::plus(prime_translate(l), prime_translate(r)),
        With(l, r) => MallFormula::with(prime_translate(l), prime_translate(r)),
    }
}

// ---------------------------------------------------------------------------
// Weakened formulas of an affine proof
// ---------------------------------------------------------------------------

/// A subformula occurrence of a proof's conclusion: index of the formula
/// in the (canonically sorted) conclusion cedent plus 0/1 descent steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccPath {
    pub index: usize,
    pub steps: Vec<u8>,
}

impl fmt::Display for OccPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.index)?;
        for s in &self.steps {
            write!(f, ".{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakenError {
    NotAffine,
    InvalidProof(CheckError),
}

impl fmt::Display for WeakenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeakenError::NotAffine => write!(f, "weakened formulas exist only in affine proofs"),
            WeakenError::InvalidProof(e) => write!(f, "proof fails checking: {e}"),
        }
    }
}

impl std::error::Error for WeakenError {}

type AnnItem = (MallRef, OccPath);

struct AnnSeq {
    ctx: Vec<AnnItem>,
    zone: Option<(bool, Vec<AnnItem>)>, // (is_up, items)
}

/// The union of the initial-sequent contexts of an affine proof: every
/// occurrence a wkid or w1 leaf silently discarded, reported as paths
/// into the conclusion. Leaves closed by the top rule contribute nothing;
/// discarding a context is that rule's own power, not weakening.
pub fn weakened_formulas(p: &ProofTree) -> Result<BTreeSet<OccPath>, WeakenError> {
    if !p.system.is_affine() {
        return Err(WeakenError::NotAffine);
    }
    check_proof_with(p, None).map_err(WeakenError::InvalidProof)?;
    let ann = AnnSeq {
        ctx: p
            .conclusion
            .ctx
            .iter()
            .enumerate()
            .map(|(i, f)| {
                (
                    f.clone(),
                    OccPath {
                        index: i,
                        steps: Vec::new(),
                    },
                )
            })
            .collect(),
        zone: match &p.conclusion.phase {
            Phase::Plain => None,
            Phase::FocusDown(v) | Phase::FocusUp(v) => {
                let up = matches!(p.conclusion.phase, Phase::FocusUp(_));
                Some((
                    up,
                    v.iter()
                        .enumerate()
                        .map(|(i, f)| {
                            (
                                f.clone(),
                                OccPath {
                                    index: p.conclusion.ctx.len() + i,
                                    steps: Vec::new(),
                                },
                            )
                        })
                        .collect(),
                ))
            }
        },
    };
    let mut omega = BTreeSet::new();
    collect(p, ann, &mut omega);
    Ok(omega)
}

fn take(items: &mut Vec<AnnItem>, f: &MallFormula) -> AnnItem {
    let pos = items
        .iter()
        .position(|(g, _)| &**g == f)
        .expect("checked proof must match");
    items.remove(pos)
}

fn take_multiset(items: &mut Vec<AnnItem>, fs: &[MallRef]) -> Vec<AnnItem> {
    fs.iter().map(|f| take(items, f)).collect()
}

fn extend_path(path: &OccPath, step: u8) -> OccPath {
    let mut steps = path.steps.clone();
    steps.push(step);
    OccPath {
        index: path.index,
        steps,
    }
}

fn collect(p: &ProofTree, ann: AnnSeq, omega: &mut BTreeSet<OccPath>) {
    use MallFormula as M;
    let AnnSeq { mut ctx, zone } = ann;
    match p.rule {
        RuleLabel::WkId => {
            // drop one dual pair, everything else was weakened
            let x = ctx
                .iter()
                .find_map(|(f, _)| match &**f {
                    M::Var(x)
                        if ctx
                            .iter()
                            .any(|(g, _)| matches!(&**g, M::NegVar(y) if y == x)) =>
                    {
                        Some(x.clone())
                    }
                    _ => None,
                })
                .expect("wkid checked");
            take(&mut ctx, &M::Var(x.clone()));
            take(&mut ctx, &M::NegVar(x));
            omega.extend(ctx.into_iter().map(|(_, p)| p));
        }
        RuleLabel::WOne => {
            take(&mut ctx, &M::One);
            omega.extend(ctx.into_iter().map(|(_, p)| p));
        }
        RuleLabel::Top | RuleLabel::Id | RuleLabel::One | RuleLabel::CInit => {}
        RuleLabel::Bot => {
            take(&mut ctx, &M::Bot);
            collect(&p.premises[0], AnnSeq { ctx, zone }, omega);
        }
        RuleLabel::Par => {
            let premise = &p.premises[0].conclusion;
            let principal = find_principal_par(&ctx, &premise.ctx);
            let (f, path) = ctx.remove(principal);
            if let M::Par(l, r) = &*f {
                ctx.push((l.clone(), extend_path(&path, 0)));
                ctx.push((r.clone(), extend_path(&path, 1)));
            }
            collect(&p.premises[0], AnnSeq { ctx, zone }, omega);
        }
        RuleLabel::Plus => {
            let (zone_is_some, mut items, rest_zone) = match zone {
                Some((up, items)) => (true, items, up),
                None => (false, std::mem::take(&mut ctx), false),
            };
            let premise = &p.premises[0].conclusion;
            let target: &[MallRef] = if zone_is_some {
                match &premise.phase {
                    Phase::FocusDown(v) => v,
                    _ => unreachable!("checked"),
                }
            } else {
                &premise.ctx
            };
            let (idx, step) = find_principal_plus(&items, target);
            let (f, path) = items.remove(idx);
            if let M::Plus(l, r) = &*f {
                let child = if step == 0 { l.clone() } else { r.clone() };
                items.push((child, extend_path(&path, step)));
            }
            let next = if zone_is_some {
                AnnSeq {
                    ctx,
                    zone: Some((rest_zone, items)),
                }
            } else {
                AnnSeq {
                    ctx: items,
                    zone: None,
                }
            };
            collect(&p.premises[0], next, omega);
        }
        RuleLabel::With => {
            let (in_zone, mut items) = match zone {
                Some((_, items)) => (true, items),
                None => (false, std::mem::take(&mut ctx)),
            };
            let p0 = &p.premises[0].conclusion;
            let target0: &[MallRef] = if in_zone {
                match &p0.phase {
                    Phase::FocusUp(v) => v,
                    _ => unreachable!("checked"),
                }
            } else {
                &p0.ctx
            };
            let idx = find_principal_with(&items, target0);
            let (f, path) = items.remove(idx);
            if let M::With(l, r) = &*f {
                for (i, child) in [l, r].into_iter().enumerate() {
                    let mut branch = items.clone();
                    branch.push((child.clone(), extend_path(&path, i as u8)));
                    let next = if in_zone {
                        AnnSeq {
                            ctx: ctx.clone(),
                            zone: Some((true, branch)),
                        }
                    } else {
                        AnnSeq {
                            ctx: branch,
                            zone: None,
                        }
                    };
                    collect(&p.premises[i], next, omega);
                }
            }
        }
        RuleLabel::Tensor => {
            let p0 = &p.premises[0].conclusion;
            let p1 = &p.premises[1].conclusion;
            match zone {
                None => {
                    // pick the tensor and the split the premises dictate
                    let (idx, _) = ctx
                        .iter()
                        .enumerate()
                        .find(|(i, (f, _))| {
                            if let M::Tensor(l, r) = &**f {
                                let rest: Vec<MallRef> = without_index(&ctx, *i);
                                tensor_split_ok(&rest, l, r, &p0.ctx, &p1.ctx)
                            } else {
                                false
                            }
                        })
                        .expect("checked proof has a matching tensor");
                    let (f, path) = ctx.remove(idx);
                    if let M::Tensor(l, r) = &*f {
                        let mut want0: Vec<MallRef> = p0.ctx.clone();
                        remove_first(&mut want0, l);
                        let mut ann0 = take_multiset(&mut ctx, &want0);
                        ann0.push((l.clone(), extend_path(&path, 0)));
                        let mut ann1 = ctx;
                        ann1.push((r.clone(), extend_path(&path, 1)));
                        collect(
                            &p.premises[0],
                            AnnSeq {
                                ctx: ann0,
                                zone: None,
                            },
                            omega,
                        );
                        collect(
                            &p.premises[1],
                            AnnSeq {
                                ctx: ann1,
                                zone: None,
                            },
                            omega,
                        );
                    }
                }
                Some((_, mut foci)) => {
                    let (c0, f0) = down_parts(p0);
                    let (c1, f1) = down_parts(p1);
                    let (idx, _) = foci
                        .iter()
                        .enumerate()
                        .find(|(i, (f, _))| {
                            if let M::Tensor(l, r) = &**f {
                                let rest: Vec<MallRef> = without_index(&foci, *i);
                                tensor_split_ok(&rest, l, r, f0, f1)
                                    && split_ok(&refs_of(&ctx), c0, c1)
                            } else {
                                false
                            }
                        })
                        .expect("checked proof has a matching focused tensor");
                    let (f, path) = foci.remove(idx);
                    if let M::Tensor(l, r) = &*f {
                        let mut wantf0: Vec<MallRef> = f0.clone();
                        remove_first(&mut wantf0, l);
                        let mut foci0 = take_multiset(&mut foci, &wantf0);
                        foci0.push((l.clone(), extend_path(&path, 0)));
                        let mut foci1 = foci;
                        foci1.push((r.clone(), extend_path(&path, 1)));
                        let ctx0 = take_multiset(&mut ctx, c0);
                        let ctx1 = ctx;
                        collect(
                            &p.premises[0],
                            AnnSeq {
                                ctx: ctx0,
                                zone: Some((false, foci0)),
                            },
                            omega,
                        );
                        collect(
                            &p.premises[1],
                            AnnSeq {
                                ctx: ctx1,
                                zone: Some((false, foci1)),
                            },
                            omega,
                        );
                    }
                }
            }
        }
        RuleLabel::Dec | RuleLabel::Codec => {
            let premise = &p.premises[0].conclusion;
            let (up, zone_refs) = match &premise.phase {
                Phase::FocusDown(v) => (false, v),
                Phase::FocusUp(v) => (true, v),
                Phase::Plain => unreachable!("checked"),
            };
            let zone_items = take_multiset(&mut ctx, zone_refs);
            collect(
                &p.premises[0],
                AnnSeq {
                    ctx,
                    zone: Some((up, zone_items)),
                },
                omega,
            );
        }
        RuleLabel::Rel | RuleLabel::Corel => {
            let (_, items) = zone.expect("checked");
            ctx.extend(items);
            collect(&p.premises[0], AnnSeq { ctx, zone: None }, omega);
        }
    }
}

fn refs_of(items: &[AnnItem]) -> Vec<MallRef> {
    items.iter().map(|(f, _)| f.clone()).collect()
}

fn without_index(items: &[AnnItem], idx: usize) -> Vec<MallRef> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, (f, _))| f.clone())
        .collect()
}

fn remove_first(v: &mut Vec<MallRef>, f: &MallRef) {
    let pos = v.iter().position(|g| g == f).expect("checked");
    v.remove(pos);
}

fn sorted(mut v: Vec<MallRef>) -> Vec<MallRef> {
    v.sort();
    v
}

fn split_ok(whole: &[MallRef], a: &[MallRef], b: &[MallRef]) -> bool {
    let mut union = a.to_vec();
    union.extend(b.iter().cloned());
    sorted(union) == sorted(whole.to_vec())
}

fn tensor_split_ok(
    rest: &[MallRef],
    l: &MallRef,
    r: &MallRef,
    p0: &[MallRef],
    p1: &[MallRef],
) -> bool {
    let mut w0 = p0.to_vec();
    let mut w1 = p1.to_vec();
    if !try_remove(&mut w0, l) || !try_remove(&mut w1, r) {
        return false;
    }
    w0.extend(w1);
    sorted(w0) == sorted(rest.to_vec())
}

fn try_remove(v: &mut Vec<MallRef>, f: &MallRef) -> bool {
    match v.iter().position(|g| g == f) {
        Some(pos) => {
            v.remove(pos);
            true
        }
        None => false,
    }
}

fn down_parts(s: &Sequent) -> (&Vec<MallRef>, &Vec<MallRef>) {
    match &s.phase {
        Phase::FocusDown(v) => (&s.ctx, v),
        _ => unreachable!("checked"),
    }
}

fn find_principal_par(items: &[AnnItem], target: &[MallRef]) -> usize {
    for (i, (f, _)) in items.iter().enumerate() {
        if let MallFormula::Par(l, r) = &**f {
            let mut cand = without_index(items, i);
            cand.push(l.clone());
            cand.push(r.clone());
            if sorted(cand) == sorted(target.to_vec()) {
                return i;
            }
        }
    }
    unreachable!("checked proof has a matching par")
}

fn find_principal_plus(items: &[AnnItem], target: &[MallRef]) -> (usize, u8) {
    for (i, (f, _)) in items.iter().enumerate() {
        if let MallFormula::Plus(l, r) = &**f {
            for (step, child) in [(0u8, l), (1u8, r)] {
                let mut cand = without_index(items, i);
                cand.push(child.clone());
                if sorted(cand) == sorted(target.to_vec()) {
                    return (i, step);
                }
            }
        }
    }
    unreachable!("checked proof has a matching plus")
}

fn find_principal_with(items: &[AnnItem], target0: &[MallRef]) -> usize {
    for (i, (f, _)) in items.iter().enumerate() {
        if let MallFormula::With(l, _) = &**f {
            let mut cand = without_index(items, i);
            cand.push(l.clone());
            if sorted(cand) == sorted(target0.to_vec()) {
                return i;
            }
        }
    }
    unreachable!("checked proof has a matching with")
}

/// Guard the conclusion occurrences in `omega` with `bot + _`, deepest
/// first so shallower paths stay valid.
pub fn guard_occurrences(s: &Sequent, omega: &BTreeSet<OccPath>) -> Sequent {
    let mut paths: Vec<&OccPath> = omega.iter().collect();
    paths.sort_by_key(|p| std::cmp::Reverse(p.steps.len()));
    let mut ctx: Vec<MallRef> = s.ctx.clone();
    for p in paths {
        let updated = ctx[p.index].map_at(&p.steps, &|old| {
            MallFormula::plus(MallFormula::Bot, old.clone())
        });
        ctx[p.index] = Arc::new(updated);
    }
    Sequent::from_refs(ctx, Phase::Plain)
}
