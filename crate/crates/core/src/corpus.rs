//! Test-corpus generation: exhaustive small-formula families (deduplicated
//! up to commutativity of the binary connectives) and seeded random
//! generators. The batch verification suites and the `corpus` CLI verb
//! both draw from here.

use crate::formula::{MallFormula, QbfFormula, Quantifier};
use crate::qbf::Assignment;
use crate::sequent::Sequent;
use rand::prelude::*;
use rand::Rng;

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// All quantifier-free QBFs over the given leaves with at most
/// `max_connectives` binary connectives, one representative per
/// commutativity class.
pub fn qf_formulas_upto(leaves: &[QbfFormula], max_connectives: usize) -> Vec<QbfFormula> {
    let mut levels: Vec<Vec<QbfFormula>> = vec![leaves.to_vec()];
    for c in 1..=max_connectives {
        let mut level = Vec::new();
        for i in 0..c {
            let j = c - 1 - i;
            if i > j {
                break;
            }
            for (ai, a) in levels[i].iter().enumerate() {
                let bs = &levels[j];
                let start = if i == j { ai } else { 0 };
                for b in &bs[start..] {
                    level.push(QbfFormula::or(a.clone(), b.clone()));
                    level.push(QbfFormula::and(a.clone(), b.clone()));
                }
            }
        }
        levels.push(level);
    }
    levels.into_iter().flatten().collect()
}

/// All MALL formulas over the given leaves with at most `max_connectives`
/// binary connectives, one representative per commutativity class.
pub fn mall_formulas_upto(leaves: &[MallFormula], max_connectives: usize) -> Vec<MallFormula> {
    let mut levels: Vec<Vec<MallFormula>> = vec![leaves.to_vec()];
    for c in 1..=max_connectives {
        let mut level = Vec::new();
        for i in 0..c {
            let j = c - 1 - i;
            if i > j {
                break;
            }
            for (ai, a) in levels[i].iter().enumerate() {
                let bs = &levels[j];
                let start = if i == j { ai } else { 0 };
                for b in &bs[start..] {
                    level.push(MallFormula::par(a.clone(), b.clone()));
                    level.push(MallFormula::tensor(a.clone(), b.clone()));
                    level.push(MallFormula::plus(a.clone(), b.clone()));
                    level.push(MallFormula::with(a.clone(), b.clone()));
                }
            }
        }
        levels.push(level);
    }
    levels.into_iter().flatten().collect()
}

/// The leaf alphabet used throughout the small-formula MALL corpora.
pub fn standard_mall_leaves() -> Vec<MallFormula> {
    vec![
        MallFormula::var("x"),
        MallFormula::negvar("x"),
        MallFormula::var("y"),
        MallFormula::negvar("y"),
        MallFormula::Bot,
        MallFormula::One,
        MallFormula::Zero,
        MallFormula::Top,
    ]
}

pub fn qbf_leaves(vars: &[&str], constants: bool) -> Vec<QbfFormula> {
    let mut out = Vec::new();
    if constants {
        out.push(QbfFormula::False);
        out.push(QbfFormula::True);
    }
    for v in vars {
        out.push(QbfFormula::var(v));
        out.push(QbfFormula::negvar(v));
    }
    out
}

/// Every closed prenex sentence with at most two quantifiers over {x, y}
/// and a matrix of at most `matrix_connectives` connectives (constants
/// allowed in the matrix).
pub fn closed_prenex_sentences(matrix_connectives: usize) -> Vec<QbfFormula> {
    let mut out = Vec::new();
    // no quantifiers: constant matrices only
    for m in qf_formulas_upto(&qbf_leaves(&[], true), matrix_connectives) {
        out.push(m);
    }
    let quants = [Quantifier::Exists, Quantifier::Forall];
    // one quantifier
    let single = qf_formulas_upto(&qbf_leaves(&["x"], true), matrix_connectives);
    for q in quants {
        for m in &single {
            out.push(wrap(q, "x", m.clone()));
        }
    }
    // two quantifiers, both variable orders
    let double = qf_formulas_upto(&qbf_leaves(&["x", "y"], true), matrix_connectives);
    for (outer, inner) in [("x", "y"), ("y", "x")] {
        for qo in quants {
            for qi in quants {
                for m in &double {
                    out.push(wrap(qo, outer, wrap(qi, inner, m.clone())));
                }
            }
        }
    }
    out
}

fn wrap(q: Quantifier, var: &str, body: QbfFormula) -> QbfFormula {
    match q {
        Quantifier::Exists => QbfFormula::exists(var, body),
        Quantifier::Forall => QbfFormula::forall(var, body),
    }
}

/// All assignments over the listed variables.
pub fn all_assignments(vars: &[&str]) -> Vec<Assignment> {
    let mut out = Vec::new();
    for mask in 0..(1u32 << vars.len()) {
        let mut a = Assignment::new();
        for (i, v) in vars.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a.insert(crate::formula::name(v));
            }
        }
        out.push(a);
    }
    out
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Random quantifier-free QBF with at most `max_connectives` connectives.
pub fn random_qbf<R: Rng>(
    rng: &mut R,
    max_connectives: usize,
    vars: &[&str],
    constants: bool,
) -> QbfFormula {
    let n = rng.gen_range(0..=max_connectives);
    random_qf_exact(rng, n, vars, constants)
}

pub fn random_qf_exact<R: Rng>(
    rng: &mut R,
    connectives: usize,
    vars: &[&str],
    constants: bool,
) -> QbfFormula {
    if connectives == 0 {
        let leaves = qbf_leaves(vars, constants);
        return leaves[rng.gen_range(0..leaves.len())].clone();
    }
    let left = rng.gen_range(0..connectives);
    let l = random_qf_exact(rng, left, vars, constants);
    let r = random_qf_exact(rng, connectives - 1 - left, vars, constants);
    if rng.gen_bool(0.5) {
        QbfFormula::or(l, r)
    } else {
        QbfFormula::and(l, r)
    }
}

/// Random prenex formula: up to `max_quants` distinct leading quantifiers
/// over a prefix drawn from `vars`, matrix over the same variables.
pub fn random_prenex<R: Rng>(
    rng: &mut R,
    max_quants: usize,
    max_connectives: usize,
    vars: &[&str],
    constants: bool,
) -> QbfFormula {
    let nq = rng.gen_range(0..=max_quants.min(vars.len()));
    let mut order: Vec<&str> = vars.to_vec();
    order.shuffle(rng);
    let mut f = random_qbf(rng, max_connectives, vars, constants);
    for v in order.into_iter().take(nq) {
        f = if rng.gen_bool(0.5) {
            QbfFormula::exists(v, f)
        } else {
            QbfFormula::forall(v, f)
        };
    }
    f
}

/// A prenex sentence whose prefix has exactly `level` alternating
/// one-variable blocks, the leading one existential for Sigma and
/// universal for Pi; the matrix is constant-free over the prefix
/// variables, so the sentence is closed and syntactically strict.
pub fn strict_sentence<R: Rng>(
    rng: &mut R,
    side: crate::qbf::Side,
    level: usize,
    matrix_connectives: usize,
) -> QbfFormula {
    assert!(level >= 1);
    let vars: Vec<String> = (0..level).map(|i| format!("v{i}")).collect();
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let n = rng.gen_range(1..=matrix_connectives.max(1));
    let mut f = random_qf_exact(rng, n, &var_refs, false);
    // innermost quantifier first; alternation fixes every block kind once
    // the leading one is chosen
    for (depth, v) in vars.iter().rev().enumerate() {
        let outer_kind_exists = match side {
            crate::qbf::Side::Sigma => (level - 1 - depth).is_multiple_of(2),
            crate::qbf::Side::Pi => !(level - 1 - depth).is_multiple_of(2),
        };
        f = if outer_kind_exists {
            QbfFormula::exists(v, f)
        } else {
            QbfFormula::forall(v, f)
        };
    }
    f
}

/// Random MALL formula with exactly `connectives` binary connectives.
pub fn random_mall_exact<R: Rng>(
    rng: &mut R,
    connectives: usize,
    leaves: &[MallFormula],
) -> MallFormula {
    if connectives == 0 {
        return leaves[rng.gen_range(0..leaves.len())].clone();
    }
    let left = rng.gen_range(0..connectives);
    let l = random_mall_exact(rng, left, leaves);
    let r = random_mall_exact(rng, connectives - 1 - left, leaves);
    match rng.gen_range(0..4) {
        0 => MallFormula::par(l, r),
        1 => MallFormula::tensor(l, r),
        2 => MallFormula::plus(l, r),
        _ => MallFormula::with(l, r),
    }
}

/// Random plain cedent: between 1 and `max_formulas` formulas sharing at
/// most `max_total_connectives` connectives. Roughly half the cedents get
/// a dual subformula added, which keeps provable instances common.
pub fn random_cedent<R: Rng>(
    rng: &mut R,
    max_formulas: usize,
    max_total_connectives: usize,
    vars: &[&str],
    units: bool,
) -> Sequent {
    let mut leaves = Vec::new();
    for v in vars {
        leaves.push(MallFormula::var(v));
        leaves.push(MallFormula::negvar(v));
    }
    if units {
        leaves.extend([
            MallFormula::Bot,
            MallFormula::One,
            MallFormula::Zero,
            MallFormula::Top,
        ]);
    }
    let count = rng.gen_range(1..=max_formulas);
    let mut remaining = max_total_connectives;
    let mut formulas = Vec::new();
    for _ in 0..count {
        let c = rng.gen_range(0..=remaining.min(4));
        remaining -= c;
        formulas.push(random_mall_exact(rng, c, &leaves));
    }
    if rng.gen_bool(0.5) {
        let pick = formulas[rng.gen_range(0..formulas.len())].clone();
        let sub = random_subformula(rng, &pick);
        formulas.push(sub.dual());
    }
    Sequent::plain(formulas)
}

fn random_subformula<R: Rng>(rng: &mut R, f: &MallFormula) -> MallFormula {
    use MallFormula::*;
    let mut cur = f.clone();
    loop {
        match &cur {
            Par(l, r) | Tensor(l, r) | Plus(l, r) | With(l, r) => match rng.gen_range(0..3) {
                0 => return cur.clone(),
                1 => {
                    let next = (**l).clone();
                    cur = next;
                }
                _ => {
                    let next = (**r).clone();
                    cur = next;
                }
            },
            _ => return cur,
        }
    }
}
