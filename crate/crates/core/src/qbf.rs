//! QBF semantics: satisfaction, constant elimination, and prefix-class
//! analysis for prenex formulas.

use crate::formula::{Name, QbfFormula, Quantifier};
use std::collections::BTreeSet;
use std::fmt;

/// An assignment is the set of variables mapped to true.
pub type Assignment = BTreeSet<Name>;

pub fn assignment_of<I: IntoIterator<Item = impl AsRef<str>>>(vars: I) -> Assignment {
    vars.into_iter()
        .map(|v| crate::formula::name(v.as_ref()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QbfError {
    NotPrenex,
    NotClosed,
}

impl fmt::Display for QbfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QbfError::NotPrenex => write!(f, "formula is not in prenex form"),
            QbfError::NotClosed => write!(f, "formula has free variables"),
        }
    }
}

impl std::error::Error for QbfError {}

/// Satisfaction `alpha |= phi`.
pub fn evaluate(phi: &QbfFormula, alpha: &Assignment) -> bool {
    use QbfFormula::*;
    match phi {
        False => false,
        True => true,
        Var(x) => alpha.contains(x),
        NegVar(x) => !alpha.contains(x),
        Or(l, r) => evaluate(l, alpha) || evaluate(r, alpha),
        And(l, r) => evaluate(l, alpha) && evaluate(r, alpha),
        Exists(x, b) => {
            let mut without = alpha.clone();
            without.remove(x);
            let mut with = alpha.clone();
            with.insert(x.clone());
            evaluate(b, &without) || evaluate(b, &with)
        }
        Forall(x, b) => {
            let mut without = alpha.clone();
            without.remove(x);
            let mut with = alpha.clone();
            with.insert(x.clone());
            evaluate(b, &without) && evaluate(b, &with)
        }
    }
}

/// Replace the free variables of `phi` by constants according to `alpha`,
/// then eliminate all constants by the rewrites
///
///   F \/ p -> p,  T \/ p -> T,  F /\ p -> F,  T /\ p -> p   (and mirrored)
///
/// applied innermost-first, dropping quantifiers whose body has collapsed
/// to a constant. The result is closed and constant-free unless it is
/// literally `F` or `T`.
pub fn instantiate_simplify(phi: &QbfFormula, alpha: &Assignment) -> QbfFormula {
    let substituted = substitute_free(phi, alpha, &mut Vec::new());
    simplify_constants(&substituted)
}

fn substitute_free(phi: &QbfFormula, alpha: &Assignment, bound: &mut Vec<Name>) -> QbfFormula {
    use QbfFormula::*;
    match phi {
        False => False,
        True => True,
        Var(x) => {
            if bound.contains(x) {
                Var(x.clone())
            } else if alpha.contains(x) {
                True
            } else {
                False
            }
        }
        NegVar(x) => {
            if bound.contains(x) {
                NegVar(x.clone())
            } else if alpha.contains(x) {
                False
            } else {
                True
            }
        }
        Or(l, r) => QbfFormula::or(
            substitute_free(l, alpha, bound),
            substitute_free(r, alpha, bound),
        ),
        And(l, r) => QbfFormula::and(
            substitute_free(l, alpha, bound),
            substitute_free(r, alpha, bound),
        ),
        Exists(x, b) => {
            bound.push(x.clone());
            let body = substitute_free(b, alpha, bound);
            bound.pop();
            Exists(x.clone(), Box::new(body))
        }
        Forall(x, b) => {
            bound.push(x.clone());
            let body = substitute_free(b, alpha, bound);
            bound.pop();
            Forall(x.clone(), Box::new(body))
        }
    }
}

/// One innermost-first pass is a fixpoint: children are fully simplified
/// before their parent is rewritten.
pub fn simplify_constants(phi: &QbfFormula) -> QbfFormula {
    use QbfFormula::*;
    match phi {
        False | True | Var(_) | NegVar(_) => phi.clone(),
        Or(l, r) => {
            let l = simplify_constants(l);
            let r = simplify_constants(r);
            match (&l, &r) {
                (True, _) | (_, True) => True,
                (False, _) => r,
                (_, False) => l,
                _ => QbfFormula::or(l, r),
            }
        }
        And(l, r) => {
            let l = simplify_constants(l);
            let r = simplify_constants(r);
            match (&l, &r) {
                (False, _) | (_, False) => False,
                (True, _) => r,
                (_, True) => l,
                _ => QbfFormula::and(l, r),
            }
        }
        Exists(x, b) => match simplify_constants(b) {
            True => True,
            False => False,
            body => Exists(x.clone(), Box::new(body)),
        },
        Forall(x, b) => match simplify_constants(b) {
            True => True,
            False => False,
            body => Forall(x.clone(), Box::new(body)),
        },
    }
}

/// Substitute a constant for a quantified variable, as in the truth-tree
/// instantiation rules.
pub fn substitute_const(phi: &QbfFormula, var: &str, value: bool) -> QbfFormula {
    use QbfFormula::*;
    match phi {
        False => False,
        True => True,
        Var(x) => {
            if &**x == var {
                if value {
                    True
                } else {
                    False
                }
            } else {
                Var(x.clone())
            }
        }
        NegVar(x) => {
            if &**x == var {
                if value {
                    False
                } else {
                    True
                }
            } else {
                NegVar(x.clone())
            }
        }
        Or(l, r) => QbfFormula::or(
            substitute_const(l, var, value),
            substitute_const(r, var, value),
        ),
        And(l, r) => QbfFormula::and(
            substitute_const(l, var, value),
            substitute_const(r, var, value),
        ),
        Exists(x, b) => {
            if &**x == var {
                Exists(x.clone(), b.clone())
            } else {
                Exists(x.clone(), Box::new(substitute_const(b, var, value)))
            }
        }
        Forall(x, b) => {
            if &**x == var {
                Forall(x.clone(), b.clone())
            } else {
                Forall(x.clone(), Box::new(substitute_const(b, var, value)))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Prefix classes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Sigma,
    Pi,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Sigma => Side::Pi,
            Side::Pi => Side::Sigma,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Sigma => write!(f, "Sigma"),
            Side::Pi => write!(f, "Pi"),
        }
    }
}

/// Minimal quantifier class of a prenex formula: `level` counts the
/// alternating quantifier blocks of the prefix and `side` is the kind of
/// the leading block (`None` when quantifier-free; level 0 lies in both
/// classes). A formula with k >= 1 blocks is syntactically strict: it sits
/// in its side's class at level k but not in the dual class at level k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixClass {
    pub side: Option<Side>,
    pub level: usize,
}

impl PrefixClass {
    pub fn in_sigma(&self, k: usize) -> bool {
        match (self.side, self.level) {
            (_, 0) => true,
            (Some(Side::Sigma), l) => l <= k,
            (Some(Side::Pi), l) => l < k,
            (None, _) => unreachable!("level > 0 always has a side"),
        }
    }

    pub fn in_pi(&self, k: usize) -> bool {
        match (self.side, self.level) {
            (_, 0) => true,
            (Some(Side::Pi), l) => l <= k,
            (Some(Side::Sigma), l) => l < k,
            (None, _) => unreachable!("level > 0 always has a side"),
        }
    }

    /// Strictly Sigma at level k: in Sigma^q_k but not Pi^q_k.
    pub fn is_strict(&self, side: Side, k: usize) -> bool {
        self.level == k && k > 0 && self.side == Some(side)
    }
}

impl fmt::Display for PrefixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            None => write!(f, "Sigma^q_0 = Pi^q_0"),
            Some(s) => write!(f, "{}^q_{} (strict)", s, self.level),
        }
    }
}

/// Quantifier block structure of a prenex formula.
pub fn prefix_class(phi: &QbfFormula) -> Result<PrefixClass, QbfError> {
    if !phi.is_prenex() {
        return Err(QbfError::NotPrenex);
    }
    let (prefix, _) = phi.prefix_and_matrix();
    let mut blocks = 0usize;
    let mut last: Option<Quantifier> = None;
    let mut first: Option<Quantifier> = None;
    for (q, _) in prefix {
        if last != Some(q) {
            blocks += 1;
            if first.is_none() {
                first = Some(q);
            }
            last = Some(q);
        }
    }
    let side = first.map(|q| match q {
        Quantifier::Exists => Side::Sigma,
        Quantifier::Forall => Side::Pi,
    });
    Ok(PrefixClass {
        side,
        level: blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_qbf;

    fn empty() -> Assignment {
        Assignment::new()
    }

    #[test]
    fn evaluate_clauses() {
        assert!(!evaluate(&QbfFormula::False, &empty()));
        assert!(evaluate(&QbfFormula::True, &empty()));
        let phi = parse_qbf("forall x. exists y. (x /\\ ~y) \\/ (~x /\\ y)").unwrap();
        assert!(evaluate(&phi, &empty()));
    }

    #[test]
    fn evaluate_respects_duality() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let phi = crate::corpus::random_qbf(&mut rng, 4, &["x", "y", "z"], true);
            let mut alpha = Assignment::new();
            for v in ["x", "y", "z"] {
                if rng.gen_bool(0.5) {
                    alpha.insert(crate::formula::name(v));
                }
            }
            assert_eq!(evaluate(&phi, &alpha), !evaluate(&phi.dual(), &alpha));
        }
    }

    #[test]
    fn simplify_examples() {
        let a = assignment_of(["x"]);
        let phi = parse_qbf("x \\/ y").unwrap();
        assert_eq!(instantiate_simplify(&phi, &a), QbfFormula::True);

        let psi = parse_qbf("x /\\ y").unwrap();
        assert_eq!(instantiate_simplify(&psi, &empty()), QbfFormula::False);

        // constant propagation passes under quantifiers
        let chi = parse_qbf("exists z. z \\/ x").unwrap();
        let simplified = instantiate_simplify(&chi, &a);
        assert_eq!(simplified, QbfFormula::True);
        assert_eq!(evaluate(&chi, &a), evaluate(&simplified, &empty()));
    }

    #[test]
    fn simplify_leaves_no_constants() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let phi = crate::corpus::random_prenex(&mut rng, 2, 3, &["x", "y", "z"], true);
            let alpha = if rng.gen_bool(0.5) {
                assignment_of(["x"])
            } else {
                empty()
            };
            let s = instantiate_simplify(&phi, &alpha);
            assert!(s.is_closed(), "free vars left in {s}");
            if s != QbfFormula::True && s != QbfFormula::False {
                assert!(!s.has_constants(), "constants left in {s}");
            }
            assert_eq!(evaluate(&phi, &alpha), evaluate(&s, &empty()));
        }
    }

    // The rewrite system is confluent here: an outermost-first strategy
    // must agree with the innermost-first one.
    #[test]
    fn simplify_strategy_confluence() {
        fn outermost(phi: &QbfFormula) -> QbfFormula {
            use QbfFormula::*;
            let step = |f: &QbfFormula| -> Option<QbfFormula> {
                match f {
                    Or(l, r) => match (&**l, &**r) {
                        (True, _) | (_, True) => Some(True),
                        (False, _) => Some((**r).clone()),
                        (_, False) => Some((**l).clone()),
                        _ => None,
                    },
                    And(l, r) => match (&**l, &**r) {
                        (False, _) | (_, False) => Some(False),
                        (True, _) => Some((**r).clone()),
                        (_, True) => Some((**l).clone()),
                        _ => None,
                    },
                    Exists(_, b) | Forall(_, b) => match &**b {
                        True => Some(True),
                        False => Some(False),
                        _ => None,
                    },
                    _ => None,
                }
            };
            // rewrite the outermost redex until none fires, recursing only
            // when the root is stable
            let mut cur = phi.clone();
            loop {
                if let Some(next) = step(&cur) {
                    cur = next;
                    continue;
                }
                return match cur {
                    Or(l, r) => QbfFormula::or(outermost(&l), outermost(&r)),
                    And(l, r) => QbfFormula::and(outermost(&l), outermost(&r)),
                    Exists(x, b) => Exists(x, Box::new(outermost(&b))),
                    Forall(x, b) => Forall(x, Box::new(outermost(&b))),
                    leaf => leaf,
                };
            }
        }
        fn fixpoint_outer(phi: &QbfFormula) -> QbfFormula {
            let mut cur = phi.clone();
            loop {
                let next = outermost(&cur);
                if next == cur {
                    return cur;
                }
                cur = next;
            }
        }
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let phi = crate::corpus::random_prenex(&mut rng, 2, 4, &["x", "y"], true);
            let subst = substitute_free(&phi, &assignment_of(["y"]), &mut Vec::new());
            assert_eq!(simplify_constants(&subst), fixpoint_outer(&subst));
        }
    }

    #[test]
    fn prefix_classes() {
        let qf = parse_qbf("x /\\ ~y").unwrap();
        let c = prefix_class(&qf).unwrap();
        assert_eq!(c.level, 0);
        assert!(c.in_sigma(0) && c.in_pi(0));

        let s2 = parse_qbf("exists x. forall y. x \\/ y").unwrap();
        let c = prefix_class(&s2).unwrap();
        assert_eq!((c.side, c.level), (Some(Side::Sigma), 2));
        assert!(c.is_strict(Side::Sigma, 2));
        assert!(c.in_sigma(2) && !c.in_pi(2) && c.in_pi(3));

        // same-kind quantifiers form one block
        let s1 = parse_qbf("exists x. exists y. x /\\ y").unwrap();
        assert_eq!(prefix_class(&s1).unwrap().level, 1);

        let not_prenex = parse_qbf("x \\/ (exists y. y)").unwrap();
        assert_eq!(prefix_class(&not_prenex), Err(QbfError::NotPrenex));
    }

    #[test]
    fn prefix_class_duality() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let phi = crate::corpus::random_prenex(&mut rng, 3, 3, &["x", "y"], false);
            let c = prefix_class(&phi).unwrap();
            let d = prefix_class(&phi.dual()).unwrap();
            assert_eq!(c.level, d.level);
            for k in 0..=4 {
                assert_eq!(c.in_sigma(k), d.in_pi(k));
                assert_eq!(c.in_pi(k), d.in_sigma(k));
            }
        }
    }
}
