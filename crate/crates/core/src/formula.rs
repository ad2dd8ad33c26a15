//! Formula ASTs shared by the QBF and MALL sides: construction helpers,
//! De Morgan duality, polarity classification, canonical printing.
//!
//! Both grammars keep negation on variables only (De Morgan normal form),
//! so duality is a structural map and never introduces a negation node.

use std::fmt;
use std::sync::Arc;

/// Variable names are interned strings shared between the QBF and MALL
/// worlds, so encodings can reuse the same identifiers on both sides.
pub type Name = Arc<str>;

/// Shorthand for shared MALL subtrees; sequents and proof trees clone
/// these freely.
pub type MallRef = Arc<MallFormula>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

// ---------------------------------------------------------------------------
// QBF formulas
// ---------------------------------------------------------------------------

/// Quantified Boolean formula in De Morgan normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QbfFormula {
    False,
    True,
    Var(Name),
    NegVar(Name),
    Or(Box<QbfFormula>, Box<QbfFormula>),
    And(Box<QbfFormula>, Box<QbfFormula>),
    Exists(Name, Box<QbfFormula>),
    Forall(Name, Box<QbfFormula>),
}

impl QbfFormula {
    pub fn var(n: &str) -> Self {
        QbfFormula::Var(name(n))
    }

    pub fn negvar(n: &str) -> Self {
        QbfFormula::NegVar(name(n))
    }

    pub fn or(l: QbfFormula, r: QbfFormula) -> Self {
        QbfFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: QbfFormula, r: QbfFormula) -> Self {
        QbfFormula::And(Box::new(l), Box::new(r))
    }

    pub fn exists(n: &str, body: QbfFormula) -> Self {
        QbfFormula::Exists(name(n), Box::new(body))
    }

    pub fn forall(n: &str, body: QbfFormula) -> Self {
        QbfFormula::Forall(name(n), Box::new(body))
    }

    /// De Morgan dual: swaps F/T, x/~x, or/and, exists/forall.
    pub fn dual(&self) -> QbfFormula {
        use QbfFormula::*;
        match self {
            False => True,
            True => False,
            Var(x) => NegVar(x.clone()),
            NegVar(x) => Var(x.clone()),
            Or(l, r) => QbfFormula::and(l.dual(), r.dual()),
            And(l, r) => QbfFormula::or(l.dual(), r.dual()),
            Exists(x, b) => Forall(x.clone(), Box::new(b.dual())),
            Forall(x, b) => Exists(x.clone(), Box::new(b.dual())),
        }
    }

    /// Number of literal occurrences (`x` or `~x`); constants contribute 0.
    pub fn literal_count(&self) -> usize {
        use QbfFormula::*;
        match self {
            False | True => 0,
            Var(_) | NegVar(_) => 1,
            Or(l, r) | And(l, r) => l.literal_count() + r.literal_count(),
            Exists(_, b) | Forall(_, b) => b.literal_count(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        use QbfFormula::*;
        match self {
            False | True | Var(_) | NegVar(_) => true,
            Or(l, r) | And(l, r) => l.is_quantifier_free() && r.is_quantifier_free(),
            Exists(..) | Forall(..) => false,
        }
    }

    pub fn has_constants(&self) -> bool {
        use QbfFormula::*;
        match self {
            False | True => true,
            Var(_) | NegVar(_) => false,
            Or(l, r) | And(l, r) => l.has_constants() || r.has_constants(),
            Exists(_, b) | Forall(_, b) => b.has_constants(),
        }
    }

    /// All quantifiers lead, i.e. the body of the innermost quantifier is
    /// quantifier-free.
    pub fn is_prenex(&self) -> bool {
        match self {
            QbfFormula::Exists(_, b) | QbfFormula::Forall(_, b) => b.is_prenex(),
            other => other.is_quantifier_free(),
        }
    }

    /// Leading quantifier prefix (outermost first) and the matrix of a
    /// prenex formula. For non-prenex input the "matrix" is just the first
    /// non-quantifier subformula reached.
    pub fn prefix_and_matrix(&self) -> (Vec<(Quantifier, Name)>, &QbfFormula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                QbfFormula::Exists(x, b) => {
                    prefix.push((Quantifier::Exists, x.clone()));
                    cur = b;
                }
                QbfFormula::Forall(x, b) => {
                    prefix.push((Quantifier::Forall, x.clone()));
                    cur = b;
                }
                _ => return (prefix, cur),
            }
        }
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<Name> {
        fn walk(f: &QbfFormula, bound: &mut Vec<Name>, out: &mut std::collections::BTreeSet<Name>) {
            use QbfFormula::*;
            match f {
                False | True => {}
                Var(x) | NegVar(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Or(l, r) | And(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                Exists(x, b) | Forall(x, b) => {
                    bound.push(x.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = std::collections::BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_vars(&self) -> std::collections::BTreeSet<Name> {
        use QbfFormula::*;
        let mut out = std::collections::BTreeSet::new();
        fn walk(f: &QbfFormula, out: &mut std::collections::BTreeSet<Name>) {
            match f {
                False | True => {}
                Var(x) | NegVar(x) => {
                    out.insert(x.clone());
                }
                Or(l, r) | And(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Exists(x, b) | Forall(x, b) => {
                    out.insert(x.clone());
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Exists,
    Forall,
}

// Printing: `/\` binds tighter than `\/`; both associate to the left.
// Quantifier bodies extend as far right as possible.
impl fmt::Display for QbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_qbf(self, f, 0)
    }
}

// prec: 0 = top/quantifier position, 1 = under \/, 2 = under /\
fn fmt_qbf(q: &QbfFormula, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    use QbfFormula::*;
    match q {
        False => write!(f, "F"),
        True => write!(f, "T"),
        Var(x) => write!(f, "{x}"),
        NegVar(x) => write!(f, "~{x}"),
        Or(l, r) => {
            let need = prec >= 2;
            if need {
                write!(f, "(")?;
            }
            fmt_qbf(l, f, 1)?;
            write!(f, " \\/ ")?;
            // right operand parenthesized when it is itself an Or: the
            // parser is left-associative.
            fmt_qbf(r, f, if matches!(**r, Or(..)) { 2 } else { 1 })?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        And(l, r) => {
            let need = prec >= 3;
            if need {
                write!(f, "(")?;
            }
            fmt_qbf(l, f, 2)?;
            write!(f, " /\\ ")?;
            fmt_qbf(r, f, if matches!(**r, And(..)) { 3 } else { 2 })?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        Exists(x, b) => {
            let need = prec >= 1;
            if need {
                write!(f, "(")?;
            }
            write!(f, "exists {x}. ")?;
            fmt_qbf(b, f, 0)?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        Forall(x, b) => {
            let need = prec >= 1;
            if need {
                write!(f, "(")?;
            }
            write!(f, "forall {x}. ")?;
            fmt_qbf(b, f, 0)?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// MALL formulas
// ---------------------------------------------------------------------------

/// MALL formula over the units bot/1/0/top with negation on variables only.
///
/// Multiplicatives: bot, 1, par (`#`), tensor (`*`).
/// Additives: 0, top, plus (`+`), with (`&`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MallFormula {
    Bot,
    One,
    Zero,
    Top,
    Var(Name),
    NegVar(Name),
    Par(MallRef, MallRef),
    Tensor(MallRef, MallRef),
    Plus(MallRef, MallRef),
    With(MallRef, MallRef),
}

impl MallFormula {
    pub fn var(n: &str) -> Self {
        MallFormula::Var(name(n))
    }

    pub fn negvar(n: &str) -> Self {
        MallFormula::NegVar(name(n))
    }

    pub fn par(l: impl Into<MallRef>, r: impl Into<MallRef>) -> Self {
        MallFormula::Par(l.into(), r.into())
    }

    pub fn tensor(l: impl Into<MallRef>, r: impl Into<MallRef>) -> Self {
        MallFormula::Tensor(l.into(), r.into())
    }

    pub fn plus(l: impl Into<MallRef>, r: impl Into<MallRef>) -> Self {
        MallFormula::Plus(l.into(), r.into())
    }

    pub fn with(l: impl Into<MallRef>, r: impl Into<MallRef>) -> Self {
        MallFormula::With(l.into(), r.into())
    }

    /// De Morgan dual: bot/1, 0/top, x/~x, par/tensor, plus/with.
    pub fn dual(&self) -> MallFormula {
        use MallFormula::*;
        match self {
            Bot => One,
            One => Bot,
            Zero => Top,
            Top => Zero,
            Var(x) => NegVar(x.clone()),
            NegVar(x) => Var(x.clone()),
            Par(l, r) => MallFormula::tensor(l.dual(), r.dual()),
            Tensor(l, r) => MallFormula::par(l.dual(), r.dual()),
            Plus(l, r) => MallFormula::with(l.dual(), r.dual()),
            With(l, r) => MallFormula::plus(l.dual(), r.dual()),
        }
    }

    /// Number of binary connectives.
    pub fn connective_count(&self) -> usize {
        use MallFormula::*;
        match self {
            Bot | One | Zero | Top | Var(_) | NegVar(_) => 0,
            Par(l, r) | Tensor(l, r) | Plus(l, r) | With(l, r) => {
                1 + l.connective_count() + r.connective_count()
            }
        }
    }

    /// Total node count (leaves plus connectives).
    pub fn size(&self) -> usize {
        use MallFormula::*;
        match self {
            Bot | One | Zero | Top | Var(_) | NegVar(_) => 1,
            Par(l, r) | Tensor(l, r) | Plus(l, r) | With(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, MallFormula::Var(_) | MallFormula::NegVar(_))
    }

    pub fn is_unit(&self) -> bool {
        matches!(
            self,
            MallFormula::Bot | MallFormula::One | MallFormula::Zero | MallFormula::Top
        )
    }

    /// c-formulas: plus-clauses of literals and bots containing at least
    /// one bot, where every non-bot leaf hangs off the clause as a bare
    /// literal. Grammar: c ::= bot | c + x | x + c | ~x + c | c + ~x | c + c.
    pub fn is_c_formula(&self) -> bool {
        use MallFormula::*;
        match self {
            Bot => true,
            Plus(l, r) => {
                (l.is_c_formula() && (r.is_literal() || r.is_c_formula()))
                    || (l.is_literal() && r.is_c_formula())
            }
            _ => false,
        }
    }

    /// Literal leaves, in occurrence order.
    pub fn literals(&self) -> Vec<(Name, bool)> {
        use MallFormula::*;
        let mut out = Vec::new();
        fn walk(f: &MallFormula, out: &mut Vec<(Name, bool)>) {
            match f {
                Bot | One | Zero | Top => {}
                Var(x) => out.push((x.clone(), false)),
                NegVar(x) => out.push((x.clone(), true)),
                Par(l, r) | Tensor(l, r) | Plus(l, r) | With(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Polarity classification. In the primed regime, a plus-formula that
    /// is a c-formula is treated like an atom during proof search and is
    /// excluded from the positive classes.
    pub fn classify(&self, regime: Regime) -> PolarityClass {
        use MallFormula::*;
        match self {
            Bot => PolarityClass::Unit(UnitKind::Bot),
            One => PolarityClass::Unit(UnitKind::One),
            Zero => PolarityClass::Unit(UnitKind::Zero),
            Top => PolarityClass::Unit(UnitKind::Top),
            Var(_) | NegVar(_) => PolarityClass::Atom,
            Par(..) => PolarityClass::N,
            Tensor(..) => PolarityClass::P,
            With(..) => PolarityClass::M,
            Plus(..) => {
                if regime == Regime::Primed && self.is_c_formula() {
                    PolarityClass::CFormula
                } else {
                    PolarityClass::Q
                }
            }
        }
    }

    /// Subformula at a path of 0/1 descent steps into binary connectives.
    pub fn subformula_at(&self, path: &[u8]) -> Option<&MallFormula> {
        use MallFormula::*;
        let mut cur = self;
        for &step in path {
            cur = match cur {
                Par(l, r) | Tensor(l, r) | Plus(l, r) | With(l, r) => {
                    if step == 0 {
                        l
                    } else {
                        r
                    }
                }
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Rebuild the formula with the subformula at `path` replaced by
    /// `replace(old)`.
    pub fn map_at(
        &self,
        path: &[u8],
        replace: &dyn Fn(&MallFormula) -> MallFormula,
    ) -> MallFormula {
        use MallFormula::*;
        if path.is_empty() {
            return replace(self);
        }
        let (step, rest) = (path[0], &path[1..]);
        let pair = |l: &MallRef, r: &MallRef| -> (MallRef, MallRef) {
            if step == 0 {
                (Arc::new(l.map_at(rest, replace)), r.clone())
            } else {
                (l.clone(), Arc::new(r.map_at(rest, replace)))
            }
        };
        match self {
            Par(l, r) => {
                let (l, r) = pair(l, r);
                Par(l, r)
            }
            Tensor(l, r) => {
                let (l, r) = pair(l, r);
                Tensor(l, r)
            }
            Plus(l, r) => {
                let (l, r) = pair(l, r);
                Plus(l, r)
            }
            With(l, r) => {
                let (l, r) = pair(l, r);
                With(l, r)
            }
            other => other.clone(),
        }
    }
}

/// Linear implication `A -o B`, shorthand for `~A # B`.
pub fn limp(a: &MallFormula, b: impl Into<MallRef>) -> MallFormula {
    MallFormula::Par(Arc::new(a.dual()), b.into())
}

/// Positive implication `A ->+ B`, shorthand for `~A + B`.
pub fn plimp(a: &MallFormula, b: impl Into<MallRef>) -> MallFormula {
    MallFormula::Plus(Arc::new(a.dual()), b.into())
}

/// Whether c-formulas are given special (atom-like) treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Standard,
    Primed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Bot,
    One,
    Zero,
    Top,
}

/// Metavariable classes driving the focussed phases:
/// M (with) and Q (plus) are the branching negatives/positives, N covers
/// all negatives (with, par), P all positives (tensor, plus), O the
/// deterministic shapes (tensor, par, atoms, and c-formulas when primed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarityClass {
    Atom,
    M,
    N,
    O,
    P,
    Q,
    CFormula,
    Unit(UnitKind),
}

impl PolarityClass {
    /// Membership in the (overlapping) metavariable classes: M <= N and
    /// Q <= P; O holds of tensor, par, atoms, and (primed) c-formulas.
    pub fn is_in(self, class: PolarityClass) -> bool {
        use PolarityClass::*;
        if self == class {
            return true;
        }
        match class {
            N => matches!(self, M | N),
            P => matches!(self, Q | P),
            // primary labels P and N are only ever assigned to tensor and
            // par nodes, both of which are deterministic shapes
            O => matches!(self, Atom | CFormula | P | N),
            _ => false,
        }
    }
}

impl fmt::Display for MallFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_mall(self, f, true)
    }
}

// Canonical printing fully parenthesizes nested binary connectives; only
// the outermost connective is bare.
fn fmt_mall(m: &MallFormula, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
    use MallFormula::*;
    let bin = |f: &mut fmt::Formatter<'_>, l: &MallFormula, op: &str, r: &MallFormula| {
        if !top {
            write!(f, "(")?;
        }
        fmt_mall(l, f, false)?;
        write!(f, " {op} ")?;
        fmt_mall(r, f, false)?;
        if !top {
            write!(f, ")")?;
        }
        Ok(())
    };
    match m {
        Bot => write!(f, "bot"),
        One => write!(f, "1"),
        Zero => write!(f, "0"),
        Top => write!(f, "top"),
        Var(x) => write!(f, "{x}"),
        NegVar(x) => write!(f, "~{x}"),
        Par(l, r) => bin(f, l, "#", r),
        Tensor(l, r) => bin(f, l, "*", r),
        Plus(l, r) => bin(f, l, "+", r),
        With(l, r) => bin(f, l, "&", r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MallFormula {
        MallFormula::var("x")
    }

    fn y() -> MallFormula {
        MallFormula::var("y")
    }

    #[test]
    fn qbf_dual_clauses() {
        // ~(x \/ y) = ~x /\ ~y
        let f = QbfFormula::or(QbfFormula::var("x"), QbfFormula::var("y"));
        assert_eq!(
            f.dual(),
            QbfFormula::and(QbfFormula::negvar("x"), QbfFormula::negvar("y"))
        );
        // ~(exists x. f) = forall x. ~f
        let g = QbfFormula::exists("x", f.clone());
        assert_eq!(g.dual(), QbfFormula::forall("x", f.dual()));
    }

    #[test]
    fn mall_dual_clauses() {
        let f = MallFormula::par(x(), y());
        assert_eq!(f.dual(), MallFormula::tensor(x().dual(), y().dual()));
        assert_eq!(MallFormula::Bot.dual(), MallFormula::One);
        assert_eq!(MallFormula::Zero.dual(), MallFormula::Top);
    }

    #[test]
    fn limp_plimp_expand() {
        assert_eq!(limp(&x(), y()), MallFormula::par(x().dual(), y()));
        assert_eq!(plimp(&x(), y()), MallFormula::plus(x().dual(), y()));
        // limp(1, B) = bot # B
        assert_eq!(
            limp(&MallFormula::One, y()),
            MallFormula::par(MallFormula::Bot, y())
        );
    }

    #[test]
    fn literal_count_examples() {
        let f = QbfFormula::or(QbfFormula::var("x"), QbfFormula::negvar("x"));
        assert_eq!(f.literal_count(), 2);
        assert_eq!(QbfFormula::True.literal_count(), 0);
        let g = QbfFormula::or(
            QbfFormula::and(QbfFormula::var("x"), QbfFormula::var("y")),
            QbfFormula::and(QbfFormula::negvar("x"), QbfFormula::var("z")),
        );
        assert_eq!(g.literal_count(), 4);
    }

    #[test]
    fn classification_table() {
        let with = MallFormula::with(x(), y());
        assert_eq!(with.classify(Regime::Standard), PolarityClass::M);
        assert!(with.classify(Regime::Standard).is_in(PolarityClass::N));

        let plus = MallFormula::plus(x(), y());
        assert_eq!(plus.classify(Regime::Standard), PolarityClass::Q);
        assert!(plus.classify(Regime::Standard).is_in(PolarityClass::P));

        // bot + x is a c-formula: CFormula under the primed regime only.
        let c = MallFormula::plus(MallFormula::Bot, x());
        assert_eq!(c.classify(Regime::Standard), PolarityClass::Q);
        assert_eq!(c.classify(Regime::Primed), PolarityClass::CFormula);
    }

    #[test]
    fn c_formula_grammar() {
        use MallFormula as F;
        assert!(F::Bot.is_c_formula());
        assert!(F::plus(F::Bot, x()).is_c_formula());
        assert!(F::plus(F::negvar("x"), F::plus(F::Bot, x())).is_c_formula());
        assert!(F::plus(F::plus(F::Bot, F::Bot), F::Bot).is_c_formula());
        // plus of two bare literals: no bot
        assert!(!F::plus(x(), y()).is_c_formula());
        // a non-literal, non-c operand disqualifies the clause
        assert!(!F::plus(F::plus(F::Bot, x()), F::plus(x(), y())).is_c_formula());
        assert!(!F::tensor(F::Bot, x()).is_c_formula());
    }

    #[test]
    fn duality_pairs_classes() {
        use PolarityClass::*;
        let cases = vec![
            (MallFormula::tensor(x(), y()), P, N),
            (MallFormula::par(x(), y()), N, P),
            (MallFormula::plus(x(), y()), Q, M),
            (MallFormula::with(x(), y()), M, Q),
        ];
        for (f, cls, dual_cls) in cases {
            assert_eq!(f.classify(Regime::Standard), cls);
            assert_eq!(f.dual().classify(Regime::Standard), dual_cls);
        }
        assert_eq!(x().dual().classify(Regime::Standard), Atom);
    }

    #[test]
    fn paths() {
        let f = MallFormula::par(MallFormula::tensor(x(), y()), x());
        assert_eq!(f.subformula_at(&[0, 1]), Some(&y()));
        assert_eq!(f.subformula_at(&[1, 0]), None);
        let g = f.map_at(&[0, 1], &|old| {
            MallFormula::plus(MallFormula::Bot, old.clone())
        });
        assert_eq!(
            g,
            MallFormula::par(
                MallFormula::tensor(x(), MallFormula::plus(MallFormula::Bot, y())),
                x()
            )
        );
    }
}
