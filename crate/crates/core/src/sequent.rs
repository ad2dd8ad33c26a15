//! One-sided sequents with an optional focus/co-focus zone, and
//! rule-labelled proof trees for every calculus in the crate.

use crate::formula::{MallFormula, MallRef};
use crate::parse::{parse_mall_cedent, ParseError};
use std::fmt;
use std::sync::Arc;

/// Where the sequent stands in the focussing phases: `v>` marks foci,
/// `^>` marks co-foci.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Plain,
    FocusDown(Vec<MallRef>),
    FocusUp(Vec<MallRef>),
}

/// A multiset of formulas; `ctx` and the focus vectors are kept sorted so
/// structural equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub ctx: Vec<MallRef>,
    pub phase: Phase,
}

impl Sequent {
    pub fn plain(formulas: impl IntoIterator<Item = MallFormula>) -> Sequent {
        Sequent::from_refs(formulas.into_iter().map(Arc::new).collect(), Phase::Plain)
    }

    pub fn from_refs(mut ctx: Vec<MallRef>, mut phase: Phase) -> Sequent {
        ctx.sort();
        match &mut phase {
            Phase::Plain => {}
            Phase::FocusDown(v) | Phase::FocusUp(v) => v.sort(),
        }
        Sequent { ctx, phase }
    }

    pub fn is_plain(&self) -> bool {
        matches!(self.phase, Phase::Plain)
    }

    /// Every formula in the sequent, context first.
    pub fn all_formulas(&self) -> impl Iterator<Item = &MallRef> {
        let zone: &[MallRef] = match &self.phase {
            Phase::Plain => &[],
            Phase::FocusDown(v) | Phase::FocusUp(v) => v,
        };
        self.ctx.iter().chain(zone.iter())
    }

    pub fn connective_count(&self) -> usize {
        self.all_formulas().map(|f| f.connective_count()).sum()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, v: &[MallRef]| -> fmt::Result {
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        write!(f, "=>")?;
        if !self.ctx.is_empty() {
            write!(f, " ")?;
            join(f, &self.ctx)?;
        }
        match &self.phase {
            Phase::Plain => {}
            Phase::FocusDown(v) => {
                write!(f, " v> ")?;
                join(f, v)?;
            }
            Phase::FocusUp(v) => {
                write!(f, " ^> ")?;
                join(f, v)?;
            }
        }
        Ok(())
    }
}

/// The five calculi: the unfocussed systems of the base figure, their
/// focussed counterparts, and the variant that treats c-formulas as atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemId {
    Mall,
    Amall,
    FocMall,
    FocMallW,
    FocMallPrime,
}

impl SystemId {
    /// Weakening built into the initial rules (wkid / w1)?
    pub fn is_affine(self) -> bool {
        matches!(self, SystemId::Amall | SystemId::FocMallW)
    }

    pub fn is_focussed(self) -> bool {
        matches!(
            self,
            SystemId::FocMall | SystemId::FocMallW | SystemId::FocMallPrime
        )
    }

    pub fn regime(self) -> crate::formula::Regime {
        if self == SystemId::FocMallPrime {
            crate::formula::Regime::Primed
        } else {
            crate::formula::Regime::Standard
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SystemId::Mall => "mall",
            SystemId::Amall => "amall",
            SystemId::FocMall => "focmall",
            SystemId::FocMallW => "focmallw",
            SystemId::FocMallPrime => "focmallprime",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SystemId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mall" => Ok(SystemId::Mall),
            "amall" => Ok(SystemId::Amall),
            "focmall" => Ok(SystemId::FocMall),
            "focmallw" => Ok(SystemId::FocMallW),
            "focmallprime" => Ok(SystemId::FocMallPrime),
            other => Err(format!("unknown system `{other}`")),
        }
    }
}

/// How many formulas decide and co-decide steps may select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    /// Arbitrary nonempty vectors of foci and co-foci.
    Multi,
    /// Singleton foci at decide steps.
    Focussed,
    /// Singleton co-foci at co-decide steps.
    CoFocussed,
    /// Both restrictions at once.
    BiFocussed,
}

impl Discipline {
    pub fn singleton_dec(self) -> bool {
        matches!(self, Discipline::Focussed | Discipline::BiFocussed)
    }

    pub fn singleton_codec(self) -> bool {
        matches!(self, Discipline::CoFocussed | Discipline::BiFocussed)
    }
}

impl std::str::FromStr for Discipline {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multi" => Ok(Discipline::Multi),
            "foc" => Ok(Discipline::Focussed),
            "cofoc" => Ok(Discipline::CoFocussed),
            "bifoc" => Ok(Discipline::BiFocussed),
            other => Err(format!("unknown discipline `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleLabel {
    Id,
    WkId,
    One,
    WOne,
    Bot,
    Top,
    Par,
    Tensor,
    Plus,
    With,
    Dec,
    Codec,
    Rel,
    Corel,
    /// The extra initial sequents of the c-formula system.
    CInit,
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleLabel::Id => "id",
            RuleLabel::WkId => "wkid",
            RuleLabel::One => "one",
            RuleLabel::WOne => "w1",
            RuleLabel::Bot => "bot",
            RuleLabel::Top => "top",
            RuleLabel::Par => "par",
            RuleLabel::Tensor => "tensor",
            RuleLabel::Plus => "plus",
            RuleLabel::With => "with",
            RuleLabel::Dec => "dec",
            RuleLabel::Codec => "codec",
            RuleLabel::Rel => "rel",
            RuleLabel::Corel => "corel",
            RuleLabel::CInit => "cinit",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for RuleLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use RuleLabel::*;
        match s {
            "id" => Ok(Id),
            "wkid" => Ok(WkId),
            "one" => Ok(One),
            "w1" => Ok(WOne),
            "bot" => Ok(Bot),
            "top" => Ok(Top),
            "par" => Ok(Par),
            "tensor" => Ok(Tensor),
            "plus" => Ok(Plus),
            "with" => Ok(With),
            "dec" => Ok(Dec),
            "codec" => Ok(Codec),
            "rel" => Ok(Rel),
            "corel" => Ok(Corel),
            "cinit" => Ok(CInit),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub system: SystemId,
    pub rule: RuleLabel,
    pub conclusion: Sequent,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaf(system: SystemId, rule: RuleLabel, conclusion: Sequent) -> ProofTree {
        ProofTree {
            system,
            rule,
            conclusion,
            premises: Vec::new(),
        }
    }

    pub fn node(
        system: SystemId,
        rule: RuleLabel,
        conclusion: Sequent,
        premises: Vec<ProofTree>,
    ) -> ProofTree {
        ProofTree {
            system,
            rule,
            conclusion,
            premises,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(|p| p.node_count()).sum::<usize>()
    }

    /// Depth of the deepest branch.
    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    pub fn iter_nodes(&self) -> Vec<&ProofTree> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            for p in &out[i].premises {
                out.push(p);
            }
            i += 1;
        }
        out
    }

    /// Singleton foci at every dec and singleton co-foci at every codec?
    pub fn is_focussed(&self) -> bool {
        self.iter_nodes().iter().all(|n| {
            n.rule != RuleLabel::Dec
                || n.premises.first().is_some_and(
                    |p| matches!(&p.conclusion.phase, Phase::FocusDown(v) if v.len() == 1),
                )
        })
    }

    pub fn is_co_focussed(&self) -> bool {
        self.iter_nodes().iter().all(|n| {
            n.rule != RuleLabel::Codec
                || n.premises.first().is_some_and(
                    |p| matches!(&p.conclusion.phase, Phase::FocusUp(v) if v.len() == 1),
                )
        })
    }

    pub fn is_bi_focussed(&self) -> bool {
        self.is_focussed() && self.is_co_focussed()
    }
}

/// Same indented format as truth-tree proofs: `rule | sequent` per line.
pub fn render_proof(proof: &ProofTree) -> String {
    let mut out = String::new();
    fn go(p: &ProofTree, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(&format!("{} | {}\n", p.rule, p.conclusion));
        for c in &p.premises {
            go(c, depth + 1, out);
        }
    }
    go(proof, 0, &mut out);
    out
}

/// Parse a proof rendered by [`render_proof`]. The system is supplied by
/// the caller (proof files do not embed it).
pub fn parse_proof(text: &str, system: SystemId) -> Result<ProofTree, ParseError> {
    struct Line {
        depth: usize,
        rule: RuleLabel,
        sequent: Sequent,
    }
    let mut lines = Vec::new();
    let mut offset = 0usize;
    for raw in text.lines() {
        let line_start = offset;
        offset += raw.len() + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(ParseError {
                pos: line_start,
                msg: "odd indentation".into(),
            });
        }
        let body = raw.trim_start();
        let (rule_txt, seq_txt) = body.split_once('|').ok_or(ParseError {
            pos: line_start,
            msg: "expected `rule | sequent`".into(),
        })?;
        let rule: RuleLabel = rule_txt.trim().parse().map_err(|msg| ParseError {
            pos: line_start,
            msg,
        })?;
        let sequent = parse_sequent(seq_txt.trim()).map_err(|mut e| {
            e.pos += line_start;
            e
        })?;
        lines.push(Line {
            depth: indent / 2,
            rule,
            sequent,
        });
    }
    if lines.is_empty() {
        return Err(ParseError {
            pos: 0,
            msg: "empty proof".into(),
        });
    }

    fn build(
        lines: &[Line],
        at: &mut usize,
        depth: usize,
        system: SystemId,
    ) -> Result<ProofTree, ParseError> {
        let line = &lines[*at];
        if line.depth != depth {
            return Err(ParseError {
                pos: 0,
                msg: format!("bad tree indentation at node {}", *at),
            });
        }
        let mut node = ProofTree::node(system, line.rule, line.sequent.clone(), Vec::new());
        *at += 1;
        while *at < lines.len() && lines[*at].depth > depth {
            node.premises.push(build(lines, at, depth + 1, system)?);
        }
        Ok(node)
    }
    let mut at = 0;
    let root = build(&lines, &mut at, 0, system)?;
    if at != lines.len() {
        return Err(ParseError {
            pos: 0,
            msg: "multiple roots in proof file".into(),
        });
    }
    Ok(root)
}

/// Parse `=> A, B`, `=> A v> B` or `=> A ^> B`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let rest = text.strip_prefix("=>").ok_or(ParseError {
        pos: 0,
        msg: "sequent must start with `=>`".into(),
    })?;
    let (ctx_txt, phase_txt) = if let Some((l, r)) = rest.split_once("v>") {
        (l, Some((false, r)))
    } else if let Some((l, r)) = rest.split_once("^>") {
        (l, Some((true, r)))
    } else {
        (rest, None)
    };
    let ctx = parse_mall_cedent(ctx_txt)?
        .into_iter()
        .map(Arc::new)
        .collect();
    let phase = match phase_txt {
        None => Phase::Plain,
        Some((up, txt)) => {
            let zone: Vec<MallRef> = parse_mall_cedent(txt)?.into_iter().map(Arc::new).collect();
            if up {
                Phase::FocusUp(zone)
            } else {
                Phase::FocusDown(zone)
            }
        }
    };
    Ok(Sequent::from_refs(ctx, phase))
}
