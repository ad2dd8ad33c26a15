//! Boolean Truth Trees: a proof system for closed prenex QBFs.
//!
//!   ----- taut (tau a true quantifier-free sentence)
//!   tau
//!
//!   phi[F/x]            phi[T/x]           phi[F/x]   phi[T/x]
//!   ------------ E      ------------ E     --------------------- A
//!   exists x.phi        exists x.phi       forall x.phi

use crate::formula::QbfFormula;
use crate::qbf::{evaluate, Assignment, QbfError};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BttRule {
    Taut,
    ExistsF,
    ExistsT,
    Forall,
}

impl fmt::Display for BttRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BttRule::Taut => write!(f, "taut"),
            BttRule::ExistsF => write!(f, "exists_f"),
            BttRule::ExistsT => write!(f, "exists_t"),
            BttRule::Forall => write!(f, "forall"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BttProof {
    pub conclusion: QbfFormula,
    pub rule: BttRule,
    pub children: Vec<BttProof>,
}

/// Bottom-up proof search. The F-instantiation is tried before T for
/// existentials, so results are reproducible; either order is complete.
pub fn btt_prove(phi: &QbfFormula) -> Result<Option<BttProof>, QbfError> {
    if !phi.is_prenex() {
        return Err(QbfError::NotPrenex);
    }
    if !phi.is_closed() {
        return Err(QbfError::NotClosed);
    }
    Ok(search(phi))
}

fn search(phi: &QbfFormula) -> Option<BttProof> {
    match phi {
        QbfFormula::Exists(x, b) => {
            for (value, rule) in [(false, BttRule::ExistsF), (true, BttRule::ExistsT)] {
                let inst = crate::qbf::substitute_const(b, x, value);
                if let Some(child) = search(&inst) {
                    return Some(BttProof {
                        conclusion: phi.clone(),
                        rule,
                        children: vec![child],
                    });
                }
            }
            None
        }
        QbfFormula::Forall(x, b) => {
            let low = search(&crate::qbf::substitute_const(b, x, false))?;
            let high = search(&crate::qbf::substitute_const(b, x, true))?;
            Some(BttProof {
                conclusion: phi.clone(),
                rule: BttRule::Forall,
                children: vec![low, high],
            })
        }
        qf => {
            if evaluate(qf, &Assignment::new()) {
                Some(BttProof {
                    conclusion: phi.clone(),
                    rule: BttRule::Taut,
                    children: Vec::new(),
                })
            } else {
                None
            }
        }
    }
}

/// Verify every node: taut leaves must be true quantifier-free sentences,
/// instantiations must match the quantifier structurally, and arities must
/// be correct.
pub fn btt_check(proof: &BttProof) -> bool {
    match (&proof.conclusion, proof.rule) {
        (QbfFormula::Exists(x, b), BttRule::ExistsF) => {
            proof.children.len() == 1
                && proof.children[0].conclusion == crate::qbf::substitute_const(b, x, false)
                && btt_check(&proof.children[0])
        }
        (QbfFormula::Exists(x, b), BttRule::ExistsT) => {
            proof.children.len() == 1
                && proof.children[0].conclusion == crate::qbf::substitute_const(b, x, true)
                && btt_check(&proof.children[0])
        }
        (QbfFormula::Forall(x, b), BttRule::Forall) => {
            proof.children.len() == 2
                && proof.children[0].conclusion == crate::qbf::substitute_const(b, x, false)
                && proof.children[1].conclusion == crate::qbf::substitute_const(b, x, true)
                && proof.children.iter().all(btt_check)
        }
        (qf, BttRule::Taut) => {
            proof.children.is_empty()
                && qf.is_quantifier_free()
                && qf.is_closed()
                && evaluate(qf, &Assignment::new())
        }
        _ => false,
    }
}

/// Indented textual tree, one node per line: `rule | conclusion`.
pub fn render_btt(proof: &BttProof) -> String {
    let mut out = String::new();
    fn go(p: &BttProof, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(&format!("{} | {}\n", p.rule, p.conclusion));
        for c in &p.children {
            go(c, depth + 1, out);
        }
    }
    go(proof, 0, &mut out);
    out
}
