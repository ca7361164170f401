//! The subtyping judgment A <= B and its derivations.
//!
//! The decision procedure applies the invertible rules first (/\R, \/L),
//! then the structural arrow rule, and only then backtracks over the
//! non-invertible choices (/\L1, /\L2, \/R1, \/R2). Atoms are related by
//! reflexivity only. Every premise strictly shrinks the combined size of
//! the two types, so the search terminates without fuel.

use crate::syntax::Type;

/// Names of the subtyping rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubRule {
    Arrow,
    AndL1,
    AndL2,
    AndR,
    BotL,
    OrL,
    OrR1,
    OrR2,
    BaseRefl,
}

impl SubRule {
    pub fn name(self) -> &'static str {
        match self {
            SubRule::Arrow => "->",
            SubRule::AndL1 => "/\\L1",
            SubRule::AndL2 => "/\\L2",
            SubRule::AndR => "/\\R",
            SubRule::BotL => "botL",
            SubRule::OrL => "\\/L",
            SubRule::OrR1 => "\\/R1",
            SubRule::OrR2 => "\\/R2",
            SubRule::BaseRefl => "base-refl",
        }
    }

    pub fn from_name(name: &str) -> Option<SubRule> {
        Some(match name {
            "->" => SubRule::Arrow,
            "/\\L1" => SubRule::AndL1,
            "/\\L2" => SubRule::AndL2,
            "/\\R" => SubRule::AndR,
            "botL" => SubRule::BotL,
            "\\/L" => SubRule::OrL,
            "\\/R1" => SubRule::OrR1,
            "\\/R2" => SubRule::OrR2,
            "base-refl" => SubRule::BaseRefl,
            _ => return None,
        })
    }
}

/// A rule-labeled subtyping derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubDerivation {
    pub rule: SubRule,
    pub lhs: Type,
    pub rhs: Type,
    pub children: Vec<SubDerivation>,
}

/// Decide A <= B without building a derivation.
pub fn subtype(a: &Type, b: &Type) -> bool {
    // botL
    if matches!(a, Type::Bot) {
        return true;
    }
    // /\R is invertible
    if let Type::Intersect(b1, b2) = b {
        return subtype(a, b1) && subtype(a, b2);
    }
    // \/L is invertible
    if let Type::Union(a1, a2) = a {
        return subtype(a1, b) && subtype(a2, b);
    }
    match (a, b) {
        (Type::Base(p), Type::Base(q)) => p == q,
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => subtype(b1, a1) && subtype(a2, b2),
        _ => {
            // backtrack over the non-invertible rules
            if let Type::Intersect(a1, a2) = a {
                if subtype(a1, b) || subtype(a2, b) {
                    return true;
                }
            }
            if let Type::Union(b1, b2) = b {
                if subtype(a, b1) || subtype(a, b2) {
                    return true;
                }
            }
            false
        }
    }
}

/// Decide A <= B and produce a derivation on success.
pub fn subtype_derive(a: &Type, b: &Type) -> Option<SubDerivation> {
    let node = |rule, children| SubDerivation {
        rule,
        lhs: a.clone(),
        rhs: b.clone(),
        children,
    };
    if matches!(a, Type::Bot) {
        return Some(node(SubRule::BotL, vec![]));
    }
    if let Type::Intersect(b1, b2) = b {
        let d1 = subtype_derive(a, b1)?;
        let d2 = subtype_derive(a, b2)?;
        return Some(node(SubRule::AndR, vec![d1, d2]));
    }
    if let Type::Union(a1, a2) = a {
        let d1 = subtype_derive(a1, b)?;
        let d2 = subtype_derive(a2, b)?;
        return Some(node(SubRule::OrL, vec![d1, d2]));
    }
    match (a, b) {
        (Type::Base(p), Type::Base(q)) if p == q => Some(node(SubRule::BaseRefl, vec![])),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
            let d1 = subtype_derive(b1, a1)?;
            let d2 = subtype_derive(a2, b2)?;
            Some(node(SubRule::Arrow, vec![d1, d2]))
        }
        _ => {
            if let Type::Intersect(a1, a2) = a {
                if let Some(d) = subtype_derive(a1, b) {
                    return Some(node(SubRule::AndL1, vec![d]));
                }
                if let Some(d) = subtype_derive(a2, b) {
                    return Some(node(SubRule::AndL2, vec![d]));
                }
            }
            if let Type::Union(b1, b2) = b {
                if let Some(d) = subtype_derive(a, b1) {
                    return Some(node(SubRule::OrR1, vec![d]));
                }
                if let Some(d) = subtype_derive(a, b2) {
                    return Some(node(SubRule::OrR2, vec![d]));
                }
            }
            None
        }
    }
}

/// Validate that a subtyping derivation instantiates the rule schemas.
pub fn validate_sub(d: &SubDerivation) -> Result<(), String> {
    let fail = |msg: &str| {
        Err(format!(
            "subtyping node {} for {} <= {}: {}",
            d.rule.name(),
            d.lhs,
            d.rhs,
            msg
        ))
    };
    let arity = |n: usize| -> Result<(), String> {
        if d.children.len() == n {
            Ok(())
        } else {
            fail(&format!(
                "expected {n} premises, found {}",
                d.children.len()
            ))
        }
    };
    match d.rule {
        SubRule::BotL => {
            arity(0)?;
            if !matches!(d.lhs, Type::Bot) {
                return fail("left side is not bot");
            }
        }
        SubRule::BaseRefl => {
            arity(0)?;
            match (&d.lhs, &d.rhs) {
                (Type::Base(p), Type::Base(q)) if p == q => {}
                _ => return fail("sides are not the same atom"),
            }
        }
        SubRule::Arrow => {
            arity(2)?;
            match (&d.lhs, &d.rhs) {
                (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
                    if d.children[0].lhs != **b1 || d.children[0].rhs != **a1 {
                        return fail("first premise is not B1 <= A1");
                    }
                    if d.children[1].lhs != **a2 || d.children[1].rhs != **b2 {
                        return fail("second premise is not A2 <= B2");
                    }
                }
                _ => return fail("sides are not both arrows"),
            }
        }
        SubRule::AndL1 | SubRule::AndL2 => {
            arity(1)?;
            match &d.lhs {
                Type::Intersect(a1, a2) => {
                    let part = if d.rule == SubRule::AndL1 { a1 } else { a2 };
                    if d.children[0].lhs != **part || d.children[0].rhs != d.rhs {
                        return fail("premise does not project the stated component");
                    }
                }
                _ => return fail("left side is not an intersection"),
            }
        }
        SubRule::AndR => {
            arity(2)?;
            match &d.rhs {
                Type::Intersect(b1, b2) => {
                    if d.children[0].lhs != d.lhs || d.children[0].rhs != **b1 {
                        return fail("first premise mismatch");
                    }
                    if d.children[1].lhs != d.lhs || d.children[1].rhs != **b2 {
                        return fail("second premise mismatch");
                    }
                }
                _ => return fail("right side is not an intersection"),
            }
        }
        SubRule::OrL => {
            arity(2)?;
            match &d.lhs {
                Type::Union(a1, a2) => {
                    if d.children[0].lhs != **a1 || d.children[0].rhs != d.rhs {
                        return fail("first premise mismatch");
                    }
                    if d.children[1].lhs != **a2 || d.children[1].rhs != d.rhs {
                        return fail("second premise mismatch");
                    }
                }
                _ => return fail("left side is not a union"),
            }
        }
        SubRule::OrR1 | SubRule::OrR2 => {
            arity(1)?;
            match &d.rhs {
                Type::Union(b1, b2) => {
                    let part = if d.rule == SubRule::OrR1 { b1 } else { b2 };
                    if d.children[0].lhs != d.lhs || d.children[0].rhs != **part {
                        return fail("premise does not inject into the stated component");
                    }
                }
                _ => return fail("right side is not a union"),
            }
        }
    }
    for c in &d.children {
        validate_sub(c)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Type {
        Type::base("P")
    }
    fn q() -> Type {
        Type::base("Q")
    }

    #[test]
    fn bot_is_least() {
        let int_arrow = Type::arrow(Type::base("int"), Type::base("int"));
        assert!(subtype(&Type::Bot, &int_arrow));
    }

    #[test]
    fn intersection_projects() {
        let s = Type::base("s");
        let n = Type::base("n");
        let lhs = Type::inter(
            Type::arrow(s.clone(), s.clone()),
            Type::arrow(n.clone(), n),
        );
        assert!(subtype(&lhs, &Type::arrow(s.clone(), s)));
    }

    #[test]
    fn no_arrow_distribution() {
        // (P->Q) /\ (P->R) is not a subtype of P -> Q /\ R
        let r = Type::base("R");
        let lhs = Type::inter(
            Type::arrow(p(), q()),
            Type::arrow(p(), r.clone()),
        );
        let rhs = Type::arrow(p(), Type::inter(q(), r));
        assert!(!subtype(&lhs, &rhs));
    }

    #[test]
    fn union_injects() {
        assert!(subtype(&p(), &Type::union(p(), q())));
    }

    #[test]
    fn derivations_validate() {
        let lhs = Type::union(p(), Type::inter(p(), q()));
        let rhs = Type::union(Type::union(p(), q()), Type::Bot);
        let d = subtype_derive(&lhs, &rhs).expect("derivable");
        validate_sub(&d).unwrap();
        assert!(subtype_derive(&rhs, &Type::Bot).is_none());
    }
}
