//! Stable JSON encodings of types, terms, derivations, measures, and
//! differential reports. Derivations carry both structural encodings (so
//! they deserialize and re-validate) and display text.

use serde::{Deserialize, Serialize};

use crate::derivation::{Derivation, Direction, Judgment, Rule};
use crate::differ::{AgreementReport, CaseRecord};
use crate::pretty::{print_lnterm, print_type};
use crate::subtyping::{SubDerivation, SubRule};
use crate::syntax::{
    ContextualAnnotation, CtxEntry, LNTerm, LinEntry, LinearContext, Type, TypingContext, VarSpace,
};
use crate::transform::{Binding, BindingSeq, Measure};
use crate::tri::Decision;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TypeJson {
    Base { name: String },
    Bot,
    Arrow { domain: Box<TypeJson>, codomain: Box<TypeJson> },
    Intersect { left: Box<TypeJson>, right: Box<TypeJson> },
    Union { left: Box<TypeJson>, right: Box<TypeJson> },
}

impl From<&Type> for TypeJson {
    fn from(t: &Type) -> TypeJson {
        match t {
            Type::Base(n) => TypeJson::Base { name: n.clone() },
            Type::Bot => TypeJson::Bot,
            Type::Arrow(a, b) => TypeJson::Arrow {
                domain: Box::new(TypeJson::from(&**a)),
                codomain: Box::new(TypeJson::from(&**b)),
            },
            Type::Intersect(a, b) => TypeJson::Intersect {
                left: Box::new(TypeJson::from(&**a)),
                right: Box::new(TypeJson::from(&**b)),
            },
            Type::Union(a, b) => TypeJson::Union {
                left: Box::new(TypeJson::from(&**a)),
                right: Box::new(TypeJson::from(&**b)),
            },
        }
    }
}

impl From<&TypeJson> for Type {
    fn from(t: &TypeJson) -> Type {
        match t {
            TypeJson::Base { name } => Type::Base(name.clone()),
            TypeJson::Bot => Type::Bot,
            TypeJson::Arrow { domain, codomain } => {
                Type::arrow(Type::from(&**domain), Type::from(&**codomain))
            }
            TypeJson::Intersect { left, right } => {
                Type::inter(Type::from(&**left), Type::from(&**right))
            }
            TypeJson::Union { left, right } => {
                Type::union(Type::from(&**left), Type::from(&**right))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AnnotationJson {
    pub context: Vec<CtxEntryJson>,
    pub ty: TypeJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CtxEntryJson {
    pub name: String,
    pub space: String,
    pub ty: TypeJson,
}

fn space_str(s: VarSpace) -> String {
    match s {
        VarSpace::Ord => "ord".into(),
        VarSpace::Fix => "fix".into(),
    }
}

fn space_from(s: &str) -> VarSpace {
    if s == "fix" {
        VarSpace::Fix
    } else {
        VarSpace::Ord
    }
}

pub fn gamma_to_json(g: &TypingContext) -> Vec<CtxEntryJson> {
    g.entries
        .iter()
        .map(|CtxEntry { name, space, ty }| CtxEntryJson {
            name: name.clone(),
            space: space_str(*space),
            ty: TypeJson::from(ty),
        })
        .collect()
}

pub fn gamma_from_json(v: &[CtxEntryJson]) -> TypingContext {
    let mut g = TypingContext::empty();
    for e in v {
        let _ = g.push(&e.name, space_from(&e.space), Type::from(&e.ty));
    }
    g
}

fn annos_to_json(annos: &[ContextualAnnotation]) -> Vec<AnnotationJson> {
    annos
        .iter()
        .map(|a| AnnotationJson {
            context: gamma_to_json(&a.context),
            ty: TypeJson::from(&a.ty),
        })
        .collect()
}

fn annos_from_json(annos: &[AnnotationJson]) -> Vec<ContextualAnnotation> {
    annos
        .iter()
        .map(|a| ContextualAnnotation {
            context: gamma_from_json(&a.context),
            ty: Type::from(&a.ty),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermJson {
    Var { name: String },
    FixVar { name: String },
    LinVar { name: String },
    Lam { binder: String, body: Box<TermJson> },
    App { func: Box<TermJson>, arg: Box<TermJson> },
    Fix { binder: String, body: Box<TermJson> },
    Anno { subject: Box<TermJson>, annotations: Vec<AnnotationJson> },
    Let { binder: String, rhs: Box<TermJson>, body: Box<TermJson> },
    SlackLet { binder: String, rhs: Box<TermJson>, body: Box<TermJson> },
}

impl From<&LNTerm> for TermJson {
    fn from(t: &LNTerm) -> TermJson {
        match t {
            LNTerm::Var(x) => TermJson::Var { name: x.clone() },
            LNTerm::FixVar(u) => TermJson::FixVar { name: u.clone() },
            LNTerm::LinVar(x) => TermJson::LinVar { name: x.clone() },
            LNTerm::Lam(x, b) => TermJson::Lam {
                binder: x.clone(),
                body: Box::new(TermJson::from(&**b)),
            },
            LNTerm::App(f, a) => TermJson::App {
                func: Box::new(TermJson::from(&**f)),
                arg: Box::new(TermJson::from(&**a)),
            },
            LNTerm::Fix(u, b) => TermJson::Fix {
                binder: u.clone(),
                body: Box::new(TermJson::from(&**b)),
            },
            LNTerm::Anno(e, annos) => TermJson::Anno {
                subject: Box::new(TermJson::from(&**e)),
                annotations: annos_to_json(annos),
            },
            LNTerm::Let(x, r, b) => TermJson::Let {
                binder: x.clone(),
                rhs: Box::new(TermJson::from(&**r)),
                body: Box::new(TermJson::from(&**b)),
            },
            LNTerm::SlackLet(x, r, b) => TermJson::SlackLet {
                binder: x.clone(),
                rhs: Box::new(TermJson::from(&**r)),
                body: Box::new(TermJson::from(&**b)),
            },
        }
    }
}

impl From<&TermJson> for LNTerm {
    fn from(t: &TermJson) -> LNTerm {
        match t {
            TermJson::Var { name } => LNTerm::Var(name.clone()),
            TermJson::FixVar { name } => LNTerm::FixVar(name.clone()),
            TermJson::LinVar { name } => LNTerm::LinVar(name.clone()),
            TermJson::Lam { binder, body } => {
                LNTerm::Lam(binder.clone(), Box::new(LNTerm::from(&**body)))
            }
            TermJson::App { func, arg } => LNTerm::App(
                Box::new(LNTerm::from(&**func)),
                Box::new(LNTerm::from(&**arg)),
            ),
            TermJson::Fix { binder, body } => {
                LNTerm::Fix(binder.clone(), Box::new(LNTerm::from(&**body)))
            }
            TermJson::Anno {
                subject,
                annotations,
            } => LNTerm::Anno(
                Box::new(LNTerm::from(&**subject)),
                annos_from_json(annotations),
            ),
            TermJson::Let { binder, rhs, body } => LNTerm::Let(
                binder.clone(),
                Box::new(LNTerm::from(&**rhs)),
                Box::new(LNTerm::from(&**body)),
            ),
            TermJson::SlackLet { binder, rhs, body } => LNTerm::SlackLet(
                binder.clone(),
                Box::new(LNTerm::from(&**rhs)),
                Box::new(LNTerm::from(&**body)),
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaEntryJson {
    Linear { var: String, ty: TypeJson },
    Slack { var: String, value: TermJson },
}

pub fn delta_to_json(d: &LinearContext) -> Vec<DeltaEntryJson> {
    d.entries
        .iter()
        .map(|e| match e {
            LinEntry::Linear { var, ty } => DeltaEntryJson::Linear {
                var: var.clone(),
                ty: TypeJson::from(ty),
            },
            LinEntry::Slack { var, value } => DeltaEntryJson::Slack {
                var: var.clone(),
                value: TermJson::from(value),
            },
        })
        .collect()
}

pub fn delta_from_json(v: &[DeltaEntryJson]) -> LinearContext {
    LinearContext {
        entries: v
            .iter()
            .map(|e| match e {
                DeltaEntryJson::Linear { var, ty } => LinEntry::Linear {
                    var: var.clone(),
                    ty: Type::from(ty),
                },
                DeltaEntryJson::Slack { var, value } => LinEntry::Slack {
                    var: var.clone(),
                    value: LNTerm::from(value),
                },
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JudgmentJson {
    pub gamma: Vec<CtxEntryJson>,
    pub delta: Vec<DeltaEntryJson>,
    pub term: TermJson,
    pub term_text: String,
    pub direction: String,
    pub ty: TypeJson,
    pub ty_text: String,
}

impl From<&Judgment> for JudgmentJson {
    fn from(j: &Judgment) -> JudgmentJson {
        JudgmentJson {
            gamma: gamma_to_json(&j.gamma),
            delta: delta_to_json(&j.delta),
            term: TermJson::from(&j.subject),
            term_text: print_lnterm(&j.subject),
            direction: match j.dir {
                Direction::Check => "check".into(),
                Direction::Synth => "synth".into(),
            },
            ty: TypeJson::from(&j.ty),
            ty_text: print_type(&j.ty),
        }
    }
}

impl From<&JudgmentJson> for Judgment {
    fn from(j: &JudgmentJson) -> Judgment {
        Judgment {
            gamma: gamma_from_json(&j.gamma),
            delta: delta_from_json(&j.delta),
            subject: LNTerm::from(&j.term),
            dir: if j.direction == "synth" {
                Direction::Synth
            } else {
                Direction::Check
            },
            ty: Type::from(&j.ty),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubDerivationJson {
    pub rule: String,
    pub lhs: TypeJson,
    pub rhs: TypeJson,
    pub children: Vec<SubDerivationJson>,
}

impl From<&SubDerivation> for SubDerivationJson {
    fn from(d: &SubDerivation) -> SubDerivationJson {
        SubDerivationJson {
            rule: d.rule.name().to_string(),
            lhs: TypeJson::from(&d.lhs),
            rhs: TypeJson::from(&d.rhs),
            children: d.children.iter().map(SubDerivationJson::from).collect(),
        }
    }
}

impl TryFrom<&SubDerivationJson> for SubDerivation {
    type Error = String;
    fn try_from(d: &SubDerivationJson) -> Result<SubDerivation, String> {
        Ok(SubDerivation {
            rule: SubRule::from_name(&d.rule).ok_or_else(|| format!("unknown rule {}", d.rule))?,
            lhs: Type::from(&d.lhs),
            rhs: Type::from(&d.rhs),
            children: d
                .children
                .iter()
                .map(SubDerivation::try_from)
                .collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: String,
    pub judgment: JudgmentJson,
    pub children: Vec<DerivationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtyping: Option<SubDerivationJson>,
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> DerivationJson {
        DerivationJson {
            rule: d.rule.name().to_string(),
            judgment: JudgmentJson::from(&d.judgment),
            children: d.children.iter().map(|c| DerivationJson::from(&**c)).collect(),
            subtyping: d.subtyping.as_ref().map(SubDerivationJson::from),
        }
    }
}

impl TryFrom<&DerivationJson> for Derivation {
    type Error = String;
    fn try_from(d: &DerivationJson) -> Result<Derivation, String> {
        Ok(Derivation {
            rule: Rule::from_name(&d.rule).ok_or_else(|| format!("unknown rule {}", d.rule))?,
            judgment: Judgment::from(&d.judgment),
            children: d
                .children
                .iter()
                .map(|c| Derivation::try_from(c).map(std::rc::Rc::new))
                .collect::<Result<_, _>>()?,
            subtyping: d
                .subtyping
                .as_ref()
                .map(SubDerivation::try_from)
                .transpose()?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureJson {
    pub unbound_synth: usize,
    pub brittle: usize,
    pub prickly: usize,
    pub transposed: usize,
}

impl From<&Measure> for MeasureJson {
    fn from(m: &Measure) -> MeasureJson {
        MeasureJson {
            unbound_synth: m.unbound_synth,
            brittle: m.brittle,
            prickly: m.prickly,
            transposed: m.transposed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BindingJson {
    pub var: String,
    pub slack: bool,
    pub rhs: TermJson,
    pub rhs_text: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationJson {
    pub bindings: Vec<BindingJson>,
    pub body: TermJson,
    pub body_text: String,
    pub embedded: TermJson,
    pub embedded_text: String,
}

pub fn translation_to_json(l: &BindingSeq, body: &LNTerm, embedded: &LNTerm) -> TranslationJson {
    TranslationJson {
        bindings: l
            .0
            .iter()
            .map(|b| BindingJson {
                var: b.var().to_string(),
                slack: matches!(b, Binding::SlackBind { .. }),
                rhs: TermJson::from(b.rhs()),
                rhs_text: print_lnterm(b.rhs()),
            })
            .collect(),
        body: TermJson::from(body),
        body_text: print_lnterm(body),
        embedded: TermJson::from(embedded),
        embedded_text: print_lnterm(embedded),
    }
}

fn decision_str(d: Decision) -> String {
    match d {
        Decision::Accept => "accept".into(),
        Decision::Reject => "reject".into(),
        Decision::FuelExhausted => "fuel-exhausted".into(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseJson {
    pub term: String,
    pub ty: String,
    pub tri: String,
    pub ln: String,
    pub tri_fuel_used: u64,
    pub ln_fuel_used: u64,
}

impl From<&CaseRecord> for CaseJson {
    fn from(c: &CaseRecord) -> CaseJson {
        CaseJson {
            term: crate::pretty::print_term(&c.term),
            ty: print_type(&c.goal),
            tri: decision_str(c.tri),
            ln: decision_str(c.ln),
            tri_fuel_used: c.tri_fuel_used,
            ln_fuel_used: c.ln_fuel_used,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportJson {
    pub exhaustive_terms: usize,
    pub random_terms: usize,
    pub cases: usize,
    pub agree_accept: usize,
    pub agree_reject: usize,
    pub fuel_exhausted: usize,
    pub max_fuel_used: u64,
    pub disagreements: Vec<CaseJson>,
}

impl From<&AgreementReport> for ReportJson {
    fn from(r: &AgreementReport) -> ReportJson {
        ReportJson {
            exhaustive_terms: r.exhaustive_terms,
            random_terms: r.random_terms,
            cases: r.cases,
            agree_accept: r.agree_accept,
            agree_reject: r.agree_reject,
            fuel_exhausted: r.fuel_exhausted,
            max_fuel_used: r.max_fuel_used,
            disagreements: r.disagreements.iter().map(CaseJson::from).collect(),
        }
    }
}
