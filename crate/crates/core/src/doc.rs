//! JSON algebra documents: parsing, emission and the importer for classical
//! differential graded algebras.
//!
//! Documents in the default `ainfty` convention carry the operations `b_n`
//! directly. Documents in the `dga` convention carry a differential and a
//! product in classical grading; loading shifts every degree by `-1` and
//! searches for the sign twist making the result an A∞-structure.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ainfty::{stasheff_residual, AInfHomotopy, AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::{Element, GradedSpace, GradingMode, MultiMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldSpec {
    Fp { p: u64 },
    Q,
}

impl FieldSpec {
    pub fn field(&self) -> Result<Field> {
        match *self {
            FieldSpec::Fp { p } => Field::prime(p),
            FieldSpec::Q => Ok(Field::Q),
        }
    }

    pub fn of(field: Field) -> FieldSpec {
        match field {
            Field::Fp(p) => FieldSpec::Fp { p },
            Field::Q => FieldSpec::Q,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Ainfty,
    Dga,
}

impl Convention {
    fn is_default(&self) -> bool {
        *self == Convention::Ainfty
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub basis: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub args: Vec<String>,
    pub value: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpDoc {
    pub arity: usize,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedElementDoc {
    pub name: String,
    pub value: Vec<TermDoc>,
}

/// A∞-morphism from the enclosing algebra to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub target: Box<AlgebraDocument>,
    pub components: Vec<OpDoc>,
}

/// Homotopy `h` from `f` to `g`, all maps from the enclosing algebra to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyDoc {
    pub target: Box<AlgebraDocument>,
    pub f: Vec<OpDoc>,
    pub g: Vec<OpDoc>,
    pub h: Vec<OpDoc>,
}

/// Serialised algebra. Map sections are always in the A∞ convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub field: FieldSpec,
    #[serde(default = "default_grading")]
    pub grading: GradingMode,
    #[serde(default, skip_serializing_if = "Convention::is_default")]
    pub convention: Convention,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dga: bool,
    pub basis: Vec<BasisDoc>,
    pub ops: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<NamedElementDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<MorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy: Option<HomotopyDoc>,
}

fn default_grading() -> GradingMode {
    GradingMode::Z
}

/// Sign twist `σ·(-1)^{Σ c_k |a_k|}` applied to a classical operation of
/// arity `c.len()`, degrees taken after the shift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignRule {
    pub sigma: i8,
    pub c: Vec<u8>,
}

impl SignRule {
    fn odd(&self, space: &GradedSpace, args: &[usize]) -> bool {
        let mut odd = self.sigma < 0;
        for (k, &a) in args.iter().enumerate() {
            if self.c[k] == 1 && space.odd(a) {
                odd = !odd;
            }
        }
        odd
    }

    /// All rules for one arity in search order: first the standard twist
    /// `c_k = (n - k) mod 2` with `σ = +1`, then every other `(σ, c)` with
    /// `σ = +1` before `σ = -1` and `c` in lexicographic order.
    fn candidates(arity: usize) -> Vec<SignRule> {
        let standard = SignRule { sigma: 1, c: (1..=arity).map(|k| ((arity - k) % 2) as u8).collect() };
        let mut out = vec![standard.clone()];
        for sigma in [1i8, -1] {
            for bits in 0..(1u32 << arity) {
                let c = (0..arity).map(|k| ((bits >> (arity - 1 - k)) & 1) as u8).collect();
                let r = SignRule { sigma, c };
                if r != standard {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// Loaded document.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub algebra: Arc<AInfinity>,
    pub convention: Convention,
    /// Sign rules chosen by the importer, for `b_1` and `b_2`.
    pub signs: Option<(SignRule, SignRule)>,
    pub elements: Vec<(String, Element)>,
    pub morphism: Option<AInfMorphism>,
    pub homotopy: Option<AInfHomotopy>,
}

impl Loaded {
    /// Named element, or a basis vector of that name.
    pub fn element(&self, name: &str) -> Option<Element> {
        if let Some((_, e)) = self.elements.iter().find(|(n, _)| n == name) {
            return Some(e.clone());
        }
        let sp = self.algebra.space();
        sp.index_of(name).map(|i| Element::basis(sp.field(), i))
    }
}

pub fn parse_str(s: &str) -> Result<AlgebraDocument> {
    serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed document: {e}")))
}

pub fn to_string(doc: &AlgebraDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialise")
}

fn parse_terms(space: &GradedSpace, terms: &[TermDoc]) -> Result<Element> {
    let mut e = Element::zero();
    for t in terms {
        let i = space.index_of(&t.basis).ok_or_else(|| Error::Input(format!("unknown basis name {}", t.basis)))?;
        e.add_term(i, &space.field().parse(&t.coeff)?);
    }
    Ok(e)
}

fn emit_terms(space: &GradedSpace, e: &Element) -> Vec<TermDoc> {
    e.iter().map(|(i, c)| TermDoc { basis: space.name(*i).to_string(), coeff: c.to_coeff_string() }).collect()
}

fn parse_args(space: &GradedSpace, args: &[String]) -> Result<Vec<usize>> {
    args.iter()
        .map(|a| space.index_of(a).ok_or_else(|| Error::Input(format!("unknown basis name {a}"))))
        .collect()
}

fn parse_op(src: &Arc<GradedSpace>, tgt: &Arc<GradedSpace>, op: &OpDoc, degree: i64) -> Result<MultiMap> {
    if op.arity == 0 {
        return Err(Error::Input("arity must be positive".into()));
    }
    let mut m = MultiMap::new(src.clone(), tgt.clone(), op.arity, degree);
    for e in &op.entries {
        let args = parse_args(src, &e.args)?;
        if args.len() != op.arity {
            return Err(Error::ArityMismatch { expected: op.arity, got: args.len() });
        }
        let v = parse_terms(tgt, &e.value)?;
        m.accumulate(args, &v)?;
    }
    Ok(m)
}

/// Canonical op document: entries in basis-tuple order, terms in basis order.
pub fn emit_op(m: &MultiMap) -> OpDoc {
    OpDoc {
        arity: m.arity(),
        entries: m
            .entries()
            .iter()
            .map(|(k, v)| EntryDoc {
                args: k.iter().map(|&i| m.src().name(i).to_string()).collect(),
                value: emit_terms(m.tgt(), v),
            })
            .collect(),
    }
}

/// Operations indexed by arity `1..=max`, missing arities as zero maps.
fn parse_ops(src: &Arc<GradedSpace>, tgt: &Arc<GradedSpace>, ops: &[OpDoc], degree: i64) -> Result<Vec<MultiMap>> {
    let max = ops.iter().map(|o| o.arity).max().unwrap_or(1);
    let mut out: Vec<MultiMap> = (1..=max).map(|n| MultiMap::new(src.clone(), tgt.clone(), n, degree)).collect();
    for o in ops {
        let m = parse_op(src, tgt, o, degree)?;
        for (k, v) in m.entries() {
            out[o.arity - 1].accumulate(k.clone(), v)?;
        }
    }
    Ok(out)
}

fn space_of(doc: &AlgebraDocument, shift: i64) -> Result<Arc<GradedSpace>> {
    let field = doc.field.field()?;
    let basis = doc
        .basis
        .iter()
        .map(|b| {
            let d = b.degree + shift;
            let d = if doc.grading == GradingMode::Z2 { d.rem_euclid(2) } else { d };
            (b.name.clone(), d)
        })
        .collect();
    if doc.grading == GradingMode::Z2 && doc.basis.iter().any(|b| !(b.degree == 0 || b.degree == 1)) {
        return Err(Error::Input("Z2 degrees must be 0 or 1".into()));
    }
    Ok(Arc::new(GradedSpace::new(field, doc.grading, basis)?))
}

fn apply_rule(shifted: &Arc<GradedSpace>, classical: &MultiMap, rule: &SignRule) -> Result<MultiMap> {
    let mut m = MultiMap::new(shifted.clone(), shifted.clone(), classical.arity(), 1);
    for (k, v) in classical.entries() {
        let v = if rule.odd(shifted, k) { v.neg() } else { v.clone() };
        m.insert(k.clone(), v)?;
    }
    Ok(m)
}

/// Imports a classical DGA `(d, ·)` with the first sign rules, in search
/// order, under which the Stasheff identities hold for arities 1 to 3.
pub fn import_dga(
    classical: &Arc<GradedSpace>,
    shifted: &Arc<GradedSpace>,
    d: &MultiMap,
    mul: &MultiMap,
) -> Result<(AInfinity, SignRule, SignRule)> {
    debug_assert!(Arc::ptr_eq(d.src(), classical));
    for r1 in SignRule::candidates(1) {
        let b1 = apply_rule(shifted, d, &r1)?;
        for r2 in SignRule::candidates(2) {
            let b2 = apply_rule(shifted, mul, &r2)?;
            let a = AInfinity::new(shifted.clone(), vec![b1.clone(), b2], true)?;
            if (1..=3).all(|n| stasheff_residual(&a, n).is_zero()) {
                return Ok((a, r1, r2));
            }
        }
    }
    Err(Error::CheckFailed("no desuspension sign rule satisfies the Stasheff identities up to arity 3".into()))
}

fn unapply_rule(classical: &Arc<GradedSpace>, m: &MultiMap, rule: &SignRule) -> MultiMap {
    let mut out = MultiMap::new(classical.clone(), classical.clone(), m.arity(), if m.arity() == 1 { 1 } else { 0 });
    for (k, v) in m.entries() {
        let v = if rule.odd(m.src(), k) { v.neg() } else { v.clone() };
        out.insert(k.clone(), v).expect("shifted degrees match");
    }
    out
}

/// Parses and validates a document. Structural checks only; identity
/// checks are left to the caller.
pub fn load(doc: &AlgebraDocument) -> Result<Loaded> {
    let (algebra, signs) = match doc.convention {
        Convention::Ainfty => {
            let sp = space_of(doc, 0)?;
            let ops = parse_ops(&sp, &sp, &doc.ops, 1)?;
            (AInfinity::new(sp, ops, doc.dga)?, None)
        }
        Convention::Dga => {
            if doc.ops.iter().any(|o| o.arity > 2) {
                return Err(Error::Input("dga convention allows only arities 1 and 2".into()));
            }
            let classical = space_of(doc, 0)?;
            let shifted = space_of(doc, -1)?;
            let mut d = MultiMap::new(classical.clone(), classical.clone(), 1, 1);
            let mut mul = MultiMap::new(classical.clone(), classical.clone(), 2, 0);
            for o in &doc.ops {
                let (target, deg) = if o.arity == 1 { (&mut d, 1) } else { (&mut mul, 0) };
                let m = parse_op(&classical, &classical, o, deg)?;
                for (k, v) in m.entries() {
                    target.accumulate(k.clone(), v)?;
                }
            }
            let (a, r1, r2) = import_dga(&classical, &shifted, &d, &mul)?;
            (a, Some((r1, r2)))
        }
    };
    let algebra = Arc::new(algebra);
    let sp = algebra.space().clone();
    let mut elements = Vec::new();
    for e in &doc.elements {
        if sp.index_of(&e.name).is_some() || elements.iter().any(|(n, _): &(String, Element)| *n == e.name) {
            return Err(Error::Input(format!("element name {} clashes", e.name)));
        }
        elements.push((e.name.clone(), parse_terms(&sp, &e.value)?));
    }
    let morphism = match &doc.morphism {
        Some(m) => {
            let target = load(&m.target)?.algebra;
            let comps = parse_ops(&sp, target.space(), &m.components, 0)?;
            Some(AInfMorphism::new(algebra.clone(), target, comps)?)
        }
        None => None,
    };
    let homotopy = match &doc.homotopy {
        Some(h) => {
            let target = load(&h.target)?.algebra;
            let f = AInfMorphism::new(algebra.clone(), target.clone(), parse_ops(&sp, target.space(), &h.f, 0)?)?;
            let g = AInfMorphism::new(algebra.clone(), target.clone(), parse_ops(&sp, target.space(), &h.g, 0)?)?;
            let comps = parse_ops(&sp, target.space(), &h.h, -1)?;
            Some(AInfHomotopy::new(f, g, comps)?)
        }
        None => None,
    };
    Ok(Loaded { algebra, convention: doc.convention, signs, elements, morphism, homotopy })
}

fn emit_ops(ops: &[MultiMap]) -> Vec<OpDoc> {
    ops.iter().filter(|m| !m.is_zero()).map(emit_op).collect()
}

fn basis_docs(space: &GradedSpace, shift: i64) -> Vec<BasisDoc> {
    (0..space.dim())
        .map(|i| {
            let d = space.degree(i) + shift;
            let d = if space.mode() == GradingMode::Z2 { d.rem_euclid(2) } else { d };
            BasisDoc { name: space.name(i).to_string(), degree: d }
        })
        .collect()
}

/// Document for an algebra in the A∞ convention.
pub fn emit_algebra(a: &AInfinity, dga_flag: bool) -> AlgebraDocument {
    let sp = a.space();
    AlgebraDocument {
        field: FieldSpec::of(sp.field()),
        grading: sp.mode(),
        convention: Convention::Ainfty,
        dga: dga_flag,
        basis: basis_docs(sp, 0),
        ops: emit_ops(a.ops()),
        elements: Vec::new(),
        morphism: None,
        homotopy: None,
    }
}

/// Canonical document for a loaded value; round-trips through [`load`].
pub fn emit(l: &Loaded) -> AlgebraDocument {
    let a = &l.algebra;
    let sp = a.space();
    let mut doc = match (&l.convention, &l.signs) {
        (Convention::Dga, Some((r1, r2))) => {
            let classical =
                Arc::new(GradedSpace::new(sp.field(), sp.mode(), basis_docs(sp, 1).into_iter().map(|b| (b.name, b.degree)).collect()).expect("same names"));
            let mut ops = Vec::new();
            for (m, r) in [(&a.ops()[0], r1), (&a.ops()[1], r2)] {
                let c = unapply_rule(&classical, m, r);
                if !c.is_zero() {
                    ops.push(emit_op(&c));
                }
            }
            AlgebraDocument {
                field: FieldSpec::of(sp.field()),
                grading: sp.mode(),
                convention: Convention::Dga,
                dga: false,
                basis: basis_docs(sp, 1),
                ops,
                elements: Vec::new(),
                morphism: None,
                homotopy: None,
            }
        }
        _ => emit_algebra(a, a.declared_dga()),
    };
    doc.elements =
        l.elements.iter().map(|(n, e)| NamedElementDoc { name: n.clone(), value: emit_terms(sp, e) }).collect();
    doc.morphism = l.morphism.as_ref().map(|f| MorphismDoc {
        target: Box::new(emit_algebra(f.target(), f.target().declared_dga())),
        components: emit_ops(f.comps()),
    });
    doc.homotopy = l.homotopy.as_ref().map(|h| HomotopyDoc {
        target: Box::new(emit_algebra(h.from_f().target(), h.from_f().target().declared_dga())),
        f: emit_ops(h.from_f().comps()),
        g: emit_ops(h.to_g().comps()),
        h: emit_ops(h.comps()),
    });
    doc
}
