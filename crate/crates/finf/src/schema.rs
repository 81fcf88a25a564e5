//! JSON formats: the algebra input schema and every document the CLI emits.
//!
//! Coefficients are always strings "p" or "p/q", so values survive a
//! round trip exactly. Basis references may be names or integer indices;
//! output always uses names.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebras::{AlgebraSpec, Report, SparseTensor, SpecError};
use crate::exactq::Rational;
use crate::graded::{CoordinateRing, Derivation, GradedBasis, Monomial, TruncatedSeries};
use crate::master::GElement;
use crate::splitting::{CohomologyBasis, CohomologyClass};
use crate::tangent::{FInfinityBundle, MultiTensor, Provenance, TangentTensor};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Spec(#[from] SpecError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError::Field { field: field.into(), message: message.into() }
}

impl From<serde_json::Error> for SchemaError {
    fn from(e: serde_json::Error) -> Self {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; keep only the message part
        let message = match msg.rfind(" at line ") {
            Some(k) => msg[..k].to_string(),
            None => msg,
        };
        SchemaError::Syntax { line: e.line(), column: e.column(), message }
    }
}

/// A reference to a basis element, by name or by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub out: BasisRef,
    #[serde(rename = "in")]
    pub inputs: Vec<BasisRef>,
    pub coeff: String,
}

/// The algebra input document, as written on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<TensorEntry>,
    #[serde(default)]
    pub bracket: Vec<TensorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dot: Option<Vec<TensorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bv: Option<Vec<TensorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<BasisRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

fn resolve(basis: &GradedBasis, r: &BasisRef, field: &str) -> Result<usize, SchemaError> {
    match r {
        BasisRef::Index(i) if *i < basis.dim() => Ok(*i),
        BasisRef::Index(i) => Err(field_err(field, format!("index {i} out of range (dimension {})", basis.dim()))),
        BasisRef::Name(n) => basis.index_of(n).ok_or_else(|| field_err(field, format!("unknown basis element {n:?}"))),
    }
}

/// Parse "p" or "p/q"; decimals and exponents are rejected.
pub fn parse_coeff(s: &str, field: &str) -> Result<Rational, SchemaError> {
    s.parse::<Rational>().map_err(|e| field_err(field, e.to_string()))
}

fn tensor_from_entries(
    basis: &GradedBasis,
    entries: &[TensorEntry],
    label: &str,
    arity: usize,
) -> Result<SparseTensor, SchemaError> {
    let mut t = SparseTensor::new(arity);
    let mut seen = BTreeSet::new();
    for (k, e) in entries.iter().enumerate() {
        let at = format!("{label}[{k}]");
        if e.inputs.len() != arity {
            return Err(field_err(format!("{at}.in"), format!("expected {arity} inputs, found {}", e.inputs.len())));
        }
        let out = resolve(basis, &e.out, &format!("{at}.out"))?;
        let ins = e
            .inputs
            .iter()
            .enumerate()
            .map(|(j, r)| resolve(basis, r, &format!("{at}.in[{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let c = parse_coeff(&e.coeff, &format!("{at}.coeff"))?;
        if !seen.insert((out, ins.clone())) {
            return Err(field_err(at, "duplicate entry for the same output and inputs"));
        }
        t.add(out, &ins, c);
    }
    Ok(t)
}

impl AlgebraDoc {
    pub fn to_spec(&self) -> Result<AlgebraSpec, SchemaError> {
        let elements = self.basis.iter().map(|b| (b.name.clone(), b.degree)).collect();
        let basis = GradedBasis::new(elements).map_err(|e| field_err("basis", e.to_string()))?;
        let d = tensor_from_entries(&basis, &self.differential, "differential", 1)?;
        let b = tensor_from_entries(&basis, &self.bracket, "bracket", 2)?;
        let dot = self.dot.as_ref().map(|e| tensor_from_entries(&basis, e, "dot", 2)).transpose()?;
        let bv = self.bv.as_ref().map(|e| tensor_from_entries(&basis, e, "bv", 1)).transpose()?;
        let unit = self.unit.as_ref().map(|u| resolve(&basis, u, "unit")).transpose()?;
        Ok(AlgebraSpec::new(basis, d, b, dot, unit, bv, self.tags.clone())?)
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Self {
        let names = &spec.basis.names;
        let entries = |t: &SparseTensor| -> Vec<TensorEntry> {
            t.entries()
                .into_iter()
                .map(|(o, ins, c)| TensorEntry {
                    out: BasisRef::Name(names[o].clone()),
                    inputs: ins.iter().map(|&i| BasisRef::Name(names[i].clone())).collect(),
                    coeff: c.to_string(),
                })
                .collect()
        };
        AlgebraDoc {
            basis: names
                .iter()
                .zip(&spec.basis.degrees)
                .map(|(n, &d)| BasisEntry { name: n.clone(), degree: d })
                .collect(),
            differential: entries(&spec.differential),
            bracket: entries(&spec.bracket),
            dot: spec.dot.as_ref().map(entries),
            bv: spec.bv.as_ref().map(entries),
            unit: spec.unit.map(|u| BasisRef::Name(names[u].clone())),
            tags: spec.tags.clone(),
        }
    }
}

/// Parse an algebra from JSON text.
pub fn parse_spec(text: &str) -> Result<AlgebraSpec, SchemaError> {
    let doc: AlgebraDoc = serde_json::from_str(text)?;
    doc.to_spec()
}

/// Serialize an algebra in the input schema (pretty-printed, names only).
pub fn spec_to_json(spec: &AlgebraSpec) -> String {
    to_json(&AlgebraDoc::from_spec(spec))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, SchemaError> {
    Ok(serde_json::from_str(text)?)
}

/// One term c·t^e of a series; `exponents` has one entry per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub exponents: Vec<u8>,
    pub coeff: Rational,
}

/// A series attached to a named slot (a basis element, a coordinate, …).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub name: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinateDoc {
    pub name: String,
    /// Degree of the dual cohomology class.
    pub degree: i64,
}

pub fn series_doc(s: &TruncatedSeries) -> Vec<TermDoc> {
    s.terms().map(|(m, c)| TermDoc { exponents: m.exponents().to_vec(), coeff: c.clone() }).collect()
}

pub fn series_from_doc(ring: &Arc<CoordinateRing>, terms: &[TermDoc], field: &str) -> Result<TruncatedSeries, SchemaError> {
    let mut seen = BTreeSet::new();
    let mut out = TruncatedSeries::zero(ring);
    for (k, t) in terms.iter().enumerate() {
        let at = format!("{field}[{k}]");
        if t.exponents.len() != ring.nvars() {
            return Err(field_err(at, format!("{} exponents for {} coordinates", t.exponents.len(), ring.nvars())));
        }
        let m = Monomial::from_exponents(&t.exponents);
        if m.degree() > ring.truncation {
            return Err(field_err(at, format!("degree {} exceeds the truncation {}", m.degree(), ring.truncation)));
        }
        if (0..ring.nvars()).any(|i| ring.odd[i] && m.exp(i) > 1) {
            return Err(field_err(at, "odd coordinate with exponent above 1"));
        }
        if t.coeff.is_zero() {
            return Err(field_err(at, "zero coefficient"));
        }
        if !seen.insert(t.exponents.clone()) {
            return Err(field_err(at, "repeated monomial"));
        }
        out.add_term(m, t.coeff.clone());
    }
    Ok(out)
}

fn components_doc<'a>(names: &[String], series: impl Iterator<Item = &'a TruncatedSeries>) -> Vec<ComponentDoc> {
    names.iter().zip(series).map(|(n, s)| ComponentDoc { name: n.clone(), terms: series_doc(s) }).collect()
}

fn components_from_doc(
    ring: &Arc<CoordinateRing>,
    names: &[String],
    docs: &[ComponentDoc],
    field: &str,
) -> Result<Vec<TruncatedSeries>, SchemaError> {
    if docs.len() != names.len() {
        return Err(field_err(field, format!("expected {} components, found {}", names.len(), docs.len())));
    }
    docs.iter()
        .zip(names)
        .enumerate()
        .map(|(k, (d, n))| {
            if &d.name != n {
                return Err(field_err(format!("{field}[{k}].name"), format!("expected {n:?}, found {:?}", d.name)));
            }
            series_from_doc(ring, &d.terms, &format!("{field}[{k}].terms"))
        })
        .collect()
}

pub fn derivation_doc(x: &Derivation) -> Vec<ComponentDoc> {
    components_doc(&x.ring().names, x.coeffs().iter())
}

pub fn derivation_from_doc(ring: &Arc<CoordinateRing>, docs: &[ComponentDoc], field: &str) -> Result<Derivation, SchemaError> {
    Ok(Derivation::from_coeffs(ring, components_from_doc(ring, &ring.names, docs, field)?))
}

pub fn gelement_doc(basis: &GradedBasis, g: &GElement) -> Vec<ComponentDoc> {
    components_doc(&basis.names, g.components().iter())
}

pub fn gelement_from_doc(
    ring: &Arc<CoordinateRing>,
    basis: &GradedBasis,
    docs: &[ComponentDoc],
    field: &str,
) -> Result<GElement, SchemaError> {
    Ok(GElement::from_components(ring, components_from_doc(ring, &basis.names, docs, field)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub name: String,
    pub degree: i64,
    pub representative: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohomologyDoc {
    pub classes: Vec<ClassDoc>,
    pub unit_class: Option<usize>,
    pub dims_by_degree: BTreeMap<i64, usize>,
}

impl CohomologyDoc {
    pub fn from_basis(h: &CohomologyBasis) -> Self {
        CohomologyDoc {
            classes: h
                .classes
                .iter()
                .map(|c| ClassDoc { name: c.name.clone(), degree: c.degree, representative: c.representative.clone() })
                .collect(),
            unit_class: h.unit_class,
            dims_by_degree: h.dims_by_degree(),
        }
    }

    pub fn to_basis(&self) -> Result<CohomologyBasis, SchemaError> {
        let b = CohomologyBasis {
            classes: self
                .classes
                .iter()
                .map(|c| CohomologyClass { name: c.name.clone(), degree: c.degree, representative: c.representative.clone() })
                .collect(),
            unit_class: self.unit_class,
        };
        if let Some(u) = b.unit_class {
            if u >= b.dim() {
                return Err(field_err("unit_class", format!("index {u} out of range")));
            }
        }
        if b.dims_by_degree() != self.dims_by_degree {
            return Err(field_err("dims_by_degree", "inconsistent with the class list"));
        }
        Ok(b)
    }
}

/// Output of `solve`: Γ per basis element and ∂ per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDoc {
    pub spec_digest: String,
    pub truncation: usize,
    pub cohomology: CohomologyDoc,
    pub gamma: Vec<ComponentDoc>,
    pub chen: Vec<ComponentDoc>,
    pub residual_zero: bool,
    pub chen_square_zero: bool,
    /// The scalar λ with [E, ∂] = λ∂, if ∂ is an eigenvector.
    pub euler_eigenvalue: Option<Rational>,
}

/// Output of `transfer`: the minimal L∞ operations on H.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferDoc {
    pub spec_digest: String,
    pub truncation: usize,
    pub classes: Vec<CoordinateDoc>,
    pub operations: Vec<OperationDoc>,
    pub lowest_nonzero_arity: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub arity: usize,
    pub entries: Vec<TensorEntry>,
}

pub fn operation_doc(names: &[String], t: &SparseTensor) -> OperationDoc {
    OperationDoc {
        arity: t.arity,
        entries: t
            .entries()
            .into_iter()
            .map(|(o, ins, c)| TensorEntry {
                out: BasisRef::Name(names[o].clone()),
                inputs: ins.iter().map(|&i| BasisRef::Name(names[i].clone())).collect(),
                coeff: c.to_string(),
            })
            .collect(),
    }
}

pub fn operation_from_doc(basis: &GradedBasis, op: &OperationDoc, field: &str) -> Result<SparseTensor, SchemaError> {
    tensor_from_entries(basis, &op.entries, field, op.arity)
}

/// One product μₙ: for each input tuple of coordinate fields, the output field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub arity: usize,
    pub odd: bool,
    pub entries: Vec<ProductEntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntryDoc {
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub field: Vec<ComponentDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDoc {
    pub spec_digest: String,
    pub truncation: usize,
    pub arity_cap: usize,
}

/// Output of `tangent` and `finf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub provenance: ProvenanceDoc,
    pub cohomology: CohomologyDoc,
    /// Ring truncation; may exceed the provenance truncation by one.
    pub ring_truncation: usize,
    pub chen: Vec<ComponentDoc>,
    pub euler: Vec<ComponentDoc>,
    pub unit: Option<String>,
    pub commutative: bool,
    pub products: Vec<ProductDoc>,
}

pub fn product_doc(names: &[String], mu: &TangentTensor) -> ProductDoc {
    ProductDoc {
        arity: mu.arity(),
        odd: mu.is_odd(),
        entries: mu
            .entries()
            .map(|(t, x)| ProductEntryDoc { inputs: t.iter().map(|&i| names[i].clone()).collect(), field: derivation_doc(x) })
            .collect(),
    }
}

pub fn product_from_doc(ring: &Arc<CoordinateRing>, doc: &ProductDoc, field: &str) -> Result<TangentTensor, SchemaError> {
    let mut mu = MultiTensor::new(doc.arity, doc.odd, Derivation::zero(ring));
    let mut seen = BTreeSet::new();
    for (k, e) in doc.entries.iter().enumerate() {
        let at = format!("{field}.entries[{k}]");
        if e.inputs.len() != doc.arity {
            return Err(field_err(format!("{at}.in"), format!("expected {} inputs", doc.arity)));
        }
        let tuple = e
            .inputs
            .iter()
            .map(|n| ring.names.iter().position(|m| m == n).ok_or_else(|| field_err(format!("{at}.in"), format!("unknown coordinate {n:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.insert(tuple.clone()) {
            return Err(field_err(at, "repeated input tuple"));
        }
        let x = derivation_from_doc(ring, &e.field, &format!("{at}.field"))?;
        if x.is_zero() {
            return Err(field_err(at, "zero entry"));
        }
        mu.set(tuple, x);
    }
    Ok(mu)
}

impl BundleDoc {
    pub fn from_bundle(b: &FInfinityBundle) -> Self {
        let names = &b.ring.names;
        BundleDoc {
            provenance: ProvenanceDoc {
                spec_digest: b.provenance.spec_digest.clone(),
                truncation: b.provenance.truncation,
                arity_cap: b.provenance.arity_cap,
            },
            cohomology: CohomologyDoc::from_basis(&b.cohomology),
            ring_truncation: b.ring.truncation,
            chen: derivation_doc(&b.chen),
            euler: derivation_doc(&b.euler),
            unit: b.cohomology.unit_class.map(|u| names[u].clone()),
            commutative: b.commutative,
            products: b.products.iter().map(|mu| product_doc(names, mu)).collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<FInfinityBundle, SchemaError> {
        let cohomology = self.cohomology.to_basis()?;
        let ring = cohomology.coordinate_ring(self.ring_truncation.max(1));
        let chen = derivation_from_doc(&ring, &self.chen, "chen")?;
        let euler = derivation_from_doc(&ring, &self.euler, "euler")?;
        let unit_idx = match &self.unit {
            Some(n) => Some(ring.names.iter().position(|m| m == n).ok_or_else(|| field_err("unit", format!("unknown coordinate {n:?}")))?),
            None => None,
        };
        if unit_idx != cohomology.unit_class {
            return Err(field_err("unit", "disagrees with cohomology.unit_class"));
        }
        let products = self
            .products
            .iter()
            .enumerate()
            .map(|(k, p)| {
                if p.arity != k + 2 {
                    return Err(field_err(format!("products[{k}].arity"), format!("expected {}", k + 2)));
                }
                product_from_doc(&ring, p, &format!("products[{k}]"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FInfinityBundle {
            unit_field: unit_idx.map(|u| Derivation::coordinate(&ring, u)),
            cohomology,
            chen,
            euler,
            ring,
            products,
            commutative: self.commutative,
            provenance: Provenance {
                spec_digest: self.provenance.spec_digest.clone(),
                truncation: self.provenance.truncation,
                arity_cap: self.provenance.arity_cap,
            },
        })
    }
}

/// Output of `validate`: one report per validator that ran.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateDoc {
    pub spec_digest: String,
    pub reports: BTreeMap<String, Report>,
    pub valid: bool,
}

/// Output of `gauge-check`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeDoc {
    pub spec_digest: String,
    pub truncation: usize,
    pub trials: Vec<GaugeTrialDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeTrialDoc {
    pub seed: u64,
    pub master_holds: bool,
    pub mu2_identical: bool,
    pub difference_closed: bool,
}

/// Output of `tangent` and `finf`, with the validation verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinfDoc {
    pub bundle: BundleDoc,
    pub report: Report,
    pub lambda: Option<Rational>,
    pub valid: bool,
}
