//! The shared JSON instance format: weighted spaces, subspaces, and maps
//! with ids, plus codecs for exact scalars. Rationals travel as
//! `[numerator, denominator]` integer pairs (strings when they outgrow 64
//! bits); complex scalars as a pair of such rationals `[re, im]`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::isometry::{CompositionForm, LinearMap};
use crate::scalar::{Field, Q, Scalar, CQ};
use crate::space::{FunctionVec, Subspace, WeightedSpace};

/// Generation bounds. Desk scale: small enough that every exact decision is
/// instant, large enough to exercise the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub max_points: usize,
    pub max_dim: usize,
    pub coefficient_height: i64,
}

impl Default for Scale {
    fn default() -> Scale {
        Scale {
            max_points: 8,
            max_dim: 4,
            coefficient_height: 8,
        }
    }
}

impl Scale {
    pub fn validate(&self) -> Result<()> {
        if self.max_points < 1 || self.max_points > 8 {
            return Err(Error::ScaleOutOfBounds(format!(
                "max_points {} outside 1..=8",
                self.max_points
            )));
        }
        if self.max_dim < 1 || self.max_dim > 4 {
            return Err(Error::ScaleOutOfBounds(format!(
                "max_dim {} outside 1..=4",
                self.max_dim
            )));
        }
        if self.coefficient_height < 1 || self.coefficient_height > 8 {
            return Err(Error::ScaleOutOfBounds(format!(
                "coefficient_height {} outside 1..=8",
                self.coefficient_height
            )));
        }
        Ok(())
    }
}

/// A typed instance: named spaces, subspaces, and maps over one field.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    pub spaces: Vec<(String, Arc<WeightedSpace<S>>)>,
    pub subspaces: Vec<(String, Subspace<S>)>,
    pub maps: Vec<(String, LinearMap<S>)>,
    pub seed: u64,
    pub scale: Scale,
}

impl<S: Scalar> Instance<S> {
    pub fn space(&self, id: &str) -> Result<&Arc<WeightedSpace<S>>> {
        self.spaces
            .iter()
            .find(|(i, _)| i == id)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn subspace(&self, id: &str) -> Result<&Subspace<S>> {
        self.subspaces
            .iter()
            .find(|(i, _)| i == id)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn map(&self, id: &str) -> Result<&LinearMap<S>> {
        self.maps
            .iter()
            .find(|(i, _)| i == id)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }
}

/// An instance over either field, as read from JSON.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Real(Instance<Q>),
    Complex(Instance<CQ>),
}

impl AnyInstance {
    pub fn field(&self) -> Field {
        match self {
            AnyInstance::Real(_) => Field::Real,
            AnyInstance::Complex(_) => Field::Complex,
        }
    }
}

// ---------------------------------------------------------------------------
// scalar codecs

fn bigint_to_value(n: &BigInt) -> Value {
    match i64::try_from(n.clone()) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn bigint_from_value(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::InvalidInstance(format!(
                    "non-integer number {n}; exact scalars only"
                )))
            }
        }
        Value::String(s) => {
            BigInt::from_str(s).map_err(|_| Error::InvalidInstance(format!("bad integer `{s}`")))
        }
        other => Err(Error::InvalidInstance(format!("expected integer, got {other}"))),
    }
}

pub fn q_to_value(q: &Q) -> Value {
    Value::Array(vec![bigint_to_value(q.numer()), bigint_to_value(q.denom())])
}

pub fn q_from_value(v: &Value) -> Result<Q> {
    match v {
        Value::Array(parts) => {
            if parts.len() != 2 {
                return Err(Error::InvalidInstance(format!(
                    "rational must be [num, den], got {v}"
                )));
            }
            let num = bigint_from_value(&parts[0])?;
            let den = bigint_from_value(&parts[1])?;
            if den.is_zero() {
                return Err(Error::InvalidInstance("zero denominator".into()));
            }
            Ok(Q::new(num, den))
        }
        _ => Ok(Q::from_integer(bigint_from_value(v)?)),
    }
}

/// Field-scoped scalar decode: real scalars are rationals; complex scalars
/// are `[re, im]` pairs of rationals.
pub fn scalar_from_value<S: Scalar>(v: &Value) -> Result<S> {
    match S::FIELD {
        Field::Real => Ok(S::from_q(q_from_value(v)?)),
        Field::Complex => {
            let parts = v.as_array().ok_or_else(|| {
                Error::InvalidInstance(format!("complex scalar must be [re, im], got {v}"))
            })?;
            if parts.len() != 2 {
                return Err(Error::InvalidInstance(format!(
                    "complex scalar must be [re, im], got {v}"
                )));
            }
            let re = q_from_value(&parts[0])?;
            let im = q_from_value(&parts[1])?;
            S::from_parts(re, im)
                .ok_or_else(|| Error::InvalidInstance("unrepresentable scalar".into()))
        }
    }
}

pub fn scalar_to_value<S: Scalar>(s: &S) -> Value {
    match S::FIELD {
        Field::Real => q_to_value(&s.re()),
        Field::Complex => Value::Array(vec![q_to_value(&s.re()), q_to_value(&s.im())]),
    }
}

pub fn scalars_to_value<S: Scalar>(row: &[S]) -> Value {
    Value::Array(row.iter().map(scalar_to_value).collect())
}

pub fn scalars_from_value<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInstance(format!("expected array of scalars, got {v}")))?
        .iter()
        .map(scalar_from_value)
        .collect()
}

// ---------------------------------------------------------------------------
// instance codec

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSpace {
    id: String,
    points: Vec<String>,
    weight: Map<String, Value>,
    field: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSubspace {
    id: String,
    space: String,
    basis: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMap {
    id: String,
    domain: String,
    codomain: String,
    matrix: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawInstance {
    #[serde(default)]
    spaces: Vec<RawSpace>,
    #[serde(default)]
    subspaces: Vec<RawSubspace>,
    #[serde(default)]
    maps: Vec<RawMap>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    scale: Option<Scale>,
}

fn build_typed<S: Scalar>(raw: &RawInstance) -> Result<Instance<S>> {
    let mut spaces: Vec<(String, Arc<WeightedSpace<S>>)> = Vec::new();
    for rs in &raw.spaces {
        if spaces.iter().any(|(id, _)| id == &rs.id) {
            return Err(Error::DuplicateId(rs.id.clone()));
        }
        let mut weights = Vec::with_capacity(rs.points.len());
        for p in &rs.points {
            let wv = rs.weight.get(p).ok_or_else(|| {
                Error::InvalidInstance(format!("space `{}` missing weight for `{p}`", rs.id))
            })?;
            weights.push(scalar_from_value::<S>(wv)?);
        }
        spaces.push((rs.id.clone(), WeightedSpace::new(rs.points.clone(), weights)?));
    }
    let mut subspaces: Vec<(String, Subspace<S>)> = Vec::new();
    for rb in &raw.subspaces {
        if subspaces.iter().any(|(id, _)| id == &rb.id) {
            return Err(Error::DuplicateId(rb.id.clone()));
        }
        let space = spaces
            .iter()
            .find(|(id, _)| id == &rb.space)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::UnknownId(rb.space.clone()))?;
        let basis = rb
            .basis
            .iter()
            .map(|row| Ok(FunctionVec::new(&space, scalars_from_value(row)?)?))
            .collect::<Result<Vec<_>>>()?;
        subspaces.push((rb.id.clone(), Subspace::new(space, basis)?));
    }
    let mut maps: Vec<(String, LinearMap<S>)> = Vec::new();
    for rm in &raw.maps {
        if maps.iter().any(|(id, _)| id == &rm.id) {
            return Err(Error::DuplicateId(rm.id.clone()));
        }
        let domain = subspaces
            .iter()
            .find(|(id, _)| id == &rm.domain)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::UnknownId(rm.domain.clone()))?;
        let codomain = subspaces
            .iter()
            .find(|(id, _)| id == &rm.codomain)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::UnknownId(rm.codomain.clone()))?;
        let matrix = rm
            .matrix
            .iter()
            .map(scalars_from_value)
            .collect::<Result<Vec<_>>>()?;
        maps.push((rm.id.clone(), LinearMap::new(domain, codomain, matrix)?));
    }
    Ok(Instance {
        spaces,
        subspaces,
        maps,
        seed: raw.seed,
        scale: raw.scale.unwrap_or_default(),
    })
}

pub fn parse_instance(text: &str) -> Result<AnyInstance> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let mut field: Option<&str> = None;
    for rs in &raw.spaces {
        match (field, rs.field.as_str()) {
            (None, f @ ("real" | "complex")) => field = Some(f),
            (Some(cur), f) if cur == f => {}
            (Some(cur), f) => {
                return Err(Error::FieldMismatch(format!(
                    "space `{}` is {f} but the instance is {cur}",
                    rs.id
                )))
            }
            (None, other) => {
                return Err(Error::InvalidInstance(format!(
                    "space `{}` has unknown field `{other}`",
                    rs.id
                )))
            }
        }
    }
    match field.unwrap_or("real") {
        "real" => Ok(AnyInstance::Real(build_typed(&raw)?)),
        _ => Ok(AnyInstance::Complex(build_typed(&raw)?)),
    }
}

fn typed_to_raw<S: Scalar>(inst: &Instance<S>) -> RawInstance {
    let field = match S::FIELD {
        Field::Real => "real",
        Field::Complex => "complex",
    };
    RawInstance {
        spaces: inst
            .spaces
            .iter()
            .map(|(id, s)| RawSpace {
                id: id.clone(),
                points: s.points().to_vec(),
                weight: s
                    .points()
                    .iter()
                    .zip(s.weights().iter())
                    .map(|(p, w)| (p.clone(), scalar_to_value(w)))
                    .collect(),
                field: field.to_string(),
            })
            .collect(),
        subspaces: inst
            .subspaces
            .iter()
            .map(|(id, a)| RawSubspace {
                id: id.clone(),
                space: inst
                    .spaces
                    .iter()
                    .find(|(_, s)| Arc::ptr_eq(s, a.ambient()) || s == a.ambient())
                    .map(|(i, _)| i.clone())
                    .unwrap_or_default(),
                basis: a.basis().iter().map(|b| scalars_to_value(b.values())).collect(),
            })
            .collect(),
        maps: inst
            .maps
            .iter()
            .map(|(id, t)| RawMap {
                id: id.clone(),
                domain: inst
                    .subspaces
                    .iter()
                    .find(|(_, a)| a == t.domain())
                    .map(|(i, _)| i.clone())
                    .unwrap_or_default(),
                codomain: inst
                    .subspaces
                    .iter()
                    .find(|(_, a)| a == t.codomain())
                    .map(|(i, _)| i.clone())
                    .unwrap_or_default(),
                matrix: t.matrix().iter().map(|row| scalars_to_value(row)).collect(),
            })
            .collect(),
        seed: inst.seed,
        scale: Some(inst.scale),
    }
}

pub fn instance_to_value(inst: &AnyInstance) -> Value {
    let raw = match inst {
        AnyInstance::Real(i) => typed_to_raw(i),
        AnyInstance::Complex(i) => typed_to_raw(i),
    };
    serde_json::to_value(raw).expect("instance serialization")
}

/// JSON for a typed instance of either field.
pub fn typed_to_value<S: Scalar>(inst: &Instance<S>) -> Value {
    serde_json::to_value(typed_to_raw(inst)).expect("instance serialization")
}

pub fn instance_to_string(inst: &AnyInstance) -> String {
    serde_json::to_string_pretty(&instance_to_value(inst)).expect("instance serialization")
}

// ---------------------------------------------------------------------------
// auxiliary payloads

/// `{"on": [...], "phi": {...}, "tau": {...}}` against the map's point names.
pub fn form_to_value<S: Scalar>(t: &LinearMap<S>, form: &CompositionForm<S>) -> Value {
    let codomain = t.codomain().ambient();
    let domain = t.domain().ambient();
    let on: Vec<Value> = form
        .defined_on()
        .iter()
        .map(|&x| json!(codomain.name_of(x)))
        .collect();
    let mut phi = Map::new();
    let mut tau = Map::new();
    for (x, p, tp) in form.iter() {
        phi.insert(codomain.name_of(x).to_string(), scalar_to_value(p));
        tau.insert(codomain.name_of(x).to_string(), json!(domain.name_of(tp)));
    }
    json!({"on": on, "phi": phi, "tau": tau})
}

pub fn form_from_value<S: Scalar>(
    domain: &Subspace<S>,
    codomain: &Subspace<S>,
    v: &Value,
) -> Result<CompositionForm<S>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidInstance("form must be an object".into()))?;
    let on = obj
        .get("on")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInstance("form needs an `on` array".into()))?;
    let phi = obj
        .get("phi")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInstance("form needs a `phi` object".into()))?;
    let tau = obj
        .get("tau")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInstance("form needs a `tau` object".into()))?;
    let mut entries = std::collections::BTreeMap::new();
    for xv in on {
        let name = xv
            .as_str()
            .ok_or_else(|| Error::InvalidInstance("point names must be strings".into()))?;
        let x = codomain.ambient().index_of(name)?;
        let pv = phi
            .get(name)
            .ok_or_else(|| Error::InvalidInstance(format!("phi missing `{name}`")))?;
        let tv = tau
            .get(name)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInstance(format!("tau missing `{name}`")))?;
        entries.insert(x, (scalar_from_value::<S>(pv)?, domain.ambient().index_of(tv)?));
    }
    CompositionForm::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, q, qz};

    #[test]
    fn scalar_codec_roundtrip() {
        for value in [qz(3), q(-7, 2), qz(0)] {
            let v = q_to_value(&value);
            assert_eq!(q_from_value(&v).unwrap(), value);
        }
        // shorthand integer
        assert_eq!(q_from_value(&json!(5)).unwrap(), qz(5));
        // big integers go through strings
        let big = Q::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from(1),
        );
        let v = q_to_value(&big);
        assert_eq!(q_from_value(&v).unwrap(), big);
        // floats are rejected
        assert!(q_from_value(&json!(1.5)).is_err());
        assert!(q_from_value(&json!([1, 0])).is_err());

        let c = cq(1, -2);
        let cv = scalar_to_value(&c);
        assert_eq!(scalar_from_value::<crate::scalar::CQ>(&cv).unwrap(), c);
    }

    #[test]
    fn instance_roundtrip() {
        let text = r#"{
            "spaces": [
                {"id": "S0", "points": ["a", "b"], "weight": {"a": [2, 1], "b": 1}, "field": "real"}
            ],
            "subspaces": [
                {"id": "A0", "space": "S0", "basis": [[1, 1], [1, -1]]}
            ],
            "maps": [
                {"id": "T0", "domain": "A0", "codomain": "A0", "matrix": [[1, 0], [0, 1]]}
            ],
            "seed": 7
        }"#;
        let inst = parse_instance(text).unwrap();
        let AnyInstance::Real(real) = &inst else {
            panic!("expected real instance")
        };
        assert_eq!(real.seed, 7);
        assert_eq!(real.space("S0").unwrap().len(), 2);
        assert_eq!(real.subspace("A0").unwrap().dim(), 2);
        assert!(real.map("T0").is_ok());
        assert!(real.map("T1").is_err());

        let text2 = instance_to_string(&inst);
        let again = parse_instance(&text2).unwrap();
        let AnyInstance::Real(real2) = &again else {
            panic!()
        };
        assert_eq!(real2.space("S0").unwrap(), real.space("S0").unwrap());
        assert_eq!(real2.subspace("A0").unwrap(), real.subspace("A0").unwrap());
    }

    #[test]
    fn bad_instances_rejected() {
        // unknown subspace reference
        let bad = r#"{"spaces": [], "subspaces": [{"id": "A", "space": "S9", "basis": [[1]]}]}"#;
        assert!(matches!(parse_instance(bad), Err(Error::UnknownId(_))));
        // zero weight
        let zw = r#"{"spaces": [{"id": "S", "points": ["a"], "weight": {"a": 0}, "field": "real"}]}"#;
        assert!(matches!(parse_instance(zw), Err(Error::ZeroWeight(_))));
        // dependent basis
        let dep = r#"{
            "spaces": [{"id": "S", "points": ["a", "b"], "weight": {"a": 1, "b": 1}, "field": "real"}],
            "subspaces": [{"id": "A", "space": "S", "basis": [[1, 1], [2, 2]]}]
        }"#;
        assert!(matches!(parse_instance(dep), Err(Error::DependentBasis)));
        // mixed fields
        let mixed = r#"{"spaces": [
            {"id": "S0", "points": ["a"], "weight": {"a": 1}, "field": "real"},
            {"id": "S1", "points": ["b"], "weight": {"b": [[1,1],[0,1]]}, "field": "complex"}
        ]}"#;
        assert!(matches!(parse_instance(mixed), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn complex_instance_parses() {
        let text = r#"{
            "spaces": [
                {"id": "S0", "points": ["a"], "weight": {"a": [[1,1],[0,1]]}, "field": "complex"}
            ],
            "subspaces": [{"id": "A0", "space": "S0", "basis": [[[1, 1]]]}]
        }"#;
        let inst = parse_instance(text).unwrap();
        let AnyInstance::Complex(c) = &inst else {
            panic!("expected complex")
        };
        // basis entry [1, 1] = 1 + i in the complex reading
        assert_eq!(c.subspace("A0").unwrap().basis()[0].values()[0], cq(1, 1));
    }

    #[test]
    fn form_codec_roundtrip() {
        let sp = WeightedSpace::<Q>::new(vec!["a".into(), "b".into()], vec![qz(1), qz(1)]).unwrap();
        let a = Subspace::full(sp);
        let t = LinearMap::identity(a.clone());
        let form = CompositionForm::new(std::collections::BTreeMap::from([
            (0, (qz(1), 1)),
            (1, (qz(-1), 0)),
        ]))
        .unwrap();
        let v = form_to_value(&t, &form);
        let back = form_from_value(t.domain(), t.codomain(), &v).unwrap();
        assert_eq!(back, form);
    }
}
