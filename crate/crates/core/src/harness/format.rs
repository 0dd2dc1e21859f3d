//! The "perfbr-1" JSON instance format.
//!
//! Scalars are strings "a" or "a/b"; matrices are arrays of rows. Map and
//! homotopy components are keyed by degree, absent degrees are zero.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::arith::{nt, ScalarContext};
use crate::characters::{ActionAssignment, CharacterReport, GroupTable};
use crate::complexes::{ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::generator::GeneratorParams;

pub const FORMAT_TAG: &str = "perfbr-1";

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDocument {
    pub params: Option<GeneratorParams>,
    pub action: ActionAssignment<ScalarContext>,
    pub expected: Option<Vec<CharacterReport>>,
}

impl InstanceDocument {
    pub fn complex(&self) -> &Arc<PerfectComplex<ScalarContext>> {
        &self.action.complex
    }

    pub fn p(&self) -> u64 {
        self.action.complex.ring().p()
    }
}

fn bad(path: &str, reason: impl Into<String>) -> Error {
    Error::Decode { path: path.to_string(), reason: reason.into() }
}

fn encode_matrix(m: &Matrix<BigRational>) -> Value {
    Value::Array(
        m.to_rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

fn encode_components(degrees: impl Iterator<Item = i64>, comp: impl Fn(i64) -> Matrix<BigRational>) -> Value {
    let mut out = Map::new();
    for i in degrees {
        let m = comp(i);
        if m.rows() * m.cols() > 0 {
            out.insert(i.to_string(), encode_matrix(&m));
        }
    }
    json!({ "components": out })
}

fn encode_homotopy(t: &Homotopy<ScalarContext>, l: &PerfectComplex<ScalarContext>) -> Value {
    encode_components(l.lo()..=l.hi() + 1, |i| t.component(i))
}

pub fn encode_value(doc: &InstanceDocument) -> Value {
    let act = &doc.action;
    let l = &act.complex;
    let mut root = Map::new();
    root.insert("format".into(), json!(FORMAT_TAG));
    if let Some(params) = &doc.params {
        root.insert("params".into(), serde_json::to_value(params).expect("params serialize"));
    }
    root.insert(
        "complex".into(),
        json!({
            "p": l.ring().p(),
            "degrees": [l.lo(), l.hi()],
            "ranks": l.ranks(),
            "differentials": l.differentials().iter().map(encode_matrix).collect::<Vec<_>>(),
        }),
    );
    root.insert("group".into(), json!({ "table": act.group.table(), "identity": act.group.identity() }));
    let maps: Vec<Value> = act.maps.iter().map(|m| encode_components(l.degrees(), |i| m.component(i))).collect();
    let coherence: Vec<Value> = act
        .coherence
        .iter()
        .map(|(&(g, h), t)| json!({ "g": g, "h": h, "homotopy": encode_homotopy(t, l) }))
        .collect();
    let mut action = Map::new();
    action.insert("maps".into(), Value::Array(maps));
    action.insert("coherence".into(), Value::Array(coherence));
    action.insert(
        "identity_homotopy".into(),
        act.identity_homotopy.as_ref().map_or(Value::Null, |t| encode_homotopy(t, l)),
    );
    root.insert("action".into(), Value::Object(action));
    if let Some(expected) = &doc.expected {
        root.insert("expected".into(), serde_json::to_value(expected).expect("reports serialize"));
    }
    Value::Object(root)
}

pub fn encode(doc: &InstanceDocument) -> String {
    serde_json::to_string_pretty(&encode_value(doc)).expect("json")
}

struct Decoder {
    ctx: ScalarContext,
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("{path}/{key}"), "missing field"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(path, "expected an integer"))
}

impl Decoder {
    fn scalar(&self, v: &Value, path: &str) -> Result<BigRational> {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(bad(path, "expected a scalar string \"a\" or \"a/b\"")),
        };
        let x = BigRational::from_str(s.trim()).map_err(|_| bad(path, format!("malformed scalar {s:?}")))?;
        if !self.ctx.is_integral(&x) {
            return Err(bad(path, format!("denominator not invertible: {s} under p = {}", self.ctx.p())));
        }
        Ok(x)
    }

    fn matrix(&self, v: &Value, path: &str, rows: usize, cols: usize) -> Result<Matrix<BigRational>> {
        let arr = as_array(v, path)?;
        if rows == 0 && arr.is_empty() {
            return Ok(Matrix::zeros(&self.ctx, 0, cols));
        }
        if arr.len() != rows {
            return Err(bad(path, format!("shape mismatch: expected {rows} rows, found {}", arr.len())));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for (i, row) in arr.iter().enumerate() {
            let rp = format!("{path}/{i}");
            let row = as_array(row, &rp)?;
            if row.len() != cols {
                return Err(bad(&rp, format!("shape mismatch: expected {cols} columns, found {}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                data.push(self.scalar(x, &format!("{rp}/{j}"))?);
            }
        }
        Matrix::new(rows, cols, data)
    }

    fn components(
        &self,
        v: &Value,
        path: &str,
        degrees: std::ops::RangeInclusive<i64>,
        shape: impl Fn(i64) -> (usize, usize),
    ) -> Result<BTreeMap<i64, Matrix<BigRational>>> {
        let cp = format!("{path}/components");
        let comps = field(v, path, "components")?.as_object().ok_or_else(|| bad(&cp, "expected an object"))?;
        let mut out = BTreeMap::new();
        for (key, m) in comps {
            let kp = format!("{cp}/{key}");
            let deg: i64 = key.parse().map_err(|_| bad(&kp, "degree keys must be integers"))?;
            if !degrees.contains(&deg) {
                return Err(bad(&kp, format!("degree {deg} outside {}..={}", degrees.start(), degrees.end())));
            }
            let (r, c) = shape(deg);
            out.insert(deg, self.matrix(m, &kp, r, c)?);
        }
        Ok(out)
    }

    fn homotopy(&self, v: &Value, path: &str, l: &Arc<PerfectComplex<ScalarContext>>) -> Result<Homotopy<ScalarContext>> {
        let comps = self.components(v, path, l.lo()..=l.hi() + 1, |i| (l.rank(i - 1), l.rank(i)))?;
        Homotopy::from_fn(l.clone(), l.clone(), |i| {
            comps.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(&self.ctx, l.rank(i - 1), l.rank(i)))
        })
    }
}

pub fn decode_value(v: &Value) -> Result<InstanceDocument> {
    let tag = field(v, "", "format")?;
    if tag.as_str() != Some(FORMAT_TAG) {
        return Err(bad("/format", format!("unsupported format {tag}, expected {FORMAT_TAG:?}")));
    }
    let params = match v.get("params") {
        None | Some(Value::Null) => None,
        Some(p) => Some(serde_json::from_value(p.clone()).map_err(|e| bad("/params", e.to_string()))?),
    };

    let c = field(v, "", "complex")?;
    let p = as_u64(field(c, "/complex", "p")?, "/complex/p")?;
    if !nt::is_prime(p) {
        return Err(bad("/complex/p", format!("p not prime: {p}")));
    }
    let dec = Decoder { ctx: ScalarContext::new(p)? };
    let degs = as_array(field(c, "/complex", "degrees")?, "/complex/degrees")?;
    if degs.len() != 2 {
        return Err(bad("/complex/degrees", "expected [lo, hi]"));
    }
    let lo = as_i64(&degs[0], "/complex/degrees/0")?;
    let hi = as_i64(&degs[1], "/complex/degrees/1")?;
    if hi < lo {
        return Err(bad("/complex/degrees", "hi < lo"));
    }
    let ranks: Vec<usize> = as_array(field(c, "/complex", "ranks")?, "/complex/ranks")?
        .iter()
        .enumerate()
        .map(|(k, r)| as_u64(r, &format!("/complex/ranks/{k}")).map(|r| r as usize))
        .collect::<Result<_>>()?;
    if ranks.len() as i64 != hi - lo + 1 {
        return Err(bad("/complex/ranks", format!("expected {} ranks for degrees {lo}..={hi}", hi - lo + 1)));
    }
    let dv = as_array(field(c, "/complex", "differentials")?, "/complex/differentials")?;
    if dv.len() + 1 != ranks.len() {
        return Err(bad("/complex/differentials", format!("expected {} differentials", ranks.len() - 1)));
    }
    let diffs: Vec<Matrix<BigRational>> = dv
        .iter()
        .enumerate()
        .map(|(k, m)| dec.matrix(m, &format!("/complex/differentials/{k}"), ranks[k + 1], ranks[k]))
        .collect::<Result<_>>()?;
    for k in 1..diffs.len() {
        if !diffs[k].mul(&dec.ctx, &diffs[k - 1]).is_zero(&dec.ctx) {
            return Err(bad(&format!("/complex/differentials/{k}"), format!("d∘d ≠ 0 at degree {}", lo + k as i64 + 1)));
        }
    }
    let l = Arc::new(PerfectComplex::new(dec.ctx.clone(), lo, ranks, diffs)?);

    let gv = field(v, "", "group")?;
    let table: Vec<Vec<usize>> = serde_json::from_value(field(gv, "/group", "table")?.clone())
        .map_err(|e| bad("/group/table", e.to_string()))?;
    let group = GroupTable::new(table).map_err(|e| bad("/group/table", e.to_string()))?;
    if let Some(id) = gv.get("identity") {
        if as_u64(id, "/group/identity")? as usize != group.identity() {
            return Err(bad("/group/identity", format!("the table's identity is {}", group.identity())));
        }
    }

    let av = field(v, "", "action")?;
    let mv = as_array(field(av, "/action", "maps")?, "/action/maps")?;
    if mv.len() != group.order() {
        return Err(bad("/action/maps", format!("expected {} maps, found {}", group.order(), mv.len())));
    }
    let mut maps = Vec::with_capacity(mv.len());
    for (g, m) in mv.iter().enumerate() {
        let path = format!("/action/maps/{g}");
        let comps = dec.components(m, &path, l.degrees(), |i| (l.rank(i), l.rank(i)))?;
        maps.push(ChainMap::from_fn(l.clone(), l.clone(), |i| {
            comps.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(&dec.ctx, l.rank(i), l.rank(i)))
        })?);
    }
    let mut coherence = BTreeMap::new();
    if let Some(cv) = av.get("coherence") {
        for (k, entry) in as_array(cv, "/action/coherence")?.iter().enumerate() {
            let path = format!("/action/coherence/{k}");
            let g = as_u64(field(entry, &path, "g")?, &format!("{path}/g"))? as usize;
            let h = as_u64(field(entry, &path, "h")?, &format!("{path}/h"))? as usize;
            if g >= group.order() || h >= group.order() {
                return Err(bad(&path, "group element out of range"));
            }
            let t = dec.homotopy(field(entry, &path, "homotopy")?, &format!("{path}/homotopy"), &l)?;
            coherence.insert((g, h), t);
        }
    }
    let identity_homotopy = match av.get("identity_homotopy") {
        None | Some(Value::Null) => None,
        Some(t) => Some(dec.homotopy(t, "/action/identity_homotopy", &l)?),
    };
    let expected = match v.get("expected") {
        None | Some(Value::Null) => None,
        Some(e) => Some(serde_json::from_value(e.clone()).map_err(|err| bad("/expected", err.to_string()))?),
    };
    Ok(InstanceDocument {
        params,
        action: ActionAssignment { group, complex: l, maps, coherence, identity_homotopy },
        expected,
    })
}

pub fn decode(text: &str) -> Result<InstanceDocument> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad("", format!("malformed JSON: {e}")))?;
    decode_value(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(p: u64, entry: &str) -> String {
        format!(
            r#"{{"format":"perfbr-1","complex":{{"p":{p},"degrees":[0,1],"ranks":[1,1],"differentials":[[["{entry}"]]]}},
            "group":{{"table":[[0]],"identity":0}},"action":{{"maps":[{{"components":{{"0":[["1"]],"1":[["1"]]}}}}]}}}}"#
        )
    }

    #[test]
    fn reads_a_hand_written_document() {
        let doc = decode(&tiny(3, "3")).unwrap();
        assert_eq!(doc.complex().ranks(), &[1, 1]);
        assert_eq!(decode(&encode(&doc)).unwrap(), doc);
    }

    #[test]
    fn rejects_with_paths() {
        match decode(&tiny(6, "1")) {
            Err(Error::Decode { path, reason }) => {
                assert_eq!(path, "/complex/p");
                assert!(reason.contains("p not prime"));
            }
            other => panic!("{other:?}"),
        }
        match decode(&tiny(3, "1/3")) {
            Err(Error::Decode { path, reason }) => {
                assert_eq!(path, "/complex/differentials/0/0/0");
                assert!(reason.contains("denominator not invertible"));
            }
            other => panic!("{other:?}"),
        }
        let shape = tiny(3, "1").replace(r#""1":[["1"]]"#, r#""1":[["1","0"]]"#);
        assert!(matches!(decode(&shape), Err(Error::Decode { path, .. }) if path == "/action/maps/0/components/1/0"));
    }

    #[test]
    fn rejects_nonzero_square() {
        let text = r#"{"format":"perfbr-1","complex":{"p":5,"degrees":[0,2],"ranks":[1,1,1],"differentials":[[["1"]],[["2"]]]},
            "group":{"table":[[0]],"identity":0},"action":{"maps":[{"components":{}}]}}"#;
        match decode(text) {
            Err(Error::Decode { path, reason }) => {
                assert_eq!(path, "/complex/differentials/1");
                assert!(reason.contains("d∘d"));
            }
            other => panic!("{other:?}"),
        }
    }
}
