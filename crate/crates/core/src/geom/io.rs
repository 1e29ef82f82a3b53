use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{close_faces, GeoComplex, LocalOrder, Simplex};
use crate::dyadic::{Dyadic, DyadicPoint};
use crate::error::{Error, Result};

/// Serialized complex; fields are declared in key order so output is canonical.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexJson {
    pub dim: usize,
    #[serde(default)]
    pub order: Option<Vec<[usize; 2]>>,
    pub simplices: Vec<Vec<usize>>,
    /// Each coordinate is `[numerator, exponent]`; large numerators are strings.
    pub vertices: Vec<Vec<[Value; 2]>>,
}

fn encode(d: &Dyadic) -> [Value; 2] {
    let num = match d.numerator().to_i64() {
        Some(n) => Value::from(n),
        None => Value::from(d.numerator().to_string()),
    };
    [num, Value::from(d.exponent())]
}

fn decode(v: &[Value; 2], at: &str) -> Result<Dyadic> {
    let bad = |m: &str| Error::Parse { location: at.to_string(), message: m.to_string() };
    let num: BigInt = match &v[0] {
        Value::Number(n) => BigInt::from(n.as_i64().ok_or_else(|| bad("numerator must be an integer"))?),
        Value::String(s) => s.parse().map_err(|_| bad("numerator string is not an integer"))?,
        _ => return Err(bad("numerator must be an integer or a decimal string")),
    };
    let exp = v[1].as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| bad("exponent must be a small non-negative integer"))?;
    Ok(Dyadic::new(num, exp))
}

impl GeoComplex {
    pub fn to_json_value(&self) -> ComplexJson {
        let mut order: Vec<[usize; 2]> = self.order_pairs().into_iter().map(|(a, b)| [a, b]).collect();
        order.sort_unstable();
        ComplexJson {
            dim: self.ambient_dim,
            order: Some(order),
            simplices: self.simplices.iter().map(|s| s.vertex_ids().to_vec()).collect(),
            vertices: self.vertices.iter().map(|p| p.coords().iter().map(encode).collect()).collect(),
        }
    }

    /// Canonical JSON text; identical complexes give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_json_value()).expect("complex serializes");
        s.push('\n');
        s
    }

    pub fn from_json_value(j: &ComplexJson) -> Result<GeoComplex> {
        let mut vertices = Vec::with_capacity(j.vertices.len());
        for (i, v) in j.vertices.iter().enumerate() {
            let coords = v
                .iter()
                .enumerate()
                .map(|(k, c)| decode(c, &format!("vertices[{i}][{k}]")))
                .collect::<Result<Vec<_>>>()?;
            vertices.push(DyadicPoint::new(coords));
        }
        // The listed simplices generate the complex; missing faces are added.
        let simplices = close_faces(j.simplices.iter().map(|s| Simplex::new(s.clone())));
        let order = match &j.order {
            None => LocalOrder::Numeric,
            Some(p) => LocalOrder::Pairs(p.iter().map(|[a, b]| (*a, *b)).collect()),
        };
        let c = GeoComplex::new(j.dim, vertices, simplices, order)?;
        // An increasing pair list that is total on simplices is the numeric order.
        if let LocalOrder::Pairs(p) = &c.order {
            if p.iter().all(|(a, b)| a < b) && c.check_local_order().is_ok() {
                return GeoComplex::new(c.ambient_dim, c.vertices, c.simplices, LocalOrder::Numeric);
            }
        }
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<GeoComplex> {
        let j: ComplexJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        GeoComplex::from_json_value(&j)
    }
}

pub fn read_complex_json(text: &str) -> Result<GeoComplex> {
    GeoComplex::from_json(text)
}

/// OFF mesh text. Coordinates are exact decimals padded to three dimensions;
/// faces are the triangles, or the edges when the complex is one-dimensional.
pub fn to_off(c: &GeoComplex) -> Result<String> {
    if c.ambient_dim() > 3 {
        return Err(Error::OffDimension(c.ambient_dim()));
    }
    let face_dim = if c.dim() == Some(1) { 1 } else { 2 };
    let faces: Vec<&Simplex> = c.simplices_of_dim(face_dim).collect();
    let edges = c.simplices_of_dim(1).count();
    let mut out = String::from("OFF\n");
    writeln!(out, "{} {} {}", c.vertices().len(), faces.len(), edges).unwrap();
    for v in c.vertices() {
        let mut coords: Vec<String> = v.coords().iter().map(Dyadic::to_decimal_string).collect();
        coords.resize(3, "0".to_string());
        writeln!(out, "{}", coords.join(" ")).unwrap();
    }
    for f in faces {
        let ids: Vec<String> = f.vertex_ids().iter().map(ToString::to_string).collect();
        writeln!(out, "{} {}", ids.len(), ids.join(" ")).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let c = GeoComplex::unit_simplex(2).scaled(&Dyadic::new(3, 2));
        let back = GeoComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }

    #[test]
    fn big_numerators_survive() {
        let v = vec![DyadicPoint::new(vec![Dyadic::new(BigInt::from(3) << 80usize, 3)]), DyadicPoint::from_ints(&[0])];
        let c = GeoComplex::from_maximal(v, vec![vec![0, 1]]).unwrap();
        assert_eq!(GeoComplex::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = GeoComplex::from_json("{\"dim\": 2,\n \"simplices\": [[0]], \"vertices\": [[[1, -1], [0, 0]]]}").unwrap_err();
        match e {
            Error::Parse { location, .. } => assert!(location.contains("vertices[0][0]"), "{location}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(GeoComplex::from_json("{\"dim\": 2,\n oops"), Err(Error::Parse { .. })));
    }

    #[test]
    fn maximal_lists_are_closed() {
        let c = GeoComplex::from_json(r#"{"dim":2,"simplices":[[0,1,2]],"vertices":[[[0,0],[0,0]],[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
        assert_eq!(c, GeoComplex::unit_simplex(2));
    }

    #[test]
    fn off_rejects_high_dimension() {
        assert_eq!(to_off(&GeoComplex::unit_simplex(4)), Err(Error::OffDimension(4)));
        let off = to_off(&GeoComplex::unit_simplex(2)).unwrap();
        assert!(off.starts_with("OFF\n3 1 3\n"));
    }
}
