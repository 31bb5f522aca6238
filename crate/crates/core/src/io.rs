//! Text formats: polytope and family JSON, direction vectors and sweep grids.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, parse_rational, IntVector, RatVector, Rational};
use crate::families::FamilySpec;
use crate::polytope::HalfSpaceSystem;

/// A polytope file: `{"n", "conormals", "offsets", "labels"?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub n: usize,
    #[serde(with = "conormal_rows")]
    pub conormals: Vec<IntVector>,
    #[serde(with = "exact::serde_rational::vec")]
    pub offsets: RatVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

mod conormal_rows {
    use super::IntVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Row(#[serde(with = "crate::exact::serde_int_vec")] IntVector);

    pub fn serialize<S: Serializer>(rows: &[IntVector], s: S) -> Result<S::Ok, S::Error> {
        rows.iter().map(|r| Row(r.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<IntVector>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

impl PolytopeFile {
    pub fn from_system(sys: &HalfSpaceSystem, labels: Option<Vec<String>>) -> Self {
        Self {
            n: sys.dim(),
            conormals: sys.conormals().to_vec(),
            offsets: sys.offsets().clone(),
            labels,
        }
    }

    pub fn build(&self) -> Result<HalfSpaceSystem> {
        if let Some(bad) = self.conormals.iter().find(|c| c.len() != self.n) {
            return Err(Error::Dimension(format!(
                "conormal of length {} with n = {}",
                bad.len(),
                self.n
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.conormals.len() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} facets",
                    labels.len(),
                    self.conormals.len()
                )));
            }
        }
        HalfSpaceSystem::new(self.conormals.clone(), self.offsets.clone())
    }
}

fn json_err(e: serde_json::Error) -> Error {
    let text = e.to_string();
    Error::Parse(text.strip_prefix("parse error: ").unwrap_or(&text).to_string())
}

pub fn parse_polytope(text: &str) -> Result<PolytopeFile> {
    serde_json::from_str(text).map_err(json_err)
}

pub fn parse_family(text: &str) -> Result<FamilySpec> {
    let spec: FamilySpec = serde_json::from_str(text).map_err(json_err)?;
    spec.validate()?;
    Ok(spec)
}

/// Either input form; a JSON object with a `"family"` key is a family spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Polytope(PolytopeFile),
    Family(FamilySpec),
}

impl Input {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        if value.get("family").is_some() {
            parse_family(text).map(Input::Family)
        } else {
            parse_polytope(text).map(Input::Polytope)
        }
    }

    pub fn build(&self) -> Result<HalfSpaceSystem> {
        match self {
            Input::Polytope(p) => p.build(),
            Input::Family(f) => f.build(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        match self {
            Input::Polytope(p) => p.labels.as_deref(),
            Input::Family(_) => None,
        }
    }
}

/// `"1,0,-2"` as an integer vector.
pub fn parse_int_vector(text: &str) -> Result<IntVector> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("not an integer: {:?}", t.trim())))
        })
        .collect()
}

/// One axis of a sweep grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<Rational>,
}

const MAX_AXIS_POINTS: usize = 10_000;

fn parse_axis(part: &str) -> Result<GridAxis> {
    let (name, range) = part
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("grid axis {part:?} lacks '='")))?;
    let name = name.trim().to_string();
    if name.is_empty() {
        return Err(Error::Parse("grid axis without a name".into()));
    }
    let range = range.trim();
    let values = if let Some((lo, rest)) = range.split_once("..") {
        let (hi, step) = match rest.split_once("step") {
            Some((hi, step)) => (hi, parse_rational(step.trim())?),
            None => (rest, Rational::from_integer(1.into())),
        };
        let lo = parse_rational(lo.trim())?;
        let hi = parse_rational(hi.trim())?;
        if !step.is_positive() {
            return Err(Error::Parse("grid step must be positive".into()));
        }
        if hi < lo {
            return Err(Error::Parse(format!("empty range for {name}")));
        }
        let mut values = Vec::new();
        let mut x = lo;
        while x <= hi {
            values.push(x.clone());
            if values.len() > MAX_AXIS_POINTS {
                return Err(Error::Parse(format!("axis {name} has too many points")));
            }
            x += &step;
        }
        values
    } else {
        range
            .split(',')
            .map(|t| parse_rational(t.trim()))
            .collect::<Result<_>>()?
    };
    Ok(GridAxis { name, values })
}

/// `"tau=1..3step1/2;lambda=1..2step1/2"`; an axis may also be an explicit
/// list `"tau=1,3/2,2"`.
pub fn parse_grid(text: &str) -> Result<Vec<GridAxis>> {
    let axes: Vec<GridAxis> = text
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_axis)
        .collect::<Result<_>>()?;
    if axes.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::Parse(format!("axis {} repeated", a.name)));
        }
    }
    Ok(axes)
}

/// Cartesian product of the axes, first axis varying slowest.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Decimal approximation of a rational for human-facing columns.
pub fn approximate(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn format_int_vector(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn is_zero_vector(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{format_rational, int, int_vector, rat};
    use proptest::prelude::*;

    #[test]
    fn polytope_json() {
        let text = r#"{"n":2,"conormals":[[-1,0],[0,-1],[1,1]],"offsets":["0","0","1"],"labels":["a","b","c"]}"#;
        let p = parse_polytope(text).unwrap();
        assert_eq!(p.build().unwrap().vertices().len(), 3);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(parse_polytope(&back).unwrap(), p);
        assert!(matches!(
            parse_polytope(r#"{"n":2,"conormals":[[-1,0],[0,-1],[1,1]],"offsets":["0","0","1/0"]}"#),
            Err(Error::Parse(_))
        ));
        let bad = parse_polytope(r#"{"n":3,"conormals":[[-1,0],[0,-1],[1,1]],"offsets":["0","0","1"]}"#).unwrap();
        assert!(matches!(bad.build(), Err(Error::Dimension(_))));
    }

    #[test]
    fn input_dispatch() {
        assert!(matches!(
            Input::parse(r#"{"family":"simplex","n":2,"tau":"1"}"#).unwrap(),
            Input::Family(_)
        ));
        assert!(matches!(
            Input::parse(r#"{"n":1,"conormals":[[-1],[1]],"offsets":["0","2"]}"#).unwrap(),
            Input::Polytope(_)
        ));
        assert!(matches!(Input::parse("{"), Err(Error::Parse(_))));
        assert!(matches!(
            Input::parse(r#"{"family":"simplex","n":2,"tau":"-1"}"#),
            Err(Error::Domain(_))
        ));
        assert!(matches!(Input::parse(r#"{"family":"cube","n":2}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_int_vector("1, 0,-2").unwrap(), int_vector(&[1, 0, -2]));
        assert!(parse_int_vector("1,x").is_err());
        assert!(parse_int_vector("").is_err());
        assert_eq!(format_int_vector(&int_vector(&[1, -2])), "1,-2");
    }

    #[test]
    fn grids() {
        let axes = parse_grid("tau=1..3step1/2;lambda=1..2step1/2").unwrap();
        assert_eq!(axes[0].values.len(), 5);
        assert_eq!(axes[1].values, vec![int(1), rat(3, 2), int(2)]);
        let pts = grid_points(&axes);
        assert_eq!(pts.len(), 15);
        assert_eq!(pts[1], vec![int(1), rat(3, 2)]);
        assert_eq!(parse_grid("tau=2,3;lambda=1").unwrap()[0].values, vec![int(2), int(3)]);
        assert_eq!(parse_grid("tau=1..3").unwrap()[0].values.len(), 3);
        assert!(parse_grid("tau=1..3step0").is_err());
        assert!(parse_grid("tau=3..1").is_err());
        assert!(parse_grid("tau").is_err());
        assert!(parse_grid("tau=1;tau=2").is_err());
        assert!(parse_grid("tau=0..1step1/100000").is_err());
    }

    proptest! {
        #[test]
        fn csv_rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let x = rat(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
