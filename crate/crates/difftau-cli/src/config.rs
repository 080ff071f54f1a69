//! JSON input documents. Numbers may be JSON integers, decimals or strings
//! such as "3/7"; they are parsed into the active field.

use std::path::Path;

use difftau::ensembles::{EnsembleSpec, GapSet, Weight};
use difftau::field::{parse_ratfn, parse_value, Scalar};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;
use crate::Mode;

pub struct Document(Value);

impl Document {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        if !value.is_object() {
            return Err(CliError::Invalid("config must be a JSON object".into()));
        }
        Ok(Document(value))
    }

    pub fn mode(&self) -> Option<Result<Mode, CliError>> {
        self.0.get("mode").map(|m| match m.as_str() {
            Some("exact") => Ok(Mode::Exact),
            Some("float") => Ok(Mode::Float),
            _ => Err(CliError::Invalid(format!("mode must be \"exact\" or \"float\", got {m}"))),
        })
    }

    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.0.clone()).map_err(|e| CliError::Invalid(e.to_string()))
    }
}

pub fn required(doc: Option<&Document>) -> Result<&Document, CliError> {
    doc.ok_or_else(|| CliError::Invalid("this subcommand needs --config".into()))
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn value<F: Scalar>(&self) -> Result<F, CliError> {
        let text = match self {
            Num::Int(i) => i.to_string(),
            Num::Float(x) => x.to_string(),
            Num::Text(s) => s.clone(),
        };
        Ok(parse_value(&text)?)
    }
}

pub fn values<F: Scalar>(nums: &[Num]) -> Result<Vec<F>, CliError> {
    nums.iter().map(Num::value).collect()
}

pub fn array<F: Scalar, const K: usize>(nums: &[Num; K]) -> Result<[F; K], CliError> {
    let v = values(nums)?;
    Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
pub enum PhaseDoc {
    Range { from: i64, to: i64 },
    List(Vec<Num>),
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
pub enum WeightDoc {
    Table { table: Vec<Num> },
    Ratio { anchor: Num, ratio: String },
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
pub enum GapDoc {
    Allowed { allowed: Vec<Num> },
    Segments { segments: Vec<(Num, Num)> },
}

#[derive(Deserialize, Debug)]
pub struct EnsembleDoc {
    pub x: PhaseDoc,
    pub first: Vec<WeightDoc>,
    pub second: Vec<WeightDoc>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    #[serde(default)]
    pub gaps: Option<Vec<GapDoc>>,
}

impl EnsembleDoc {
    pub fn spec<F: Scalar>(&self) -> Result<EnsembleSpec<F>, CliError> {
        let phase = match &self.x {
            PhaseDoc::Range { from, to } if from <= to => (*from..=*to).map(F::from_i64).collect(),
            PhaseDoc::Range { .. } => return Err(CliError::Invalid("empty range for x".into())),
            PhaseDoc::List(xs) => values(xs)?,
        };
        let weight = |w: &WeightDoc| -> Result<Weight<F>, CliError> {
            Ok(match w {
                WeightDoc::Table { table } => Weight::Table(values(table)?),
                WeightDoc::Ratio { anchor, ratio } => Weight::Ratio { anchor: anchor.value()?, ratio: parse_ratfn(ratio)? },
            })
        };
        let first = self.first.iter().map(weight).collect::<Result<_, _>>()?;
        let second = self.second.iter().map(weight).collect::<Result<_, _>>()?;
        Ok(EnsembleSpec::new(phase, first, second, self.n.clone(), self.m.clone())?)
    }

    pub fn gap_sets<F: Scalar>(&self) -> Result<Option<Vec<GapSet<F>>>, CliError> {
        let Some(gaps) = &self.gaps else { return Ok(None) };
        gaps.iter()
            .map(|g| {
                Ok(match g {
                    GapDoc::Allowed { allowed } => GapSet::Allowed(values(allowed)?),
                    GapDoc::Segments { segments } => GapSet::Segments(
                        segments.iter().map(|(a, b)| Ok((a.value()?, b.value()?))).collect::<Result<_, CliError>>()?,
                    ),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

#[derive(Deserialize, Debug)]
pub struct HahnDoc {
    pub n: usize,
    pub m: usize,
    pub alpha: Num,
    pub beta: Num,
}

#[derive(Deserialize, Debug)]
pub struct DpvDoc {
    pub a: [Num; 2],
    pub b: [Num; 2],
    pub d: [Num; 2],
    pub rho: [Num; 2],
    pub q: Num,
    pub p: Num,
    #[serde(default)]
    pub steps: Option<usize>,
}

#[derive(Deserialize, Debug)]
pub struct DpviDoc {
    pub a: [Num; 3],
    pub b: [Num; 3],
    pub d: [Num; 2],
    pub q: Num,
    pub r: Num,
    #[serde(default)]
    pub steps: Option<usize>,
}

#[derive(Deserialize, Debug)]
pub struct HirotaDoc {
    pub zeros: Vec<Num>,
}

#[derive(Deserialize, Debug)]
pub struct SiteDoc {
    pub y: Num,
    pub alpha: Num,
    pub beta: Num,
    pub w: Vec<Num>,
    pub w_prime: Vec<Num>,
}

#[derive(Deserialize, Debug, Default)]
pub struct LimitDoc {
    #[serde(default)]
    pub sites: Option<Vec<SiteDoc>>,
    #[serde(default)]
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub eps: Option<Vec<Num>>,
}
