//! Text formats: TOML instance and measure files, JSON-lines report records.

use serde::{Deserialize, Serialize};

use crate::groups::{Elem, FiniteAbelian, Hom};
use crate::gz::{GZInstance, GzError, InstanceParts, MinusPrime, PrimeData};
use crate::iwasawa::Coeff;
use crate::lfactors::{LocalCharCase, LocalRepCase};
use crate::padic::{PadicScalar, PrimeContext, QuadContext, QuadScalar};
use crate::projline::{BoundaryMeasure, Chart, DiscAddress};
use crate::torus::UnitData;

pub const SCHEMA_VERSION: u32 = 1;

/// Default cap on measure depth; `PADIC_GZ_MAXDEPTH` overrides it in the CLI.
pub const DEFAULT_MAX_DEPTH: u32 = 12;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("schema_version {found} unsupported (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
    #[error("{path}: bad record '{record}': {reason}")]
    Record { path: String, record: String, reason: String },
    #[error("{path}: {error}")]
    At { path: String, error: GzError },
    #[error(transparent)]
    Gz(#[from] GzError),
}

impl FormatError {
    fn at(path: impl Into<String>, e: impl Into<GzError>) -> Self {
        FormatError::At { path: path.into(), error: e.into() }
    }
}

/// `chart depth center mass`, e.g. `std 3 7 -1`.
pub fn record_text(d: &DiscAddress, m: i64) -> String {
    format!("{d} {m}")
}

pub fn parse_record(path: &str, s: &str) -> Result<(DiscAddress, i64), FormatError> {
    let bad = |reason: &str| FormatError::Record { path: path.into(), record: s.into(), reason: reason.into() };
    let fields: Vec<&str> = s.split_whitespace().collect();
    let [chart, depth, center, mass] = fields[..] else {
        return Err(bad("expected 4 fields: chart depth center mass"));
    };
    let chart = match chart {
        "std" => Chart::Std,
        "inf" => Chart::Inf,
        _ => return Err(bad("chart must be std or inf")),
    };
    let depth = depth.parse().map_err(|_| bad("depth"))?;
    let center = center.parse().map_err(|_| bad("center"))?;
    let mass = mass.parse().map_err(|_| bad("mass"))?;
    Ok((DiscAddress { chart, depth, center }, mass))
}

fn measure_from_records(
    path: &str,
    ctx: PrimeContext,
    depth: u32,
    records: &[String],
    max_depth: u32,
) -> Result<BoundaryMeasure, FormatError> {
    if depth > max_depth {
        return Err(FormatError::at(
            path,
            GzError::Invalid { invariant: "depth_cap", detail: format!("depth {depth} above cap {max_depth}") },
        ));
    }
    let recs = records
        .iter()
        .enumerate()
        .map(|(i, r)| parse_record(&format!("{path}.records[{i}]"), r))
        .collect::<Result<Vec<_>, _>>()?;
    BoundaryMeasure::from_records(ctx, depth, &recs).map_err(|e| FormatError::at(path, e))
}

fn measure_records(mu: &BoundaryMeasure) -> Vec<String> {
    mu.records().iter().map(|(d, m)| record_text(d, *m)).collect()
}

/// A standalone measure table, as read by `integrate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub schema_version: u32,
    pub p: u64,
    pub precision: u32,
    pub depth: u32,
    pub records: Vec<String>,
}

impl MeasureFile {
    pub fn from_measure(mu: &BoundaryMeasure) -> Self {
        let ctx = mu.ctx();
        MeasureFile {
            schema_version: SCHEMA_VERSION,
            p: ctx.p(),
            precision: ctx.precision(),
            depth: mu.maxdepth(),
            records: measure_records(mu),
        }
    }

    pub fn to_measure(&self, max_depth: u32) -> Result<BoundaryMeasure, FormatError> {
        check_schema(self.schema_version)?;
        let ctx = PrimeContext::new(self.p, self.precision).map_err(|e| FormatError::at("p", e))?;
        measure_from_records("measure", ctx, self.depth, &self.records, max_depth)
    }
}

pub fn parse_measure(text: &str, max_depth: u32) -> Result<BoundaryMeasure, FormatError> {
    toml::from_str::<MeasureFile>(text)?.to_measure(max_depth)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSection {
    pub p: u64,
    pub working_precision: u32,
    pub delta: i64,
    /// coordinates of a + b√Δ as p-adic texts
    pub tau: [String; 2],
    pub tate_q: String,
    pub level: u32,
    pub depth: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassModelSection {
    /// cyclic orders of the extra factor of A after the local blocks
    #[serde(default)]
    pub extra: Vec<u64>,
    pub pplus: Vec<Elem>,
    /// transversal of cl in A, in class order; defaults to the canonical one
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<Vec<Elem>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSection {
    pub o_plus: Vec<u64>,
    pub o_plus_s: Vec<u64>,
    pub incl: Vec<Elem>,
    pub to_local: Vec<Elem>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaloisSection {
    pub orders: Vec<u64>,
    pub h: Vec<Elem>,
    /// images of the generators of A
    pub rho: Vec<Elem>,
    /// per prime, images of the torus-quotient generators
    pub rec: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSection {
    pub coeff_prime: u64,
    pub coeff_precision: u32,
    pub exps: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinusSection {
    pub rep: LocalRepCase,
    pub ch: LocalCharCase,
    /// a + b·x in the coefficient ring
    pub local_value: [u64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSection {
    pub depth: u32,
    pub records: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSection {
    pub factors: Vec<FactorSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSection {
    pub tensors: Vec<TensorSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub primes: Vec<PrimeSection>,
    pub class_model: ClassModelSection,
    pub unit_indices: UnitSection,
    pub galois_model: GaloisSection,
    pub characters: CharacterSection,
    #[serde(default)]
    pub minus: Vec<MinusSection>,
    pub measures: Vec<ClassSection>,
}

fn check_schema(found: u32) -> Result<(), FormatError> {
    if found != SCHEMA_VERSION {
        return Err(FormatError::Schema { found });
    }
    Ok(())
}

impl InstanceFile {
    pub fn from_instance(inst: &GZInstance) -> Self {
        let primes = inst
            .primes
            .iter()
            .map(|p| PrimeSection {
                p: p.p(),
                working_precision: p.qctx.base().precision(),
                delta: p.qctx.delta(),
                tau: [p.tau.a.to_text(), p.tau.b.to_text()],
                tate_q: p.tate_q.to_text(),
                level: p.tq.level(),
                depth: p.depth,
            })
            .collect();
        let canonical = inst.model.cl_reps() == inst.reps.as_slice();
        let class_model = ClassModelSection {
            extra: inst.extra.clone(),
            pplus: inst.model.pplus().to_vec(),
            reps: (!canonical).then(|| inst.reps.clone()),
        };
        let u = &inst.units;
        let unit_indices = UnitSection {
            o_plus: u.o_plus.orders.clone(),
            o_plus_s: u.o_plus_s.orders.clone(),
            incl: u.incl.images.clone(),
            to_local: u.to_local.images.clone(),
        };
        let galois_model = GaloisSection {
            orders: inst.galois.g.orders.clone(),
            h: inst.galois.h.clone(),
            rho: inst.rho.images.clone(),
            rec: inst.galois.rec.iter().map(|r| r.hom.images.clone()).collect(),
        };
        let characters = CharacterSection {
            coeff_prime: inst.ring.ell(),
            coeff_precision: inst.ring.precision(),
            exps: inst.chi.exps().to_vec(),
        };
        let minus = inst
            .minus
            .iter()
            .map(|m| MinusSection { rep: m.rep.clone(), ch: m.ch.clone(), local_value: [m.local_value.a, m.local_value.b] })
            .collect();
        let measures = inst
            .measures
            .iter()
            .map(|class| ClassSection {
                tensors: class
                    .iter()
                    .map(|t| TensorSection {
                        factors: t.iter().map(|mu| FactorSection { depth: mu.maxdepth(), records: measure_records(mu) }).collect(),
                    })
                    .collect(),
            })
            .collect();
        InstanceFile { schema_version: SCHEMA_VERSION, primes, class_model, unit_indices, galois_model, characters, minus, measures }
    }

    pub fn to_instance(&self, max_depth: u32) -> Result<GZInstance, FormatError> {
        check_schema(self.schema_version)?;
        let mut primes = Vec::with_capacity(self.primes.len());
        for (k, s) in self.primes.iter().enumerate() {
            let path = format!("primes[{k}]");
            let ctx = PrimeContext::new(s.p, s.working_precision).map_err(|e| FormatError::at(&path, e))?;
            let qctx = QuadContext::new(ctx, s.delta).map_err(|e| FormatError::at(&path, e))?;
            let scalar = |field: &str, t: &str| {
                PadicScalar::parse_text(ctx, t).map_err(|e| FormatError::at(format!("{path}.{field}"), e))
            };
            let tau = QuadScalar::new(qctx, scalar("tau", &s.tau[0])?, scalar("tau", &s.tau[1])?);
            let tate_q = scalar("tate_q", &s.tate_q)?;
            if s.depth > max_depth {
                return Err(FormatError::at(
                    &path,
                    GzError::Invalid { invariant: "depth_cap", detail: format!("depth {} above cap {max_depth}", s.depth) },
                ));
            }
            primes.push(PrimeData::new(qctx, tau, tate_q, s.level, s.depth).map_err(|e| FormatError::at(&path, e))?);
        }
        let mut measures = Vec::with_capacity(self.measures.len());
        for (i, class) in self.measures.iter().enumerate() {
            let mut tensors = Vec::with_capacity(class.tensors.len());
            for (j, t) in class.tensors.iter().enumerate() {
                if t.factors.len() != primes.len() {
                    return Err(FormatError::at(
                        format!("measures[{i}].tensors[{j}]"),
                        GzError::Arity { want: primes.len(), got: t.factors.len() },
                    ));
                }
                let factors = t
                    .factors
                    .iter()
                    .zip(&primes)
                    .enumerate()
                    .map(|(k, (f, p))| {
                        let path = format!("measures[{i}].tensors[{j}].factors[{k}]");
                        measure_from_records(&path, p.qctx.base(), f.depth, &f.records, max_depth)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                tensors.push(factors);
            }
            measures.push(tensors);
        }
        let minus = self
            .minus
            .iter()
            .map(|m| MinusPrime { rep: m.rep.clone(), ch: m.ch.clone(), local_value: Coeff { a: m.local_value[0], b: m.local_value[1] } })
            .collect();
        let u = &self.unit_indices;
        let units = UnitData {
            o_plus: FiniteAbelian::new(u.o_plus.clone()),
            o_plus_s: FiniteAbelian::new(u.o_plus_s.clone()),
            incl: Hom { images: u.incl.clone() },
            to_local: Hom { images: u.to_local.clone() },
        };
        let g = &self.galois_model;
        let parts = InstanceParts {
            primes,
            extra: self.class_model.extra.clone(),
            pplus: self.class_model.pplus.clone(),
            units,
            g_orders: g.orders.clone(),
            h: g.h.clone(),
            rho: g.rho.clone(),
            rec: g.rec.clone(),
            coeff_prime: self.characters.coeff_prime,
            coeff_precision: self.characters.coeff_precision,
            chi_exps: self.characters.exps.clone(),
            minus,
            measures,
        };
        let mut inst = GZInstance::new(parts)?;
        if let Some(reps) = &self.class_model.reps {
            let a = inst.a().clone();
            if reps.len() != inst.reps.len() || reps.iter().any(|t| t.len() != a.rank() || !a.contains(t)) {
                return Err(FormatError::at(
                    "class_model.reps",
                    GzError::Invalid { invariant: "transversal_size", detail: format!("{} reps", reps.len()) },
                ));
            }
            let shifts: Vec<Elem> = reps.iter().zip(&inst.reps).map(|(t, s)| a.sub(t, s)).collect();
            inst.shift_transversal(&shifts).map_err(|e| FormatError::at("class_model.reps", e))?;
        }
        Ok(inst)
    }
}

pub fn instance_to_toml(inst: &GZInstance) -> String {
    toml::to_string(&InstanceFile::from_instance(inst)).expect("instance file serializes")
}

pub fn parse_instance(text: &str, max_depth: u32) -> Result<GZInstance, FormatError> {
    toml::from_str::<InstanceFile>(text)?.to_instance(max_depth)
}

/// One JSON line `{"schema_version":1,"record":kind,...fields}`.
pub fn json_line<T: Serialize>(kind: &str, value: &T) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    obj.insert("record".into(), kind.into());
    match serde_json::to_value(value).expect("records serialize") {
        serde_json::Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("value".into(), other);
        }
    }
    serde_json::Value::Object(obj).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gz::{random_instance, verify_thm91, RandomSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn record_round_trip() {
        let d = DiscAddress::inf(2, 6);
        assert_eq!(parse_record("x", &record_text(&d, -3)).unwrap(), (d, -3));
        assert!(parse_record("x", "std 1 2").is_err());
        assert!(parse_record("x", "mid 1 2 3").is_err());
    }

    #[test]
    fn instance_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [RandomSpec::default(), RandomSpec { r: 2, with_minus: true, ..RandomSpec::default() }] {
            let inst = random_instance(&mut rng, &spec).unwrap();
            let text = instance_to_toml(&inst);
            let back = parse_instance(&text, DEFAULT_MAX_DEPTH).unwrap();
            assert_eq!(instance_to_toml(&back), text);
            assert_eq!(verify_thm91(&back).unwrap(), verify_thm91(&inst).unwrap());
        }
    }

    #[test]
    fn broken_additivity_names_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        let mut file = InstanceFile::from_instance(&inst);
        let rec = &mut file.measures[0].tensors[0].factors[0].records[0];
        let (d, m) = parse_record("", rec).unwrap();
        *rec = record_text(&d, m + 1);
        let err = file.to_instance(DEFAULT_MAX_DEPTH).unwrap_err().to_string();
        assert!(err.contains("additivity"), "{err}");
        assert!(err.contains("measures[0].tensors[0].factors[0]"), "{err}");
    }

    #[test]
    fn toml_errors_carry_location() {
        let err = parse_measure("schema_version = 1\np = 5\nprecision = \n", 12).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn json_line_has_schema() {
        let line = json_line("x", &serde_json::json!({"a": 1}));
        assert_eq!(line, r#"{"a":1,"record":"x","schema_version":1}"#);
    }
}
