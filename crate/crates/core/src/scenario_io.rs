//! JSON scenario documents and result emission.
//!
//! Units are natural: `ħ = 1`, masses and lengths dimensionless.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "state": {
//!     "kind": "singlet",
//!     "dimension": 1,
//!     "masses": [1.0, 1.0],
//!     "phi": { "center": [-2.0], "width": [0.5] },
//!     "chi": { "center": [2.0], "width": [0.5] }
//!   },
//!   "observers": {
//!     "a": { "velocity": [0.0], "time": 0.0,
//!            "region": { "kind": "box", "lo": [-4.0], "hi": [-1.0] },
//!            "direction": { "theta": 0.0, "phi": 0.0 } },
//!     "b": { "velocity": [0.0], "time": 0.0,
//!            "region": { "kind": "box", "lo": [1.0], "hi": [4.0] },
//!            "direction": { "theta": 0.0, "phi": 0.0 } }
//!   },
//!   "backend": { "kind": "analytic" }
//! }
//! ```

use std::io;

use serde::{Deserialize, Serialize};

use crate::correlation::{Backend, CorrelationResult, ObserverSpec, Scenario};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::measurement::Region;
use crate::spin::{Direction, HalfInt, SpinValue, C64};
use crate::states::{make_singlet, make_triplet, GaussianPacket, StateTerm, Statistics, TwoParticleState};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketDoc {
    pub center: Vec<f64>,
    pub width: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    /// `[re, im]`.
    pub amplitude: [f64; 2],
    pub alpha: PacketDoc,
    pub beta: PacketDoc,
    pub m_alpha: f64,
    pub m_beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateDoc {
    /// Singlet spin part times `φ(x)χ(y)`; (anti)symmetrized for identical particles.
    Singlet(ProductDoc),
    Triplet(TripletDoc),
    /// Explicit superposition; identical-particle states must already have the right symmetry.
    Custom(CustomDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub dimension: usize,
    pub masses: [f64; 2],
    #[serde(default)]
    pub statistics: Statistics,
    pub phi: PacketDoc,
    pub chi: PacketDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletDoc {
    pub dimension: usize,
    pub masses: [f64; 2],
    #[serde(default)]
    pub statistics: Statistics,
    pub m_total: i32,
    pub phi: PacketDoc,
    pub chi: PacketDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDoc {
    pub dimension: usize,
    pub masses: [f64; 2],
    #[serde(default)]
    pub statistics: Statistics,
    pub spin: f64,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionDoc {
    AllSpace,
    Empty,
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionDoc {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverDoc {
    pub velocity: Vec<f64>,
    pub time: f64,
    pub region: RegionDoc,
    pub direction: DirectionDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserversDoc {
    pub a: ObserverDoc,
    pub b: ObserverDoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendDoc {
    Analytic,
    Grid { n: usize, extent: f64 },
}

/// Quantities a driver should report besides the joint table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Joint,
    Symmetrized,
    EqualTime,
    ClosedForm,
    Identical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema_version: String,
    pub state: StateDoc,
    pub observers: ObserversDoc,
    pub backend: BackendDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputKind>,
}

fn half_int(x: f64, field: &str) -> Result<HalfInt> {
    let twice = 2.0 * x;
    if !(twice.is_finite() && twice == twice.round()) {
        return Err(Error::invalid(field, format!("{x} is not a multiple of 1/2")));
    }
    Ok(HalfInt(twice as i32))
}

impl PacketDoc {
    fn build(&self, field: &str) -> Result<GaussianPacket> {
        let momentum = self.momentum.clone().unwrap_or_else(|| vec![0.0; self.center.len()]);
        let packet =
            GaussianPacket::new(self.center.clone(), self.width.clone(), momentum).map_err(|e| e.within(field))?;
        Ok(packet.with_phase(self.phase.unwrap_or(0.0)))
    }

    pub fn from_packet(p: &GaussianPacket) -> Self {
        PacketDoc {
            center: p.center().to_vec(),
            width: p.width().to_vec(),
            momentum: Some(p.momentum().to_vec()),
            phase: (p.phase() != 0.0).then_some(p.phase()),
        }
    }
}

fn check_dimension(packets: &[(&GaussianPacket, String)], dimension: usize) -> Result<()> {
    for (p, field) in packets {
        if p.dim() != dimension {
            return Err(Error::invalid(
                field.as_str(),
                format!("has {} axes, state.dimension is {dimension}", p.dim()),
            ));
        }
    }
    Ok(())
}

fn identical(state: TwoParticleState, statistics: Statistics) -> Result<TwoParticleState> {
    match statistics {
        Statistics::Distinguishable => Ok(state),
        other => state.symmetrized(other),
    }
}

impl StateDoc {
    pub fn build(&self) -> Result<TwoParticleState> {
        match self {
            StateDoc::Singlet(ProductDoc {
                dimension,
                masses,
                statistics,
                phi,
                chi,
            }) => {
                let (p, c) = (phi.build("state.phi")?, chi.build("state.chi")?);
                check_dimension(&[(&p, "state.phi".into()), (&c, "state.chi".into())], *dimension)?;
                identical(make_singlet(&p, &c, (masses[0], masses[1]))?, *statistics)
            }
            StateDoc::Triplet(TripletDoc {
                dimension,
                masses,
                statistics,
                m_total,
                phi,
                chi,
            }) => {
                let (p, c) = (phi.build("state.phi")?, chi.build("state.chi")?);
                check_dimension(&[(&p, "state.phi".into()), (&c, "state.chi".into())], *dimension)?;
                let state = make_triplet(&p, &c, *m_total, (masses[0], masses[1])).map_err(|e| e.within("state"))?;
                identical(state, *statistics)
            }
            StateDoc::Custom(CustomDoc {
                dimension,
                masses,
                statistics,
                spin,
                terms,
            }) => {
                let twice = half_int(*spin, "state.spin")?;
                if twice.0 < 0 {
                    return Err(Error::invalid("state.spin", "must be non-negative"));
                }
                let spin = SpinValue::from_twice(twice.0 as u32);
                let mut built = Vec::with_capacity(terms.len());
                for (i, t) in terms.iter().enumerate() {
                    let field = format!("state.terms[{i}]");
                    let alpha = t.alpha.build(&format!("{field}.alpha"))?;
                    let beta = t.beta.build(&format!("{field}.beta"))?;
                    check_dimension(
                        &[(&alpha, format!("{field}.alpha")), (&beta, format!("{field}.beta"))],
                        *dimension,
                    )?;
                    built.push(StateTerm {
                        amplitude: C64::new(t.amplitude[0], t.amplitude[1]),
                        alpha,
                        beta,
                        m_alpha: half_int(t.m_alpha, &format!("{field}.m_alpha"))?,
                        m_beta: half_int(t.m_beta, &format!("{field}.m_beta"))?,
                    });
                }
                TwoParticleState::new(spin, (masses[0], masses[1]), *statistics, built)
            }
        }
    }
}

impl RegionDoc {
    fn build(&self, field: &str) -> Result<Region> {
        match self {
            RegionDoc::AllSpace => Ok(Region::AllSpace),
            RegionDoc::Empty => Ok(Region::Empty),
            RegionDoc::Box { lo, hi } => Region::new_box(lo.clone(), hi.clone()).map_err(|e| e.within(field)),
        }
    }

    pub fn from_region(r: &Region) -> Self {
        match r {
            Region::AllSpace => RegionDoc::AllSpace,
            Region::Empty => RegionDoc::Empty,
            Region::Box { lo, hi } => RegionDoc::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
        }
    }
}

impl ObserverDoc {
    fn build(&self, field: &str) -> Result<ObserverSpec> {
        Ok(ObserverSpec {
            velocity: self.velocity.clone(),
            time: self.time,
            region: self.region.build(&format!("{field}.region"))?,
            direction: Direction::new(self.direction.theta, self.direction.phi).map_err(|e| e.within(field))?,
        })
    }

    pub fn from_spec(o: &ObserverSpec) -> Self {
        ObserverDoc {
            velocity: o.velocity.clone(),
            time: o.time,
            region: RegionDoc::from_region(&o.region),
            direction: DirectionDoc {
                theta: o.direction.theta(),
                phi: o.direction.phi(),
            },
        }
    }
}

impl ScenarioDocument {
    pub fn into_scenario(&self) -> Result<Scenario> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!(
                    "unsupported version {:?}, expected {SCHEMA_VERSION:?}",
                    self.schema_version
                ),
            ));
        }
        let state = self.state.build()?;
        let a = self.observers.a.build("observers.a")?;
        let b = self.observers.b.build("observers.b")?;
        let backend = match self.backend {
            BackendDoc::Analytic => Backend::Analytic,
            BackendDoc::Grid { n, extent } => {
                Backend::Grid(GridConfig::new(state.dimension(), n, extent).map_err(|e| match e {
                    Error::Invalid { field, reason } => Error::invalid(field.replace("grid.", "backend."), reason),
                    other => other,
                })?)
            }
        };
        Scenario::new(state, a, b, backend)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// Reads a document strictly, reporting the failing field path.
pub fn parse_document(text: &str) -> Result<ScenarioDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "state" {
            if let Some(err) = locate_state_error(text) {
                return err;
            }
        }
        Error::Document {
            path,
            message: inner.to_string(),
        }
    })
}

/// Tagged enums buffer their content, which hides the failing field; retry on the variant payload.
fn locate_state_error(text: &str) -> Option<Error> {
    let root: serde_json::Value = serde_json::from_str(text).ok()?;
    let mut state = root.get("state")?.as_object()?.clone();
    let kind = state.remove("kind")?;
    let payload = serde_json::Value::Object(state);
    let err = match kind.as_str()? {
        "singlet" => serde_path_to_error::deserialize::<_, ProductDoc>(payload).err()?,
        "triplet" => serde_path_to_error::deserialize::<_, TripletDoc>(payload).err()?,
        "custom" => serde_path_to_error::deserialize::<_, CustomDoc>(payload).err()?,
        _ => return None,
    };
    let path = format!("state.{}", err.path());
    Some(Error::Document {
        path,
        message: err.into_inner().to_string(),
    })
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_document(text)?.into_scenario()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Floats written with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // keeps -0.0 and 0.0 apart
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    format!("{x:.16e}")
}

struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }
}

/// Pretty JSON with every float at 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PrettyWithDigits::default());
    value.serialize(&mut ser).expect("in-memory serialization");
    let mut text = String::from_utf8(out).expect("serde_json writes UTF-8");
    text.push('\n');
    text
}

#[derive(Default)]
struct PrettyWithDigits<'a> {
    pretty: serde_json::ser::PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.pretty.$name(writer $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for PrettyWithDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        SeventeenDigits.write_f64(writer, value)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

fn format_lambda(x: f64) -> String {
    format!("{x}")
}

/// CSV: `lambda_a,lambda_b,probability` rows in descending `λ`, then `correlation,,C`.
pub fn emit_csv(result: &CorrelationResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda_a", "lambda_b", "probability"])
        .expect("in-memory csv");
    for (i, row) in result.joint.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            w.write_record([
                format_lambda(result.lambdas[i]),
                format_lambda(result.lambdas[j]),
                format_float(*p),
            ])
            .expect("in-memory csv");
        }
    }
    w.write_record(["correlation".to_string(), String::new(), format_float(result.value)])
        .expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv writes UTF-8")
}

pub fn emit_results(result: &CorrelationResult, format: Format) -> String {
    match format {
        Format::Csv => emit_csv(result),
        Format::Json => to_json_string(result),
    }
}

pub fn parse_results(text: &str) -> Result<CorrelationResult> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Document {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}
