//! Text and JSON formats: sequence files, state dumps and code files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basecode::{CodeIsometry, WeylOp};
use crate::error::{Error, Result};
use crate::qsim::{Ensemble, PureState, QuditSpec, C64};
use crate::seqcore::Sequence;

pub const STATE_SCHEMA: u32 = 1;

/// Parses one sequence per non-empty line. Symbols are decimal integers
/// separated by whitespace and/or commas; `#` starts a comment.
pub fn parse_sequences(text: &str, q: u32) -> Result<Vec<Sequence>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let mut symbols = Vec::new();
        let mut col = 0;
        let chars: Vec<char> = body.chars().collect();
        while col < chars.len() {
            let c = chars[col];
            if c.is_whitespace() || c == ',' {
                col += 1;
                continue;
            }
            let start = col;
            while col < chars.len() && !(chars[col].is_whitespace() || chars[col] == ',') {
                col += 1;
            }
            let token: String = chars[start..col].iter().collect();
            let perr = |message: String| Error::Parse { line: ln + 1, column: start + 1, message };
            let v: u32 = token.parse().map_err(|_| perr(format!("expected a symbol, found {token:?}")))?;
            if v >= q {
                return Err(perr(format!("symbol {v} outside alphabet of size {q}")));
            }
            symbols.push(v);
        }
        if !symbols.is_empty() {
            out.push(Sequence::new(q, symbols)?);
        }
    }
    Ok(out)
}

/// The single sequence in `text`; an empty input is the empty word.
pub fn parse_sequence(text: &str, q: u32) -> Result<Sequence> {
    let mut all = parse_sequences(text, q)?;
    match all.len() {
        0 => Sequence::empty(q),
        1 => Ok(all.remove(0)),
        k => Err(Error::Parse { line: 1, column: 1, message: format!("expected one sequence, found {k}") }),
    }
}

pub fn read_sequence(path: &Path, q: u32) -> Result<Sequence> {
    parse_sequence(&fs::read_to_string(path)?, q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub weight: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

/// JSON form of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub schema_version: u32,
    pub dims: Vec<usize>,
    pub components: Vec<ComponentDoc>,
}

fn canonical_phase(amps: &[C64]) -> Vec<C64> {
    // rotate so the first non-negligible amplitude is real and positive
    match amps.iter().find(|a| a.norm() > 1e-12) {
        Some(a) => {
            let phase = a.conj() / a.norm();
            amps.iter().map(|x| x * phase).collect()
        }
        None => amps.to_vec(),
    }
}

impl StateDoc {
    /// Components are phase-fixed and sorted by descending weight, ties
    /// broken by amplitudes, so equal ensembles dump identically.
    pub fn from_ensemble(rho: &Ensemble) -> Self {
        let mut components: Vec<ComponentDoc> = rho
            .components()
            .iter()
            .map(|(w, s)| ComponentDoc {
                weight: *w,
                amplitudes: canonical_phase(s.amplitudes()).iter().map(|a| [a.re, a.im]).collect(),
            })
            .collect();
        components.sort_by(|a, b| {
            b.weight.total_cmp(&a.weight).then_with(|| {
                a.amplitudes
                    .iter()
                    .flatten()
                    .zip(b.amplitudes.iter().flatten())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        StateDoc { schema_version: STATE_SCHEMA, dims: rho.spec().dims().to_vec(), components }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::from_ensemble(&Ensemble::pure(psi.clone()))
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        if self.schema_version != STATE_SCHEMA {
            return Err(Error::Config(format!("unsupported state schema {}", self.schema_version)));
        }
        let spec = QuditSpec::new(self.dims.clone())?;
        let components = self
            .components
            .iter()
            .map(|c| {
                let amps = c.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                Ok((c.weight, PureState::new(spec.clone(), amps)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(components)
    }

    /// The state as a pure state; fails unless it has exactly one component.
    pub fn to_pure(&self) -> Result<PureState> {
        let rho = self.to_ensemble()?;
        match rho.components() {
            [(_, psi)] => Ok(psi.clone()),
            _ => Err(Error::Config("expected a pure state".into())),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

pub fn write_state(path: &Path, rho: &Ensemble) -> Result<()> {
    write_json(path, &StateDoc::from_ensemble(rho))
}

pub fn read_state(path: &Path) -> Result<Ensemble> {
    read_json::<StateDoc>(path)?.to_ensemble()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeylDoc {
    d: usize,
    x: Vec<usize>,
    z: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc {
    name: String,
    n0: usize,
    l: usize,
    k: usize,
    erasure_capability: usize,
    encoder: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    stabilizers: Option<Vec<WeylDoc>>,
}

/// Serializes a code: header fields plus the encoder as columns of
/// `[re, im]` pairs.
pub fn code_to_json(code: &CodeIsometry) -> Result<String> {
    Ok(serde_json::to_string_pretty(code)?)
}

/// Parses and fully re-validates a code file.
pub fn code_from_json(text: &str) -> Result<CodeIsometry> {
    let doc: CodeDoc = serde_json::from_str(text)?;
    let columns = doc.encoder.iter().map(|c| c.iter().map(|[re, im]| C64::new(*re, *im)).collect()).collect();
    let code = CodeIsometry::new(doc.name, doc.n0, doc.l, doc.k, doc.erasure_capability, columns)?;
    match doc.stabilizers {
        None => Ok(code),
        Some(gens) => {
            let gens = gens
                .into_iter()
                .map(|g| {
                    if g.d != doc.l {
                        return Err(Error::Code(format!("stabilizer over dimension {} in a code over {}", g.d, doc.l)));
                    }
                    WeylOp::new(g.d, g.x, g.z)
                })
                .collect::<Result<Vec<_>>>()?;
            code.with_stabilizers(gens)
        }
    }
}

pub fn read_code(path: &Path) -> Result<CodeIsometry> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    code_from_json(&text)
}
