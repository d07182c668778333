//! Standalone proof files (`.obsproof`).
//!
//! ```text
//! obsproof 1
//! (theory "T_sym_trans" "…crc…")
//! (constants (("a" "V") ("b" "V")) "…crc…")
//! (logic (p …) "…crc…")
//! (sieve (s …) "…crc…")
//! ```
//!
//! Either proof line may be absent, but not both. Constants are nullary
//! symbols added to the named theory before checking.

use lexpr::Value;

use super::{checked_line, codec, open_checked_line, DatasetError};
use crate::dual::SieveProof;
use crate::kernel::ProofTree;
use crate::logic::{FunctionSymbol, Sort, Theory};

pub const PROOF_HEADER: &str = "obsproof 1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofArtifact {
    pub theory_id: String,
    pub constants: Vec<(String, Sort)>,
    pub logic: Option<ProofTree>,
    pub sieve: Option<SieveProof>,
}

impl ProofArtifact {
    pub fn new(theory_id: impl Into<String>, constants: Vec<(String, Sort)>) -> Self {
        Self {
            theory_id: theory_id.into(),
            constants,
            logic: None,
            sieve: None,
        }
    }

    /// The theory with this artifact's constants declared.
    pub fn extend(&self, t: &Theory) -> Result<Theory, DatasetError> {
        let mut out = t.clone();
        for (name, sort) in &self.constants {
            if out.signature.function(name).is_some_and(|f| f.arity() == 0 && &f.result_sort == sort) {
                continue;
            }
            out.signature
                .add_function(FunctionSymbol::constant(name, sort.clone()))
                .map_err(|e| DatasetError::Constants(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{PROOF_HEADER}\n");
        let mut line = |v: Value| {
            out.push_str(&checked_line(&v));
            out.push('\n');
        };
        line(Value::list([Value::symbol("theory"), Value::string(self.theory_id.as_str())]));
        let consts = self
            .constants
            .iter()
            .map(|(n, s)| Value::list([Value::string(n.as_str()), Value::string(s.name())]));
        line(Value::list([Value::symbol("constants"), Value::list(consts.collect::<Vec<_>>())]));
        if let Some(p) = &self.logic {
            line(Value::list([Value::symbol("logic"), codec::encode_proof(p)]));
        }
        if let Some(q) = &self.sieve {
            line(Value::list([Value::symbol("sieve"), codec::encode_sieve(q)]));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let bad = |line: usize, reason: &str| DatasetError::MalformedLine {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(PROOF_HEADER) => {}
            Some(_) => return Err(bad(1, "expected header `obsproof 1`")),
            None => return Err(bad(1, "missing header")),
        }
        let mut theory_id = None;
        let mut constants = None;
        let mut logic = None;
        let mut sieve = None;
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let value = open_checked_line(line, lineno)?;
            let items = value.to_ref_vec().ok_or_else(|| bad(lineno, "expected a list"))?;
            let [head, body] = items.as_slice() else {
                return Err(bad(lineno, "expected a tagged entry"));
            };
            let decoded = |r: Result<(), String>| r.map_err(|reason| DatasetError::MalformedLine { line: lineno, reason });
            let fresh = |seen: bool| if seen { Err(bad(lineno, "duplicate entry")) } else { Ok(()) };
            match head.as_symbol() {
                Some("theory") => {
                    fresh(theory_id.is_some())?;
                    theory_id = Some(body.as_str().ok_or_else(|| bad(lineno, "theory id must be a string"))?.to_string());
                }
                Some("constants") => {
                    fresh(constants.is_some())?;
                    constants = Some(decode_constants(body).map_err(|r| bad(lineno, &r))?);
                }
                Some("logic") => {
                    fresh(logic.is_some())?;
                    decoded(codec::decode_proof(body).map(|p| logic = Some(p)))?;
                }
                Some("sieve") => {
                    fresh(sieve.is_some())?;
                    decoded(codec::decode_sieve(body).map(|q| sieve = Some(q)))?;
                }
                _ => return Err(bad(lineno, "unknown entry")),
            }
        }
        let end = text.lines().count() + 1;
        let theory_id = theory_id.ok_or_else(|| bad(end, "missing theory entry"))?;
        if logic.is_none() && sieve.is_none() {
            return Err(bad(end, "no proof in file"));
        }
        Ok(Self {
            theory_id,
            constants: constants.unwrap_or_default(),
            logic,
            sieve,
        })
    }
}

fn decode_constants(v: &Value) -> Result<Vec<(String, Sort)>, String> {
    let items = if v.is_null() { Vec::new() } else { v.to_ref_vec().ok_or("constants must be a list")? };
    items
        .into_iter()
        .map(|c| match c.to_ref_vec().as_deref() {
            Some([n, s]) => match (n.as_str(), s.as_str()) {
                (Some(n), Some(s)) => Ok((n.to_string(), Sort::new(s))),
                _ => Err("constant name and sort must be strings".to_string()),
            },
            _ => Err("constant must be a (name sort) pair".to_string()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_problem, tsym_trans_theory, SourceFile};
    use crate::dual::dualize_proof;
    use crate::engine::{Engine, Limits};

    fn sample() -> (Theory, ProofArtifact) {
        let t = tsym_trans_theory();
        let src = SourceFile::from_str("points a b c. assume E(a, b), E(b, c). goal E(c, a).");
        let pb = parse_problem(&src, &t).unwrap();
        let engine = Engine::new(&pb.theory);
        let fb = engine.saturate(&pb.premises, Limits::default()).unwrap();
        let p = engine.elaborate(&engine.traceback(&fb, pb.goal.as_ref().unwrap()).unwrap()).unwrap();
        let q = dualize_proof(&pb.theory, &p).unwrap();
        let consts = pb.constants.iter().map(|c| (c.name.clone(), c.result_sort.clone())).collect();
        let mut a = ProofArtifact::new("T_sym_trans", consts);
        a.logic = Some(p);
        a.sieve = Some(q);
        (t, a)
    }

    #[test]
    fn round_trip() {
        let (t, a) = sample();
        let text = a.to_text();
        assert!(text.starts_with("obsproof 1\n"));
        let back = ProofArtifact::parse(&text).unwrap();
        assert_eq!(back, a);
        let ext = back.extend(&t).unwrap();
        assert!(ext.signature.function("b").is_some());
        assert_eq!(back.extend(&ext).unwrap(), ext);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(ProofArtifact::parse(""), Err(DatasetError::MalformedLine { line: 1, .. })));
        assert!(matches!(ProofArtifact::parse("obsproof 2\n"), Err(DatasetError::MalformedLine { line: 1, .. })));
        assert!(ProofArtifact::parse("obsproof 1\n").is_err());
        let (_, a) = sample();
        let text = a.to_text();
        let i = text.find("(logic").unwrap() + 10;
        let mut bytes = text.into_bytes();
        bytes[i] ^= 1;
        let err = ProofArtifact::parse(&String::from_utf8(bytes).unwrap()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedLine { line: 4, .. }), "{err}");
    }
}
