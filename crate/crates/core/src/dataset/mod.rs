//! Synthetic (sequent, proof) generation and the dual corpus.
//!
//! Each generation round `r` draws premises from a ChaCha8 generator seeded
//! with `seed + r`, saturates them, and turns every derived fact into a
//! record: traceback, elaboration, dual statement, dual proof. Records are
//! validated before they are emitted; failures are counted, never written.
//!
//! Corpus files start with the line `obsdual 1`, followed by one record per
//! line:
//!
//! ```text
//! (record "T_sym" SEQUENT PROOF CLAIM SIEVE
//!   (meta (seed 42) (size 4) (depth 3) (premises 1) (constants 3)) "crc32")
//! ```
//!
//! The trailing string is the CRC-32 of the line up to it, in lowercase hex.

mod artifact;
pub mod codec;
mod stats;

use std::collections::BTreeMap;
use std::io::{self, Write};

use lexpr::Value;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dual::{check_sieve_proof, compile_proof, dualize_proof, dualize_statement, CoveringClaim, DualError, SieveProof};
use crate::engine::{is_inconsistent, Engine, EngineError, Limits};
use crate::kernel::{check_proof, ProofTree};
use crate::logic::{Formula, FunctionSymbol, Sequent, Sort, Term, Theory};

pub use artifact::{ProofArtifact, PROOF_HEADER};
pub use stats::{corpus_stats, CorpusStats};

pub const HEADER: &str = "obsdual 1";
pub const SCHEMA_VERSION: u32 = 1;

/// Rounds in a row without a record before generation gives up.
pub const MAX_EMPTY_ROUNDS: u64 = 64;
pub const CONSISTENCY_RETRIES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub theory_id: String,
    pub constant_count: usize,
    pub premise_count: usize,
    pub seed: u64,
    pub limits: Limits,
    pub max_records: usize,
}

impl GenConfig {
    pub fn new(theory_id: impl Into<String>, seed: u64) -> Self {
        GenConfig {
            theory_id: theory_id.into(),
            constant_count: 4,
            premise_count: 3,
            seed,
            limits: Limits::default(),
            max_records: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Meta {
    pub seed: u64,
    pub proof_size: usize,
    pub proof_depth: usize,
    pub premise_count: usize,
    pub constant_count: usize,
}

/// A record before dualization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicRecord {
    pub theory_id: String,
    pub sequent: Sequent,
    pub proof: ProofTree,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub theory_id: String,
    pub sequent: Sequent,
    pub proof: ProofTree,
    pub dual_claim: CoveringClaim,
    pub dual_proof: SieveProof,
    pub meta: Meta,
}

impl DatasetRecord {
    pub fn logic(&self) -> LogicRecord {
        LogicRecord {
            theory_id: self.theory_id.clone(),
            sequent: self.sequent.clone(),
            proof: self.proof.clone(),
            meta: self.meta,
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("theory `{0}` has no Horn rules to generate from")]
    NoHornRules(String),
    #[error("no consistent premises after {retries} attempts (seed {seed})")]
    ConsistencyRetriesExhausted { seed: u64, retries: usize },
    #[error("cannot add generated constants: {0}")]
    Constants(String),
    #[error("record {index}: {source}")]
    Dual { index: usize, source: DualError },
    #[error("line 1: unsupported corpus header `{found}`, expected `{HEADER}`")]
    SchemaVersionMismatch { found: String },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Names and sorts of the generated constants: `c0, c1, …` for a single
/// sort, `c0_S, …` per sort otherwise.
pub fn constant_names(t: &Theory, n: usize) -> Vec<(String, Sort)> {
    let sorts = t.signature.sorts();
    let mut out = Vec::new();
    for sort in sorts {
        for i in 0..n {
            let name = if sorts.len() == 1 {
                format!("c{i}")
            } else {
                format!("c{i}_{}", sort.name())
            };
            out.push((name, sort.clone()));
        }
    }
    out
}

/// `t` with `n` fresh constants per sort.
pub fn with_constants(t: &Theory, n: usize) -> Result<Theory, DatasetError> {
    let mut out = t.clone();
    for (name, sort) in constant_names(t, n) {
        out.signature
            .add_function(FunctionSymbol::constant(name, sort))
            .map_err(|e| DatasetError::Constants(e.to_string()))?;
    }
    Ok(out)
}

/// Every ground relation atom over the given constants, relation by
/// relation, argument tuples in lexicographic order.
pub fn herbrand_atoms(t: &Theory, constants: &[(String, Sort)]) -> Vec<Formula> {
    let mut out = Vec::new();
    for rel in t.signature.relations() {
        let choices: Vec<Vec<&String>> = rel
            .arg_sorts
            .iter()
            .map(|s| constants.iter().filter(|c| &c.1 == s).map(|c| &c.0).collect())
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; choices.len()];
        'odo: loop {
            out.push(Formula::rel(
                rel.name.clone(),
                idx.iter().zip(&choices).map(|(&i, c)| Term::constant(c[i].clone())).collect(),
            ));
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    continue 'odo;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out
}

struct Generator {
    base: Theory,
    engine: Engine,
    atoms: Vec<Formula>,
    cfg: GenConfig,
}

impl Generator {
    fn new(t: &Theory, cfg: &GenConfig) -> Result<Self, DatasetError> {
        let ext = with_constants(t, cfg.constant_count)?;
        let engine = Engine::new(&ext);
        if engine.rules().is_empty() {
            return Err(DatasetError::NoHornRules(t.id.clone()));
        }
        let atoms = herbrand_atoms(&ext, &constant_names(t, cfg.constant_count));
        Ok(Generator {
            base: t.clone(),
            engine,
            atoms,
            cfg: cfg.clone(),
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, seed: u64) -> Result<Vec<Formula>, DatasetError> {
        let k = self.cfg.premise_count.min(self.atoms.len());
        for _ in 0..CONSISTENCY_RETRIES {
            let mut picked = sample(rng, self.atoms.len(), k).into_vec();
            picked.sort_unstable();
            let premises: Vec<Formula> = picked.into_iter().map(|i| self.atoms[i].clone()).collect();
            match self.engine.saturate(&premises, self.cfg.limits) {
                Ok(fb) if !is_inconsistent(&fb) => return Ok(premises),
                Ok(_) => continue,
                Err(EngineError::LimitExceeded { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Err(DatasetError::ConsistencyRetriesExhausted {
            seed,
            retries: CONSISTENCY_RETRIES,
        })
    }

    fn round(&self, round: u64) -> RoundOutput {
        let seed = self.cfg.seed.wrapping_add(round);
        let mut out = RoundOutput::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let premises = match self.sample(&mut rng, seed) {
            Ok(p) => p,
            Err(DatasetError::ConsistencyRetriesExhausted { .. }) => {
                out.skip("retries");
                return out;
            }
            Err(_) => {
                out.skip("limits");
                return out;
            }
        };
        self.derive(&premises, seed, out)
    }

    fn derive(&self, premises: &[Formula], seed: u64, mut out: RoundOutput) -> RoundOutput {
        let fb = match self.engine.saturate(premises, self.cfg.limits) {
            Ok(fb) => fb,
            Err(_) => {
                out.skip("limits");
                return out;
            }
        };
        for target in fb.derived() {
            let logic = self
                .engine
                .traceback(&fb, target)
                .and_then(|g| Ok((self.engine.elaborate(&g)?, g)))
                .map(|(proof, g)| LogicRecord {
                    theory_id: self.base.id.clone(),
                    sequent: g.sequent(),
                    meta: Meta {
                        seed,
                        proof_size: proof.size(),
                        proof_depth: proof.depth(),
                        premise_count: g.leaves().len(),
                        constant_count: self.cfg.constant_count,
                    },
                    proof,
                });
            let logic = match logic {
                Ok(l) => l,
                Err(EngineError::LimitExceeded { .. }) => {
                    out.skip("limits");
                    continue;
                }
                Err(_) => {
                    out.skip("invalid");
                    continue;
                }
            };
            match dualize_record(self.engine.theory(), logic) {
                Ok(rec) => match validate(self.engine.theory(), &rec) {
                    Ok(()) => out.records.push(rec),
                    Err(_) => out.skip("invalid"),
                },
                Err(DualError::UnsupportedRule { .. }) => out.skip("unsupported"),
                Err(_) => out.skip("invalid"),
            }
        }
        out
    }
}

#[derive(Debug, Default)]
struct RoundOutput {
    records: Vec<DatasetRecord>,
    skipped: BTreeMap<&'static str, usize>,
}

impl RoundOutput {
    fn skip(&mut self, why: &'static str) {
        *self.skipped.entry(why).or_default() += 1;
    }
}

/// Records plus the number of candidates dropped, by reason: `limits`,
/// `retries`, `unsupported` (proof outside the dual fragment), `invalid`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Generation {
    pub records: Vec<DatasetRecord>,
    pub skipped: BTreeMap<&'static str, usize>,
    pub rounds: u64,
}

/// Seeded premise sample over fresh constants, consistent under saturation.
pub fn sample_premises(t: &Theory, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Formula>, DatasetError> {
    Generator::new(t, cfg)?.sample(rng, cfg.seed)
}

/// Records for every derived fact of a fixed premise set over the
/// generated constants; premises and skip counts as in a generation round.
pub fn records_from_premises(t: &Theory, cfg: &GenConfig, premises: &[Formula]) -> Result<Generation, DatasetError> {
    let g = Generator::new(t, cfg)?;
    let r = g.derive(premises, cfg.seed, RoundOutput::default());
    Ok(Generation {
        records: r.records,
        skipped: r.skipped,
        rounds: 1,
    })
}

pub fn generate_records(t: &Theory, cfg: &GenConfig) -> Result<Generation, DatasetError> {
    generate_records_parallel(t, cfg, 1)
}

/// Same output as [`generate_records`] for every `workers >= 1`: rounds are
/// computed in batches of `workers` and merged in round order.
pub fn generate_records_parallel(t: &Theory, cfg: &GenConfig, workers: usize) -> Result<Generation, DatasetError> {
    let generator = Generator::new(t, cfg)?;
    let workers = workers.max(1) as u64;
    let mut out = Generation::default();
    let mut empty = 0u64;
    let mut next = 0u64;
    while out.records.len() < cfg.max_records && empty < MAX_EMPTY_ROUNDS {
        let batch: Vec<RoundOutput> = if workers == 1 {
            vec![generator.round(next)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (next..next + workers)
                    .map(|r| {
                        let g = &generator;
                        s.spawn(move || g.round(r))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("round worker panicked")).collect()
            })
        };
        for r in batch {
            if out.records.len() >= cfg.max_records || empty >= MAX_EMPTY_ROUNDS {
                break;
            }
            out.rounds += 1;
            if r.records.is_empty() {
                empty += 1;
            } else {
                empty = 0;
            }
            for (k, v) in r.skipped {
                *out.skipped.entry(k).or_default() += v;
            }
            let room = cfg.max_records - out.records.len();
            out.records.extend(r.records.into_iter().take(room));
        }
        next += workers;
    }
    Ok(out)
}

fn dualize_record(t: &Theory, r: LogicRecord) -> Result<DatasetRecord, DualError> {
    let dual_claim = dualize_statement(t, &r.sequent)?;
    let dual_proof = dualize_proof(t, &r.proof)?;
    Ok(DatasetRecord {
        theory_id: r.theory_id,
        sequent: r.sequent,
        proof: r.proof,
        dual_claim,
        dual_proof,
        meta: r.meta,
    })
}

/// Adds dual statements and proofs, preserving order and count.
pub fn dualize_dataset(t: &Theory, records: Vec<LogicRecord>) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut cache: BTreeMap<usize, Theory> = BTreeMap::new();
    let mut out = Vec::with_capacity(records.len());
    for (index, r) in records.into_iter().enumerate() {
        let n = r.meta.constant_count;
        let ext = match cache.entry(n) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(with_constants(t, n)?),
        };
        out.push(dualize_record(ext, r).map_err(|source| DatasetError::Dual { index, source })?);
    }
    Ok(out)
}

/// Every record invariant, against `t` already extended with the record's
/// constants.
pub fn validate(t: &Theory, r: &DatasetRecord) -> Result<(), String> {
    if t.id != r.theory_id {
        return Err(format!("record is for theory `{}`, not `{}`", r.theory_id, t.id));
    }
    let s = check_proof(t, &r.proof).map_err(|e| format!("proof rejected: {e}"))?;
    if s != r.sequent {
        return Err("proof does not conclude the record's sequent".into());
    }
    let expected = dualize_statement(t, &r.sequent).map_err(|e| e.to_string())?;
    if expected != r.dual_claim {
        return Err("dual claim is not the dual of the sequent".into());
    }
    let c = check_sieve_proof(t, &r.dual_proof).map_err(|e| format!("dual proof rejected: {e}"))?;
    if c != r.dual_claim {
        return Err("dual proof does not conclude the dual claim".into());
    }
    let back = compile_proof(t, &r.dual_proof).map_err(|e| format!("dual proof does not compile: {e}"))?;
    if back.conclusion != r.sequent {
        return Err("compiled proof changes the sequent".into());
    }
    let m = &r.meta;
    if m.proof_size != r.proof.size() || m.proof_depth != r.proof.depth() {
        return Err("meta size or depth is wrong".into());
    }
    if m.premise_count != r.sequent.premise.conjuncts().iter().filter(|f| **f != &Formula::Top).count() {
        return Err("meta premise count is wrong".into());
    }
    Ok(())
}

fn encode_meta(m: &Meta) -> Value {
    let field = |k: &str, v: u64| Value::list([Value::symbol(k), Value::from(v)]);
    Value::list([
        Value::symbol("meta"),
        field("seed", m.seed),
        field("size", m.proof_size as u64),
        field("depth", m.proof_depth as u64),
        field("premises", m.premise_count as u64),
        field("constants", m.constant_count as u64),
    ])
}

fn decode_meta(v: &Value) -> Result<Meta, String> {
    let items = v.to_ref_vec().ok_or("meta must be a list")?;
    let keys = ["meta", "seed", "size", "depth", "premises", "constants"];
    if items.len() != keys.len() || items[0].as_symbol() != Some("meta") {
        return Err("malformed meta".into());
    }
    let mut vals = [0u64; 5];
    for (i, item) in items[1..].iter().enumerate() {
        let pair = item.to_ref_vec().ok_or("meta fields are pairs")?;
        match pair.as_slice() {
            [k, n] if k.as_symbol() == Some(keys[i + 1]) => {
                vals[i] = n.as_u64().ok_or_else(|| format!("meta `{}` must be a number", keys[i + 1]))?;
            }
            _ => return Err(format!("expected meta field `{}`", keys[i + 1])),
        }
    }
    let size = |x: u64| usize::try_from(x).map_err(|e| e.to_string());
    Ok(Meta {
        seed: vals[0],
        proof_size: size(vals[1])?,
        proof_depth: size(vals[2])?,
        premise_count: size(vals[3])?,
        constant_count: size(vals[4])?,
    })
}

/// One corpus line, without the newline.
pub fn record_line(r: &DatasetRecord) -> String {
    let body = Value::list([
        Value::symbol("record"),
        Value::string(r.theory_id.as_str()),
        codec::encode_sequent(&r.sequent),
        codec::encode_proof(&r.proof),
        codec::encode_claim(&r.dual_claim),
        codec::encode_sieve(&r.dual_proof),
        encode_meta(&r.meta),
    ]);
    checked_line(&body)
}

pub fn parse_record_line(line: &str, lineno: usize) -> Result<DatasetRecord, DatasetError> {
    let value = open_checked_line(line, lineno)?;
    decode_record(&value).map_err(|reason| DatasetError::MalformedLine { line: lineno, reason })
}

/// Renders a list value with a CRC32 of its text appended as a last element.
pub fn checked_line(v: &Value) -> String {
    let text = codec::to_text(v);
    let open = &text[..text.len() - 1];
    format!("{open} \"{:08x}\")", crc32fast::hash(open.as_bytes()))
}

/// Inverse of [`checked_line`]: verifies the checksum and returns the value
/// without it.
pub fn open_checked_line(line: &str, lineno: usize) -> Result<Value, DatasetError> {
    let bad = |reason: String| DatasetError::MalformedLine { line: lineno, reason };
    const SUFFIX: usize = 12;
    let n = line.len();
    let (open, tail) = match (n >= SUFFIX).then(|| (line.get(..n - SUFFIX), line.get(n - SUFFIX..))) {
        Some((Some(open), Some(tail))) => (open, tail),
        _ => return Err(bad("line is truncated".into())),
    };
    let crc = tail
        .strip_prefix(" \"")
        .and_then(|t| t.strip_suffix("\")"))
        .filter(|h| h.len() == 8 && h.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)))
        .and_then(|h| u32::from_str_radix(h, 16).ok())
        .ok_or_else(|| bad("missing checksum".into()))?;
    if crc32fast::hash(open.as_bytes()) != crc {
        return Err(bad("checksum mismatch".into()));
    }
    codec::parse_value(&format!("{open})")).map_err(bad)
}

fn decode_record(v: &Value) -> Result<DatasetRecord, String> {
    let items = v.to_ref_vec().ok_or("record must be a list")?;
    let [head, id, seq, proof, claim, sieve, meta] = items.as_slice() else {
        return Err(format!("record has {} fields, expected 7", items.len()));
    };
    if head.as_symbol() != Some("record") {
        return Err("expected `record`".into());
    }
    Ok(DatasetRecord {
        theory_id: id.as_str().ok_or("theory id must be a string")?.to_string(),
        sequent: codec::decode_sequent(seq)?,
        proof: codec::decode_proof(proof)?,
        dual_claim: codec::decode_claim(claim)?,
        dual_proof: codec::decode_sieve(sieve)?,
        meta: decode_meta(meta)?,
    })
}

pub fn serialize(records: &[DatasetRecord], sink: &mut impl Write) -> io::Result<()> {
    writeln!(sink, "{HEADER}")?;
    for r in records {
        writeln!(sink, "{}", record_line(r))?;
    }
    Ok(())
}

pub fn serialize_to_string(records: &[DatasetRecord]) -> String {
    let mut buf = Vec::new();
    serialize(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("records are UTF-8")
}

fn check_header(text: &str) -> Result<(), DatasetError> {
    let first = text.lines().next().ok_or_else(|| DatasetError::MalformedLine {
        line: 1,
        reason: "missing header".into(),
    })?;
    if first == HEADER {
        return Ok(());
    }
    if first.starts_with("obsdual ") {
        return Err(DatasetError::SchemaVersionMismatch {
            found: first.to_string(),
        });
    }
    Err(DatasetError::MalformedLine {
        line: 1,
        reason: format!("expected header `{HEADER}`"),
    })
}

/// Parses a whole corpus; the first bad line aborts with its 1-based number.
pub fn deserialize(text: &str) -> Result<Vec<DatasetRecord>, DatasetError> {
    check_header(text)?;
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, line)| parse_record_line(line, i + 1))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub records: usize,
    /// 1-based line number and reason for each rejected line.
    pub invalid: Vec<(usize, String)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.invalid.is_empty()
    }
}

/// Re-checks every record independently against the theory named by its
/// id. Header problems abort; bad lines are collected.
pub fn verify_corpus(text: &str, resolve: &dyn Fn(&str) -> Option<Theory>) -> Result<VerifyReport, DatasetError> {
    check_header(text)?;
    let mut report = VerifyReport::default();
    let mut theories: BTreeMap<(String, usize), Option<Theory>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let lineno = i + 1;
        report.records += 1;
        let r = match parse_record_line(line, lineno) {
            Ok(r) => r,
            Err(e) => {
                let reason = match e {
                    DatasetError::MalformedLine { reason, .. } => reason,
                    other => other.to_string(),
                };
                report.invalid.push((lineno, reason));
                continue;
            }
        };
        let key = (r.theory_id.clone(), r.meta.constant_count);
        let t = theories
            .entry(key)
            .or_insert_with(|| resolve(&r.theory_id).and_then(|t| with_constants(&t, r.meta.constant_count).ok()));
        let verdict = match t {
            Some(t) => validate(t, &r),
            None => Err(format!("unknown theory `{}`", r.theory_id)),
        };
        if let Err(reason) = verdict {
            report.invalid.push((lineno, reason));
        }
    }
    Ok(report)
}

/// Lines through `n` points in general position: `n(n-1)/2`.
pub fn candidate_lines(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}
