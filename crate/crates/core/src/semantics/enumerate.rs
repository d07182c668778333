use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::compile::{CForm, CompiledSequent};
use super::{FiniteModel, SemanticsError};
use crate::logic::{Signature, Sort, Theory};

/// Inclusive carrier-size range per sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeBound {
    default: (usize, usize),
    per_sort: BTreeMap<Sort, (usize, usize)>,
}

impl SizeBound {
    pub fn at_most(n: usize) -> Self {
        Self::between(0, n)
    }

    pub fn exactly(n: usize) -> Self {
        Self::between(n, n)
    }

    pub fn between(lo: usize, hi: usize) -> Self {
        SizeBound {
            default: (lo, hi),
            per_sort: BTreeMap::new(),
        }
    }

    pub fn with_sort(mut self, sort: Sort, lo: usize, hi: usize) -> Self {
        self.per_sort.insert(sort, (lo, hi));
        self
    }

    pub fn range(&self, sort: &Sort) -> (usize, usize) {
        self.per_sort.get(sort).copied().unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapPolicy {
    /// Refuse to start when the space exceeds the cap.
    #[default]
    Error,
    /// Stop silently after `cap` candidates.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub cap: u64,
    pub policy: CapPolicy,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: 1_000_000,
            policy: CapPolicy::Error,
        }
    }
}

fn size_vectors(sig: &Signature, bound: &SizeBound) -> Vec<Vec<usize>> {
    let ranges: Vec<(usize, usize)> = sig.sorts().iter().map(|s| bound.range(s)).collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(cur.clone());
        let mut i = cur.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
        }
    }
}

fn pow_sat(base: u128, exp: u128) -> u128 {
    let Ok(e) = u32::try_from(exp) else {
        return if base <= 1 { base } else { u128::MAX };
    };
    base.checked_pow(e).unwrap_or(u128::MAX)
}

fn candidates_at(sig: &Signature, sizes: &[usize]) -> u128 {
    let idx = |s: &Sort| sig.sorts().iter().position(|t| t == s).expect("sort resolves");
    let cells = |args: &[Sort]| -> u128 {
        args.iter()
            .fold(1u128, |n, s| n.saturating_mul(sizes[idx(s)] as u128))
    };
    let mut total = 1u128;
    for r in sig.relations() {
        total = total.saturating_mul(pow_sat(2, cells(&r.arg_sorts)));
    }
    for f in sig.functions() {
        total = total.saturating_mul(pow_sat(sizes[idx(&f.result_sort)] as u128, cells(&f.arg_sorts)));
    }
    total
}

/// Number of raw candidate structures within `bound`, saturating.
pub fn count_candidates(sig: &Signature, bound: &SizeBound) -> u128 {
    size_vectors(sig, bound)
        .iter()
        .fold(0u128, |n, sizes| n.saturating_add(candidates_at(sig, sizes)))
}

/// Models of `t` within `bound`, smallest carriers first, no isomorphism
/// reduction.
pub fn enumerate_models(t: &Theory, bound: &SizeBound, opts: EnumOptions) -> Result<ModelIter, SemanticsError> {
    let sig = t.signature.clone();
    if opts.policy == CapPolicy::Error {
        let space = count_candidates(&sig, bound);
        if space > u128::from(opts.cap) {
            return Err(SemanticsError::BudgetExceeded { space, cap: opts.cap });
        }
    }
    let template = FiniteModel::uniform(&sig, 1)?;
    let axioms = t
        .axioms
        .iter()
        .map(|ax| CompiledSequent::new(&template, &ax.sequent))
        .collect::<Result<_, _>>()?;
    Ok(ModelIter {
        sizes: size_vectors(&sig, bound),
        sig,
        axioms,
        next_size: 0,
        current: None,
        remaining: opts.cap,
        examined: 0,
    })
}

pub struct ModelIter {
    sig: Signature,
    axioms: Vec<CompiledSequent>,
    sizes: Vec<Vec<usize>>,
    next_size: usize,
    current: Option<FiniteModel>,
    remaining: u64,
    examined: u64,
}

impl ModelIter {
    /// Candidate structures looked at so far.
    pub fn examined(&self) -> u64 {
        self.examined
    }
}

fn increment(m: &mut FiniteModel) -> bool {
    for t in m.relations.values_mut() {
        for c in t.cells.iter_mut() {
            if !*c {
                *c = true;
                return true;
            }
            *c = false;
        }
    }
    let sizes = &m.sizes;
    for (t, res) in m.functions.values_mut() {
        for c in t.cells.iter_mut() {
            if *c + 1 < sizes[*res] {
                *c += 1;
                return true;
            }
            *c = 0;
        }
    }
    false
}

impl Iterator for ModelIter {
    type Item = FiniteModel;

    fn next(&mut self) -> Option<FiniteModel> {
        loop {
            match &mut self.current {
                Some(m) => {
                    if !increment(m) {
                        self.current = None;
                        continue;
                    }
                }
                None => {
                    let sizes = self.sizes.get(self.next_size)?;
                    self.next_size += 1;
                    let map = self.sig.sorts().iter().cloned().zip(sizes.iter().copied()).collect();
                    match FiniteModel::new(&self.sig, &map) {
                        Ok(m) => self.current = Some(m),
                        Err(_) => continue,
                    }
                }
            }
            if self.remaining == 0 {
                self.next_size = self.sizes.len();
                self.current = None;
                return None;
            }
            self.remaining -= 1;
            self.examined += 1;
            let m = self.current.as_ref().expect("set above");
            if self.axioms.iter().all(|a| a.holds(m)) {
                return Some(m.clone());
            }
        }
    }
}

fn atoms<'a>(f: &'a CForm, out: &mut Vec<&'a CForm>) -> bool {
    match f {
        CForm::Rel(..) => {
            out.push(f);
            true
        }
        CForm::Top => true,
        CForm::And(l, r) => atoms(l, out) && atoms(r, out),
        _ => false,
    }
}

/// Closes `m` under the axioms by making violated conclusion atoms true.
///
/// Returns `None` when some violated axiom has a conclusion that is not a
/// conjunction of relation atoms (for instance `⊥` or an equation).
pub fn chase(mut m: FiniteModel, t: &Theory) -> Option<FiniteModel> {
    let axioms: Vec<CompiledSequent> = t
        .axioms
        .iter()
        .map(|ax| CompiledSequent::new(&m, &ax.sequent))
        .collect::<Result<_, _>>()
        .ok()?;
    loop {
        let mut changed = false;
        for ax in &axioms {
            let mut heads = Vec::new();
            if !atoms(&ax.conclusion, &mut heads) {
                if ax.find_violation(&m).is_some() {
                    return None;
                }
                continue;
            }
            while let Some(env) = ax.find_violation(&m) {
                for h in &heads {
                    let (r, cell) = h.cell(&m, &env).expect("atom");
                    m.relations[r].cells[cell] = true;
                }
                changed = true;
            }
        }
        if !changed {
            return Some(m);
        }
    }
}

/// Random structures of the given carrier sizes completed by [`chase`];
/// each relation cell starts true with probability `density`.
pub fn sample_chased_models(
    t: &Theory,
    sizes: &BTreeMap<Sort, usize>,
    count: usize,
    density: f64,
    seed: u64,
) -> Vec<FiniteModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Ok(base) = FiniteModel::new(&t.signature, sizes) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for _ in 0..count.saturating_mul(20) {
        if out.len() == count {
            break;
        }
        let mut m = base.clone();
        for tab in m.relations.values_mut() {
            for c in tab.cells.iter_mut() {
                *c = rng.gen_bool(density);
            }
        }
        let sz = m.sizes.clone();
        for (tab, res) in m.functions.values_mut() {
            for c in tab.cells.iter_mut() {
                *c = rng.gen_range(0..sz[*res]);
            }
        }
        if let Some(m) = chase(m, t) {
            out.push(m);
        }
    }
    out
}
