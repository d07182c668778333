use std::collections::HashMap;
use std::fmt;

use super::{grounding, EngineError, HornRule, Universe};
use crate::logic::{Formula, Signature, Substitution, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_facts: usize,
    pub max_rounds: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_facts: 100_000,
            max_rounds: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Facts,
    Rounds,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Facts => "facts",
            LimitKind::Rounds => "rounds",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Each round joins at least one atom against the previous round's facts.
    #[default]
    SemiNaive,
    /// Each round re-joins every rule against every fact.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaturationStats {
    pub rounds: usize,
    /// Rule instances whose body matched.
    pub instances: u64,
    /// Atom-against-fact match attempts.
    pub probes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Premise,
    Derived {
        rule: String,
        subst: Substitution,
        /// Indices of the body facts, in body order.
        parents: Vec<usize>,
        round: usize,
    },
}

/// Ground atoms in derivation order, each with how it was first obtained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactBase {
    facts: Vec<Formula>,
    index: HashMap<Formula, usize>,
    provenance: Vec<Provenance>,
    stats: SaturationStats,
}

impl FactBase {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, atom: &Formula) -> bool {
        self.index.contains_key(atom)
    }

    pub fn index_of(&self, atom: &Formula) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn fact(&self, i: usize) -> &Formula {
        &self.facts[i]
    }

    pub fn facts(&self) -> &[Formula] {
        &self.facts
    }

    pub fn provenance(&self, i: usize) -> &Provenance {
        &self.provenance[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, &Provenance)> {
        self.facts.iter().zip(&self.provenance)
    }

    /// Facts that are not premises, in derivation order.
    pub fn derived(&self) -> impl Iterator<Item = &Formula> {
        self.iter()
            .filter(|(_, p)| matches!(p, Provenance::Derived { .. }))
            .map(|(f, _)| f)
    }

    pub fn stats(&self) -> SaturationStats {
        self.stats
    }
}

const NO_CONST: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Var(usize),
    Const(u32),
}

#[derive(Debug, Clone)]
struct CAtom {
    pred: usize,
    args: Vec<Slot>,
}

#[derive(Debug, Clone)]
struct CRule {
    name: String,
    var_sorts: Vec<usize>,
    body: Vec<CAtom>,
    head: CAtom,
    /// Context variables absent from the body: enumerated if they occur in
    /// the head, otherwise fixed to the first constant of their sort.
    unbound: Vec<(usize, bool)>,
    source: HornRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GFact {
    pred: usize,
    args: Vec<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub(crate) universe: Universe,
    rel_names: Vec<String>,
    rules: Vec<CRule>,
    eq_rules: Vec<CRule>,
}

impl Compiled {
    pub(crate) fn new(sig: &Signature, rules: &[HornRule], eq_rules: &[HornRule]) -> Self {
        let universe = Universe::new(sig);
        let rel_names: Vec<String> = sig.relations().map(|r| r.name.clone()).collect();
        let mut c = Compiled {
            universe,
            rel_names,
            rules: Vec::new(),
            eq_rules: Vec::new(),
        };
        c.rules = rules.iter().map(|r| c.rule(sig, r)).collect();
        c.eq_rules = eq_rules.iter().map(|r| c.rule(sig, r)).collect();
        c
    }

    fn eq_pred(&self) -> usize {
        self.rel_names.len()
    }

    fn bottom_pred(&self) -> usize {
        self.rel_names.len() + 1
    }

    fn slot(&self, r: &HornRule, t: &Term) -> Slot {
        match t {
            Term::Var(v) => Slot::Var(r.context.position(v).expect("rule is well-formed")),
            Term::App(c, _) => Slot::Const(self.universe.by_name[c]),
        }
    }

    fn atom(&self, r: &HornRule, f: &Formula) -> CAtom {
        match f {
            Formula::Rel(name, args) => CAtom {
                pred: self.rel_names.iter().position(|n| n == name).expect("relation resolves"),
                args: args.iter().map(|t| self.slot(r, t)).collect(),
            },
            Formula::Eq(l, rr) => CAtom {
                pred: self.eq_pred(),
                args: vec![self.slot(r, l), self.slot(r, rr)],
            },
            Formula::Bottom => CAtom {
                pred: self.bottom_pred(),
                args: Vec::new(),
            },
            other => unreachable!("horn atom expected, found {other}"),
        }
    }

    fn rule(&self, sig: &Signature, r: &HornRule) -> CRule {
        let body: Vec<CAtom> = r.body.iter().map(|f| self.atom(r, f)).collect();
        let head = self.atom(r, &r.head);
        let var_sorts: Vec<usize> = r
            .context
            .vars()
            .iter()
            .map(|v| sig.sorts().iter().position(|s| *s == v.sort).expect("sort resolves"))
            .collect();
        let occurs = |atoms: &[&CAtom], k: usize| atoms.iter().any(|a| a.args.contains(&Slot::Var(k)));
        let body_refs: Vec<&CAtom> = body.iter().collect();
        let unbound = (0..var_sorts.len())
            .filter(|&k| !occurs(&body_refs, k))
            .map(|k| (k, occurs(&[&head], k)))
            .collect();
        CRule {
            name: r.name.clone(),
            var_sorts,
            body,
            head,
            unbound,
            source: r.clone(),
        }
    }

    fn ground(&self, a: &CAtom, bind: &[u32]) -> GFact {
        GFact {
            pred: a.pred,
            args: a
                .args
                .iter()
                .map(|s| match *s {
                    Slot::Var(k) => bind[k],
                    Slot::Const(c) => c,
                })
                .collect(),
        }
    }

    fn to_formula(&self, g: &GFact) -> Formula {
        let c = |i: u32| Term::constant(self.universe.names[i as usize].clone());
        if g.pred == self.bottom_pred() {
            Formula::Bottom
        } else if g.pred == self.eq_pred() {
            Formula::Eq(c(g.args[0]), c(g.args[1]))
        } else {
            Formula::rel(self.rel_names[g.pred].clone(), g.args.iter().map(|&a| c(a)).collect())
        }
    }

    fn from_formula(&self, f: &Formula) -> GFact {
        let c = |t: &Term| match t {
            Term::App(name, _) => self.universe.by_name[name],
            Term::Var(_) => unreachable!("premises are ground"),
        };
        match f {
            Formula::Bottom => GFact {
                pred: self.bottom_pred(),
                args: Vec::new(),
            },
            Formula::Eq(l, r) => GFact {
                pred: self.eq_pred(),
                args: vec![c(l), c(r)],
            },
            Formula::Rel(name, args) => GFact {
                pred: self.rel_names.iter().position(|n| n == name).expect("validated"),
                args: args.iter().map(c).collect(),
            },
            other => unreachable!("validated atom, found {other}"),
        }
    }

    pub(crate) fn run(
        &self,
        premises: &[Formula],
        limits: Limits,
        strategy: Strategy,
        with_eq: bool,
    ) -> Result<FactBase, EngineError> {
        let rules: Vec<&CRule> = self
            .rules
            .iter()
            .chain(if with_eq { &self.eq_rules[..] } else { &[] })
            .collect();
        let mut st = State {
            facts: Vec::new(),
            index: HashMap::new(),
            by_pred: vec![Vec::new(); self.bottom_pred() + 1],
            prov: Vec::new(),
        };
        let mut stats = SaturationStats::default();
        for p in premises {
            st.add(self.from_formula(p), None);
        }
        if st.facts.len() > limits.max_facts {
            return Err(self.limit(LimitKind::Facts, st, stats, &rules));
        }
        let bottom = GFact {
            pred: self.bottom_pred(),
            args: Vec::new(),
        };
        let mut old_end = 0;
        let mut delta_end = st.facts.len();
        let mut round = 0;
        loop {
            round += 1;
            if round > limits.max_rounds {
                return Err(self.limit(LimitKind::Rounds, st, stats, &rules));
            }
            let before = st.facts.len();
            for (ri, rule) in rules.iter().enumerate() {
                let mut cands: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
                let k = rule.body.len();
                let mut bind = vec![NO_CONST; rule.var_sorts.len()];
                let mut parents = Vec::new();
                if k == 0 {
                    if strategy == Strategy::Naive || round == 1 {
                        self.complete(rule, &mut bind, &parents, 0, &mut cands, &mut stats);
                    }
                } else if strategy == Strategy::Naive {
                    let ranges = vec![(0, delta_end); k];
                    self.join(&st, &mut stats, rule, &ranges, 0, &mut bind, &mut parents, &mut cands);
                } else {
                    if old_end == delta_end {
                        continue;
                    }
                    for i in 0..k {
                        let ranges: Vec<(usize, usize)> = (0..k)
                            .map(|j| match j.cmp(&i) {
                                std::cmp::Ordering::Less => (0, old_end),
                                std::cmp::Ordering::Equal => (old_end, delta_end),
                                std::cmp::Ordering::Greater => (0, delta_end),
                            })
                            .collect();
                        self.join(&st, &mut stats, rule, &ranges, 0, &mut bind, &mut parents, &mut cands);
                    }
                }
                cands.sort();
                cands.dedup_by(|a, b| a.0 == b.0);
                for (b, ps) in cands {
                    let head = self.ground(&rule.head, &b);
                    if st.index.contains_key(&head) {
                        continue;
                    }
                    st.add(head, Some((ri, b, ps, round)));
                    if st.facts.len() > limits.max_facts {
                        return Err(self.limit(LimitKind::Facts, st, stats, &rules));
                    }
                }
            }
            stats.rounds = round;
            if st.facts.len() == before || st.index.contains_key(&bottom) {
                break;
            }
            old_end = delta_end;
            delta_end = st.facts.len();
        }
        Ok(self.finish(st, stats, &rules))
    }

    fn limit(&self, kind: LimitKind, st: State, stats: SaturationStats, rules: &[&CRule]) -> EngineError {
        EngineError::LimitExceeded {
            kind,
            partial: Box::new(self.finish(st, stats, rules)),
        }
    }

    fn finish(&self, st: State, stats: SaturationStats, rules: &[&CRule]) -> FactBase {
        let facts: Vec<Formula> = st.facts.iter().map(|g| self.to_formula(g)).collect();
        let index = facts.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let provenance = st
            .prov
            .into_iter()
            .map(|p| match p {
                None => Provenance::Premise,
                Some((ri, b, parents, round)) => {
                    let rule = rules[ri];
                    let names: Vec<String> =
                        b.iter().map(|&c| self.universe.names[c as usize].clone()).collect();
                    Provenance::Derived {
                        rule: rule.name.clone(),
                        subst: grounding(&rule.source.context, &names),
                        parents,
                        round,
                    }
                }
            })
            .collect();
        FactBase {
            facts,
            index,
            provenance,
            stats,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn join(
        &self,
        st: &State,
        stats: &mut SaturationStats,
        rule: &CRule,
        ranges: &[(usize, usize)],
        i: usize,
        bind: &mut Vec<u32>,
        parents: &mut Vec<usize>,
        out: &mut Vec<(Vec<u32>, Vec<usize>)>,
    ) {
        if i == rule.body.len() {
            self.complete(rule, bind, parents, 0, out, stats);
            return;
        }
        let atom = &rule.body[i];
        let (lo, hi) = ranges[i];
        if lo >= hi {
            return;
        }
        let list = &st.by_pred[atom.pred];
        let a = list.partition_point(|&id| id < lo);
        let b = list.partition_point(|&id| id < hi);
        let mut newly = Vec::new();
        for &id in &list[a..b] {
            stats.probes += 1;
            newly.clear();
            let ok = self.unify(rule, atom, &st.facts[id].args, bind, &mut newly);
            if ok {
                parents.push(id);
                self.join(st, stats, rule, ranges, i + 1, bind, parents, out);
                parents.pop();
            }
            for &k in &newly {
                bind[k] = NO_CONST;
            }
        }
    }

    fn unify(&self, rule: &CRule, atom: &CAtom, args: &[u32], bind: &mut [u32], newly: &mut Vec<usize>) -> bool {
        for (slot, &c) in atom.args.iter().zip(args) {
            match *slot {
                Slot::Const(d) => {
                    if d != c {
                        return false;
                    }
                }
                Slot::Var(k) => {
                    if bind[k] == NO_CONST {
                        if self.universe.sort_of[c as usize] != rule.var_sorts[k] {
                            return false;
                        }
                        bind[k] = c;
                        newly.push(k);
                    } else if bind[k] != c {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn complete(
        &self,
        rule: &CRule,
        bind: &mut Vec<u32>,
        parents: &[usize],
        j: usize,
        out: &mut Vec<(Vec<u32>, Vec<usize>)>,
        stats: &mut SaturationStats,
    ) {
        let Some(&(k, in_head)) = rule.unbound.get(j) else {
            stats.instances += 1;
            out.push((bind.clone(), parents.to_vec()));
            return;
        };
        let consts = &self.universe.by_sort[rule.var_sorts[k]];
        let choices = if in_head { &consts[..] } else { &consts[..consts.len().min(1)] };
        for &c in choices {
            bind[k] = c;
            self.complete(rule, bind, parents, j + 1, out, stats);
        }
        bind[k] = NO_CONST;
    }
}

struct State {
    facts: Vec<GFact>,
    index: HashMap<GFact, usize>,
    by_pred: Vec<Vec<usize>>,
    prov: Vec<Option<(usize, Vec<u32>, Vec<usize>, usize)>>,
}

impl State {
    fn add(&mut self, g: GFact, prov: Option<(usize, Vec<u32>, Vec<usize>, usize)>) {
        if self.index.contains_key(&g) {
            return;
        }
        let id = self.facts.len();
        self.by_pred[g.pred].push(id);
        self.index.insert(g.clone(), id);
        self.facts.push(g);
        self.prov.push(prov);
    }
}
