//! Canonical S-expression encoding of terms, formulas, proofs and claims.
//!
//! ```text
//! term     (v "x" "V") | (f "name" term...)
//! formula  top | bot | (rel "R" term...) | (eq term term) | (and f f)
//!          | (or f...) | (ex (v "y" "V") f)
//! context  (ctx (v "x" "V")...)
//! sequent  (seq context formula formula)
//! subst    (subst ((v "x" "V") term)...)
//! proof    (p "rule" (payload...) (proof...) sequent)
//! object   (obj context formula)
//! morphism (mono object object formula) | (smap object object subst)
//! claim    (claim object (morphism...))
//! sieve    (s "rule" (payload...) (sieve...) claim)
//! ```

use lexpr::Value;

use crate::dual::{CoveringClaim, MorphismKind, SieveProof, SieveRule, SieveTag, SiteMorphism, SiteObject};
use crate::kernel::{ProofTree, Rule, RuleTag};
use crate::logic::{Context, Formula, Sequent, Sort, Substitution, Term, Variable};

pub type DecodeResult<T> = Result<T, String>;

fn sym(s: &str) -> Value {
    Value::symbol(s)
}

fn tagged(tag: &str, rest: impl IntoIterator<Item = Value>) -> Value {
    Value::list(std::iter::once(sym(tag)).chain(rest))
}

pub fn encode_var(v: &Variable) -> Value {
    tagged("v", [Value::string(v.name.as_str()), Value::string(v.sort.name())])
}

pub fn encode_term(t: &Term) -> Value {
    match t {
        Term::Var(v) => encode_var(v),
        Term::App(f, args) => tagged("f", std::iter::once(Value::string(f.as_str())).chain(args.iter().map(encode_term))),
    }
}

pub fn encode_formula(f: &Formula) -> Value {
    match f {
        Formula::Top => sym("top"),
        Formula::Bottom => sym("bot"),
        Formula::Rel(r, args) => tagged("rel", std::iter::once(Value::string(r.as_str())).chain(args.iter().map(encode_term))),
        Formula::Eq(a, b) => tagged("eq", [encode_term(a), encode_term(b)]),
        Formula::And(a, b) => tagged("and", [encode_formula(a), encode_formula(b)]),
        Formula::Or(list) => tagged("or", list.iter().map(encode_formula)),
        Formula::Exists(v, body) => tagged("ex", [encode_var(v), encode_formula(body)]),
    }
}

pub fn encode_context(c: &Context) -> Value {
    tagged("ctx", c.vars().iter().map(encode_var))
}

pub fn encode_sequent(s: &Sequent) -> Value {
    tagged(
        "seq",
        [encode_context(&s.context), encode_formula(&s.premise), encode_formula(&s.conclusion)],
    )
}

pub fn encode_subst(s: &Substitution) -> Value {
    tagged("subst", s.iter().map(|(v, t)| Value::list([encode_var(v), encode_term(t)])))
}

pub fn encode_proof(p: &ProofTree) -> Value {
    let payload: Vec<Value> = match &p.rule {
        Rule::Axiom(name) => vec![Value::string(name.as_str())],
        Rule::Subst(s) => vec![encode_subst(s)],
        Rule::OrIntro(i) => vec![Value::from(*i as u64)],
        Rule::ExistsFwd(v) | Rule::ExistsBwd(v) | Rule::EqRefl(v) => vec![encode_var(v)],
        Rule::EqSubst(v, w) => vec![encode_var(v), encode_var(w)],
        _ => vec![],
    };
    tagged(
        "p",
        [
            Value::string(p.rule.tag().name()),
            Value::list(payload),
            Value::list(p.premises.iter().map(encode_proof)),
            encode_sequent(&p.conclusion),
        ],
    )
}

pub fn encode_object(o: &SiteObject) -> Value {
    tagged("obj", [encode_context(&o.context), encode_formula(&o.formula)])
}

pub fn encode_morphism(m: &SiteMorphism) -> Value {
    let (tag, last) = match &m.kind {
        MorphismKind::EntailMono { extra } => ("mono", encode_formula(extra)),
        MorphismKind::SubstMap { subst } => ("smap", encode_subst(subst)),
    };
    tagged(tag, [encode_object(&m.source), encode_object(&m.target), last])
}

pub fn encode_claim(c: &CoveringClaim) -> Value {
    tagged(
        "claim",
        [encode_object(&c.base), Value::list(c.family.iter().map(encode_morphism))],
    )
}

pub fn encode_sieve(q: &SieveProof) -> Value {
    let payload: Vec<Value> = match &q.rule {
        SieveRule::AxiomCover(name) => vec![Value::string(name.as_str())],
        SieveRule::Stability(m) => vec![encode_morphism(m)],
        _ => vec![],
    };
    tagged(
        "s",
        [
            Value::string(q.rule.tag().name()),
            Value::list(payload),
            Value::list(q.children.iter().map(encode_sieve)),
            encode_claim(&q.conclusion),
        ],
    )
}

pub fn to_text(v: &Value) -> String {
    lexpr::to_string(v).expect("printing to a string cannot fail")
}

/// Splits `(tag a b ...)` into its tag and arguments.
fn parts<'a>(v: &'a Value, what: &str) -> DecodeResult<(&'a str, Vec<&'a Value>)> {
    let items = v.to_ref_vec().ok_or_else(|| format!("expected {what} list"))?;
    let (head, rest) = items.split_first().ok_or_else(|| format!("empty {what}"))?;
    let tag = head.as_symbol().ok_or_else(|| format!("{what} must start with a symbol"))?;
    Ok((tag, rest.to_vec()))
}

fn expect<'a>(v: &'a Value, tag: &str, arity: usize) -> DecodeResult<Vec<&'a Value>> {
    let (t, args) = parts(v, tag)?;
    if t != tag {
        return Err(format!("expected `{tag}`, found `{t}`"));
    }
    if args.len() != arity {
        return Err(format!("`{tag}` takes {arity} fields, found {}", args.len()));
    }
    Ok(args)
}

fn string(v: &Value) -> DecodeResult<&str> {
    v.as_str().ok_or_else(|| "expected a string".to_string())
}

fn list(v: &Value) -> DecodeResult<Vec<&Value>> {
    v.to_ref_vec().ok_or_else(|| "expected a list".to_string())
}

pub fn decode_var(v: &Value) -> DecodeResult<Variable> {
    let a = expect(v, "v", 2)?;
    Ok(Variable::new(string(a[0])?, Sort::new(string(a[1])?)))
}

pub fn decode_term(v: &Value) -> DecodeResult<Term> {
    let (tag, args) = parts(v, "term")?;
    match tag {
        "v" => decode_var(v).map(Term::Var),
        "f" => {
            let (name, rest) = args.split_first().ok_or("`f` needs a name")?;
            Ok(Term::App(
                string(name)?.to_string(),
                rest.iter().map(|a| decode_term(a)).collect::<DecodeResult<_>>()?,
            ))
        }
        other => Err(format!("unknown term tag `{other}`")),
    }
}

pub fn decode_formula(v: &Value) -> DecodeResult<Formula> {
    match v.as_symbol() {
        Some("top") => return Ok(Formula::Top),
        Some("bot") => return Ok(Formula::Bottom),
        Some(other) => return Err(format!("unknown formula `{other}`")),
        None => {}
    }
    let (tag, args) = parts(v, "formula")?;
    let terms = |xs: &[&Value]| xs.iter().map(|a| decode_term(a)).collect::<DecodeResult<Vec<_>>>();
    match (tag, args.as_slice()) {
        ("rel", [name, rest @ ..]) => Ok(Formula::rel(string(name)?, terms(rest)?)),
        ("eq", [a, b]) => Ok(Formula::Eq(decode_term(a)?, decode_term(b)?)),
        ("and", [a, b]) => Ok(Formula::and(decode_formula(a)?, decode_formula(b)?)),
        ("or", list) => Ok(Formula::Or(list.iter().map(|f| decode_formula(f)).collect::<DecodeResult<_>>()?)),
        ("ex", [var, body]) => Ok(Formula::exists(decode_var(var)?, decode_formula(body)?)),
        (other, _) => Err(format!("malformed formula `{other}`")),
    }
}

pub fn decode_context(v: &Value) -> DecodeResult<Context> {
    let (tag, args) = parts(v, "context")?;
    if tag != "ctx" {
        return Err(format!("expected `ctx`, found `{tag}`"));
    }
    let vars = args.iter().map(|a| decode_var(a)).collect::<DecodeResult<Vec<_>>>()?;
    Context::new(vars).map_err(|e| e.to_string())
}

pub fn decode_sequent(v: &Value) -> DecodeResult<Sequent> {
    let a = expect(v, "seq", 3)?;
    Ok(Sequent::new(decode_context(a[0])?, decode_formula(a[1])?, decode_formula(a[2])?))
}

pub fn decode_subst(v: &Value) -> DecodeResult<Substitution> {
    let (tag, args) = parts(v, "subst")?;
    if tag != "subst" {
        return Err(format!("expected `subst`, found `{tag}`"));
    }
    let mut pairs = Vec::new();
    for pair in args {
        let pv = list(pair)?;
        let [var, term] = pv.as_slice() else {
            return Err("substitution entries are pairs".into());
        };
        pairs.push((decode_var(var)?, decode_term(term)?));
    }
    let n = pairs.len();
    let map: std::collections::BTreeMap<_, _> = pairs.into_iter().collect();
    if map.len() != n {
        return Err("duplicate substitution entry".into());
    }
    Ok(Substitution::from_map_unchecked(map))
}

pub fn decode_proof(v: &Value) -> DecodeResult<ProofTree> {
    let a = expect(v, "p", 4)?;
    let name = string(a[0])?;
    let tag = RuleTag::from_name(name).ok_or_else(|| format!("unknown rule `{name}`"))?;
    let payload = list(a[1])?;
    let arity = |n: usize| {
        if payload.len() == n {
            Ok(())
        } else {
            Err(format!("rule `{name}` takes {n} payload fields"))
        }
    };
    let rule = match tag {
        RuleTag::Axiom => {
            arity(1)?;
            Rule::Axiom(string(payload[0])?.to_string())
        }
        RuleTag::Subst => {
            arity(1)?;
            Rule::Subst(decode_subst(payload[0])?)
        }
        RuleTag::OrIntro => {
            arity(1)?;
            let i = payload[0].as_u64().ok_or("or_intro index must be a number")?;
            Rule::OrIntro(usize::try_from(i).map_err(|e| e.to_string())?)
        }
        RuleTag::ExistsFwd | RuleTag::ExistsBwd | RuleTag::EqRefl => {
            arity(1)?;
            let var = decode_var(payload[0])?;
            match tag {
                RuleTag::ExistsFwd => Rule::ExistsFwd(var),
                RuleTag::ExistsBwd => Rule::ExistsBwd(var),
                _ => Rule::EqRefl(var),
            }
        }
        RuleTag::EqSubst => {
            arity(2)?;
            Rule::EqSubst(decode_var(payload[0])?, decode_var(payload[1])?)
        }
        other => {
            arity(0)?;
            match other {
                RuleTag::Identity => Rule::Identity,
                RuleTag::Cut => Rule::Cut,
                RuleTag::Truth => Rule::Truth,
                RuleTag::Falsum => Rule::Falsum,
                RuleTag::AndElimL => Rule::AndElimL,
                RuleTag::AndElimR => Rule::AndElimR,
                RuleTag::AndIntro => Rule::AndIntro,
                RuleTag::OrElim => Rule::OrElim,
                RuleTag::Frobenius => Rule::Frobenius,
                RuleTag::Distributivity => Rule::Distributivity,
                _ => unreachable!("payload rules handled above"),
            }
        }
    };
    let premises = list(a[2])?.into_iter().map(decode_proof).collect::<DecodeResult<_>>()?;
    Ok(ProofTree {
        rule,
        premises,
        conclusion: decode_sequent(a[3])?,
    })
}

pub fn decode_object(v: &Value) -> DecodeResult<SiteObject> {
    let a = expect(v, "obj", 2)?;
    Ok(SiteObject::new(decode_context(a[0])?, decode_formula(a[1])?))
}

pub fn decode_morphism(v: &Value) -> DecodeResult<SiteMorphism> {
    let (tag, a) = parts(v, "morphism")?;
    let [source, target, last] = a.as_slice() else {
        return Err(format!("`{tag}` takes 3 fields"));
    };
    let kind = match tag {
        "mono" => MorphismKind::EntailMono {
            extra: decode_formula(last)?,
        },
        "smap" => MorphismKind::SubstMap {
            subst: decode_subst(last)?,
        },
        other => return Err(format!("unknown morphism `{other}`")),
    };
    Ok(SiteMorphism {
        source: decode_object(source)?,
        target: decode_object(target)?,
        kind,
    })
}

pub fn decode_claim(v: &Value) -> DecodeResult<CoveringClaim> {
    let a = expect(v, "claim", 2)?;
    Ok(CoveringClaim {
        base: decode_object(a[0])?,
        family: list(a[1])?.into_iter().map(decode_morphism).collect::<DecodeResult<_>>()?,
    })
}

pub fn decode_sieve(v: &Value) -> DecodeResult<SieveProof> {
    let a = expect(v, "s", 4)?;
    let name = string(a[0])?;
    let tag = SieveTag::from_name(name).ok_or_else(|| format!("unknown sieve rule `{name}`"))?;
    let payload = list(a[1])?;
    let want = usize::from(matches!(tag, SieveTag::AxiomCover | SieveTag::Stability));
    if payload.len() != want {
        return Err(format!("rule `{name}` takes {want} payload fields"));
    }
    let rule = match tag {
        SieveTag::AxiomCover => SieveRule::AxiomCover(string(payload[0])?.to_string()),
        SieveTag::Stability => SieveRule::Stability(decode_morphism(payload[0])?),
        SieveTag::Maximality => SieveRule::Maximality,
        SieveTag::Transitivity => SieveRule::Transitivity,
        SieveTag::Widening => SieveRule::Widening,
    };
    Ok(SieveProof {
        rule,
        children: list(a[2])?.into_iter().map(decode_sieve).collect::<DecodeResult<_>>()?,
        conclusion: decode_claim(a[3])?,
    })
}

pub fn parse_value(text: &str) -> DecodeResult<Value> {
    lexpr::from_str(text).map_err(|e| e.to_string())
}
