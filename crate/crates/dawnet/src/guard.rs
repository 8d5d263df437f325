//! The boolean query language used as transition guards: concrete syntax,
//! evaluation against a partial assignment, and grounding to disjunctive
//! normal form over `v = o` / `!def(v)` literals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::data_model::{Assignment, DataModel, Value};

pub const DEFAULT_DNF_CAP: usize = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GuardError {
    #[error("syntax error at byte {position}: expected {expected}")]
    SyntaxError { position: usize, expected: String },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("constant {0} does not occur in any declared domain")]
    ConstantOutsideDomains(Value),
    #[error("DNF conversion exceeded the clause cap ({cap})")]
    DnfBlowup { cap: usize },
}

/// A term: a variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Value),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Abstract syntax of guards.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GuardExpr {
    True,
    Def(String),
    /// `v = t`; the grammar restricts the left side to a variable.
    Eq(String, Term),
    Leq(Term, Term),
    Not(Box<GuardExpr>),
    And(Box<GuardExpr>, Box<GuardExpr>),
}

impl GuardExpr {
    pub fn and(self, other: GuardExpr) -> GuardExpr {
        GuardExpr::And(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> GuardExpr {
        GuardExpr::Not(Box::new(self))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, GuardExpr::True)
    }

    /// Variables mentioned anywhere in the formula.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            GuardExpr::True => {}
            GuardExpr::Def(v) => {
                out.insert(v.clone());
            }
            GuardExpr::Eq(v, t) => {
                out.insert(v.clone());
                if let Term::Var(u) = t {
                    out.insert(u.clone());
                }
            }
            GuardExpr::Leq(t1, t2) => {
                for t in [t1, t2] {
                    if let Term::Var(u) = t {
                        out.insert(u.clone());
                    }
                }
            }
            GuardExpr::Not(e) => e.collect_variables(out),
            GuardExpr::And(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Constants appearing syntactically in the formula (its active domain).
    pub fn active_domain(&self) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut BTreeSet<Value>) {
        match self {
            GuardExpr::True | GuardExpr::Def(_) => {}
            GuardExpr::Eq(_, t) => {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
            GuardExpr::Leq(t1, t2) => {
                for t in [t1, t2] {
                    if let Term::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
            GuardExpr::Not(e) => e.collect_constants(out),
            GuardExpr::And(a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
        }
    }

    /// Checks that all variables exist in `dm` and all constants occur in
    /// some declared domain.
    pub fn validate(&self, dm: &DataModel) -> Result<(), GuardError> {
        for v in self.variables() {
            if !dm.contains_variable(&v) {
                return Err(GuardError::UnknownVariable(v));
            }
        }
        for c in self.active_domain() {
            if !dm.value_declared(&c) {
                return Err(GuardError::ConstantOutsideDomains(c));
            }
        }
        Ok(())
    }

    /// The six semantic clauses. Unassigned variables are not substituted, so
    /// comparisons on unbound variables evaluate to false.
    pub fn eval(&self, dm: &DataModel, eta: &Assignment) -> bool {
        match self {
            GuardExpr::True => true,
            GuardExpr::Def(v) => eta.is_bound(v),
            GuardExpr::Eq(v, t) => match (eta.get(v), subst(t, eta)) {
                (Some(a), Some(b)) => *a == b,
                _ => false,
            },
            GuardExpr::Leq(t1, t2) => match (subst(t1, eta), subst(t2, eta)) {
                (Some(a), Some(b)) => dm.leq_values(&a, &b),
                _ => false,
            },
            GuardExpr::Not(e) => !e.eval(dm, eta),
            GuardExpr::And(a, b) => a.eval(dm, eta) && b.eval(dm, eta),
        }
    }
}

fn subst(t: &Term, eta: &Assignment) -> Option<Value> {
    match t {
        Term::Var(v) => eta.get(v).cloned(),
        Term::Const(c) => Some(c.clone()),
    }
}

impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardExpr::True => write!(f, "true"),
            GuardExpr::Def(v) => write!(f, "def({v})"),
            GuardExpr::Eq(v, t) => write!(f, "{v} = {t}"),
            GuardExpr::Leq(t1, t2) => write!(f, "{t1} <= {t2}"),
            GuardExpr::Not(e) => match **e {
                GuardExpr::True | GuardExpr::Def(_) | GuardExpr::Not(_) => write!(f, "!{e}"),
                _ => write!(f, "!({e})"),
            },
            GuardExpr::And(a, b) => {
                write!(f, "{a} && ")?;
                match **b {
                    GuardExpr::And(_, _) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

/// Parses the concrete syntax
/// `true | def(v) | v = term | term <= term | !phi | phi && phi | (phi)`
/// and validates variables and constants against `dm`.
pub fn parse(text: &str, dm: &DataModel) -> Result<GuardExpr, GuardError> {
    let expr = parse_syntax(text)?;
    expr.validate(dm)?;
    Ok(expr)
}

/// Parses without a data model; variables and constants are unchecked.
pub fn parse_syntax(text: &str) -> Result<GuardExpr, GuardError> {
    let mut p = Parser::new(text);
    let expr = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, expected: &str) -> GuardError {
        GuardError::SyntaxError {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<GuardExpr, GuardError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            if self.eat("&&") {
                let rhs = self.unary()?;
                lhs = GuardExpr::And(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<GuardExpr, GuardError> {
        self.skip_ws();
        if self.eat("!") {
            Ok(GuardExpr::Not(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<GuardExpr, GuardError> {
        self.skip_ws();
        if self.eat("(") {
            let inner = self.formula()?;
            if !self.eat(")") {
                return Err(self.err("')'"));
            }
            return Ok(inner);
        }
        // `def(v)` with lookahead so an identifier named defX stays a term.
        let save = self.pos;
        if self.eat("def") {
            let after_def = self.pos;
            if self.eat("(") {
                let v = self.identifier()?;
                if !self.eat(")") {
                    return Err(self.err("')'"));
                }
                return Ok(GuardExpr::Def(v));
            }
            let _ = after_def;
            self.pos = save;
        }
        let term = self.term()?;
        self.skip_ws();
        if self.eat("<=") {
            let rhs = self.term()?;
            return Ok(GuardExpr::Leq(term, rhs));
        }
        if self.eat("=") {
            let rhs = self.term()?;
            return match term {
                Term::Var(v) => Ok(GuardExpr::Eq(v, rhs)),
                Term::Const(_) => Err(self.err("variable on the left of '='")),
            };
        }
        // A bare `true` is the constant formula; any other bare term is not
        // a formula.
        match term {
            Term::Const(Value::Bool(true)) => Ok(GuardExpr::True),
            _ => Err(self.err("'=', '<=' or a formula")),
        }
    }

    fn term(&mut self) -> Result<Term, GuardError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(self.err("a term"));
        }
        let c = self.src[self.pos];
        if c == b'"' {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                self.pos += 1;
            }
            if self.pos >= self.src.len() {
                return Err(self.err("closing '\"'"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos])
                .map_err(|_| self.err("valid UTF-8 string"))?
                .to_string();
            self.pos += 1;
            return Ok(Term::Const(Value::Str(s)));
        }
        if c == b'-' || c.is_ascii_digit() {
            let start = self.pos;
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n: i64 = s.parse().map_err(|_| self.err("an integer"))?;
            return Ok(Term::Const(Value::Int(n)));
        }
        let ident = self.identifier()?;
        Ok(match ident.as_str() {
            "true" => Term::Const(Value::Bool(true)),
            "false" => Term::Const(Value::Bool(false)),
            _ => Term::Var(ident),
        })
    }

    fn identifier(&mut self) -> Result<String, GuardError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Ok(std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .to_string())
        } else {
            Err(self.err("an identifier"))
        }
    }
}

/// A literal of the grounded disjunctive normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DnfLit {
    Eq(String, Value),
    NotDef(String),
}

impl fmt::Display for DnfLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DnfLit::Eq(v, o) => write!(f, "{v} = {o}"),
            DnfLit::NotDef(v) => write!(f, "!def({v})"),
        }
    }
}

/// A guard grounded to DNF: a disjunction of conjunctions of literals.
/// No clause means `false`; an empty clause means `true`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DnfGuard {
    pub clauses: Vec<Vec<DnfLit>>,
    /// Variables for which the printed rewrite of a negated comparison is
    /// only faithful when the variable is bound; tracked, not resolved.
    pub bound_assumptions: BTreeSet<String>,
}

impl DnfGuard {
    pub fn always_true() -> Self {
        DnfGuard {
            clauses: vec![vec![]],
            bound_assumptions: BTreeSet::new(),
        }
    }

    pub fn always_false() -> Self {
        DnfGuard::default()
    }

    pub fn eval(&self, eta: &Assignment) -> bool {
        self.clauses.iter().any(|clause| {
            clause.iter().all(|lit| match lit {
                DnfLit::Eq(v, o) => eta.get(v) == Some(o),
                DnfLit::NotDef(v) => !eta.is_bound(v),
            })
        })
    }
}

/// Grounds `phi` to DNF over the finite per-variable `ranges`, applying the
/// listed rewrite equivalences for variable-variable equality, inequality,
/// order comparisons, and `def`.
pub fn to_ground_dnf(
    phi: &GuardExpr,
    dm: &DataModel,
    ranges: &BTreeMap<String, BTreeSet<Value>>,
    cap: usize,
) -> Result<DnfGuard, GuardError> {
    let mut caveats = BTreeSet::new();
    let clauses = dnf_rec(phi, true, dm, ranges, cap, &mut caveats)?;
    let mut cleaned: Vec<Vec<DnfLit>> = Vec::new();
    for mut clause in clauses {
        clause.sort();
        clause.dedup();
        if clause_consistent(&clause) && !cleaned.contains(&clause) {
            cleaned.push(clause);
        }
    }
    Ok(DnfGuard {
        clauses: cleaned,
        bound_assumptions: caveats,
    })
}

fn clause_consistent(clause: &[DnfLit]) -> bool {
    for (i, a) in clause.iter().enumerate() {
        for b in &clause[i + 1..] {
            match (a, b) {
                (DnfLit::Eq(v1, o1), DnfLit::Eq(v2, o2)) if v1 == v2 && o1 != o2 => return false,
                (DnfLit::Eq(v1, _), DnfLit::NotDef(v2))
                | (DnfLit::NotDef(v1), DnfLit::Eq(v2, _))
                    if v1 == v2 =>
                {
                    return false
                }
                _ => {}
            }
        }
    }
    true
}

fn range<'r>(
    ranges: &'r BTreeMap<String, BTreeSet<Value>>,
    v: &str,
) -> &'r BTreeSet<Value> {
    static EMPTY: std::sync::OnceLock<BTreeSet<Value>> = std::sync::OnceLock::new();
    ranges
        .get(v)
        .unwrap_or_else(|| EMPTY.get_or_init(BTreeSet::new))
}

fn dnf_rec(
    phi: &GuardExpr,
    positive: bool,
    dm: &DataModel,
    ranges: &BTreeMap<String, BTreeSet<Value>>,
    cap: usize,
    caveats: &mut BTreeSet<String>,
) -> Result<Vec<Vec<DnfLit>>, GuardError> {
    let clauses = match (phi, positive) {
        (GuardExpr::True, true) => vec![vec![]],
        (GuardExpr::True, false) => vec![],
        (GuardExpr::Def(v), true) => range(ranges, v)
            .iter()
            .map(|o| vec![DnfLit::Eq(v.clone(), o.clone())])
            .collect(),
        (GuardExpr::Def(v), false) => vec![vec![DnfLit::NotDef(v.clone())]],
        (GuardExpr::Eq(v, Term::Const(c)), true) => {
            if range(ranges, v).contains(c) {
                vec![vec![DnfLit::Eq(v.clone(), c.clone())]]
            } else {
                vec![]
            }
        }
        (GuardExpr::Eq(v, Term::Const(c)), false) => {
            // The rewrite excludes the undefined case; see bound_assumptions.
            caveats.insert(v.clone());
            range(ranges, v)
                .iter()
                .filter(|o| *o != c)
                .map(|o| vec![DnfLit::Eq(v.clone(), o.clone())])
                .collect()
        }
        (GuardExpr::Eq(v, Term::Var(u)), true) => {
            let shared: Vec<&Value> = range(ranges, v)
                .intersection(range(ranges, u))
                .collect();
            shared
                .into_iter()
                .map(|o| {
                    vec![
                        DnfLit::Eq(v.clone(), o.clone()),
                        DnfLit::Eq(u.clone(), o.clone()),
                    ]
                })
                .collect()
        }
        (GuardExpr::Eq(v, Term::Var(u)), false) => {
            caveats.insert(v.clone());
            caveats.insert(u.clone());
            let mut out = Vec::new();
            for o1 in range(ranges, v) {
                for o2 in range(ranges, u) {
                    if o1 != o2 {
                        out.push(vec![
                            DnfLit::Eq(v.clone(), o1.clone()),
                            DnfLit::Eq(u.clone(), o2.clone()),
                        ]);
                    }
                }
            }
            out
        }
        (GuardExpr::Leq(t1, t2), pos) => leq_dnf(t1, t2, pos, dm, ranges, caveats),
        (GuardExpr::Not(e), pos) => dnf_rec(e, !pos, dm, ranges, cap, caveats)?,
        (GuardExpr::And(a, b), true) => {
            let ca = dnf_rec(a, true, dm, ranges, cap, caveats)?;
            let cb = dnf_rec(b, true, dm, ranges, cap, caveats)?;
            if ca.len().saturating_mul(cb.len()) > cap {
                return Err(GuardError::DnfBlowup { cap });
            }
            let mut out = Vec::new();
            for x in &ca {
                for y in &cb {
                    let mut clause = x.clone();
                    clause.extend(y.iter().cloned());
                    out.push(clause);
                }
            }
            out
        }
        (GuardExpr::And(a, b), false) => {
            let mut out = dnf_rec(a, false, dm, ranges, cap, caveats)?;
            out.extend(dnf_rec(b, false, dm, ranges, cap, caveats)?);
            out
        }
    };
    if clauses.len() > cap {
        return Err(GuardError::DnfBlowup { cap });
    }
    Ok(clauses)
}

fn leq_dnf(
    t1: &Term,
    t2: &Term,
    positive: bool,
    dm: &DataModel,
    ranges: &BTreeMap<String, BTreeSet<Value>>,
    caveats: &mut BTreeSet<String>,
) -> Vec<Vec<DnfLit>> {
    if !positive {
        for t in [t1, t2] {
            if let Term::Var(v) = t {
                caveats.insert(v.clone());
            }
        }
    }
    match (t1, t2) {
        (Term::Const(a), Term::Const(b)) => {
            if dm.leq_values(a, b) == positive {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        (Term::Var(v), Term::Const(c)) => range(ranges, v)
            .iter()
            .filter(|o| dm.leq_values(o, c) == positive)
            .map(|o| vec![DnfLit::Eq(v.clone(), o.clone())])
            .collect(),
        (Term::Const(c), Term::Var(v)) => range(ranges, v)
            .iter()
            .filter(|o| dm.leq_values(c, o) == positive)
            .map(|o| vec![DnfLit::Eq(v.clone(), o.clone())])
            .collect(),
        (Term::Var(v), Term::Var(u)) => {
            let mut out = Vec::new();
            for o1 in range(ranges, v) {
                for o2 in range(ranges, u) {
                    if dm.leq_values(o1, o2) == positive {
                        out.push(vec![
                            DnfLit::Eq(v.clone(), o1.clone()),
                            DnfLit::Eq(u.clone(), o2.clone()),
                        ]);
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{int_set, str_set, Domain};

    fn loan_dm() -> DataModel {
        DataModel::new(vec![
            ("loanType".into(), Domain::unordered(str_set(["w", "s"]))),
            (
                "request".into(),
                Domain::int_ordered(int_set([0, 3000, 5000, 60000, 99999, 100000])),
            ),
        ])
    }

    fn rngs(pairs: &[(&str, &[i64])]) -> BTreeMap<String, BTreeSet<Value>> {
        pairs
            .iter()
            .map(|(v, vals)| (v.to_string(), int_set(vals.iter().copied())))
            .collect()
    }

    #[test]
    fn parses_leq_guard() {
        let dm = loan_dm();
        let e = parse("request <= 5000", &dm).unwrap();
        assert_eq!(
            e,
            GuardExpr::Leq(Term::Var("request".into()), Term::Const(Value::Int(5000)))
        );
    }

    #[test]
    fn parses_negated_parenthesized_guard() {
        let dm = loan_dm();
        let e = parse("!(request <= 99999)", &dm).unwrap();
        assert_eq!(
            e,
            GuardExpr::Not(Box::new(GuardExpr::Leq(
                Term::Var("request".into()),
                Term::Const(Value::Int(99999))
            )))
        );
    }

    #[test]
    fn parses_true() {
        assert_eq!(parse("true", &loan_dm()).unwrap(), GuardExpr::True);
    }

    #[test]
    fn parses_conjunction_and_def() {
        let dm = loan_dm();
        let e = parse("def(request) && loanType = \"w\"", &dm).unwrap();
        assert_eq!(
            e,
            GuardExpr::Def("request".into()).and(GuardExpr::Eq(
                "loanType".into(),
                Term::Const(Value::Str("w".into()))
            ))
        );
    }

    #[test]
    fn rejects_unknown_variable_and_constant() {
        let dm = loan_dm();
        assert_eq!(
            parse("zzz = 1", &dm),
            Err(GuardError::UnknownVariable("zzz".into()))
        );
        assert_eq!(
            parse("request = 7", &dm),
            Err(GuardError::ConstantOutsideDomains(Value::Int(7)))
        );
    }

    #[test]
    fn rejects_constant_on_eq_lhs() {
        assert!(matches!(
            parse("5000 = request", &loan_dm()),
            Err(GuardError::SyntaxError { .. })
        ));
    }

    #[test]
    fn eval_leq_natural_order() {
        let dm = loan_dm();
        let eta = Assignment::empty()
            .bind(&dm, "request", Value::Int(3000))
            .unwrap();
        let e = parse("request <= 5000", &dm).unwrap();
        assert!(e.eval(&dm, &eta));
        let e2 = parse("!(request <= 5000)", &dm).unwrap();
        assert!(!e2.eval(&dm, &eta));
    }

    #[test]
    fn eval_eq_on_unbound_variable_is_false() {
        let dm = loan_dm();
        // Unsubstituted variables stay variables, so even x = x is false.
        let e = GuardExpr::Eq("loanType".into(), Term::Var("loanType".into()));
        assert!(!e.eval(&dm, &Assignment::empty()));
        let bound = Assignment::empty()
            .bind(&dm, "loanType", Value::Str("w".into()))
            .unwrap();
        assert!(e.eval(&dm, &bound));
    }

    #[test]
    fn eval_def_unbound_false() {
        let dm = loan_dm();
        assert!(!GuardExpr::Def("request".into()).eval(&dm, &Assignment::empty()));
    }

    #[test]
    fn active_domain_collects_constants() {
        let dm = loan_dm();
        let e = parse("request <= 5000", &dm).unwrap();
        assert_eq!(e.active_domain(), int_set([5000]));
        assert!(GuardExpr::True.active_domain().is_empty());
        let e2 = parse("request = 3000 && !(request = 5000)", &dm).unwrap();
        assert_eq!(e2.active_domain(), int_set([3000, 5000]));
    }

    #[test]
    fn dnf_def_expands_over_range() {
        let dm = DataModel::new(vec![(
            "v".into(),
            Domain::int_ordered(int_set([1, 2])),
        )]);
        let d = to_ground_dnf(
            &GuardExpr::Def("v".into()),
            &dm,
            &rngs(&[("v", &[1, 2])]),
            DEFAULT_DNF_CAP,
        )
        .unwrap();
        assert_eq!(
            d.clauses,
            vec![
                vec![DnfLit::Eq("v".into(), Value::Int(1))],
                vec![DnfLit::Eq("v".into(), Value::Int(2))],
            ]
        );
    }

    #[test]
    fn dnf_negated_eq_excludes_value_and_flags_caveat() {
        let dm = DataModel::new(vec![(
            "v".into(),
            Domain::int_ordered(int_set([1, 2, 3])),
        )]);
        let phi = GuardExpr::Eq("v".into(), Term::Const(Value::Int(1))).negate();
        let d = to_ground_dnf(&phi, &dm, &rngs(&[("v", &[1, 2, 3])]), DEFAULT_DNF_CAP).unwrap();
        assert_eq!(
            d.clauses,
            vec![
                vec![DnfLit::Eq("v".into(), Value::Int(2))],
                vec![DnfLit::Eq("v".into(), Value::Int(3))],
            ]
        );
        assert!(d.bound_assumptions.contains("v"));
    }

    #[test]
    fn dnf_true_is_single_empty_clause() {
        let d = to_ground_dnf(
            &GuardExpr::True,
            &DataModel::default(),
            &BTreeMap::new(),
            DEFAULT_DNF_CAP,
        )
        .unwrap();
        assert_eq!(d.clauses, vec![Vec::<DnfLit>::new()]);
        assert!(d.eval(&Assignment::empty()));
    }

    #[test]
    fn dnf_drops_inconsistent_clauses() {
        let dm = DataModel::new(vec![(
            "v".into(),
            Domain::int_ordered(int_set([1, 2])),
        )]);
        let phi = GuardExpr::Eq("v".into(), Term::Const(Value::Int(1)))
            .and(GuardExpr::Eq("v".into(), Term::Const(Value::Int(2))));
        let d = to_ground_dnf(&phi, &dm, &rngs(&[("v", &[1, 2])]), DEFAULT_DNF_CAP).unwrap();
        assert!(d.clauses.is_empty());
    }

    #[test]
    fn dnf_blowup_reported() {
        let dm = DataModel::new(vec![
            ("a".into(), Domain::int_ordered(int_set([1, 2, 3]))),
            ("b".into(), Domain::int_ordered(int_set([1, 2, 3]))),
        ]);
        let phi = GuardExpr::Def("a".into()).and(GuardExpr::Def("b".into()));
        let err = to_ground_dnf(
            &phi,
            &dm,
            &rngs(&[("a", &[1, 2, 3]), ("b", &[1, 2, 3])]),
            4,
        )
        .unwrap_err();
        assert_eq!(err, GuardError::DnfBlowup { cap: 4 });
    }

    #[test]
    fn print_parse_roundtrip_examples() {
        let dm = loan_dm();
        for text in [
            "true",
            "def(request)",
            "request <= 5000",
            "!(request <= 99999)",
            "!(request <= 5000) && !(100000 <= request)",
            "loanType = \"w\" && request = 3000 && def(loanType)",
            "!!def(request)",
        ] {
            let e = parse(text, &dm).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed, &dm).unwrap();
            assert_eq!(e, reparsed, "roundtrip failed for {text} -> {printed}");
        }
    }
}
