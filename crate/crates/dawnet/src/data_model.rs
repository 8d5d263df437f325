//! Variables, finite value domains, partial orders, and partial assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataModelError {
    #[error("antisymmetry violated: both ({0}, {1}) and ({1}, {0}) hold for distinct values")]
    AntisymmetryViolation(Value, Value),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("value {value} is outside the domain of variable '{variable}'")]
    ValueOutsideDomain { variable: String, value: Value },
    #[error("order over '{variable}' mentions value {value} outside its domain")]
    OrderValueOutsideDomain { variable: String, value: Value },
}

/// A tagged constant. Equality is syntactic within a tag; values of different
/// tags are never equal and never ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Closes `pairs` under reflexivity (over `universe`) and transitivity, then
/// checks antisymmetry. Returns the closed relation.
pub fn validate_order(
    universe: &BTreeSet<Value>,
    pairs: &BTreeSet<(Value, Value)>,
) -> Result<BTreeSet<(Value, Value)>, DataModelError> {
    let mut rel: BTreeSet<(Value, Value)> = pairs.clone();
    for v in universe {
        rel.insert((v.clone(), v.clone()));
    }
    // Transitive closure by saturation; domains are small.
    loop {
        let mut added = Vec::new();
        for (a, b) in &rel {
            for (c, d) in &rel {
                if b == c && !rel.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        rel.extend(added);
    }
    for (a, b) in &rel {
        if a != b && rel.contains(&(b.clone(), a.clone())) {
            return Err(DataModelError::AntisymmetryViolation(a.clone(), b.clone()));
        }
    }
    Ok(rel)
}

/// One variable's declared finite domain and, optionally, a partial order on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    values: BTreeSet<Value>,
    /// Closed (reflexive, antisymmetric, transitive) relation, when ordered.
    order: Option<BTreeSet<(Value, Value)>>,
}

impl Domain {
    pub fn unordered(values: BTreeSet<Value>) -> Self {
        Domain {
            values,
            order: None,
        }
    }

    /// Integer domains declared `ordered` get the natural order; other domains
    /// must provide generator pairs via [`Domain::with_order`].
    pub fn int_ordered(values: BTreeSet<Value>) -> Self {
        let mut order = BTreeSet::new();
        for a in &values {
            for b in &values {
                if let (Value::Int(x), Value::Int(y)) = (a, b) {
                    if x <= y {
                        order.insert((a.clone(), b.clone()));
                    }
                }
            }
        }
        Domain {
            values,
            order: Some(order),
        }
    }

    pub fn with_order(
        values: BTreeSet<Value>,
        generator_pairs: BTreeSet<(Value, Value)>,
    ) -> Result<Self, DataModelError> {
        for (a, b) in &generator_pairs {
            for v in [a, b] {
                if !values.contains(v) {
                    return Err(DataModelError::OrderValueOutsideDomain {
                        variable: String::new(),
                        value: v.clone(),
                    });
                }
            }
        }
        let order = validate_order(&values, &generator_pairs)?;
        Ok(Domain {
            values,
            order: Some(order),
        })
    }

    pub fn values(&self) -> &BTreeSet<Value> {
        &self.values
    }

    pub fn is_ordered(&self) -> bool {
        self.order.is_some()
    }

    pub fn order(&self) -> Option<&BTreeSet<(Value, Value)>> {
        self.order.as_ref()
    }

    /// Restricts the domain (and its order) to `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Value>) -> Domain {
        let values: BTreeSet<Value> = self.values.intersection(keep).cloned().collect();
        let order = self.order.as_ref().map(|ord| {
            ord.iter()
                .filter(|(a, b)| values.contains(a) && values.contains(b))
                .cloned()
                .collect()
        });
        Domain { values, order }
    }
}

/// The intensional data model: an ordered set of variables, each with its own
/// finite explicit domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DataModel {
    /// Sorted by variable name.
    variables: Vec<(String, Domain)>,
}

impl DataModel {
    pub fn new(mut variables: Vec<(String, Domain)>) -> Self {
        variables.sort_by(|a, b| a.0.cmp(&b.0));
        DataModel { variables }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn domain(&self, variable: &str) -> Option<&Domain> {
        self.variables
            .binary_search_by(|(n, _)| n.as_str().cmp(variable))
            .ok()
            .map(|i| &self.variables[i].1)
    }

    pub fn contains_variable(&self, variable: &str) -> bool {
        self.domain(variable).is_some()
    }

    /// True when some declared domain contains `value`.
    pub fn value_declared(&self, value: &Value) -> bool {
        self.variables.iter().any(|(_, d)| d.values.contains(value))
    }

    /// `a ≤ b` per the query semantics: some declared domain contains both
    /// values, is ordered, and orders the pair.
    pub fn leq_values(&self, a: &Value, b: &Value) -> bool {
        self.variables.iter().any(|(_, d)| match &d.order {
            Some(ord) => {
                d.values.contains(a)
                    && d.values.contains(b)
                    && ord.contains(&(a.clone(), b.clone()))
            }
            None => false,
        })
    }

    /// All ordered pairs across declared domains, deduplicated.
    pub fn all_order_pairs(&self) -> BTreeSet<(Value, Value)> {
        let mut out = BTreeSet::new();
        for (_, d) in &self.variables {
            if let Some(ord) = &d.order {
                out.extend(ord.iter().cloned());
            }
        }
        out
    }

    /// Restricts every domain to `keep`, per the finite-version construction.
    pub fn restrict(&self, keep: &BTreeSet<Value>) -> DataModel {
        DataModel {
            variables: self
                .variables
                .iter()
                .map(|(n, d)| (n.clone(), d.restrict(keep)))
                .collect(),
        }
    }
}

/// A partial map from variables to values; the extensional data state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Assignment {
    bindings: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn get(&self, variable: &str) -> Option<&Value> {
        self.bindings.get(variable)
    }

    pub fn is_bound(&self, variable: &str) -> bool {
        self.bindings.contains_key(variable)
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Returns a copy with `variable ↦ value`; rebinding overwrites.
    pub fn bind(
        &self,
        dm: &DataModel,
        variable: &str,
        value: Value,
    ) -> Result<Assignment, DataModelError> {
        let domain = dm
            .domain(variable)
            .ok_or_else(|| DataModelError::UnknownVariable(variable.to_string()))?;
        if !domain.values().contains(&value) {
            return Err(DataModelError::ValueOutsideDomain {
                variable: variable.to_string(),
                value,
            });
        }
        let mut bindings = self.bindings.clone();
        bindings.insert(variable.to_string(), value);
        Ok(Assignment { bindings })
    }

    /// Returns a copy without `variable`; a no-op if it was unbound.
    pub fn unbind(&self, variable: &str) -> Assignment {
        let mut bindings = self.bindings.clone();
        bindings.remove(variable);
        Assignment { bindings }
    }

    /// Every bound value lies in the declared domain of its variable.
    pub fn valid_for(&self, dm: &DataModel) -> bool {
        self.bindings
            .iter()
            .all(|(v, d)| dm.domain(v).is_some_and(|dom| dom.values().contains(d)))
    }

    /// Renders as `{x=1, y="w"}`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .bindings
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<(String, Value)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        Assignment {
            bindings: iter.into_iter().collect(),
        }
    }
}

pub fn int_set(values: impl IntoIterator<Item = i64>) -> BTreeSet<Value> {
    values.into_iter().map(Value::Int).collect()
}

pub fn str_set<'a>(values: impl IntoIterator<Item = &'a str>) -> BTreeSet<Value> {
    values.into_iter().map(|s| Value::Str(s.to_string())).collect()
}
