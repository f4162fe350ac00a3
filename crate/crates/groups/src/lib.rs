//! Permutation groups on a handful of points.
//!
//! Points are numbered from 1 in all text forms (cycle notation), and from 0
//! internally.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

mod perm;

pub use perm::{CycleType, Perm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("permutations act on different point sets ({0} and {1} points)")]
    MismatchedDegree(usize, usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("cannot parse cycle notation {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("lower bound is not contained in the upper bound")]
    NotASubgroup,
    #[error("asserted cycle types {0} cannot all occur between the bounds")]
    FactsUnrealizable(String),
    #[error("expected a dihedral group of order 10 on 5 points, got {0}")]
    NotDih5(String),
}

/// Isomorphism classes that occur in this problem, identified by order and
/// element-order multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum IsoClass {
    Trivial,
    Sym2,
    Sym3,
    Dih4,
    Dih5,
    Dih6,
    Other { order: usize, element_orders: Vec<(usize, usize)> },
}

impl fmt::Display for IsoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoClass::Trivial => write!(f, "Trivial"),
            IsoClass::Sym2 => write!(f, "Sym2"),
            IsoClass::Sym3 => write!(f, "Sym3"),
            IsoClass::Dih4 => write!(f, "Dih4"),
            IsoClass::Dih5 => write!(f, "Dih5"),
            IsoClass::Dih6 => write!(f, "Dih6"),
            IsoClass::Other { order, element_orders } => {
                write!(f, "Other(order {order};")?;
                for (o, n) in element_orders {
                    write!(f, " {o}^{n}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite permutation group, stored by its full element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroupInfo {
    pub degree: usize,
    /// Elements in breadth-first discovery order, identity first.
    pub elements: Vec<Perm>,
    pub order: usize,
    pub iso_class: IsoClass,
}

impl PermGroupInfo {
    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.contains(p)
    }

    pub fn is_subgroup_of(&self, other: &PermGroupInfo) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// Sorted element set, used to compare groups irrespective of discovery order.
    pub fn element_set(&self) -> BTreeSet<Perm> {
        self.elements.iter().cloned().collect()
    }

    pub fn same_elements(&self, other: &PermGroupInfo) -> bool {
        self.order == other.order && self.is_subgroup_of(other)
    }

    /// `(element order, count)` pairs in increasing element order.
    pub fn element_orders(&self) -> Vec<(usize, usize)> {
        let mut m = BTreeMap::new();
        for g in &self.elements {
            *m.entry(g.order()).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    pub fn has_cycle_type(&self, t: &CycleType) -> bool {
        self.elements.iter().any(|g| &g.cycle_type() == t)
    }

    fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| a.compose(b) == b.compose(a)))
    }
}

/// Closure of `gens` acting on `degree` points.
pub fn generate(degree: usize, gens: &[Perm]) -> Result<PermGroupInfo, GroupError> {
    for g in gens {
        if g.degree() != degree {
            return Err(GroupError::MismatchedDegree(degree, g.degree()));
        }
    }
    let id = Perm::identity(degree);
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.compose(s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
        elements.push(g);
    }
    Ok(with_class(degree, elements))
}

fn with_class(degree: usize, elements: Vec<Perm>) -> PermGroupInfo {
    let mut g = PermGroupInfo {
        degree,
        order: elements.len(),
        elements,
        iso_class: IsoClass::Trivial,
    };
    g.iso_class = iso_class(&g);
    g
}

/// The full symmetric group on `degree` points.
pub fn symmetric(degree: usize) -> PermGroupInfo {
    let mut gens = Vec::new();
    if degree >= 2 {
        gens.push(Perm::transposition(degree, 0, 1));
        let cycle: Vec<usize> = (0..degree).map(|i| (i + 1) % degree).collect();
        gens.push(Perm::from_images(cycle).expect("a cycle is a permutation"));
    }
    generate(degree, &gens).expect("generators share the degree")
}

/// Identifies the group by order and element-order multiset.
pub fn iso_class(g: &PermGroupInfo) -> IsoClass {
    let orders = g.element_orders();
    let sig: Vec<(usize, usize)> = orders.clone();
    match g.order {
        1 => IsoClass::Trivial,
        2 => IsoClass::Sym2,
        6 if !g.is_abelian() => IsoClass::Sym3,
        8 if sig == [(1, 1), (2, 5), (4, 2)] => IsoClass::Dih4,
        10 if sig == [(1, 1), (2, 5), (5, 4)] => IsoClass::Dih5,
        12 if sig == [(1, 1), (2, 7), (3, 2), (6, 2)] => IsoClass::Dih6,
        order => IsoClass::Other { order, element_orders: orders },
    }
}

/// Outcome of [`force_classification`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Forced {
    Class(IsoClass),
    /// Several non-isomorphic groups remain admissible.
    Undetermined(Vec<IsoClass>),
}

/// All groups `H` with `L ⩽ H ⩽ U` obtained by adjoining at most two
/// elements of `U` to `L`.
pub fn intermediate_groups(
    upper: &PermGroupInfo,
    lower: &PermGroupInfo,
) -> Result<Vec<PermGroupInfo>, GroupError> {
    if !lower.is_subgroup_of(upper) {
        return Err(GroupError::NotASubgroup);
    }
    let mut found: BTreeMap<BTreeSet<Perm>, PermGroupInfo> = BTreeMap::new();
    let base = &lower.elements;
    let n = upper.elements.len();
    let mut push = |extra: &[&Perm]| -> Result<(), GroupError> {
        let mut gens: Vec<Perm> = base.clone();
        gens.extend(extra.iter().map(|p| (*p).clone()));
        let h = generate(upper.degree, &gens)?;
        found.entry(h.element_set()).or_insert(h);
        Ok(())
    };
    push(&[])?;
    for i in 0..n {
        push(&[&upper.elements[i]])?;
        for j in i + 1..n {
            push(&[&upper.elements[i], &upper.elements[j]])?;
        }
    }
    let mut groups: Vec<PermGroupInfo> = found.into_values().collect();
    groups.sort_by_key(|g| g.order);
    Ok(groups)
}

/// Decides the isomorphism class of an unknown group `G` with `L ⩽ G ⩽ U`
/// that is known to contain elements of each cycle type in `facts`.
pub fn force_classification(
    upper: &PermGroupInfo,
    lower: &PermGroupInfo,
    facts: &[CycleType],
) -> Result<Forced, GroupError> {
    let candidates: Vec<PermGroupInfo> = intermediate_groups(upper, lower)?
        .into_iter()
        .filter(|h| facts.iter().all(|t| h.has_cycle_type(t)))
        .collect();
    if candidates.is_empty() {
        let names: Vec<String> = facts.iter().map(|t| t.to_string()).collect();
        return Err(GroupError::FactsUnrealizable(names.join(", ")));
    }
    let classes: BTreeSet<IsoClass> = candidates.iter().map(|h| h.iso_class.clone()).collect();
    if classes.len() == 1 {
        Ok(Forced::Class(classes.into_iter().next().expect("one class")))
    } else {
        Ok(Forced::Undetermined(classes.into_iter().collect()))
    }
}

/// Every overgroup of `lower` inside `ambient` that satisfies `admissible`,
/// found by adjoining one element at a time.
///
/// `admissible` must be inherited by subgroups, so every admissible
/// overgroup is reached through a chain of admissible groups.
pub fn admissible_overgroups(
    lower: &PermGroupInfo,
    ambient: &PermGroupInfo,
    admissible: impl Fn(&PermGroupInfo) -> bool,
) -> Result<Vec<PermGroupInfo>, GroupError> {
    if !lower.is_subgroup_of(ambient) {
        return Err(GroupError::NotASubgroup);
    }
    let mut seen: BTreeSet<BTreeSet<Perm>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    if admissible(lower) {
        seen.insert(lower.element_set());
        queue.push_back(lower.clone());
    }
    while let Some(g) = queue.pop_front() {
        for x in &ambient.elements {
            if g.contains(x) {
                continue;
            }
            let mut gens = g.elements.clone();
            gens.push(x.clone());
            let h = generate(g.degree, &gens)?;
            if !admissible(&h) {
                continue;
            }
            if seen.insert(h.element_set()) {
                queue.push_back(h);
            }
        }
        out.push(g);
    }
    out.sort_by_key(|g| g.order);
    Ok(out)
}

/// The stabilizer condition on point 1: every element fixing 1 lies in
/// `{id, (2 3), (4 5), (2 3)(4 5)}`.
pub fn dih5_stabilizer_condition(h: &PermGroupInfo) -> bool {
    let allowed: Vec<Perm> = ["()", "(2 3)", "(4 5)", "(2 3)(4 5)"]
        .iter()
        .map(|s| Perm::parse(s, 5).expect("fixed notation"))
        .collect();
    h.elements.iter().filter(|g| g.apply(0) == 0).all(|g| allowed.contains(g))
}

/// True iff `lower` (a dihedral group of order 10 on five points) is the only
/// subgroup of Sym5 containing it whose point-1 stabilizer satisfies
/// [`dih5_stabilizer_condition`].
pub fn verify_dih5_maximality(lower: &PermGroupInfo) -> Result<bool, GroupError> {
    if lower.degree != 5 || lower.iso_class != IsoClass::Dih5 {
        return Err(GroupError::NotDih5(format!("{} on {} points", lower.iso_class, lower.degree)));
    }
    let groups = admissible_overgroups(lower, &symmetric(5), dih5_stabilizer_condition)?;
    Ok(groups.len() == 1 && groups[0].same_elements(lower))
}
