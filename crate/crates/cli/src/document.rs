//! JSON scaling documents.
//!
//! ```json
//! {
//!   "atoms": ["a", "b"],
//!   "classes": {"0": [[]], "alpha": [["a"], ["b"]], "1": [["a", "b"]]},
//!   "order": [["0", "alpha"], ["alpha", "1"]]
//! }
//! ```
//!
//! `order` lists `[lesser, greater]` pairs whose transitive closure is
//! taken. Serialization writes the normal form: classes in scale order,
//! subsets by ascending bit pattern with atoms in declaration order, and
//! only covering pairs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use scaled_boolean::{Algebra, ClassId, Mask, Scaling, ScalingError};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingDocument {
    pub atoms: Vec<String>,
    pub classes: ClassList,
    pub order: Vec<(String, String)>,
}

/// Class name → subsets, in document order. Duplicate names are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassList(pub Vec<(String, Vec<Vec<String>>)>);

impl<'de> Deserialize<'de> for ClassList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ClassVisitor;

        impl<'de> Visitor<'de> for ClassVisitor {
            type Value = ClassList;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping class names to lists of subsets")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ClassList, A::Error> {
                let mut out: Vec<(String, Vec<Vec<String>>)> = Vec::new();
                while let Some((name, subsets)) = map.next_entry::<String, Vec<Vec<String>>>()? {
                    if out.iter().any(|(n, _)| *n == name) {
                        return Err(de::Error::custom(format!("duplicate class name {name:?}")));
                    }
                    out.push((name, subsets));
                }
                Ok(ClassList(out))
            }
        }

        deserializer.deserialize_map(ClassVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentError {
    /// Syntax or schema error, with the parser's line and column.
    Json(String),
    /// A field-level problem: `(path, message)`.
    Field(String, String),
    /// The order is cyclic or otherwise unusable.
    Order(String),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Json(msg) => write!(f, "malformed document: {msg}"),
            Self::Field(path, msg) => write!(f, "{path}: {msg}"),
            Self::Order(msg) => write!(f, "order: {msg}"),
        }
    }
}

fn field(path: impl Into<String>, msg: impl Into<String>) -> DocumentError {
    DocumentError::Field(path.into(), msg.into())
}

impl ScalingDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))
    }

    pub fn from_scaling(s: &Scaling) -> Self {
        let alg = s.algebra();
        let subset = |bits: Mask| -> Vec<String> {
            alg.members(bits).map(|i| alg.labels()[i].clone()).collect()
        };
        let classes = (0..s.class_count())
            .map(|c| {
                let c = ClassId(c);
                let mut members = s.members(c).to_vec();
                members.sort_unstable();
                (
                    s.name(c).to_string(),
                    members.into_iter().map(subset).collect(),
                )
            })
            .collect();
        let order = s
            .order()
            .covers()
            .into_iter()
            .map(|(a, b)| {
                (
                    s.name(ClassId(a)).to_string(),
                    s.name(ClassId(b)).to_string(),
                )
            })
            .collect();
        Self {
            atoms: alg.labels().to_vec(),
            classes: ClassList(classes),
            order,
        }
    }

    /// Builds the scaling without checking the axioms; the caller runs
    /// [`Scaling::verify_axioms`].
    pub fn to_scaling(&self) -> Result<Scaling, DocumentError> {
        if self.atoms.is_empty() {
            return Err(field("atoms", "at least one atom is required"));
        }
        let mut seen = HashSet::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if a.is_empty() {
                return Err(field(format!("atoms[{i}]"), "atom names must be nonempty"));
            }
            if !seen.insert(a.as_str()) {
                return Err(field(
                    format!("atoms[{i}]"),
                    format!("duplicate atom {a:?}"),
                ));
            }
        }
        let alg = Algebra::powerset(&self.atoms).map_err(|e| field("atoms", e.to_string()))?;
        let index: HashMap<&str, usize> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), i))
            .collect();
        let mut assignment: Vec<Option<usize>> = vec![None; alg.size()];
        let mut names = Vec::with_capacity(self.classes.0.len());
        for (c, (name, subsets)) in self.classes.0.iter().enumerate() {
            if name.is_empty() {
                return Err(field("classes", "class names must be nonempty"));
            }
            if subsets.is_empty() {
                return Err(field(
                    format!("classes.{name}"),
                    "a class needs at least one subset",
                ));
            }
            for (j, subset) in subsets.iter().enumerate() {
                let path = format!("classes.{name}[{j}]");
                let mut bits: Mask = 0;
                for atom in subset {
                    let Some(&i) = index.get(atom.as_str()) else {
                        return Err(field(path, format!("unknown atom {atom:?}")));
                    };
                    if bits & (1 << i) != 0 {
                        return Err(field(path, format!("atom {atom:?} listed twice")));
                    }
                    bits |= 1 << i;
                }
                if let Some(other) = assignment[bits as usize] {
                    return Err(field(
                        path,
                        format!(
                            "subset {} already belongs to class {:?}",
                            alg.format_bits(bits),
                            self.classes.0[other].0
                        ),
                    ));
                }
                assignment[bits as usize] = Some(c);
            }
            names.push(name.clone());
        }
        let assignment: Vec<usize> = assignment
            .iter()
            .enumerate()
            .map(|(bits, c)| {
                c.ok_or_else(|| {
                    field(
                        "classes",
                        format!("subset {} is in no class", alg.format_bits(bits as Mask)),
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        let class_index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut order = Vec::with_capacity(self.order.len());
        for (j, (a, b)) in self.order.iter().enumerate() {
            let lookup = |n: &str| {
                class_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| field(format!("order[{j}]"), format!("unknown class {n:?}")))
            };
            order.push((lookup(a)?, lookup(b)?));
        }
        Scaling::assemble(&alg, &assignment, &order, Some(names)).map_err(|e| match e {
            ScalingError::CycleInOrder(c) => {
                DocumentError::Order(format!("cycle through class {:?}", self.classes.0[c].0))
            }
            other => DocumentError::Order(other.to_string()),
        })
    }

    /// Normal-form text: one class or pair per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"atoms\": {},\n", js(&self.atoms)));
        out.push_str("  \"classes\": {");
        for (i, (name, subsets)) in self.classes.0.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str(&format!("    {}: {}", js(name), js(subsets)));
        }
        out.push_str("\n  },\n  \"order\": [");
        for (i, (a, b)) in self.order.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str(&format!("    [{}, {}]", js(a), js(b)));
        }
        if !self.order.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("]\n}\n");
        out
    }
}

/// Compact JSON with a space after each comma outside strings.
fn js<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let compact = serde_json::to_string(v).expect("strings always serialize");
    let mut out = String::with_capacity(compact.len());
    let (mut in_string, mut escaped) = (false, false);
    for ch in compact.chars() {
        out.push(ch);
        if in_string {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
        } else if ch == '"' {
            in_string = true;
        } else if ch == ',' {
            out.push(' ');
        }
    }
    out
}
