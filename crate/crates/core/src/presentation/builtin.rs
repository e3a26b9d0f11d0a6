//! The two parametric witness families: 2-generator p-groups of class 5 all of
//! whose proper subgroups have class at most 3, for p = 2 and p = 3.

use std::fmt;
use std::str::FromStr;

use super::{
    serialize_presentation, validate_structure, Diagnostic, Location, PcPresentation,
    PresentationError, Word,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    ExampleP2,
    ExampleP3,
}

impl Family {
    pub fn prime(self) -> u64 {
        match self {
            Family::ExampleP2 => 2,
            Family::ExampleP3 => 3,
        }
    }

    /// Smallest admissible exponent of the order of `a`.
    pub fn min_n(self) -> u32 {
        match self {
            Family::ExampleP2 => 3,
            Family::ExampleP3 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::ExampleP2 => "example_p2",
            Family::ExampleP3 => "example_p3",
        }
    }

    fn table(self) -> &'static FamilyTable {
        match self {
            Family::ExampleP2 => &EXAMPLE_P2,
            Family::ExampleP3 => &EXAMPLE_P3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "example_p2" => Ok(Family::ExampleP2),
            "example_p3" => Ok(Family::ExampleP3),
            other => Err(format!("unknown family {other:?} (expected example_p2 or example_p3)")),
        }
    }
}

/// A relation `[x, y] = w` as printed, with `w` a list of `(name, exponent)`.
type Relation = (&'static str, &'static str, &'static [(&'static str, i64)]);

struct FamilyTable {
    /// Generator names with `p`-exponents of their orders; `None` marks `a`,
    /// whose exponent is the family parameter.
    generators: &'static [(&'static str, Option<u32>)],
    relations: &'static [Relation],
}

static EXAMPLE_P2: FamilyTable = FamilyTable {
    generators: &[
        ("a", None),
        ("b", Some(3)),
        ("c", Some(2)),
        ("d1", Some(2)),
        ("d2", Some(2)),
        ("e1", Some(2)),
        ("e2", Some(1)),
    ],
    relations: &[
        ("a", "b", &[("c", 1)]),
        ("c", "a", &[("d1", 1)]),
        ("c", "b", &[("d2", 1)]),
        ("d1", "a", &[("e1", 1)]),
        ("d1", "b", &[("e2", 1)]),
        ("d2", "a", &[("e1", 2), ("e2", 1)]),
        ("d2", "b", &[]),
        ("e2", "a", &[("e1", 2)]),
        ("e1", "a", &[]),
        ("e1", "b", &[]),
        ("e2", "b", &[]),
        ("e3", "a", &[]),
        ("e3", "b", &[]),
    ],
};

static EXAMPLE_P3: FamilyTable = FamilyTable {
    generators: &[
        ("a", None),
        ("b", Some(1)),
        ("c", Some(1)),
        ("d1", Some(1)),
        ("d2", Some(1)),
        ("e1", Some(1)),
        ("e2", Some(1)),
        ("f", Some(1)),
    ],
    relations: &[
        ("a", "b", &[("c", 1)]),
        ("c", "a", &[("d1", 1)]),
        ("c", "b", &[("d2", 1)]),
        ("d1", "a", &[("e1", 1)]),
        ("d1", "b", &[("e2", 1)]),
        ("d2", "a", &[("e2", 1)]),
        ("d2", "b", &[]),
        ("e1", "b", &[("f", 1)]),
        ("e2", "a", &[("f", 1)]),
        ("e1", "a", &[]),
        ("e2", "b", &[]),
        ("f", "a", &[]),
        ("f", "b", &[]),
    ],
};

/// A built-in presentation together with the warnings raised while building it.
#[derive(Clone, Debug)]
pub struct Instantiation {
    pub family: Family,
    pub n: u32,
    pub presentation: PcPresentation,
    pub warnings: Vec<Diagnostic>,
}

fn check_parameter(family: Family, n: u32) -> Result<(), PresentationError> {
    if n < family.min_n() {
        return Err(PresentationError::ParameterTooSmall { family, n, min: family.min_n() });
    }
    if family.prime().checked_pow(n).is_none_or(|o| o > 1 << 62) {
        return Err(PresentationError::ParameterTooLarge { family, n });
    }
    Ok(())
}

/// Builds the family member whose first generator has order `p^n`.
///
/// Relations that mention a generator outside the declared list are dropped
/// and reported as warnings; whether what remains defines a group of the
/// expected order is left to the consistency check.
pub fn instantiate_parameter(family: Family, n: u32) -> Result<Instantiation, PresentationError> {
    check_parameter(family, n)?;
    let table = family.table();
    let p = family.prime();
    let names: Vec<&str> = table.generators.iter().map(|(g, _)| *g).collect();
    let mut pres = PcPresentation {
        prime: p,
        generators: names.iter().map(|s| s.to_string()).collect(),
        relative_orders: table
            .generators
            .iter()
            .map(|&(_, e)| p.pow(e.unwrap_or(n)))
            .collect(),
        power_relations: vec![Word::identity(); names.len()],
        commutator_relations: Default::default(),
    };
    let mut warnings = Vec::new();
    let index = |name: &str| names.iter().position(|g| *g == name);
    for &(x, y, rhs) in table.relations {
        let undeclared: Vec<&str> = std::iter::once(x)
            .chain(std::iter::once(y))
            .chain(rhs.iter().map(|(g, _)| *g))
            .filter(|g| index(g).is_none())
            .collect();
        if !undeclared.is_empty() {
            warnings.push(Diagnostic::warning(
                Location { line: None, relation: Some(format!("[{x},{y}]")) },
                format!("dropped relation [{x},{y}] naming undeclared generator {}", undeclared.join(", ")),
            ));
            continue;
        }
        let word = Word(rhs.iter().map(|&(g, e)| (index(g).unwrap(), e)).collect());
        let (ix, iy) = (index(x).unwrap(), index(y).unwrap());
        // [x, y] = w  <=>  [y, x] = w^-1
        if ix > iy {
            pres.set_commutator(ix, iy, word);
        } else {
            pres.set_commutator(iy, ix, word.formal_inverse());
        }
    }
    let errors = validate_structure(&pres);
    if !errors.is_empty() {
        return Err(PresentationError::Invalid(errors));
    }
    Ok(Instantiation { family, n, presentation: pres, warnings })
}

/// The family member written out with every printed relation kept, including
/// those on undeclared generators. For `example_p2` this text does not parse.
pub fn printed_text(family: Family, n: u32) -> Result<String, PresentationError> {
    let inst = instantiate_parameter(family, n)?;
    let mut text = serialize_presentation(&inst.presentation);
    for &(x, y, rhs) in family.table().relations {
        if inst.presentation.index_of(x).is_some() && inst.presentation.index_of(y).is_some() {
            continue;
        }
        let w = if rhs.is_empty() {
            "1".to_string()
        } else {
            rhs.iter().map(|(g, e)| format!("{g}^{e}")).collect::<Vec<_>>().join(" ")
        };
        text.push_str(&format!("comm {x} {y} = {w}\n"));
    }
    Ok(text)
}
