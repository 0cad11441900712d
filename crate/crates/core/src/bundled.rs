//! Example specs and families shipped with the crate.

use crate::surface::{FamilySpec, SurfaceSpec};

/// `(file name, contents)` of every bundled single spec.
pub const SPECS: &[(&str, &str)] = &[
    ("flute.json", include_str!("../families/flute.json")),
    ("genus2.json", include_str!("../families/genus2.json")),
    ("thrice_punctured.json", include_str!("../families/thrice_punctured.json")),
];

/// `(file name, contents)` of every bundled family.
pub const FAMILIES: &[(&str, &str)] = &[
    ("flute.family.json", include_str!("../families/flute.family.json")),
    ("shrinking.family.json", include_str!("../families/shrinking.family.json")),
    ("tree.family.json", include_str!("../families/tree.family.json")),
    ("handles.family.json", include_str!("../families/handles.family.json")),
];

fn lookup<'a>(table: &[(&str, &'a str)], name: &str) -> Option<&'a str> {
    table
        .iter()
        .find(|(file, _)| *file == name || file.split('.').next() == Some(name))
        .map(|(_, text)| *text)
}

/// Looks up a spec by file name or stem (`"genus2"`).
pub fn spec(name: &str) -> Option<SurfaceSpec> {
    lookup(SPECS, name).map(|t| serde_json::from_str(t).expect("bundled spec parses"))
}

/// Looks up a family by file name or stem (`"flute"`).
pub fn family(name: &str) -> Option<FamilySpec> {
    lookup(FAMILIES, name).map(|t| serde_json::from_str(t).expect("bundled family parses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Surface;

    #[test]
    fn everything_parses_and_validates() {
        for (name, _) in SPECS {
            Surface::new(spec(name).unwrap()).unwrap();
        }
        for (name, _) in FAMILIES {
            let fam = family(name).unwrap();
            for inst in fam.instances(None).unwrap() {
                Surface::new(inst.spec).unwrap_or_else(|e| panic!("{name} at {}: {e}", inst.param));
            }
        }
        assert!(family("flute").is_some());
        assert!(spec("flute").is_some());
        assert!(family("nope").is_none());
    }

    #[test]
    fn specs_round_trip() {
        for (name, _) in SPECS {
            let s = spec(name).unwrap();
            let back: SurfaceSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            assert_eq!(back, s);
        }
    }
}
