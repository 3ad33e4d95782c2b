//! The 26-entry simplification taxonomy and the rule identifiers built on it.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleInfo {
    pub code: &'static str,
    pub category: &'static str,
    pub name: &'static str,
    pub description: &'static str,
    pub executable: bool,
}

const fn r(
    code: &'static str,
    category: &'static str,
    name: &'static str,
    description: &'static str,
    executable: bool,
) -> RuleInfo {
    RuleInfo {
        code,
        category,
        name,
        description,
        executable,
    }
}

pub const TAXONOMY: [RuleInfo; 26] = [
    r("T1.1", "Control logic", "Simplify method return", "Return an expression directly instead of through a temporary", true),
    r("T1.2", "Control logic", "Simplify boolean and algebraic expression", "Rewrite boolean comparisons and double negations to simpler forms", true),
    r("T1.3", "Control logic", "Use foreach in loop iteration", "Turn an index loop that only reads elements into an enhanced for", true),
    r("T1.4", "Control logic", "Merge conditional", "Combine nested ifs without else into one condition", true),
    r("T1.5", "Control logic", "Ternary conditional operator", "Replace an if/else that assigns or returns into a conditional expression", true),
    r("T1.6", "Control logic", "Restructure conditional branches", "Replace branching with enums, polymorphism or lookups", false),
    r("T1.7", "Control logic", "Replace with pipeline", "Express a loop as a stream pipeline", false),
    r("T1.8", "Control logic", "Replace variable with attribute", "Use a field in place of a method-local variable", false),
    r("T1.9", "Control logic", "Merge catch", "Fold catch clauses with identical handlers into a multi-catch", true),
    r("T1.10", "Control logic", "Change return type", "Make the method void and drop return plumbing", false),
    r("T2.1", "Extraction", "Extract method", "Move a code block into its own method", false),
    r("T2.2", "Extraction", "Extract variable", "Introduce a variable for a repeated expression", false),
    r("T2.3", "Extraction", "Consolidate duplicate conditional fragments", "Hoist code shared by all branches out of a conditional", false),
    r("T3.1", "Deletion", "Remove unnecessary code", "Delete statements that do not contribute to behaviour", true),
    r("T3.2", "Deletion", "Remove unused imports", "Delete imports that nothing refers to", true),
    r("T3.3", "Deletion", "Clean up dead code blocks", "Delete unreachable statements and constant-false branches", true),
    r("T4.1", "API", "Replace with equivalent API", "Call a library routine instead of an inline implementation", false),
    r("T5.1", "Inline code", "Inline variable", "Substitute a single-use temporary at its use site", true),
    r("T5.2", "Inline code", "Inline method", "Substitute the body of a small single-use method", false),
    r("T6.1", "Lambda", "Use lambda", "Replace an anonymous class or verbose construct with a lambda", false),
    r("T7.1", "Others", "Use diamond operator", "Let the compiler infer constructor type arguments", true),
    r("T7.2", "Others", "Code style reformat", "Use a more compact layout or notation", false),
    r("T7.3", "Others", "Use constructor to initialize", "Initialize properties through a constructor", false),
    r("T7.4", "Others", "Merge imports", "Collapse many imports from one package into a wildcard", true),
    r("T7.5", "Others", "Replace with annotations", "Let an annotation generate boilerplate members", false),
    r("T7.6", "Others", "Try-with-resources", "Close a resource via try-with-resources instead of finally", true),
];

/// A taxonomy code. Ordering follows the table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(u8);

impl RuleId {
    pub fn from_code(code: &str) -> Option<RuleId> {
        TAXONOMY.iter().position(|r| r.code == code).map(|i| RuleId(i as u8))
    }

    /// Panics on an unknown code; for literals in rule implementations.
    pub(crate) fn of(code: &str) -> RuleId {
        Self::from_code(code).unwrap_or_else(|| panic!("unknown taxonomy code {code}"))
    }

    pub fn info(self) -> &'static RuleInfo {
        &TAXONOMY[self.0 as usize]
    }

    pub fn code(self) -> &'static str {
        self.info().code
    }

    pub fn is_executable(self) -> bool {
        self.info().executable
    }

    pub fn all() -> impl Iterator<Item = RuleId> {
        (0..TAXONOMY.len()).map(|i| RuleId(i as u8))
    }

    pub fn executable() -> impl Iterator<Item = RuleId> {
        Self::all().filter(|r| r.is_executable())
    }
}

impl fmt::Debug for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let code = String::deserialize(d)?;
        RuleId::from_code(&code).ok_or_else(|| serde::de::Error::custom(format!("unknown taxonomy code {code}")))
    }
}

/// The table as JSON rows (code, category, name, description, executable).
pub fn rule_table_json() -> serde_json::Value {
    serde_json::to_value(TAXONOMY).expect("static table serializes")
}
