//! Reference frames separating the perfect-recall notions, each with its
//! known verdicts, plus the bounded morphism from `fig4b` onto `fig4a`.

use crate::frame::{build_frame, Frame, FrameSpec, TreeSpec};

/// A named example frame and the property verdicts it is known to have.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: FrameSpec,
    /// `(property name, expected verdict)`, property names as in `etl check --prop`.
    pub expect: Vec<(&'static str, bool)>,
}

impl Fixture {
    pub fn frame(&self) -> Frame {
        build_frame(&self.spec).expect("fixture frames are well-formed")
    }
}

/// A named map between two fixtures.
#[derive(Debug, Clone)]
pub struct MorphismFixture {
    pub name: &'static str,
    pub source: &'static str,
    pub target: &'static str,
    pub map: Vec<(&'static str, &'static str)>,
}

fn tree(root: &str, histories: &[&str]) -> TreeSpec {
    TreeSpec {
        root: root.to_string(),
        histories: histories.iter().map(|s| s.to_string()).collect(),
    }
}

fn spec(events: &[&str], trees: Vec<TreeSpec>, access: &[(&str, &str)], symmetric: bool) -> FrameSpec {
    FrameSpec {
        events: events.iter().map(|s| s.to_string()).collect(),
        trees,
        access: access.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        symmetric,
    }
}

const E123: &[&str] = &["e1", "e2", "e3"];

fn fig1a_spec() -> FrameSpec {
    // information sets {ε, e1} and {e2, e1.e3, e2.e3}
    spec(
        E123,
        vec![tree("r", &["", "e1", "e1.e3", "e2", "e2.e3"])],
        &[
            ("", ""),
            ("e1", "e1"),
            ("", "e1"),
            ("e2", "e2"),
            ("e1.e3", "e1.e3"),
            ("e2.e3", "e2.e3"),
            ("e2", "e1.e3"),
            ("e2", "e2.e3"),
            ("e1.e3", "e2.e3"),
        ],
        true,
    )
}

fn fig1b_spec() -> FrameSpec {
    // information sets {r1}, {r1:e1, r2}, {r2:e2}
    spec(
        &["e1", "e2"],
        vec![tree("r1", &["", "e1"]), tree("r2", &["", "e2"])],
        &[
            ("r1:", "r1:"),
            ("r1:e1", "r1:e1"),
            ("r2:", "r2:"),
            ("r2:e2", "r2:e2"),
            ("r1:e1", "r2:"),
        ],
        true,
    )
}

fn fig3a_spec() -> FrameSpec {
    spec(
        E123,
        vec![tree("r", &["", "e1", "e1.e3", "e2", "e2.e3"])],
        &[
            ("", ""),
            ("e1", "e1"),
            ("e2", "e1"),
            ("e1.e3", "e1.e3"),
            ("e1.e3", "e2.e3"),
            ("e2.e3", "e1.e3"),
            ("e2.e3", "e2.e3"),
        ],
        false,
    )
}

fn fig3b_spec() -> FrameSpec {
    spec(
        E123,
        vec![tree("r", &["", "e1", "e2", "e3"])],
        &[("", ""), ("e1", "e2"), ("e2", "e3"), ("e3", "e3")],
        false,
    )
}

fn fig3c_spec() -> FrameSpec {
    spec(
        E123,
        vec![tree("r", &["", "e1", "e2", "e2.e3"])],
        &[("", ""), ("", "e2"), ("e1", "e2.e3"), ("e2", "e2"), ("e2.e3", "e2.e3")],
        false,
    )
}

fn fig3d_spec() -> FrameSpec {
    spec(
        E123,
        vec![tree("r", &["", "e1", "e2", "e2.e3"])],
        &[("", ""), ("e1", "e2.e3"), ("e2", "e2"), ("e2.e3", "e2.e3")],
        false,
    )
}

fn fig4a_spec() -> FrameSpec {
    spec(
        &["e1"],
        vec![tree("r1", &["", "e1"]), tree("r2", &[""])],
        &[("r1:", "r1:"), ("r1:e1", "r1:e1"), ("r2:", "r1:e1")],
        false,
    )
}

fn fig4b_spec() -> FrameSpec {
    spec(
        &["e1"],
        vec![tree("r1'", &["", "e1"]), tree("r2'", &[""]), tree("r3'", &[""])],
        &[
            ("r1':", "r1':"),
            ("r1':e1", "r1':e1"),
            ("r2':", "r3':"),
            ("r3':", "r3':"),
        ],
        false,
    )
}

/// All figure fixtures, in listing order.
pub fn all() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "fig1a",
            description: "S5 tree with perfect recall that violates wsPR",
            spec: fig1a_spec(),
            expect: vec![
                ("pr_ee", true),
                ("pr_hc", true),
                ("pr_hcl", true),
                ("wspr", false),
                ("s5", true),
            ],
        },
        Fixture {
            name: "fig1b",
            description: "S5 forest with forest-wsPR but without perfect recall",
            spec: fig1b_spec(),
            expect: vec![("wspr", true), ("pr_hc", false), ("pr_ee", false), ("s5", true)],
        },
        Fixture {
            name: "fig3a",
            description: "PR_ee but neither PR_hc nor PR_hc^l",
            spec: fig3a_spec(),
            expect: vec![("pr_ee", true), ("pr_hc", false), ("pr_hcl", false)],
        },
        Fixture {
            name: "fig3b",
            description: "PR_hc and PR_hc^l but not PR_ee (not transitive)",
            spec: fig3b_spec(),
            expect: vec![
                ("pr_hc", true),
                ("pr_hcl", true),
                ("pr_ee", false),
                ("transitive", false),
            ],
        },
        Fixture {
            name: "fig3c",
            description: "PR_hc and PR_hc^l but not PR_ee (not Euclidean)",
            spec: fig3c_spec(),
            expect: vec![
                ("pr_hc", true),
                ("pr_hcl", true),
                ("pr_ee", false),
                ("euclidean", false),
            ],
        },
        Fixture {
            name: "fig3d",
            description: "PR_hc but neither PR_hc^l nor PR_ee",
            spec: fig3d_spec(),
            expect: vec![("pr_hc", true), ("pr_hcl", false), ("pr_ee", false)],
        },
        Fixture {
            name: "fig4a",
            description: "introspective forest F with PR_hc^l but not PR_ee",
            spec: fig4a_spec(),
            expect: vec![
                ("pr_hcl", true),
                ("pr_ee", false),
                ("pr", false),
                ("introspective", true),
                ("initially_synchronous", false),
            ],
        },
        Fixture {
            name: "fig4b",
            description: "forest F' with PR_hc^l and PR_ee; F is its bounded morphic image",
            spec: fig4b_spec(),
            expect: vec![("pr_hcl", true), ("pr_ee", true), ("pr", true), ("introspective", true)],
        },
    ]
}

pub fn morphisms() -> Vec<MorphismFixture> {
    vec![MorphismFixture {
        name: "fig4-morphism",
        source: "fig4b",
        target: "fig4a",
        map: vec![("r1':", "r1:"), ("r1':e1", "r1:e1"), ("r2':", "r2:"), ("r3':", "r1:e1")],
    }]
}

pub fn find(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

pub fn fig1a() -> Frame {
    build_frame(&fig1a_spec()).unwrap()
}

pub fn fig1b() -> Frame {
    build_frame(&fig1b_spec()).unwrap()
}

pub fn fig3a() -> Frame {
    build_frame(&fig3a_spec()).unwrap()
}

pub fn fig3b() -> Frame {
    build_frame(&fig3b_spec()).unwrap()
}

pub fn fig3c() -> Frame {
    build_frame(&fig3c_spec()).unwrap()
}

pub fn fig3d() -> Frame {
    build_frame(&fig3d_spec()).unwrap()
}

pub fn fig4a() -> Frame {
    build_frame(&fig4a_spec()).unwrap()
}

pub fn fig4b() -> Frame {
    build_frame(&fig4b_spec()).unwrap()
}

/// `fig3a` with `e2 ∼ e1` and `e1 ∼ e1` removed: still PR_ee, but without
/// persistent insanity, and its S5 closure lacks PR_hc^l.
pub fn fig3a_pruned() -> Frame {
    let mut s = fig3a_spec();
    s.access.retain(|(a, b)| !(b == "e1" && (a == "e2" || a == "e1")));
    build_frame(&s).unwrap()
}
