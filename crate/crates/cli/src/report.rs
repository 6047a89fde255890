//! JSON report shapes. Field order is the declaration order.

use serde::Serialize;

#[derive(Serialize)]
pub struct Simulation {
    pub input: String,
    pub defined: bool,
    pub output: Option<String>,
    pub reason: Option<&'static str>,
    pub steps: Option<usize>,
}

#[derive(Serialize)]
pub struct Behaviors {
    pub input: String,
    pub ll: Vec<[String; 2]>,
    pub lr: Vec<[String; 2]>,
    pub rl: Vec<[String; 2]>,
    pub rr: Vec<[String; 2]>,
}

#[derive(Serialize)]
pub struct Element {
    pub representative: String,
    pub behaviors: Behaviors,
    pub idempotent: bool,
    pub index: usize,
    pub period: usize,
}

#[derive(Serialize)]
pub struct ClassQuery {
    pub word: String,
    pub class: String,
}

#[derive(Serialize)]
pub struct Monoid {
    pub size: usize,
    pub elements: Vec<Element>,
    pub classes: Vec<ClassQuery>,
}

#[derive(Serialize)]
pub struct Aperiodic {
    pub aperiodic: bool,
    pub elements: usize,
    pub index: Option<usize>,
    pub witness: Option<String>,
    pub period: Option<usize>,
}

#[derive(Serialize)]
pub struct Produced {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub states: Option<usize>,
    pub path: Option<String>,
    pub text: String,
}

#[derive(Serialize)]
pub struct Equivalence {
    pub verdict: String,
    pub max_len: usize,
    pub words_tested: usize,
    pub word: Option<String>,
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Serialize)]
pub struct Truth {
    pub input: String,
    pub value: bool,
}
