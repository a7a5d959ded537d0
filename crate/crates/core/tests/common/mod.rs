//! A320 hydraulics model and its reference data.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mcsa_core::ltl::{parse_ltl, Ltl};
use mcsa_core::model::{parse_model, Model};

pub const A320_MODEL: &str = include_str!("../../models/a320.tsm");
pub const A320_PROPERTY: &str = include_str!("../../models/a320.ltl");

pub const A320_FLAGS: [&str; 11] = [
    "distyF", "distgF", "distbF", "E1F", "E2F", "PTUF", "EDPyF", "EDPgF", "EMPbF", "EMPyF", "RATF",
];

/// The 21 reference minimal cut sets.
pub const A320_MCS: [&[&str]; 21] = [
    &["distyF", "distbF"],
    &["distyF", "distgF"],
    &["distgF", "distbF"],
    &["distyF", "EMPbF"],
    &["distgF", "EMPbF"],
    &["distyF", "PTUF", "EDPgF"],
    &["distbF", "PTUF", "EDPgF"],
    &["distyF", "E1F", "PTUF"],
    &["distbF", "E1F", "PTUF"],
    &["PTUF", "EDPgF", "EMPbF"],
    &["E1F", "PTUF", "EMPbF"],
    &["EDPyF", "EDPgF", "EMPyF"],
    &["E1F", "E2F", "EMPyF"],
    &["E2F", "EDPgF", "EMPyF"],
    &["E1F", "EDPyF", "EMPyF"],
    &["distbF", "PTUF", "EDPyF", "EMPyF"],
    &["distgF", "PTUF", "EDPyF", "EMPyF"],
    &["distbF", "E2F", "PTUF", "EMPyF"],
    &["distgF", "E2F", "PTUF", "EMPyF"],
    &["PTUF", "EDPyF", "EMPbF", "EMPyF"],
    &["E2F", "PTUF", "EMPbF", "EMPyF"],
];

/// A cycle state whose cut set is {E2F, PTUF, EMPbF, EMPyF}.
pub const CYCLE_STATE: [(&str, &str); 26] = [
    ("Pilot", "ready"),
    ("Engine1", "on"),
    ("Engine2", "off"),
    ("Yellow", "off"),
    ("PTUy", "off"),
    ("PTU", "off"),
    ("EDPy", "off"),
    ("EDPg", "on"),
    ("Blue", "off"),
    ("EMPy", "off"),
    ("EMPb", "off"),
    ("RAT", "off"),
    ("E1F", "false"),
    ("E2F", "true"),
    ("distyF", "false"),
    ("distgF", "false"),
    ("distbF", "false"),
    ("PTUF", "true"),
    ("EDPyF", "false"),
    ("EDPgF", "false"),
    ("EMPbF", "true"),
    ("EMPyF", "true"),
    ("RATF", "false"),
    ("Green", "on"),
    ("Aircraft", "flyingSlow"),
    ("System", "operating"),
];

pub fn a320() -> (Model, Ltl) {
    (
        parse_model(A320_MODEL).expect("model parses"),
        parse_ltl(A320_PROPERTY).expect("property parses"),
    )
}

pub fn a320_family() -> BTreeSet<BTreeSet<String>> {
    A320_MCS
        .iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect()
}
