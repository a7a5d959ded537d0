use proptest::prelude::*;

use super::*;
use crate::random::{random_model, RandomModelConfig};

#[test]
fn minimal_model() {
    let m = parse_model("var X:{a,b} init a; block t {guard X=a; X:=b;}").unwrap();
    assert_eq!(m.variables.len(), 1);
    assert_eq!(m.blocks.len(), 1);
    assert_eq!(m.blocks[0].guard, Expr::Eq(0, 0));
    assert_eq!(m.blocks[0].updates, vec![(0, 1)]);
}

#[test]
fn events_are_false_initially() {
    let m = parse_model("event E1F;").unwrap();
    let v = &m.variables[0];
    assert!(v.is_event());
    assert_eq!(v.domain[v.initial], "false");
}

#[test]
fn flag_reset_is_rejected() {
    let err = parse_model("event E1F;\nblock t {guard true; E1F:=false;}").unwrap_err();
    assert_eq!(err.diagnostics.len(), 1);
    let d = &err.diagnostics[0];
    assert_eq!(d.kind, DiagnosticKind::FlagReset);
    assert_eq!((d.line, d.col), (2, 27));
}

#[test]
fn positioned_errors() {
    let err =
        parse_model("var X : {a, b} init a;\nblock t { guard X = c; Y := a; }\n").unwrap_err();
    let kinds: Vec<_> = err
        .diagnostics
        .iter()
        .map(|d| (d.line, d.col, d.kind))
        .collect();
    assert_eq!(
        kinds,
        vec![
            (2, 21, DiagnosticKind::UnknownValue),
            (2, 24, DiagnosticKind::UnknownName)
        ]
    );

    let err = parse_model("var X : {a} init a;\nevent X;").unwrap_err();
    assert_eq!(err.diagnostics[0].kind, DiagnosticKind::DuplicateName);
    assert_eq!(err.diagnostics[0].line, 2);

    let err = parse_model("var X : {a, b} init a\nevent E;").unwrap_err();
    assert_eq!(err.diagnostics[0].kind, DiagnosticKind::Syntax);
    assert_eq!((err.diagnostics[0].line, err.diagnostics[0].col), (2, 1));

    let err = parse_model("var X : {a} init a; block t { guard: X; }").unwrap_err();
    assert_eq!(err.diagnostics[0].kind, DiagnosticKind::Invalid);
}

#[test]
fn comments_and_precedence() {
    let src = "# header\nvar X : {a, b} init a; # trailing\nevent F;\n\
               block t { guard: !F & X = a | X = b; X := b; }";
    let m = parse_model(src).unwrap();
    assert_eq!(
        m.blocks[0].guard,
        Expr::or(
            Expr::and(Expr::not(Expr::Eq(1, 1)), Expr::Eq(0, 0)),
            Expr::Eq(0, 1)
        )
    );
}

#[test]
fn completion_adds_stutter() {
    // deadlock in X=b
    let m = parse_model("var X:{a,b} init a; block t {guard X=a; X:=b;}").unwrap();
    let c = m.complete();
    let stutter = c.blocks.last().unwrap();
    assert_eq!(stutter.name, STUTTER_BLOCK);
    assert!(stutter.enabled(&[1]));
    assert!(!stutter.enabled(&[0]));
    assert_eq!(c.complete(), c);

    let single = parse_model("var X:{a} init a;").unwrap().complete();
    assert_eq!(single.blocks.len(), 1);
    assert!(single.blocks[0].enabled(&[0]));
    assert_eq!(single.blocks[0].apply(&[0]), vec![0]);
}

#[test]
fn completion_adds_default_occurrence_blocks() {
    let m = parse_model("event A; event B;\nblock custom { guard: !A; A := true; }")
        .unwrap()
        .complete();
    let names: Vec<_> = m.blocks.iter().map(|b| b.name.as_str()).collect();
    assert_eq!(names, vec!["custom", "occur_B", "stutter"]);
}

#[test]
fn completion_is_total_on_random_models() {
    let cfg = RandomModelConfig::default();
    for seed in 0..30 {
        let m = random_model(&cfg, seed).complete();
        let sizes: Vec<usize> = m.variables.iter().map(|v| v.domain.len()).collect();
        let mut state = vec![0; sizes.len()];
        loop {
            assert!(m.blocks.iter().any(|b| b.enabled(&state)));
            let mut i = 0;
            while i < state.len() {
                state[i] += 1;
                if state[i] < sizes[i] {
                    break;
                }
                state[i] = 0;
                i += 1;
            }
            if i == state.len() {
                break;
            }
        }
    }
}

#[test]
fn printer_output_is_readable() {
    let src = "var X : {a, b} init b;\nevent F;\n\nblock t {\n  guard: (X = a | F) & X != b & !F;\n  X := b;\n}\n";
    let m = parse_model(src).unwrap();
    assert_eq!(m.to_string(), src);
}

proptest! {
    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), vars in 0usize..5, flags in 0usize..4, blocks in 0usize..6) {
        let cfg = RandomModelConfig { vars, max_domain: 4, flags, blocks };
        let m = random_model(&cfg, seed);
        prop_assert_eq!(parse_model(&m.to_string()).unwrap(), m.clone());
        let c = m.complete();
        let back = parse_model(&c.to_string()).unwrap();
        prop_assert!(back.is_complete());
        prop_assert_eq!(back, c);
    }

    #[test]
    fn expression_round_trip(e in expr_strategy()) {
        let m = Model {
            variables: vec![Variable::state("X", &["a", "b", "c"], 0), Variable::event("F")],
            blocks: vec![Block { name: "t".into(), guard: e, updates: vec![] }],
        };
        prop_assert_eq!(parse_model(&m.to_string()).unwrap(), m);
    }
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Expr::Const),
        (0usize..3).prop_map(|x| Expr::Eq(0, x)),
        (0usize..2).prop_map(|x| Expr::Eq(1, x)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::or(a, b)),
        ]
    })
}
