use ptau::verify::{run_panel, Panel};
use ptau::PrecisionContext;

#[test]
fn reduced_precision_panel_passes() {
    let ctx = PrecisionContext::with_digits(30).unwrap();
    let rep = run_panel(Panel::Default, &ctx, Some(4)).unwrap();
    assert!(rep.all_passed(), "{}", rep.table());
}

#[test]
fn ising_only_runs_ising_cells() {
    let ctx = PrecisionContext::with_digits(30).unwrap();
    let rep = run_panel(Panel::Ising, &ctx, None).unwrap();
    assert!(!rep.cells.is_empty());
    assert!(rep.cells.iter().all(|c| c.group == "ising"));
}

#[test]
fn report_is_independent_of_thread_count() {
    let ctx = PrecisionContext::with_digits(40).unwrap();
    let a = run_panel(Panel::Cue, &ctx, Some(1)).unwrap();
    let b = run_panel(Panel::Cue, &ctx, Some(3)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
