use ptau::verify::{run_panel, Cell, Panel};
use ptau::PrecisionContext;
use std::process::ExitCode;
use std::time::Instant;

struct Criterion {
    id: u32,
    label: &'static str,
    select: fn(&Cell) -> bool,
}

fn summarize(cells: &[&Cell]) -> String {
    let worst = cells.iter().filter(|c| !c.passed).map(|c| format!("{}/{} {:.2e}", c.group, c.name, c.worst)).collect::<Vec<_>>();
    if worst.is_empty() {
        let m = cells.iter().map(|c| c.worst / c.tolerance).fold(0f64, f64::max);
        format!("{} cells, worst/tol {m:.1e}", cells.len())
    } else {
        worst.join("; ")
    }
}

fn main() -> ExitCode {
    let ctx = PrecisionContext::default();
    let start = Instant::now();
    let report = run_panel(Panel::Default, &ctx, None).expect("verify panel");
    let elapsed = start.elapsed().as_secs_f64();

    let criteria = [
        Criterion { id: 1, label: "recurrence vs determinant oracle, 7 sets, N <= 10, 1e-30", select: |c| c.name.starts_with("step2") },
        Criterion {
            id: 2,
            label: "ladder and bilinear residuals on oracle sequences, N <= 8, 1e-40",
            select: |c| c.name.starts_with("ladder"),
        },
        Criterion { id: 3, label: "dPV closure 1e-35 and three tau routes 1e-30", select: |c| c.group == "dpv" },
        Criterion { id: 4, label: "hypergeometric route 1e-20 and Gauss summation 1e-45", select: |c| c.group == "hyp" },
        Criterion {
            id: 5,
            label: "CUE gap vs determinants 1e-30, E_1 exact, quadratic relation 1e-35",
            select: |c| c.name.starts_with("gap"),
        },
        Criterion {
            id: 6,
            label: "CUE moments: gamma product 1e-40, |u| = 0.6 and 1/0.6 at 1e-30",
            select: |c| c.name.starts_with("moments"),
        },
        Criterion {
            id: 7,
            label: "Ising closed forms, extremes, three routes 1e-20, long-range order 1e-3",
            select: |c| c.group == "ising",
        },
        Criterion { id: 8, label: "realness, AvM, x^3 and L01/L14 mapping residuals 1e-35", select: |c| c.group == "structure" },
    ];

    let mut ok = true;
    for cr in &criteria {
        let cells: Vec<&Cell> = report.cells.iter().filter(|c| (cr.select)(c)).collect();
        let mut pass = !cells.is_empty() && cells.iter().all(|c| c.passed);
        let mut extra = String::new();
        if cr.id == 1 {
            let slow = cells.iter().map(|c| c.seconds).fold(0f64, f64::max);
            pass &= slow < 10.0;
            extra = format!(", slowest set {slow:.2}s");
        }
        ok &= pass;
        println!("[{}] {}. {} ({}{extra})", if pass { "PASS" } else { "FAIL" }, cr.id, cr.label, summarize(&cells));
    }
    let pass = elapsed < 60.0 && report.all_passed();
    ok &= pass;
    println!(
        "[{}] 9. default verify panel at 60 digits under 60 s ({elapsed:.1}s, {} cells)",
        if pass { "PASS" } else { "FAIL" },
        report.cells.len()
    );

    if ok {
        ExitCode::SUCCESS
    } else {
        print!("{}", report.table());
        ExitCode::FAILURE
    }
}
