//! Confusion matrices, metrics and the Markdown/CSV report, using the
//! published reference table as input.

use vqc::eval::{confusion, metrics, report_table, ReportRow, PUBLISHED};

fn main() -> vqc::Result<()> {
    let y_true = [1, 1, 1, 0, 0, 0, 1, 0];
    let y_pred = [1, 0, 1, 0, 1, 0, 1, 0];
    let cm = confusion(&y_true, &y_pred)?;
    println!("{cm:?}\n{:?}\n", metrics(&cm)?);

    let rows = PUBLISHED
        .iter()
        .map(|r| Ok(ReportRow::new(r.model, metrics(&r.matrix)?)))
        .collect::<vqc::Result<Vec<_>>>()?;
    let report = report_table(&rows);
    println!("{}", report.markdown);
    print!("{}", report.csv);
    Ok(())
}
