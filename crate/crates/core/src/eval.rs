//! Confusion matrices, the four classification metrics and report tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts with class 1 as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fn_, fp, tn }
    }

    /// Actual positives, `P`.
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Actual negatives, `N`.
    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }

    /// Predicted positives, `P'`.
    pub fn predicted_positives(&self) -> u64 {
        self.tp + self.fp
    }

    /// Predicted negatives, `N'`.
    pub fn predicted_negatives(&self) -> u64 {
        self.fn_ + self.tn
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

/// Tallies predictions against ground truth. Labels must be 0 or 1.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::validation(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (i, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fn_ += 1,
            (0, 1) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            _ => {
                return Err(Error::validation(format!(
                    "label pair ({t}, {p}) at index {i} is not binary"
                )))
            }
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
}

impl MetricsRow {
    pub fn as_array(&self) -> [f64; 4] {
        [self.accuracy, self.precision, self.recall, self.fscore]
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Accuracy, precision, recall and F-score. A zero denominator yields 0.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsRow> {
    if cm.total() == 0 {
        return Err(Error::validation("metrics of an empty confusion matrix"));
    }
    let tp = cm.tp as f64;
    let accuracy = (cm.tp + cm.tn) as f64 / cm.total() as f64;
    let precision = ratio(tp, cm.predicted_positives() as f64);
    let recall = ratio(tp, cm.positives() as f64);
    let fscore = ratio(2.0 * precision * recall, precision + recall);
    Ok(MetricsRow {
        accuracy,
        precision,
        recall,
        fscore,
    })
}

/// Rounds to `decimals` places with ties going up.
pub fn round_half_up(v: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (v * scale + 0.5).floor() / scale
}

/// One named line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub metrics: MetricsRow,
}

impl ReportRow {
    pub fn new(model: impl Into<String>, metrics: MetricsRow) -> Self {
        ReportRow {
            model: model.into(),
            metrics,
        }
    }

    /// The four metric cells, rounded and printed to 4 decimals.
    pub fn cells(&self) -> [String; 4] {
        self.metrics.as_array().map(|v| format!("{:.4}", round_half_up(v, 4)))
    }
}

pub const REPORT_COLUMNS: [&str; 5] = ["Model", "Accuracy", "Precision", "Recall", "F-Score"];

/// The same table rendered twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub markdown: String,
    pub csv: String,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report_table(rows: &[ReportRow]) -> Report {
    let mut markdown = format!("| {} |\n|---|---:|---:|---:|---:|\n", REPORT_COLUMNS.join(" | "));
    let mut csv = format!("{}\n", REPORT_COLUMNS.join(","));
    for row in rows {
        let cells = row.cells();
        markdown.push_str(&format!(
            "| {} | {} |\n",
            row.model.replace('|', "\\|"),
            cells.join(" | ")
        ));
        csv.push_str(&format!("{},{}\n", csv_field(&row.model), cells.join(",")));
    }
    Report { markdown, csv }
}

/// A published confusion matrix with its printed actual-class totals and
/// the metric values printed for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedResult {
    pub model: &'static str,
    pub matrix: ConfusionMatrix,
    /// Printed `(P, N)`.
    pub class_totals: [u64; 2],
    /// Printed accuracy, precision, recall, F-score.
    pub printed: [f64; 4],
}

impl PublishedResult {
    /// Whether the counts add up to the printed class totals.
    pub fn totals_consistent(&self) -> bool {
        [self.matrix.positives(), self.matrix.negatives()] == self.class_totals
    }
}

const fn published(model: &'static str, cm: [u64; 4], class_totals: [u64; 2], printed: [f64; 4]) -> PublishedResult {
    PublishedResult {
        model,
        matrix: ConfusionMatrix::new(cm[0], cm[1], cm[2], cm[3]),
        class_totals,
        printed,
    }
}

/// The seven reference classifiers on the 200-review test set.
pub const PUBLISHED: [PublishedResult; 7] = [
    published(
        "Gradient Boosting",
        [64, 45, 26, 65],
        [109, 91],
        [0.645, 0.7111, 0.5872, 0.6432],
    ),
    published(
        "Random Forest",
        [67, 42, 23, 68],
        [109, 91],
        [0.675, 0.7444, 0.6147, 0.6734],
    ),
    published(
        "Support Vector Machine",
        [81, 28, 29, 62],
        [109, 91],
        [0.715, 0.7364, 0.7431, 0.7397],
    ),
    published(
        "EfficientSU2 100 Epochs with COBYLA",
        [81, 28, 23, 68],
        [109, 91],
        [0.745, 0.7788, 0.7431, 0.7605],
    ),
    published(
        "EfficientSU2 150 Epochs with COBYLA",
        [74, 35, 21, 70],
        [109, 91],
        [0.72, 0.7789, 0.6789, 0.7255],
    ),
    published(
        "EfficientSU2 100 Epochs with AQGD",
        [84, 25, 21, 70],
        [109, 91],
        [0.77, 0.8, 0.7706, 0.785],
    ),
    published(
        "EfficientSU2 150 Epochs with AQGD",
        [79, 30, 23, 68],
        [109, 91],
        [0.735, 0.7745, 0.7248, 0.7488],
    ),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn confusion_examples() {
        assert_eq!(
            confusion(&[1, 1, 0, 0], &[1, 1, 0, 0]).unwrap(),
            ConfusionMatrix::new(2, 0, 0, 2)
        );
        assert_eq!(confusion(&[1, 0], &[0, 0]).unwrap(), ConfusionMatrix::new(0, 1, 0, 1));
        assert!(confusion(&[1, 0], &[1]).is_err());
        assert!(confusion(&[2], &[1]).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = metrics(&ConfusionMatrix::new(84, 25, 21, 70)).unwrap();
        assert_abs_diff_eq!(m.accuracy, 0.77, epsilon = 1e-15);
        assert_abs_diff_eq!(m.precision, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.recall, 0.7706, epsilon = 5e-5);
        assert_abs_diff_eq!(m.fscore, 0.785, epsilon = 5e-5);
        let perfect = metrics(&ConfusionMatrix::new(50, 0, 0, 50)).unwrap();
        assert_eq!(perfect.as_array(), [1.0; 4]);
        let none = metrics(&ConfusionMatrix::new(0, 10, 0, 10)).unwrap();
        assert_eq!((none.precision, none.recall, none.fscore), (0.0, 0.0, 0.0));
        assert!(metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn half_up() {
        assert_eq!(format!("{:.4}", round_half_up(0.77055, 4)), "0.7706");
        assert_eq!(format!("{:.4}", round_half_up(0.770549, 4)), "0.7705");
        assert_eq!(format!("{:.4}", round_half_up(0.8, 4)), "0.8000");
        assert_eq!(round_half_up(0.125, 2), 0.13);
    }

    #[test]
    fn single_row_table() {
        let row = ReportRow::new("toy", metrics(&ConfusionMatrix::new(1, 0, 0, 1)).unwrap());
        let r = report_table(&[row]);
        assert_eq!(
            r.csv,
            "Model,Accuracy,Precision,Recall,F-Score\ntoy,1.0000,1.0000,1.0000,1.0000\n"
        );
        let lines: Vec<&str> = r.markdown.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "| Model | Accuracy | Precision | Recall | F-Score |");
        assert_eq!(lines[2], "| toy | 1.0000 | 1.0000 | 1.0000 | 1.0000 |");
    }

    #[test]
    fn csv_quotes_awkward_names() {
        let row = ReportRow::new("a, \"b\"", metrics(&ConfusionMatrix::new(1, 0, 0, 1)).unwrap());
        assert!(report_table(&[row]).csv.contains("\"a, \"\"b\"\"\",1.0000"));
    }

    #[test]
    fn published_totals() {
        for p in PUBLISHED {
            assert!(p.totals_consistent(), "{}", p.model);
            assert_eq!(p.matrix.total(), 200);
        }
    }
}
