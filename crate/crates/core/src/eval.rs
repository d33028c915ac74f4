//! Accuracy metrics and the confusion matrix.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::label::{EmotionLabel, NUM_CLASSES};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub overall_accuracy: f64,
    /// Recall per true class; 0 for classes with no samples.
    pub per_class_accuracy: [f64; NUM_CLASSES],
    /// Row = truth, column = prediction.
    pub confusion: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl EvalReport {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn truth_counts(&self) -> [u64; NUM_CLASSES] {
        self.confusion.map(|row| row.iter().sum())
    }

    /// CSV with one row per true class (`true_label,n,accuracy,<7 confusion columns>`)
    /// followed by an `overall` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true_label,n,accuracy");
        for name in EmotionLabel::NAMES {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let counts = self.truth_counts();
        for (e, row) in self.confusion.iter().enumerate() {
            out.push_str(&format!("{},{},{:.6}", EmotionLabel::NAMES[e], counts[e], self.per_class_accuracy[e]));
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("overall,{},{:.6}", self.total(), self.overall_accuracy));
        out.push_str(&",".repeat(NUM_CLASSES));
        out.push('\n');
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>9}", "truth\\pred")?;
        for name in EmotionLabel::NAMES {
            write!(f, " {:>8}", &name[..name.len().min(8)])?;
        }
        writeln!(f, " {:>8}", "recall")?;
        for (e, row) in self.confusion.iter().enumerate() {
            write!(f, "{:>10}", EmotionLabel::NAMES[e])?;
            for c in row {
                write!(f, " {c:>8}")?;
            }
            writeln!(f, " {:>7.2}%", 100.0 * self.per_class_accuracy[e])?;
        }
        writeln!(f, "overall accuracy: {:.2}% ({} clips)", 100.0 * self.overall_accuracy, self.total())
    }
}

pub fn evaluate(predictions: &[EmotionLabel], truths: &[EmotionLabel]) -> Result<EvalReport> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(predictions.len(), truths.len()));
    }
    if truths.is_empty() {
        return Err(Error::Empty("label lists"));
    }
    let mut confusion = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for (p, t) in predictions.iter().zip(truths) {
        confusion[t.index()][p.index()] += 1;
    }
    let correct: u64 = (0..NUM_CLASSES).map(|e| confusion[e][e]).sum();
    let per_class_accuracy = std::array::from_fn(|e| {
        let n: u64 = confusion[e].iter().sum();
        if n == 0 {
            0.0
        } else {
            confusion[e][e] as f64 / n as f64
        }
    });
    Ok(EvalReport {
        overall_accuracy: correct as f64 / truths.len() as f64,
        per_class_accuracy,
        confusion,
    })
}
