use crate::classifier::Stack;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub true_label: usize,
    pub predicted: usize,
    pub probabilities: Vec<f64>,
    pub stack: Stack,
}

impl ReportRow {
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted
    }
}

/// Outcome of one leave-one-out run. Rows are ordered by recording id.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub weights: Vec<f64>,
    pub warnings: Vec<String>,
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::io("report", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl EvalReport {
    /// `confusion[true][predicted]` counts.
    pub fn confusion(&self) -> Vec<Vec<usize>> {
        let n = self.labels.len();
        let mut m = vec![vec![0; n]; n];
        for r in &self.rows {
            m[r.true_label][r.predicted] += 1;
        }
        m
    }

    pub fn accuracy(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let correct = self.rows.iter().filter(|r| r.is_correct()).count();
        correct as f64 / self.rows.len() as f64
    }

    pub fn misclassified(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_correct()).count()
    }

    /// Accuracy restricted to recordings whose true label is in `labels`.
    pub fn accuracy_on(&self, labels: &[&str]) -> f64 {
        let rows: Vec<_> = self
            .rows
            .iter()
            .filter(|r| labels.contains(&self.labels[r.true_label].as_str()))
            .collect();
        if rows.is_empty() {
            return 0.0;
        }
        rows.iter().filter(|r| r.is_correct()).count() as f64 / rows.len() as f64
    }

    /// `id,true_label,predicted_label,correct,p_<label>...`
    pub fn predictions_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["id".to_string(), "true_label".into(), "predicted_label".into(), "correct".into()];
        header.extend(self.labels.iter().map(|l| format!("p_{l}")));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.id.clone(),
                self.labels[r.true_label].clone(),
                self.labels[r.predicted].clone(),
                (r.is_correct() as u8).to_string(),
            ];
            rec.extend(r.probabilities.iter().map(|p| format!("{p:.6}")));
            w.write_record(&rec)?;
        }
        csv_string(w)
    }

    /// Square matrix with true labels as rows and predictions as columns.
    pub fn confusion_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["true\\predicted".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(self.confusion()) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        csv_string(w)
    }

    pub fn weights_text(&self) -> String {
        self.weights.iter().map(|w| format!("{w:.12}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, t: usize, p: usize) -> ReportRow {
        ReportRow {
            id: id.into(),
            true_label: t,
            predicted: p,
            probabilities: vec![0.5, 0.5],
            stack: vec![],
        }
    }

    fn report(rows: Vec<ReportRow>) -> EvalReport {
        EvalReport {
            labels: vec!["A".into(), "B".into()],
            rows,
            weights: vec![],
            warnings: vec![],
        }
    }

    #[test]
    fn all_correct_is_diagonal() {
        let r = report(vec![row("1", 0, 0), row("2", 1, 1), row("3", 1, 1)]);
        assert_eq!(r.confusion(), vec![vec![1, 0], vec![0, 2]]);
        assert_eq!(r.accuracy(), 1.0);
    }

    #[test]
    fn single_wrong_prediction() {
        let r = report(vec![row("1", 0, 1)]);
        assert_eq!(r.accuracy(), 0.0);
        assert_eq!(r.misclassified(), 1);
    }

    #[test]
    fn accuracy_matches_off_diagonal_mass() {
        let r = report(vec![row("1", 0, 1), row("2", 1, 1), row("3", 0, 0), row("4", 1, 0)]);
        let c = r.confusion();
        let total: usize = c.iter().flatten().sum();
        let off = total - (c[0][0] + c[1][1]);
        assert_eq!(total, 4);
        assert_eq!(r.accuracy(), 1.0 - off as f64 / total as f64);
    }

    #[test]
    fn csv_layout() {
        let r = report(vec![row("x", 0, 1)]);
        let p = r.predictions_csv().unwrap();
        assert_eq!(p, "id,true_label,predicted_label,correct,p_A,p_B\nx,A,B,0,0.500000,0.500000\n");
        let c = r.confusion_csv().unwrap();
        assert_eq!(c, "true\\predicted,A,B\nA,0,1\nB,0,0\n");
    }
}
