use rayon::prelude::*;

use super::distance::Metric;
use crate::error::{Error, Result};
use crate::features::{FeatureKind, Tensor};

#[derive(Debug, Clone)]
struct TrainingItem {
    id: String,
    prepared: Vec<f64>,
    label: usize,
}

/// A training item chosen as a neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub id: String,
    pub distance: f64,
    pub label: usize,
}

/// Exact k-nearest-neighbor classifier over one feature.
#[derive(Debug, Clone)]
pub struct KnnModel {
    feature: FeatureKind,
    metric: Metric,
    k: usize,
    n_labels: usize,
    shape: Vec<usize>,
    items: Vec<TrainingItem>,
}

impl KnnModel {
    pub fn new(feature: FeatureKind, metric: Metric, k: usize, n_labels: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("k must be at least 1".into()));
        }
        if n_labels == 0 {
            return Err(Error::Argument("label vocabulary is empty".into()));
        }
        Ok(Self {
            feature,
            metric,
            k,
            n_labels,
            shape: feature.shape(),
            items: Vec::new(),
        })
    }

    pub fn feature(&self) -> FeatureKind {
        self.feature
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn check_shape(&self, t: &Tensor) -> Result<()> {
        if t.shape != self.shape {
            return Err(Error::Argument(format!(
                "feature {} expects shape {:?}, got {:?}",
                self.feature, self.shape, t.shape
            )));
        }
        Ok(())
    }

    /// Stores a (normalized) training tensor.
    pub fn add(&mut self, id: impl Into<String>, tensor: &Tensor, label: usize) -> Result<()> {
        self.check_shape(tensor)?;
        if label >= self.n_labels {
            return Err(Error::Argument(format!("label index {label} outside vocabulary of {}", self.n_labels)));
        }
        self.items.push(TrainingItem {
            id: id.into(),
            prepared: self.metric.prepare(&tensor.data),
            label,
        });
        Ok(())
    }

    /// The `k` nearest training items, excluding `exclude_id`. Equal distances
    /// are ordered by ascending recording id.
    pub fn neighbors(&self, query: &Tensor, exclude_id: Option<&str>) -> Result<Vec<Neighbor>> {
        self.check_shape(query)?;
        let q = self.metric.prepare(&query.data);
        let candidates: Vec<(f64, usize)> = self
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| Some(it.id.as_str()) != exclude_id)
            .map(|(i, it)| (self.metric.prepared_distance(&q, &it.prepared), i))
            .collect();
        self.select(candidates)
    }

    fn select(&self, mut candidates: Vec<(f64, usize)>) -> Result<Vec<Neighbor>> {
        if candidates.len() < self.k {
            return Err(Error::State(format!(
                "{} training items available for k = {}",
                candidates.len(),
                self.k
            )));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| self.items[a.1].id.cmp(&self.items[b.1].id)));
        Ok(candidates
            .into_iter()
            .take(self.k)
            .map(|(distance, i)| Neighbor {
                id: self.items[i].id.clone(),
                distance,
                label: self.items[i].label,
            })
            .collect())
    }

    fn vote(&self, neighbors: &[Neighbor]) -> Vec<f64> {
        let mut probs = vec![0.0; self.n_labels];
        for n in neighbors {
            probs[n.label] += 1.0;
        }
        let k = neighbors.len() as f64;
        probs.iter_mut().for_each(|p| *p /= k);
        probs
    }

    /// Vote fractions of the `k` nearest neighbors over the label vocabulary.
    pub fn predict(&self, query: &Tensor, exclude_id: Option<&str>) -> Result<Vec<f64>> {
        let neighbors = self.neighbors(query, exclude_id)?;
        Ok(self.vote(&neighbors))
    }

    /// Leave-one-out neighbors of every stored item, in storage order.
    ///
    /// Uses one symmetric distance matrix; each row matches
    /// `neighbors(item, Some(item.id))` exactly.
    pub fn leave_one_out_neighbors(&self) -> Result<Vec<Vec<Neighbor>>> {
        let n = self.items.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j < i {
                            f64::NAN
                        } else {
                            self.metric.prepared_distance(&self.items[i].prepared, &self.items[j].prepared)
                        }
                    })
                    .collect()
            })
            .collect();
        (0..n)
            .map(|i| {
                let id = &self.items[i].id;
                let candidates = (0..n)
                    .filter(|&j| self.items[j].id != *id)
                    .map(|j| (if j < i { rows[j][i] } else { rows[i][j] }, j))
                    .collect();
                self.select(candidates)
            })
            .collect()
    }

    /// Leave-one-out vote fractions of every stored item, in storage order.
    pub fn leave_one_out_predictions(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .leave_one_out_neighbors()?
            .iter()
            .map(|nb| self.vote(nb))
            .collect())
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|it| it.id.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(values: &[(usize, f64)]) -> Tensor {
        let mut data = vec![0.0; 120];
        for &(b, v) in values {
            data[b] = v;
        }
        Tensor::new(vec![120], data)
    }

    fn model(k: usize) -> KnnModel {
        KnnModel::new(FeatureKind::PitchDistribution, Metric::Bhattacharyya, k, 3).unwrap()
    }

    #[test]
    fn vote_fractions() {
        let mut m = model(5);
        // distances grow with index; labels A A B A C then far-away B B
        let labels = [0, 0, 1, 0, 2, 1, 1];
        for (i, &l) in labels.iter().enumerate() {
            let w = 1.0 - 0.1 * i as f64;
            m.add(format!("r{i}"), &pd(&[(0, w), (60, 1.0 - w)]), l).unwrap();
        }
        let p = m.predict(&pd(&[(0, 1.0)]), None).unwrap();
        assert_eq!(p, vec![0.6, 0.2, 0.2]);
    }

    #[test]
    fn k1_is_one_hot() {
        let mut m = model(1);
        m.add("a", &pd(&[(0, 1.0)]), 0).unwrap();
        m.add("b", &pd(&[(10, 1.0)]), 1).unwrap();
        assert_eq!(m.predict(&pd(&[(10, 0.9), (0, 0.1)]), None).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn excluded_item_never_votes() {
        let mut m = model(1);
        m.add("self", &pd(&[(0, 1.0)]), 0).unwrap();
        m.add("other", &pd(&[(30, 1.0)]), 1).unwrap();
        let q = pd(&[(0, 1.0)]);
        assert_eq!(m.predict(&q, None).unwrap(), vec![1.0, 0.0, 0.0]);
        let nb = m.neighbors(&q, Some("self")).unwrap();
        assert!(nb.iter().all(|n| n.id != "self"));
        assert_eq!(m.predict(&q, Some("self")).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn too_few_items_is_state_error() {
        let mut m = model(2);
        m.add("a", &pd(&[(0, 1.0)]), 0).unwrap();
        m.add("b", &pd(&[(0, 1.0)]), 0).unwrap();
        assert!(matches!(m.predict(&pd(&[(0, 1.0)]), Some("a")), Err(Error::State(_))));
    }

    #[test]
    fn rejects_wrong_shape_and_label() {
        let mut m = model(1);
        let bad = Tensor::new(vec![2, 120], vec![0.0; 240]);
        assert!(m.add("a", &bad, 0).is_err());
        assert!(m.add("a", &pd(&[(0, 1.0)]), 7).is_err());
        assert!(KnnModel::new(FeatureKind::Full, Metric::Manhattan, 0, 2).is_err());
    }

    #[test]
    fn ties_break_by_id_not_position() {
        for order in [["b", "a", "c"], ["c", "b", "a"]] {
            let mut m = model(1);
            for id in order {
                let label = match id {
                    "a" => 0,
                    "b" => 1,
                    _ => 2,
                };
                m.add(id, &pd(&[(5, 1.0)]), label).unwrap();
            }
            let nb = m.neighbors(&pd(&[(5, 1.0)]), None).unwrap();
            assert_eq!(nb[0].id, "a");
        }
    }

    #[test]
    fn leave_one_out_matches_explicit_exclusion() {
        let mut m = KnnModel::new(FeatureKind::PitchDistribution, Metric::Manhattan, 2, 3).unwrap();
        for i in 0..7usize {
            let w = (i as f64 * 0.37).fract();
            m.add(format!("id{}", 7 - i), &pd(&[(i * 3, w), (40, 1.0 - w)]), i % 3).unwrap();
        }
        let loo = m.leave_one_out_neighbors().unwrap();
        for (i, row) in loo.iter().enumerate() {
            let id = m.items[i].id.clone();
            let q = Tensor::new(vec![120], m.items[i].prepared.clone());
            assert_eq!(row, &m.neighbors(&q, Some(&id)).unwrap());
            assert!(row.iter().all(|n| n.id != id));
        }
    }
}
