//! The 25 per-recording features fed to the KNN ensemble.
//!
//! `v1(j)` gathers every cell whose endpoints are `j` chromatic steps apart,
//! `v2(i)` every transition cell starting at note `i`. Together with the full
//! tensor and the plain pitch distribution they make 25 features, always in
//! the order v1 (j = 1..11), v2 (i = 0..11), u, pd.

use std::fmt;

use crate::ingest::BINS_PER_OCTAVE;
use crate::spd::{Direction, SpdTensor, DIRECTIONS, NOTES};

pub const FEATURE_COUNT: usize = 25;

const N: usize = BINS_PER_OCTAVE;

/// A dense row-major tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len(), "shape does not match data length");
        Self { shape, data }
    }

    /// Number of trailing 120-bin slices.
    pub fn slices(&self) -> usize {
        self.data.len() / N
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    /// Cells `(i, i + j mod 12)` for all start notes `i`, `j` in 1..=11.
    V1(usize),
    /// Cells `(i, i + d mod 12)` for `d` in 1..=11.
    V2(usize),
    Full,
    PitchDistribution,
}

impl FeatureKind {
    /// Kind at a position of the fixed feature order.
    pub fn from_index(index: usize) -> Self {
        match index {
            0..=10 => FeatureKind::V1(index + 1),
            11..=22 => FeatureKind::V2(index - 11),
            23 => FeatureKind::Full,
            24 => FeatureKind::PitchDistribution,
            _ => panic!("feature index {index} out of range"),
        }
    }

    pub fn index(self) -> usize {
        match self {
            FeatureKind::V1(j) => j - 1,
            FeatureKind::V2(i) => 11 + i,
            FeatureKind::Full => 23,
            FeatureKind::PitchDistribution => 24,
        }
    }

    pub fn all() -> impl Iterator<Item = FeatureKind> {
        (0..FEATURE_COUNT).map(FeatureKind::from_index)
    }

    pub fn shape(self) -> Vec<usize> {
        match self {
            FeatureKind::V1(_) => vec![NOTES, DIRECTIONS, N],
            FeatureKind::V2(_) => vec![NOTES - 1, DIRECTIONS, N],
            FeatureKind::Full => vec![NOTES, NOTES, DIRECTIONS, N],
            FeatureKind::PitchDistribution => vec![N],
        }
    }

    /// Raw values of this feature taken from an SPD tensor.
    pub fn extract(self, spd: &SpdTensor) -> Tensor {
        match self {
            FeatureKind::V1(j) => v1(spd, j),
            FeatureKind::V2(i) => v2(spd, i),
            FeatureKind::Full => Tensor::new(self.shape(), spd.u.clone()),
            FeatureKind::PitchDistribution => Tensor::new(self.shape(), spd.pd.clone()),
        }
    }

    /// Values scaled so the whole feature sums to 1.
    pub fn extract_normalized(self, spd: &SpdTensor) -> Tensor {
        let mut t = self.extract(spd);
        let scale = 1.0 / t.slices() as f64;
        t.data.iter_mut().for_each(|v| *v *= scale);
        t
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::V1(j) => write!(f, "v1_{j}"),
            FeatureKind::V2(i) => write!(f, "v2_{i}"),
            FeatureKind::Full => write!(f, "u"),
            FeatureKind::PitchDistribution => write!(f, "pd"),
        }
    }
}

fn push_cell(out: &mut Vec<f64>, spd: &SpdTensor, start: usize, end: usize) {
    for d in Direction::ALL {
        out.extend_from_slice(spd.slice_at(start, end % NOTES, d));
    }
}

fn v1(spd: &SpdTensor, j: usize) -> Tensor {
    assert!((1..NOTES).contains(&j), "v1 offset must lie in 1..=11");
    let mut data = Vec::with_capacity(NOTES * DIRECTIONS * N);
    for i in 0..NOTES {
        push_cell(&mut data, spd, i, i + j);
    }
    Tensor::new(FeatureKind::V1(j).shape(), data)
}

fn v2(spd: &SpdTensor, i: usize) -> Tensor {
    assert!(i < NOTES, "v2 start must lie in 0..=11");
    let mut data = Vec::with_capacity((NOTES - 1) * DIRECTIONS * N);
    for d in 1..NOTES {
        push_cell(&mut data, spd, i, i + d);
    }
    Tensor::new(FeatureKind::V2(i).shape(), data)
}

/// The 11 constant-interval views, `v1(j)[i] = u[i][(i + j) % 12]`.
pub fn split_v1(spd: &SpdTensor) -> Vec<Tensor> {
    (1..NOTES).map(|j| v1(spd, j)).collect()
}

/// The 12 fixed-start views, `v2(i)[d - 1] = u[i][(i + d) % 12]`.
pub fn split_v2(spd: &SpdTensor) -> Vec<Tensor> {
    (0..NOTES).map(|i| v2(spd, i)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub kind: FeatureKind,
    pub raw: Tensor,
    pub normalized: Tensor,
}

/// All 25 features of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub features: Vec<Feature>,
}

impl FeatureSet {
    pub fn get(&self, kind: FeatureKind) -> &Feature {
        &self.features[kind.index()]
    }
}

pub fn assemble_feature_set(spd: &SpdTensor) -> FeatureSet {
    let features = FeatureKind::all()
        .map(|kind| {
            let raw = kind.extract(spd);
            let scale = 1.0 / raw.slices() as f64;
            let normalized = Tensor::new(raw.shape.clone(), raw.data.iter().map(|v| v * scale).collect());
            Feature { kind, raw, normalized }
        })
        .collect();
    FeatureSet { features }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BinSequence;
    use crate::spd::{build_spd, Relaxation};

    fn sample() -> SpdTensor {
        let bins = [0, 3, 20, 22, 40, 50, 70, 90, 110, 0, 70, 40, 20, 0, 110, 90, 70, 50];
        let seq = BinSequence::voiced(bins.iter().cycle().take(200).copied());
        build_spd(&seq, Relaxation::new(4).unwrap())
    }

    #[test]
    fn order_and_count() {
        let kinds: Vec<_> = FeatureKind::all().collect();
        assert_eq!(kinds.len(), 11 + 12 + 1 + 1);
        assert_eq!(kinds[0], FeatureKind::V1(1));
        assert_eq!(kinds[10], FeatureKind::V1(11));
        assert_eq!(kinds[11], FeatureKind::V2(0));
        assert_eq!(kinds[22], FeatureKind::V2(11));
        assert_eq!(kinds[23], FeatureKind::Full);
        assert_eq!(kinds[24], FeatureKind::PitchDistribution);
        for (i, k) in kinds.iter().enumerate() {
            assert_eq!(k.index(), i);
        }
    }

    #[test]
    fn v1_wraps_end_note() {
        let spd = sample();
        let v = split_v1(&spd);
        assert_eq!(v.len(), 11);
        // v1(1)[11] = u[11][0]
        let at = (11 * DIRECTIONS) * N;
        assert_eq!(&v[0].data[at..at + N], spd.slice_at(11, 0, Direction::Positive));
        // v1(4)[1] = u[1][5]
        let at = (DIRECTIONS + 1) * N;
        assert_eq!(&v[3].data[at..at + N], spd.slice_at(1, 5, Direction::Negative));
        assert_eq!(v.iter().map(|t| t.data.len()).sum::<usize>(), 11 * 12 * 2 * 120);
    }

    #[test]
    fn v2_rows() {
        let spd = sample();
        let v = split_v2(&spd);
        assert_eq!(v.len(), 12);
        for d in 1..NOTES {
            let at = (d - 1) * DIRECTIONS * N;
            assert_eq!(&v[0].data[at..at + N], spd.slice_at(0, d, Direction::Positive));
            assert_eq!(&v[11].data[at..at + N], spd.slice_at(11, d - 1, Direction::Positive));
        }
        assert_eq!(v.iter().map(|t| t.data.len()).sum::<usize>(), 12 * 11 * 2 * 120);
    }

    #[test]
    fn renormalized_features_sum_to_one() {
        let fs = assemble_feature_set(&sample());
        assert_eq!(fs.features.len(), FEATURE_COUNT);
        for f in &fs.features {
            let total: f64 = f.normalized.data.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "{} sums to {total}", f.kind);
        }
        let pd = fs.get(FeatureKind::PitchDistribution);
        assert_eq!(pd.normalized, pd.raw);
        assert_eq!(fs.get(FeatureKind::Full).normalized.slices(), 288);
    }

    #[test]
    fn normalized_extraction_matches_feature_set() {
        let spd = sample();
        let fs = assemble_feature_set(&spd);
        for kind in FeatureKind::all() {
            assert_eq!(kind.extract_normalized(&spd), fs.get(kind).normalized);
        }
    }
}
