//! Embedded two-sample datasets and file loaders.
//!
//! The embedded sets are amplitude-encoded pairs of Iris features (sepal
//! width, petal length), already normalized to four decimals. Each one
//! carries the probability that amplitude estimation is asked to recover,
//! which is `Pr(1)` for some sets and `Pr(0)` for others.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::amplitude_estimation::Target;
use crate::encoding::{LabeledDataset, SqkcFlavor};
use crate::error::{QkcError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuiltinDataset {
    pub name: &'static str,
    /// Classifier the set is paired with.
    pub flavor: SqkcFlavor,
    pub target: Target,
    /// Reference amplitude `a`, four decimals.
    pub expected_a: f64,
    pub test: [f64; 2],
    pub x0: [f64; 2],
    pub x1: [f64; 2],
    /// 1-based Iris sample numbers of test, x0 and x1.
    pub iris_index: [usize; 3],
}

impl BuiltinDataset {
    pub fn dataset(&self) -> LabeledDataset<f64> {
        LabeledDataset::uniform(
            vec![self.x0.to_vec(), self.x1.to_vec()],
            vec![0, 1],
            self.test.to_vec(),
        )
        .expect("embedded data is valid")
    }
}

const fn entry(
    name: &'static str,
    flavor: SqkcFlavor,
    target: Target,
    expected_a: f64,
    rows: [[f64; 2]; 3],
    iris_index: [usize; 3],
) -> BuiltinDataset {
    BuiltinDataset {
        name,
        flavor,
        target,
        expected_a,
        test: rows[0],
        x0: rows[1],
        x1: rows[2],
        iris_index,
    }
}

use SqkcFlavor::{Shc, Ssc};
use Target::{ProbOne as P1, ProbZero as P0};

const EQ16_ROWS: [[f64; 2]; 3] = [[0.3856, 0.9227], [0.9635, 0.2676], [0.3526, 0.9358]];

// 0.4343 is a dataset amplitude, not log10(e)
#[allow(clippy::approx_constant)]
pub const BUILTINS: &[BuiltinDataset] = &[
    entry("eq16", Ssc, P1, 0.6541, EQ16_ROWS, [123, 23, 119]),
    entry("shc-1", Shc, P1, 0.5952, EQ16_ROWS, [123, 23, 119]),
    entry(
        "shc-2",
        Shc,
        P1,
        0.4343,
        [[0.3436, 0.9391], [0.3162, 0.9487], [0.8882, 0.4594]],
        [33, 17, 105],
    ),
    entry(
        "shc-3",
        Shc,
        P0,
        0.4391,
        [[0.8882, 0.4594], [0.3714, 0.9285], [0.8914, 0.4532]],
        [130, 1, 103],
    ),
    entry(
        "shc-4",
        Shc,
        P0,
        0.5456,
        [[0.4158, 0.9095], [0.4229, 0.9062], [0.8638, 0.5039]],
        [44, 13, 127],
    ),
    entry(
        "shc-5",
        Shc,
        P0,
        0.5799,
        [[0.3757, 0.9267], [0.4356, 0.9002], [0.9358, 0.3526]],
        [22, 10, 119],
    ),
    entry(
        "shc-6",
        Shc,
        P1,
        0.4375,
        [[0.3443, 0.9389], [0.4472, 0.8944], [0.8838, 0.4679]],
        [14, 21, 102],
    ),
    entry("ssc-1", Ssc, P1, 0.6541, EQ16_ROWS, [123, 23, 119]),
    entry(
        "ssc-2",
        Ssc,
        P1,
        0.6250,
        [[0.8944, 0.4472], [0.3162, 0.9487], [0.8882, 0.4594]],
        [129, 34, 105],
    ),
    entry(
        "ssc-3",
        Ssc,
        P0,
        0.6164,
        [[0.3482, 0.9374], [0.4258, 0.9048], [0.8973, 0.4413]],
        [37, 27, 136],
    ),
    entry(
        "ssc-4",
        Ssc,
        P0,
        0.3924,
        [[0.8779, 0.4789], [0.3482, 0.9374], [0.8720, 0.4895]],
        [117, 41, 121],
    ),
    entry(
        "ssc-5",
        Ssc,
        P1,
        0.6101,
        [[0.8662, 0.4997], [0.3162, 0.9487], [0.8720, 0.4895]],
        [148, 17, 121],
    ),
    entry(
        "ssc-6",
        Ssc,
        P0,
        0.3844,
        [[0.8944, 0.4472], [0.3511, 0.9363], [0.8838, 0.4679]],
        [133, 36, 143],
    ),
];

pub fn builtin(name: &str) -> Option<&'static BuiltinDataset> {
    let name = name.to_ascii_lowercase();
    BUILTINS.iter().find(|b| b.name == name)
}

/// The twelve averaged sets, SHC first.
pub fn table_datasets() -> impl Iterator<Item = &'static BuiltinDataset> {
    BUILTINS.iter().filter(|b| b.name != "eq16")
}

#[derive(Debug, Deserialize)]
struct JsonDataset {
    train: Vec<Vec<f64>>,
    labels: Vec<u8>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    test: Vec<f64>,
}

/// Parses a JSON dataset: `{"train": [[..]], "labels": [..], "test": [..]}`
/// with optional `"weights"` (uniform otherwise).
pub fn parse_json_dataset(text: &str) -> Result<LabeledDataset<f64>> {
    let raw: JsonDataset = serde_json::from_str(text)?;
    match raw.weights {
        Some(w) => LabeledDataset::from_real(raw.train, raw.labels, w, raw.test),
        None => LabeledDataset::uniform(raw.train, raw.labels, raw.test),
    }
}

/// Parses a CSV dataset. Every column except `label` (and an optional
/// `weight`) is a feature; exactly one row has label `test`.
pub fn parse_csv_dataset(text: &str) -> Result<LabeledDataset<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let label_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("label"))
        .ok_or_else(|| QkcError::Parse("missing 'label' column".into()))?;
    let weight_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("weight"));
    let mut train = Vec::new();
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    let mut test = None;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut features = Vec::new();
        for (i, field) in record.iter().enumerate() {
            if i == label_col || Some(i) == weight_col {
                continue;
            }
            features.push(parse_number(field, line)?);
        }
        let label = &record[label_col];
        if label.eq_ignore_ascii_case("test") {
            if test.replace(features).is_some() {
                return Err(QkcError::Parse("more than one test row".into()));
            }
            continue;
        }
        labels.push(match label {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(QkcError::Parse(format!(
                    "row {}: label '{other}' is not 0, 1 or test",
                    line + 1
                )))
            }
        });
        if let Some(wc) = weight_col {
            weights.push(parse_number(&record[wc], line)?);
        }
        train.push(features);
    }
    let test = test.ok_or_else(|| QkcError::Parse("no test row".into()))?;
    if weight_col.is_some() {
        LabeledDataset::from_real(train, labels, weights, test)
    } else {
        LabeledDataset::uniform(train, labels, test)
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| QkcError::Parse(format!("row {}: '{field}' is not a number", line + 1)))
}

/// Loads a dataset file, choosing the parser by extension.
pub fn load_dataset(path: &Path) -> Result<LabeledDataset<f64>> {
    let text = fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => parse_json_dataset(&text),
        _ => parse_csv_dataset(&text),
    }
}

pub const IRIS_FEATURES: [&str; 4] = ["sepal_length", "sepal_width", "petal_length", "petal_width"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrisRecord {
    pub features: [f64; 4],
    pub species: String,
}

/// Reads the standard 150-row Iris CSV with a
/// `sepal_length,sepal_width,petal_length,petal_width,species` header.
pub fn parse_iris(text: &str) -> Result<Vec<IrisRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| QkcError::Parse(format!("iris file lacks a '{name}' column")))
    };
    let feature_cols = [
        col(IRIS_FEATURES[0])?,
        col(IRIS_FEATURES[1])?,
        col(IRIS_FEATURES[2])?,
        col(IRIS_FEATURES[3])?,
    ];
    let species_col = col("species")?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut features = [0.0; 4];
        for (f, &c) in features.iter_mut().zip(&feature_cols) {
            *f = parse_number(&record[c], line)?;
        }
        out.push(IrisRecord {
            features,
            species: normalize_species(&record[species_col]),
        });
    }
    if out.is_empty() {
        return Err(QkcError::Empty("iris file"));
    }
    Ok(out)
}

pub fn load_iris(path: &Path) -> Result<Vec<IrisRecord>> {
    parse_iris(&fs::read_to_string(path)?)
}

fn normalize_species(s: &str) -> String {
    let s = s.trim().to_ascii_lowercase();
    s.strip_prefix("iris-").unwrap_or(&s).to_string()
}

/// Resolves a feature given by index or by column name.
pub fn iris_feature_index(key: &str) -> Result<usize> {
    if let Ok(i) = key.parse::<usize>() {
        if i < 4 {
            return Ok(i);
        }
    }
    IRIS_FEATURES
        .iter()
        .position(|f| f.eq_ignore_ascii_case(key))
        .ok_or_else(|| QkcError::Parse(format!("unknown iris feature '{key}'")))
}

/// Labeled feature vectors to draw training and test points from.
#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePool {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl FeaturePool {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(QkcError::InvalidDataset(
                "features and labels differ in length".into(),
            ));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(QkcError::InvalidDataset("labels must be 0 or 1".into()));
        }
        Ok(Self { features, labels })
    }

    /// Two Iris species projected on the chosen feature columns; the first
    /// species becomes class 0.
    pub fn from_iris(
        records: &[IrisRecord],
        features: &[usize],
        classes: [&str; 2],
    ) -> Result<Self> {
        if features.is_empty() || features.iter().any(|&f| f >= 4) {
            return Err(QkcError::InvalidConfig(
                "iris features must be in 0..4".into(),
            ));
        }
        let classes = classes.map(normalize_species);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for r in records {
            if let Some(y) = classes.iter().position(|c| *c == r.species) {
                xs.push(features.iter().map(|&f| r.features[f]).collect());
                ys.push(y as u8);
            }
        }
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Pool indices grouped by label.
    pub fn by_class(&self) -> [Vec<usize>; 2] {
        let mut groups: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for (i, &y) in self.labels.iter().enumerate() {
            groups.entry(y).or_default().push(i);
        }
        [
            groups.remove(&0).unwrap_or_default(),
            groups.remove(&1).unwrap_or_default(),
        ]
    }
}
