//! Dataset and model persistence.
//!
//! Samples travel as CSV with header `z1_re,z1_im,..,zd_re,zd_im,f_re,f_im`;
//! the `*_im` columns are optional and default to zero, so purely real data
//! stays readable in a spreadsheet. Models are stored as versioned JSON with
//! complex numbers as `[re, im]` pairs. Floats are written in Rust's shortest
//! round-trip decimal form, which makes both round-trips bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::barycentric::{BarycentricModel, CoeffTensor, NodeAxes};
use crate::error::{Error, Result};
use crate::fit::FitReport;
use crate::lsq::SampleSet;

fn parse_field(raw: &str, row: usize, col: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("data row {row}: cannot parse {col}={raw:?}")))?;
    if !v.is_finite() {
        return Err(Error::Format(format!(
            "data row {row}: non-finite value in column {col}"
        )));
    }
    Ok(v)
}

struct CsvLayout {
    dim: usize,
    // column index per variable, re and optional im
    coord_re: Vec<usize>,
    coord_im: Vec<Option<usize>>,
    value_re: Option<usize>,
    value_im: Option<usize>,
}

fn read_layout(headers: &csv::StringRecord, need_values: bool) -> Result<CsvLayout> {
    let mut coord_re = std::collections::HashMap::new();
    let mut coord_im = std::collections::HashMap::new();
    let mut value_re = None;
    let mut value_im = None;
    for (idx, name) in headers.iter().enumerate() {
        let name = name.trim();
        if name == "f_re" {
            value_re = Some(idx);
        } else if name == "f_im" {
            value_im = Some(idx);
        } else if let Some(rest) = name.strip_prefix('z') {
            let (num, kind) = if let Some(n) = rest.strip_suffix("_re") {
                (n, true)
            } else if let Some(n) = rest.strip_suffix("_im") {
                (n, false)
            } else {
                return Err(Error::Format(format!("unknown column {name:?}")));
            };
            let j: usize = num
                .parse()
                .map_err(|_| Error::Format(format!("unknown column {name:?}")))?;
            if j == 0 {
                return Err(Error::Format("coordinate columns are 1-based (z1_re, ..)".into()));
            }
            let table = if kind { &mut coord_re } else { &mut coord_im };
            if table.insert(j, idx).is_some() {
                return Err(Error::Format(format!("duplicate column {name:?}")));
            }
        } else {
            return Err(Error::Format(format!("unknown column {name:?}")));
        }
    }
    let dim = coord_re.keys().copied().max().unwrap_or(0);
    if dim == 0 {
        return Err(Error::Format("no coordinate columns (z1_re, ..) found".into()));
    }
    let mut re_cols = Vec::with_capacity(dim);
    let mut im_cols = Vec::with_capacity(dim);
    for j in 1..=dim {
        re_cols.push(*coord_re.get(&j).ok_or_else(|| {
            Error::Format(format!("missing column z{j}_re (z{dim}_re is present)"))
        })?);
        im_cols.push(coord_im.remove(&j));
    }
    if let Some(j) = coord_im.keys().next() {
        return Err(Error::Format(format!(
            "column z{j}_im has no matching z{j}_re"
        )));
    }
    if need_values && value_re.is_none() {
        return Err(Error::Format("missing column f_re".into()));
    }
    if value_re.is_none() && value_im.is_some() {
        return Err(Error::Format("column f_im has no matching f_re".into()));
    }
    Ok(CsvLayout {
        dim,
        coord_re: re_cols,
        coord_im: im_cols,
        value_re,
        value_im,
    })
}

fn read_rows(
    path: &Path,
    need_values: bool,
) -> Result<(Vec<Vec<Complex64>>, Vec<Complex64>, usize)> {
    let mut reader = csv::Reader::from_path(path)?;
    let layout = read_layout(reader.headers()?, need_values)?;
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |idx: usize, col: &str| -> Result<f64> {
            let raw = record
                .get(idx)
                .ok_or_else(|| Error::Format(format!("data row {row}: too few fields")))?;
            parse_field(raw, row, col)
        };
        let mut p = Vec::with_capacity(layout.dim);
        for j in 0..layout.dim {
            let re = field(layout.coord_re[j], &format!("z{}_re", j + 1))?;
            let im = match layout.coord_im[j] {
                Some(idx) => field(idx, &format!("z{}_im", j + 1))?,
                None => 0.0,
            };
            p.push(Complex64::new(re, im));
        }
        points.push(p);
        if let Some(idx) = layout.value_re {
            let re = field(idx, "f_re")?;
            let im = match layout.value_im {
                Some(idx) => field(idx, "f_im")?,
                None => 0.0,
            };
            values.push(Complex64::new(re, im));
        }
    }
    Ok((points, values, layout.dim))
}

/// Load a sample CSV. Duplicate points are rejected with their 1-based data
/// row numbers.
pub fn load_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    let (points, values, _) = read_rows(path.as_ref(), true)?;
    if points.is_empty() {
        return Err(Error::Format("sample file contains no data rows".into()));
    }
    // duplicate detection with row numbers before handing off
    let mut seen = std::collections::HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if let Some(prev) = seen.insert(crate::barycentric::point_key(p), i + 1) {
            return Err(Error::Format(format!(
                "duplicate sample point at data rows {prev} and {}",
                i + 1
            )));
        }
    }
    SampleSet::new(points, values)
}

/// Load evaluation points (same schema as samples; `f_*` columns optional
/// and ignored).
pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<Vec<Complex64>>> {
    let (points, _, _) = read_rows(path.as_ref(), false)?;
    if points.is_empty() {
        return Err(Error::Format("points file contains no data rows".into()));
    }
    Ok(points)
}

/// Write a sample CSV in the canonical full form (all `_im` columns present).
pub fn save_samples(path: impl AsRef<Path>, samples: &SampleSet) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = Vec::new();
    for j in 1..=samples.dim() {
        header.push(format!("z{j}_re"));
        header.push(format!("z{j}_im"));
    }
    header.push("f_re".into());
    header.push("f_im".into());
    writer.write_record(&header)?;
    for i in 0..samples.len() {
        let mut record = Vec::with_capacity(header.len());
        for z in samples.point(i) {
            record.push(z.re.to_string());
            record.push(z.im.to_string());
        }
        record.push(samples.value(i).re.to_string());
        record.push(samples.value(i).im.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

const MODEL_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: String,
    d: usize,
    nodes: Vec<Vec<[f64; 2]>>,
    alpha: Vec<[f64; 2]>,
    beta: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<ModelMeta>,
}

/// Fit summary embedded in a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelMeta {
    pub iterations: usize,
    pub final_error: f64,
    pub converged: bool,
    pub node_counts: Vec<usize>,
    pub interp_count: usize,
    pub history: Vec<MetaIteration>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetaIteration {
    pub greedy_point: Vec<[f64; 2]>,
    pub rel_max_error: f64,
    pub node_counts: Vec<usize>,
    pub interp_count: usize,
}

impl ModelMeta {
    pub fn from_report(report: &FitReport) -> Self {
        let last = report.history.last();
        ModelMeta {
            iterations: report.iterations,
            final_error: report.final_error,
            converged: report.converged,
            node_counts: last.map(|r| r.node_counts.clone()).unwrap_or_default(),
            interp_count: last.map(|r| r.interp_count).unwrap_or(0),
            history: report
                .history
                .iter()
                .map(|r| MetaIteration {
                    greedy_point: r.greedy_point.iter().map(|z| [z.re, z.im]).collect(),
                    rel_max_error: r.rel_max_error,
                    node_counts: r.node_counts.clone(),
                    interp_count: r.interp_count,
                })
                .collect(),
            warnings: report.warnings.iter().map(|w| w.to_string()).collect(),
        }
    }
}

fn pairs(data: &[Complex64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

fn unpairs(data: &[[f64; 2]]) -> Vec<Complex64> {
    data.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

/// Save a model (plus optional fit summary) as versioned JSON.
pub fn save_model(
    path: impl AsRef<Path>,
    model: &BarycentricModel,
    meta: Option<&ModelMeta>,
) -> Result<()> {
    let file = ModelFile {
        version: MODEL_VERSION.into(),
        d: model.dim(),
        nodes: model.nodes().axes().iter().map(|axis| pairs(axis)).collect(),
        alpha: pairs(model.alpha().data()),
        beta: pairs(model.beta().data()),
        meta: meta.cloned(),
    };
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut out, &file)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Load a model from versioned JSON, validating schema and invariants.
pub fn load_model(path: impl AsRef<Path>) -> Result<BarycentricModel> {
    let file: ModelFile = serde_json::from_reader(BufReader::new(File::open(path.as_ref())?))?;
    if file.version != MODEL_VERSION {
        return Err(Error::Format(format!(
            "unsupported model version {:?} (this build reads version {MODEL_VERSION:?})",
            file.version
        )));
    }
    if file.nodes.len() != file.d {
        return Err(Error::Format(format!(
            "model declares d={} but has {} node axes",
            file.d,
            file.nodes.len()
        )));
    }
    let axes: Vec<Vec<Complex64>> = file.nodes.iter().map(|axis| unpairs(axis)).collect();
    let nodes = NodeAxes::new(axes)?;
    let dims = nodes.counts();
    let alpha = CoeffTensor::new(dims.clone(), unpairs(&file.alpha))?;
    let beta = CoeffTensor::new(dims, unpairs(&file.beta))?;
    BarycentricModel::new(nodes, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = tempfile::tempdir().unwrap();
        // keep the tempdir alive by leaking it; tests are short-lived
        let path = dir.path().join(name);
        std::mem::forget(dir);
        path
    }

    #[test]
    fn load_samples_infers_dimension() {
        let path = tmp("s.csv");
        std::fs::write(
            &path,
            "z1_re,z1_im,z2_re,z2_im,f_re,f_im\n\
             1,0,2,0,3,0\n\
             4,0,5,0,6,0\n\
             7,0,8,0,9,0\n",
        )
        .unwrap();
        let s = load_samples(&path).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.value(2), r(9.0));
    }

    #[test]
    fn load_samples_promotes_real_columns() {
        let path = tmp("real.csv");
        std::fs::write(&path, "z1_re,z2_re,f_re\n1,2,3\n4,5,6\n").unwrap();
        let s = load_samples(&path).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.point(1), &[r(4.0), r(5.0)]);
        assert_eq!(s.value(0), r(3.0));
    }

    #[test]
    fn load_samples_rejects_bad_input() {
        let dup = tmp("dup.csv");
        std::fs::write(&dup, "z1_re,f_re\n1,2\n3,4\n1,9\n").unwrap();
        let err = load_samples(&dup).unwrap_err().to_string();
        assert!(err.contains("rows 1 and 3"), "{err}");

        let nan = tmp("nan.csv");
        std::fs::write(&nan, "z1_re,f_re\n1,NaN\n").unwrap();
        assert!(load_samples(&nan).is_err());

        let malformed = tmp("bad.csv");
        std::fs::write(&malformed, "z1_re,f_re\n1,abc\n").unwrap();
        let err = load_samples(&malformed).unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");

        let unknown = tmp("unk.csv");
        std::fs::write(&unknown, "z1_re,bogus,f_re\n1,2,3\n").unwrap();
        assert!(load_samples(&unknown).is_err());

        let missing = tmp("gap.csv");
        std::fs::write(&missing, "z1_re,z3_re,f_re\n1,2,3\n").unwrap();
        let err = load_samples(&missing).unwrap_err().to_string();
        assert!(err.contains("z2_re"), "{err}");
    }

    #[test]
    fn samples_round_trip_bit_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        for case in 0..10 {
            let dim = 1 + case % 3;
            let n = 5 + case;
            let mut points = Vec::new();
            let mut values = Vec::new();
            for _ in 0..n {
                points.push(
                    (0..dim)
                        .map(|_| {
                            Complex64::new(
                                rng.gen::<f64>() * 2e3 - 1e3,
                                rng.gen::<f64>() * 2.0 - 1.0,
                            )
                        })
                        .collect::<Vec<_>>(),
                );
                values.push(Complex64::new(
                    rng.gen::<f64>() * 1e-4,
                    rng.gen::<f64>() * 1e6,
                ));
            }
            let samples = SampleSet::new(points, values).unwrap();
            let path = tmp(&format!("rt{case}.csv"));
            save_samples(&path, &samples).unwrap();
            let back = load_samples(&path).unwrap();
            assert_eq!(back.points(), samples.points());
            assert_eq!(back.values(), samples.values());
        }
    }

    fn test_model() -> BarycentricModel {
        BarycentricModel::new(
            NodeAxes::new(vec![
                vec![r(-1.0), r(1.0)],
                vec![Complex64::new(0.25, -0.5), r(2.0)],
            ])
            .unwrap(),
            CoeffTensor::new(
                vec![2, 2],
                vec![
                    Complex64::new(0.1, 0.2),
                    Complex64::new(-0.3, 0.04),
                    Complex64::new(0.55, -0.6),
                    Complex64::new(0.7, 0.8),
                ],
            )
            .unwrap(),
            CoeffTensor::new(
                vec![2, 2],
                vec![
                    Complex64::new(1.0 / 3.0, 0.0),
                    Complex64::new(0.0, -2.0 / 7.0),
                    Complex64::new(1e-15, 1e15),
                    Complex64::new(-0.0, 123.456),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn model_round_trip_is_bit_exact() {
        let model = test_model();
        let path = tmp("m.json");
        save_model(&path, &model, None).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, model);
        // evaluation agrees to the last bit at probe points
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = vec![
                Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
            ];
            assert_eq!(model.eval(&p).unwrap(), back.eval(&p).unwrap());
        }
    }

    #[test]
    fn model_meta_round_trips() {
        let model = test_model();
        let meta = ModelMeta {
            iterations: 3,
            final_error: 1.5e-9,
            converged: true,
            node_counts: vec![2, 2],
            interp_count: 3,
            history: vec![MetaIteration {
                greedy_point: vec![[1.0, 0.0], [2.0, 0.0]],
                rel_max_error: 0.5,
                node_counts: vec![1, 1],
                interp_count: 1,
            }],
            warnings: vec![],
        };
        let path = tmp("meta.json");
        save_model(&path, &model, Some(&meta)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"meta\""));
        assert!(load_model(&path).is_ok());
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let model = test_model();
        let path = tmp("v2.json");
        save_model(&path, &model, None).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"version\": \"1\"", "\"version\": \"2\"");
        std::fs::write(&path, text).unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("version"), "{err}");
    }

    #[test]
    fn empty_axis_model_is_rejected() {
        let path = tmp("empty.json");
        std::fs::write(
            &path,
            r#"{"version":"1","d":2,"nodes":[[],[[1.0,0.0]]],"alpha":[],"beta":[]}"#,
        )
        .unwrap();
        assert!(load_model(&path).is_err());
    }

    #[test]
    fn schema_violations_are_named() {
        let path = tmp("short.json");
        std::fs::write(
            &path,
            r#"{"version":"1","d":1,"nodes":[[[0.0,0.0],[1.0,0.0]]],"alpha":[[1.0,0.0]],"beta":[[1.0,0.0],[2.0,0.0]]}"#,
        )
        .unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("length"), "{err}");
    }
}
