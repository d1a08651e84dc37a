//! Dataset ingestion in the LIBSVM sparse text format, model file
//! round-tripping and trace export.
//!
//! On-disk feature indices are 1-based (LIBSVM convention) and mapped to
//! 0-based indices in memory. All floating-point output uses shortest
//! round-trip decimal formatting, so writing and re-reading a file
//! reproduces every value exactly.

use crate::solvers::IterationRecord;
use crate::svm::{KernelSpec, OvoEnsemble, SupportVector, SvmModel, TrainedModel};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Sparse feature vector: strictly increasing 0-based indices with values.
pub type SparseVector = Vec<(u32, f64)>;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: feature indices must be strictly increasing")]
    NonIncreasingIndex { line: usize },
    #[error("dataset contains no examples")]
    EmptyDataset,
    #[error("unknown model format header: {found:?}")]
    FormatVersionMismatch { found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> DataError {
    DataError::Parse {
        line,
        message: message.into(),
    }
}

/// A labelled sparse dataset. Labels are arbitrary reals compared exactly;
/// rows parsed without a label carry `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<SparseVector>,
    pub labels: Vec<f64>,
    /// Feature-space dimension: one past the largest index seen.
    pub n_features: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_labels(&self) -> bool {
        self.labels.iter().all(|l| !l.is_nan())
    }

    /// Distinct labels in order of first appearance.
    pub fn classes(&self) -> Vec<f64> {
        let mut seen: Vec<f64> = Vec::new();
        for &label in &self.labels {
            if !seen.contains(&label) {
                seen.push(label);
            }
        }
        seen
    }
}

fn parse_feature_token(token: &str, line: usize) -> Result<(u32, f64), DataError> {
    let (idx, val) = token
        .split_once(':')
        .ok_or_else(|| parse_err(line, format!("expected index:value, found {token:?}")))?;
    let index: u64 = idx
        .parse()
        .map_err(|_| parse_err(line, format!("bad feature index {idx:?}")))?;
    if index == 0 {
        return Err(parse_err(line, "feature indices are 1-based on disk"));
    }
    if index > u32::MAX as u64 {
        return Err(parse_err(line, format!("feature index {index} too large")));
    }
    let value: f64 = val
        .parse()
        .map_err(|_| parse_err(line, format!("bad feature value {val:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(line, format!("non-finite feature value {val:?}")));
    }
    Ok(((index - 1) as u32, value))
}

fn parse_rows(text: &str, allow_unlabeled: bool) -> Result<Dataset, DataError> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut n_features = 0usize;
    for (line_idx, raw) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_ascii_whitespace().peekable();
        let Some(first) = tokens.peek().copied() else {
            continue; // blank or comment-only line
        };
        let label = if first.contains(':') {
            if !allow_unlabeled {
                return Err(parse_err(line_no, "missing label"));
            }
            f64::NAN
        } else {
            tokens.next();
            let value: f64 = first
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad label {first:?}")))?;
            if !value.is_finite() {
                return Err(parse_err(line_no, format!("non-finite label {first:?}")));
            }
            value
        };
        let mut row: SparseVector = Vec::new();
        for token in tokens {
            let (index, value) = parse_feature_token(token, line_no)?;
            if let Some(&(last, _)) = row.last() {
                if index <= last {
                    return Err(DataError::NonIncreasingIndex { line: line_no });
                }
            }
            row.push((index, value));
            n_features = n_features.max(index as usize + 1);
        }
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    Ok(Dataset {
        rows,
        labels,
        n_features,
    })
}

/// Parses LIBSVM text: one `<label> <idx>:<val> ...` example per line,
/// `#` starts a comment, blank lines are skipped.
pub fn parse_libsvm(text: &str) -> Result<Dataset, DataError> {
    parse_rows(text, false)
}

/// Like [`parse_libsvm`] but rows may omit the label (the first token is a
/// feature), yielding `NaN` labels. Used for prediction inputs.
pub fn parse_libsvm_lenient(text: &str) -> Result<Dataset, DataError> {
    parse_rows(text, true)
}

/// Reads and parses a LIBSVM file from any buffered reader.
pub fn read_libsvm(mut reader: impl BufRead, allow_unlabeled: bool) -> Result<Dataset, DataError> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    let text = String::from_utf8(buf)
        .map_err(|e| parse_err(0, format!("input is not valid UTF-8: {e}")))?;
    parse_rows(&text, allow_unlabeled)
}

pub fn load_libsvm(path: impl AsRef<std::path::Path>) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path)?;
    parse_libsvm(&text)
}

fn write_row(w: &mut impl Write, row: &[(u32, f64)]) -> std::io::Result<()> {
    for &(index, value) in row {
        write!(w, " {}:{}", index + 1, value)?;
    }
    writeln!(w)
}

/// Writes a dataset back out in LIBSVM format (value-exact round trip).
pub fn write_libsvm(dataset: &Dataset, mut w: impl Write) -> std::io::Result<()> {
    for (row, &label) in dataset.rows.iter().zip(&dataset.labels) {
        write!(w, "{}", label)?;
        write_row(&mut w, row)?;
    }
    Ok(())
}

/// Writes a solve trace as CSV with the fixed header
/// `k,step_kind,lambda,delta,gap,objective,active_size`.
pub fn write_trace_csv(trace: &[IterationRecord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "k,step_kind,lambda,delta,gap,objective,active_size")?;
    for record in trace {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            record.iteration,
            record.step.kind.label(),
            record.step.lambda,
            record.step.gain,
            record.dual_gap,
            record.objective,
            record.active_size
        )?;
    }
    Ok(())
}

/// One parsed row of a trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: u64,
    pub step_kind: String,
    pub lambda: f64,
    pub delta: f64,
    pub gap: f64,
    pub objective: f64,
    pub active_size: usize,
}

/// Parses a trace CSV produced by [`write_trace_csv`].
pub fn read_trace_csv(text: &str) -> Result<Vec<TraceRow>, DataError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty trace file"))?;
    if header != "k,step_kind,lambda,delta,gap,objective,active_size" {
        return Err(parse_err(1, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(line_no, "expected 7 fields"));
        }
        let num = |s: &str| -> Result<f64, DataError> {
            s.parse()
                .map_err(|_| parse_err(line_no, format!("bad number {s:?}")))
        };
        rows.push(TraceRow {
            iteration: fields[0]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad iteration {:?}", fields[0])))?,
            step_kind: fields[1].to_string(),
            lambda: num(fields[2])?,
            delta: num(fields[3])?,
            gap: num(fields[4])?,
            objective: num(fields[5])?,
            active_size: fields[6]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad active size {:?}", fields[6])))?,
        });
    }
    Ok(rows)
}

const MODEL_MAGIC: &str = "fwsvm-model 1";

fn write_kernel(w: &mut impl Write, kernel: &KernelSpec) -> std::io::Result<()> {
    match kernel {
        KernelSpec::Rbf { sigma2 } => {
            writeln!(w, "kernel rbf")?;
            writeln!(w, "sigma2 {}", sigma2)
        }
        KernelSpec::Poly2 { gamma } => {
            writeln!(w, "kernel poly2")?;
            writeln!(w, "gamma {}", gamma)
        }
        KernelSpec::Linear => writeln!(w, "kernel linear"),
    }
}

fn write_binary_model(
    w: &mut impl Write,
    model: &SvmModel,
    classes: &[f64],
) -> std::io::Result<()> {
    write_kernel(w, &model.kernel)?;
    writeln!(w, "C {}", model.c)?;
    write!(w, "classes")?;
    for class in classes {
        write!(w, " {}", class)?;
    }
    writeln!(w)?;
    writeln!(w, "pair {} {}", model.positive_label, model.negative_label)?;
    writeln!(w, "support {}", model.support.len())?;
    for sv in &model.support {
        write!(w, "{} {}", sv.alpha, if sv.label > 0.0 { 1 } else { -1 })?;
        write_row(w, &sv.features)?;
    }
    Ok(())
}

/// Serializes a trained model (binary or one-vs-one ensemble) to the
/// line-oriented model format.
pub fn write_model(model: &TrainedModel, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{MODEL_MAGIC}")?;
    match model {
        TrainedModel::Binary(binary) => {
            writeln!(w, "models 1")?;
            let classes = [binary.positive_label, binary.negative_label];
            write_binary_model(&mut w, binary, &classes)?;
        }
        TrainedModel::Ovo(ensemble) => {
            writeln!(w, "models {}", ensemble.models.len())?;
            for binary in &ensemble.models {
                write_binary_model(&mut w, binary, &ensemble.classes)?;
            }
        }
    }
    Ok(())
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> LineReader<'a> {
    fn next(&mut self) -> Result<&'a str, DataError> {
        self.line_no += 1;
        self.lines
            .next()
            .ok_or_else(|| parse_err(self.line_no, "unexpected end of model file"))
    }

    fn expect_field(&mut self, key: &str) -> Result<&'a str, DataError> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| parse_err(self.line_no, format!("expected `{key} ...`, found {line:?}")))
    }

    fn parse_f64(&self, token: &str) -> Result<f64, DataError> {
        token
            .parse()
            .map_err(|_| parse_err(self.line_no, format!("bad number {token:?}")))
    }
}

fn read_binary_model(reader: &mut LineReader) -> Result<(SvmModel, Vec<f64>), DataError> {
    let kernel_name = reader.expect_field("kernel")?;
    let kernel = match kernel_name {
        "rbf" => {
            let token = reader.expect_field("sigma2")?;
            KernelSpec::Rbf {
                sigma2: reader.parse_f64(token)?,
            }
        }
        "poly2" => {
            let token = reader.expect_field("gamma")?;
            KernelSpec::Poly2 {
                gamma: reader.parse_f64(token)?,
            }
        }
        "linear" => KernelSpec::Linear,
        other => {
            return Err(parse_err(
                reader.line_no,
                format!("unknown kernel {other:?}"),
            ))
        }
    };
    let c_token = reader.expect_field("C")?;
    let c = reader.parse_f64(c_token)?;
    let classes_line = reader.expect_field("classes")?;
    let mut classes = Vec::new();
    for token in classes_line.split_ascii_whitespace() {
        classes.push(reader.parse_f64(token)?);
    }
    let pair_line = reader.expect_field("pair")?;
    let mut pair_tokens = pair_line.split_ascii_whitespace();
    let positive = reader.parse_f64(
        pair_tokens
            .next()
            .ok_or_else(|| parse_err(reader.line_no, "missing pair labels"))?,
    )?;
    let negative = reader.parse_f64(
        pair_tokens
            .next()
            .ok_or_else(|| parse_err(reader.line_no, "missing pair labels"))?,
    )?;
    let count_line = reader.expect_field("support")?;
    let count: usize = count_line
        .parse()
        .map_err(|_| parse_err(reader.line_no, format!("bad support count {count_line:?}")))?;
    let mut support = Vec::with_capacity(count);
    for _ in 0..count {
        let line = reader.next()?;
        let mut tokens = line.split_ascii_whitespace();
        let alpha = reader.parse_f64(
            tokens
                .next()
                .ok_or_else(|| parse_err(reader.line_no, "missing alpha"))?,
        )?;
        let label = reader.parse_f64(
            tokens
                .next()
                .ok_or_else(|| parse_err(reader.line_no, "missing support label"))?,
        )?;
        if label != 1.0 && label != -1.0 {
            return Err(parse_err(
                reader.line_no,
                format!("support label must be +1 or -1, found {label}"),
            ));
        }
        let mut features: SparseVector = Vec::new();
        for token in tokens {
            let (index, value) = parse_feature_token(token, reader.line_no)?;
            if let Some(&(last, _)) = features.last() {
                if index <= last {
                    return Err(DataError::NonIncreasingIndex {
                        line: reader.line_no,
                    });
                }
            }
            features.push((index, value));
        }
        support.push(SupportVector {
            alpha,
            label,
            features,
        });
    }
    Ok((
        SvmModel {
            kernel,
            c,
            positive_label: positive,
            negative_label: negative,
            support,
            support_indices: Vec::new(),
        },
        classes,
    ))
}

/// Reads a model file written by [`write_model`]. Truncated or malformed
/// input yields an error, never a partial model.
pub fn read_model(text: &str) -> Result<TrainedModel, DataError> {
    let mut reader = LineReader {
        lines: text.lines(),
        line_no: 0,
    };
    let magic = reader.next()?;
    if magic != MODEL_MAGIC {
        return Err(DataError::FormatVersionMismatch {
            found: magic.to_string(),
        });
    }
    let count_line = reader.expect_field("models")?;
    let count: usize = count_line
        .parse()
        .map_err(|_| parse_err(reader.line_no, format!("bad model count {count_line:?}")))?;
    if count == 0 {
        return Err(parse_err(reader.line_no, "model count must be positive"));
    }
    let mut models = Vec::with_capacity(count);
    let mut classes: Option<Vec<f64>> = None;
    for _ in 0..count {
        let (model, model_classes) = read_binary_model(&mut reader)?;
        match &classes {
            None => classes = Some(model_classes),
            Some(existing) if *existing == model_classes => {}
            Some(_) => {
                return Err(parse_err(
                    reader.line_no,
                    "inconsistent class lists across models",
                ))
            }
        }
        models.push(model);
    }
    let classes = classes.expect("count >= 1");
    if count == 1 {
        Ok(TrainedModel::Binary(models.into_iter().next().unwrap()))
    } else {
        Ok(TrainedModel::Ovo(OvoEnsemble { classes, models }))
    }
}

pub fn save_model(
    model: &TrainedModel,
    path: impl AsRef<std::path::Path>,
) -> Result<(), DataError> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<std::path::Path>) -> Result<TrainedModel, DataError> {
    let text = std::fs::read_to_string(path)?;
    read_model(&text)
}
