//! Line-delimited record files: one UTF-8 JSON object per line with fields
//! id, code, summary, project, class, candidate, references, code_tokens.
//! A single schema serves the eval and corpus subcommands; unknown fields
//! are ignored.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::bleu::EvalPair;
use crate::corpus::CorpusRecord;
use crate::lex::{lex_code, tokenize_summary};
use crate::token::TokenSeq;

/// Malformed input; the CLI maps this to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub project: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<Vec<String>>>,
    /// Space-separated code tokens, written by `preprocess`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_tokens: Option<String>,
}

pub fn read_records(path: &Path) -> anyhow::Result<Vec<RawRecord>> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("read {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| {
            InputError(format!(
                "{}:{}: malformed record: {e}",
                path.display(),
                lineno + 1
            ))
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_records(path: &Path, records: &[RawRecord]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Builds eval pairs from records carrying candidate/references fields.
pub fn records_to_pairs(path: &Path, records: &[RawRecord]) -> anyhow::Result<Vec<EvalPair>> {
    let mut pairs = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let bad = |what: &str| {
            InputError(format!("{}:{}: {what}", path.display(), i + 1))
        };
        let candidate = record
            .candidate
            .as_ref()
            .ok_or_else(|| bad("record has no candidate"))?;
        let references = record
            .references
            .as_ref()
            .filter(|r| !r.is_empty())
            .ok_or_else(|| bad("record has no references"))?;
        pairs.push(EvalPair::new(
            TokenSeq::from_words(candidate.iter().cloned()),
            references
                .iter()
                .map(|r| TokenSeq::from_words(r.iter().cloned()))
                .collect(),
        ));
    }
    Ok(pairs)
}

/// Builds eval pairs from two plain-text files: one whitespace-tokenized
/// sentence per line, line i of each file forming one pair.
pub fn text_files_to_pairs(cand_path: &Path, ref_path: &Path) -> anyhow::Result<Vec<EvalPair>> {
    let read_lines = |path: &Path| -> anyhow::Result<Vec<String>> {
        let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
        BufReader::new(file)
            .lines()
            .collect::<std::io::Result<_>>()
            .with_context(|| format!("read {}", path.display()))
    };
    let cands = read_lines(cand_path)?;
    let refs = read_lines(ref_path)?;
    if cands.len() != refs.len() {
        return Err(InputError(format!(
            "candidate/reference count mismatch: {} vs {}",
            cands.len(),
            refs.len()
        ))
        .into());
    }
    Ok(cands
        .into_iter()
        .zip(refs)
        .map(|(c, r)| {
            EvalPair::new(
                TokenSeq::from_words(c.split_whitespace().map(str::to_string)),
                vec![TokenSeq::from_words(r.split_whitespace().map(str::to_string))],
            )
        })
        .collect())
}

/// Builds corpus records, lexing `code` (or reusing `code_tokens` when the
/// record was already pre-processed) and tokenizing `summary`.
pub fn records_to_corpus(path: &Path, records: &[RawRecord]) -> anyhow::Result<Vec<CorpusRecord>> {
    let mut out = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let bad = |what: String| InputError(format!("{}:{}: {what}", path.display(), i + 1));
        let code = record.code.clone().unwrap_or_default();
        let code_tokens = match &record.code_tokens {
            Some(tokens) => TokenSeq::from_lexemes(
                tokens.split_whitespace(),
                crate::token::TokenKind::Identifier,
                crate::token::Origin::Code,
            ),
            None => lex_code(&code)
                .map_err(|e| bad(format!("cannot lex code: {e}")))?,
        };
        let summary_tokens = tokenize_summary(record.summary.as_deref().unwrap_or(""));
        out.push(CorpusRecord {
            id: record.id.clone(),
            code,
            code_tokens,
            summary_tokens,
            project_id: record.project.clone().unwrap_or_default(),
            class_id: record.class.clone(),
        });
    }
    Ok(out)
}

/// Renders corpus records back to raw records for writing.
pub fn corpus_to_records(records: &[CorpusRecord]) -> Vec<RawRecord> {
    records
        .iter()
        .map(|r| RawRecord {
            id: r.id.clone(),
            code: if r.code.is_empty() {
                None
            } else {
                Some(r.code.clone())
            },
            summary: if r.summary_tokens.is_empty() {
                None
            } else {
                Some(r.summary_tokens.render())
            },
            project: if r.project_id.is_empty() {
                None
            } else {
                Some(r.project_id.clone())
            },
            class: r.class_id.clone(),
            candidate: None,
            references: None,
            code_tokens: Some(r.code_tokens.render()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    #[test]
    fn round_trip_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let records = vec![
            RawRecord {
                id: "a".into(),
                code: Some("int x = 1;".into()),
                summary: Some("sets x".into()),
                project: Some("p".into()),
                ..Default::default()
            },
            RawRecord {
                id: "b".into(),
                candidate: Some(vec!["the".into(), "sum".into()]),
                references: Some(vec![vec!["a".into(), "sum".into()]]),
                ..Default::default()
            },
        ];
        write_records(&path, &records).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "{{\"id\": \"ok\"}}").unwrap();
        writeln!(f, "not json").unwrap();
        let err = read_records(&path).unwrap_err();
        let input = err.downcast_ref::<InputError>().expect("input error");
        assert!(input.0.contains(":2:"), "{input}");
    }

    #[test]
    fn text_pair_mismatch_is_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let cand = dir.path().join("c.txt");
        let refs = dir.path().join("r.txt");
        std::fs::write(&cand, "a b\nc d\n").unwrap();
        std::fs::write(&refs, "a b\n").unwrap();
        let err = text_files_to_pairs(&cand, &refs).unwrap_err();
        assert!(err.downcast_ref::<InputError>().is_some());
    }
}
