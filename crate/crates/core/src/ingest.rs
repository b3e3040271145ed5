//! Field-tagged bibliographic export parsing.
//!
//! The input is the line-oriented export format where every line starts with a
//! two-letter tag (`PT`, `AU`, `SO`, `PY`, `DT`, `CR`, `UT`, ...), continuation
//! lines are indented, each record ends with `ER` and the file ends with `EF`.
//! Cited references (`CR`) are reduced to a [`CitedRefKey`], which is the node
//! identity of the co-citation network.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of characters kept from a cited source title.
pub const SOURCE_MAX_CHARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum DocType {
    Article,
    Review,
    Editorial,
    Other(String),
}

impl DocType {
    /// Maps a raw `DT` value. Compound values ("Article; Proceedings Paper")
    /// are classified by their first component.
    pub fn from_raw(raw: &str) -> Self {
        let first = raw.split(';').next().unwrap_or("").trim();
        match first.to_ascii_lowercase().as_str() {
            "article" => DocType::Article,
            "review" => DocType::Review,
            "editorial" | "editorial material" => DocType::Editorial,
            _ => DocType::Other(raw.trim().to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            DocType::Article => "Article",
            DocType::Review => "Review",
            DocType::Editorial => "Editorial",
            DocType::Other(raw) => raw,
        }
    }
}

impl From<String> for DocType {
    fn from(raw: String) -> Self {
        DocType::from_raw(&raw)
    }
}

impl From<DocType> for String {
    fn from(dt: DocType) -> Self {
        dt.as_str().to_string()
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Canonical identity of a cited work.
///
/// The derived ordering (author, year, source, volume, page) is the
/// lexicographic order used for every deterministic tie-break downstream.
/// A missing year sorts before any present year.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CitedRefKey {
    pub first_author: String,
    pub year: Option<i32>,
    pub source: String,
    pub volume: Option<String>,
    pub page: Option<String>,
}

impl CitedRefKey {
    /// Builds a key from loose field values, applying normalization.
    pub fn new(
        first_author: &str,
        year: Option<i32>,
        source: &str,
        volume: Option<&str>,
        page: Option<&str>,
    ) -> Self {
        CitedRefKey {
            first_author: normalize_field(first_author),
            year,
            source: normalize_source(source),
            volume: volume.map(normalize_field).filter(|v| !v.is_empty()),
            page: page.map(normalize_field).filter(|p| !p.is_empty()),
        }
    }

    pub fn normalized(&self) -> Self {
        CitedRefKey::new(
            &self.first_author,
            self.year,
            &self.source,
            self.volume.as_deref(),
            self.page.as_deref(),
        )
    }

    /// Publication year used for ordering: missing years sort last.
    pub(crate) fn year_order(&self) -> (bool, i32) {
        match self.year {
            Some(y) => (false, y),
            None => (true, 0),
        }
    }
}

/// Prints the canonical `AUTHOR, YEAR, SOURCE, Vvol, Ppage` form accepted by
/// [`parse_cited_ref`].
impl fmt::Display for CitedRefKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.first_author)?;
        if let Some(year) = self.year {
            write!(f, ", {year}")?;
        }
        let has_locator = self.volume.is_some() || self.page.is_some();
        if !self.source.is_empty() || has_locator {
            write!(f, ", {}", self.source)?;
        }
        if let Some(volume) = &self.volume {
            write!(f, ", V{volume}")?;
        }
        if let Some(page) = &self.page {
            write!(f, ", P{page}")?;
        }
        Ok(())
    }
}

/// Uppercases, collapses internal whitespace and strips trailing periods.
pub fn normalize_field(raw: &str) -> String {
    let upper = raw.to_uppercase();
    let collapsed = upper.split_whitespace().collect::<Vec<_>>().join(" ");
    trim_tail(&collapsed).to_string()
}

/// [`normalize_field`] followed by truncation to [`SOURCE_MAX_CHARS`].
pub fn normalize_source(raw: &str) -> String {
    let normalized = normalize_field(raw);
    match normalized.char_indices().nth(SOURCE_MAX_CHARS) {
        Some((cut, _)) => trim_tail(&normalized[..cut]).to_string(),
        None => normalized,
    }
}

fn trim_tail(s: &str) -> &str {
    s.trim_end_matches(|c: char| c == '.' || c.is_whitespace())
}

fn parse_year(seg: &str) -> Option<i32> {
    let seg = seg.trim();
    if seg.len() == 4 && seg.bytes().all(|b| b.is_ascii_digit()) {
        seg.parse().ok().filter(|&y| y > 0)
    } else {
        None
    }
}

/// `V`/`P` followed by a digit. Used where a source title could also match.
fn strict_locator(seg: &str, prefix: char) -> bool {
    let mut chars = seg.chars();
    matches!(chars.next(), Some(c) if c.eq_ignore_ascii_case(&prefix))
        && matches!(chars.next(), Some(c) if c.is_ascii_digit())
}

fn loose_locator(seg: &str, prefix: char) -> Option<String> {
    let mut chars = seg.chars();
    match chars.next() {
        Some(c) if c.eq_ignore_ascii_case(&prefix) => {
            let rest = normalize_field(chars.as_str());
            (!rest.is_empty()).then_some(rest)
        }
        _ => None,
    }
}

fn is_doi(seg: &str) -> bool {
    let upper = seg.to_ascii_uppercase();
    upper == "DOI" || upper.starts_with("DOI ") || upper.starts_with("DOI:")
}

/// Parses one cited-reference line into its canonical key.
///
/// Segments are comma separated: author, optional year, source, then
/// optional `V`-prefixed volume and `P`-prefixed page. DOI segments and
/// anything unrecognized after the source are ignored.
pub fn parse_cited_ref(raw: &str) -> Result<CitedRefKey> {
    let segs: Vec<&str> = raw.split(',').map(str::trim).collect();
    let first_author = normalize_field(segs[0]);
    if first_author.is_empty() {
        return Err(Error::UnparseableRef(raw.to_string()));
    }

    let mut idx = 1;
    let year = segs.get(idx).and_then(|s| parse_year(s));
    if year.is_some() {
        idx += 1;
    }

    let mut source = String::new();
    if let Some(seg) = segs.get(idx) {
        if !(strict_locator(seg, 'V') || strict_locator(seg, 'P') || is_doi(seg)) {
            source = normalize_source(seg);
            idx += 1;
        }
    }

    let mut volume = None;
    let mut page = None;
    for seg in segs.iter().skip(idx) {
        if is_doi(seg) {
            continue;
        }
        if volume.is_none() && page.is_none() {
            if let Some(v) = loose_locator(seg, 'V') {
                volume = Some(v);
                continue;
            }
        }
        if page.is_none() {
            if let Some(p) = loose_locator(seg, 'P') {
                page = Some(p);
            }
        }
    }

    Ok(CitedRefKey {
        first_author,
        year,
        source,
        volume,
        page,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BibRecord {
    pub id: String,
    pub authors: Vec<String>,
    /// `None` when the record carries no usable `PY`; such records are
    /// ignored by slicing.
    pub year: Option<i32>,
    pub source: String,
    pub doc_type: DocType,
    pub cited_refs: Vec<CitedRefKey>,
}

/// Inclusive year interval with `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    start: i32,
    end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidYearRange { start, end });
        }
        Ok(YearRange { start, end })
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn end(&self) -> i32 {
        self.end
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<BibRecord>,
    years: Option<(i32, i32)>,
}

impl Corpus {
    pub fn new(records: Vec<BibRecord>) -> Self {
        let years = records.iter().filter_map(|r| r.year).fold(None, |acc, y| {
            Some(match acc {
                None => (y, y),
                Some((lo, hi)) => (i32::min(lo, y), i32::max(hi, y)),
            })
        });
        Corpus { records, years }
    }

    pub fn records(&self) -> &[BibRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Smallest publication year among dated records.
    pub fn year_min(&self) -> Option<i32> {
        self.years.map(|(lo, _)| lo)
    }

    pub fn year_max(&self) -> Option<i32> {
        self.years.map(|(_, hi)| hi)
    }

    pub fn dated_records(&self) -> impl Iterator<Item = (i32, &BibRecord)> {
        self.records.iter().filter_map(|r| r.year.map(|y| (y, r)))
    }

    /// Appends records from `other`, dropping any whose id is already present.
    /// Returns the number of dropped records.
    pub fn extend_unique(&mut self, other: Corpus) -> usize {
        let mut seen: HashSet<String> = self.records.iter().map(|r| r.id.clone()).collect();
        let mut records = std::mem::take(&mut self.records);
        let mut dropped = 0;
        for record in other.records {
            if seen.insert(record.id.clone()) {
                records.push(record);
            } else {
                dropped += 1;
            }
        }
        *self = Corpus::new(records);
        dropped
    }

    pub fn into_records(self) -> Vec<BibRecord> {
        self.records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    FieldTagged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

/// Counts of input that did not make it into the corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseLoss {
    pub malformed_records: usize,
    pub duplicate_records: usize,
    pub unparseable_refs: usize,
    pub duplicate_refs: usize,
    pub records_missing_year: usize,
}

impl ParseLoss {
    pub fn absorb(&mut self, other: &ParseLoss) {
        self.malformed_records += other.malformed_records;
        self.duplicate_records += other.duplicate_records;
        self.unparseable_refs += other.unparseable_refs;
        self.duplicate_refs += other.duplicate_refs;
        self.records_missing_year += other.records_missing_year;
    }
}

#[derive(Debug, Clone)]
pub struct ParsedExport {
    pub corpus: Corpus,
    pub loss: ParseLoss,
    pub diagnostics: Vec<Diagnostic>,
}

/// Decodes UTF-8 when the bytes are valid UTF-8, Latin-1 otherwise.
pub fn decode_text(bytes: &[u8]) -> String {
    let text = match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    };
    match text.strip_prefix('\u{feff}') {
        Some(rest) => rest.to_string(),
        None => text,
    }
}

#[derive(Default)]
struct RecordBuilder {
    start_line: usize,
    ordinal: usize,
    fields: BTreeMap<String, Vec<String>>,
    last_tag: Option<String>,
}

impl RecordBuilder {
    fn push(&mut self, tag: &str, value: &str) {
        self.fields
            .entry(tag.to_string())
            .or_default()
            .push(value.trim().to_string());
        self.last_tag = Some(tag.to_string());
    }

    fn single(&self, tag: &str) -> Option<String> {
        self.fields
            .get(tag)
            .map(|lines| lines.join(" ").trim().to_string())
            .filter(|s| !s.is_empty())
    }

    fn build(self, loss: &mut ParseLoss) -> BibRecord {
        let id = self
            .single("UT")
            .unwrap_or_else(|| format!("#{}", self.ordinal));
        let authors = self
            .fields
            .get("AU")
            .map(|v| v.iter().filter(|a| !a.is_empty()).cloned().collect())
            .unwrap_or_default();
        let year = self.single("PY").as_deref().and_then(parse_year);
        if year.is_none() {
            loss.records_missing_year += 1;
        }
        let source = self.single("SO").unwrap_or_default();
        let doc_type = self
            .single("DT")
            .map(|dt| DocType::from_raw(&dt))
            .unwrap_or_else(|| DocType::Other(String::new()));

        let mut seen = HashSet::new();
        let mut cited_refs = Vec::new();
        for raw in self.fields.get("CR").into_iter().flatten() {
            if raw.is_empty() {
                continue;
            }
            match parse_cited_ref(raw) {
                Ok(key) => {
                    if seen.insert(key.clone()) {
                        cited_refs.push(key);
                    } else {
                        loss.duplicate_refs += 1;
                    }
                }
                Err(_) => loss.unparseable_refs += 1,
            }
        }

        BibRecord {
            id,
            authors,
            year,
            source,
            doc_type,
            cited_refs,
        }
    }
}

/// Parses a field-tagged export.
///
/// Malformed records (content before `PT`, a record not closed by `ER`) are
/// skipped and reported; parsing continues with the next record. A file that
/// contains no `PT` block at all is an [`Error::EmptyFile`].
pub fn parse_export_file(bytes: &[u8], format: ExportFormat) -> Result<ParsedExport> {
    match format {
        ExportFormat::FieldTagged => parse_field_tagged(&decode_text(bytes)),
    }
}

fn parse_field_tagged(text: &str) -> Result<ParsedExport> {
    let mut loss = ParseLoss::default();
    let mut diagnostics = Vec::new();
    let mut records: Vec<BibRecord> = Vec::new();
    let mut ids = HashSet::new();
    let mut current: Option<RecordBuilder> = None;
    let mut skipping_stray = false;
    let mut blocks = 0usize;

    let mut finish = |builder: RecordBuilder,
                      loss: &mut ParseLoss,
                      diagnostics: &mut Vec<Diagnostic>,
                      records: &mut Vec<BibRecord>| {
        let start = builder.start_line;
        let record = builder.build(loss);
        if ids.insert(record.id.clone()) {
            records.push(record);
        } else {
            loss.duplicate_records += 1;
            diagnostics.push(Diagnostic {
                line: start,
                message: format!("duplicate record id {}; record skipped", record.id),
            });
        }
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }

        if line.starts_with(char::is_whitespace) {
            if let Some(builder) = current.as_mut() {
                if let Some(tag) = builder.last_tag.clone() {
                    builder.push(&tag, line);
                }
            }
            continue;
        }

        let (tag, value) = match line.char_indices().nth(2) {
            Some((cut, _)) => (&line[..cut], &line[cut..]),
            None => (line, ""),
        };

        match tag {
            "PT" => {
                if let Some(open) = current.take() {
                    loss.malformed_records += 1;
                    diagnostics.push(Diagnostic {
                        line: open.start_line,
                        message: format!(
                            "record not terminated by ER before line {line_no}; record skipped"
                        ),
                    });
                }
                skipping_stray = false;
                blocks += 1;
                let mut builder = RecordBuilder {
                    start_line: line_no,
                    ordinal: blocks,
                    ..Default::default()
                };
                builder.push("PT", value);
                current = Some(builder);
            }
            "ER" => match current.take() {
                Some(builder) => finish(builder, &mut loss, &mut diagnostics, &mut records),
                None => skipping_stray = false,
            },
            "EF" => break,
            "FN" | "VR" if current.is_none() => {}
            _ => match current.as_mut() {
                Some(builder) => builder.push(tag, value),
                None => {
                    if !skipping_stray {
                        skipping_stray = true;
                        blocks += 1;
                        loss.malformed_records += 1;
                        diagnostics.push(Diagnostic {
                            line: line_no,
                            message: format!("tag {tag} before PT; record skipped"),
                        });
                    }
                }
            },
        }
    }

    if let Some(open) = current.take() {
        loss.malformed_records += 1;
        diagnostics.push(Diagnostic {
            line: open.start_line,
            message: "record not terminated by ER at end of file; record skipped".to_string(),
        });
    }

    if blocks == 0 {
        return Err(Error::EmptyFile);
    }

    Ok(ParsedExport {
        corpus: Corpus::new(records),
        loss,
        diagnostics,
    })
}

/// Returns the records whose document type is in `doc_types` and whose year
/// lies in `years`. Undated records never pass the year predicate.
pub fn filter_corpus(corpus: &Corpus, doc_types: &BTreeSet<DocType>, years: YearRange) -> Corpus {
    let records = corpus
        .records()
        .iter()
        .filter(|r| doc_types.contains(&r.doc_type))
        .filter(|r| r.year.is_some_and(|y| years.contains(y)))
        .cloned()
        .collect();
    Corpus::new(records)
}

/// Serializes the corpus as newline-delimited JSON, one record per line.
pub fn to_ndjson(corpus: &Corpus) -> Result<String> {
    let mut out = String::new();
    for record in corpus.records() {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn from_ndjson(text: &str) -> Result<Corpus> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut record: BibRecord =
            serde_json::from_str(line).map_err(|source| Error::CorpusFormat {
                line: idx + 1,
                source,
            })?;
        for key in &mut record.cited_refs {
            *key = key.normalized();
        }
        records.push(record);
    }
    Ok(Corpus::new(records))
}
