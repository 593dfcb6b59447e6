//! Deterministic text and JSON renderings of a run.

use serde::ser::Serializer;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub file: String,
    pub results: Vec<BlockResult>,
    /// Declarations minted by `strictify-id`, in canonical order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature_extension: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockResult {
    pub tag: &'static str,
    pub name: String,
    pub line: usize,
    pub status: String,
    #[serde(serialize_with = "ordered")]
    pub fields: Vec<(&'static str, String)>,
}

fn ordered<S: Serializer>(fields: &[(&'static str, String)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(fields.iter().map(|(k, v)| (k, v)))
}

impl BlockResult {
    pub fn new(tag: &'static str, name: &str, line: usize, status: impl Into<String>) -> BlockResult {
        BlockResult { tag, name: name.to_string(), line, status: status.into(), fields: Vec::new() }
    }

    pub fn field(mut self, key: &'static str, value: impl Into<String>) -> BlockResult {
        self.fields.push((key, value.into()));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut blocks: Vec<String> = self
            .results
            .iter()
            .map(|r| {
                let mut s = format!("[{} {}]\nstatus = {}\n", r.tag, r.name, r.status);
                for (k, v) in &r.fields {
                    s.push_str(&format!("{k} = {v}\n"));
                }
                s
            })
            .collect();
        if let Some(ext) = &self.signature_extension {
            let mut s = "[signature-extension]\n".to_string();
            for d in ext {
                s.push_str(d);
                s.push('\n');
            }
            blocks.push(s);
        }
        blocks.join("\n")
    }
}
