//! Output plumbing: the metadata header, the two output styles, and the
//! destination.  Everything is buffered and written once so a failing
//! computation never leaves half a file behind.

use std::fs;

use clap::ValueEnum;
use liestar_core::fps::series_to_records;
use liestar_core::TruncatedSeries;
use serde::{Deserialize, Serialize};

use crate::{CliError, OutputArgs};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable lines with named variables.
    Table,
    /// One JSON object per line: a header, then one record per term.
    Records,
}

/// First line of every machine-readable output: what was computed, from
/// which realization, at which order, and what the exponent slots mean.
#[derive(Serialize)]
pub struct Header<'a> {
    pub command: &'a str,
    pub source: &'a str,
    pub name: &'a str,
    /// Hash of the canonical grid text, so outputs can be traced to inputs.
    pub hash: String,
    pub kappa: String,
    pub n: usize,
    pub order: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<String>,
}

/// One series term tagged with the component it belongs to; the tail of the
/// fields is exactly the shared term-record schema.
#[derive(Serialize, Deserialize)]
pub struct ComponentRecord {
    pub component: usize,
    pub exponents: Vec<u32>,
    pub re: [String; 2],
    pub im: [String; 2],
}

pub struct Emitter {
    format: Format,
    out: Option<std::path::PathBuf>,
    buf: String,
}

impl Emitter {
    pub fn new(args: &OutputArgs) -> Self {
        Emitter {
            format: args.format,
            out: args.out.clone(),
            buf: String::new(),
        }
    }

    pub fn is_records(&self) -> bool {
        self.format == Format::Records
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.buf.push_str(text.as_ref());
        self.buf.push('\n');
    }

    pub fn json(&mut self, value: &impl Serialize) {
        // in-memory serialization of plain records cannot fail
        self.line(serde_json::to_string(value).expect("record serialization"));
    }

    /// Header in the records style, or a compact `#` line for tables.
    pub fn header(&mut self, h: &Header<'_>) {
        if self.is_records() {
            self.json(h);
        } else {
            self.line(format!(
                "# {} {} ({}, kappa = {}, order {}, hash {})",
                h.command, h.name, h.source, h.kappa, h.order, h.hash
            ));
        }
    }

    /// Emit one labelled series in the active style.
    pub fn series(&mut self, label: &str, component: usize, s: &TruncatedSeries, names: &[&str]) {
        if self.is_records() {
            for rec in series_to_records(s) {
                self.json(&ComponentRecord {
                    component,
                    exponents: rec.exponents,
                    re: rec.re,
                    im: rec.im,
                });
            }
        } else {
            self.line(format!("{label} = {}", s.format_with(names)));
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self.out {
            Some(path) => fs::write(&path, self.buf).map_err(|e| {
                CliError::Computation(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                print!("{}", self.buf);
                Ok(())
            }
        }
    }
}

/// Variable dictionary for the two-block momentum rings.
pub fn kq_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|j| format!("k{j}")).collect();
    v.extend((1..=n).map(|j| format!("q{j}")));
    v
}
