//! Parameter sweeps: a fixed pool of workers classifies (and verifies) pairs
//! while the calling thread writes rows back out in `(q, k)` order.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use anyhow::Context;
use gpaley_core::gpaley::ClassificationRecord;
use gpaley_core::{verify_theorem, GPaleyParams, ParamSpec, SearchOptions, VerifyOptions};
use serde::{Deserialize, Serialize};

use crate::{OutputFormat, ScanArgs};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub schema: String,
    pub p: u64,
    #[serde(rename = "R")]
    pub degree: u32,
    pub q: u64,
    pub k: u64,
    pub valency: u64,
    pub variant: Option<String>,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub k_prime: Option<u64>,
    pub component_count: Option<u64>,
    pub one_dim_affine_case: Option<bool>,
    pub aut_order: Option<String>,
    pub predicted_order: Option<String>,
    pub checks_passed: Option<bool>,
    pub error: Option<String>,
}

impl ScanRow {
    fn blank(spec: &ParamSpec) -> Self {
        ScanRow {
            schema: gpaley_core::SCHEMA.into(),
            p: spec.p(),
            degree: spec.degree(),
            q: spec.q(),
            k: spec.k(),
            valency: spec.valency(),
            variant: None,
            a: None,
            b: None,
            k_prime: None,
            component_count: None,
            one_dim_affine_case: None,
            aut_order: None,
            predicted_order: None,
            checks_passed: None,
            error: None,
        }
    }
}

fn compute_row(spec: &ParamSpec, args: &ScanArgs, max_q: u64) -> ScanRow {
    let mut row = ScanRow::blank(spec);
    let classification = match spec.classify() {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let record = ClassificationRecord::from(&classification);
    row.variant = Some(record.variant);
    row.a = record.a;
    row.b = record.b;
    row.k_prime = record.k_prime;
    row.component_count = record.component_count;
    row.one_dim_affine_case = Some(record.one_dim_affine_case);
    if spec.q() <= args.verify_up_to {
        let opts = VerifyOptions {
            search: SearchOptions::automorphism().with_timeout(Duration::from_secs(args.timeout)),
            seed: args.seed,
            emit_generators: false,
        };
        let report = GPaleyParams::with_bound(spec.p(), spec.degree(), spec.k(), max_q)
            .and_then(|params| verify_theorem(&params, &opts));
        match report {
            Ok(report) => {
                row.aut_order = Some(report.computed_aut_order.to_string());
                row.predicted_order = report.predicted_aut_order.as_ref().map(|o| o.to_string());
                row.checks_passed = Some(report.all_passed());
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

enum Sink<W: Write> {
    Jsonl(W),
    Csv(Box<csv::Writer<W>>),
}

impl<W: Write> Sink<W> {
    fn write(&mut self, row: &ScanRow) -> anyhow::Result<()> {
        match self {
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, row)?;
                writeln!(w)?;
                w.flush()?;
            }
            Sink::Csv(w) => {
                w.serialize(row)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Streams every row for `args` to `out`. Row errors are recorded in the
/// row; only output failures abort.
pub fn run<W: Write>(args: &ScanArgs, max_q: u64, out: W) -> anyhow::Result<()> {
    let specs: Vec<ParamSpec> = ParamSpec::enumerate(args.max_q)
        .into_iter()
        .filter(|s| args.resume_after.is_none_or(|after| (s.q(), s.k()) > after))
        .collect();
    let mut sink = match args.output {
        OutputFormat::Jsonl => Sink::Jsonl(out),
        OutputFormat::Csv => Sink::Csv(Box::new(csv::Writer::from_writer(out))),
    };
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, ScanRow)>();
    std::thread::scope(|scope| -> anyhow::Result<()> {
        for _ in 0..args.jobs {
            let tx = tx.clone();
            let (next, specs) = (&next, &specs);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(spec) = specs.get(i) else { break };
                if tx.send((i, compute_row(spec, args, max_q))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut emitted = 0;
        for (i, row) in rx {
            pending.insert(i, row);
            while let Some(row) = pending.remove(&emitted) {
                if let Err(e) = sink.write(&row).context("writing scan output") {
                    // Stop handing out work; the workers drain and exit.
                    next.store(specs.len(), Ordering::Relaxed);
                    return Err(e);
                }
                emitted += 1;
            }
        }
        Ok(())
    })
}
