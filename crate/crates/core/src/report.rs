// SPDX-License-Identifier: Apache-2.0

//! Tabular reports rendered as aligned text, sectioned CSV or JSON. All three
//! carry the same cells; real numbers print in scientific notation with six
//! significant digits.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::assign::{PlanResult, Route};
use crate::experiments::{
    plan_patterns, Comparison, NMax, Outcome, OutputFormat, RateCurveTable, ReCell,
};
use crate::grid::WavelengthGrid;

/// `1.52098e+07`; `inf`, `-inf` and `nan` for non-finite values.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!(
        "{mantissa}e{}{:02}",
        if exp < 0 { '-' } else { '+' },
        exp.abs()
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn outcome(o: Outcome) -> Self {
        match o {
            Outcome::Rate(r) => Cell::Num(r),
            Outcome::Infeasible => Cell::text("infeasible"),
            Outcome::Refused => Cell::text("refused"),
        }
    }

    fn or_marker(v: Option<f64>, marker: &str) -> Self {
        v.map_or_else(|| Cell::text(marker), Cell::Num)
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => sci(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Num(x) if x.is_finite() => {
                let raw = RawValue::from_string(sci(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Cell::Num(x) => s.serialize_str(&sci(*x)),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

struct Summary<'a>(&'a [(String, Cell)]);

impl Serialize for Summary<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("title", &self.title)?;
        map.serialize_entry("summary", &Summary(&self.summary))?;
        map.serialize_entry("tables", &self.tables)?;
        map.end()
    }
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            title: title.into(),
            summary: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Cell) {
        self.summary.push((key.into(), value));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            out += &format!("  {k:<width$}  {}\n", v.render());
        }
        for t in &self.tables {
            out += &format!("\n[{}]\n", t.name);
            let cells: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::render).collect())
                .collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|c| {
                    cells
                        .iter()
                        .map(|r| r[c].len())
                        .chain([t.columns[c].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |row: &[String]| {
                let padded: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(v, w)| format!("{v:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out += &line(&t.columns);
            for r in &cells {
                out += &line(r);
            }
        }
        out
    }

    /// `# summary` section of key,value rows, then one `# <table>` section
    /// per table with its header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        let mut write = |row: Vec<String>| w.write_record(&row).expect("in-memory csv write");
        write(vec![format!("# {}", self.title)]);
        write(vec!["# summary".into()]);
        write(vec!["key".into(), "value".into()]);
        for (k, v) in &self.summary {
            write(vec![k.clone(), v.render()]);
        }
        for t in &self.tables {
            write(vec![format!("# {}", t.name)]);
            write(t.columns.clone());
            for r in &t.rows {
                write(r.iter().map(Cell::render).collect());
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush"))
            .expect("csv output is UTF-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise") + "\n"
    }
}

fn route_name(route: Route) -> &'static str {
    match route {
        Route::Forward => "forward",
        Route::Backward => "backward",
    }
}

fn warnings_table(warnings: &[String]) -> Table {
    let mut t = Table::new("warnings", &["message"]);
    for w in warnings {
        t.push(vec![Cell::text(w)]);
    }
    t
}

pub fn plan_report(plan: &PlanResult, grid: &WavelengthGrid) -> Report {
    let a = &plan.assignment;
    let mut r = Report::new("optimize");
    r.set("structure", Cell::text(serde_name(&plan.structure)));
    r.set("noise_mode", Cell::text(serde_name(&plan.noise_mode)));
    r.set("method", Cell::text(plan.method.name()));
    r.set("channels", Cell::Int(grid.len() as u64));
    r.set("m_quantum", Cell::Int(a.m_quantum() as u64));
    r.set("n_classical", Cell::Int(a.classical_a.len() as u64));
    r.set("r_th_bps", Cell::Num(plan.r_th));
    r.set("total_rate_bps", Cell::Num(plan.total_rate_bps));
    r.set("feasible", Cell::Bool(plan.feasible));

    let mut channels = Table::new(
        "quantum_channels",
        &[
            "route",
            "index",
            "wavelength_nm",
            "p_fr",
            "p_br",
            "p_fc",
            "p_bc",
            "p_total",
            "rate_bps",
        ],
    );
    for c in &plan.per_channel {
        let n = &c.noise;
        channels.push(vec![
            Cell::text(route_name(c.slot.route)),
            Cell::Int(c.slot.index as u64),
            Cell::Num(c.wavelength_nm),
            Cell::Num(n.p_fr),
            Cell::Num(n.p_br),
            Cell::Num(n.p_fc),
            Cell::Num(n.p_bc),
            Cell::Num(n.total),
            Cell::Num(c.rate_bps),
        ]);
    }
    let mut classical = Table::new(
        "classical_channels",
        &["direction", "index", "wavelength_nm"],
    );
    for (dir, set) in [("a_to_b", &a.classical_a), ("b_to_a", &a.classical_b)] {
        for &i in set {
            classical.push(vec![
                Cell::text(dir),
                Cell::Int(i as u64),
                Cell::Num(grid.wavelength_nm(i)),
            ]);
        }
    }
    let mut patterns = Table::new("patterns", &["fiber", "pattern"]);
    for p in plan_patterns(plan, grid.len()) {
        patterns.push(vec![Cell::text(p.fiber), Cell::text(p.text)]);
    }
    r.tables = vec![
        channels,
        classical,
        patterns,
        warnings_table(&plan.warnings),
    ];
    r
}

pub fn pattern_report(plans: &[PlanResult], grid: &WavelengthGrid) -> Report {
    let mut r = Report::new("pattern");
    r.set("channels", Cell::Int(grid.len() as u64));
    r.set("first_wavelength_nm", Cell::Num(grid.wavelength_nm(0)));
    r.set(
        "last_wavelength_nm",
        Cell::Num(grid.wavelength_nm(grid.len() - 1)),
    );
    let mut t = Table::new(
        "patterns",
        &[
            "m_quantum",
            "n_classical",
            "fiber",
            "pattern",
            "total_rate_bps",
            "feasible",
        ],
    );
    let mut warnings = Vec::new();
    for plan in plans {
        let m = plan.assignment.m_quantum() as u64;
        let n = plan.assignment.classical_a.len() as u64;
        for p in plan_patterns(plan, grid.len()) {
            t.push(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::text(p.fiber),
                Cell::text(p.text),
                Cell::Num(plan.total_rate_bps),
                Cell::Bool(plan.feasible),
            ]);
        }
        warnings.extend(plan.warnings.iter().map(|w| format!("N={n}: {w}")));
    }
    r.tables = vec![t, warnings_table(&warnings)];
    r
}

pub fn sweep_report(cells: &[ReCell]) -> Report {
    let mut r = Report::new("sweep-re");
    let defined: Vec<f64> = cells.iter().filter_map(|c| c.re_percent).collect();
    r.set("cells", Cell::Int(cells.len() as u64));
    r.set("defined_cells", Cell::Int(defined.len() as u64));
    r.set(
        "max_re_percent",
        Cell::or_marker(defined.iter().copied().reduce(f64::max), "undefined"),
    );
    let mut t = Table::new(
        "cells",
        &[
            "m_quantum",
            "n_classical",
            "proposed_bps",
            "conventional_bps",
            "re_percent",
        ],
    );
    for c in cells {
        t.push(vec![
            Cell::Int(c.m as u64),
            Cell::Int(c.n as u64),
            Cell::outcome(c.proposed),
            Cell::outcome(c.conventional),
            Cell::or_marker(c.re_percent, "undefined"),
        ]);
    }
    r.tables = vec![t];
    r
}

pub fn n_max_report(rows: &[NMax]) -> Report {
    let mut r = Report::new("nmax");
    let mut t = Table::new("n_max", &["m_quantum", "proposed", "conventional", "gain"]);
    let mut warnings = Vec::new();
    for row in rows {
        t.push(vec![
            Cell::Int(row.m as u64),
            Cell::Int(row.proposed as u64),
            Cell::Int(row.conventional as u64),
            Cell::text((row.proposed as i64 - row.conventional as i64).to_string()),
        ]);
        warnings.extend(row.warnings.iter().cloned());
    }
    r.tables = vec![t, warnings_table(&warnings)];
    r
}

pub fn compare_report(cmp: &Comparison) -> Report {
    let mut r = Report::new("compare");
    r.set(
        "knee_m",
        cmp.knee
            .map_or_else(|| Cell::text("none"), |m| Cell::Int(m as u64)),
    );
    let mut t = Table::new(
        "totals",
        &[
            "m_quantum",
            "floor",
            "optimal_bps",
            "near_optimal_bps",
            "conventional_bps",
            "gap_percent",
        ],
    );
    for row in &cmp.rows {
        let gap = match (row.optimal.rate(), row.near_optimal.rate()) {
            (Some(o), Some(n)) if o > 0.0 => Some((o - n) / o * 100.0),
            _ => None,
        };
        t.push(vec![
            Cell::Int(row.m as u64),
            Cell::text(row.floor.name()),
            Cell::outcome(row.optimal),
            Cell::outcome(row.near_optimal),
            Cell::outcome(row.conventional),
            Cell::or_marker(gap, "undefined"),
        ]);
    }
    r.tables = vec![t];
    r
}

pub fn curve_report(table: &RateCurveTable) -> Report {
    let mut r = Report::new("rate-curve");
    r.set("zero_noise_bps", Cell::Num(table.zero_noise_bps));
    r.set("p_zero", Cell::Num(table.p_zero));
    r.set("r_th_bps", Cell::Num(table.r_th));
    r.set("p_th", Cell::or_marker(table.p_th, "unreachable"));
    let mut t = Table::new("curve", &["p", "y0", "exact_bps", "linear_bps"]);
    for p in &table.points {
        t.push(vec![
            Cell::Num(p.p),
            Cell::Num(p.y0),
            Cell::Num(p.exact_bps),
            Cell::or_marker(p.linear_bps, "undefined"),
        ]);
    }
    r.tables = vec![t];
    r
}

fn serde_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}
