//! Run reports: a plain-text rendering with a fixed section order and a
//! line-oriented `key=value` rendering for scripts.

use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ManifoldLine {
    pub m: String,
    pub n: String,
    pub provenance: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EigenLine {
    pub lambda: String,
    pub weight: String,
    pub phi: String,
    /// `pass` or `fail: ...` for the exact identities.
    pub checks: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionBlock {
    pub ic: String,
    pub phi0: String,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckBlock {
    pub ic: String,
    pub max_err: f64,
    pub window_end: f64,
    pub poles: Vec<f64>,
    pub crossings: Vec<f64>,
    pub termination: String,
    pub rk_last_time: f64,
    pub csv: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub input: String,
    pub system: Vec<String>,
    pub fixed_points: Vec<String>,
    pub manifolds: Vec<ManifoldLine>,
    pub eigenpairs: Vec<EigenLine>,
    pub pair: Vec<String>,
    pub inversion_kind: Option<String>,
    pub inversion: Vec<String>,
    pub solutions: Vec<SolutionBlock>,
    pub checks: Vec<CheckBlock>,
    pub verdicts: Vec<(String, String)>,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

fn times(ts: &[f64]) -> String {
    if ts.is_empty() {
        return "none".into();
    }
    ts.iter().map(|t| format!("{t:e}")).collect::<Vec<_>>().join(" ")
}

fn section(out: &mut String, title: &str, lines: &[String]) {
    if lines.is_empty() {
        return;
    }
    let _ = writeln!(out, "== {title} ==");
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
}

impl RunReport {
    pub fn new(command: &str, input: &str) -> Self {
        RunReport { command: command.into(), input: input.into(), ..Default::default() }
    }

    pub fn verdict(&mut self, name: &str, value: impl Into<String>) {
        self.verdicts.push((name.into(), value.into()));
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "input: {}", self.input);
        section(&mut out, "system", &self.system);
        section(&mut out, "fixed points", &self.fixed_points);
        let ms: Vec<String> =
            self.manifolds.iter().map(|m| format!("M = {}, N = {}  [{}]", m.m, m.n, m.provenance)).collect();
        section(&mut out, "manifolds", &ms);
        let es: Vec<String> = self
            .eigenpairs
            .iter()
            .map(|e| {
                let p = if e.weight.is_empty() { String::new() } else { format!(", p = {}", e.weight) };
                format!("λ = {}, φ = {}{p}  [exact checks: {}]", e.lambda, e.phi, e.checks)
            })
            .collect();
        section(&mut out, "eigenfunctions", &es);
        section(&mut out, "selected pair", &self.pair);
        if let Some(kind) = &self.inversion_kind {
            let mut lines = vec![format!("kind: {kind}")];
            lines.extend(self.inversion.iter().cloned());
            section(&mut out, "inversion", &lines);
        }
        let mut sl = Vec::new();
        for s in &self.solutions {
            sl.push(format!("ic ({}), phi0 = ({})", s.ic, s.phi0));
            sl.extend(s.lines.iter().map(|l| format!("  {l}")));
        }
        section(&mut out, "solutions", &sl);
        let mut cl = Vec::new();
        for c in &self.checks {
            cl.push(format!("ic ({})", c.ic));
            cl.push(format!("  max abs error on [0, {:e}]: {:e}", c.window_end, c.max_err));
            cl.push(format!("  pole times: {}", times(&c.poles)));
            cl.push(format!("  branch crossings: {}", times(&c.crossings)));
            cl.push(format!("  integrator: {} at t = {:e}", c.termination, c.rk_last_time));
            cl.push(format!("  csv: {}", c.csv));
        }
        section(&mut out, "checks", &cl);
        let vs: Vec<String> = self.verdicts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        section(&mut out, "verdicts", &vs);
        section(&mut out, "files", &self.files);
        section(&mut out, "notes", &self.notes);
        out
    }

    /// One `key=value` per line; see the README for the key grammar.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &str| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("command", &self.command);
        kv("input", &self.input);
        for (i, l) in self.system.iter().enumerate() {
            kv(&format!("system.{}", i + 1), l);
        }
        for (i, l) in self.fixed_points.iter().enumerate() {
            kv(&format!("fixed_point.{}", i + 1), l);
        }
        for (i, m) in self.manifolds.iter().enumerate() {
            kv(&format!("manifold.{}.m", i + 1), &m.m);
            kv(&format!("manifold.{}.n", i + 1), &m.n);
            kv(&format!("manifold.{}.provenance", i + 1), &m.provenance);
        }
        for (i, e) in self.eigenpairs.iter().enumerate() {
            kv(&format!("eigen.{}.lambda", i + 1), &e.lambda);
            kv(&format!("eigen.{}.weight", i + 1), &e.weight);
            kv(&format!("eigen.{}.phi", i + 1), &e.phi);
            kv(&format!("eigen.{}.checks", i + 1), &e.checks);
        }
        for (i, l) in self.pair.iter().enumerate() {
            kv(&format!("pair.{}", i + 1), l);
        }
        if let Some(k) = &self.inversion_kind {
            kv("inversion.kind", k);
        }
        for (i, l) in self.inversion.iter().enumerate() {
            kv(&format!("inversion.{}", i + 1), l);
        }
        for (i, s) in self.solutions.iter().enumerate() {
            kv(&format!("solution.{}.ic", i + 1), &s.ic);
            kv(&format!("solution.{}.phi0", i + 1), &s.phi0);
            for (j, l) in s.lines.iter().enumerate() {
                kv(&format!("solution.{}.{}", i + 1, j + 1), l);
            }
        }
        for (i, c) in self.checks.iter().enumerate() {
            let p = format!("check.{}", i + 1);
            kv(&format!("{p}.ic"), &c.ic);
            kv(&format!("{p}.max_err"), &format!("{:e}", c.max_err));
            kv(&format!("{p}.window_end"), &format!("{:e}", c.window_end));
            kv(&format!("{p}.poles"), &times(&c.poles));
            kv(&format!("{p}.crossings"), &times(&c.crossings));
            kv(&format!("{p}.termination"), &c.termination);
            kv(&format!("{p}.rk_last_time"), &format!("{:e}", c.rk_last_time));
            kv(&format!("{p}.csv"), &c.csv);
        }
        for (k, v) in &self.verdicts {
            kv(&format!("verdict.{k}"), v);
        }
        for (i, f) in self.files.iter().enumerate() {
            kv(&format!("file.{}", i + 1), f);
        }
        for (i, n) in self.notes.iter().enumerate() {
            kv(&format!("note.{}", i + 1), n);
        }
        out
    }
}
