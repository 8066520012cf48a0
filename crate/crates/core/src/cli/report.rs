use std::fmt::Display;

/// Reals with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Left-aligned columns separated by two spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = String::new();
            for (k, (c, w)) in r.iter().zip(&width).enumerate() {
                if k > 0 {
                    line.push_str("  ");
                }
                line.push_str(c);
                line.extend(std::iter::repeat_n(' ', w - c.chars().count()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Header with tool version and a config echo, then body lines and tables
/// in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    command: String,
    config: Vec<(String, String)>,
    body: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            config: Vec::new(),
            body: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn line(&mut self, l: impl Into<String>) {
        self.body.push(l.into());
    }

    pub fn table(&mut self, t: Table) {
        self.body.push(t.to_text().trim_end().to_string());
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# qmono {} {}\n", super::VERSION, self.command);
        for (k, v) in &self.config {
            out.push_str(&format!("# config {k} = {v}\n"));
        }
        for l in &self.body {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("signs");
        assert_eq!(r.to_text(), format!("# qmono {} signs\n", super::super::VERSION));
        let t = Table::new(&["a", "bb"]);
        assert_eq!(t.to_text(), "a  bb\n");
    }

    #[test]
    fn columns_align() {
        let mut t = Table::new(&["id", "v"]);
        t.row(vec!["10".into(), real(0.1)]);
        t.row(vec!["2".into(), real(-1.0)]);
        assert_eq!(t.to_text(), "id  v\n10  1.0000000000000001e-1\n2   -1.0000000000000000e0\n");
    }
}
