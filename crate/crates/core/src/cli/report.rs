use std::fmt::Display;

/// Line-oriented `key=value` report with a trailing summary block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
    summary: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn summary(&mut self, key: impl Into<String>, value: impl Display) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .chain(&self.summary)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k}={v}\n"));
        }
        if !self.summary.is_empty() {
            out.push_str("# summary\n");
            for (k, v) in &self.summary {
                out.push_str(&format!("summary.{k}={v}\n"));
            }
        }
        out
    }
}

/// Space-separated shortest round-trip formatting of a float slice.
pub fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_entries_then_summary() {
        let mut r = Report::new();
        r.push("step.1.kind", "restore");
        r.push("step.1.passes_used", 2);
        r.summary("status", "ok");
        assert_eq!(
            r.render(),
            "step.1.kind=restore\nstep.1.passes_used=2\n# summary\nsummary.status=ok\n"
        );
        assert_eq!(r.get("summary.status"), None);
        assert_eq!(r.get("status"), Some("ok"));
    }

    #[test]
    fn floats_round_trip() {
        let s = join_floats(&[1.0, 0.1 + 0.2, 2f64.sqrt()]);
        let back: Vec<f64> = s.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(back, vec![1.0, 0.1 + 0.2, 2f64.sqrt()]);
    }
}
