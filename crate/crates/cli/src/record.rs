//! Line-delimited output records: one record per line, space-separated
//! key:value pairs in a fixed field order with schema_version first.
//! Floats carry 17 significant digits so every double round-trips.

/// Canonical float serialization: 17 significant digits, scientific.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// An ordered list of key:value fields.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    /// Starts a record with the schema marker as its first field.
    pub fn with_schema() -> Self {
        let mut r = Self::default();
        r.push_raw("schema_version", "1");
        r
    }

    /// Appends a pre-formatted value.
    pub fn push_raw(&mut self, key: &str, value: impl Into<String>) {
        self.fields.push((key.to_string(), value.into()));
    }

    /// Appends a float in the canonical 17-digit form.
    pub fn push_float(&mut self, key: &str, value: f64) {
        self.push_raw(key, format_float(value));
    }

    /// Appends an unsigned integer.
    pub fn push_int(&mut self, key: &str, value: u64) {
        self.push_raw(key, value.to_string());
    }

    /// The ordered fields.
    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    /// Looks a field up by key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Serializes to the single-line wire form.
    pub fn to_line(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the wire form back into ordered fields. Every token must
    /// contain a colon; the value is everything after the first one.
    pub fn parse(line: &str) -> Option<Self> {
        let mut fields = Vec::new();
        for token in line.split_whitespace() {
            let (key, value) = token.split_once(':')?;
            if key.is_empty() {
                return None;
            }
            fields.push((key.to_string(), value.to_string()));
        }
        if fields.is_empty() {
            None
        } else {
            Some(Self { fields })
        }
    }
}
