//! Versioned tabular output. CSV carries the schema tag in its first row;
//! JSON carries the same tag and the same fields.

use serde_json::{Map, Value};

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    schema: String,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(schema: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            schema: schema.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match {}", self.schema);
        self.rows.push(row);
    }

    pub fn schema(&self) -> &str {
        &self.schema
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Cell `name` of row `row`.
    pub fn get(&self, row: usize, name: &str) -> Option<&Value> {
        let col = self.columns.iter().position(|c| c == name)?;
        self.rows.get(row)?.get(col)
    }

    /// All values of column `name`.
    pub fn column(&self, name: &str) -> Vec<&Value> {
        match self.columns.iter().position(|c| c == name) {
            Some(col) => self.rows.iter().map(|r| &r[col]).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {}\n", self.schema).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns).expect("write to memory");
            for row in &self.rows {
                w.write_record(row.iter().map(cell_text)).expect("write to memory");
            }
            w.flush().expect("write to memory");
        }
        String::from_utf8(out).expect("csv output is UTF-8")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "schema": self.schema,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_starts_with_the_schema_tag() {
        let mut t = Table::new("lca.test/v1", &["a", "b"]);
        t.push(vec![json!(1), json!("x,y")]);
        t.push(vec![json!(0.5), Value::Null]);
        assert_eq!(t.to_csv(), "# schema: lca.test/v1\na,b\n1,\"x,y\"\n0.5,\n");
        let doc: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(doc["schema"], "lca.test/v1");
        assert_eq!(doc["rows"][0]["b"], "x,y");
        assert_eq!(t.get(1, "a"), Some(&json!(0.5)));
        assert_eq!(t.column("b").len(), 2);
    }
}
