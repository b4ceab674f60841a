//! Grid specifications of the form `start:stop:count[:log]`.

use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(format!("grid must be start:stop:count[:log], got '{s}'"));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| format!("bad grid stop '{}'", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad grid count '{}'", parts[2]))?;
        let log = match parts.get(3) {
            None => false,
            Some(&"log") => true,
            Some(other) => return Err(format!("unknown grid suffix '{other}', expected 'log'")),
        };
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid endpoints must be finite".to_string());
        }
        if count < 2 {
            return Err(format!("grid count must be >= 2, got {count}"));
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err("log grids need positive endpoints".to_string());
        }
        Ok(GridSpec {
            start,
            stop,
            count,
            log,
        })
    }
}

impl GridSpec {
    /// Inclusive grid values in order.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if self.log {
            let (a, b) = (self.start.ln(), self.stop.ln());
            (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect()
        } else {
            (0..n)
                .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
                .collect()
        }
    }
}
