use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::textfmt::sig6;

/// Null value used by well-log exports for "no reading".
pub const MISSING_SENTINEL: f64 = -999.25;

/// Column layout expected in a well-log CSV: the feature columns plus the
/// target column. `well` and `depth` are always required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub features: Vec<String>,
    pub target: String,
}

impl Schema {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>, target: impl Into<String>) -> Self {
        Self {
            features: features.into_iter().map(Into::into).collect(),
            target: target.into(),
        }
    }

    /// Treats the last column name as the target.
    pub fn from_columns<S: AsRef<str>>(columns: &[S]) -> Result<Self> {
        let (target, features) = columns
            .split_last()
            .ok_or_else(|| Error::InvalidConfig("schema needs at least a target column".into()))?;
        Ok(Self::new(
            features.iter().map(|s| s.as_ref().to_string()),
            target.as_ref(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellRow {
    pub well: String,
    pub depth: f64,
    pub features: Vec<Option<f64>>,
    pub target: Option<f64>,
}

impl WellRow {
    pub fn is_complete(&self) -> bool {
        self.target.is_some() && self.features.iter().all(Option::is_some)
    }
}

/// Depth-indexed log table. Rows of one well are contiguous and sorted by
/// strictly increasing depth.
#[derive(Debug, Clone, PartialEq)]
pub struct WellTable {
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub rows: Vec<WellRow>,
}

impl WellTable {
    /// Builds a table, grouping rows by well (first-appearance order) and
    /// checking the depth and target invariants.
    pub fn new(feature_names: Vec<String>, target_name: String, rows: Vec<WellRow>) -> Result<Self> {
        let mut order: Vec<String> = Vec::new();
        let mut groups: HashMap<String, Vec<WellRow>> = HashMap::new();
        for row in rows {
            if row.features.len() != feature_names.len() {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len(),
                    got: row.features.len(),
                });
            }
            if let Some(t) = row.target {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::InvalidConfig(format!(
                        "target {t} of well `{}` at depth {} is outside [0,1]",
                        row.well, row.depth
                    )));
                }
            }
            if !groups.contains_key(&row.well) {
                order.push(row.well.clone());
            }
            groups.entry(row.well.clone()).or_default().push(row);
        }
        let mut sorted = Vec::new();
        for well in &order {
            let group = groups.remove(well).unwrap_or_default();
            if let Some(w) = group.windows(2).find(|w| w[1].depth <= w[0].depth) {
                return Err(Error::InvalidConfig(format!(
                    "depths of well `{well}` are not strictly increasing at {}",
                    w[1].depth
                )));
            }
            sorted.extend(group);
        }
        Ok(Self {
            feature_names,
            target_name,
            rows: sorted,
        })
    }

    pub fn wells(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for row in &self.rows {
            if out.last() != Some(&row.well.as_str()) {
                out.push(&row.well);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Contiguous row ranges of each well, in table order.
    pub(crate) fn well_ranges(&self) -> Vec<(&str, std::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.rows.len() {
            if i == self.rows.len() || self.rows[i].well != self.rows[start].well {
                out.push((self.rows[start].well.as_str(), start..i));
                start = i;
            }
        }
        out
    }

    /// Writes `well,depth,<features>,<target>` with 6 significant digits.
    /// Missing cells are written empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["well".to_string(), "depth".to_string()];
        header.extend(self.feature_names.iter().cloned());
        header.push(self.target_name.clone());
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut cells = vec![row.well.clone(), sig6(row.depth)];
            cells.extend(row.features.iter().map(|v| v.map(sig6).unwrap_or_default()));
            cells.push(row.target.map(sig6).unwrap_or_default());
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Reads a well-log CSV. Empty cells and the `-999.25` sentinel are missing.
pub fn load_table(path: impl AsRef<Path>, schema: &Schema) -> Result<WellTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_table(file, schema, path)
}

/// Reads a table whose feature columns are every header column other than
/// `well`, `depth`, the target and any names in `ignore`.
pub fn load_table_inferred(path: impl AsRef<Path>, target: &str, ignore: &[&str]) -> Result<WellTable> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let features: Vec<String> = headers
        .iter()
        .map(str::trim)
        .filter(|h| !matches!(*h, "well" | "depth") && *h != target && !ignore.contains(h))
        .map(String::from)
        .collect();
    load_table(path, &Schema::new(features, target))
}

pub fn read_table<R: Read>(input: R, schema: &Schema, path: &Path) -> Result<WellTable> {
    let malformed = |reason: String| Error::MalformedFile {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(format!("header lacks column `{name}`")))
    };
    let well_col = find("well")?;
    let depth_col = find("depth")?;
    let feature_cols = schema
        .features
        .iter()
        .map(|f| find(f))
        .collect::<Result<Vec<_>>>()?;
    let target_col = find(&schema.target)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = i + 1;
        let cell = |col: usize| record.get(col).unwrap_or("");
        let numeric = |col: usize| -> Result<Option<f64>> {
            let raw = cell(col);
            if raw.is_empty() {
                return Ok(None);
            }
            let v: f64 = raw.parse().map_err(|_| Error::NonNumericCell {
                row: row_no,
                column: headers[col].to_string(),
                value: raw.to_string(),
            })?;
            Ok((v != MISSING_SENTINEL && v.is_finite()).then_some(v))
        };
        let well = cell(well_col).to_string();
        if well.is_empty() {
            return Err(malformed(format!("row {row_no} has an empty well id")));
        }
        let depth = numeric(depth_col)?
            .ok_or_else(|| malformed(format!("row {row_no} has no depth")))?;
        let features = feature_cols.iter().map(|&c| numeric(c)).collect::<Result<Vec<_>>>()?;
        let target = numeric(target_col)?;
        rows.push(WellRow {
            well,
            depth,
            features,
            target,
        });
    }
    WellTable::new(schema.features.clone(), schema.target.clone(), rows)
        .map_err(|e| malformed(e.to_string()))
}

/// Removes every row with a missing feature or target, keeping row order.
pub fn drop_invalid(t: &WellTable) -> Result<WellTable> {
    let rows: Vec<WellRow> = t.rows.iter().filter(|r| r.is_complete()).cloned().collect();
    if rows.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(WellTable {
        feature_names: t.feature_names.clone(),
        target_name: t.target_name.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// Median of the consecutive depth deltas of each well.
    Auto,
    Fixed(f64),
}

/// Linearly interpolates every well onto a uniform depth grid running from
/// its shallowest to its deepest sample. Never extrapolates.
pub fn resample_uniform(t: &WellTable, spacing: Spacing) -> Result<WellTable> {
    if let Spacing::Fixed(s) = spacing {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig(format!("spacing must be positive, got {s}")));
        }
    }
    let mut rows = Vec::new();
    for (well, range) in t.well_ranges() {
        let src = &t.rows[range];
        if src.len() < 2 {
            return Err(Error::SingleRowWell(well.to_string()));
        }
        let step = match spacing {
            Spacing::Fixed(s) => s,
            Spacing::Auto => median_delta(src),
        };
        let top = src[0].depth;
        let bottom = src[src.len() - 1].depth;
        let count = ((bottom - top) / step * (1.0 + 1e-12)).floor() as usize + 1;
        let mut seg = 0;
        for k in 0..count {
            let z = (top + k as f64 * step).min(bottom);
            while seg + 2 < src.len() && src[seg + 1].depth <= z {
                seg += 1;
            }
            let (a, b) = (&src[seg], &src[seg + 1]);
            let frac = if z <= a.depth {
                0.0
            } else if z >= b.depth {
                1.0
            } else {
                (z - a.depth) / (b.depth - a.depth)
            };
            let lerp = |u: Option<f64>, v: Option<f64>| match (u, v) {
                (Some(u), _) if frac == 0.0 => Some(u),
                (_, Some(v)) if frac == 1.0 => Some(v),
                (Some(u), Some(v)) => Some(u + frac * (v - u)),
                _ => None,
            };
            rows.push(WellRow {
                well: well.to_string(),
                depth: z,
                features: a
                    .features
                    .iter()
                    .zip(&b.features)
                    .map(|(&u, &v)| lerp(u, v))
                    .collect(),
                target: lerp(a.target, b.target),
            });
        }
    }
    Ok(WellTable {
        feature_names: t.feature_names.clone(),
        target_name: t.target_name.clone(),
        rows,
    })
}

fn median_delta(rows: &[WellRow]) -> f64 {
    let mut deltas: Vec<f64> = rows.windows(2).map(|w| w[1].depth - w[0].depth).collect();
    deltas.sort_by(f64::total_cmp);
    let mid = deltas.len() / 2;
    if deltas.len() % 2 == 1 {
        deltas[mid]
    } else {
        0.5 * (deltas[mid - 1] + deltas[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema::from_columns(&["GR", "NPHI", "RHOB", "DT", "SW"]).unwrap()
    }

    fn parse(text: &str) -> Result<WellTable> {
        read_table(text.as_bytes(), &schema(), Path::new("test.csv"))
    }

    fn one_feature(rows: &[(&str, f64, Option<f64>)]) -> WellTable {
        WellTable::new(
            vec!["GR".into()],
            "SW".into(),
            rows.iter()
                .map(|&(w, d, v)| WellRow {
                    well: w.into(),
                    depth: d,
                    features: vec![v],
                    target: v.map(|v| v / 100.0),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn loads_three_valid_rows() {
        let t = parse(
            "well,depth,GR,NPHI,RHOB,DT,SW\n\
             A,100.0,80,0.2,2.3,90,0.8\n\
             A,100.5,81,0.21,2.31,91,0.75\n\
             A,101.0,82,0.22,2.32,92,0.5\n",
        )
        .unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.rows[2].features[3], Some(92.0));
        assert_eq!(t.rows[2].target, Some(0.5));
    }

    #[test]
    fn sentinel_and_empty_cells_are_missing() {
        let t = parse(
            "well,depth,GR,NPHI,RHOB,DT,SW\n\
             A,1,-999.25,0.2,2.3,90,0.8\n\
             A,2,80,,2.3,90,0.8\n\
             A,3,80,0.2,2.3,90,0.8\n",
        )
        .unwrap();
        assert_eq!(t.rows[0].features[0], None);
        assert_eq!(t.rows[1].features[1], None);
        let clean = drop_invalid(&t).unwrap();
        assert_eq!(clean.len(), 1);
        assert_eq!(clean.rows[0].depth, 3.0);
    }

    #[test]
    fn header_without_depth_is_malformed() {
        let err = parse("well,GR,NPHI,RHOB,DT,SW\nA,1,2,3,4,0.5\n").unwrap_err();
        assert!(matches!(err, Error::MalformedFile { .. }), "{err}");
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let err = parse("well,depth,GR,NPHI,RHOB,DT,SW\nA,1,80,0.2,abc,90,0.5\n").unwrap_err();
        match err {
            Error::NonNumericCell { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "RHOB");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn drop_invalid_cases() {
        let t = one_feature(&[
            ("A", 1.0, Some(1.0)),
            ("A", 2.0, None),
            ("A", 3.0, Some(3.0)),
            ("A", 4.0, None),
            ("A", 5.0, Some(5.0)),
        ]);
        assert_eq!(drop_invalid(&t).unwrap().len(), 3);

        let full = one_feature(&[("A", 1.0, Some(1.0)), ("A", 2.0, Some(2.0))]);
        assert_eq!(drop_invalid(&full).unwrap(), full);

        let empty = one_feature(&[("A", 1.0, None), ("A", 2.0, None)]);
        assert!(matches!(drop_invalid(&empty), Err(Error::EmptyResult)));
    }

    #[test]
    fn resample_half_spacing() {
        let t = one_feature(&[("A", 0.0, Some(0.0)), ("A", 1.0, Some(10.0)), ("A", 2.0, Some(20.0))]);
        let r = resample_uniform(&t, Spacing::Fixed(0.5)).unwrap();
        let depths: Vec<f64> = r.rows.iter().map(|r| r.depth).collect();
        let values: Vec<f64> = r.rows.iter().map(|r| r.features[0].unwrap()).collect();
        assert_eq!(depths, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(values, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
    }

    #[test]
    fn resample_identity_on_uniform_grid() {
        let t = one_feature(&[
            ("A", 10.0, Some(3.0)),
            ("A", 10.25, Some(7.0)),
            ("A", 10.5, Some(1.0)),
            ("B", 0.0, Some(2.0)),
            ("B", 0.25, Some(9.0)),
        ]);
        assert_eq!(resample_uniform(&t, Spacing::Auto).unwrap(), t);
        assert_eq!(resample_uniform(&t, Spacing::Fixed(0.25)).unwrap(), t);
    }

    #[test]
    fn resample_single_row_well_fails() {
        let t = one_feature(&[("A", 0.0, Some(0.0)), ("A", 1.0, Some(1.0)), ("B", 5.0, Some(1.0))]);
        assert!(matches!(
            resample_uniform(&t, Spacing::Auto),
            Err(Error::SingleRowWell(w)) if w == "B"
        ));
    }

    #[test]
    fn auto_spacing_is_median_delta() {
        let t = one_feature(&[
            ("A", 0.0, Some(0.0)),
            ("A", 1.0, Some(1.0)),
            ("A", 2.0, Some(2.0)),
            ("A", 5.0, Some(5.0)),
        ]);
        let r = resample_uniform(&t, Spacing::Auto).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(r.rows[4].features[0], Some(4.0));
    }

    #[test]
    fn rows_are_grouped_by_well() {
        let t = one_feature(&[("A", 0.0, Some(0.0)), ("B", 1.0, Some(1.0)), ("A", 2.0, Some(2.0))]);
        assert_eq!(t.wells(), vec!["A", "B"]);
        assert_eq!(t.rows[1].depth, 2.0);
    }

    #[test]
    fn decreasing_depth_rejected() {
        let rows = vec![
            WellRow { well: "A".into(), depth: 2.0, features: vec![Some(1.0)], target: Some(0.1) },
            WellRow { well: "A".into(), depth: 1.0, features: vec![Some(1.0)], target: Some(0.1) },
        ];
        assert!(WellTable::new(vec!["GR".into()], "SW".into(), rows).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = one_feature(&[("A", 0.0, Some(12.5)), ("A", 1.5, None)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "well,depth,GR,SW\nA,0,12.5,0.125\nA,1.5,,\n");
        let back = read_table(text.as_bytes(), &Schema::new(["GR"], "SW"), Path::new("x")).unwrap();
        assert_eq!(back, t);
    }
}
