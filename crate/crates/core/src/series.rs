//! Price ingestion, gap repair, log returns and descriptive statistics.

use std::cmp::Ordering;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

/// Fewest non-missing points a column needs before gaps can be splined.
pub const MIN_SPLINE_SUPPORT: usize = 2;

/// Column mapping for price CSV files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub date_column: String,
    /// Price columns to load; empty means every column except the date.
    pub price_columns: Vec<String>,
    /// `chrono` format string for the date column.
    pub date_format: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_column: "date".to_string(),
            price_columns: Vec::new(),
            date_format: DEFAULT_DATE_FORMAT.to_string(),
        }
    }
}

/// Dated price levels for `n` contracts, possibly with gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    labels: Vec<String>,
    /// T×n; missing cells hold NaN.
    prices: DMatrix<f64>,
    missing: DMatrix<bool>,
}

impl PriceSeries {
    /// Builds a series from complete or gappy data. Cells flagged in `missing`
    /// are ignored; every other cell must be a finite positive price.
    pub fn new(
        dates: Vec<NaiveDate>,
        labels: Vec<String>,
        mut prices: DMatrix<f64>,
        missing: DMatrix<bool>,
    ) -> Result<Self> {
        let (t, n) = prices.shape();
        if n == 0 || labels.len() != n {
            return Err(Error::invalid(format!(
                "{} labels for {n} price columns",
                labels.len()
            )));
        }
        if dates.len() != t || missing.shape() != (t, n) {
            return Err(Error::invalid("dates, prices and mask disagree in shape"));
        }
        for w in dates.windows(2) {
            match w[0].cmp(&w[1]) {
                Ordering::Less => {}
                Ordering::Equal => return Err(Error::DuplicateDate(w[0].to_string())),
                Ordering::Greater => {
                    return Err(Error::invalid(format!(
                        "dates not increasing at {}",
                        w[1]
                    )))
                }
            }
        }
        for i in 0..t {
            for j in 0..n {
                if missing[(i, j)] {
                    prices[(i, j)] = f64::NAN;
                } else {
                    let p = prices[(i, j)];
                    if !(p.is_finite() && p > 0.0) {
                        return Err(Error::Row {
                            row: i + 1,
                            message: format!("non-positive price {p} in `{}`", labels[j]),
                        });
                    }
                }
            }
        }
        Ok(Self {
            dates,
            labels,
            prices,
            missing,
        })
    }

    pub fn from_complete(
        dates: Vec<NaiveDate>,
        labels: Vec<String>,
        prices: DMatrix<f64>,
    ) -> Result<Self> {
        let (t, n) = prices.shape();
        Self::new(dates, labels, prices, DMatrix::from_element(t, n, false))
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_series(&self) -> usize {
        self.labels.len()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn prices(&self) -> &DMatrix<f64> {
        &self.prices
    }

    pub fn missing_mask(&self) -> &DMatrix<bool> {
        &self.missing
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|m| **m).count()
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|m| *m)
    }
}

/// Reads a price CSV. Empty or unparseable price cells become missing;
/// zero or negative prices are rejected with their file line number.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

pub fn read_csv<R: std::io::Read>(reader: R, schema: &CsvSchema) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let date_idx = headers
        .iter()
        .position(|h| h == schema.date_column)
        .ok_or_else(|| Error::invalid(format!("no date column `{}`", schema.date_column)))?;
    let price_idx: Vec<usize> = if schema.price_columns.is_empty() {
        (0..headers.len()).filter(|&i| i != date_idx).collect()
    } else {
        schema
            .price_columns
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::invalid(format!("no price column `{name}`")))
            })
            .collect::<Result<_>>()?
    };
    if price_idx.is_empty() {
        return Err(Error::invalid("schema selects no price columns"));
    }
    let labels: Vec<String> = price_idx.iter().map(|&i| headers[i].to_string()).collect();

    struct Row {
        line: usize,
        date: NaiveDate,
        values: Vec<Option<f64>>,
    }
    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, &schema.date_format).map_err(|e| {
            Error::Row {
                row: line,
                message: format!("bad date `{raw_date}`: {e}"),
            }
        })?;
        let mut values = Vec::with_capacity(price_idx.len());
        for (&i, label) in price_idx.iter().zip(&labels) {
            let cell = record.get(i).unwrap_or("");
            let value = cell.parse::<f64>().ok().filter(|v| v.is_finite());
            if let Some(v) = value {
                if v <= 0.0 {
                    return Err(Error::Row {
                        row: line,
                        message: format!("non-positive price {v} in `{label}`"),
                    });
                }
            }
            values.push(value);
        }
        rows.push(Row { line, date, values });
    }
    rows.sort_by_key(|r| r.date);
    for w in rows.windows(2) {
        if w[0].date == w[1].date {
            return Err(Error::DuplicateDate(format!(
                "{} (lines {} and {})",
                w[0].date, w[0].line, w[1].line
            )));
        }
    }

    let (t, n) = (rows.len(), labels.len());
    let mut prices = DMatrix::from_element(t, n, f64::NAN);
    let mut missing = DMatrix::from_element(t, n, false);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.values.iter().enumerate() {
            match v {
                Some(p) => prices[(i, j)] = *p,
                None => missing[(i, j)] = true,
            }
        }
    }
    let dates = rows.into_iter().map(|r| r.date).collect();
    PriceSeries::new(dates, labels, prices, missing)
}

/// Writes prices in the layout [`load_csv`] reads; missing cells are left empty.
pub fn write_prices_csv<W: Write>(series: &PriceSeries, out: W, date_format: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(series.labels.iter().cloned());
    w.write_record(&header)?;
    for (i, date) in series.dates.iter().enumerate() {
        let mut record = vec![date.format(date_format).to_string()];
        for j in 0..series.n_series() {
            if series.missing[(i, j)] {
                record.push(String::new());
            } else {
                record.push(format!("{}", series.prices[(i, j)]));
            }
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Fills interior gaps with a natural cubic spline over the observation index.
///
/// Boundary gaps are an error; observed cells pass through untouched.
pub fn interpolate_missing(s: &PriceSeries) -> Result<PriceSeries> {
    let t = s.len();
    let mut prices = s.prices.clone();
    for j in 0..s.n_series() {
        let col_missing: Vec<bool> = (0..t).map(|i| s.missing[(i, j)]).collect();
        if !col_missing.iter().any(|m| *m) {
            continue;
        }
        let label = &s.labels[j];
        if col_missing[0] || col_missing[t - 1] {
            return Err(Error::Interpolation {
                column: label.clone(),
                message: "missing value at the sample boundary; extrapolation is not supported"
                    .into(),
            });
        }
        let knots: Vec<(f64, f64)> = (0..t)
            .filter(|&i| !col_missing[i])
            .map(|i| (i as f64, s.prices[(i, j)]))
            .collect();
        if knots.len() < MIN_SPLINE_SUPPORT {
            return Err(Error::Interpolation {
                column: label.clone(),
                message: format!(
                    "{} support points, need at least {MIN_SPLINE_SUPPORT}",
                    knots.len()
                ),
            });
        }
        let spline = NaturalCubicSpline::new(&knots)?;
        for i in (0..t).filter(|&i| col_missing[i]) {
            let v = spline.eval(i as f64);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Interpolation {
                    column: label.clone(),
                    message: format!("spline produced non-positive value {v} at row {}", i + 1),
                });
            }
            prices[(i, j)] = v;
        }
    }
    let (rows, cols) = prices.shape();
    Ok(PriceSeries {
        dates: s.dates.clone(),
        labels: s.labels.clone(),
        prices,
        missing: DMatrix::from_element(rows, cols, false),
    })
}

/// Natural cubic spline (zero second derivative at both ends).
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    /// `knots` must have strictly increasing abscissae.
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        let k = knots.len();
        if k < 2 {
            return Err(Error::invalid("spline needs at least two knots"));
        }
        let x: Vec<f64> = knots.iter().map(|p| p.0).collect();
        let y: Vec<f64> = knots.iter().map(|p| p.1).collect();
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        let mut m = vec![0.0; k];
        if k > 2 {
            // Thomas algorithm on the interior second derivatives.
            let n = k - 2;
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let mut diag = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                upper[i] = h[i + 1];
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..n {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n] = rhs[n - 1] / diag[n - 1];
            for i in (0..n - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn eval(&self, at: f64) -> f64 {
        let k = self.x.len();
        let seg = match self.x.partition_point(|&xi| xi <= at) {
            0 => 0,
            p if p >= k => k - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.x[seg], self.x[seg + 1]);
        let (y0, y1) = (self.y[seg], self.y[seg + 1]);
        let (m0, m1) = (self.m[seg], self.m[seg + 1]);
        let h = x1 - x0;
        let a = x1 - at;
        let b = at - x0;
        m0 * a.powi(3) / (6.0 * h)
            + m1 * b.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }
}

/// T×n log returns; dates are those of the later price in each pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    dates: Vec<NaiveDate>,
    labels: Vec<String>,
    values: DMatrix<f64>,
}

impl ReturnMatrix {
    pub fn new(dates: Vec<NaiveDate>, labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let (t, n) = values.shape();
        if dates.len() != t || labels.len() != n {
            return Err(Error::invalid("return matrix shape disagrees with index"));
        }
        if n == 0 {
            return Err(Error::invalid("return matrix has no columns"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("return matrix contains non-finite values"));
        }
        Ok(Self {
            dates,
            labels,
            values,
        })
    }

    /// Attaches consecutive daily dates starting at `start`.
    pub fn with_daily_dates(start: NaiveDate, labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let dates = start.iter_days().take(values.nrows()).collect();
        Self::new(dates, labels, values)
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn n_series(&self) -> usize {
        self.values.ncols()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    /// Rebuilds a price series `p0 · exp(cumsum(r))` with one extra leading row
    /// dated the day before the first return.
    pub fn to_prices(&self, p0: f64) -> Result<PriceSeries> {
        let (t, n) = self.values.shape();
        let first = self
            .dates
            .first()
            .and_then(|d| d.pred_opt())
            .ok_or_else(|| Error::invalid("cannot date the initial price"))?;
        let mut prices = DMatrix::zeros(t + 1, n);
        for j in 0..n {
            let mut log_p = p0.ln();
            prices[(0, j)] = p0;
            for i in 0..t {
                log_p += self.values[(i, j)];
                prices[(i + 1, j)] = log_p.exp();
            }
        }
        let mut dates = Vec::with_capacity(t + 1);
        dates.push(first);
        dates.extend(self.dates.iter().copied());
        PriceSeries::from_complete(dates, self.labels.clone(), prices)
    }
}

impl ReturnMatrix {
    /// `date, <labels…>` with shortest round-trip number formatting, so
    /// [`read_returns_csv`] recovers the matrix bit for bit.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["date".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (i, date) in self.dates.iter().enumerate() {
            let mut record = vec![date.format(DEFAULT_DATE_FORMAT).to_string()];
            record.extend(self.values.row(i).iter().map(|v| format!("{v}")));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

pub fn read_returns_csv<R: std::io::Read>(reader: R) -> Result<ReturnMatrix> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("date") || headers.len() < 2 {
        return Err(Error::invalid("returns file needs a `date` column followed by series"));
    }
    let labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut dates = Vec::new();
    let mut flat = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let raw = record.get(0).unwrap_or("");
        dates.push(
            NaiveDate::parse_from_str(raw, DEFAULT_DATE_FORMAT).map_err(|e| Error::Row {
                row: line,
                message: format!("bad date `{raw}`: {e}"),
            })?,
        );
        for cell in record.iter().skip(1) {
            flat.push(cell.parse::<f64>().map_err(|e| Error::Row {
                row: line,
                message: format!("bad return `{cell}`: {e}"),
            })?);
        }
    }
    let values = DMatrix::from_row_slice(dates.len(), labels.len(), &flat);
    ReturnMatrix::new(dates, labels, values)
}

pub fn log_returns(s: &PriceSeries) -> Result<ReturnMatrix> {
    if let Some(j) = (0..s.n_series()).find(|&j| s.missing.column(j).iter().any(|m| *m)) {
        return Err(Error::MissingValues(s.labels[j].clone()));
    }
    if s.len() < 2 {
        return Err(Error::invalid("need at least two prices to form a return"));
    }
    let (t, n) = s.prices.shape();
    let values = DMatrix::from_fn(t - 1, n, |i, j| {
        s.prices[(i + 1, j)].ln() - s.prices[(i, j)].ln()
    });
    ReturnMatrix::new(s.dates[1..].to_vec(), s.labels.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdDenominator {
    /// N − 1
    Sample,
    /// N
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub label: String,
    pub mean: f64,
    pub sd: f64,
    pub max: f64,
    pub min: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub sd_denominator: SdDenominator,
    pub columns: Vec<ColumnStats>,
}

/// Mean, sample SD, max and min per column, in that order.
pub fn descriptive_stats(r: &ReturnMatrix) -> Result<StatsSummary> {
    let t = r.len();
    if t < 2 {
        return Err(Error::invalid(format!(
            "descriptive statistics need at least 2 observations, got {t}"
        )));
    }
    let columns = (0..r.n_series())
        .map(|j| {
            let col = r.values.column(j);
            let mean = col.iter().sum::<f64>() / t as f64;
            let shift = col[0];
            let shifted_mean = col.iter().map(|v| v - shift).sum::<f64>() / t as f64;
            let ss: f64 = col.iter().map(|v| (v - shift - shifted_mean).powi(2)).sum();
            let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            ColumnStats {
                label: r.labels[j].clone(),
                mean,
                sd: (ss / (t - 1) as f64).sqrt(),
                max,
                min,
                n: t,
            }
        })
        .collect();
    Ok(StatsSummary {
        sd_denominator: SdDenominator::Sample,
        columns,
    })
}

impl StatsSummary {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "mean", "sd", "max", "min", "n", "sd_denominator"])?;
        let denom = match self.sd_denominator {
            SdDenominator::Sample => "sample",
            SdDenominator::Population => "population",
        };
        for c in &self.columns {
            w.write_record([
                c.label.clone(),
                format!("{}", c.mean),
                format!("{}", c.sd),
                format!("{}", c.max),
                format!("{}", c.min),
                c.n.to_string(),
                denom.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DEFAULT_DATE_FORMAT).unwrap()
    }

    fn parse(text: &str) -> Result<PriceSeries> {
        read_csv(text.as_bytes(), &CsvSchema::default())
    }

    #[test]
    fn three_row_file_parses_without_gaps() {
        let s = parse("date,p\n2020-01-01,100\n2020-01-02,101\n2020-01-03,102\n").unwrap();
        assert_eq!(s.len(), 3);
        assert!(!s.has_missing());
        assert_eq!(s.prices()[(2, 0)], 102.0);
    }

    #[test]
    fn rows_are_sorted_by_date() {
        let s = parse("date,p\n2020-01-03,102\n2020-01-01,100\n2020-01-02,101\n").unwrap();
        assert_eq!(s.dates()[0], d("2020-01-01"));
        assert_eq!(s.prices()[(0, 0)], 100.0);
    }

    #[test]
    fn empty_cell_is_missing() {
        let s = parse("date,a,b\n2020-01-01,100,5\n2020-01-02,,6\n2020-01-03,102,x\n").unwrap();
        assert!(s.missing_mask()[(1, 0)]);
        assert!(s.missing_mask()[(2, 1)]);
        assert!(!s.missing_mask()[(1, 1)]);
        assert_eq!(s.missing_count(), 2);
    }

    #[test]
    fn duplicate_date_is_named() {
        let err = parse("date,p\n2020-01-01,100\n2020-01-01,101\n").unwrap_err();
        assert!(err.to_string().contains("2020-01-01"), "{err}");
    }

    #[test]
    fn non_positive_price_reports_line() {
        let err = parse("date,p\n2020-01-01,100\n2020-01-02,0\n").unwrap_err();
        assert!(matches!(err, Error::Row { row: 3, .. }), "{err}");
        let err = parse("date,p\n2020-01-01,-4\n").unwrap_err();
        assert!(matches!(err, Error::Row { row: 2, .. }), "{err}");
    }

    #[test]
    fn unreadable_file_is_io_error() {
        let err = load_csv("/nonexistent/prices.csv", &CsvSchema::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn selected_columns_and_custom_date_format() {
        let schema = CsvSchema {
            date_column: "day".into(),
            price_columns: vec!["b".into()],
            date_format: "%d/%m/%Y".into(),
        };
        let s = read_csv("day,a,b\n02/01/2020,1,7\n03/01/2020,2,8\n".as_bytes(), &schema).unwrap();
        assert_eq!(s.labels(), ["b".to_string()]);
        assert_eq!(s.dates()[0], d("2020-01-02"));
    }

    #[test]
    fn interpolation_is_identity_without_gaps() {
        let s = parse("date,p\n2020-01-01,100\n2020-01-02,101\n2020-01-03,99\n").unwrap();
        assert_eq!(interpolate_missing(&s).unwrap(), s);
    }

    #[test]
    fn collinear_gap_is_filled_exactly() {
        let s = parse("date,p\n2020-01-01,100\n2020-01-02,\n2020-01-03,102\n").unwrap();
        let f = interpolate_missing(&s).unwrap();
        assert!((f.prices()[(1, 0)] - 101.0).abs() < 1e-12);
        assert!(!f.has_missing());
    }

    #[test]
    fn boundary_gap_is_rejected() {
        let s = parse("date,p\n2020-01-01,\n2020-01-02,1\n2020-01-03,2\n2020-01-04,3\n").unwrap();
        assert!(matches!(
            interpolate_missing(&s),
            Err(Error::Interpolation { .. })
        ));
        let s = parse("date,p\n2020-01-01,1\n2020-01-02,2\n2020-01-03,\n").unwrap();
        assert!(interpolate_missing(&s).is_err());
    }

    #[test]
    fn too_few_support_points_is_rejected() {
        let dates: Vec<NaiveDate> = d("2020-01-01").iter_days().take(3).collect();
        let prices = DMatrix::from_column_slice(3, 1, &[5.0, f64::NAN, 6.0]);
        let mut missing = DMatrix::from_element(3, 1, false);
        missing[(1, 0)] = true;
        // two knots are enough for the linear case
        let s = PriceSeries::new(dates.clone(), vec!["p".into()], prices, missing).unwrap();
        assert!(interpolate_missing(&s).is_ok());
        let s = parse("date,p\n2020-01-01,5\n").unwrap();
        assert!(interpolate_missing(&s).is_ok());
    }

    #[test]
    fn spline_reproduces_lines_and_knots() {
        let sp = NaturalCubicSpline::new(&[(0.0, 1.0), (2.0, 5.0), (3.0, 7.0), (7.0, 15.0)]).unwrap();
        for x in [0.5, 1.0, 2.5, 4.0, 6.9] {
            assert!((sp.eval(x) - (1.0 + 2.0 * x)).abs() < 1e-12);
        }
        let sp = NaturalCubicSpline::new(&[(0.0, 1.0), (1.0, 4.0), (3.0, 16.0), (4.0, 25.0)]).unwrap();
        assert_eq!(sp.eval(3.0), 16.0);
        assert!((sp.eval(1.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn log_returns_basic_cases() {
        let dates: Vec<NaiveDate> = d("2020-01-01").iter_days().take(3).collect();
        let prices = DMatrix::from_column_slice(3, 2, &[100.0, 100.0, 100.0, 100.0, 100.0 * 0.01f64.exp(), 100.0]);
        let s = PriceSeries::from_complete(dates.clone(), vec!["a".into(), "b".into()], prices).unwrap();
        let r = log_returns(&s).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.values()[(0, 0)], 0.0);
        assert!((r.values()[(0, 1)] - 0.01).abs() < 1e-15);
        assert_eq!(r.dates()[0], dates[1]);
    }

    #[test]
    fn log_returns_requires_complete_data() {
        let s = parse("date,p\n2020-01-01,100\n2020-01-02,\n2020-01-03,102\n").unwrap();
        let err = log_returns(&s).unwrap_err();
        assert!(err.to_string().contains("interpolation"));
    }

    #[test]
    fn stats_of_simple_columns() {
        let values = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 4.0, 4.0]);
        let r = ReturnMatrix::with_daily_dates(d("2020-01-01"), vec!["a".into(), "b".into()], values).unwrap();
        let s = descriptive_stats(&r).unwrap();
        let a = &s.columns[0];
        assert_eq!((a.mean, a.max, a.min, a.n), (2.0, 3.0, 1.0, 3));
        assert!((a.sd - 1.0).abs() < 1e-15);
        assert_eq!(s.columns[1].sd, 0.0);
        assert_eq!(s.sd_denominator, SdDenominator::Sample);
    }

    #[test]
    fn stats_reject_short_input() {
        let values = DMatrix::from_column_slice(1, 1, &[1.0]);
        let r = ReturnMatrix::with_daily_dates(d("2020-01-01"), vec!["a".into()], values).unwrap();
        assert!(descriptive_stats(&r).is_err());
    }

    #[test]
    fn stats_csv_column_order() {
        let values = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let r = ReturnMatrix::with_daily_dates(d("2020-01-01"), vec!["a".into()], values).unwrap();
        let mut buf = Vec::new();
        descriptive_stats(&r).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("series,mean,sd,max,min,n,sd_denominator\na,2,1,3,1,3,sample"));
    }
}
