use super::runner::ResultDocument;
use crate::complexity::ComplexityKind;
use crate::error::{Error, Result};
use crate::seminorms::{SeminormMethod, SeminormReport};

const METHODS: [SeminormMethod; 3] = [
    SeminormMethod::AnalyticBound,
    SeminormMethod::EmpiricalSearch,
    SeminormMethod::DerivativeBound,
];

/// Column names, in output order.
pub fn table_columns() -> Vec<String> {
    let mut cols: Vec<String> = ["kind", "statistic", "n", "seed"].iter().map(|s| s.to_string()).collect();
    for m in METHODS {
        for v in ["m_lip", "j_lip", "m_plain", "j_plain"] {
            cols.push(format!("{v}_{}", m.as_str()));
        }
    }
    cols.extend(
        [
            "complexity_kind",
            "complexity_mean",
            "complexity_se",
            "symmetrization_term",
            "tail_term",
            "delta",
            "total",
            "max_residual",
            "checks",
            "failed_checks",
            "passed",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row(doc: &ResultDocument) -> Vec<String> {
    let mut cells = vec![
        doc.kind.as_str().to_string(),
        doc.statistic.clone().unwrap_or_default(),
        doc.n.to_string(),
        doc.config.seed.to_string(),
    ];
    let picks: [fn(&SeminormReport) -> f64; 4] = [|r| r.m_lip, |r| r.j_lip, |r| r.m_plain, |r| r.j_plain];
    for m in METHODS {
        let report = doc.seminorms.iter().find(|r| r.method == m);
        for pick in picks {
            cells.push(num(report.map(pick)));
        }
    }
    let cert = doc.certificate.as_ref();
    let max_residual = doc
        .residuals
        .iter()
        .map(|r| r.residual.max(r.alternative_residual))
        .reduce(f64::max);
    let kind = doc.complexity.map(|g| match g.kind {
        ComplexityKind::Gaussian => "gaussian",
        ComplexityKind::Rademacher => "rademacher",
    });
    cells.push(kind.unwrap_or_default().to_string());
    cells.push(num(doc.complexity.map(|g| g.mean)));
    cells.push(num(doc.complexity.map(|g| g.std_error)));
    cells.push(num(cert.map(|c| c.symmetrization_term)));
    cells.push(num(cert.map(|c| c.tail_term)));
    cells.push(num(cert.and_then(|c| c.delta)));
    cells.push(num(cert.map(|c| c.total)));
    cells.push(num(max_residual));
    cells.push(doc.checks.len().to_string());
    cells.push(doc.checks.iter().filter(|c| !c.passed).count().to_string());
    cells.push(doc.passed.to_string());
    cells
}

/// One CSV row per result document under a fixed header.
///
/// All documents must share one kind.
pub fn emit_table(results: &[ResultDocument]) -> Result<String> {
    if let Some(first) = results.first() {
        if let Some(other) = results.iter().find(|d| d.kind != first.kind) {
            return Err(Error::MixedKinds(first.kind.as_str().into(), other.kind.as_str().into()));
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(table_columns())?;
    for doc in results {
        writer.write_record(row(doc))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells"))
}
