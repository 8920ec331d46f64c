use crate::error::{Result, TadError};
use crate::eval::grid::GridResult;
use crate::eval::mode::NetType;

pub const REPORT_CSV_HEADER: &str = "type,acc,auc,mcc,n,l,p,p_bar,rrt,rtt";
pub const GRID_CSV_HEADER: &str = "kind,L,N,P,val_mcc,test_acc,test_auc,test_mcc,rrt,rtt";

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub net: NetType,
    pub acc: f64,
    pub auc: f64,
    pub mcc: f64,
    pub neurons: usize,
    pub layers: usize,
    pub params: usize,
    pub mean_params: usize,
    pub rrt: Option<f64>,
    pub rtt: Option<f64>,
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s == "-" || s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| TadError::format("report", format!("bad number `{s}`")))
}

/// Selected models in report order (FNN (nos), (smo), (seq), RNN, LSTM, GRU).
pub fn report_rows(result: &GridResult) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = result
        .selected
        .iter()
        .map(|s| ReportRow {
            net: s.net,
            acc: s.test.acc,
            auc: s.test.auc,
            mcc: s.test.mcc,
            neurons: s.test.neurons,
            layers: s.test.layers,
            params: s.test.params,
            mean_params: s.mean_grid_params,
            rrt: s.test.rrt,
            rtt: s.test.rtt,
        })
        .collect();
    rows.sort_by_key(|r| r.net);
    rows
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut s = format!("{REPORT_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{},{},{},{},{},{}\n",
            r.net.slug(),
            r.acc,
            r.auc,
            r.mcc,
            r.neurons,
            r.layers,
            r.params,
            r.mean_params,
            opt(r.rrt, 6),
            opt(r.rtt, 6)
        ));
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(REPORT_CSV_HEADER) {
        return Err(TadError::format("report", "missing header"));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(TadError::format("report", format!("expected 10 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| TadError::format("report", format!("bad number `{s}`")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| TadError::format("report", format!("bad integer `{s}`")));
            Ok(ReportRow {
                net: f[0].parse()?,
                acc: num(f[1])?,
                auc: num(f[2])?,
                mcc: num(f[3])?,
                neurons: int(f[4])?,
                layers: int(f[5])?,
                params: int(f[6])?,
                mean_params: int(f[7])?,
                rrt: parse_opt(f[8])?,
                rtt: parse_opt(f[9])?,
            })
        })
        .collect()
}

/// Markdown-style aligned table with Performance and Complexity columns.
pub fn render_text(rows: &[ReportRow]) -> String {
    let header = ["Type", "ACC", "AUC", "MCC", "N", "L", "P / P̄", "RRT", "RTT"];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.net.label().to_string(),
                format!("{:.3}", r.acc),
                format!("{:.3}", r.auc),
                format!("{:.3}", r.mcc),
                r.neurons.to_string(),
                r.layers.to_string(),
                format!("{} / {}", r.params, r.mean_params),
                opt(r.rrt, 2),
                opt(r.rtt, 2),
            ]
        })
        .collect();
    let mut widths: [usize; 9] = std::array::from_fn(|i| header[i].chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut s = line(&header.map(String::from));
    s.push_str(&line(&widths.map(|w| "-".repeat(w))));
    for row in &body {
        s.push_str(&line(row));
    }
    s
}

/// Every trained configuration; test columns are filled for selected models.
pub fn render_grid_csv(result: &GridResult) -> String {
    let mut s = format!("{GRID_CSV_HEADER}\n");
    for (i, e) in result.entries.iter().enumerate() {
        let sel = result.selected.iter().find(|x| x.entry == i);
        let t = |f: fn(&crate::eval::evaluate::MetricsReport) -> Option<f64>| sel.and_then(|x| f(&x.test)).map_or_else(String::new, |v| format!("{v:.6}"));
        s.push_str(&format!(
            "{},{},{},{},{:.6},{},{},{},{},{}\n",
            e.net.slug(),
            e.layers,
            e.neurons,
            e.params_count,
            e.val_mcc,
            t(|m| Some(m.acc)),
            t(|m| Some(m.auc)),
            t(|m| Some(m.mcc)),
            t(|m| m.rrt),
            t(|m| m.rtt),
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(net: NetType, mcc: f64) -> ReportRow {
        ReportRow { net, acc: 0.9, auc: 0.95, mcc, neurons: 32, layers: 2, params: 1410, mean_params: 712, rrt: Some(1.0), rtt: None }
    }

    #[test]
    fn rows_follow_table_order() {
        let result = GridResult { entries: vec![], selected: vec![] };
        assert!(report_rows(&result).is_empty());
        let text = render_text(&[]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(render_csv(&[]), format!("{REPORT_CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trips() {
        let rows: Vec<ReportRow> = NetType::ALL.iter().enumerate().map(|(i, &t)| row(t, i as f64 / 8.0)).collect();
        let back = parse_csv(&render_csv(&rows)).unwrap();
        assert_eq!(back, rows);
        let text = render_text(&rows);
        assert_eq!(text.lines().count(), 8);
        let order: Vec<usize> = NetType::ALL.iter().map(|t| text.find(&format!("| {}", t.label())).unwrap()).collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("1410 / 712"));
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_csv("nope\n").is_err());
        assert!(parse_csv(&format!("{REPORT_CSV_HEADER}\nrnn,1,2\n")).is_err());
    }
}
