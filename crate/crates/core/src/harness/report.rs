use std::io::Write;

use super::{ExperimentReport, HarnessError};

pub const CSV_HEADER: [&str; 7] = ["rep", "seed", "omega", "exact", "core_size", "p_n", "elapsed_ms"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Header, one row per replication, then `# summary:` comment lines.
///
/// Empty fields mean "not measured". `elapsed_ms` stays empty unless the
/// config asks for timings, so equal configs give equal bytes.
pub fn write_report_csv<W: Write>(report: &ExperimentReport, mut out: W) -> Result<(), HarnessError> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(CSV_HEADER)?;
        for row in &report.rows {
            let elapsed = if report.config.record_timings { format!("{:.3}", row.elapsed_ms) } else { String::new() };
            w.write_record([
                row.rep.to_string(),
                row.seed.to_string(),
                opt(row.omega),
                opt(row.exact),
                row.core_size.to_string(),
                row.p_n.to_string(),
                elapsed,
            ])?;
        }
        w.flush()?;
    }

    let s = &report.summary;
    let cfg = &report.config;
    let mut lines = vec![
        format!("mode={}", serde_json::to_string(&report.mode).unwrap_or_default().trim_matches('"')),
        format!("kernel_id={}", cfg.kernel.kernel_id()),
        format!("n={}", cfg.n),
        format!("gamma={}", cfg.gamma),
        format!("epsilon={}", cfg.epsilon),
        format!("master_seed={}", cfg.master_seed),
        format!("replications={}", s.replications),
        format!("censored={}", s.censored),
        format!("c={}", s.c),
        format!("delta={}", s.delta),
        format!("p_max={}", s.p_max),
        format!("p_n={}", s.p_n),
        format!("p_gap={}", s.p_max - s.p_n),
        format!("core_mean={}", s.core_mean),
    ];
    if let Some(t) = &report.theory {
        lines.push(format!("kl={}", t.kl));
        lines.push(format!("omega_tilde={}", t.omega_tilde));
        lines.push(format!("refined={}", t.refined));
        if let Ok((lo, hi)) = t.window(cfg.epsilon) {
            lines.push(format!("window={lo}..{hi}"));
        }
    }
    if s.omega_mean.is_some() {
        lines.push(format!("omega_mean={}", opt(s.omega_mean)));
        lines.push(format!("omega_min={}", opt(s.omega_min)));
        lines.push(format!("omega_max={}", opt(s.omega_max)));
    }
    if let Some(f) = s.fraction_in_window {
        lines.push(format!("fraction_in_window={f}"));
    }
    if let Some(f) = s.fraction_in_refined {
        lines.push(format!("fraction_in_refined={f}"));
    }
    if let Some(c) = &s.core_check {
        lines.push(format!("core_q={}", c.q));
        lines.push(format!("core_expected={}", c.expected));
        lines.push(format!("core_sigma={}", c.sigma));
        lines.push(format!("core_within_4_sigma={}", c.within_4_sigma));
    }
    for line in lines {
        writeln!(out, "# summary: {line}")?;
    }
    for row in &report.rows {
        if let Some(w) = row.coupling {
            writeln!(
                out,
                "# coupling: rep={} omega_g={} omega_upper={} omega_core={} omega_core_lower={}",
                row.rep, w.g, w.upper, w.core, w.core_lower
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn report(replications: usize) -> ExperimentReport {
        let cfg = ExperimentConfig {
            kernel: crate::Kernel::constant(0.3).unwrap(),
            n: 25,
            gamma: "3/4".parse().unwrap(),
            epsilon: 0.5,
            replications,
            master_seed: 5,
            budget: DEFAULT_BUDGET,
            delta_override: None,
            mode: Mode::Concentration,
            audit_exact: true,
            record_timings: false,
        };
        run(&cfg, 1).unwrap()
    }

    fn csv_text(r: &ExperimentReport) -> String {
        let mut buf = Vec::new();
        write_report_csv(r, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn two_replications_three_data_lines() {
        let text = csv_text(&report(2));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert_eq!(data[0], "rep,seed,omega,exact,core_size,p_n,elapsed_ms");
        assert!(data[1].ends_with(','), "elapsed_ms left empty: {}", data[1]);
        assert!(text.contains("# summary: refined="));
    }

    #[test]
    fn omegas_round_trip() {
        let r = report(4);
        let text = csv_text(&r);
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let parsed: Vec<usize> = rd.records().map(|rec| rec.unwrap()[2].parse().unwrap()).collect();
        assert_eq!(parsed, r.omegas());
    }

    #[test]
    fn timings_only_on_request() {
        let mut r = report(1);
        r.config.record_timings = true;
        let text = csv_text(&r);
        let row = text.lines().nth(1).unwrap();
        assert!(!row.ends_with(','));
    }
}
