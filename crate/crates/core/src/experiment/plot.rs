//! Gnuplot script text for the CSV outputs. Nothing here runs gnuplot.

use std::fmt::Write;

use super::config::{ExperimentConfig, ExperimentKind};

// 1-based CSV columns, matching row::HEADER
const COL_LAMBDA: usize = 1;
const COL_W: usize = 2;
const COL_TAU_SPM: usize = 3;
const COL_TAU_NEW: usize = 5;
const COL_TAU_NUM: usize = 6;
const COL_V: usize = 7;

pub fn gnuplot_script(cfg: &ExperimentConfig, data: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    let _ = writeln!(s, "data = '{}'", data.replace('\'', "''"));
    match cfg.kind {
        ExperimentKind::Table1 => {
            s.push_str("set xlabel 'k_M L'\nset ylabel 'E_M t / hbar'\nset y2label 'v (sqrt(V0/2m))'\nset y2tics\n");
            let _ = writeln!(
                s,
                "plot data using {COL_LAMBDA}:{COL_TAU_NUM} with linespoints title 'numerical', \\\n     data using {COL_LAMBDA}:{COL_TAU_NEW} with lines title 'moment formula', \\\n     data using {COL_LAMBDA}:{COL_V} axes x1y2 with linespoints title 'v_transit'"
            );
        }
        ExperimentKind::Fig1 => {
            s.push_str("set xlabel 'k_M L'\nset ylabel 'v (sqrt(V0/2m))'\n");
            let series: Vec<String> = cfg
                .w
                .iter()
                .map(|w| {
                    format!(
                        "data using {COL_LAMBDA}:(abs(${COL_W} - {w:.9e}) < 1e-9 ? ${COL_V} : 1/0) with linespoints title 'V0/E_M = {:.3}'",
                        w * w
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
        }
        ExperimentKind::Fig2 => {
            s.push_str("set xlabel 'sqrt(V0/E_M)'\nset ylabel 'E_M t / hbar'\nset logscale y\n");
            let _ = writeln!(
                s,
                "plot data using {COL_W}:{COL_TAU_SPM} with lines title 'stationary phase', \\\n     data using {COL_W}:{COL_TAU_NEW} with lines title 'moment formula', \\\n     data using {COL_W}:{COL_TAU_NUM} with points title 'numerical'"
            );
        }
        ExperimentKind::Single => {
            let trace = cfg.trace_path();
            let _ = writeln!(s, "trace = '{}'", trace.display().to_string().replace('\'', "''"));
            s.push_str("set xlabel 'E_M t / hbar'\nset ylabel '|Phi_T(L,t)|^2'\n");
            let _ = writeln!(s, "stats data using {COL_TAU_NUM} name 'peak' nooutput");
            s.push_str("set arrow from peak_max, graph 0 to peak_max, graph 1 nohead dt 2\n");
            s.push_str("plot trace using 1:2 with lines title 'exit density'\n");
        }
    }
    s
}
