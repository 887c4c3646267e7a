//! gnuplot scripts for the figure CSVs.

use std::path::Path;

fn quoted(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', "''"))
}

fn preamble(csv: &Path, png: &Path, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead left top\n\
         set terminal pngcairo size 800,600\n\
         set output {}\n\
         set title '{title}'\n\
         set grid\n\
         data = {}\n",
        quoted(png),
        quoted(csv)
    )
}

/// Bound, COD MMI and capacity (with 3 sigma error bars) against M = N.
pub fn fig1_script(csv: &Path, png: &Path) -> String {
    preamble(csv, png, "Upper bound of MMI vs exact COD MMI")
        + "set xlabel 'M = N'\n\
           set ylabel 'bits per channel use'\n\
           plot data using 1:6 with linespoints title 'SSDD upper bound', \\\n\
           \x20    data using 1:10 with linespoints title 'COD MMI', \\\n\
           \x20    data using 1:14:(3*$15) with yerrorlines title 'capacity'\n"
}

/// Necessary symbol rate against M = N, one curve per SNR.
pub fn fig2_script(csv: &Path, png: &Path) -> String {
    preamble(csv, png, "Necessary symbol rate for the bound to reach capacity")
        + "set xlabel 'M = N'\n\
           set ylabel 'symbol rate'\n\
           snrs = system(\"tail -n +2 \".data.\" | cut -d, -f3 | sort -gu | tr '\\n' ' '\")\n\
           plot for [s in snrs] data using 1:($3 == s ? $5 : 1/0) with linespoints title s.' dB', \\\n\
           \x20    0.75 with lines dashtype 2 title 'rate 3/4'\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_reference_inputs() {
        let s = fig1_script(Path::new("a'b.csv"), Path::new("out.png"));
        assert!(s.contains("data = 'a''b.csv'"));
        assert!(s.contains("set output 'out.png'"));
        assert!(fig2_script(Path::new("f.csv"), Path::new("f.png")).contains("0.75"));
    }
}
