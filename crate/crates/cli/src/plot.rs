//! Gnuplot scripts referencing the CSV outputs.

use std::fmt::Write as _;

/// Fluid density against depth, one curve per sampled time.
pub fn profiles(csv: &str, nx: usize, ts: &[f64]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset xlabel 'x'\nset ylabel 'm_f'\nset key outside\n",
    );
    let _ = writeln!(s, "nx = {nx}");
    let times: Vec<String> = ts.iter().map(|t| format!("{t:?}")).collect();
    let _ = writeln!(s, "array T[{}] = [{}]", ts.len(), times.join(", "));
    let _ = writeln!(
        s,
        "plot for [i=0:{}] '{csv}' skip 1 every ::i*nx::(i+1)*nx-1 using 1:5 with lines title sprintf('t = %g', T[i+1])",
        ts.len() - 1
    );
    s
}

pub const SPECTRUM: &str = "set datafile separator ','
set xlabel 'k'
set ylabel '-lambda_k'
set logscale y
plot 'spectrum.csv' skip 1 using 1:(-$2) with linespoints title 'eigenvalues'
";

pub const COMPARE: &str = "set datafile separator ','
set xlabel 't'
set logscale y
plot 'compare.csv' skip 1 using 1:2 with linespoints title 'sup full', \\
     '' skip 1 using 1:3 with linespoints title 'sup interior'
";

pub const SWEEP: &str = "set datafile separator ','
set xlabel 'p0'
set ylabel 'lambda_1'
set xzeroaxis
plot 'sweep.csv' skip 1 using 1:3 with linespoints title 'first eigenvalue'
";
