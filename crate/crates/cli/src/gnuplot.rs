//! Gnuplot script generation: plain-text companions to the CSV output,
//! so figures can be redrawn without any plotting dependency here.

/// Heatmap script for a density CSV (x, y, p rows).
pub fn density_script(csv_file: &str, title: &str) -> String {
    let script = csv_file.replace(".csv", ".gp");
    format!(
        "# gnuplot script; run: gnuplot -p {script}\n\
         set datafile separator ','\n\
         set size ratio -1\n\
         set xlabel 'x (units of sigma)'\n\
         set ylabel 'y (units of sigma)'\n\
         set title '{title}'\n\
         set palette rgbformulae 21,22,23\n\
         plot '{csv_file}' using 1:2:3 with image notitle\n"
    )
}

/// Sweep script: <y> of every particle versus interaction strength with
/// the incoherent baseline, plus a small-d inset.
pub fn sweep_script(csv_file: &str, particles: usize, title: &str, d_max: f64) -> String {
    let mut curves = Vec::new();
    for p in 0..particles {
        // Column layout: d, then (x, y) per particle, then the
        // incoherent (x, y) per particle.
        let y_col = 2 * p + 3;
        curves.push(format!(
            "'{csv_file}' using 1:{y_col} with lines lw 2 title '<y{}>'",
            p + 1
        ));
    }
    let inc_col = 2 * particles + 3;
    curves.push(format!(
        "'{csv_file}' using 1:{inc_col} with lines dt 2 lc 'black' title 'incoherent'"
    ));
    let plot = curves.join(", \\\n     ");
    let inset_max = (d_max / 15.0).max(1e-3);
    let script = csv_file.replace(".csv", ".gp");
    format!(
        "# gnuplot script; run: gnuplot -p {script}\n\
         set datafile separator ','\n\
         set xlabel 'interaction strength d (units of sigma)'\n\
         set ylabel '<y> (units of sigma)'\n\
         set title '{title}'\n\
         set key top left\n\
         set multiplot\n\
         plot {plot}\n\
         # small-d inset\n\
         set origin 0.55, 0.12\n\
         set size 0.4, 0.38\n\
         unset xlabel\n\
         unset ylabel\n\
         unset title\n\
         unset key\n\
         set xrange [0:{inset_max}]\n\
         plot {plot}\n\
         unset multiplot\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_script_references_csv() {
        let s = density_script("density.csv", "d = 0.25");
        assert!(s.contains("'density.csv' using 1:2:3 with image"));
    }

    #[test]
    fn sweep_script_lists_all_particles() {
        let s = sweep_script("sweep.csv", 3, "all at one detector", 1.5);
        assert!(s.contains("using 1:3"));
        assert!(s.contains("using 1:5"));
        assert!(s.contains("using 1:7"));
        assert!(s.contains("using 1:9")); // first incoherent column
        assert!(s.contains("multiplot"));
    }
}
