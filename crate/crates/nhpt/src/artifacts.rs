//! CSV and text artifacts of single runs and reference panels.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nhpt_core::dynamics::AmplitudeTrajectory;
use nhpt_core::operators::EigenSystem;
use nhpt_core::scenarios::{Loop, ScenarioResult};
use nhpt_core::Complex64;

use crate::io::{header, indexed, num, write_csv};

/// `t, pop_1..pop_N, norm` per trajectory sample.
pub fn write_populations(path: &Path, traj: &AmplitudeTrajectory) -> Result<()> {
    let n = traj.dim();
    let mut head = header(["t"]);
    head.extend(indexed("pop", n));
    head.push("norm".into());
    let rows = (0..traj.times.len()).map(|k| {
        let mut row = vec![num(traj.times[k])];
        row.extend((0..n).map(|l| num(traj.populations[l][k])));
        row.push(num(traj.norm_at(k)));
        row
    });
    write_csv(path, &head, rows)
}

/// Asymptotic amplitudes c_l(+inf) with level energies.
pub fn write_final_amplitudes(path: &Path, basis: &EigenSystem, traj: &AmplitudeTrajectory) -> Result<()> {
    let head = header(["level", "omega", "re_c", "im_c", "population"]);
    let rows = traj.asymptotic.iter().enumerate().map(|(l, c)| {
        vec![
            (l + 1).to_string(),
            num(basis.omegas()[l]),
            num(c.re),
            num(c.im),
            num(c.norm_sqr()),
        ]
    });
    write_csv(path, &head, rows)
}

/// `t, re_z, im_z` for z(t) = 1 + f(t).
pub fn write_loop(path: &Path, l: &Loop) -> Result<()> {
    let head = header(["t", "re_z", "im_z"]);
    let rows = l
        .times
        .iter()
        .zip(&l.samples)
        .map(|(t, z)| vec![num(*t), num(z.re), num(z.im)]);
    write_csv(path, &head, rows)
}

fn write_eigenvalues(path: &Path, l: &Loop, values: &[Vec<Complex64>]) -> Result<()> {
    let n = values.first().map_or(0, Vec::len);
    let mut head = header(["t"]);
    for k in 1..=n {
        head.push(format!("re_lambda_{k}"));
        head.push(format!("im_lambda_{k}"));
    }
    let rows = l.times.iter().zip(values).map(|(t, ev)| {
        let mut row = vec![num(*t)];
        for v in ev {
            row.push(num(v.re));
            row.push(num(v.im));
        }
        row
    });
    write_csv(path, &head, rows)
}

/// Plain `key = value` summary of a panel run.
pub fn summary_text(r: &ScenarioResult, pulse: &str, expected: Option<String>) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
    kv("label", r.label.clone());
    kv("model", r.model.name().into());
    kv("pulse", pulse.into());
    kv("init", (r.init + 1).to_string());
    kv("winding", r.loop_.winding.to_string());
    kv("min_distance_to_ep", num(r.loop_.min_distance_to_ep));
    kv(
        "windows",
        r.windows.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","),
    );
    kv("window_change", num(r.window_change));
    kv("converged", r.converged.to_string());
    for (l, p) in r.final_populations.iter().enumerate() {
        kv(&format!("population_{}", l + 1), num(*p));
    }
    kv("verdict", r.verdict.to_string());
    if let Some(e) = expected {
        kv("expected", e);
    }
    s
}

/// populations.csv, final_amplitudes.csv, loop.csv, eigenvalues.csv and
/// verdict.txt in `dir`.
pub fn write_scenario(dir: &Path, basis: &EigenSystem, r: &ScenarioResult, summary: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_populations(&dir.join("populations.csv"), &r.trajectory)?;
    write_final_amplitudes(&dir.join("final_amplitudes.csv"), basis, &r.trajectory)?;
    write_loop(&dir.join("loop.csv"), &r.loop_)?;
    write_eigenvalues(&dir.join("eigenvalues.csv"), &r.loop_, &r.instantaneous_eigenvalues)?;
    fs::write(dir.join("verdict.txt"), summary).context("writing verdict.txt")?;
    Ok(())
}

pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot populations and loops written by `nhpt reproduce` or `nhpt simulate`.

usage: python3 plot.py [DIR ...]   (defaults to every subdirectory holding populations.csv)
Writes populations.png and loop.png next to the CSV files.
"""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    return {h: [float(r[i]) for r in body] for i, h in enumerate(head)}


def plot_dir(d):
    pops = read(d / "populations.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    for key in pops:
        if key.startswith("pop_"):
            ax.semilogy(pops["t"], [max(v, 1e-300) for v in pops[key]], label=f"|c_{key[4:]}|^2")
    ax.set_xlabel("t")
    ax.set_ylabel("population")
    ax.legend()
    ax.set_title(d.name)
    fig.tight_layout()
    fig.savefig(d / "populations.png", dpi=150)
    plt.close(fig)

    loop_path = d / "loop.csv"
    if loop_path.exists():
        z = read(loop_path)
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.plot(z["re_z"], z["im_z"])
        ax.plot([0], [0], "k*", label="EP")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend()
        fig.tight_layout()
        fig.savefig(d / "loop.png", dpi=150)
        plt.close(fig)


def main(argv):
    here = pathlib.Path(__file__).resolve().parent
    dirs = [pathlib.Path(a) for a in argv] or sorted(
        p for p in [here, *here.iterdir()] if p.is_dir() and (p / "populations.csv").exists()
    )
    for d in dirs:
        plot_dir(d)
        print(f"wrote plots in {d}")


if __name__ == "__main__":
    main(sys.argv[1:])
"#;
