// Scratch calibration runs for the statistical acceptance thresholds.

use ewens_cli::fastpat;
use ewens_cli::mc::{bootstrap_k_se, k_statistics, run_map, RunConfig};
use ewens_core::stats::theoretical;
use ewens_core::{rat, rat_int};
use num_traits::ToPrimitive;

fn main() {
    profile_moments();
    pattern_moments();
}

fn profile_moments() {
    const N: usize = 1000;
    const SAMPLES: usize = 1_000_000;
    let theta = rat_int(1);
    let xs = [0.25f64, 0.5, 0.75];
    let ms: Vec<usize> = xs.iter().map(|x| (x * N as f64) as usize).collect();
    let cfg = RunConfig::new(N, 1.0, SAMPLES, 20250810);
    let values: Vec<[f64; 3]> = run_map(&cfg, |sigma| {
        let mut prefix = [0usize; 3];
        let mut acc = 0usize;
        let mut next = 0usize;
        for i in 1..=N {
            if sigma.image(i) >= i {
                acc += 1;
            }
            while next < 3 && i == ms[next] {
                prefix[next] = acc;
                next += 1;
            }
        }
        [
            prefix[0] as f64 / N as f64,
            prefix[1] as f64 / N as f64,
            prefix[2] as f64 / N as f64,
        ]
    })
    .unwrap();
    for (k, &x) in xs.iter().enumerate() {
        let m = ms[k];
        let exact_mean = theoretical::f_mean_exact(N, &theta, m).to_f64().unwrap();
        let limit = theoretical::f_limit(x);
        let f: Vec<f64> = values.iter().map(|v| v[k]).collect();
        let z: Vec<f64> = f
            .iter()
            .map(|&v| (N as f64).sqrt() * (v - exact_mean))
            .collect();
        let kf = k_statistics(&f);
        let kz = k_statistics(&z);
        let se = bootstrap_k_se(&z, 99 + k as u64);
        let se_mean_1e5 = (kf[1] / 1e5).sqrt();
        println!("x={x}: mean(F)={:.8} exact={exact_mean:.8} limit={limit:.8}", kf[0]);
        println!(
            "  bias(exact-limit)={:+.3e}  4*SE(mean@1e5)={:.3e}  ratio={:.2}",
            exact_mean - limit,
            4.0 * se_mean_1e5,
            (exact_mean - limit).abs() / se_mean_1e5
        );
        println!(
            "  K(x,x)={:.6} k2(Z)={:.6}",
            theoretical::exceedance_covariance_kernel_f64(x, x),
            kz[1]
        );
        println!(
            "  k3(Z)={:+.6e} se@1e6={:.2e} (|k3|/se@1e5={:.2})",
            kz[2],
            se[2],
            kz[2].abs() / (se[2] * (10f64).sqrt())
        );
        println!(
            "  k4(Z)={:+.6e} se@1e6={:.2e} (|k4|/se@1e5={:.2})",
            kz[3],
            se[3],
            kz[3].abs() / (se[3] * (10f64).sqrt())
        );
    }
}

fn pattern_moments() {
    let patterns: Vec<(&str, Vec<usize>, Vec<usize>)> = vec![
        ("inv", vec![2, 1], vec![]),
        ("des", vec![2, 1], vec![1]),
        ("v132", vec![1, 3, 2], vec![1]),
        ("inc3", vec![1, 2, 3], vec![]),
    ];
    for theta in [1.0f64, 2.0] {
        for n in [200usize, 800] {
            for (name, word, x) in &patterns {
                let pat =
                    ewens_core::stats::DashedPattern::from_word(word.clone(), x).unwrap();
                let counter = fastpat::pattern_counter(&pat);
                let p = pat.size() as i32;
                let q = pat.num_adjacencies() as i32;
                let mean_limit = theoretical::dashed_mean_limit(
                    pat.size(),
                    pat.num_adjacencies(),
                )
                .to_f64()
                .unwrap();
                const SAMPLES: usize = 4000;
                let cfg = RunConfig::new(n, theta, SAMPLES, 777);
                let scale = (n as f64).powi(p - q);
                let z: Vec<f64> = run_map(&cfg, |sigma| {
                    (n as f64).sqrt() * (counter(sigma) as f64 / scale - mean_limit)
                })
                .unwrap();
                let k = k_statistics(&z);
                let se = bootstrap_k_se(&z, 3);
                println!(
                    "theta={theta} N={n} {name}: mean(Z)={:+.4} (se {:.4}) k2={:.5} k3/se={:+.2} k4/se={:+.2}",
                    k[0],
                    (k[1] / SAMPLES as f64).sqrt(),
                    k[1],
                    k[2] / se[2],
                    k[3] / se[3],
                );
            }
        }
    }
}
