use hypaccel::oracle::{run_campaign, CampaignSpec};

fn main() {
    for seed in [154u64, 154, 154] {
        let spec = CampaignSpec {
            param_radius: 5.0,
            q: 1,
            count: 1000,
            at_branch: true,
            m: 45,
            epsilon: 2e-14,
            n_max: 2000,
            seed,
        };
        let t = run_campaign(&spec);
        let n = t.classified() as f64;
        let c = t.converged as f64 / n * 100.0;
        let fp = t.false_positive as f64 / n * 100.0;
        let fnr = t.false_negative as f64 / n * 100.0;
        let conv: usize = t.ratio_histogram.iter().sum();
        let w2 = t.ratio_histogram[..3].iter().sum::<usize>() as f64 / conv as f64 * 100.0;
        let w10 = t.ratio_histogram[..5].iter().sum::<usize>() as f64 / conv as f64 * 100.0;
        let le1000 = t.converged_terms_le_1000 as f64 / t.status_converged.max(1) as f64 * 100.0;
        let pass = (75.0..=90.0).contains(&c)
            && fp <= 0.5
            && fnr <= 2.0
            && w2 >= 85.0
            && w10 >= 95.0
            && le1000 >= 99.0;
        println!(
            "seed {seed:2}: C={c:.1} FP={fp:.2} FN={fnr:.2} w2={w2:.1} w10={w10:.1} le1000={le1000:.1} {}",
            if pass { "PASS" } else { "----" }
        );
    }
}
