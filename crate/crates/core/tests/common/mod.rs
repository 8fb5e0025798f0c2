//! Closed-form and limiting-case examples shared by the `trivial` and
//! `acceptance` test targets. Each check returns `(name, passed)`.

#![allow(dead_code)]

use corrconv::channel::{
    channel_llr, draw_gain, draw_sources, transmit, trial_rng, ChannelParams, ObservationSeq,
};
use corrconv::code::{canonical_key, is_catastrophic, CodeSpec, PolyGF2};
use corrconv::decode::{sova, viterbi_hard, ProbSequence};
use corrconv::joint::{
    decode_joint_llr, effective_correlation, genie_prior, mix_apriori, JointConfig,
};
use corrconv::pep::{
    averaged_pep, bit_error_bound, conditional_pep, hagenauer_pep, joint_entropy,
    packet_error_bound, uncoded_exact_pe, PepParams,
};
use corrconv::search::{search_optimal, SearchSpec};
use corrconv::sim::{
    bound_overlay, estimate_per, wilson_interval, OverlayConfig, Scheme, SimConfig, StopRule,
};
use corrconv::spectrum::spectrum_with_offset;
use corrconv::Fading;
use libm::erfc;
use num_complex::Complex64;
use rand::Rng;

pub fn codes() -> Vec<CodeSpec> {
    vec![
        CodeSpec::c80(),
        CodeSpec::c90(),
        CodeSpec::c95(),
        CodeSpec::nonrecursive_nu3(),
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

fn noisy(c: &[u8], gamma_b: f64, seed: u64) -> Vec<f64> {
    let p = ChannelParams::new(Fading::Awgn, 0.5, gamma_b).unwrap();
    let obs = transmit(c, &p, Complex64::new(1.0, 0.0), &mut trial_rng(seed, 0, 0));
    channel_llr(&obs, &p)
}

fn noiseless(c: &[u8], amp: f64) -> Vec<f64> {
    c.iter().map(|&b| if b == 0 { amp } else { -amp }).collect()
}

fn random_bits(k: usize, seed: u64) -> Vec<u8> {
    let mut r = trial_rng(seed, 9, 9);
    (0..k).map(|_| r.random::<bool>() as u8).collect()
}

pub fn trivial_checks() -> Vec<(&'static str, bool)> {
    let mut out: Vec<(&'static str, bool)> = Vec::new();
    let mut check = |name, ok| out.push((name, ok));

    // encoder
    check(
        "state 0, input 0 -> state 0, output 00",
        codes().iter().all(|c| {
            let t = c.trellis();
            t.next_state(0, 0) == 0 && t.output(0, 0) == 0
        }),
    );
    check(
        "all-zero input -> all-zero output",
        codes()
            .iter()
            .all(|c| c.encode(&[0; 30], true).iter().all(|&b| b == 0)),
    );
    let zero = PolyGF2::zero(4).unwrap();
    check(
        "g1 = g2 = 0 is catastrophic",
        is_catastrophic(&CodeSpec::new(zero, zero, PolyGF2::from_binary("1011").unwrap()).unwrap())
            && is_catastrophic(&CodeSpec::new(zero, zero, zero).unwrap()),
    );
    let a = CodeSpec::parse("1011", "1101", "1111", 3).unwrap();
    let b = CodeSpec::parse("1101", "1011", "1111", 3).unwrap();
    let c = CodeSpec::parse("1011", "1101", "1001", 3).unwrap();
    check("swapped generators share a key", canonical_key(&a) == canonical_key(&b));
    check("different feedback -> different keys", canonical_key(&a) != canonical_key(&c));

    // sources and channel
    let mut rng = trial_rng(3, 3, 3);
    let full = draw_sources(10_000, 1.0, &mut rng).unwrap();
    check("rho = 1 -> y = x", full.x == full.y);
    let n = 1_000_000;
    let half = draw_sources(n, 0.5, &mut rng).unwrap();
    let agree = half.x.iter().zip(&half.y).filter(|(x, y)| x == y).count() as f64 / n as f64;
    check("rho = 0.5 -> agreement 0.5 within 3 sigma", (agree - 0.5).abs() < 3.0 * 0.5 / (n as f64).sqrt());
    let awgn = ChannelParams::new(Fading::Awgn, 0.5, 2.0).unwrap();
    check("awgn -> |alpha|^2 = 1", (0..100).all(|_| draw_gain(&awgn, &mut rng).norm_sqr() == 1.0));
    let bits = random_bits(5000, 1);
    let strong = ChannelParams::new(Fading::Awgn, 0.5, 1e14).unwrap();
    let obs = transmit(&bits, &strong, Complex64::new(1.0, 0.0), &mut rng);
    check(
        "vanishing noise -> sign(u) recovers the symbols",
        obs.u.iter().zip(&bits).all(|(&u, &b)| (u < 0.0) == (b == 1)),
    );
    let silent = ChannelParams::new(Fading::Awgn, 0.5, 0.0).unwrap();
    let m = 200_000;
    let obs = transmit(&vec![0; m], &silent, Complex64::new(1.0, 0.0), &mut rng);
    let mean = obs.u.iter().sum::<f64>() / m as f64;
    check("xi_c = 0 -> zero-mean noise", mean.abs() < 4.0 / (m as f64).sqrt());
    let one = Complex64::new(1.0, 0.0);
    let zero_obs = ObservationSeq { u: vec![0.0; 8], gain: one };
    check("u = 0 -> zero LLRs", channel_llr(&zero_obs, &awgn).iter().all(|&l| l == 0.0));
    let obs = ObservationSeq { u: vec![0.3, -1.2, 2.0], gain: one };
    let scaled = ObservationSeq { u: obs.u.iter().map(|u| 2.5 * u).collect(), gain: one };
    check(
        "scaling u scales LLRs",
        channel_llr(&obs, &awgn)
            .iter()
            .zip(channel_llr(&scaled, &awgn))
            .all(|(a, b)| close(b, 2.5 * a, 1e-12)),
    );

    // decoders
    check(
        "noiseless LLRs -> exact recovery",
        codes().iter().all(|c| {
            let t = c.trellis();
            let info = random_bits(60, 2);
            let llr = noiseless(&t.encode(&info, true), 1.0);
            viterbi_hard(&t, &llr, true).unwrap() == info
                && sova(&t, &llr, &ProbSequence::uniform(60), true).unwrap().hard == info
        }),
    );
    check(
        "all-zero LLRs -> all-zero info",
        codes().iter().all(|c| {
            let t = c.trellis();
            [true, false].iter().all(|&term| {
                let llr = vec![0.0; t.coded_len(20, term)];
                viterbi_hard(&t, &llr, term).unwrap() == vec![0; 20]
                    && sova(&t, &llr, &ProbSequence::uniform(20), term).unwrap().hard == vec![0; 20]
            })
        }),
    );
    check(
        "noiseless LLRs with bounded prior -> exact recovery",
        codes().iter().all(|c| {
            let t = c.trellis();
            let info = random_bits(60, 4);
            let llr = noiseless(&t.encode(&info, true), 1e3);
            let prior: Vec<f64> = info.iter().map(|&b| if b == 1 { 0.05 } else { 0.95 }).collect();
            sova(&t, &llr, &ProbSequence::new(prior), true).unwrap().hard == info
        }),
    );

    // joint loop
    let mix = |p: f64, rho: f64| mix_apriori(&ProbSequence::new(vec![p]), rho).get(0);
    check("mix(1.0, 0.9) = 0.9", close(mix(1.0, 0.9), 0.9, 1e-10));
    check("mix(0.5, rho) = 0.5", [0.5, 0.7, 0.9, 1.0].iter().all(|&r| mix(0.5, r) == 0.5));
    check("mix(0.0, 0.8) = 0.2", close(mix(0.0, 0.8), 0.2, 1e-10));

    let t = CodeSpec::c95().trellis();
    let pair = draw_sources(80, 0.5, &mut rng).unwrap();
    let lx = noisy(&t.encode(&pair.x, true), 1.0, 5);
    let ly = noisy(&t.encode(&pair.y, true), 1.0, 6);
    let jr = decode_joint_llr(&t, &lx, &ly, &JointConfig::new(0.5)).unwrap();
    let sx = sova(&t, &lx, &ProbSequence::uniform(80), true).unwrap();
    let sy = sova(&t, &ly, &ProbSequence::uniform(80), true).unwrap();
    check(
        "rho = 0.5 joint = independent uniform SOVA = viterbi_hard",
        jr.x_hat == sx.hard
            && jr.y_hat == sy.hard
            && sx.hard == viterbi_hard(&t, &lx, true).unwrap()
            && sy.hard == viterbi_hard(&t, &ly, true).unwrap(),
    );
    let pair = draw_sources(80, 0.9, &mut rng).unwrap();
    let cfg1 = JointConfig { iterations: 1, ..JointConfig::new(0.9) };
    let r1 = decode_joint_llr(
        &t,
        &noiseless(&t.encode(&pair.x, true), 5.0),
        &noiseless(&t.encode(&pair.y, true), 5.0),
        &cfg1,
    )
    .unwrap();
    check(
        "noiseless links -> exact recovery in 1 iteration",
        r1.iterations_run == 1 && r1.x_hat == pair.x && r1.y_hat == pair.y,
    );
    let gp = genie_prior(&pair.y, 1.0);
    check(
        "rho = 1 genie prior saturates toward the partner bits",
        gp.hard() == pair.y && gp.as_slice().iter().all(|&p| p < 1e-9 || p > 1.0 - 1e-9),
    );
    let g5 = genie_prior(&pair.y, 0.5);
    check(
        "rho = 0.5 genie = uniform-prior SOVA",
        sova(&t, &lx, &g5, true).unwrap() == sova(&t, &lx, &ProbSequence::uniform(80), true).unwrap(),
    );
    {
        let mut genie = SimConfig::new(Scheme::Genie, CodeSpec::c95(), 1.0, 100, vec![0.5]);
        genie.stop = StopRule { max_packets: 1500, max_errors: 1_000_000, target_ci_half_width: None };
        let joint = SimConfig { scheme: Scheme::JointRecursive, ..genie.clone() };
        let g = estimate_per(&genie).unwrap().points[0].per_avg;
        let j = estimate_per(&joint).unwrap().points[0].per_avg;
        check("rho = 1 genie PER <= joint PER", g <= j);
    }
    check("p_b = 0 -> rho' = rho", effective_correlation(0.9, 0.0).unwrap() == 0.9);
    check("p_b = 0.5 -> rho' = 0.5", close(effective_correlation(0.9, 0.5).unwrap(), 0.5, 1e-15));

    // PEP
    let classical = |dz: u32, g: f64| 0.5 * erfc((0.5 * dz as f64 * g).sqrt());
    let p05 = PepParams::new(0.5, 0.5, 1.7).unwrap();
    check(
        "rho = 0.5 conditional PEP is classical for any j",
        (0..=4).all(|j| close(conditional_pep(7, 4, j, &p05).unwrap(), classical(7, 1.7), 1e-14)),
    );
    let p9 = PepParams::new(0.5, 0.9, 1.7).unwrap();
    check(
        "d_x = 0 conditional PEP is classical",
        close(conditional_pep(7, 0, 0, &p9).unwrap(), classical(7, 1.7), 1e-14),
    );
    check(
        "d_x = 0 averaged PEP is classical",
        close(averaged_pep(7, 0, &p9).unwrap(), classical(7, 1.7), 1e-14),
    );
    check(
        "r = 1, d_z = d_x = 1 averaged PEP = uncoded exact",
        [0.6, 0.8, 0.95].iter().all(|&rho| {
            let p = PepParams::new(1.0, rho, 1.3).unwrap();
            close(averaged_pep(1, 1, &p).unwrap(), uncoded_exact_pe(1.3, rho), 1e-13)
        }),
    );
    check(
        "rho = 0.5 Hagenauer PEP = averaged PEP",
        close(hagenauer_pep(6, 3, &p05).unwrap(), averaged_pep(6, 3, &p05).unwrap(), 1e-14),
    );
    check(
        "d_x = 0 Hagenauer PEP = averaged PEP",
        close(hagenauer_pep(6, 0, &p9).unwrap(), averaged_pep(6, 0, &p9).unwrap(), 1e-14),
    );
    check("uncoded rho = 0.5 -> 0.5 erfc(sqrt(gamma))", close(uncoded_exact_pe(2.0, 0.5), 0.5 * erfc(2f64.sqrt()), 1e-14));
    check(
        "uncoded rho -> 1 tends to 0",
        uncoded_exact_pe(1.0, 1.0 - 1e-9) < 1e-5 && uncoded_exact_pe(1.0, 1.0) == 0.0,
    );

    // spectrum and bounds
    let spectra: Vec<_> = codes()
        .iter()
        .map(|c| spectrum_with_offset(&c.trellis(), 6).unwrap())
        .collect();
    check(
        "sum_w beta(w, d_free) >= 1",
        spectra
            .iter()
            .all(|s| s.iter().filter(|&(_, d, _)| d == s.d_free()).map(|(_, _, c)| c).sum::<u64>() >= 1),
    );
    let s = &spectra[1];
    let p = PepParams::new(0.5, 0.5, 1.5).unwrap();
    let bit_classical: f64 = s.iter().map(|(w, d, c)| c as f64 * w as f64 * classical(d, 1.5)).sum();
    let pkt_classical: f64 = s.iter().map(|(_, d, c)| c as f64 * 100.0 * classical(d, 1.5)).sum();
    check("rho = 0.5 bit bound is classical", close(bit_error_bound(s, &p).value, bit_classical, 1e-12));
    check("rho = 0.5 packet bound is classical", close(packet_error_bound(s, &p, 100).value, pkt_classical, 1e-12));
    check(
        "doubling l_pkt doubles the bound",
        packet_error_bound(s, &p9, 200).value == 2.0 * packet_error_bound(s, &p9, 100).value,
    );
    check("joint entropy rho = 0.5 -> 2", joint_entropy(0.5) == 2.0);
    check("joint entropy rho = 1 -> 1", joint_entropy(1.0) == 1.0);

    // search
    let single = search_optimal(&SearchSpec::new(2, vec![3.0], 0.9, 100)).unwrap();
    check("single-point grid -> one winner", single.winner().is_some());

    // harness
    check(
        "infinite SNR -> zero errors for every scheme",
        Scheme::ALL.iter().all(|&scheme| {
            let code = if scheme == Scheme::JointRecursive {
                CodeSpec::c95()
            } else {
                CodeSpec::nonrecursive_nu3()
            };
            let mut cfg = SimConfig::new(scheme, code, 0.9, 100, vec![80.0]);
            cfg.stop.max_packets = 200;
            let r = estimate_per(&cfg).unwrap();
            r.points[0].err_x + r.points[0].err_y == 0
        }),
    );
    let mut cfg = SimConfig::new(Scheme::JointRecursive, CodeSpec::c90(), 0.9, 100, vec![1.0, 2.0]);
    cfg.stop.max_packets = 300;
    check("same seed -> identical SimResult", estimate_per(&cfg).unwrap() == estimate_per(&cfg).unwrap());
    let (lo, hi) = wilson_interval(0, 500);
    let z2 = 1.959_963_984_540_054f64.powi(2);
    check("zero errors -> Wilson [0, z^2/(n+z^2)]", lo == 0.0 && close(hi, z2 / (500.0 + z2), 1e-12));
    {
        let stop = StopRule { max_packets: 400, max_errors: 1_000_000, target_ci_half_width: None };
        let ov = bound_overlay(&OverlayConfig {
            code: CodeSpec::nonrecursive_nu3(),
            rho: 0.5,
            l_pkt: 100,
            gamma_b_grid: vec![2.0, 3.0],
            stop,
            seed: 4,
            d_max_offset: 10,
        })
        .unwrap();
        let vit = SimConfig { stop, seed: 4, ..SimConfig::new(Scheme::Unjoint, CodeSpec::nonrecursive_nu3(), 0.5, 100, vec![2.0, 3.0]) };
        let vit = estimate_per(&vit).unwrap();
        let spec = spectrum_with_offset(&CodeSpec::nonrecursive_nu3().trellis(), 10).unwrap();
        check(
            "rho = 0.5 overlay = classical bound vs Viterbi",
            ov.iter().zip(&vit.points).all(|(o, v)| {
                let g = corrconv::db_to_linear(o.point.gamma_b_db);
                let classical: f64 = spec.iter().map(|(_, d, c)| c as f64 * 100.0 * classical(d, g)).sum();
                o.point.err_x == v.err_x && o.point.err_y == v.err_y && close(o.packet_bound, classical, 1e-12)
            }),
        );
    }
    out
}
