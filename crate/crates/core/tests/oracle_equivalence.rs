use cobordia::cobordism::{CobordismError, CobordismReport};
use cobordia::complex::{Block, FilteredComplex};
use cobordia::fixtures;
use cobordia::kernel::kernel_pairs;
use cobordia::oracle::{self, OracleBar};

fn algorithm_bars(report: &CobordismReport) -> Vec<OracleBar> {
    let mut bars: Vec<OracleBar> = report
        .pairs
        .iter()
        .map(|b| OracleBar {
            degree: b.degree,
            birth_position: b.birth_position,
            death_position: b.death_position,
        })
        .collect();
    bars.sort();
    bars
}

fn check(c: &FilteredComplex) -> Result<(), String> {
    let report = CobordismReport::compute(c).map_err(|e: CobordismError| e.to_string())?;
    let expected = oracle::oracle_barcode(c).unwrap();
    let got = algorithm_bars(&report);
    if got != expected {
        return Err(format!("barcode {got:?} != oracle {expected:?}"));
    }
    Ok(())
}

#[test]
fn random_complexes_match_the_oracle() {
    let failures: Vec<String> = (0..300)
        .filter_map(|seed| {
            check(&fixtures::random_complex(seed))
                .err()
                .map(|e| format!("seed {seed}: {e}"))
        })
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn kernel_living_counts_match_the_oracle() {
    for seed in 0..100 {
        let c = fixtures::random_complex(seed);
        for block in Block::ALL {
            let kp = kernel_pairs(&c, block).unwrap();
            for step in 0..c.len() {
                let dims = oracle::kernel_dims(&c, step, block);
                for (k, &d) in dims.iter().enumerate() {
                    assert_eq!(kp.living(k, step), d, "seed {seed} {block} step {step} degree {k}");
                }
            }
        }
    }
}

#[test]
fn finite_bars_have_valid_representatives() {
    for seed in 0..300 {
        let c = fixtures::random_complex(seed);
        let report = CobordismReport::compute(&c).unwrap();
        for bar in report.pairs.iter().filter(|b| !b.is_infinite()) {
            let death = bar.death_cell.unwrap();
            let step = bar.death_position.unwrap() - 1;
            let rep = report.representative_before_death(&c, death).unwrap();
            let check = oracle::check_cobordism_boundary(&c, &rep, step);
            assert!(check.holds(), "seed {seed} bar {bar:?}: {check:?}");
        }
    }
}
