use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use uplane::engine::{engine_for, table_precision, z_table, Group, LatticeSetup, TableRequest, Target};
use uplane::maass::MaassData;
use uplane::qseries::LinearForm;

#[test]
fn coefficients_survive_a_wider_window() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for target in [Target::Cp2, Target::Cp2Hat, Target::P1xP1] {
        for group in [Group::So3, Group::Su2] {
            let setup = LatticeSetup::for_target(target, group);
            let mut req = TableRequest {
                max_p: 3,
                max_kappa: 5,
                mu_degree: 5,
                precision: None,
            };
            let base = z_table::<LinearForm>(
                &engine_for(&setup, &req, MaassData::default()).unwrap(),
                &setup,
                group,
                &req,
            )
            .unwrap();
            req.precision = Some(table_precision(&setup, &req) + 8);
            let wide = z_table::<LinearForm>(
                &engine_for(&setup, &req, MaassData::default()).unwrap(),
                &setup,
                group,
                &req,
            )
            .unwrap();
            assert_eq!(wide.precision, base.precision + 8);
            let mut keys: Vec<&Vec<u32>> = base.entries.keys().collect();
            keys.shuffle(&mut rng);
            for k in keys.into_iter().take(12) {
                assert_eq!(base.entries[k], wide.entries[k], "{target} {group} {k:?}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 50, "{checked}");
}
