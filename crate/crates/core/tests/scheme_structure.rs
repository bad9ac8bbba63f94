//! Structural facts about the enhanced scheme's exact output statistics,
//! frozen from an independent hand expansion of the interferometer algebra.
//!
//! Notation for patterns is (dH, dV, fH, fV, gH, gV).

use std::collections::BTreeSet;

use bsm_core::fock::FockState;
use bsm_core::schemes::{
    build_classifier, ideal_distribution, ideal_distributions, BellKind, Label, SchemeKind,
    TABLE_TOLERANCE,
};

fn p(pattern: &[u8]) -> FockState {
    FockState::from_slice(pattern)
}

fn d_total(pattern: &FockState) -> u32 {
    (pattern.get(0) + pattern.get(1)) as u32
}

#[test]
fn psi_minus_always_places_one_photon_on_the_unmixed_path() {
    let dist = ideal_distribution(SchemeKind::Enhanced, BellKind::PsiMinus);
    assert_eq!(dist.len(), 20);
    for (pattern, prob) in &dist {
        assert_eq!(d_total(pattern), 1, "{pattern}");
        assert_eq!(pattern.total() - d_total(pattern), 3, "{pattern}");
        assert!(*prob > 0.0);
    }
}

#[test]
fn psi_plus_splits_between_pair_sector_and_mixed_sector() {
    let dist = ideal_distribution(SchemeKind::Enhanced, BellKind::PsiPlus);
    assert_eq!(dist.len(), 22);
    let pair_sector: Vec<_> = dist.keys().filter(|k| d_total(k) == 2).collect();
    let mixed_sector: Vec<_> = dist.keys().filter(|k| d_total(k) == 0).collect();
    assert_eq!(pair_sector.len(), 6);
    assert_eq!(mixed_sector.len(), 16);
    for key in pair_sector {
        assert_eq!((key.get(0), key.get(1)), (1, 1), "one photon each polarization: {key}");
    }
    for key in mixed_sector {
        let pol_h = key.get(2) + key.get(4);
        assert!(pol_h == 1 || pol_h == 3, "odd polarization split: {key}");
    }
}

/// The patterns both Phi states can produce with no photon on the unmixed
/// path: four single-mode four-photon bunches at 3/64 and two same-polarization
/// double-pair patterns at 1/32. Everything in this family must be ambiguous.
#[test]
fn phi_overlap_family_in_the_four_photon_sector() {
    let table = build_classifier(SchemeKind::Enhanced, TABLE_TOLERANCE);
    let plus = ideal_distribution(SchemeKind::Enhanced, BellKind::PhiPlus);
    let minus = ideal_distribution(SchemeKind::Enhanced, BellKind::PhiMinus);

    let family = [
        (p(&[0, 0, 4, 0, 0, 0]), 3.0 / 64.0),
        (p(&[0, 0, 0, 4, 0, 0]), 3.0 / 64.0),
        (p(&[0, 0, 0, 0, 4, 0]), 3.0 / 64.0),
        (p(&[0, 0, 0, 0, 0, 4]), 3.0 / 64.0),
        (p(&[0, 0, 2, 0, 2, 0]), 1.0 / 32.0),
        (p(&[0, 0, 0, 2, 0, 2]), 1.0 / 32.0),
    ];

    let overlap: BTreeSet<FockState> = plus
        .keys()
        .filter(|k| d_total(k) == 0 && minus.contains_key(*k))
        .cloned()
        .collect();
    let expected: BTreeSet<FockState> = family.iter().map(|(k, _)| k.clone()).collect();
    assert_eq!(overlap, expected);

    for (pattern, prob) in &family {
        assert!((plus[pattern] - prob).abs() < 1e-12, "{pattern} under phi+");
        assert!((minus[pattern] - prob).abs() < 1e-12, "{pattern} under phi-");
        assert_eq!(table.classify(pattern).unwrap(), Label::Ambiguous, "{pattern}");
    }
}

/// With two photons bunched on the unmixed path the auxiliary pair carries no
/// information, so that whole sector (half the mass of each Phi state) is
/// shared and ambiguous.
#[test]
fn phi_bunched_sector_carries_half_the_mass_and_stays_ambiguous() {
    let table = build_classifier(SchemeKind::Enhanced, TABLE_TOLERANCE);
    let plus = ideal_distribution(SchemeKind::Enhanced, BellKind::PhiPlus);
    let minus = ideal_distribution(SchemeKind::Enhanced, BellKind::PhiMinus);
    for dist in [&plus, &minus] {
        let sector: Vec<_> = dist.iter().filter(|(k, _)| d_total(k) == 2).collect();
        assert_eq!(sector.len(), 12);
        let mass: f64 = sector.iter().map(|(_, p)| **p).sum();
        assert!((mass - 0.5).abs() < 1e-12);
        for (pattern, _) in sector {
            assert!(pattern.get(0) == 2 || pattern.get(1) == 2, "{pattern}");
            assert_eq!(table.classify(pattern).unwrap(), Label::Ambiguous);
        }
    }
    assert_eq!(plus.len(), 23);
    assert_eq!(minus.len(), 22);
}

#[test]
fn every_pattern_shared_between_inputs_is_ambiguous() {
    let table = build_classifier(SchemeKind::Enhanced, TABLE_TOLERANCE);
    let dists = ideal_distributions(SchemeKind::Enhanced);
    let mut all: BTreeSet<FockState> = BTreeSet::new();
    for dist in dists.values() {
        all.extend(dist.keys().cloned());
    }
    for pattern in &all {
        let producers: Vec<BellKind> = BellKind::ALL
            .iter()
            .copied()
            .filter(|k| dists[k].get(pattern).copied().unwrap_or(0.0) > TABLE_TOLERANCE)
            .collect();
        let label = table.classify(pattern).unwrap();
        match producers.len() {
            1 => assert_eq!(label, Label::Bell(producers[0]), "{pattern}"),
            _ => assert_eq!(label, Label::Ambiguous, "{pattern}"),
        }
    }
}

/// Union of the four supports, frozen from the hand expansion:
/// 22 + 20 + 23 + 22 patterns with 18 shared between the Phi pair.
#[test]
fn enhanced_table_has_sixty_nine_rows_within_the_combinatorial_bound() {
    let table = build_classifier(SchemeKind::Enhanced, TABLE_TOLERANCE);
    assert_eq!(table.rows().len(), 69);
    // 4 photons over 6 modes.
    let bound = 126;
    assert!(table.rows().len() <= bound);
    let labels: BTreeSet<&str> = table.rows().values().map(|r| r.label.token()).collect();
    for token in ["psi+", "psi-", "phi+", "phi-", "ambiguous"] {
        assert!(labels.contains(token), "missing label {token}");
    }
}

#[test]
fn psi_states_are_never_misread_and_phi_states_never_cross_talk() {
    let table = build_classifier(SchemeKind::Enhanced, TABLE_TOLERANCE);
    let dists = ideal_distributions(SchemeKind::Enhanced);
    for (&kind, dist) in &dists {
        let mut correct = 0.0;
        let mut wrong = 0.0;
        for (pattern, prob) in dist {
            match table.classify(pattern).unwrap() {
                Label::Bell(k) if k == kind => correct += prob,
                Label::Bell(_) => wrong += prob,
                Label::Ambiguous => {}
            }
        }
        assert_eq!(wrong, 0.0, "{kind} leaks into another verdict");
        let want = match kind {
            BellKind::PsiPlus | BellKind::PsiMinus => 1.0,
            BellKind::PhiPlus | BellKind::PhiMinus => 0.25,
        };
        assert!((correct - want).abs() < 1e-12, "{kind}: {correct}");
    }
}
