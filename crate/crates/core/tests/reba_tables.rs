use handover_core::reba::{
    band_legs, band_lower_arm, band_neck, band_trunk, band_upper_arm, band_wrist, score_pose,
    table_a, table_b, table_c, TaskAdjustments,
};
use handover_core::skeleton::{neutral_pose, ArmPose, Pose};
use proptest::prelude::*;

// The published worksheet, typed in again here so that a slip in either copy
// shows up as a mismatch.
const WORKSHEET_A: [[[u8; 4]; 5]; 3] = [
    [[1, 2, 3, 4], [2, 3, 4, 5], [2, 4, 5, 6], [3, 5, 6, 7], [4, 6, 7, 8]],
    [[1, 2, 3, 4], [3, 4, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9]],
    [[3, 3, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9], [7, 8, 9, 9]],
];

const WORKSHEET_B: [[[u8; 3]; 2]; 6] = [
    [[1, 2, 2], [1, 2, 3]],
    [[1, 2, 3], [2, 3, 4]],
    [[3, 4, 5], [4, 5, 5]],
    [[4, 5, 5], [5, 6, 7]],
    [[6, 7, 8], [7, 8, 8]],
    [[7, 8, 8], [8, 9, 9]],
];

const WORKSHEET_C: [[u8; 12]; 12] = [
    [1, 1, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7],
    [1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8],
    [2, 3, 3, 3, 4, 5, 6, 7, 7, 8, 8, 8],
    [3, 4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9],
    [4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9, 9],
    [6, 6, 6, 7, 8, 8, 9, 9, 10, 10, 10, 10],
    [7, 7, 7, 8, 9, 9, 9, 10, 10, 11, 11, 11],
    [8, 8, 8, 9, 10, 10, 10, 10, 10, 11, 11, 11],
    [9, 9, 9, 10, 10, 10, 11, 11, 11, 12, 12, 12],
    [10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12],
    [11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 12],
    [12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12],
];

#[test]
fn tables_match_worksheet() {
    for n in 1..=3u8 {
        for t in 1..=5u8 {
            for l in 1..=4u8 {
                let want = WORKSHEET_A[n as usize - 1][t as usize - 1][l as usize - 1];
                assert_eq!(table_a(n, t, l), Some(want), "A({n},{t},{l})");
            }
        }
    }
    for u in 1..=6u8 {
        for la in 1..=2u8 {
            for w in 1..=3u8 {
                let want = WORKSHEET_B[u as usize - 1][la as usize - 1][w as usize - 1];
                assert_eq!(table_b(u, la, w), Some(want), "B({u},{la},{w})");
            }
        }
    }
    for a in 1..=12u8 {
        for b in 1..=12u8 {
            assert_eq!(table_c(a, b), Some(WORKSHEET_C[a as usize - 1][b as usize - 1]), "C({a},{b})");
        }
    }
}

#[test]
fn golden_lookups() {
    let cases: [((u8, u8), u8); 12] = [
        ((1, 1), 1),
        ((2, 5), 4),
        ((3, 5), 4),
        ((1, 12), 7),
        ((12, 1), 12),
        ((4, 4), 4),
        ((5, 9), 9),
        ((6, 1), 6),
        ((7, 7), 9),
        ((8, 6), 10),
        ((9, 10), 12),
        ((10, 7), 11),
    ];
    for ((a, b), want) in cases {
        assert_eq!(table_c(a, b), Some(want), "C({a},{b})");
    }
    assert_eq!(table_a(1, 1, 1), Some(1));
    assert_eq!(table_b(1, 1, 1), Some(1));
    assert_eq!(table_a(3, 5, 4), Some(9));
    assert_eq!(table_b(6, 2, 3), Some(9));
}

#[test]
fn out_of_range_indices_are_rejected() {
    assert_eq!(table_a(0, 1, 1), None);
    assert_eq!(table_a(4, 1, 1), None);
    assert_eq!(table_a(1, 6, 1), None);
    assert_eq!(table_a(1, 1, 5), None);
    assert_eq!(table_b(7, 1, 1), None);
    assert_eq!(table_b(1, 3, 1), None);
    assert_eq!(table_b(1, 1, 4), None);
    assert_eq!(table_c(13, 1), None);
    assert_eq!(table_c(1, 0), None);
}

#[test]
fn worksheet_bands() {
    assert_eq!(band_trunk(0.0, false), 1);
    assert_eq!(band_trunk(10.0, false), 2);
    assert_eq!(band_trunk(-10.0, false), 2);
    assert_eq!(band_trunk(20.0, false), 3);
    assert_eq!(band_trunk(-25.0, false), 3);
    assert_eq!(band_trunk(25.0, true), 4);
    assert_eq!(band_trunk(60.0, false), 4);
    assert_eq!(band_trunk(70.0, true), 5);
    assert_eq!(band_neck(10.0, false), 1);
    assert_eq!(band_neck(20.0, false), 2);
    assert_eq!(band_neck(-5.0, false), 2);
    assert_eq!(band_neck(30.0, true), 3);
    assert_eq!(band_legs(true, 0.0), 1);
    assert_eq!(band_legs(false, 0.0), 2);
    assert_eq!(band_legs(true, 30.0), 2);
    assert_eq!(band_legs(true, 60.0), 3);
    assert_eq!(band_legs(false, 90.0), 4);
    assert_eq!(band_upper_arm(0.0, false, false, false), 1);
    assert_eq!(band_upper_arm(-25.0, false, false, false), 2);
    assert_eq!(band_upper_arm(30.0, false, false, false), 2);
    assert_eq!(band_upper_arm(60.0, false, false, false), 3);
    assert_eq!(band_upper_arm(100.0, false, false, false), 4);
    assert_eq!(band_upper_arm(100.0, true, true, false), 6);
    assert_eq!(band_upper_arm(0.0, false, false, true), 1);
    assert_eq!(band_lower_arm(80.0), 1);
    assert_eq!(band_lower_arm(30.0), 2);
    assert_eq!(band_lower_arm(100.0), 2);
    assert_eq!(band_wrist(10.0, false), 1);
    assert_eq!(band_wrist(-20.0, false), 2);
    assert_eq!(band_wrist(20.0, true), 3);
}

#[test]
fn tables_are_monotone() {
    for a in 1..=12u8 {
        for b in 1..=12u8 {
            let v = table_c(a, b).unwrap();
            if a < 12 {
                assert!(table_c(a + 1, b).unwrap() >= v, "C column {b} at row {a}");
            }
            if b < 12 {
                assert!(table_c(a, b + 1).unwrap() >= v, "C row {a} at column {b}");
            }
        }
    }
    for n in 1..=3u8 {
        for t in 1..=5u8 {
            for l in 1..=4u8 {
                let v = table_a(n, t, l).unwrap();
                assert!(table_a(n + 1, t, l).is_none_or(|w| w >= v));
                assert!(table_a(n, t + 1, l).is_none_or(|w| w >= v));
                assert!(table_a(n, t, l + 1).is_none_or(|w| w >= v));
            }
        }
    }
    for u in 1..=6u8 {
        for la in 1..=2u8 {
            for w in 1..=3u8 {
                let v = table_b(u, la, w).unwrap();
                assert!(table_b(u + 1, la, w).is_none_or(|x| x >= v));
                assert!(table_b(u, la + 1, w).is_none_or(|x| x >= v));
                assert!(table_b(u, la, w + 1).is_none_or(|x| x >= v));
            }
        }
    }
}

#[test]
fn postural_separates_what_final_score_merges() {
    // Score A 2 vs 3 at Score B 5: different postural sums, same final score.
    assert_eq!(table_c(2, 5), table_c(3, 5));
    assert_ne!(2 + 5, 3 + 5);
}

#[test]
fn neutral_pose_is_minimal() {
    let r = score_pose(&neutral_pose(), &TaskAdjustments::default());
    assert_eq!((r.trunk, r.neck, r.legs), (1, 1, 1));
    assert_eq!((r.score_a, r.score_b, r.postural, r.final_reba), (1, 1, 2, 1));
}

#[test]
fn adjustments_shift_scores() {
    let adj = TaskAdjustments {
        load: 2,
        coupling: 1,
        activity: 3,
    };
    let r = score_pose(&neutral_pose(), &adj);
    assert_eq!((r.score_a, r.score_b), (3, 2));
    assert_eq!(r.table_c, table_c(3, 2).unwrap());
    assert_eq!(r.final_reba, r.table_c + 3);
    assert_eq!(r.postural, 5);
    assert!(TaskAdjustments { load: 4, ..adj }.validate().is_err());
}

fn arm_strategy() -> impl Strategy<Value = ArmPose> {
    (-90.0..200.0f64, -90.0..180.0f64, 0.0..=160.0f64, -90.0..90.0f64, any::<bool>()).prop_map(
        |(f, a, e, w, d)| ArmPose {
            shoulder_flexion: f,
            shoulder_abduction: a,
            elbow_flexion: e,
            wrist_flexion: w,
            wrist_deviated: d,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn components_stay_in_range(
        trunk in (-90.0..120.0f64, -60.0..60.0f64, -90.0..90.0f64),
        neck in (-60.0..80.0f64, any::<bool>()),
        left in arm_strategy(),
        right in arm_strategy(),
        knee in 0.0..=150.0f64,
        support in any::<bool>(),
        adj in (0..=3u8, 0..=3u8, 0..=3u8),
    ) {
        let pose = Pose {
            trunk_flexion: trunk.0,
            trunk_side: trunk.1,
            trunk_twist: trunk.2,
            neck_flexion: neck.0,
            neck_twisted: neck.1,
            left,
            right,
            knee_flexion: knee,
            bilateral_support: support,
        };
        let adj = TaskAdjustments { load: adj.0, coupling: adj.1, activity: adj.2 };
        let r = score_pose(&pose, &adj);
        prop_assert!((1..=5).contains(&r.trunk));
        prop_assert!((1..=3).contains(&r.neck));
        prop_assert!((1..=4).contains(&r.legs));
        for arm in [r.left, r.right] {
            prop_assert!((1..=6).contains(&arm.upper_arm));
            prop_assert!((1..=2).contains(&arm.lower_arm));
            prop_assert!((1..=3).contains(&arm.wrist));
            prop_assert!((1..=9).contains(&arm.table_b));
        }
        prop_assert!((1..=9).contains(&r.table_a));
        prop_assert!((1..=12).contains(&r.score_a) && (1..=12).contains(&r.score_b));
        prop_assert!((1..=12).contains(&r.table_c));
        prop_assert_eq!(r.final_reba, r.table_c + r.activity);
        prop_assert!((1..=15).contains(&r.final_reba));
        prop_assert_eq!(r.postural, r.score_a + r.score_b);
        prop_assert!((2..=24).contains(&r.postural));
        prop_assert_eq!(r.score_b, r.left.table_b.max(r.right.table_b) + adj.coupling);
    }
}
