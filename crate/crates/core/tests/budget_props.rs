use iscr_core::panel_budget::{group_mass_density, panel_mass_density, MaterialGroup, MaterialLayer, PanelDesign};
use proptest::prelude::*;

fn layer(density: f64, volume: f64) -> MaterialLayer {
    MaterialLayer::new("x", density, "test", None, volume, density * volume / 1000.0, None)
}

fn layers() -> impl Strategy<Value = Vec<MaterialLayer>> {
    prop::collection::vec((0.001f64..20.0, 0.0f64..10_000.0).prop_map(|(d, v)| layer(d, v)), 0..8)
}

proptest! {
    #[test]
    fn panel_mass_is_sum_of_layers(solar in layers(), compute in layers(), radiator in layers()) {
        let design = PanelDesign { solar, compute, radiator, ..PanelDesign::baseline() };
        let by_layer: f64 = design.layers().map(|(_, l)| l.density_g_cm3 * l.volume_cm3_per_m2 / 1000.0).sum();
        let by_group: f64 = MaterialGroup::ALL.into_iter().map(|g| group_mass_density(design.group(g))).sum();
        let total = panel_mass_density(&design);
        prop_assert!((total - by_layer).abs() <= 1e-9 * by_layer.max(1.0));
        prop_assert!((total - by_group).abs() <= 1e-12 * by_group.max(1.0));
    }

    #[test]
    fn layer_order_does_not_matter(
        (group, shuffled) in layers().prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
    ) {
        let before = group_mass_density(&group);
        prop_assert!((group_mass_density(&shuffled) - before).abs() <= 1e-9 * before.max(1.0));
    }

    #[test]
    fn mass_scales_with_volume(density in 0.001f64..20.0, volume in 0.0f64..10_000.0, k in 0.0f64..10.0) {
        let a = layer(density, volume).mass_kg_m2();
        let b = layer(density, volume * k).mass_kg_m2();
        prop_assert!((b - k * a).abs() <= 1e-9 * (k * a).max(1.0));
    }
}
