use super::classify::Classification;
use super::sweep::RunSpec;
use crate::model::{InitialIncumbent, ModelParams, PoliticalVariant};

/// Named single-run configuration with its expected post-shock state.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub params: ModelParams,
    pub spec: RunSpec,
    pub expected: Classification,
}

fn preset(
    name: &'static str,
    variant: &str,
    election_period: f64,
    d_mu: f64,
    expected: Classification,
) -> Preset {
    let mut params = ModelParams::default()
        .with_variant(PoliticalVariant::from_name(variant).expect("known variant"));
    params.election_period = election_period;
    let spec = RunSpec {
        incumbent: InitialIncumbent::TaxFavoring,
        ..RunSpec::deterministic(&params, 0.5, d_mu)
    };
    Preset {
        name,
        params,
        spec,
        expected,
    }
}

/// Four post-shock trajectories from a 50% capacity shock under user fees.
pub fn example_presets() -> Vec<Preset> {
    use Classification::*;
    vec![
        preset("full-shared", "polcomp-eq", 4.0, 0.0, FullShared),
        preset("collapse", "polcomp-eq", 1.0, 0.0, Collapse),
        preset("elites-abandon", "polcomp-eq", 4.0, 2.0, ElitesAbandon),
        preset(
            "distinct-societies",
            "polcomp-inc",
            4.0,
            2.0,
            DistinctSocieties,
        ),
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    example_presets().into_iter().find(|p| p.name == name)
}
