//! Bundled example configs, printed by `cpi-sim demo <name>`.

pub const DEMOS: [(&str, &str); 4] = [
    ("defocused", include_str!("../configs/defocused.toml")),
    ("focused", include_str!("../configs/focused.toml")),
    ("montecarlo", include_str!("../configs/montecarlo.toml")),
    ("budget", include_str!("../configs/budget.toml")),
];

pub fn demo(name: &str) -> Option<&'static str> {
    DEMOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    DEMOS.iter().map(|(n, _)| *n).collect()
}
