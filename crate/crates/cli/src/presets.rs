//! Bundled experiment presets, one per reference figure. Each preset
//! is an ordinary config file compiled into the binary; `--preset figN`
//! is equivalent to `--config` with the matching file from the source
//! tree's `presets/` directory.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.cfg")),
    ("fig3", include_str!("../presets/fig3.cfg")),
    ("fig4", include_str!("../presets/fig4.cfg")),
    ("fig5", include_str!("../presets/fig5.cfg")),
    ("fig6", include_str!("../presets/fig6.cfg")),
    ("fig7", include_str!("../presets/fig7.cfg")),
    ("fig8", include_str!("../presets/fig8.cfg")),
    ("fig9", include_str!("../presets/fig9.cfg")),
    ("fig10", include_str!("../presets/fig10.cfg")),
    ("fig11", include_str!("../presets/fig11.cfg")),
    ("fig12", include_str!("../presets/fig12.cfg")),
    ("fig13", include_str!("../presets/fig13.cfg")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(preset, _)| *preset == name)
        .map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}
