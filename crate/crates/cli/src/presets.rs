//! Built-in run configurations.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        description: "heat capacity of the n = 4, s = 5/2 PMI black hole against S (Q = 1, l = 1)",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
sweep.var = S
sweep.min = 0.5
sweep.max = 10
sweep.fixed.Q = 1
analysis.quantities = T, Phi, CQ, f
",
    },
    Preset {
        name: "fig4",
        description: "GTD curvature of the n = 4, s = 5/2 PMI black hole against S (Q = 1, l = 1)",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
sweep.var = S
sweep.min = 0.5
sweep.max = 10
sweep.fixed.Q = 1
analysis.quantities = CQ, R_gtd, f
analysis.verify_coincidence = true
",
    },
    Preset {
        name: "fig7",
        description: "heat capacity and GTD curvature of 4D Reissner-Nordstrom-AdS (Q = 1, l = 8)",
        config: "\
model.type = rn
model.n = 3
model.l = 8
sweep.var = S
sweep.min = 5
sweep.max = 60
sweep.fixed.Q = 1
analysis.quantities = T, Phi, CQ, R_gtd, f
analysis.verify_coincidence = true
",
    },
    Preset {
        name: "fig9",
        description: "Weinhold curvature against the heat capacity, n = 4, s = 5/2 (Q = 8, l = 1)",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
sweep.var = S
sweep.min = 1
sweep.max = 20
sweep.fixed.Q = 8
analysis.quantities = CQ, R_w
",
    },
    Preset {
        name: "fig10",
        description: "heat capacity with variable l against l, n = 4, s = 5/2 (S = 10, Q = 1)",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
model.l_is_variable = true
sweep.var = l
sweep.min = 0.5
sweep.max = 5
sweep.fixed.S = 10
sweep.fixed.Q = 1
analysis.quantities = T, Phi, L, CQ, f
",
    },
    Preset {
        name: "fig12",
        description: "GTD curvature with variable l against l, n = 4, s = 5/2 (S = 10, Q = 1)",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
model.l_is_variable = true
sweep.var = l
sweep.min = 0.5
sweep.max = 5
sweep.fixed.S = 10
sweep.fixed.Q = 1
analysis.quantities = CQ, R_gtd, f
analysis.verify_coincidence = true
",
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
