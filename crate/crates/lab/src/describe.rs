//! The quantity behind each functional name used in configs and CSVs.

pub struct Entry {
    pub functional: &'static str,
    pub quantity: &'static str,
    pub library: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        functional: "eigen",
        quantity: "λ_min = min_{Q ∈ Π_L} ∫_E |Q|² dμ / ∫_{S^d} |Q|² dμ = 1/C₂",
        library: "concentration::lambda_min_with, zonal::lambda_min_zonal",
    },
    Entry {
        functional: "harmonic",
        quantity: "δ = inf_{|x| = 1 - 1/L} h_x(E_L), h_x(E) = ∫_E P(x, u) dσ(u)",
        library: "functionals::harmonic_infimum_with",
    },
    Entry {
        functional: "density",
        quantity: "ρ̂ = inf_u μ(E_L ∩ B(u, r/L)) / μ(B(u, r/L))",
        library: "functionals::relative_density",
    },
    Entry {
        functional: "pnorm",
        quantity: "estimate of min_Q ∫_E |Q|^p dμ / ∫ |Q|^p dμ = 1/C_p (upper bound)",
        library: "concentration::worst_case_lp",
    },
    Entry {
        functional: "supnorm",
        quantity: "min over random Q ∈ Π_L of sup_E |Q| / sup_{S^d} |Q|",
        library: "concentration::sup_norm_ratios",
    },
    Entry {
        functional: "supnorm_w",
        quantity: "min over random Q ∈ Π_L of sup_E |Q|ω / sup_{S^d} |Q|ω",
        library: "concentration::sup_norm_ratios",
    },
    Entry {
        functional: "doubling",
        quantity: "max μ(B(u, 2δ)) / μ(B(u, δ)) over sampled balls, δ = radii/L",
        library: "weights::doubling_constant",
    },
    Entry {
        functional: "ainfty",
        quantity: "smallest B with ω(B) <= B (σ(B)/σ(F))^β ω(F) for sampled F ⊂ B",
        library: "weights::ainfty_check",
    },
    Entry {
        functional: "rhinfty",
        quantity: "smallest C with sup_B ω <= C · avg_B ω over sampled balls",
        library: "weights::rhinfty_check",
    },
    Entry {
        functional: "regularize",
        quantity: "ρ̂ of E* = ∪{B(v, ε/L) : σ(E ∩ B)/σ(B) >= δ} at scale r/2",
        library: "functionals::regularize_set",
    },
];

pub fn render() -> String {
    let mut out = String::new();
    for e in ENTRIES {
        out.push_str(&format!("{:<11} {}\n{:<11} [{}]\n", e.functional, e.quantity, "", e.library));
    }
    out
}
