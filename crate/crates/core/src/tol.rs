//! Every threshold that can change a verdict. Reports embed a copy of the
//! `Tolerances` they ran with.

/// Span membership, relative to `1 + ‖x‖_F`.
pub const SPAN: f64 = 1e-9;
/// Dropping threshold during Gram–Schmidt.
pub const GRAM_DROP: f64 = 1e-10;
/// Eigenvalues at or below this count as zero when taking supports.
pub const SUPPORT_EIG: f64 = 1e-10;
/// Slack allowed on positivity and trace of density matrices.
pub const DENSITY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A slice is a singleton iff its width is at most this.
    pub width: f64,
    /// Residual accepted for affine constraints of a feasible point.
    pub feasibility: f64,
    /// Eigenvalues within this of the top one belong to the top eigenspace.
    pub eig_cluster: f64,
    /// Gap below which a top eigenvalue is treated as degenerate.
    pub degenerate_gap: f64,
    /// Phase-insensitive duplicate detection for pure states.
    pub dedup: f64,
    /// Allowed deviation from scalar when compressing to an eigenspace.
    pub compression: f64,
    /// Residual bound for excising elements.
    pub excision: f64,
    /// Factor applied to right-hand sides when choosing dyadic ε and δ.
    pub dyadic_slack: f64,
    /// Largest exponent j tried for dyadics 2^-j.
    pub dyadic_max_exp: i32,
    /// |p(u)| must reach 1 minus this on exposed points.
    pub sphere: f64,
    /// Membership slack for free spectrahedra.
    pub spectrahedron: f64,
    /// Step used by central differences.
    pub fd_step: f64,
    /// Relative error allowed between closed forms and finite differences.
    pub fd_rel: f64,
    /// Stage-one convexity certificate slack.
    pub convex_certified: f64,
    /// Stage-two: second differences above `-convex_ok * scale` pass.
    pub convex_ok: f64,
    /// Stage-two: second differences below `-convex_bad * scale` refute.
    pub convex_bad: f64,
    /// Residual bound for multiplicativity identities.
    pub multiplicative: f64,
    /// Normality test ‖a*a − aa*‖ for the n = 3 hypothesis.
    pub normal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            width: 1e-7,
            feasibility: 1e-9,
            eig_cluster: 1e-8,
            degenerate_gap: 1e-8,
            dedup: 1e-8,
            compression: 1e-8,
            excision: 1e-9,
            dyadic_slack: 0.99,
            dyadic_max_exp: 40,
            sphere: 1e-6,
            spectrahedron: 1e-9,
            fd_step: 1e-4,
            fd_rel: 1e-5,
            convex_certified: 1e-9,
            convex_ok: 1e-8,
            convex_bad: 1e-6,
            multiplicative: 1e-8,
            normal: 1e-9,
        }
    }
}

impl Tolerances {
    /// Name/value pairs, including the fixed module constants.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("width", self.width),
            ("feasibility", self.feasibility),
            ("eig_cluster", self.eig_cluster),
            ("degenerate_gap", self.degenerate_gap),
            ("dedup", self.dedup),
            ("compression", self.compression),
            ("excision", self.excision),
            ("dyadic_slack", self.dyadic_slack),
            ("dyadic_max_exp", self.dyadic_max_exp as f64),
            ("sphere", self.sphere),
            ("spectrahedron", self.spectrahedron),
            ("fd_step", self.fd_step),
            ("fd_rel", self.fd_rel),
            ("convex_certified", self.convex_certified),
            ("convex_ok", self.convex_ok),
            ("convex_bad", self.convex_bad),
            ("multiplicative", self.multiplicative),
            ("normal", self.normal),
            ("span", SPAN),
            ("gram_drop", GRAM_DROP),
            ("support_eig", SUPPORT_EIG),
            ("density", DENSITY),
        ]
    }
}
