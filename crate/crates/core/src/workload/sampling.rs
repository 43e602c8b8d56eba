use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};

use super::{ContentClass, SizeParams, ViewParams};

/// Lower bound on a content size (one byte). Gamma draws with a very small
/// shape underflow to exactly zero in `f64`.
pub const MIN_SIZE_MB: f64 = 1e-6;

/// Lower clamp applied to exponential view-ratio draws.
pub const VIEW_RATIO_FLOOR: f64 = 1e-6;

pub fn sample_size<R: Rng + ?Sized>(sp: &SizeParams, rng: &mut R) -> f64 {
    let gamma = Gamma::new(sp.shape, sp.scale).expect("validated size params");
    gamma.sample(rng).max(MIN_SIZE_MB)
}

/// Consumed fraction of a content item. Non-video content is always consumed
/// whole; video draws `Exp(lambda_e)` clamped to `[VIEW_RATIO_FLOOR, 1]`.
pub fn sample_view_ratio<R: Rng + ?Sized>(vp: &ViewParams, class: ContentClass, rng: &mut R) -> f64 {
    match class {
        ContentClass::NonVideo => 1.0,
        ContentClass::Video => {
            let exp = Exp::new(vp.lambda_e).expect("validated view params");
            clamp_view_ratio(exp.sample(rng))
        }
    }
}

pub(crate) fn clamp_view_ratio(x: f64) -> f64 {
    x.clamp(VIEW_RATIO_FLOOR, 1.0)
}
