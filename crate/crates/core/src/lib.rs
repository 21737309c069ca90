//! Generalized continuous-time ARMA processes driven by Lévy white noise:
//! exponential B-splines, discrete localization filters, exact sampling and
//! statistical validation.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the `*F64`
//! aliases below fix the common double-precision case.

pub mod error;
pub mod expspline;
pub mod filters;
pub mod generators;
pub mod innovations;
pub mod inverse;
pub mod polyroots;
pub mod quadrature;
pub mod scalar;
pub mod signal;
pub mod statistics;
pub mod system;

pub use error::{Error, Result};
pub use expspline::{
    bspline_alpha, bspline_alpha_gamma, bspline_autocorr, bspline_l, green_function_eval, oversampled_taps,
    piecewise_constant_error, ExpTerm, GreenFunction, GreenTerm, PiecewiseExpPoly,
};
pub use filters::{
    continuous_autocorr, discrete_bspline_filter, interpolation_filter, localization_coeffs, power_spectrum,
    process_spectrum, q_alpha, spectral_factorize, spectral_factorize_detailed, AutocorrInterpolator, FilterKind,
    FilterSpec, InterpolationFilter, SpectralFactor, SpectrumPoint, StationaryAutocorr,
};
pub use generators::{
    generate, generate_gaussian, generate_levy_oversampled, generate_mixed, generate_poisson, whiten_increments, Method,
    MixedComponent, OversamplingInfo, Realization,
};
pub use innovations::{
    charfn_increment, charfn_sampled_process, draw_grid_increments, draw_innovations, draw_poisson_knots, innovation_variance,
    levy_exponent, AmplitudeDensity, AmplitudeLaw, InnovationDraw, InnovationSpec, PoissonKnots,
};
pub use inverse::{apply_inverse_composite, apply_localization, first_order_inverse, regularized_inverse, BoundaryReport};
pub use scalar::{cplx, Scalar};
pub use signal::Signal;
pub use statistics::{empirical_autocorr, empirical_charfn, whiteness_check, StatCheck, StatReport};
pub use system::{rescale_system, PoleZeroSystem};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type PoleZeroSystemF64 = PoleZeroSystem<f64>;
pub type PiecewiseExpPolyF64 = PiecewiseExpPoly<f64>;
pub type FilterSpecF64 = FilterSpec<f64>;
pub type SignalF64 = Signal<f64>;
pub type RealizationF64 = Realization<f64>;
