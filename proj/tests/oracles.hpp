#pragma once

// Frozen reference values for the test suite. Every constant here was computed
// once with an independent high-precision tool (50-digit arbitrary-precision
// evaluations of the defining series / integrals / closed forms, none of them
// through the library under test) and pasted verbatim. Tests compare against
// these numbers instead of re-deriving them, so a regression in the library
// cannot hide inside a matching regression in the test.
namespace oracle {

// Riemann zeta on the half-integer ladder used by the equilibrium module.
inline constexpr double kZeta32 = 2.61237534868548834;    // zeta(3/2)
inline constexpr double kZeta52 = 1.34148725725091718;    // zeta(5/2)
inline constexpr double kZeta12 = -1.46035450880958681;   // zeta(1/2)
inline constexpr double kZetaM12 = -0.207886224977354566; // zeta(-1/2)
inline constexpr double kZetaM32 = -0.0254852018898330359;

// Bose-Einstein polylogarithms at spot points (series summed to 50 digits).
inline constexpr double kLi32Half = 0.624837020819913854;    // Li_{3/2}(1/2)
inline constexpr double kLi52Half = 0.554997278717512293;    // Li_{5/2}(1/2)
inline constexpr double kLi32Of09 = 1.61443852856633963;     // Li_{3/2}(0.9)
inline constexpr double kLi52Of099 = 1.31753942595872773;    // Li_{5/2}(0.99)
inline constexpr double kLi32Near1 = 2.60883190045258495;    // Li_{3/2}(1 - 1e-6)

// Regular Bose-Einstein moments at beta = 1, mu = 0 (the condensation line):
// M0 = (2 pi)^{3/2} zeta(3/2), M2 = 3 (2 pi)^{3/2} zeta(5/2).
inline constexpr double kBeM0Mu0Beta1 = 41.1438927736170414;
inline constexpr double kBeM2Mu0Beta1 = 63.3837031465768064;

// No-condensate threshold coefficients M0 <= c * M2^{3/5}:
//   quoted convention   (4 pi / 3)^{3/5} zeta(3/2) / zeta(5/2)^{3/5}
//   self-consistent     (2 pi / 3)^{3/5} zeta(3/2) / zeta(5/2)^{3/5}
inline constexpr double kSubcriticalCoeffQuoted = 5.1729325006314023;
inline constexpr double kSubcriticalCoeffDerived = 3.41286267823867258;

// Kinetic condensation temperature at M0 = zeta(3/2), m = k_B = 1: exactly
// zeta(5/2) / (2 pi zeta(3/2)).
inline constexpr double kTcAtZetaMass = 0.081728044246668056;

// Angular-kernel constants l_b = |S^{d-2}| int_0^pi b(cos t) sin^{d-2} t dt.
inline constexpr double kLbConstB1D3 = 12.566370614359173;    // 4 pi
inline constexpr double kLbOnePlusX2D3 = 16.7551608191455639; // 16 pi / 3
inline constexpr double kLbConstB1D4 = 19.7392088021787172;   // 2 pi^2

// Scheme-constant arithmetic for C_phi = 1, b = 1, d = 3, gamma = 1, M0 = 1,
// ||f0||_inf = 0.1, n = 2: Delta_n = 1 / (16 pi * 1.4).
inline constexpr double kDeltaNArithmetic = 0.0142102627760620836;

// sup_x (1 + x) / (1 + x^2) = (1 + sqrt 2) / 2 (the gamma = 1 case).
inline constexpr double kCGammaAtOne = 1.20710678118654752;

// Regular Bose-Einstein density 1/(e^{beta(|v-u|^2 - mu)/2} - 1) at
// beta = 1, mu = -1, v = u: exactly 1/(sqrt(e) - 1).
inline constexpr double kBeRegularSpot = 1.54149408253679828;

// Entropy integrand (1+f)log(1+f) - f log f at f = 3/2.
inline constexpr double kEntropyNodeAt32 = 1.78813316748443348;

// Hyperplane weight integral C_{s,d} = |S^{d-2}| (pi/s) / sin((d-1) pi / s).
inline constexpr double kCsdS3D3 = 7.59762501035207516;
inline constexpr double kCsdS4D3 = 4.93480220054467931;
inline constexpr double kCsdS6D3 = 3.79881250517603758;

// (2 pi)^{3/2}: mass of the unit-amplitude, unit-width Gaussian in d = 3.
inline constexpr double kGauss3Mass = 15.7496099457224197;

// Cubic-root bound pieces (d = 3, gamma = 1), with
//   bracket = (1 + sqrt(244/243))^{1/3} + (1 - sqrt(244/243))^{1/3}:
inline constexpr double kCardanoBracket = 1.13320560231831889;       // bracket
inline constexpr double kCardanoBracketCubed = 1.45521156899548556;  // bracket^3
// least-energy coefficient bracket^3 / (32 pi^{2/3}) at m0 = linf = 1
inline constexpr double kCardanoUnitCoeff = 0.0212003441968469874;
// root of x^3 + (r0^{4/3} / 6^{2/3}) x - r0^2 at r0 = 1
inline constexpr double kCardanoRootAtUnitR0 = 0.899425882608178256;

}  // namespace oracle
