#pragma once

#include <complex>
#include <vector>

#include "alab/continuum.hpp"
#include "alab/lattice.hpp"
#include "alab/spectra.hpp"

namespace alab {

struct SceOptions {
  int max_iterations = 10000;
  double tolerance = 1e-12;      // on |θ - Φ_z(θ)| / max(1, |θ|)
  bool aitken = false;           // optional Aitken extrapolation
  cplx initial{0.0, 1.0};
  int threads = 0;
};

// Fixed point of Φ_z(w) = L^{-d} Σ_ξ 1/(ω(ξ) - z - λ²w), the unique solution
// of θ = (Δ - (z + λ²θ))^{-1}_{00} in the upper half-plane.
struct SCESolution {
  SpectralParam params;
  cplx theta{0.0, 0.0};
  int iterations = 0;
  double residual = 0.0;  // |θ - Φ_z(θ)|
  int d = 0;
  int grid_side = 0;
};

SCESolution solve_theta(const TorusLattice& grid, SpectralParam params,
                        const SceOptions& options = {});

// M(z) = (Δ_L - (z + λ²θ))^{-1} as a Fourier multiplier.
FourierMultiplier renormalized_multiplier(const SCESolution& sol,
                                          const TorusLattice& lattice);

// Step kernel of the effective walk: K̃(x) = |<0|M|x>|², with its (real) DFT
// symbol. Non-negative, even, reflection invariant.
struct DiffusionKernel {
  TorusLattice lattice;
  std::vector<double> values;  // K̃ per site
  std::vector<double> symbol;  // DFT of K̃ (real since K̃ is even)
  SCESolution source;

  double sum() const { return symbol[0]; }
};

DiffusionKernel build_kernel(const FourierMultiplier& m, const SCESolution& sol);

struct TransportCoefficients {
  SpectralParam params;
  double mass = 0.0;        // m(z) = λ²η^{-1}(1 - λ² Σ K̃)
  double diffusion = 0.0;   // ϑ(z) = (λ⁶/2) Σ x₁² K̃(x)
  double mass_closed = 0.0; // λ²/(λ² Im θ + η), Ward identity route

  // Dispersion-theory reference values. rho_pi is the boundary value
  // lim Im φ(E+i0) = π ρ(E), the normalization in which the small-λ limits
  // of m and ϑ are stated. The trend predictions evaluate the tables at the
  // renormalized energy E + λ² Re θ and keep the full η dependence, which is
  // the form whose gap to (m, ϑ) actually closes as λ -> 0.
  double rho = 0.0;    // density of states at E (∫ρ = 1 convention)
  double nu = 0.0;     // velocity density at E (histogram snapshot)
  double rho_pi = 0.0;
  double nu_smooth = 0.0;  // boundary-value evaluation of ν(E)
  double e_shifted = 0.0;             // E + λ² Re θ
  double mass_prediction = 0.0;       // λ²/(λ² πρ(E') + η), E' = e_shifted
  double diffusion_prediction = 0.0;  // (π/4d) ν(E') λ⁶/(λ² πρ(E') + η)³
  double mass_prediction_flat = 0.0;       // 1/ρ(E), the flat-form reference
  double diffusion_prediction_flat = 0.0;  // (π/4d) ρ(E)^{-3} ν(E)
  double beta_E = 0.0;                // (4d/π) rho_pi³ / ν
  double mass_gap = 0.0;       // |mass - mass_prediction|
  double diffusion_gap = 0.0;  // |diffusion - diffusion_prediction|

  bool lattice_too_small = false;
  double boundary_tail_fraction = 0.0;  // share of the x₁² moment on the rim

  int d = 0;
  int kernel_side = 0;
  int table_grid_n = 0;
  double table_bin_width = 0.0;
};

TransportCoefficients transport_coefficients(const DiffusionKernel& kernel,
                                             const DispersionTable& table);

// Low-frequency expansion check: λ²K̂(ξ) = (1 - λ^{-2}ηm) - ϑλ^{-4}|ξ|² + r̃(ξ)
// with |r̃(ξ)| <= C λ^{-8}|ξ|⁴ over the lowest 1/8 of the dual grid.
struct KernelSymbolReport {
  double fitted_C = 0.0;       // max |r̃| / (λ^{-8}|ξ|⁴)
  double max_residual = 0.0;   // max |r̃| over the window
  double zero_mode_gap = 0.0;  // |λ²K̂(0) - (1 - λ^{-2}ηm)|
  double max_imag = 0.0;       // largest |Im K̂| anywhere (odd moments vanish)
  int modes = 0;
};

KernelSymbolReport kernel_symbol_check(const DiffusionKernel& kernel,
                                       const TransportCoefficients& coeffs);

// 𝒢a = (Id - λ²𝒦)^{-1}𝒦 a via pointwise division in Fourier space.
// Requires λ² Σ K̃ < 1, which holds for every η > 0.
LatticeField profile_apply(const DiffusionKernel& kernel, const LatticeField& a);

// Continuum prediction: u(query) for (-λ^{-4}ϑ Δ + λ^{-2}η m) u = λ^{-2} f.
double elliptic_green(const TransportCoefficients& coeffs, const RadialBump& f,
                      double query_radius, int refine = 0);

// φ(r) = ∫ χ(x/r) G(x) dx, G the Green's function of
// (-(π/4d) rho_pi^{-3} ν Δ + rho_pi^{-1}); φ(r) -> rho_pi as r -> ∞.
double radial_profile_phi(const TransportCoefficients& coeffs, double r);

}  // namespace alab
