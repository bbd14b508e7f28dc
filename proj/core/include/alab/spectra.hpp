#pragma once

#include <complex>
#include <vector>

#include "alab/lattice.hpp"

namespace alab {

// Singular energy set Σ_d = (R \ [-2d,2d]) ∪ ((2d+4Z) ∩ [-2d,2d]) ∪ {0}.
// The value 0 is kept in every dimension, matching the displayed definition;
// strictly it is only needed in d = 3.
struct CriticalSet {
  int d;
  explicit CriticalSet(int d_);
  // Finite part: critical values of ω plus 0, sorted ascending.
  std::vector<double> finite_values() const;
  double band_edge() const { return 2.0 * d; }
};

double sigma_distance(int d, double E);

enum class Confidence { ok, near_singular, out_of_band };

struct SpectralValue {
  double value = 0.0;
  Confidence confidence = Confidence::ok;
};

// Deterministic grid histogram of the dispersion over an N^d dual grid.
// Bin b holds the grid-point count, the summed ω values (used as quadrature
// nodes), and the summed |∇ω|^2 weights (coarea weights for ν).
class DispersionTable {
 public:
  static DispersionTable build(int d, int grid_n, double bin_width = 1e-2,
                               int threads = 0);
  // Defaults from the module contract: N = 2048 per axis for d = 2,
  // 256 for d >= 3, bin width 1e-2.
  static DispersionTable build_default(int d, int threads = 0);

  int dim() const { return d_; }
  int grid_n() const { return n_; }
  double bin_width() const { return width_; }

  // Density of states ρ(E); ∫ρ = 1 exactly up to rounding.
  SpectralValue rho(double E) const;
  // Velocity density ν(E) = (2π)^{-d} ∫_{ω=E} |∇ω| dH^{d-1}; ∫ν = 2d.
  SpectralValue nu(double E) const;
  // φ(z) = ∫ ρ(σ)/(σ-z) dσ by bin quadrature at the per-bin mean ω.
  cplx free_diag(cplx z) const;

  // Boundary values lim_{η→0} of the Herglotz transforms, by two-point
  // Richardson extrapolation from η₀ = 2·width. Smooth in E (no bin moiré),
  // accurate to ~1e-4 away from Σ_d:
  //   rho_boundary(E) = (1/π) lim Im φ(E+iη)           (equals ρ(E))
  //   nu_boundary(E)  = (1/π) lim Im Σ|∇ω|²/(ω-E-iη)   (equals ν(E))
  double rho_boundary(double E) const;
  double nu_boundary(double E) const;

  double rho_integral() const;  // Σ ρ·width, = 1 up to rounding
  double nu_integral() const;   // Σ ν·width, = 2d analytically

 private:
  DispersionTable() = default;
  int bin_of(double E) const;
  bool near_singular(double E) const;

  int d_ = 0;
  int n_ = 0;
  double width_ = 0.0;
  double lo_ = 0.0;
  std::vector<double> count_;
  std::vector<double> omega_sum_;
  std::vector<double> grad2_sum_;
};

// Exponent tables of the diffusive-profile theory.
struct Exponents {
  double kappa;  // κ_d: depth of the admissible η range below λ^2
  double p;      // p_d: upper interpolation exponent for the 1→q bounds
};
Exponents exponents(int d);

// Error scale Φ_d(E+iη) of the profile theorem, λ, η > 0.
double phi_d(int d, double lambda, double eta);

// Four-denominator crossing integral via the convolution identity:
// v = inverse DFT of 1/|ω-z| on an N^d grid, I₄ = Σ_x v(x)^4.
// Non-increasing in η at fixed E; satisfies I₄ ≲ η^{-1}.
double crossing_integral(int d, cplx z, int resolution);

}  // namespace alab
