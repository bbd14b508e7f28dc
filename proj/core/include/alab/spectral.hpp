#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "alab/continuum.hpp"
#include "alab/disorder.hpp"
#include "alab/lattice.hpp"

namespace alab {

// Full eigensystem of H = Δ_L + λV at dense sizes (L^d <= 4096).
// At λ = 0 the basis is the complex plane-wave basis in lexicographic dual
// order (stable-sorted by eigenvalue), which pins degenerate subspaces.
struct EigenDecomposition {
  TorusLattice lattice;
  double lambda = 0.0;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd psi;      // column j is ψ_j
  double max_residual = 0.0;
  double gram_defect = 0.0;
};

EigenDecomposition dense_eig(const DisorderRealization& realization, double lambda);

// Best ball mass per eigenfunction and the membership threshold
// mass >= 1 - r^{-4d}. Balls use the Euclidean torus metric. With the center
// free, masses are maximized over x₀ by FFT correlation with the ball
// indicator.
struct LocalizationReport {
  double r = 0.0;
  double threshold = 0.0;
  std::vector<double> best_mass;        // per eigenvalue, in [0,1]
  std::vector<std::size_t> best_center;
  std::vector<char> member;
  int count = 0;          // members inside the energy window
  int window_total = 0;   // eigenvalues inside the window
};

LocalizationReport localized_set(const EigenDecomposition& eig, double r,
                                 std::optional<std::size_t> x0 = {},
                                 std::optional<std::pair<double, double>> window = {});

// Measures the hypotheses and conclusion of the deterministic counting bound:
// δ from η Σ_{x∈B_r(x0)} |G_{x0,x}|², D from the diagonal sup over the window,
// count = |L(A,r,x0) ∩ [E0-η, E0+η]|, bound = (δ η r^d + r^{-2d} δ^{-1} η) D.
struct CountBoundReport {
  double delta = 0.0;
  double diag_sup = 0.0;
  int count = 0;
  double bound = 0.0;        // (δ η r^d + r^{-2d} δ^{-1} η) D
  double bound_basic = 0.0;  // D η r^d
};

CountBoundReport localization_count_bound_check(const EigenDecomposition& eig,
                                                double E0, double eta, double r,
                                                std::size_t x0);

// Both sides of ∫_0^∞ e^{-2ηt} |e^{-itH}ψ(x)|² dt
//             = (2π)^{-1} ∫ |R(E+iη)ψ(x)|² dE:
// left side in closed form from the eigensystem, right side by adaptive
// quadrature over |E| <= 2d + 6λ + 10 plus an exact tail formula.
struct PlancherelReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
  bool quad_converged = false;
};

PlancherelReport plancherel_identity_check(const EigenDecomposition& eig,
                                           const std::vector<cplx>& psi_in,
                                           double eta, std::size_t x);

// Time-averaged propagator moments, analytic in the eigenbasis:
// (1/T)∫_0^T Σ_x w(x) |(e^{-itH})_{x0,x}|² dt for w = |x|², 1_{|x|>=ρ}, 1.
struct PropagatorMoments {
  double second_moment = 0.0;
  double outside_mass = 0.0;
  double total_mass = 0.0;
};

PropagatorMoments propagator_moments(const EigenDecomposition& eig, double T,
                                     std::size_t x0, double outside_radius);

// ||χ((H-E)/α) - χ((Δ-E)/α)||_{2→2} via both eigensystems; χ is the fixed C²
// bump profile (1 on [-1,1], quintic decay to 0 at |t| = 2).
double projection_comparison(const EigenDecomposition& eig_h,
                             const EigenDecomposition& eig_free, double E,
                             double alpha);

}  // namespace alab
