#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "alab/lattice.hpp"

namespace alab {

// Seeded Gaussian potential on the torus. Values are a pure function of
// (seed, realization index, canonical site coordinates), so restricting a
// 2L-torus realization to the L window reproduces the L-torus realization
// bit for bit, and regeneration is thread-count independent.
struct DisorderRealization {
  TorusLattice lattice;
  std::uint64_t seed = 0;
  std::uint32_t index = 0;
  std::vector<double> g;

  static DisorderRealization sample(const TorusLattice& lattice,
                                    std::uint64_t seed, std::uint32_t index,
                                    int threads = 0);
  double empirical_mean() const;
  double empirical_variance() const;
};

enum class SolveMethod { automatic, dense, iterative };

struct SolverOptions {
  double tolerance = 1e-10;     // relative residual ||(H-z)u - b|| / ||b||
  int max_matvec = 100000;      // hard cap per column
  SolveMethod method = SolveMethod::automatic;
  int threads = 0;
};

// One solved column u = R(z) δ_x with diagnostics. The Ward identity
// |η||u||² - Im u(x)| <= 1e-8 ||u||² is checked on every accepted solve; a
// violation means the solver silently failed and is reported as an error.
struct ResolventColumn {
  std::size_t source = 0;
  SpectralParam params;
  std::vector<cplx> values;
  int iterations = 0;
  int matvec = 0;
  double residual = 0.0;
  SolveMethod used = SolveMethod::automatic;

  double ward_error() const;  // |η||u||² - Im u(x)| / ||u||²
};

ResolventColumn resolvent_column(const DisorderRealization& realization,
                                 SpectralParam params, std::size_t x,
                                 const SolverOptions& options = {});

// Dense (Δ + λV - z) as a matrix, for oracle solves and eigensolves.
Eigen::MatrixXcd dense_shifted_hamiltonian(const DisorderRealization& realization,
                                           SpectralParam params);

struct NormEstimate {
  double value = 0.0;
  bool lower_bound = false;  // true when only a column sample was scanned
  int columns = 0;
};

// ||R||_{1->q} = max_x ||R δ_x||_q, exact when budget >= L^d, otherwise a
// lower bound over an evenly spaced column sample.
NormEstimate one_to_q_norm(const DisorderRealization& realization,
                           SpectralParam params, double q, std::size_t budget,
                           const SolverOptions& options = {});

// Finite-difference check of ∂_{g_w} R_xy = -λ R_xw R_wy (dense sizes only).
struct DerivativeReport {
  cplx finite_difference;
  cplx analytic;
  double rel_error = 0.0;
};

DerivativeReport derivative_check(const DisorderRealization& realization,
                                  SpectralParam params, std::size_t x,
                                  std::size_t y, std::size_t w, double eps_fd);

// Fits the exponential decay rate of log |R_{x, x+k e1}| over C/η < k <= L/4.
struct DecayFit {
  double rate = 0.0;  // slope per lattice step; negative means decay
  bool conclusive = false;
  int points = 0;
};

DecayFit combes_thomas_check(const DisorderRealization& realization,
                             SpectralParam params, std::size_t x,
                             const SolverOptions& options = {});

// Compares R entries between the L and 2L tori (same seed, restricted
// potential) on the window |x|_∞, |y|_∞ <= L/4. Returns the max discrepancy.
double torus_doubling_check(int d, int side, std::uint64_t seed,
                            SpectralParam params,
                            const SolverOptions& options = {});

struct SolveReport {
  int columns = 0;
  double worst_residual = 0.0;
  double worst_ward_error = 0.0;
  long total_matvec = 0;
  bool failed = false;

  void absorb(const ResolventColumn& column);
};

}  // namespace alab
