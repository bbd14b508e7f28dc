#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alab/disorder.hpp"
#include "alab/sce.hpp"

namespace alab {

// One disorder Monte Carlo run: lattice/physics parameters, realization
// count, seeding, and the observables recorded per realization. Every output
// is a pure function of this struct.
struct EnsembleSpec {
  int d = 2;
  int side = 16;
  double E = 1.0;
  double eta = 0.25;
  double lambda = 0.5;
  int realizations = 2;
  std::uint64_t seed = 1;
  std::vector<std::uint32_t> indices;  // explicit realization indices; default 0..N-1

  std::vector<std::size_t> sources{};  // column source sites; default {origin}
  std::vector<std::size_t> targets{};  // recorded entries R_{source,target}
  double bump_scale = 0.0;   // > 0: record Σ_y a(y)|R_{x,y}|², a = bump at this scale
  double norm_q = 0.0;       // > 0: record ||R||_{1→q} over norm_budget columns
  std::size_t norm_budget = 0;  // 0 = the one_to_q_norm default (256)
  std::vector<double> radii;  // record η Σ_x χ(x/(r λ^{-1}η^{-1/2})) |R_{0x}|²

  SolverOptions solver;
  int threads = 0;
  bool retain_fields = false;  // keep full columns (memory heavy)

  SpectralParam params() const { return {E, eta, lambda}; }
  TorusLattice lattice() const { return {d, side}; }
  std::vector<std::uint32_t> realization_indices() const;
};

struct Stats {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  int n = 0;
};

Stats summarize(const std::vector<double>& samples);

struct EnsembleStats {
  EnsembleSpec spec;
  int completed = 0;
  // Per-observable retained samples (realization order) and their summaries.
  std::map<std::string, std::vector<double>> samples;
  std::map<std::string, Stats> summary;
  SolveReport solves;
  std::vector<std::vector<cplx>> fields;  // only when retain_fields

  const std::vector<double>& at(const std::string& name) const;
};

// Runs the realizations in a parallel pool (deterministic reduction in
// realization order). Any solver failure aborts the run: skipping bad
// realizations would bias the disorder averages.
EnsembleStats run_ensemble(const EnsembleSpec& spec);

// Local-law comparison: entrywise gap between the ensemble mean of R and the
// renormalized multiplier M, plus the empirical fluctuation scale
// (per-realization max over the entry set, median over realizations).
struct LocalLawReport {
  double max_mean_gap = 0.0;
  double fluctuation_scale = 0.0;
  cplx mean_r00;
  cplx theta;
};

LocalLawReport local_law_report(const EnsembleSpec& spec, const SCESolution& sol);

// Three-way diffusive profile comparison at the origin:
//   empirical  = ensemble mean of Σ_y a(y)|R_{0y}|²,
//   lattice    = ((Id-λ²K)^{-1} K a)(0),
//   continuum  = u(0) from the elliptic solve.
// Gaps are also reported in units of η (the natural observable scale).
struct ProfileReport {
  double empirical = 0.0;
  double empirical_se = 0.0;
  double lattice = 0.0;
  double continuum = 0.0;
  double gap_empirical_lattice = 0.0;   // |empirical - lattice| · η
  double gap_lattice_continuum = 0.0;   // |lattice - continuum| · η
  double relative_gap = 0.0;            // |empirical - lattice| / |empirical|
  double ward_consistency = 0.0;        // a ≡ 1 sanity: |ηΣ|R|² - Im R_00| mean
};

ProfileReport profile_report(const EnsembleSpec& spec, const DiffusionKernel& kernel,
                             const TransportCoefficients& coeffs);

// Scaling-limit functional λ^{-2}ℓ^{-2} Σ_x f(x/ℓ)|R_{0x}|², ℓ = λ^{-2-κ'/2},
// against the continuum candidate c_d β_E ∫ f(y)|y|^{2-d} dy (d >= 3).
struct ScalingReport {
  double empirical = 0.0;
  double empirical_se = 0.0;
  double limit_candidate = 0.0;
  double gap = 0.0;
  double ell = 0.0;
};

ScalingReport scaling_report(const EnsembleSpec& spec,
                             const TransportCoefficients& coeffs,
                             const RadialBump& f0, double kappa, double kappa_prime);

// Radial-cutoff functional η Σ_x χ(x/(r λ^{-1}η^{-1/2}))|R_{0x}|² vs φ(r).
struct RadialCutoffReport {
  double empirical = 0.0;
  double phi = 0.0;
  double gap = 0.0;
  double error_scale = 0.0;  // Φ_d(z) + λ^{-1}η^{1/2}
};

RadialCutoffReport radial_cutoff_report(const EnsembleSpec& spec,
                                        const TransportCoefficients& coeffs,
                                        double r);

// Concentration check: SD of R_{xy} against λ·(median ||R||_{1→4})².
struct FluctuationReport {
  double sd = 0.0;
  double norm_median = 0.0;
  double predicted_scale = 0.0;  // λ · median²
  double ratio = 0.0;
};

FluctuationReport fluctuation_report(const EnsembleSpec& spec);

}  // namespace alab
