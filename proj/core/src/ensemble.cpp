#include "alab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "alab/parallel.hpp"

namespace alab {

std::vector<std::uint32_t> EnsembleSpec::realization_indices() const {
  if (!indices.empty()) return indices;
  std::vector<std::uint32_t> out(realizations);
  for (int i = 0; i < realizations; ++i) out[i] = static_cast<std::uint32_t>(i);
  return out;
}

Stats summarize(const std::vector<double>& samples) {
  Stats s;
  s.n = static_cast<int>(samples.size());
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / s.n;
  double var = 0.0;
  for (double v : samples) var += (v - s.mean) * (v - s.mean);
  s.variance = s.n > 1 ? var / (s.n - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / s.n);
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    double pos = q * (sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  s.q05 = quantile(0.05);
  s.q25 = quantile(0.25);
  s.q50 = quantile(0.50);
  s.q75 = quantile(0.75);
  s.q95 = quantile(0.95);
  return s;
}

const std::vector<double>& EnsembleStats::at(const std::string& name) const {
  auto it = samples.find(name);
  if (it == samples.end())
    throw std::out_of_range("EnsembleStats: no observable named " + name);
  return it->second;
}

namespace {

struct RealizationRecord {
  std::vector<cplx> entries;       // R_{source,target} per (source,target) pair
  std::vector<double> rar;         // Σ_y a(y)|R_{x,y}|² per source
  std::vector<double> radial;      // per radius
  double norm_1q = 0.0;
  double ward_worst = 0.0;
  double residual_worst = 0.0;
  int matvec = 0;
  int columns = 0;
  std::vector<std::vector<cplx>> fields;
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
  if (spec.realizations < 1 && spec.indices.empty())
    throw std::invalid_argument("run_ensemble: need at least one realization");
  TorusLattice lat = spec.lattice();
  SpectralParam params = spec.params();

  std::vector<std::size_t> sources = spec.sources;
  if (sources.empty()) sources.push_back(lat.index(Coord{}));
  std::vector<std::uint32_t> indices = spec.realization_indices();

  // Bump field a(y) for the profile observable, centered at the origin.
  std::vector<double> bump_field;
  if (spec.bump_scale > 0) {
    RadialBump a{spec.bump_scale, 1.0};
    bump_field.resize(lat.site_count());
    for (std::size_t i = 0; i < lat.site_count(); ++i)
      bump_field[i] = a(std::sqrt(lat.min_norm2(i)));
  }
  double diffusive_len = 1.0 / (params.lambda * std::sqrt(params.eta));
  if (params.lambda == 0.0) diffusive_len = 0.0;

  SolverOptions column_solver = spec.solver;
  column_solver.threads = 1;  // realizations are the parallel axis

  auto records = parallel_map<RealizationRecord>(
      indices.size(), spec.threads, [&](std::size_t ri) {
        DisorderRealization real =
            DisorderRealization::sample(lat, spec.seed, indices[ri], 1);
        RealizationRecord rec;
        for (std::size_t src : sources) {
          ResolventColumn col = resolvent_column(real, params, src, column_solver);
          rec.ward_worst = std::max(rec.ward_worst, col.ward_error());
          rec.residual_worst = std::max(rec.residual_worst, col.residual);
          rec.matvec += col.matvec;
          ++rec.columns;
          for (std::size_t tgt : spec.targets) rec.entries.push_back(col.values[tgt]);
          if (!bump_field.empty()) {
            double s = 0.0;
            for (std::size_t y = 0; y < bump_field.size(); ++y)
              s += bump_field[y] * std::norm(col.values[y]);
            rec.rar.push_back(s);
          }
          if (src == sources.front() && !spec.radii.empty()) {
            for (double r : spec.radii) {
              RadialBump chi{r * diffusive_len, 1.0};
              double s = 0.0;
              for (std::size_t y = 0; y < col.values.size(); ++y)
                s += chi(std::sqrt(lat.min_norm2(y))) * std::norm(col.values[y]);
              rec.radial.push_back(params.eta * s);
            }
          }
          if (spec.retain_fields) rec.fields.push_back(col.values);
        }
        if (spec.norm_q > 0) {
          NormEstimate est =
              one_to_q_norm(real, params, spec.norm_q, spec.norm_budget, column_solver);
          rec.norm_1q = est.value;
        }
        return rec;
      });

  EnsembleStats stats;
  stats.spec = spec;
  stats.completed = static_cast<int>(records.size());

  auto push = [&](const std::string& name, double v) {
    stats.samples[name].push_back(v);
  };
  for (const auto& rec : records) {
    std::size_t e = 0;
    for (std::size_t si = 0; si < sources.size(); ++si) {
      for (std::size_t ti = 0; ti < spec.targets.size(); ++ti, ++e) {
        std::ostringstream base;
        base << "R[" << sources[si] << "," << spec.targets[ti] << "]";
        push(base.str() + ".re", rec.entries[e].real());
        push(base.str() + ".im", rec.entries[e].imag());
      }
      if (!rec.rar.empty()) push("rar[" + std::to_string(sources[si]) + "]", rec.rar[si]);
    }
    for (std::size_t k = 0; k < rec.radial.size(); ++k) {
      std::ostringstream name;
      name << "radial[" << spec.radii[k] << "]";
      push(name.str(), rec.radial[k]);
    }
    if (spec.norm_q > 0) push("norm_1q", rec.norm_1q);
    push("ward_error", rec.ward_worst);
    stats.solves.columns += rec.columns;
    stats.solves.worst_residual = std::max(stats.solves.worst_residual, rec.residual_worst);
    stats.solves.worst_ward_error = std::max(stats.solves.worst_ward_error, rec.ward_worst);
    stats.solves.total_matvec += rec.matvec;
    if (spec.retain_fields)
      for (auto& f : rec.fields) stats.fields.push_back(f);
  }
  for (const auto& [name, vec] : stats.samples) stats.summary[name] = summarize(vec);
  return stats;
}

namespace {

std::string entry_name(std::size_t src, std::size_t tgt, const char* part) {
  std::ostringstream s;
  s << "R[" << src << "," << tgt << "]." << part;
  return s.str();
}

}  // namespace

LocalLawReport local_law_report(const EnsembleSpec& spec, const SCESolution& sol) {
  EnsembleSpec run = spec;
  TorusLattice lat = spec.lattice();
  std::size_t origin = lat.index(Coord{});
  if (run.sources.empty()) run.sources = {origin};
  if (run.targets.empty()) {
    run.targets = {origin};
    for (int k = 1; k <= 4; ++k) {
      Coord c{};
      c[0] = k;
      run.targets.push_back(lat.index(c));
    }
    Coord diag{};
    diag[0] = diag[1 % lat.dim()] = 2;
    run.targets.push_back(lat.index(diag));
  }
  EnsembleStats stats = run_ensemble(run);

  FourierMultiplier m = renormalized_multiplier(sol, lat);
  LatticeField m_col = m.origin_column();

  LocalLawReport rep;
  rep.theta = sol.theta;
  std::size_t n_real = stats.at(entry_name(run.sources[0], run.targets[0], "re")).size();
  std::vector<double> per_real_max(n_real, 0.0);
  for (std::size_t src : run.sources) {
    Coord cs = lat.coord(src);
    for (std::size_t tgt : run.targets) {
      const auto& re = stats.at(entry_name(src, tgt, "re"));
      const auto& im = stats.at(entry_name(src, tgt, "im"));
      cplx mean{summarize(re).mean, summarize(im).mean};
      // M is translation invariant: M_{xy} = M_col(y - x).
      Coord ct = lat.coord(tgt);
      Coord diff{};
      for (int a = 0; a < lat.dim(); ++a) diff[a] = ct[a] - cs[a];
      cplx theory = m_col.values[lat.index(diff)];
      rep.max_mean_gap = std::max(rep.max_mean_gap, std::abs(mean - theory));
      for (std::size_t ri = 0; ri < n_real; ++ri)
        per_real_max[ri] = std::max(per_real_max[ri],
                                    std::abs(cplx{re[ri], im[ri]} - mean));
      if (src == lat.index(Coord{}) && tgt == src)
        rep.mean_r00 = mean;
    }
  }
  rep.fluctuation_scale = summarize(per_real_max).q50;
  return rep;
}

ProfileReport profile_report(const EnsembleSpec& spec, const DiffusionKernel& kernel,
                             const TransportCoefficients& coeffs) {
  if (!(spec.bump_scale > 0))
    throw std::invalid_argument("profile_report: spec.bump_scale must be > 0");
  TorusLattice lat = spec.lattice();
  if (2.0 * spec.bump_scale > lat.side() / 4.0)
    throw std::invalid_argument("profile_report: bump support exceeds L/4");
  std::size_t origin = lat.index(Coord{});

  EnsembleSpec run = spec;
  run.sources = {origin};
  if (run.targets.empty()) run.targets = {origin};
  EnsembleStats stats = run_ensemble(run);

  ProfileReport rep;
  Stats rar = stats.summary.at("rar[" + std::to_string(origin) + "]");
  rep.empirical = rar.mean;
  rep.empirical_se = rar.std_error;

  RadialBump a{spec.bump_scale, 1.0};
  LatticeField a_field(lat);
  for (std::size_t i = 0; i < lat.site_count(); ++i)
    a_field.values[i] = a(std::sqrt(lat.min_norm2(i)));
  rep.lattice = profile_apply(kernel, a_field).values[origin].real();
  rep.continuum = elliptic_green(coeffs, a, 0.0);

  rep.gap_empirical_lattice = std::abs(rep.empirical - rep.lattice) * spec.eta;
  rep.gap_lattice_continuum = std::abs(rep.lattice - rep.continuum) * spec.eta;
  rep.relative_gap = std::abs(rep.empirical - rep.lattice) /
                     std::max(std::abs(rep.empirical), 1e-300);
  rep.ward_consistency = stats.summary.at("ward_error").mean;
  return rep;
}

ScalingReport scaling_report(const EnsembleSpec& spec,
                             const TransportCoefficients& coeffs,
                             const RadialBump& f0, double kappa,
                             double kappa_prime) {
  if (spec.d < 3)
    throw std::invalid_argument("scaling_report: d >= 3 (d = 2 needs the divergence form)");
  if (!(kappa_prime < kappa))
    throw std::invalid_argument("scaling_report: kappa' must be < kappa");
  double ell = std::pow(spec.lambda, -2.0 - 0.5 * kappa_prime);
  TorusLattice lat = spec.lattice();
  if (ell > lat.side() / 8.0)
    throw std::invalid_argument("scaling_report: ell > L/8, wraparound");
  double eta = std::pow(spec.lambda, 2.0 + kappa);

  EnsembleSpec run = spec;
  run.eta = eta;
  run.bump_scale = f0.scale * ell;  // f(x) = f0(x/ℓ): bump at scale f0.scale·ℓ
  std::size_t origin = lat.index(Coord{});
  run.sources = {origin};
  if (run.targets.empty()) run.targets = {origin};
  EnsembleStats stats = run_ensemble(run);

  ScalingReport rep;
  rep.ell = ell;
  Stats rar = stats.summary.at("rar[" + std::to_string(origin) + "]");
  double pref = 1.0 / (spec.lambda * spec.lambda * ell * ell);
  rep.empirical = pref * rar.mean;
  rep.empirical_se = pref * rar.std_error;

  // c_d β_E ∫ f0(y)|y|^{2-d} dy, radial quadrature; c_d = ((d-2)|S^{d-1}|)^{-1}.
  int d = spec.d;
  double area = 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
  int steps = 4096;
  double upper = f0.support_radius();
  double integral = 0.0;
  for (int i = 0; i < steps; ++i) {
    double r = (i + 0.5) * upper / steps;
    integral += f0(r) * r * (upper / steps);
  }
  integral *= area;
  double c_d = 1.0 / ((d - 2) * area);
  rep.limit_candidate = c_d * coeffs.beta_E * integral;
  rep.gap = std::abs(rep.empirical - rep.limit_candidate);
  return rep;
}

RadialCutoffReport radial_cutoff_report(const EnsembleSpec& spec,
                                        const TransportCoefficients& coeffs,
                                        double r) {
  EnsembleSpec run = spec;
  run.radii = {r};
  TorusLattice lat = spec.lattice();
  run.sources = {lat.index(Coord{})};
  if (run.targets.empty()) run.targets = {run.sources[0]};
  EnsembleStats stats = run_ensemble(run);

  RadialCutoffReport rep;
  std::ostringstream name;
  name << "radial[" << r << "]";
  rep.empirical = stats.summary.at(name.str()).mean;
  rep.phi = radial_profile_phi(coeffs, r);
  rep.gap = std::abs(rep.empirical - rep.phi);
  rep.error_scale = phi_d(spec.d, spec.lambda, spec.eta) +
                    std::sqrt(spec.eta) / spec.lambda;
  return rep;
}

FluctuationReport fluctuation_report(const EnsembleSpec& spec) {
  EnsembleSpec run = spec;
  TorusLattice lat = spec.lattice();
  std::size_t origin = lat.index(Coord{});
  run.sources = {origin};
  if (run.targets.empty()) run.targets = {origin};
  if (!(run.norm_q > 0)) run.norm_q = 4.0;
  EnsembleStats stats = run_ensemble(run);

  FluctuationReport rep;
  const auto& re = stats.at(entry_name(origin, run.targets[0], "re"));
  const auto& im = stats.at(entry_name(origin, run.targets[0], "im"));
  Stats sre = summarize(re), sim = summarize(im);
  rep.sd = std::sqrt(sre.variance + sim.variance);
  rep.norm_median = stats.summary.at("norm_1q").q50;
  rep.predicted_scale = spec.lambda * rep.norm_median * rep.norm_median;
  rep.ratio = spec.lambda > 0 ? rep.sd / std::max(rep.predicted_scale, 1e-300) : 0.0;
  return rep;
}

}  // namespace alab
