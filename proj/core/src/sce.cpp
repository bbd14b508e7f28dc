#include "alab/sce.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "alab/parallel.hpp"

namespace alab {

namespace {

// Mean over the dual grid of 1/(ω(ξ) - shift), with a fixed 64-chunk ordered
// reduction so results do not depend on the worker count.
cplx grid_resolvent_mean(const std::vector<double>& omega, cplx shift, int threads) {
  std::size_t n = omega.size();
  std::size_t n_chunks = std::min<std::size_t>(64, n);
  std::size_t chunk = (n + n_chunks - 1) / n_chunks;
  auto partial = parallel_map<cplx>(n_chunks, threads, [&](std::size_t ci) {
    std::size_t begin = ci * chunk, end = std::min(n, begin + chunk);
    cplx acc{0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) acc += 1.0 / (omega[i] - shift);
    return acc;
  });
  cplx total{0.0, 0.0};
  for (const auto& p : partial) total += p;
  return total / static_cast<double>(n);
}

}  // namespace

SCESolution solve_theta(const TorusLattice& grid, SpectralParam params,
                        const SceOptions& options) {
  std::vector<double> omega(grid.site_count());
  for (std::size_t k = 0; k < omega.size(); ++k) omega[k] = dispersion(grid, k);

  double l2 = params.lambda * params.lambda;
  cplx z = params.z();
  auto step = [&](cplx w) { return grid_resolvent_mean(omega, z + l2 * w, options.threads); };

  cplx w = options.initial;
  if (!(w.imag() > 0)) throw std::invalid_argument("solve_theta: initial point must be in H");

  SCESolution sol;
  sol.params = params;
  sol.d = grid.dim();
  sol.grid_side = grid.side();

  cplx prev2{0.0, 0.0}, prev1{0.0, 0.0};
  for (int it = 1; it <= options.max_iterations; ++it) {
    cplx next = step(w);
    double residual = std::abs(next - w);
    sol.iterations = it;
    if (residual <= options.tolerance * std::max(1.0, std::abs(next))) {
      sol.theta = next;
      sol.residual = std::abs(step(next) - next);
      return sol;
    }
    prev2 = prev1;
    prev1 = w;
    w = next;
    if (options.aitken && it >= 3 && it % 3 == 0) {
      cplx denom = w - 2.0 * prev1 + prev2;
      if (std::abs(denom) > 1e-300) {
        cplx accel = prev2 - (prev1 - prev2) * (prev1 - prev2) / denom;
        if (accel.imag() > 0) w = accel;
      }
    }
  }
  std::ostringstream msg;
  msg << "solve_theta: no convergence after " << options.max_iterations
      << " iterations, last residual " << std::abs(step(w) - w);
  throw std::runtime_error(msg.str());
}

FourierMultiplier renormalized_multiplier(const SCESolution& sol,
                                          const TorusLattice& lattice) {
  cplx shift = sol.params.z() + sol.params.lambda * sol.params.lambda * sol.theta;
  std::vector<cplx> sym(lattice.site_count());
  for (std::size_t k = 0; k < sym.size(); ++k)
    sym[k] = 1.0 / (dispersion(lattice, k) - shift);
  return FourierMultiplier(lattice, std::move(sym));
}

DiffusionKernel build_kernel(const FourierMultiplier& m, const SCESolution& sol) {
  LatticeField column = m.origin_column();
  std::size_t n = column.values.size();
  DiffusionKernel kernel{m.lattice, std::vector<double>(n), std::vector<double>(n), sol};
  std::vector<cplx> work(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.values[i] = std::norm(column.values[i]);
    work[i] = kernel.values[i];
  }
  fft::forward(m.lattice.dim(), m.lattice.side(), work);
  for (std::size_t i = 0; i < n; ++i) kernel.symbol[i] = work[i].real();
  return kernel;
}

TransportCoefficients transport_coefficients(const DiffusionKernel& kernel,
                                             const DispersionTable& table) {
  const TorusLattice& lat = kernel.lattice;
  const SpectralParam& p = kernel.source.params;
  if (table.dim() != lat.dim())
    throw std::invalid_argument("transport_coefficients: dimension mismatch");

  double l2 = p.lambda * p.lambda;
  double l6 = l2 * l2 * l2;

  TransportCoefficients out;
  out.params = p;
  out.d = lat.dim();
  out.kernel_side = lat.side();
  out.table_grid_n = table.grid_n();
  out.table_bin_width = table.bin_width();

  double ksum = kernel.sum();
  out.mass = l2 / p.eta * (1.0 - l2 * ksum);
  out.mass_closed = l2 / (l2 * kernel.source.theta.imag() + p.eta);

  double moment = 0.0, rim = 0.0;
  int half = lat.side() / 2;
  for (std::size_t i = 0; i < kernel.values.size(); ++i) {
    Coord c = lat.coord(i);
    double x1 = c[0];
    double term = x1 * x1 * kernel.values[i];
    moment += term;
    int linf = 0;
    for (int j = 0; j < lat.dim(); ++j) linf = std::max(linf, std::abs(c[j]));
    if (linf >= half - 1) rim += term;
  }
  out.diffusion = 0.5 * l6 * moment;
  out.boundary_tail_fraction = moment > 0 ? rim / moment : 0.0;
  out.lattice_too_small = out.boundary_tail_fraction >= 1e-6;

  int d = lat.dim();
  out.rho = table.rho(p.E).value;
  out.nu = table.nu(p.E).value;
  out.rho_pi = M_PI * table.rho_boundary(p.E);
  out.nu_smooth = table.nu_boundary(p.E);
  out.e_shifted = p.E + l2 * kernel.source.theta.real();
  double rho_sh = M_PI * table.rho_boundary(out.e_shifted);
  double nu_sh = table.nu_boundary(out.e_shifted);
  double denom = l2 * rho_sh + p.eta;
  out.mass_prediction = l2 / denom;
  out.diffusion_prediction = M_PI / (4.0 * d) * nu_sh * l6 / (denom * denom * denom);
  out.mass_prediction_flat = 1.0 / out.rho;
  out.diffusion_prediction_flat =
      M_PI / (4.0 * d) * out.nu / (out.rho * out.rho * out.rho);
  out.beta_E = 4.0 * d / M_PI * out.rho_pi * out.rho_pi * out.rho_pi / out.nu_smooth;
  out.mass_gap = std::abs(out.mass - out.mass_prediction);
  out.diffusion_gap = std::abs(out.diffusion - out.diffusion_prediction);
  return out;
}

KernelSymbolReport kernel_symbol_check(const DiffusionKernel& kernel,
                                       const TransportCoefficients& coeffs) {
  const TorusLattice& lat = kernel.lattice;
  const SpectralParam& p = kernel.source.params;
  double l2 = p.lambda * p.lambda;
  double lm4 = 1.0 / (l2 * l2);
  double lm8 = lm4 * lm4;

  // Recompute the symbol with full phases to track the imaginary part too.
  std::vector<cplx> work(kernel.values.size());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = kernel.values[i];
  fft::forward(lat.dim(), lat.side(), work);

  double zero_gap =
      std::abs(l2 * work[0].real() - (1.0 - coeffs.mass * p.eta / l2));

  KernelSymbolReport report;
  report.zero_mode_gap = zero_gap;
  double cutoff = M_PI / 4.0;  // lowest 1/8 of each axis
  for (std::size_t k = 0; k < work.size(); ++k) {
    report.max_imag = std::max(report.max_imag, std::abs(work[k].imag()));
    if (k == 0) continue;
    auto xi = lat.dual_point(k);
    double norm2 = 0.0;
    bool low = true;
    for (int j = 0; j < lat.dim(); ++j) {
      double x = xi[j] > M_PI ? xi[j] - 2.0 * M_PI : xi[j];
      if (std::abs(x) > cutoff) low = false;
      norm2 += x * x;
    }
    if (!low) continue;
    double expansion = (1.0 - coeffs.mass * p.eta / l2) - coeffs.diffusion * lm4 * norm2;
    double residual = std::abs(l2 * work[k].real() - expansion);
    report.max_residual = std::max(report.max_residual, residual);
    report.fitted_C = std::max(report.fitted_C, residual / (lm8 * norm2 * norm2));
    ++report.modes;
  }
  return report;
}

LatticeField profile_apply(const DiffusionKernel& kernel, const LatticeField& a) {
  if (!(a.lattice == kernel.lattice))
    throw std::invalid_argument("profile_apply: lattice mismatch");
  double l2 = kernel.source.params.lambda * kernel.source.params.lambda;
  std::vector<cplx> work = a.values;
  fft::forward(a.lattice.dim(), a.lattice.side(), work);
  for (std::size_t k = 0; k < work.size(); ++k) {
    double denom = 1.0 - l2 * kernel.symbol[k];
    if (std::abs(denom) < 1e-14)
      throw std::runtime_error("profile_apply: symbol reaches 1/λ², kernel corrupt");
    work[k] *= kernel.symbol[k] / denom;
  }
  fft::inverse(a.lattice.dim(), a.lattice.side(), work);
  return LatticeField(a.lattice, std::move(work));
}

double elliptic_green(const TransportCoefficients& coeffs, const RadialBump& f,
                      double query_radius, int refine) {
  const SpectralParam& p = coeffs.params;
  double l2 = p.lambda * p.lambda;
  double diffusion = coeffs.diffusion / (l2 * l2);  // λ^{-4} ϑ
  double mass = p.eta * coeffs.mass / l2;           // λ^{-2} η m
  return elliptic_point_radial(coeffs.d, diffusion, mass, 1.0 / l2, f,
                               query_radius, refine);
}

double radial_profile_phi(const TransportCoefficients& coeffs, double r) {
  double rp = coeffs.rho_pi;
  double diffusion = M_PI / (4.0 * coeffs.d) * coeffs.nu_smooth / (rp * rp * rp);
  double mass = 1.0 / rp;
  return radial_green_mass(coeffs.d, diffusion, mass, r);
}

}  // namespace alab
