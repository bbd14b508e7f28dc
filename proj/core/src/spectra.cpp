#include "alab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alab/parallel.hpp"

namespace alab {

CriticalSet::CriticalSet(int d_) : d(d_) {
  if (d < 1) throw std::invalid_argument("CriticalSet: d must be >= 1");
}

std::vector<double> CriticalSet::finite_values() const {
  std::vector<double> v;
  for (double x = -2.0 * d; x <= 2.0 * d + 1e-9; x += 4.0) v.push_back(x);
  if (std::none_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    v.push_back(0.0);
  std::sort(v.begin(), v.end());
  return v;
}

double sigma_distance(int d, double E) {
  CriticalSet sigma(d);
  if (std::abs(E) >= sigma.band_edge()) return 0.0;
  double best = std::abs(E);  // distance to 0
  for (double v : sigma.finite_values()) best = std::min(best, std::abs(E - v));
  return best;
}

namespace {

struct BinChunk {
  std::vector<double> count, omega_sum, grad2_sum;
};

}  // namespace

DispersionTable DispersionTable::build(int d, int grid_n, double bin_width,
                                       int threads) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("DispersionTable: bad d");
  if (grid_n < 2) throw std::invalid_argument("DispersionTable: grid too small");
  if (!(bin_width > 0)) throw std::invalid_argument("DispersionTable: bad bin width");

  DispersionTable t;
  t.d_ = d;
  t.n_ = grid_n;
  t.width_ = bin_width;
  t.lo_ = -2.0 * d - bin_width;  // one pad bin on each side catches ω = ±2d
  std::size_t bins = static_cast<std::size_t>(std::ceil(4.0 * d / bin_width)) + 3;

  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(grid_n);

  // Fixed chunk count: the merge order below does not depend on the worker
  // count, so built tables are bit-identical for any thread setting.
  std::size_t n_chunks = std::min<std::size_t>(64, total);
  std::size_t chunk_len = (total + n_chunks - 1) / n_chunks;
  auto chunks = parallel_map<BinChunk>(n_chunks, threads, [&](std::size_t ci) {
    BinChunk local;
    local.count.assign(bins, 0.0);
    local.omega_sum.assign(bins, 0.0);
    local.grad2_sum.assign(bins, 0.0);
    std::size_t begin = ci * chunk_len;
    std::size_t end = std::min(total, begin + chunk_len);
    double step = 2.0 * M_PI / grid_n;
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t rest = i;
      double omega = 0.0, grad2 = 0.0;
      for (int j = 0; j < d; ++j) {
        double xi = step * static_cast<double>(rest % grid_n);
        rest /= grid_n;
        omega += 2.0 * std::cos(xi);
        double s = 2.0 * std::sin(xi);
        grad2 += s * s;
      }
      auto b = static_cast<std::size_t>((omega - t.lo_) / bin_width);
      if (b >= bins) b = bins - 1;
      local.count[b] += 1.0;
      local.omega_sum[b] += omega;
      local.grad2_sum[b] += grad2;
    }
    return local;
  });

  t.count_.assign(bins, 0.0);
  t.omega_sum_.assign(bins, 0.0);
  t.grad2_sum_.assign(bins, 0.0);
  for (const auto& c : chunks) {
    for (std::size_t b = 0; b < bins; ++b) {
      t.count_[b] += c.count[b];
      t.omega_sum_[b] += c.omega_sum[b];
      t.grad2_sum_[b] += c.grad2_sum[b];
    }
  }
  return t;
}

DispersionTable DispersionTable::build_default(int d, int threads) {
  return build(d, d <= 2 ? 2048 : 256, 1e-2, threads);
}

int DispersionTable::bin_of(double E) const {
  auto b = static_cast<long>((E - lo_) / width_);
  if (b < 0 || b >= static_cast<long>(count_.size())) return -1;
  return static_cast<int>(b);
}

bool DispersionTable::near_singular(double E) const {
  return sigma_distance(d_, E) < 2.0 * width_;
}

SpectralValue DispersionTable::rho(double E) const {
  if (std::abs(E) >= 2.0 * d_) return {0.0, Confidence::out_of_band};
  int b = bin_of(E);
  if (b < 0) return {0.0, Confidence::out_of_band};
  double total = std::pow(static_cast<double>(n_), d_);
  double v = count_[b] / (width_ * total);
  return {v, near_singular(E) ? Confidence::near_singular : Confidence::ok};
}

SpectralValue DispersionTable::nu(double E) const {
  if (std::abs(E) >= 2.0 * d_) return {0.0, Confidence::out_of_band};
  int b = bin_of(E);
  if (b < 0) return {0.0, Confidence::out_of_band};
  double total = std::pow(static_cast<double>(n_), d_);
  double v = grad2_sum_[b] / (width_ * total);
  return {v, near_singular(E) ? Confidence::near_singular : Confidence::ok};
}

cplx DispersionTable::free_diag(cplx z) const {
  if (!(z.imag() > 0)) throw std::invalid_argument("free_diag: Im z must be > 0");
  double total = std::pow(static_cast<double>(n_), d_);
  cplx acc{0.0, 0.0};
  for (std::size_t b = 0; b < count_.size(); ++b) {
    if (count_[b] == 0.0) continue;
    double node = omega_sum_[b] / count_[b];
    acc += count_[b] / (node - z);
  }
  return acc / total;
}

double DispersionTable::rho_boundary(double E) const {
  double eta0 = 2.0 * width_;
  double a = free_diag({E, eta0}).imag();
  double b = free_diag({E, 2.0 * eta0}).imag();
  return (2.0 * a - b) / M_PI;
}

double DispersionTable::nu_boundary(double E) const {
  double total = std::pow(static_cast<double>(n_), d_);
  auto transform = [&](double eta) {
    cplx acc{0.0, 0.0};
    for (std::size_t b = 0; b < count_.size(); ++b) {
      if (count_[b] == 0.0) continue;
      double node = omega_sum_[b] / count_[b];
      acc += grad2_sum_[b] / (node - cplx{E, eta});
    }
    return (acc / total).imag();
  };
  double eta0 = 2.0 * width_;
  return (2.0 * transform(eta0) - transform(2.0 * eta0)) / M_PI;
}

double DispersionTable::rho_integral() const {
  double total = std::pow(static_cast<double>(n_), d_);
  double s = 0.0;
  for (double c : count_) s += c;
  return s / total;
}

double DispersionTable::nu_integral() const {
  double total = std::pow(static_cast<double>(n_), d_);
  double s = 0.0;
  for (double g : grad2_sum_) s += g;
  return s / total;
}

Exponents exponents(int d) {
  if (d < 2) throw std::invalid_argument("exponents: d must be >= 2");
  Exponents e{};
  if (d == 3)
    e.kappa = 2.0 / 9.0;
  else if (d <= 6)
    e.kappa = 2.0 / 13.0;
  else if (d <= 12)
    e.kappa = (2.0 * d - 12.0) / (3.0 * d - 12.0);
  else
    e.kappa = 0.5;
  if (d == 2 || d == 4)
    e.p = 6.0;
  else if (d == 3)
    e.p = 14.0 / 3.0;
  else
    e.p = 2.0 * d / (d - 3.0);
  return e;
}

double phi_d(int d, double lambda, double eta) {
  if (d < 2) throw std::invalid_argument("phi_d: d must be >= 2");
  if (!(lambda > 0) || !(eta > 0)) throw std::invalid_argument("phi_d: need lambda, eta > 0");
  double ratio = lambda * lambda / eta;
  if (d == 3) return std::pow(lambda, 0.75) * std::pow(ratio, 27.0 / 8.0);
  if (d <= 6) return std::sqrt(lambda) * std::pow(ratio, 13.0 / 4.0);
  return lambda * ratio * ratio;
}

double crossing_integral(int d, cplx z, int resolution) {
  if (!(z.imag() > 0))
    throw std::invalid_argument("crossing_integral: Im z must be > 0");
  if (resolution < 2 || resolution % 2 != 0)
    throw std::invalid_argument("crossing_integral: resolution must be even >= 2");
  TorusLattice grid(d, resolution);
  std::vector<cplx> v(grid.site_count());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = 1.0 / std::abs(dispersion(grid, k) - z);
  fft::inverse(d, resolution, v);
  double s = 0.0;
  for (const auto& x : v) {
    double re = x.real();  // symbol is real and even, so v is real
    s += re * re * re * re;
  }
  return s;
}

}  // namespace alab
