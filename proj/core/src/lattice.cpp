#include "alab/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace alab {

SpectralParam::SpectralParam(double E_, double eta_, double lambda_)
    : E(E_), eta(eta_), lambda(lambda_) {
  if (!(eta > 0.0)) throw std::invalid_argument("SpectralParam: eta must be > 0");
  if (lambda < 0.0) throw std::invalid_argument("SpectralParam: lambda must be >= 0");
}

TorusLattice::TorusLattice(int d, int side) : d_(d), side_(side) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("TorusLattice: d out of range");
  if (side < 2 || side % 2 != 0)
    throw std::invalid_argument("TorusLattice: side must be an even integer >= 2");
  count_ = 1;
  for (int j = 0; j < d; ++j) count_ *= static_cast<std::size_t>(side);
}

int TorusLattice::canonical(long c) const {
  long L = side_;
  long m = ((c % L) + L) % L;  // [0, L)
  return static_cast<int>(m >= L / 2 ? m - L : m);
}

std::size_t TorusLattice::index(const Coord& c) const {
  std::size_t i = 0;
  long L = side_;
  for (int j = 0; j < d_; ++j) {
    long m = ((static_cast<long>(c[j]) % L) + L) % L;
    i = i * static_cast<std::size_t>(L) + static_cast<std::size_t>(m);
  }
  return i;
}

Coord TorusLattice::coord(std::size_t i) const {
  Coord c{};
  std::size_t L = static_cast<std::size_t>(side_);
  for (int j = d_ - 1; j >= 0; --j) {
    long m = static_cast<long>(i % L);
    i /= L;
    c[j] = canonical(m);
  }
  return c;
}

std::array<std::size_t, 2 * kMaxDim> TorusLattice::neighbors(std::size_t i) const {
  std::array<std::size_t, 2 * kMaxDim> out{};
  Coord c = coord(i);
  int k = 0;
  for (int j = 0; j < d_; ++j) {
    Coord p = c;
    p[j] = c[j] + 1;
    out[k++] = index(p);
    p[j] = c[j] - 1;
    out[k++] = index(p);
  }
  return out;
}

std::array<double, kMaxDim> TorusLattice::dual_point(std::size_t i) const {
  std::array<double, kMaxDim> xi{};
  std::size_t L = static_cast<std::size_t>(side_);
  for (int j = d_ - 1; j >= 0; --j) {
    xi[j] = 2.0 * M_PI * static_cast<double>(i % L) / static_cast<double>(side_);
    i /= L;
  }
  return xi;
}

double TorusLattice::min_norm2(std::size_t i) const {
  Coord c = coord(i);
  double s = 0.0;
  for (int j = 0; j < d_; ++j) s += static_cast<double>(c[j]) * c[j];
  return s;
}

LatticeField::LatticeField(const TorusLattice& lat, std::vector<cplx> v)
    : lattice(lat), values(std::move(v)) {
  if (values.size() != lattice.site_count())
    throw std::invalid_argument("LatticeField: value count != L^d");
}

double LatticeField::norm_lp(double p) const {
  if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
  double s = 0.0;
  for (const auto& v : values) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

double LatticeField::norm_l2() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s);
}

double LatticeField::norm_linf() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, std::abs(v));
  return s;
}

double dispersion(const std::array<double, kMaxDim>& xi, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += 2.0 * std::cos(xi[j]);
  return s;
}

double dispersion(const TorusLattice& lattice, std::size_t dual_index) {
  return dispersion(lattice.dual_point(dual_index), lattice.dim());
}

LatticeField apply_laplacian(const LatticeField& f) {
  const TorusLattice& lat = f.lattice;
  LatticeField out(lat);
  int d = lat.dim();
  for (std::size_t i = 0; i < lat.site_count(); ++i) {
    auto nb = lat.neighbors(i);
    cplx s{0.0, 0.0};
    for (int k = 0; k < 2 * d; ++k) s += f.values[nb[k]];
    out.values[i] = s;
  }
  return out;
}

FourierMultiplier::FourierMultiplier(const TorusLattice& lat, std::vector<cplx> sym)
    : lattice(lat), symbol(std::move(sym)) {
  if (symbol.size() != lattice.site_count())
    throw std::invalid_argument("FourierMultiplier: symbol size != L^d");
}

LatticeField FourierMultiplier::apply(const LatticeField& f) const {
  if (!(f.lattice == lattice))
    throw std::invalid_argument("FourierMultiplier: lattice mismatch");
  std::vector<cplx> work = f.values;
  fft::forward(lattice.dim(), lattice.side(), work);
  for (std::size_t k = 0; k < work.size(); ++k) work[k] *= symbol[k];
  fft::inverse(lattice.dim(), lattice.side(), work);
  return LatticeField(lattice, std::move(work));
}

LatticeField FourierMultiplier::origin_column() const {
  std::vector<cplx> work = symbol;
  fft::inverse(lattice.dim(), lattice.side(), work);
  return LatticeField(lattice, std::move(work));
}

FourierMultiplier FourierMultiplier::laplacian(const TorusLattice& lat) {
  std::vector<cplx> sym(lat.site_count());
  for (std::size_t k = 0; k < sym.size(); ++k) sym[k] = dispersion(lat, k);
  return FourierMultiplier(lat, std::move(sym));
}

LatticeField free_resolvent_column(const TorusLattice& lattice, SpectralParam z,
                                   std::size_t x) {
  std::vector<cplx> work(lattice.site_count());
  Coord cx = lattice.coord(x);
  for (std::size_t k = 0; k < work.size(); ++k) {
    auto xi = lattice.dual_point(k);
    double phase = 0.0;
    for (int j = 0; j < lattice.dim(); ++j) phase += cx[j] * xi[j];
    cplx num = std::polar(1.0, phase);
    work[k] = num / (dispersion(xi, lattice.dim()) - z.z());
  }
  fft::inverse(lattice.dim(), lattice.side(), work);
  return LatticeField(lattice, std::move(work));
}

}  // namespace alab
