#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "alab/fft.hpp"

namespace alab {

constexpr int kMaxDim = 6;

using Coord = std::array<int, kMaxDim>;

// z = E + iη with coupling λ. η > 0 is enforced at construction; everything
// downstream may assume the resolvent set.
struct SpectralParam {
  double E = 0.0;
  double eta = 0.0;
  double lambda = 0.0;

  SpectralParam() = default;
  SpectralParam(double E_, double eta_, double lambda_ = 0.0);
  cplx z() const { return {E, eta}; }
};

// The torus Z^d_L: cubic grid of even side L, sites identified with
// Z^d ∩ [-L/2, L/2)^d. Linear indices are row-major (last coordinate
// fastest) so that fields map directly onto the DFT layout. Immutable.
class TorusLattice {
 public:
  TorusLattice(int d, int side);

  int dim() const { return d_; }
  int side() const { return side_; }
  std::size_t site_count() const { return count_; }

  // Canonical representative in [-L/2, L/2).
  int canonical(long c) const;
  // Linear index from (any) integer coordinates.
  std::size_t index(const Coord& c) const;
  // Canonical coordinates of a linear index.
  Coord coord(std::size_t i) const;

  // The 2d nearest neighbors of site i.
  std::array<std::size_t, 2 * kMaxDim> neighbors(std::size_t i) const;

  // Dual grid point ξ_k = 2π k / L attached to linear index i (same layout).
  // Components returned in [0, 2π).
  std::array<double, kMaxDim> dual_point(std::size_t i) const;

  // Squared Euclidean length of the minimal-norm representative of coord(i).
  double min_norm2(std::size_t i) const;

  bool operator==(const TorusLattice& o) const {
    return d_ == o.d_ && side_ == o.side_;
  }

 private:
  int d_;
  int side_;
  std::size_t count_;
};

// A complex field on the torus, one value per site.
struct LatticeField {
  TorusLattice lattice;
  std::vector<cplx> values;

  explicit LatticeField(const TorusLattice& lat)
      : lattice(lat), values(lat.site_count(), cplx{0.0, 0.0}) {}
  LatticeField(const TorusLattice& lat, std::vector<cplx> v);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  double norm_lp(double p) const;  // p in [1, ∞); use norm_linf for p = ∞
  double norm_l1() const { return norm_lp(1.0); }
  double norm_l2() const;
  double norm_linf() const;
};

// ω(ξ) = Σ_j 2 cos(ξ_j), the symbol of the nearest-neighbor Laplacian.
double dispersion(const std::array<double, kMaxDim>& xi, int d);
double dispersion(const TorusLattice& lattice, std::size_t dual_index);

// (Δf)(x) = Σ_{|y-x|=1 mod L} f(y), applied as a direct stencil.
LatticeField apply_laplacian(const LatticeField& f);

// A translation-invariant operator given by its symbol on the dual grid,
// applied via DFT: (Af)(x) = L^{-d} Σ_ξ e^{-ixξ} m(ξ) f̂(ξ).
struct FourierMultiplier {
  TorusLattice lattice;
  std::vector<cplx> symbol;  // indexed like sites, entry k ↔ ξ_k

  FourierMultiplier(const TorusLattice& lat, std::vector<cplx> sym);

  LatticeField apply(const LatticeField& f) const;
  // (A δ_0)(x), i.e. the convolution kernel of the operator.
  LatticeField origin_column() const;
  static FourierMultiplier laplacian(const TorusLattice& lat);
};

// Column of the free resolvent: u = (Δ_L - z)^{-1} δ_x by inverse DFT of
// e^{ixξ}/(ω(ξ) - z). λ carried by z is ignored. Requires η > 0.
LatticeField free_resolvent_column(const TorusLattice& lattice, SpectralParam z,
                                   std::size_t x);

}  // namespace alab
