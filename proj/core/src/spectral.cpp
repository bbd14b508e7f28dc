#include "alab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alab/fft.hpp"

namespace alab {

namespace {

EigenDecomposition plane_wave_basis(const TorusLattice& lat) {
  std::size_t n = lat.site_count();
  EigenDecomposition eig{lat, 0.0, Eigen::VectorXd(n), Eigen::MatrixXcd(n, n), 0.0, 0.0};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> energy(n);
  for (std::size_t k = 0; k < n; ++k) energy[k] = dispersion(lat, k);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energy[a] < energy[b]; });

  double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t k = order[j];
    eig.energies[j] = energy[k];
    auto xi = lat.dual_point(k);
    for (std::size_t i = 0; i < n; ++i) {
      Coord c = lat.coord(i);
      double phase = 0.0;
      for (int a = 0; a < lat.dim(); ++a) phase += c[a] * xi[a];
      eig.psi(i, j) = std::polar(norm, -phase);
    }
  }
  return eig;
}

}  // namespace

EigenDecomposition dense_eig(const DisorderRealization& realization, double lambda) {
  const TorusLattice& lat = realization.lattice;
  std::size_t n = lat.site_count();
  if (n > 4096) throw std::invalid_argument("dense_eig: size cap L^d <= 4096");
  if (lambda == 0.0) return plane_wave_basis(lat);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = lat.neighbors(i);
    for (int k = 0; k < 2 * lat.dim(); ++k) H(i, nb[k]) += 1.0;
    H(i, i) += lambda * realization.g[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_eig: eigensolver failed");

  EigenDecomposition eig{lat, lambda, solver.eigenvalues(),
                         solver.eigenvectors().cast<cplx>(), 0.0, 0.0};
  Eigen::MatrixXd R = H * solver.eigenvectors() -
                      solver.eigenvectors() * solver.eigenvalues().asDiagonal();
  eig.max_residual = R.colwise().norm().maxCoeff();
  Eigen::MatrixXd G = solver.eigenvectors().transpose() * solver.eigenvectors();
  eig.gram_defect = (G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  return eig;
}

LocalizationReport localized_set(const EigenDecomposition& eig, double r,
                                 std::optional<std::size_t> x0,
                                 std::optional<std::pair<double, double>> window) {
  if (r < 1.0) throw std::invalid_argument("localized_set: r must be >= 1");
  const TorusLattice& lat = eig.lattice;
  std::size_t n = lat.site_count();
  int d = lat.dim();

  LocalizationReport rep;
  rep.r = r;
  rep.threshold = 1.0 - std::pow(r, -4.0 * d);
  rep.best_mass.resize(n);
  rep.best_center.assign(n, x0.value_or(0));
  rep.member.resize(n);

  std::vector<char> ball(n);
  for (std::size_t i = 0; i < n; ++i) ball[i] = lat.min_norm2(i) <= r * r ? 1 : 0;

  if (x0) {
    // Fixed center: direct sum over the ball translated to x0.
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < n; ++i)
      if (ball[i]) offsets.push_back(i);
    Coord c0 = lat.coord(*x0);
    for (std::size_t j = 0; j < n; ++j) {
      double mass = 0.0;
      for (std::size_t off : offsets) {
        Coord c = lat.coord(off);
        for (int a = 0; a < d; ++a) c[a] += c0[a];
        mass += std::norm(eig.psi(lat.index(c), j));
      }
      rep.best_mass[j] = mass;
    }
  } else {
    // Free center: correlate |ψ|² with the ball indicator by FFT. The ball
    // is symmetric, so correlation equals convolution.
    std::vector<cplx> ball_hat(n);
    for (std::size_t i = 0; i < n; ++i) ball_hat[i] = ball[i] ? 1.0 : 0.0;
    fft::forward(d, lat.side(), ball_hat);
    std::vector<cplx> work(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) work[i] = std::norm(eig.psi(i, j));
      fft::forward(d, lat.side(), work);
      for (std::size_t k = 0; k < n; ++k) work[k] *= ball_hat[k];
      fft::inverse(d, lat.side(), work);
      double best = -1.0;
      std::size_t center = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double m = work[i].real();
        if (m > best) {
          best = m;
          center = i;
        }
      }
      rep.best_mass[j] = std::min(1.0, std::max(0.0, best));
      rep.best_center[j] = center;
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    bool in_window = !window || (eig.energies[j] >= window->first &&
                                 eig.energies[j] <= window->second);
    rep.member[j] = rep.best_mass[j] >= rep.threshold ? 1 : 0;
    if (in_window) {
      ++rep.window_total;
      if (rep.member[j]) ++rep.count;
    }
  }
  return rep;
}

namespace {

cplx resolvent_entry(const EigenDecomposition& eig, std::size_t x, std::size_t y,
                     cplx z) {
  cplx s{0.0, 0.0};
  for (long j = 0; j < eig.energies.size(); ++j)
    s += eig.psi(x, j) * std::conj(eig.psi(y, j)) / (eig.energies[j] - z);
  return s;
}

}  // namespace

CountBoundReport localization_count_bound_check(const EigenDecomposition& eig,
                                                double E0, double eta, double r,
                                                std::size_t x0) {
  const TorusLattice& lat = eig.lattice;
  std::size_t n = lat.site_count();
  int d = lat.dim();
  CountBoundReport rep;

  std::vector<std::size_t> ball_sites;
  Coord c0 = lat.coord(x0);
  for (std::size_t i = 0; i < n; ++i) {
    if (lat.min_norm2(i) > r * r) continue;
    Coord c = lat.coord(i);
    for (int a = 0; a < d; ++a) c[a] += c0[a];
    ball_sites.push_back(lat.index(c));
  }

  cplx z{E0, eta};
  double sum2 = 0.0;
  for (std::size_t y : ball_sites) sum2 += std::norm(resolvent_entry(eig, x0, y, z));
  rep.delta = eta * sum2;  // smallest δ with Σ|G|² <= δ/η

  // Diagonal sup sampled on a 33-point energy grid across the window.
  for (std::size_t y : ball_sites) {
    for (int k = 0; k <= 32; ++k) {
      double E = E0 - eta + 2.0 * eta * k / 32.0;
      rep.diag_sup = std::max(rep.diag_sup,
                              std::abs(resolvent_entry(eig, y, y, cplx{E, eta})));
    }
  }

  LocalizationReport loc =
      localized_set(eig, r, x0, std::make_pair(E0 - eta, E0 + eta));
  rep.count = loc.count;
  double rd = std::pow(r, d);
  rep.bound = (rep.delta * eta * rd +
               std::pow(r, -2.0 * d) / std::max(rep.delta, 1e-300) * eta) *
              rep.diag_sup;
  rep.bound_basic = rep.diag_sup * eta * rd;
  return rep;
}

namespace {

// Adaptive Simpson on [a, b] to absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, bool& ok) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-12) {
    if (depth <= 0) ok = false;
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    ok = false;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}

template <class F>
double integrate(F&& f, double a, double b, double tol, bool& ok) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48, ok);
}

}  // namespace

PlancherelReport plancherel_identity_check(const EigenDecomposition& eig,
                                           const std::vector<cplx>& psi_in,
                                           double eta, std::size_t x) {
  if (!(eta > 0)) throw std::invalid_argument("plancherel: eta must be > 0");
  std::size_t n = eig.lattice.site_count();
  if (psi_in.size() != n) throw std::invalid_argument("plancherel: bad state size");

  // w_j = <ψ_j, ψ> ψ_j(x)
  std::vector<cplx> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx c{0.0, 0.0};
    for (std::size_t y = 0; y < n; ++y) c += std::conj(eig.psi(y, j)) * psi_in[y];
    w[j] = c * eig.psi(x, j);
  }

  PlancherelReport rep;
  // Closed form: Σ_{jk} w_j conj(w_k) / (2η + i(E_j - E_k)).
  cplx lhs{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      lhs += w[j] * std::conj(w[k]) /
             cplx{2.0 * eta, eig.energies[j] - eig.energies[k]};
  rep.lhs = lhs.real();

  double lam = eig.lambda;
  int d = eig.lattice.dim();
  double W = 2.0 * d + 6.0 * std::abs(lam) + 10.0;
  auto amplitude = [&](double E) {
    cplx g{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      g += w[j] / cplx{eig.energies[j] - E, -eta};
    return std::norm(g);
  };
  bool ok = true;
  double scale = std::max(std::abs(rep.lhs), 1e-300);
  double main = integrate(amplitude, -W, W, 2.0 * M_PI * scale * 1e-9, ok);

  // Exact tails: Σ_{jk} w_j conj(w_k) ∫ dE/((E-a_j)(E-b_k)) with
  // a = E_j - iη, b = E_k + iη; the principal log stays on one branch for
  // |E| >= W since W clears the spectrum by 10.
  cplx tail{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx a{eig.energies[j], -eta}, b{eig.energies[k], eta};
      cplx inv = 1.0 / (a - b);
      cplx right = -inv * std::log((W - a) / (W - b));
      cplx left = inv * std::log((-W - a) / (-W - b));
      tail += w[j] * std::conj(w[k]) * (right + left);
    }
  }
  rep.rhs = (main + tail.real()) / (2.0 * M_PI);
  rep.quad_converged = ok;
  rep.rel_gap = std::abs(rep.lhs - rep.rhs) / scale;
  return rep;
}

PropagatorMoments propagator_moments(const EigenDecomposition& eig, double T,
                                     std::size_t x0, double outside_radius) {
  const TorusLattice& lat = eig.lattice;
  std::size_t n = lat.site_count();
  Eigen::VectorXd w2(n), wout(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = lat.min_norm2(i);
    w2[i] = r2;
    wout[i] = r2 >= outside_radius * outside_radius ? 1.0 : 0.0;
  }
  Eigen::MatrixXcd B2 = eig.psi.adjoint() * w2.asDiagonal() * eig.psi;
  Eigen::MatrixXcd Bout = eig.psi.adjoint() * wout.asDiagonal() * eig.psi;

  auto favg = [&](double delta) -> cplx {
    if (T <= 0.0 || std::abs(delta) * T < 1e-12) return 1.0;
    cplx itd{0.0, -T * delta};
    return (1.0 - std::exp(itd)) / (cplx{0.0, 1.0} * T * delta);
  };

  PropagatorMoments out;
  cplx second{0, 0}, outside{0, 0}, total{0, 0};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx coupling = std::conj(eig.psi(x0, j)) * eig.psi(x0, k) *
                      favg(eig.energies[j] - eig.energies[k]);
      second += coupling * B2(j, k);
      outside += coupling * Bout(j, k);
      if (j == k) total += coupling;  // Ψ^H 1 Ψ = Id by orthonormality
    }
  }
  out.second_moment = second.real();
  out.outside_mass = outside.real();
  out.total_mass = total.real();
  return out;
}

double projection_comparison(const EigenDecomposition& eig_h,
                             const EigenDecomposition& eig_free, double E,
                             double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("projection_comparison: alpha > 0");
  std::size_t n = eig_h.lattice.site_count();
  if (eig_free.lattice.site_count() != n)
    throw std::invalid_argument("projection_comparison: lattice mismatch");
  RadialBump chi{1.0, 1.0};

  auto functional = [&](const EigenDecomposition& eig) {
    Eigen::VectorXd f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = chi((eig.energies[j] - E) / alpha);
    Eigen::MatrixXcd out = eig.psi * f.asDiagonal() * eig.psi.adjoint();
    return out;
  };
  Eigen::MatrixXcd D = functional(eig_h) - functional(eig_free);

  // Hermitian difference: 2-norm = spectral radius, via power iteration with
  // a deterministic start.
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
  for (std::size_t i = 0; i < n; ++i) v[i] += cplx{0.0, static_cast<double>(i % 7) / 7.0};
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = D * v;
    double norm = v.norm();
    if (norm < 1e-300) return 0.0;
    v /= norm;
    if (it > 4 && std::abs(norm - prev) <= 1e-10 * std::max(norm, 1e-300)) return norm;
    prev = norm;
  }
  return prev;
}

}  // namespace alab
