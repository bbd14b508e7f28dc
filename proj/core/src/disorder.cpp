#include "alab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "alab/parallel.hpp"
#include "alab/rng.hpp"
#include "alab/sce.hpp"

namespace alab {

DisorderRealization DisorderRealization::sample(const TorusLattice& lattice,
                                                std::uint64_t seed,
                                                std::uint32_t index, int threads) {
  DisorderRealization r{lattice, seed, index, std::vector<double>(lattice.site_count())};
  parallel_chunks(lattice.site_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Coord c = lattice.coord(i);
      r.g[i] = standard_normal_at(seed, index, c.data(), lattice.dim());
    }
  });
  return r;
}

double DisorderRealization::empirical_mean() const {
  double s = 0.0;
  for (double v : g) s += v;
  return s / static_cast<double>(g.size());
}

double DisorderRealization::empirical_variance() const {
  double m = empirical_mean();
  double s = 0.0;
  for (double v : g) s += (v - m) * (v - m);
  return s / static_cast<double>(g.size());
}

double ResolventColumn::ward_error() const {
  double n2 = 0.0;
  for (const auto& v : values) n2 += std::norm(v);
  if (n2 == 0.0) return 0.0;
  return std::abs(params.eta * n2 - values[source].imag()) / n2;
}

namespace {

// θ(z) used by the renormalized preconditioner, memoized per parameter set.
cplx preconditioner_theta(const TorusLattice& lattice, SpectralParam p) {
  struct Key {
    int d, side;
    double E, eta, lambda;
    bool operator<(const Key& o) const {
      return std::tie(d, side, E, eta, lambda) <
             std::tie(o.d, o.side, o.E, o.eta, o.lambda);
    }
  };
  static std::map<Key, cplx> cache;
  static std::mutex mutex;
  Key key{lattice.dim(), lattice.side(), p.E, p.eta, p.lambda};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  cplx theta = solve_theta(lattice, p).theta;
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, theta);
  return theta;
}

struct StencilOperator {
  const DisorderRealization& realization;
  SpectralParam p;
  // (Δ + λV - z) u
  void apply(const std::vector<cplx>& u, std::vector<cplx>& out) const {
    const TorusLattice& lat = realization.lattice;
    int d = lat.dim();
    cplx z = p.z();
    for (std::size_t i = 0; i < u.size(); ++i) {
      auto nb = lat.neighbors(i);
      cplx s{0.0, 0.0};
      for (int k = 0; k < 2 * d; ++k) s += u[nb[k]];
      out[i] = s + (p.lambda * realization.g[i] - z) * u[i];
    }
  }
};

struct FreePreconditioner {
  const TorusLattice& lattice;
  std::vector<cplx> symbol;  // 1 / (ω(ξ) - z - λ²θ)

  FreePreconditioner(const TorusLattice& lat, SpectralParam p) : lattice(lat) {
    cplx shift = p.z();
    if (p.lambda > 0)
      shift += p.lambda * p.lambda * preconditioner_theta(lat, p);
    symbol.resize(lat.site_count());
    for (std::size_t k = 0; k < symbol.size(); ++k)
      symbol[k] = 1.0 / (dispersion(lat, k) - shift);
  }

  void apply(std::vector<cplx>& u) const {
    fft::forward(lattice.dim(), lattice.side(), u);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] *= symbol[k];
    fft::inverse(lattice.dim(), lattice.side(), u);
  }
};

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Right-preconditioned BiCGStab on (H - z) P v = δ_x, u = P v. Residuals are
// those of the unpreconditioned system, so the reported residual is the true
// relative one (||b|| = 1).
ResolventColumn solve_iterative(const DisorderRealization& realization,
                                SpectralParam p, std::size_t x,
                                const SolverOptions& options) {
  const TorusLattice& lat = realization.lattice;
  std::size_t n = lat.site_count();
  StencilOperator A{realization, p};
  FreePreconditioner P(lat, p);

  double gmax = 0.0;
  for (double v : realization.g) gmax = std::max(gmax, std::abs(v));
  double cond_estimate =
      (2.0 * lat.dim() + p.lambda * gmax + std::abs(p.z())) / p.eta;
  int cap = static_cast<int>(std::min<double>(
      options.max_matvec, std::max(64.0, 20.0 * std::sqrt(cond_estimate))));

  ResolventColumn col;
  col.source = x;
  col.params = p;
  col.used = SolveMethod::iterative;

  std::vector<cplx> u(n, cplx{0, 0}), r(n, cplx{0, 0});
  r[x] = 1.0;  // b = δ_x, initial guess 0
  std::vector<cplx> rhat = r, pvec = r, phat(n), v(n), s(n), shat(n), t(n);
  cplx rho{1, 0}, alpha{1, 0}, omega{1, 0};
  std::vector<double> history;
  bool fresh = true;  // p was just (re)set to r

  int matvec = 0;
  while (matvec < cap) {
    cplx rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300) {  // breakdown: restart from current residual
      rhat = r;
      pvec = r;
      rho = alpha = omega = cplx{1, 0};
      fresh = true;
      continue;
    }
    if (!fresh) {
      cplx beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i)
        pvec[i] = r[i] + beta * (pvec[i] - omega * v[i]);
    }
    fresh = false;
    rho = rho_new;
    phat = pvec;
    P.apply(phat);
    A.apply(phat, v);
    ++matvec;
    cplx denom = dot(rhat, v);
    if (std::abs(denom) < 1e-300) {
      rhat = r;
      pvec = r;
      rho = alpha = omega = cplx{1, 0};
      fresh = true;
      continue;
    }
    alpha = rho / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    for (std::size_t i = 0; i < n; ++i) u[i] += alpha * phat[i];
    double snorm = norm2(s);
    history.push_back(snorm);
    ++col.iterations;
    if (snorm <= options.tolerance) {
      r = s;
      break;
    }
    shat = s;
    P.apply(shat);
    A.apply(shat, t);
    ++matvec;
    cplx tt = dot(t, t);
    if (std::abs(tt) < 1e-300) {
      r = s;
      rhat = r;
      pvec = r;
      fresh = true;
      continue;
    }
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) u[i] += omega * shat[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    double rnorm = norm2(r);
    history.push_back(rnorm);
    if (rnorm <= options.tolerance) break;
  }

  col.matvec = matvec;
  col.values = std::move(u);
  // True residual, independent of the recursion's bookkeeping.
  std::vector<cplx> check(n);
  A.apply(col.values, check);
  check[x] -= 1.0;
  col.residual = norm2(check);
  if (col.residual > options.tolerance) {
    std::ostringstream msg;
    msg << "resolvent_column: iteration cap " << cap << " matvecs reached, residual "
        << col.residual << " > " << options.tolerance << "; history tail:";
    for (std::size_t i = history.size() > 8 ? history.size() - 8 : 0;
         i < history.size(); ++i)
      msg << ' ' << history[i];
    throw std::runtime_error(msg.str());
  }
  return col;
}

ResolventColumn solve_dense(const DisorderRealization& realization, SpectralParam p,
                            std::size_t x, const SolverOptions& options) {
  std::size_t n = realization.lattice.site_count();
  Eigen::MatrixXcd A = dense_shifted_hamiltonian(realization, p);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b[static_cast<long>(x)] = 1.0;
  Eigen::VectorXcd u = A.partialPivLu().solve(b);

  ResolventColumn col;
  col.source = x;
  col.params = p;
  col.used = SolveMethod::dense;
  col.values.assign(u.data(), u.data() + n);
  col.residual = (A * u - b).norm();
  col.iterations = 1;
  if (col.residual > options.tolerance)
    throw std::runtime_error("resolvent_column: dense solve residual above tolerance");
  return col;
}

}  // namespace

ResolventColumn resolvent_column(const DisorderRealization& realization,
                                 SpectralParam params, std::size_t x,
                                 const SolverOptions& options) {
  if (x >= realization.lattice.site_count())
    throw std::invalid_argument("resolvent_column: source site out of range");
  SolveMethod m = options.method;
  if (m == SolveMethod::automatic)
    m = realization.lattice.site_count() < 4096 ? SolveMethod::dense
                                                : SolveMethod::iterative;
  ResolventColumn col = (m == SolveMethod::dense)
                            ? solve_dense(realization, params, x, options)
                            : solve_iterative(realization, params, x, options);
  if (col.ward_error() > 1e-8)
    throw std::runtime_error("resolvent_column: Ward identity violated, solver unhealthy");
  return col;
}

Eigen::MatrixXcd dense_shifted_hamiltonian(const DisorderRealization& realization,
                                           SpectralParam params) {
  const TorusLattice& lat = realization.lattice;
  std::size_t n = lat.site_count();
  if (n > 4096)
    throw std::invalid_argument("dense_shifted_hamiltonian: size cap L^d <= 4096");
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = lat.neighbors(i);
    for (int k = 0; k < 2 * lat.dim(); ++k) A(i, nb[k]) += 1.0;
    A(i, i) += params.lambda * realization.g[i] - params.z();
  }
  return A;
}

NormEstimate one_to_q_norm(const DisorderRealization& realization,
                           SpectralParam params, double q, std::size_t budget,
                           const SolverOptions& options) {
  if (q < 1.0) throw std::invalid_argument("one_to_q_norm: q must be >= 1");
  std::size_t n = realization.lattice.site_count();
  if (budget == 0) budget = 256;
  bool exhaustive = budget >= n;
  std::size_t cols = exhaustive ? n : budget;
  std::size_t stride = exhaustive ? 1 : std::max<std::size_t>(1, n / cols);

  auto norms = parallel_map<double>(cols, options.threads, [&](std::size_t j) {
    std::size_t x = (j * stride) % n;
    ResolventColumn col = resolvent_column(realization, params, x, options);
    LatticeField f(realization.lattice, std::move(col.values));
    return std::isinf(q) ? f.norm_linf() : f.norm_lp(q);
  });
  NormEstimate est;
  est.columns = static_cast<int>(cols);
  est.lower_bound = !exhaustive;
  for (double v : norms) est.value = std::max(est.value, v);
  return est;
}

DerivativeReport derivative_check(const DisorderRealization& realization,
                                  SpectralParam params, std::size_t x,
                                  std::size_t y, std::size_t w, double eps_fd) {
  if (eps_fd < 1e-6 || eps_fd > 1e-3)
    throw std::invalid_argument("derivative_check: eps_fd must be in [1e-6, 1e-3]");
  std::size_t n = realization.lattice.site_count();
  if (n > 4096) throw std::invalid_argument("derivative_check: dense sizes only");

  Eigen::MatrixXcd A = dense_shifted_hamiltonian(realization, params);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::VectorXcd ey = Eigen::VectorXcd::Zero(n), ew = Eigen::VectorXcd::Zero(n);
  ey[static_cast<long>(y)] = 1.0;
  ew[static_cast<long>(w)] = 1.0;
  Eigen::VectorXcd col_y = lu.solve(ey);  // R δ_y; R_xy = col_y[x] by symmetry
  Eigen::VectorXcd col_w = lu.solve(ew);

  DisorderRealization bumped = realization;
  bumped.g[w] += eps_fd;
  Eigen::MatrixXcd A2 = dense_shifted_hamiltonian(bumped, params);
  Eigen::VectorXcd col_y2 = A2.partialPivLu().solve(ey);

  DerivativeReport rep;
  rep.finite_difference = (col_y2[static_cast<long>(x)] - col_y[static_cast<long>(x)]) / eps_fd;
  rep.analytic = -params.lambda * col_w[static_cast<long>(x)] * col_y[static_cast<long>(w)];
  double scale = std::max(std::abs(rep.analytic), 1e-300);
  rep.rel_error = std::abs(rep.finite_difference - rep.analytic) / scale;
  return rep;
}

DecayFit combes_thomas_check(const DisorderRealization& realization,
                             SpectralParam params, std::size_t x,
                             const SolverOptions& options) {
  const TorusLattice& lat = realization.lattice;
  ResolventColumn col = resolvent_column(realization, params, x, options);
  Coord cx = lat.coord(x);
  int kmin = static_cast<int>(std::ceil(2.0 / params.eta)) + 1;
  int kmax = lat.side() / 4;
  DecayFit fit;
  if (kmin >= kmax) return fit;  // inconclusive: no room before wraparound

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = kmin; k <= kmax; ++k) {
    Coord c = cx;
    c[0] = cx[0] + k;
    double a = std::abs(col.values[lat.index(c)]);
    if (a <= 0) continue;
    double lx = k, ly = std::log(a);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 4) return fit;
  double denom = m * sxx - sx * sx;
  fit.rate = (m * sxy - sx * sy) / denom;
  fit.points = m;
  fit.conclusive = true;
  return fit;
}

double torus_doubling_check(int d, int side, std::uint64_t seed,
                            SpectralParam params, const SolverOptions& options) {
  TorusLattice small(d, side), big(d, 2 * side);
  DisorderRealization rs = DisorderRealization::sample(small, seed, 0, options.threads);
  DisorderRealization rb = DisorderRealization::sample(big, seed, 0, options.threads);

  std::size_t origin_s = small.index(Coord{});
  std::size_t origin_b = big.index(Coord{});
  ResolventColumn cs = resolvent_column(rs, params, origin_s, options);
  ResolventColumn cb = resolvent_column(rb, params, origin_b, options);

  double worst = 0.0;
  int window = side / 4;
  for (std::size_t i = 0; i < small.site_count(); ++i) {
    Coord c = small.coord(i);
    bool inside = true;
    for (int j = 0; j < d; ++j) inside = inside && std::abs(c[j]) <= window;
    if (!inside) continue;
    worst = std::max(worst, std::abs(cs.values[i] - cb.values[big.index(c)]));
  }
  return worst;
}

void SolveReport::absorb(const ResolventColumn& column) {
  ++columns;
  worst_residual = std::max(worst_residual, column.residual);
  worst_ward_error = std::max(worst_ward_error, column.ward_error());
  total_matvec += column.matvec;
}

}  // namespace alab
