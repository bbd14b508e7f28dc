#include "alab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace alab::fft {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;  // FFTW_BACKWARD, our e^{+ixξ} convention
  fftw_plan inv = nullptr;  // FFTW_FORWARD, scaled by side^{-d} afterwards
};

// FFTW planning is not thread-safe; new-array execution is.
std::mutex plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
  static std::map<std::pair<int, int>, PlanPair> cache;
  return cache;
}

PlanPair get_plans(int d, int side) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(d, side);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(side);
  std::vector<int> dims(d, side);
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair plans;
  // FFTW_UNALIGNED lets the plan run on any caller buffer.
  plans.fwd = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.inv = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plans.fwd || !plans.inv) throw std::runtime_error("fftw plan creation failed");
  cache[key] = plans;
  return plans;
}

std::size_t expect_size(int d, int side, std::size_t got) {
  if (d < 1 || side < 1) throw std::invalid_argument("fft: bad grid");
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(side);
  if (got != n) throw std::invalid_argument("fft: data size does not match grid");
  return n;
}

}  // namespace

void forward(int d, int side, std::vector<cplx>& data) {
  expect_size(d, side, data.size());
  auto plans = get_plans(d, side);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.fwd, buf, buf);
}

void inverse(int d, int side, std::vector<cplx>& data) {
  std::size_t n = expect_size(d, side, data.size());
  auto plans = get_plans(d, side);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.inv, buf, buf);
  double scale = 1.0 / static_cast<double>(n);
  for (auto& v : data) v *= scale;
}

}  // namespace alab::fft
