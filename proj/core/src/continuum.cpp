#include "alab/continuum.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace alab {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

template <class F>
double gl_panel(F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
  return s * half;
}

template <class F>
double gl_composite(F&& f, double a, double b, int panels) {
  double s = 0.0, h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) s += gl_panel(f, a + p * h, a + (p + 1) * h);
  return s;
}

double sphere_area(int d) {
  // |S^{d-1}| = 2 π^{d/2} / Γ(d/2)
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

double RadialBump::operator()(double radius) const {
  double s = std::abs(radius) / scale;
  if (s <= 1.0) return amplitude;
  if (s >= 2.0) return 0.0;
  double t = 2.0 - s;  // in (0,1)
  double smooth = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  return amplitude * smooth;
}

double radial_fourier(int d, const RadialBump& f, double rho, int refine) {
  if (d < 1) throw std::invalid_argument("radial_fourier: bad d");
  double R = f.support_radius();
  // Resolve both the profile (>= 32 panels) and the Bessel oscillation.
  int panels = std::max(32, static_cast<int>(std::ceil(rho * R / M_PI)) * 4);
  panels <<= refine;
  double nu = 0.5 * d - 1.0;
  if (rho * R < 1e-12) {
    double vol = gl_composite([&](double r) { return f(r) * std::pow(r, d - 1); },
                              0.0, R, panels);
    return sphere_area(d) * vol;
  }
  double integral = gl_composite(
      [&](double r) {
        return f(r) * std::cyl_bessel_j(nu, rho * r) * std::pow(r, 0.5 * d);
      },
      0.0, R, panels);
  return std::pow(2.0 * M_PI, 0.5 * d) * std::pow(rho, -nu) * integral;
}

double screened_green(int d, double diffusion, double mass, double s) {
  if (!(diffusion > 0) || !(mass > 0) || !(s > 0))
    throw std::invalid_argument("screened_green: need positive arguments");
  double mu = std::sqrt(mass / diffusion);
  double nu = 0.5 * d - 1.0;
  return std::pow(2.0 * M_PI, -0.5 * d) / diffusion * std::pow(mu / s, nu) *
         std::cyl_bessel_k(nu, mu * s);
}

double elliptic_point_radial(int d, double diffusion, double mass, double c,
                             const RadialBump& f, double s, int refine) {
  if (!(diffusion > 0) || !(mass > 0))
    throw std::invalid_argument("elliptic_point_radial: need positive coefficients");
  if (f.amplitude == 0.0 || c == 0.0) return 0.0;

  // u(s) = c (2π)^{-d} ∫ e^{iξx} f̂(|ξ|)/(D|ξ|² + m) dξ, reduced to a radial
  // integral. Panels track the slower of the two oscillation scales and the
  // bump's own frequency support ~ 1/scale.
  double nu = 0.5 * d - 1.0;
  double len = std::max(s, f.scale);
  double panel = M_PI / len;
  double rel_tol = 1e-9;

  auto integrand = [&](double rho) {
    double fhat = radial_fourier(d, f, rho, refine);
    double sym = 1.0 / (diffusion * rho * rho + mass);
    if (s < 1e-12 * f.scale) return fhat * sym * std::pow(rho, d - 1.0);
    return fhat * sym * std::cyl_bessel_j(nu, rho * s) * std::pow(rho, 0.5 * d);
  };

  int sub = 4 << refine;
  double acc = 0.0;
  double a = 0.0;
  int max_panels = 4000;
  for (int p = 0; p < max_panels; ++p) {
    double contribution = gl_composite(integrand, a, a + panel, sub);
    acc += contribution;
    a += panel;
    bool past_bump = a * f.scale > 40.0;
    if (past_bump && std::abs(contribution) < rel_tol * std::abs(acc)) break;
  }

  double prefactor;
  if (s < 1e-12 * f.scale)
    prefactor = std::pow(2.0 * M_PI, -d) * sphere_area(d);
  else
    prefactor = std::pow(2.0 * M_PI, -0.5 * d) * std::pow(s, -nu);
  return c * prefactor * acc;
}

double radial_green_mass(int d, double diffusion, double mass, double r) {
  if (!(r > 0)) throw std::invalid_argument("radial_green_mass: r must be > 0");
  if (!(diffusion > 0) || !(mass > 0))
    throw std::invalid_argument("radial_green_mass: need positive coefficients");
  RadialBump chi{1.0, 1.0};
  double mu = std::sqrt(mass / diffusion);
  double nu = 0.5 * d - 1.0;
  double area = sphere_area(d);
  double pref = area * std::pow(2.0 * M_PI, -0.5 * d) / diffusion * std::pow(mu, nu);
  // ∫_0^{2r} χ(s/r) K_ν(μs) s^{d/2} ds; the K_ν singularity at 0 is tamed by
  // the s^{d/2} factor (net growth ~ s for d >= 2).
  double upper = 2.0 * r;
  int panels = std::max(64, static_cast<int>(std::ceil(mu * upper / 2.0)));
  panels = std::min(panels, 20000);
  double integral = gl_composite(
      [&](double s) {
        return chi(s / r) * std::cyl_bessel_k(nu, mu * s) * std::pow(s, 0.5 * d);
      },
      0.0, upper, panels);
  return pref * integral;
}

}  // namespace alab
