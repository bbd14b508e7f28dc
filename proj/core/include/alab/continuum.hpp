#pragma once

namespace alab {

// Radial C^2 bump profile: 1 on [0, scale], quintic-smoothstep decay to 0 at
// 2*scale, identically 0 beyond. Radially non-increasing, so χ(x/r) is
// pointwise non-decreasing in r.
struct RadialBump {
  double scale = 1.0;
  double amplitude = 1.0;

  double operator()(double radius) const;
  double support_radius() const { return 2.0 * scale; }
};

// Fourier transform of the radial profile f on R^d, evaluated at |ξ| = rho.
double radial_fourier(int d, const RadialBump& f, double rho, int refine = 0);

// Radial Green's function of (-D Δ + m) on R^d (Matérn form),
// G(s) = D^{-1} (2π)^{-d/2} (μ/s)^{d/2-1} K_{d/2-1}(μ s) with μ = sqrt(m/D).
double screened_green(int d, double diffusion, double mass, double s);

// u(|x| = s) solving (-D Δ + m) u = c·f for radial bump f, via radial Fourier
// quadrature. `refine` doubles the quadrature density (resolution oracle).
double elliptic_point_radial(int d, double diffusion, double mass, double c,
                             const RadialBump& f, double s, int refine = 0);

// φ(r) = ∫ χ(x/r) G(x) dx for the default unit bump χ and G = screened_green,
// computed in real space (no oscillatory quadrature).
double radial_green_mass(int d, double diffusion, double mass, double r);

}  // namespace alab
