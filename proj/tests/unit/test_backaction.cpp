#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sfom/backaction.hpp"
#include "sfom/fft.hpp"
#include "sfom/scenarios.hpp"

using namespace sfom;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SystemParams typical_system(double detuning_over_kappa, double beta_a, double tau) {
  SystemParams p = reference_system();
  p.mode.omega_m = Frequency::from_hz(482e3);
  p.mode.gamma_m = Frequency::from_hz(106.0);
  p.coupling.g_hz_per_m = 5e14;
  p.coupling.beta = beta_a / p.coupling.absorption;
  p.coupling.tau_t = tau;
  p.cavity.detuning_over_kappa = detuning_over_kappa;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST(BareSusceptibility, StaticLimitIsCompliance) {
  const auto mode = typical_system(0, 0, 0).mode;
  const auto chi = bare_susceptibility(mode, 0.0);
  EXPECT_DOUBLE_EQ(chi.real(), 1.0 / mode.spring_constant());
  EXPECT_EQ(chi.imag(), 0.0);
}

TEST(BareSusceptibility, OnResonanceIsImaginary) {
  const auto mode = typical_system(0, 0, 0).mode;
  const auto chi = bare_susceptibility(mode, mode.omega_m.angular());
  EXPECT_NEAR(chi.real(), 0.0, 1e-12 * std::abs(chi));
  EXPECT_NEAR(std::abs(chi) / (mode.quality_factor() / mode.spring_constant()), 1.0, 1e-12);
}

TEST(BareSusceptibility, IntegralMatchesEquipartition) {
  // (1/2π)∫₀^∞ 4Γ m k_B T |χ|² dω = k_B T/k.
  const auto mode = typical_system(0, 0, 0).mode;
  const double w0 = mode.omega_m.angular(), g = mode.gamma_m.angular();
  double sum = 0.0;
  const double lo = w0 - 4000.0 * g, hi = w0 + 4000.0 * g;
  const int n = 4'000'000;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double w = lo + i * h;
    sum += (i == 0 || i == n ? 0.5 : 1.0) * std::norm(bare_susceptibility(mode, w));
  }
  const double integral = 4.0 * g * mode.m_eff * constants::k_B * mode.temperature * sum * h / kTwoPi;
  EXPECT_NEAR(integral / mode.thermal_variance(), 1.0, 1e-3);
}

TEST(PhotothermalFilter, Limits) {
  PhotothermalCoupling c{1.0, 50.0, 0.1, 0.0};
  EXPECT_EQ(photothermal_filter(c, 1e6), std::complex<double>(6.0, 0.0));
  c.tau_t = 1e-6;
  EXPECT_NEAR(std::abs(photothermal_filter(c, 1e15) - 1.0), 0.0, 1e-7);
}

TEST(PhotothermalFilter, KernelFftMatchesClosedForm) {
  // (1/τ)H(t)e^{−t/τ} sampled at dt = τ/1e4 with H(0) = 1/2, trapezoid weights.
  const double tau = 600e-9;
  const double dt = tau / 1e4;
  const std::size_t n = std::size_t{1} << 19;
  RealFft fft(n);
  auto in = fft.real();
  for (std::size_t i = 0; i < n; ++i) in[i] = std::exp(-double(i) * dt / tau) / tau * dt;
  in[0] *= 0.5;
  fft.forward();
  const auto spec = fft.spectrum();
  PhotothermalCoupling c{1.0, 1.0, 1.0, tau};
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double w = kTwoPi * double(k) / (double(n) * dt);
    if (w > 10.0 / tau) break;
    const auto expected = photothermal_filter(c, w) - 1.0;
    worst = std::max(worst, std::abs(spec[k] - expected) / std::abs(expected));
    ++checked;
  }
  EXPECT_GT(checked, 50u);
  EXPECT_LT(worst, 1e-6);
}

TEST(Prefactor, CompositionalOracle) {
  const auto p = typical_system(-0.5, 0.0, 0.0);
  const double w = p.mode.omega_m.angular();
  const auto alpha = intracavity_amplitude(p.cavity, p.drive);
  const auto d_plus = cavity_response(p.cavity, w);
  const auto d_minus = cavity_response(p.cavity, -w);
  const double expected = 4.0 * p.g0() * p.g0() * std::norm(alpha) * w * p.cavity.detuning() /
                          std::norm(d_plus * std::conj(d_minus));
  EXPECT_NEAR(backaction_prefactor(p, w) / expected, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(cavity_pair_response(p.cavity, w) - d_plus * std::conj(d_minus)), 0.0,
              1e-9 * std::abs(d_plus * std::conj(d_minus)));
}

TEST(Prefactor, ZeroWithoutDetuningOrDrive) {
  EXPECT_EQ(backaction_prefactor(typical_system(0.0, 3, 1e-6), 1e6), 0.0);
  auto p = typical_system(-0.5, 3, 1e-6);
  p.drive.power = 0.0;
  EXPECT_EQ(backaction_prefactor(p, 1e6), 0.0);
}

TEST(Prefactor, OddInDetuning) {
  for (double d : {0.1, 0.58, 2.0}) {
    EXPECT_DOUBLE_EQ(backaction_prefactor(typical_system(d, 0, 0), 3e6), -backaction_prefactor(typical_system(-d, 0, 0), 3e6));
  }
}

TEST(Shifts, VanishOnResonance) {
  const auto p = typical_system(0.0, -40.0, 600e-9);
  EXPECT_EQ(delta_omega_m(p), 0.0);
  EXPECT_EQ(delta_gamma_m(p), 0.0);
}

TEST(Shifts, PureRadiationPressureSpring) {
  const auto p = typical_system(-0.4, 0.0, 600e-9);
  const double w = p.mode.omega_m.angular();
  const double kappa = p.cavity.kappa().angular();
  const double delta = p.cavity.detuning();
  const double a = backaction_prefactor(p, w);
  EXPECT_NEAR(delta_omega_m(p) / (a * (kappa * kappa + delta * delta - w * w) / (2.0 * w)), 1.0, 1e-12);
  EXPECT_NEAR(delta_gamma_m(p) / (-a * 2.0 * kappa), 1.0, 1e-12);
  EXPECT_GT(delta_gamma_m(p), 0.0);
}

TEST(Shifts, OddSymmetryOnGrid) {
  for (double ba : {-100.0, -3.0, 0.0, 5.0, 100.0}) {
    for (double tau : {0.0, 1e-8, 600e-9, 1e-5}) {
      for (double d : {0.05, 0.3, 0.58, 1.0, 3.0}) {
        const auto plus = typical_system(d, ba, tau);
        const auto minus = typical_system(-d, ba, tau);
        EXPECT_LE(rel(delta_gamma_m(plus), -delta_gamma_m(minus)), 1e-12);
        EXPECT_LE(rel(delta_omega_m(plus), -delta_omega_m(minus)), 1e-12);
      }
    }
  }
}

TEST(Shifts, InstantThermalResponseRescalesCoupling) {
  for (double ba : {-0.9, 0.5, 40.0}) {
    for (double d : {-0.6, 0.25}) {
      const auto pt = typical_system(d, ba, 0.0);
      auto rp = typical_system(d, 0.0, 0.0);
      rp.coupling.g_hz_per_m *= std::sqrt(1.0 + ba);
      EXPECT_LE(rel(delta_gamma_m(pt), delta_gamma_m(rp)), 1e-9);
      EXPECT_LE(rel(delta_omega_m(pt), delta_omega_m(rp)), 1e-9);
      const auto tiny = typical_system(d, ba, 1e-20);
      EXPECT_LE(rel(delta_gamma_m(tiny), delta_gamma_m(pt)), 1e-9);
      EXPECT_LE(rel(delta_omega_m(tiny), delta_omega_m(pt)), 1e-9);
    }
  }
}

TEST(Shifts, AgreeWithForcePerDisplacement) {
  // −K/m = 2ω_m·δω + i·ω_m·δΓ with K = ħg·δn/δx·(1 + βA/(1 + iωτ)).
  for (double ba : {-100.0, 7.0}) {
    const auto p = typical_system(-0.58, ba, 600e-9);
    const double w = p.mode.omega_m.angular();
    const auto k = constants::hbar * p.coupling.g() * photon_number_response(p, w) * photothermal_filter(p.coupling, w);
    const auto lhs = -k / p.mode.m_eff;
    EXPECT_LE(rel(lhs.real(), 2.0 * w * delta_omega_m(p)), 1e-9);
    EXPECT_LE(rel(lhs.imag(), w * delta_gamma_m(p)), 1e-9);
  }
}

TEST(Shifts, LargeNegativeBetaFlipsDamping) {
  EXPECT_GT(delta_gamma_m(typical_system(-0.58, 0.0, 600e-9)), 0.0);
  EXPECT_LT(delta_gamma_m(typical_system(-0.58, -100.0, 600e-9)), 0.0);
}

TEST(EffectiveSusceptibility, EqualsBareOnResonance) {
  const auto p = typical_system(0.0, 10.0, 600e-9);
  for (double w : {0.0, 1e6, 3.02e6, 5e6}) EXPECT_EQ(effective_susceptibility(p, w), bare_susceptibility(p.mode, w));
}

TEST(EffectiveSusceptibility, PeakAndWidthFollowShifts) {
  const auto p = heating_mode();
  const auto pt = backaction_point(p);
  const double w0 = p.mode.omega_m.angular();
  const double g = pt.effective_gamma;
  double best_w = 0.0, best = 0.0;
  const double step = g / 2000.0;
  std::vector<double> ws, vs;
  for (double w = w0 - 20 * g; w <= w0 + 20 * g; w += step) {
    const double v = std::norm(effective_susceptibility(p, w));
    ws.push_back(w);
    vs.push_back(v);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  EXPECT_NEAR(best_w, w0 + pt.delta_omega, 2.0 * step);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (vs[i - 1] < best / 2 && vs[i] >= best / 2) lo = ws[i];
    if (vs[i - 1] >= best / 2 && vs[i] < best / 2) hi = ws[i];
  }
  EXPECT_NEAR((hi - lo) / g, 1.0, 0.01);
}

TEST(DetuningSweep, ZeroDetuningGivesUnitRatio) {
  const std::vector<double> zeros(5, 0.0);
  for (const auto& pt : detuning_sweep(cooling_mode(), zeros)) {
    EXPECT_EQ(pt.delta_gamma, 0.0);
    EXPECT_EQ(pt.delta_omega, 0.0);
    EXPECT_EQ(pt.temperature_ratio, 1.0);
  }
}

TEST(DetuningSweep, SymmetricSweepIsOdd) {
  const auto d = linspace(-1.0, 1.0, 21);
  const auto pts = detuning_sweep(heating_mode(), d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& mirror = pts[d.size() - 1 - i];
    EXPECT_NEAR(pts[i].delta_gamma, -mirror.delta_gamma, 1e-13 * std::abs(mirror.delta_gamma));
    EXPECT_NEAR(pts[i].delta_omega, -mirror.delta_omega, 1e-13 * std::abs(mirror.delta_omega));
  }
}

TEST(DetuningSweep, UnstablePointHasNoTemperature) {
  auto p = cooling_mode().with_detuning(0.58);
  const auto pt = backaction_point(p);
  EXPECT_FALSE(pt.stable());
  EXPECT_TRUE(std::isnan(pt.temperature_ratio));
}

TEST(DetuningSweep, ReferenceModesHitDampingTargets) {
  EXPECT_NEAR(backaction_point(cooling_mode()).effective_gamma / kTwoPi, 464.0, 1e-6);
  EXPECT_NEAR(backaction_point(heating_mode()).effective_gamma / kTwoPi, 49.0, 1e-6);
}

TEST(Linspace, EndpointsInclusive) {
  const auto v = linspace(-1.0, 0.0, 41);
  ASSERT_EQ(v.size(), 41u);
  EXPECT_EQ(v.front(), -1.0);
  EXPECT_EQ(v.back(), 0.0);
  EXPECT_EQ(v[20], -0.5);
}
