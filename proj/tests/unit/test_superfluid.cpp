#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sfom/config.hpp"
#include "sfom/least_squares.hpp"
#include "sfom/model.hpp"
#include "sfom/random.hpp"
#include "sfom/superfluid.hpp"

using namespace sfom;

namespace {

MechanicalMode mode_482() { return {Frequency::from_hz(482e3), Frequency::from_hz(106.0), 1e-15, 0.53}; }

std::vector<double> log_powers(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = 7.0 * std::pow(250.0 / 7.0, double(i) / double(n - 1));
  return p;
}

}  // namespace

TEST(ThirdSound, HandValue) {
  const SuperfluidFilm film{10.0, 1.0, 2.65e21};
  EXPECT_NEAR(third_sound_speed(film), 2.8195744359743373, 1e-12);
}

TEST(ThirdSound, ScalingLaws) {
  const SuperfluidFilm base{10.0, 0.8, 2.65e21};
  const double c0 = third_sound_speed(base);
  EXPECT_NEAR(third_sound_speed({20.0, 0.8, 2.65e21}) / c0, std::pow(2.0, -1.5), 1e-12);
  EXPECT_NEAR(third_sound_speed({10.0, 0.2, 2.65e21}) / c0, 0.5, 1e-12);
  EXPECT_NEAR(third_sound_speed({10.0, 0.8, 4 * 2.65e21}) / c0, 2.0, 1e-12);
  EXPECT_EQ(third_sound_speed({10.0, 0.0, 2.65e21}), 0.0);
}

TEST(ThirdSound, RejectsInvalidFilm) {
  EXPECT_THROW(third_sound_speed({0.0, 1.0, 2.65e21}), InvalidParameter);
  EXPECT_THROW(third_sound_speed({10.0, 1.1, 2.65e21}), InvalidParameter);
  EXPECT_THROW(third_sound_speed({10.0, -0.1, 2.65e21}), InvalidParameter);
  EXPECT_THROW(third_sound_speed({10.0, 1.0, 0.0}), InvalidParameter);
  EXPECT_THROW(third_sound_speed({NAN, 1.0, 2.65e21}), InvalidParameter);
}

TEST(ModeFrequency, GeometryCases) {
  const SuperfluidFilm film{10.0, 1.0, 2.65e21};
  const double c = third_sound_speed(film);
  EXPECT_NEAR(mode_frequency(film, 1e-6, 2.0 * std::numbers::pi), c / 1e-6, 1e-6);
  EXPECT_NEAR(mode_frequency(film, 2e-6, 1.0) / mode_frequency(film, 1e-6, 1.0), 0.5, 1e-14);
  EXPECT_THROW(mode_frequency(film, 0.0, 1.0), InvalidParameter);
  EXPECT_THROW(mode_frequency(film, 1e-6, -1.0), InvalidParameter);
}

TEST(ModeFrequency, BesselZeros) {
  const auto z = circular_membrane_zeros(2, 3);
  ASSERT_EQ(z.size(), 9u);
  EXPECT_EQ(z[0].order, 0);
  EXPECT_EQ(z[0].index, 1);
  EXPECT_NEAR(z[0].value, 2.404825557695773, 1e-13);
  EXPECT_NEAR(z[1].value, 3.831705970207512, 1e-13);  // j_{1,1}
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_LE(z[i - 1].value, z[i].value);
}

TEST(Bath, DetailedBalanceRecoversTemperature) {
  const double omega = mode_482().omega_m.angular();
  for (double t : {1e-6, 1e-3, 0.53, 300.0}) {
    const auto bath = detailed_balance_bath(t, omega, 1e-40);
    const auto tb = bath_temperature(bath, omega);
    ASSERT_TRUE(tb.has_value());
    EXPECT_NEAR(*tb / t, 1.0, 1e-9);
  }
  EXPECT_THROW(detailed_balance_bath(0.0, omega, 1.0), InvalidParameter);
}

TEST(Bath, InvertedPopulationIsNegativeTemperature) {
  const double omega = 1e6;
  const auto tb = bath_temperature({1.0, 2.0}, omega);
  ASSERT_TRUE(tb.has_value());
  EXPECT_LT(*tb, 0.0);
  EXPECT_NEAR(*tb, constants::hbar * omega / (constants::k_B * std::log(0.5)), 1e-25);
}

TEST(Bath, EqualDensitiesAreInfiniteTemperature) {
  EXPECT_FALSE(bath_temperature({3.0, 3.0}, 1e6).has_value());
  EXPECT_THROW(bath_temperature({0.0, 3.0}, 1e6), InvalidParameter);
  EXPECT_THROW(bath_temperature({-1.0, 3.0}, 1e6), InvalidParameter);
}

TEST(Bath, CouplingSignAndScale) {
  const auto mode = mode_482();
  const double x = zero_point_motion(mode);
  EXPECT_DOUBLE_EQ(bath_coupling({3e-40, 1e-40}, mode), x * x / (constants::hbar * constants::hbar) * 2e-40);
  EXPECT_LT(bath_coupling({1e-40, 3e-40}, mode), 0.0);
  EXPECT_EQ(bath_coupling({1e-40, 1e-40}, mode), 0.0);
}

TEST(Bath, HeatInputIsContinuousThroughEqualDensities) {
  const auto mode = mode_482();
  const double s = 1e-40;
  for (double eps : {1e-3, 1e-6, 1e-10}) {
    const NonEquilibriumBath bath{s * (1.0 + eps), s};
    const double tb = *bath_temperature(bath, mode.omega_m.angular());
    const double product = tb * bath_coupling(bath, mode);
    EXPECT_NEAR(bath_heat_input(bath, mode) / product, 1.0, eps > 1e-8 ? 1e-6 : 1e-3);
  }
  const double x = zero_point_motion(mode);
  const double limit = mode.omega_m.angular() * x * x * s / (constants::hbar * constants::k_B);
  EXPECT_NEAR(bath_heat_input({s, s}, mode) / limit, 1.0, 1e-15);
}

TEST(FinalTemperature, WeightedAverage) {
  EXPECT_DOUBLE_EQ(final_temperature(0.5, 100.0, 2.0, 0.0), 0.5);
  EXPECT_NEAR(final_temperature(0.5, 100.0, 2.0, 100.0), 1.25, 1e-15);
  EXPECT_NEAR(final_temperature(0.5, 100.0, 0.0, 1e9), 0.0, 1e-7);
  // Negative T_B with negative Γ_B heats.
  EXPECT_GT(final_temperature(0.5, 100.0, -1.0, -50.0), 0.5);
  EXPECT_THROW(final_temperature(0.5, 100.0, -1.0, -100.0), InstabilityError);
  EXPECT_THROW(final_temperature(0.5, 0.0, 1.0, 1.0), InvalidParameter);
}

TEST(FinalTemperature, SignGrid) {
  for (double tb : {-3.0, -0.1, 0.1, 3.0}) {
    for (double gb : {-90.0, -10.0, 10.0, 90.0}) {
      const double t = final_temperature(0.5, 100.0, tb, gb);
      const double lo = std::min(0.5, tb), hi = std::max(0.5, tb);
      if (gb > 0.0) {
        EXPECT_GE(t, lo);
        EXPECT_LE(t, hi);
      } else {
        EXPECT_TRUE(t < lo || t > hi || t == 0.5);
      }
    }
  }
}

TEST(FinalTemperature, FromDensitiesMatchesExplicitForm) {
  const auto mode = mode_482();
  const auto bath = detailed_balance_bath(2.0, mode.omega_m.angular(), 1e-42);
  const double tb = *bath_temperature(bath, mode.omega_m.angular());
  const double gb = bath_coupling(bath, mode);
  EXPECT_NEAR(final_temperature(0.53, bath, mode) / final_temperature(0.53, mode.gamma_m.angular(), tb, gb), 1.0, 1e-9);
  const NonEquilibriumBath flat{1e-42, 1e-42};
  const double expected = 0.53 + bath_heat_input(flat, mode) / mode.gamma_m.angular();
  EXPECT_NEAR(final_temperature(0.53, flat, mode) / expected, 1.0, 1e-12);
}

TEST(PowerLaw, NoiselessRecovery) {
  const auto p = log_powers(20);
  for (const auto& [a, b, c] : std::vector<std::tuple<double, double, double>>{
           {0.3, 0.60, 1.0}, {16.0, 0.38, 19.3}, {49.2, 0.14, 23.4}, {2.0, -0.5, 0.1}}) {
    std::vector<double> y;
    for (double v : p) y.push_back(a * std::pow(v, b) + c);
    const auto fit = fit_power_law(p, y);
    EXPECT_NEAR(fit.a / a, 1.0, 1e-6);
    EXPECT_NEAR(fit.b, b, 1e-7);
    EXPECT_NEAR(fit.c - c, 0.0, 1e-6 * std::max(1.0, std::abs(c)));
    EXPECT_NEAR(fit.evaluate(40.0), a * std::pow(40.0, b) + c, 1e-6);
  }
}

TEST(PowerLaw, LinearLaw) {
  const auto p = log_powers(12);
  std::vector<double> y;
  for (double v : p) y.push_back(3.0 * v - 2.0);
  const auto fit = fit_power_law(p, y);
  EXPECT_NEAR(fit.b, 1.0, 1e-7);
  EXPECT_NEAR(fit.a, 3.0, 1e-6);
  EXPECT_NEAR(fit.c, -2.0, 1e-5);
}

TEST(PowerLaw, MonteCarloCoverage) {
  const auto p = log_powers(20);
  int inside = 0;
  const int trials = 100;
  for (int s = 0; s < trials; ++s) {
    NormalStream rng(100 + s, 0);
    std::vector<double> y, e;
    for (double v : p) {
      const double clean = 16.0 * std::pow(v, 0.38) + 19.3;
      e.push_back(0.05 * clean);
      y.push_back(clean + e.back() * rng());
    }
    const auto fit = fit_power_law(p, y, e);
    if (std::abs(fit.b - 0.38) <= 3.0 * fit.b_err) ++inside;
  }
  EXPECT_GE(inside, 95);
}

TEST(PowerLaw, OrderAndUnitInvariance) {
  auto p = log_powers(15);
  std::vector<double> y;
  NormalStream rng(2, 0);
  for (double v : p) y.push_back(0.2 * std::pow(v, 0.69) + 1.0 + 0.01 * rng());
  const auto a = fit_power_law(p, y);
  std::reverse(p.begin(), p.end());
  std::reverse(y.begin(), y.end());
  const auto b = fit_power_law(p, y);
  EXPECT_EQ(a.b, b.b);
  EXPECT_EQ(a.a, b.a);
  // Powers in W instead of nW: a scales by 1e9^b, b and c unchanged.
  for (double& v : p) v *= 1e-9;
  const auto w = fit_power_law(p, y);
  EXPECT_NEAR(w.b, a.b, 1e-6);
  EXPECT_NEAR(w.c, a.c, 1e-5);
  EXPECT_NEAR(w.a / (a.a * std::pow(1e9, a.b)), 1.0, 1e-4);
}

TEST(PowerLaw, Errors) {
  const std::vector<double> p{1, 2, 3};
  try {
    fit_power_law(p, p);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::BadInput);
  }
  const std::vector<double> p4{1, 2, 3, -4}, y4{1, 2, 3, 4}, e_bad{1, 1, 0, 1};
  EXPECT_THROW(fit_power_law(p4, y4), FitError);
  const std::vector<double> p5{1, 2, 3, 4};
  EXPECT_THROW(fit_power_law(p5, y4, e_bad), FitError);
  EXPECT_THROW(fit_power_law(p5, std::vector<double>{1, 2, 3}), FitError);
  const std::vector<double> flat{5, 5, 5, 5};
  EXPECT_THROW(fit_power_law(p5, flat), FitError);
}

TEST(FrequencyTemperature, ReadsCsv) {
  const auto path = std::filesystem::temp_directory_path() / "sfom_ft_test.csv";
  {
    std::ofstream out(path);
    out << "temperature_k,frequency_hz\n0.5,482000\n0.6,481900.5\n";
  }
  const auto pts = read_frequency_temperature(path);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].frequency_hz, 481900.5);
  {
    std::ofstream out(path);
    out << "temperature,frequency_hz\n0.5,482000\n";
  }
  EXPECT_THROW(read_frequency_temperature(path), InvalidParameter);
  std::filesystem::remove(path);
  EXPECT_THROW(read_frequency_temperature(path), IoError);
}
