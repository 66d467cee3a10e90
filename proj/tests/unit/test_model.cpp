#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sfom/model.hpp"

using namespace sfom;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

OpticalCavity critical_cavity(double kappa_hz, double detuning_over_kappa) {
  OpticalCavity c;
  c.kappa_in = Frequency::from_hz(kappa_hz / 2.0);
  c.kappa_0 = Frequency::from_hz(kappa_hz / 2.0);
  c.detuning_over_kappa = detuning_over_kappa;
  return c;
}

MechanicalMode mode_482() {
  MechanicalMode m;
  m.omega_m = Frequency::from_hz(482e3);
  m.gamma_m = Frequency::from_hz(106.0);
  m.m_eff = 1e-15;
  m.temperature = 0.53;
  return m;
}

}  // namespace

TEST(Frequency, ConvertsBetweenHzAndAngular) {
  const auto f = Frequency::from_hz(482e3);
  EXPECT_DOUBLE_EQ(f.angular(), kTwoPi * 482e3);
  EXPECT_DOUBLE_EQ(Frequency::from_angular(kTwoPi * 3.0).hz(), 3.0);
  EXPECT_DOUBLE_EQ((Frequency::from_hz(1.0) + Frequency::from_hz(2.5)).hz(), 3.5);
}

TEST(IntracavityAmplitude, CriticalCouplingOnResonance) {
  const auto cavity = critical_cavity(22.3e6, 0.0);
  DriveField drive{200e-9, 1555.1e-9};
  const double kappa = cavity.kappa().angular();
  EXPECT_NEAR(intracavity_photons(cavity, drive) / (drive.photon_flux() / kappa), 1.0, 1e-14);
}

TEST(IntracavityAmplitude, NoDriveGivesZero) {
  const auto cavity = critical_cavity(22.3e6, -0.5);
  DriveField drive{0.0, 1555.1e-9};
  EXPECT_EQ(intracavity_amplitude(cavity, drive), std::complex<double>(0.0, 0.0));
}

TEST(IntracavityAmplitude, MatchesHandEvaluation) {
  const auto cavity = critical_cavity(22.3e6, -0.5);
  DriveField drive{200e-9, 1555.1e-9};
  // Photon flux P·λ/(h·c) and |α|² = 2κ_in·flux/(κ² + Δ²), written out longhand.
  const double h = 6.62607015e-34;
  const double flux = 200e-9 * 1555.1e-9 / (h * 299792458.0);
  const double kappa = kTwoPi * 22.3e6;
  const double kappa_in = kappa / 2.0;
  const double delta = -0.5 * kappa;
  const double expected = 2.0 * kappa_in * flux / (kappa * kappa + delta * delta);
  EXPECT_NEAR(intracavity_photons(cavity, drive) / expected, 1.0, 1e-9);
  EXPECT_NEAR(drive.photon_flux() / flux, 1.0, 1e-9);
}

TEST(IntracavityAmplitude, EvenMagnitudeOddPhase) {
  DriveField drive{1e-6, 1.5e-6};
  for (double d : {0.1, 0.5, 1.3, 4.0}) {
    const auto plus = intracavity_amplitude(critical_cavity(1e7, d), drive);
    const auto minus = intracavity_amplitude(critical_cavity(1e7, -d), drive);
    EXPECT_DOUBLE_EQ(std::norm(plus), std::norm(minus));
    EXPECT_DOUBLE_EQ(std::arg(plus), -std::arg(minus));
  }
}

TEST(ZeroPointMotion, UnitConstruction) {
  MechanicalMode m = mode_482();
  m.m_eff = constants::hbar / (2.0 * m.omega_m.angular());
  EXPECT_NEAR(zero_point_motion(m), 1.0, 1e-15);
}

TEST(ZeroPointMotion, ScalesWithMass) {
  MechanicalMode m = mode_482();
  const double x1 = zero_point_motion(m);
  m.m_eff *= 2.0;
  EXPECT_NEAR(zero_point_motion(m) / x1, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ZeroPointMotion, MatchesHandEvaluation) {
  const double expected = std::sqrt(1.054571817e-34 / (2.0 * 1e-15 * kTwoPi * 482e3));
  EXPECT_NEAR(zero_point_motion(mode_482()) / expected, 1.0, 1e-14);
}

TEST(MechanicalMode, DerivedQuantities) {
  const auto m = mode_482();
  EXPECT_DOUBLE_EQ(m.quality_factor(), 482e3 / 106.0);
  EXPECT_DOUBLE_EQ(m.spring_constant(), 1e-15 * std::pow(kTwoPi * 482e3, 2));
  EXPECT_NEAR(m.thermal_variance(), constants::k_B * 0.53 / m.spring_constant(), 1e-30);
}

TEST(Validation, RejectsOutOfDomainParameters) {
  auto m = mode_482();
  m.m_eff = 0.0;
  EXPECT_THROW(m.validate(), InvalidParameter);
  m = mode_482();
  m.gamma_m = Frequency::from_hz(-1.0);
  EXPECT_THROW(m.validate(), InvalidParameter);

  auto c = critical_cavity(1e7, 0.0);
  c.kappa_in = Frequency::from_hz(0.0);
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = critical_cavity(1e7, std::nan(""));
  EXPECT_THROW(c.validate(), InvalidParameter);

  DriveField d{-1.0, 1e-6};
  EXPECT_THROW(d.validate(), InvalidParameter);

  PhotothermalCoupling p;
  p.absorption = 1.5;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p.absorption = 0.5;
  p.tau_t = -1e-9;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p.tau_t = 0.0;
  p.beta = -3.0;
  EXPECT_NO_THROW(p.validate());
}

TEST(SystemParams, CouplingAtZeroPointMotion) {
  SystemParams p;
  p.mode = mode_482();
  p.coupling.g_hz_per_m = 1e15;
  EXPECT_DOUBLE_EQ(p.g0(), kTwoPi * 1e15 * zero_point_motion(p.mode));
}
