#include "sfom/langevin.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

#include "sfom/backaction.hpp"
#include "sfom/config.hpp"
#include "sfom/random.hpp"

namespace sfom {

namespace {

constexpr std::uint64_t kThermalStream = 1;
constexpr std::uint64_t kShotStream = 2;
constexpr std::size_t kMaxDim = 5;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Index map of the state vector for one configuration.
struct Layout {
  std::size_t dim = 2;
  int y = -1;     // photothermal state, -1 when τ_t = 0
  int a_re = -1;  // cavity quadratures, full-cavity only
  int a_im = -1;
};

Layout make_layout(const SimConfig& config) {
  Layout l;
  if (config.model == CavityModel::FullCavity) {
    l.a_re = 2;
    l.a_im = 3;
    l.dim = 4;
  }
  if (config.params.coupling.tau_t > 0.0) l.y = static_cast<int>(l.dim++);
  return l;
}

// Continuous drift in physical units.
MatrixXd physical_drift(const SimConfig& config, const Layout& l) {
  const auto& p = config.params;
  const double wm = p.mode.omega_m.angular();
  const double force_per_photon = constants::hbar * p.coupling.g() / p.mode.m_eff;  // (m/s²) per photon
  const double beta_a = p.coupling.beta_a();
  const double tau = p.coupling.tau_t;
  const double lag_gain = l.y >= 0 ? 1.0 : 1.0 + beta_a;  // τ_t = 0 folds the thermal force in

  MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(l.dim), static_cast<Eigen::Index>(l.dim));
  m(0, 1) = 1.0;
  m(1, 0) = -wm * wm;
  m(1, 1) = -p.mode.gamma_m.angular();

  // Row vector giving δn as a linear function of the state.
  VectorXd photon_row = VectorXd::Zero(m.cols());
  if (config.model == CavityModel::Adiabatic) {
    const auto response = photon_number_response(p, wm);
    photon_row(0) = response.real();
    photon_row(1) = response.imag() / wm;
  } else {
    const double kappa = p.cavity.kappa().angular();
    const double delta = p.cavity.detuning();
    const double alpha = std::abs(intracavity_amplitude(p.cavity, p.drive));
    photon_row(l.a_re) = 2.0 * alpha;
    m(l.a_re, l.a_re) = -kappa;
    m(l.a_re, l.a_im) = -delta;
    m(l.a_im, l.a_im) = -kappa;
    m(l.a_im, l.a_re) = delta;
    m(l.a_im, 0) = p.coupling.g() * alpha;
  }
  m.row(1) += force_per_photon * lag_gain * photon_row.transpose();
  if (l.y >= 0) {
    m(1, l.y) += force_per_photon * beta_a;
    m.row(l.y) += photon_row.transpose() / tau;
    m(l.y, l.y) -= 1.0 / tau;
  }
  return m;
}

// Characteristic magnitudes used to balance the matrix before exponentiation.
VectorXd state_scales(const SimConfig& config, const Layout& l) {
  const auto& p = config.params;
  const double wm = p.mode.omega_m.angular();
  VectorXd s = VectorXd::Ones(static_cast<Eigen::Index>(l.dim));
  s(1) = wm;
  const auto positive_or_one = [](double v) { return std::isfinite(v) && v > 0.0 ? v : 1.0; };
  if (config.model == CavityModel::FullCavity) {
    const double alpha = std::abs(intracavity_amplitude(p.cavity, p.drive));
    const double a_scale = positive_or_one(std::abs(p.coupling.g()) * alpha / p.cavity.kappa().angular());
    s(l.a_re) = a_scale;
    s(l.a_im) = a_scale;
    if (l.y >= 0) s(l.y) = positive_or_one(2.0 * alpha * a_scale);
  } else if (l.y >= 0) {
    s(l.y) = positive_or_one(std::abs(photon_number_response(p, wm)));
  }
  return s;
}

// Symmetric square root factor of a covariance (clamping rounding negatives).
MatrixXd covariance_factor(const MatrixXd& cov) {
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const char* to_string(CavityModel model) {
  return model == CavityModel::Adiabatic ? "adiabatic" : "full";
}

CavityModel parse_cavity_model(std::string_view text) {
  if (text == "adiabatic") return CavityModel::Adiabatic;
  if (text == "full") return CavityModel::FullCavity;
  throw InvalidParameter("cavity model must be 'adiabatic' or 'full', got '" + std::string(text) + "'");
}

double SimConfig::min_sample_rate() const {
  const double fastest = model == CavityModel::Adiabatic ? params.mode.omega_m.hz() : params.cavity.kappa().hz();
  return 20.0 * fastest;
}

void SimConfig::validate() const {
  params.validate();
  if (!(std::isfinite(duration) && duration > 0.0)) throw InvalidParameter("duration must be positive");
  if (!(std::isfinite(sample_rate) && sample_rate > 0.0)) throw InvalidParameter("sample rate must be positive");
  if (!(sample_rate > min_sample_rate())) {
    throw InvalidParameter("sample rate " + format_double(sample_rate) + " Hz does not resolve the " +
                           (model == CavityModel::Adiabatic ? "mechanical frequency" : "cavity linewidth") +
                           "; need > " + format_double(min_sample_rate()) + " Hz");
  }
  if (!(std::isfinite(shot_noise_floor) && shot_noise_floor >= 0.0)) {
    throw InvalidParameter("shot noise floor must be >= 0");
  }
  if (sample_count() == 0) throw InvalidParameter("duration shorter than one sample");
}

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

double thermal_force_amplitude(const MechanicalMode& mode) {
  return std::sqrt(2.0 * mode.gamma_m.angular() * mode.m_eff * constants::k_B * mode.temperature);
}

std::uint64_t config_hash(const SimConfig& config) {
  std::string text = format_config(RunConfig{config.params, config.seed});
  text += "duration_s = " + format_double(config.duration) + '\n';
  text += "sample_rate_hz = " + format_double(config.sample_rate) + '\n';
  text += std::string("mode = ") + to_string(config.model) + '\n';
  text += "shot_noise_floor = " + format_double(config.shot_noise_floor) + '\n';
  return fnv1a(text);
}

struct Simulator::Impl {
  Layout layout;
  std::size_t total = 0;
  std::size_t produced = 0;
  bool unstable = false;
  bool linearly_unstable = false;
  MatrixXd drift;  // physical units
  VectorXd scale;  // physical = scale ∘ scaled
  std::array<double, kMaxDim * kMaxDim> phi{};
  std::array<double, kMaxDim * kMaxDim> noise{};
  std::array<double, kMaxDim> state{};  // scaled coordinates
  double shot_sigma = 0.0;
  NormalStream thermal;
  NormalStream shot;

  Impl(const SimConfig& config)
      : layout(make_layout(config)),
        total(config.sample_count()),
        thermal(config.seed, kThermalStream),
        shot(config.seed, kShotStream) {
    const auto n = static_cast<Eigen::Index>(layout.dim);
    drift = physical_drift(config, layout);
    scale = state_scales(config, layout);
    const MatrixXd m = scale.cwiseInverse().asDiagonal() * drift * scale.asDiagonal();

    const double force_sigma = thermal_force_amplitude(config.params.mode) / config.params.mode.m_eff;
    const double q = force_sigma * force_sigma / (scale(1) * scale(1));  // scaled velocity diffusion
    const double dt = 1.0 / config.sample_rate;

    // Van Loan: exp([[-M, Q], [0, Mᵀ]]·dt) = [[·, Φ⁻¹Q_d], [0, Φᵀ]], with Q normalised to 1.
    MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -m * dt;
    block(1, n + 1) = dt;
    block.bottomRightCorner(n, n) = m.transpose() * dt;
    const MatrixXd expm = block.exp();
    const MatrixXd phi_m = expm.bottomRightCorner(n, n).transpose();
    const MatrixXd q_step = q * (phi_m * expm.topRightCorner(n, n));
    const MatrixXd l_step = covariance_factor(q_step);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        phi[static_cast<std::size_t>(i * n + j)] = phi_m(i, j);
        noise[static_cast<std::size_t>(i * n + j)] = l_step(i, j);
      }
    }

    Eigen::EigenSolver<MatrixXd> eig(m, false);
    linearly_unstable = (eig.eigenvalues().real().array() >= 0.0).any();

    // Initial state: stationary distribution M P + P Mᵀ + Q = 0, else bare thermal.
    MatrixXd initial_cov = MatrixXd::Zero(n, n);
    if (!linearly_unstable) {
      const MatrixXd eye = MatrixXd::Identity(n, n);
      const MatrixXd lyap = Eigen::kroneckerProduct(eye, m) + Eigen::kroneckerProduct(m, eye);
      VectorXd rhs = VectorXd::Zero(n * n);
      rhs(1 * n + 1) = -q;
      const VectorXd vec_p = lyap.partialPivLu().solve(rhs);
      initial_cov = Eigen::Map<const MatrixXd>(vec_p.data(), n, n);
    } else {
      const double var_x = config.params.mode.thermal_variance();
      initial_cov(0, 0) = var_x;
      initial_cov(1, 1) = var_x;  // scaled velocity v/ω_m shares the position variance
    }
    const MatrixXd l0 = covariance_factor(initial_cov);
    VectorXd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = thermal();
    const VectorXd s0 = l0 * xi;
    for (Eigen::Index i = 0; i < n; ++i) state[static_cast<std::size_t>(i)] = s0(i);

    shot_sigma = std::sqrt(config.shot_noise_floor * config.sample_rate);
  }

  void step() {
    const std::size_t n = layout.dim;
    std::array<double, kMaxDim> xi{};
    for (std::size_t i = 0; i < n; ++i) xi[i] = thermal();
    std::array<double, kMaxDim> next{};
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += phi[i * n + j] * state[j] + noise[i * n + j] * xi[j];
      next[i] = acc;
    }
    state = next;
  }
};

Simulator::Simulator(const SimConfig& config) {
  config.validate();
  impl_ = std::make_unique<Impl>(config);
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

std::size_t Simulator::next_block(std::span<double> x, std::span<double> homodyne) {
  if (!homodyne.empty() && homodyne.size() < x.size()) {
    throw InvalidParameter("homodyne buffer shorter than position buffer");
  }
  Impl& s = *impl_;
  const std::size_t want = std::min(x.size(), remaining());
  const std::size_t n = s.layout.dim;
  std::size_t k = 0;
  for (; k < want; ++k) {
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) finite = finite && std::isfinite(s.state[i]);
    if (!finite) {
      s.unstable = true;
      break;
    }
    const double xv = s.state[0];  // position scale is 1
    x[k] = xv;
    if (!homodyne.empty()) homodyne[k] = s.shot_sigma > 0.0 ? xv + s.shot_sigma * s.shot() : xv;
    s.step();
  }
  s.produced += k;
  return k;
}

std::size_t Simulator::produced() const { return impl_->produced; }
std::size_t Simulator::remaining() const { return impl_->unstable ? 0 : impl_->total - impl_->produced; }
bool Simulator::unstable() const { return impl_->unstable; }
bool Simulator::linearly_unstable() const { return impl_->linearly_unstable; }
std::size_t Simulator::dimension() const { return impl_->layout.dim; }

SimState Simulator::state() const {
  const Impl& s = *impl_;
  const auto phys = [&](int i) { return i >= 0 ? s.state[static_cast<std::size_t>(i)] * s.scale(i) : 0.0; };
  return {phys(0), phys(1), phys(s.layout.y), phys(s.layout.a_re), phys(s.layout.a_im)};
}

void Simulator::set_state(const SimState& st) {
  Impl& s = *impl_;
  const auto put = [&](int i, double v) {
    if (i >= 0) s.state[static_cast<std::size_t>(i)] = v / s.scale(i);
  };
  put(0, st.x);
  put(1, st.v);
  put(s.layout.y, st.y_pt);
  put(s.layout.a_re, st.a_re);
  put(s.layout.a_im, st.a_im);
}

std::vector<double> Simulator::drift_matrix() const {
  const auto& m = impl_->drift;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

SimTrace simulate(const SimConfig& config) {
  Simulator sim(config);
  SimTrace trace;
  trace.dt = 1.0 / config.sample_rate;
  trace.seed = config.seed;
  trace.config_hash = config_hash(config);
  trace.x.resize(config.sample_count());
  trace.homodyne.resize(config.sample_count());
  const std::size_t n = sim.next_block(trace.x, trace.homodyne);
  trace.x.resize(n);
  trace.homodyne.resize(n);
  trace.unstable = sim.unstable();
  return trace;
}

SimTrace replay(const SimConfig& config, std::uint64_t expected_hash) {
  const auto actual = config_hash(config);
  if (actual != expected_hash) {
    throw ReplayMismatch("config hash " + std::to_string(actual) + " does not match recorded " +
                         std::to_string(expected_hash));
  }
  return simulate(config);
}

}  // namespace sfom
