#include "revival/oam.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "least_squares.hpp"
#include "revival/errors.hpp"

namespace revival {

void OamDistribution::normalize() {
  double total = 0.0;
  for (double v : p) total += v;
  if (!(total > 0.0)) throw DomainError("cannot normalize an all-zero OAM distribution");
  for (double& v : p) v /= total;
  normalized = true;
}

double OamNoiseModel::operator()(int l) const {
  const double x = static_cast<double>(l);
  const double noise = N > 0.0 ? N * std::exp(-x * x / (2.0 * sigma_f * sigma_f)) : 0.0;
  if (form == OamForm::delta_gaussian) return (l == 0 ? S0 : 0.0) + noise;
  return a * std::exp(-b * std::abs(x)) + noise;
}

OamDistribution model_values(const OamNoiseModel& model, int lmax) {
  if (lmax < 0) throw DomainError("lmax must be >= 0");
  OamDistribution d;
  d.lmax = lmax;
  d.p.resize(static_cast<std::size_t>(2 * lmax + 1));
  for (int l = -lmax; l <= lmax; ++l) d(l) = model(l);
  return d;
}

OamDistribution conditional_oam_clean(const OamNoiseModel& noise, int lmax) {
  if (noise.S0 < 0.0 || noise.N < 0.0 || !(noise.sigma_f > 0.0))
    throw DomainError("noise model needs S0, N >= 0 and sigma_f > 0");
  const OamNoiseModel& model = noise;
  if (model.a < 0.0 || model.b < 0.0) throw DomainError("exp-gaussian model needs a, b >= 0");
  OamDistribution d = model_values(model, lmax);
  double inside = 0.0;
  for (double v : d.p) inside += v;
  double tail = 0.0;
  double reach = 40.0 * model.sigma_f;
  if (model.form == OamForm::exp_gaussian && model.a > 0.0) {
    if (!(model.b > 0.0)) throw TruncationError("exp-gaussian model with b = 0 is not normalizable", 1.0);
    reach = std::max(reach, 40.0 / model.b);
  }
  const int far = lmax + static_cast<int>(std::ceil(reach)) + 1;
  for (int l = lmax + 1; l <= far; ++l) tail += 2.0 * model(l);
  if (tail > 1e-6 * (inside + tail))
    throw TruncationError("OAM range too small for the noise width", tail / (inside + tail));
  d.normalize();
  return d;
}

UncertaintyEstimate oam_uncertainty(const OamDistribution& dist) {
  double total = 0.0, first = 0.0;
  for (int l = -dist.lmax; l <= dist.lmax; ++l) {
    total += dist(l);
    first += dist(l) * l;
  }
  if (!(total > 0.0)) throw DomainError("OAM distribution is all zero");
  const double mean = first / total;
  double second = 0.0;
  for (int l = -dist.lmax; l <= dist.lmax; ++l) second += dist(l) * (l - mean) * (l - mean);
  UncertaintyEstimate est;
  est.value = std::sqrt(second / total);
  est.unit = Unit::hbar;
  est.method = Method::analytic;
  return est;
}

namespace {

struct DeltaGaussianResidual {
  std::vector<double> y;
  int lmax;
  template <class T>
  bool operator()(const T* p, T* r) const {
    for (int l = -lmax; l <= lmax; ++l) {
      const double x = static_cast<double>(l);
      T model = p[1] * exp(-T(x * x) / (T(2.0) * p[2] * p[2]));
      if (l == 0) model += p[0];
      r[l + lmax] = model - T(y[static_cast<std::size_t>(l + lmax)]);
    }
    return true;
  }
};

struct ExpGaussianResidual {
  std::vector<double> y;
  int lmax;
  template <class T>
  bool operator()(const T* p, T* r) const {
    for (int l = -lmax; l <= lmax; ++l) {
      const double x = static_cast<double>(l);
      const T model = p[0] * exp(-p[1] * std::abs(x)) +
                      p[2] * exp(-T(x * x) / (T(2.0) * p[3] * p[3]));
      r[l + lmax] = model - T(y[static_cast<std::size_t>(l + lmax)]);
    }
    return true;
  }
};

// Rank and covariance over the columns flagged active; inactive parameters
// get zero covariance.
void restrict_covariance(const Eigen::MatrixXd& jac, double ssr, const std::vector<bool>& active,
                         FitDiagnostics& diag) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < active.size(); ++j)
    if (active[j]) cols.push_back(static_cast<Eigen::Index>(j));
  Eigen::MatrixXd sub(jac.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = jac.col(cols[c]);
  FitDiagnostics tmp;
  detail::fill_covariance(sub, ssr, tmp);
  diag.rank = tmp.rank;
  diag.covariance = Eigen::MatrixXd::Zero(jac.cols(), jac.cols());
  for (std::size_t a = 0; a < cols.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      diag.covariance(cols[a], cols[b]) = tmp.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
}

}  // namespace

OamFit fit_oam_model(const OamDistribution& samples, OamForm form) {
  const int lmax = samples.lmax;
  const double peak = *std::max_element(samples.p.begin(), samples.p.end());
  if (!(peak > 0.0)) throw DataError("OAM samples are all zero");
  std::vector<double> y(samples.p.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = samples.p[i] / peak;

  OamFit fit;
  fit.model.form = form;
  bool off_peak_zero = true;
  for (int l = -lmax; l <= lmax; ++l)
    if (l != 0 && samples(l) != 0.0) off_peak_zero = false;
  if (off_peak_zero && form == OamForm::delta_gaussian) {
    fit.model.S0 = samples(0);
    fit.model.N = 0.0;
    fit.diagnostics.rank = 1;
    fit.diagnostics.parameter_names = {"S0", "N", "sigma_f"};
    fit.diagnostics.parameters = {fit.model.S0, 0.0, fit.model.sigma_f};
    fit.diagnostics.covariance = Eigen::MatrixXd::Zero(3, 3);
    return fit;
  }
  const auto nonzero = std::count_if(y.begin(), y.end(), [](double v) { return v != 0.0; });
  if (nonzero < 7) throw DataError("OAM fit needs at least 7 nonzero entries");

  double m0 = 0.0, m2 = 0.0;
  for (int l = -lmax; l <= lmax; ++l) {
    if (l == 0) continue;
    const double v = std::max(0.0, y[static_cast<std::size_t>(l + lmax)]);
    m0 += v;
    m2 += v * l * l;
  }
  const double width0 = std::clamp(m0 > 0.0 ? std::sqrt(m2 / m0) : 1.0, 0.3, double(lmax));
  const double y0 = y[static_cast<std::size_t>(lmax)];
  const double y1 = 0.5 * (y[static_cast<std::size_t>(lmax - 1)] + y[static_cast<std::size_t>(lmax + 1)]);
  const int n = 2 * lmax + 1;
  const double fmax = 2.0 * lmax;

  if (form == OamForm::delta_gaussian) {
    const double N0 = std::clamp(y1 / std::exp(-1.0 / (2.0 * width0 * width0)), 0.0, 10.0);
    const double S00 = std::clamp(y0 - N0, 0.0, 10.0);
    auto sol = detail::solve_bounded<3>(new DeltaGaussianResidual{y, lmax}, n, {S00, N0, width0},
                                        {0.0, 0.0, 0.05}, {10.0, 10.0, fmax},
                                        {"S0", "N", "sigma_f"});
    const std::vector<bool> active{true, true, sol.params[1] > 1e-10};
    restrict_covariance(sol.jacobian, std::pow(sol.diagnostics.residual_norm, 2), active, sol.diagnostics);
    const int needed = static_cast<int>(std::count(active.begin(), active.end(), true));
    if (sol.diagnostics.rank < needed)
      throw FitError("degenerate OAM fit (rank-deficient Jacobian)", sol.diagnostics.residual_norm * peak);
    fit.model.S0 = sol.params[0] * peak;
    fit.model.N = sol.params[1] * peak;
    fit.model.sigma_f = sol.params[2];
    fit.diagnostics = std::move(sol.diagnostics);
    const Eigen::Vector3d scale(peak, peak, 1.0);
    fit.diagnostics.covariance = scale.asDiagonal() * fit.diagnostics.covariance * scale.asDiagonal();
  } else {
    const double b0 = std::clamp(y1 > 0.0 && y0 > y1 ? std::log(y0 / y1) : 1.0, 1e-3, 20.0);
    auto sol = detail::solve_bounded<4>(new ExpGaussianResidual{y, lmax}, n,
                                        {std::clamp(y0, 0.0, 10.0), b0, 0.01, width0},
                                        {0.0, 1e-6, 0.0, 0.05}, {10.0, 50.0, 10.0, fmax},
                                        {"a", "b", "N", "sigma_f"});
    const std::vector<bool> active{true, true, true, sol.params[2] > 1e-10};
    restrict_covariance(sol.jacobian, std::pow(sol.diagnostics.residual_norm, 2), active, sol.diagnostics);
    const int needed = static_cast<int>(std::count(active.begin(), active.end(), true));
    if (sol.diagnostics.rank < needed)
      throw FitError("degenerate OAM fit (rank-deficient Jacobian)", sol.diagnostics.residual_norm * peak);
    fit.model.a = sol.params[0] * peak;
    fit.model.b = sol.params[1];
    fit.model.N = sol.params[2] * peak;
    fit.model.sigma_f = sol.params[3];
    fit.diagnostics = std::move(sol.diagnostics);
    const Eigen::Vector4d scale(peak, 1.0, peak, 1.0);
    fit.diagnostics.covariance = scale.asDiagonal() * fit.diagnostics.covariance * scale.asDiagonal();
  }
  fit.diagnostics.residual_norm *= peak;
  for (std::size_t i = 0; i < fit.diagnostics.parameters.size(); ++i) {
    const std::string& name = fit.diagnostics.parameter_names[i];
    if (name == "S0" || name == "N" || name == "a") fit.diagnostics.parameters[i] *= peak;
  }
  return fit;
}

Eigen::MatrixXd clean_joint_oam(const std::vector<double>& spiral_weights, int lmax) {
  const auto n = static_cast<Eigen::Index>(2 * lmax + 1);
  if (static_cast<Eigen::Index>(spiral_weights.size()) != n)
    throw DomainError("spiral weights must cover -lmax..lmax");
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) joint(i, n - 1 - i) = spiral_weights[static_cast<std::size_t>(i)];
  return joint;
}

void write_csv(std::ostream& out, const OamDistribution& dist) {
  out << "l,probability\n";
  out.precision(17);
  for (int l = -dist.lmax; l <= dist.lmax; ++l) out << l << ',' << dist(l) << '\n';
}

}  // namespace revival
