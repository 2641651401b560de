#include "geomadapt/adaptive_model.hpp"

#include <cmath>
#include <string>

#include "geomadapt/errors.hpp"

namespace geomadapt {

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

constexpr int kSnapshotVersion = 1;

}  // namespace

int regressor_size(int joints) { return 1 + 2 * joints + joints * joints; }

Eigen::VectorXd build_regressor(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_dot) {
  if (delta.size() != delta_dot.size()) throw DimensionError("regressor: delta and delta_dot differ in size");
  const auto d = delta.size();
  Eigen::VectorXd x(1 + 2 * d + d * d);
  x[0] = 1.0;
  x.segment(1, d) = delta;
  x.segment(1 + d, d) = delta_dot;
  for (Eigen::Index i = 0; i < d; ++i) x.segment(1 + 2 * d + i * d, d) = delta[i] * delta_dot;
  return x;
}

int max_smoothing_order(int m_windows) { return m_windows / 2 - 1; }

Eigen::VectorXd phase_smoothing_kernel(const PhaseWindowGrid& grid, int order, double phi) {
  if (order < 0 || order > max_smoothing_order(grid.size()))
    throw DimensionError("smoothing order must be in [0, M/2 - 1]");
  const int m = grid.size();
  Eigen::VectorXd k(m);
  for (int i = 0; i < m; ++i) {
    const double diff = phi - grid.center(i);
    double s = 1.0;
    for (int f = 1; f <= order; ++f) s += 2.0 * std::cos(f * diff);
    k[i] = s / m;
  }
  return k;
}

RlsFilter::RlsFilter(int size, double lambda, double prior_variance)
    : weights_(Eigen::VectorXd::Zero(size)),
      covariance_(Eigen::MatrixXd::Identity(size, size) * prior_variance),
      lambda_(lambda),
      prior_variance_(prior_variance) {
  if (size < 1) throw DimensionError("RLS filter size must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DimensionError("RLS forgetting factor must be in (0, 1]");
  if (!(prior_variance > 0.0)) throw DimensionError("RLS prior variance must be positive");
}

void RlsFilter::reset_covariance() {
  covariance_.setIdentity();
  covariance_ *= prior_variance_;
  ++resets_;
}

void RlsFilter::update(const Eigen::VectorXd& x, double y) {
  if (x.size() != weights_.size()) throw DimensionError("RLS regressor size mismatch");
  if (!x.allFinite() || !std::isfinite(y)) throw NumericalError("RLS update with non-finite sample");

  Eigen::VectorXd px = covariance_ * x;
  double denom = lambda_ + x.dot(px);
  if (!std::isfinite(denom) || denom <= 0.0) {
    reset_covariance();
    px = covariance_ * x;
    denom = lambda_ + x.dot(px);
  }
  const Eigen::VectorXd gain = px / denom;
  weights_ += gain * (y - weights_.dot(x));
  covariance_.noalias() -= gain * px.transpose();
  covariance_ /= lambda_;
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
  ++updates_;

  const auto diag = covariance_.diagonal();
  if (!diag.allFinite() || diag.minCoeff() <= 0.0) reset_covariance();
}

nlohmann::json RlsFilter::to_json() const {
  std::vector<double> p(covariance_.data(), covariance_.data() + covariance_.size());
  return {{"weights", vector_to_json(weights_)},
          {"covariance", p},
          {"lambda", lambda_},
          {"prior_variance", prior_variance_},
          {"updates", updates_},
          {"resets", resets_}};
}

RlsFilter RlsFilter::from_json(const nlohmann::json& j) {
  const Eigen::VectorXd w = vector_from_json(j.at("weights"));
  RlsFilter f(static_cast<int>(w.size()), j.at("lambda").get<double>(), j.at("prior_variance").get<double>());
  const auto p = j.at("covariance").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(p.size()) != w.size() * w.size())
    throw DimensionError("RLS snapshot covariance has the wrong size");
  f.weights_ = w;
  f.covariance_ = Eigen::Map<const Eigen::MatrixXd>(p.data(), w.size(), w.size());
  f.updates_ = j.at("updates").get<long>();
  f.resets_ = j.at("resets").get<int>();
  return f;
}

FilterBank::FilterBank(Gait nominal, PhaseWindowGrid grid, FilterBankOptions options)
    : nominal_(std::move(nominal)), grid_(grid), options_(options) {
  if (options_.smoothing_order < 0 || options_.smoothing_order > max_smoothing_order(grid_.size()))
    throw DimensionError("smoothing order must be in [0, M/2 - 1]");
  const int n = regressor_size(nominal_.joints());
  const RlsFilter proto(n, options_.lambda_rls, options_.prior_variance);
  filters_.assign(grid_.size(), {proto, proto, proto});
  cache_centres();
}

void FilterBank::cache_centres() {
  centres_.clear();
  centres_.reserve(grid_.size());
  for (int m = 0; m < grid_.size(); ++m) centres_.push_back(nominal_shape(nominal_, grid_.center(m)));
}

void FilterBank::ingest(double phi, const Shape& r, const ShapeVelocity& r_dot, const BodyVelocity& xi) {
  if (r.size() != joints() || r_dot.size() != joints()) throw DimensionError("sample dimension does not match bank");
  for (int m : covering_windows(grid_, phi)) {
    const Eigen::VectorXd x = build_regressor(r - centres_[m].r, r_dot - centres_[m].r_dot);
    for (int k = 0; k < kOutputs; ++k) filters_[m][k].update(x, xi[k]);
  }
}

bool FilterBank::fitted() const {
  for (const auto& w : filters_)
    if (w[0].updates() == 0) return false;
  return true;
}

BodyVelocity FilterBank::predict(double phi, const Shape& r, const ShapeVelocity& r_dot) const {
  if (!fitted()) throw UnfittedModelError("filter bank has windows without samples");
  return evaluate(phi, r, r_dot);
}

BodyVelocity FilterBank::evaluate(double phi, const Shape& r, const ShapeVelocity& r_dot) const {
  if (r.size() != joints() || r_dot.size() != joints()) throw DimensionError("query dimension does not match bank");
  const Eigen::VectorXd x = build_regressor(r - nominal_.shape(phi), r_dot - nominal_.shape_velocity(phi));
  const Eigen::VectorXd kernel = phase_smoothing_kernel(grid_, options_.smoothing_order, phi);
  BodyVelocity out;
  for (int m = 0; m < grid_.size(); ++m) {
    for (int k = 0; k < kOutputs; ++k) out[k] += kernel[m] * filters_[m][k].weights().dot(x);
  }
  return out;
}

void FilterBank::rebase(const Gait& new_gait) {
  if (new_gait.joints() != nominal_.joints()) throw DimensionError("rebase: gait joint count differs");
  for (int m = 0; m < grid_.size(); ++m) {
    const NominalShape next = nominal_shape(new_gait, grid_.center(m));
    const Eigen::VectorXd x = build_regressor(next.r - centres_[m].r, next.r_dot - centres_[m].r_dot);
    for (int k = 0; k < kOutputs; ++k) {
      Eigen::VectorXd& w = filters_[m][k].weights();
      w[0] = w.dot(x);
    }
  }
  nominal_ = new_gait;
  cache_centres();
}

nlohmann::json FilterBank::to_json() const {
  nlohmann::json filters = nlohmann::json::array();
  for (const auto& window : filters_) {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& f : window) outs.push_back(f.to_json());
    filters.push_back(outs);
  }
  return {{"format", "geomadapt.filter_bank"},
          {"version", kSnapshotVersion},
          {"nominal", gait_to_json(nominal_)},
          {"grid", {{"windows", grid_.size()}, {"width", grid_.width()}}},
          {"lambda_rls", options_.lambda_rls},
          {"prior_variance", options_.prior_variance},
          {"smoothing_order", options_.smoothing_order},
          {"filters", filters}};
}

FilterBank FilterBank::from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "geomadapt.filter_bank" || j.at("version").get<int>() != kSnapshotVersion)
    throw DimensionError("unrecognised filter bank snapshot format or version");
  FilterBankOptions opts{j.at("lambda_rls").get<double>(), j.at("prior_variance").get<double>(),
                         j.at("smoothing_order").get<int>()};
  FilterBank bank(gait_from_json(j.at("nominal")),
                  PhaseWindowGrid(j.at("grid").at("windows").get<int>(), j.at("grid").at("width").get<double>()),
                  opts);
  const auto& filters = j.at("filters");
  if (static_cast<int>(filters.size()) != bank.windows()) throw DimensionError("snapshot window count mismatch");
  for (int m = 0; m < bank.windows(); ++m) {
    for (int k = 0; k < kOutputs; ++k) {
      RlsFilter f = RlsFilter::from_json(filters[m].at(k));
      if (f.weights().size() != regressor_size(bank.joints()))
        throw DimensionError("snapshot regressor size mismatch");
      bank.filters_[m][k] = std::move(f);
    }
  }
  return bank;
}

void ingest_sample(FilterBank& bank, double phi, const Shape& r, const ShapeVelocity& r_dot,
                   const BodyVelocity& xi) {
  bank.ingest(phi, r, r_dot, xi);
}

BodyVelocity predict(const FilterBank& bank, double phi, const Shape& r, const ShapeVelocity& r_dot) {
  return bank.predict(phi, r, r_dot);
}

void rebase(FilterBank& bank, const Gait& new_gait) { bank.rebase(new_gait); }

}  // namespace geomadapt
