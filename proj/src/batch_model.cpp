#include "geomadapt/batch_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "geomadapt/errors.hpp"
#include "geomadapt/parallel.hpp"

namespace geomadapt {

void SampleStore::append(const Sample& s) {
  if (s.r.size() != joints_ || s.r_dot.size() != joints_) throw DimensionError("sample dimension does not match store");
  if (!(s.phi >= 0.0 && s.phi < 2.0 * std::numbers::pi)) throw DimensionError("sample phase must lie in [0, 2 pi)");
  samples_.push_back(s);
}

void SampleStore::append(const std::vector<Sample>& samples) {
  for (const auto& s : samples) append(s);
}

std::string SampleStore::csv_header(int joints) {
  std::string h = "t,phi";
  for (int j = 1; j <= joints; ++j) h += ",r_" + std::to_string(j);
  for (int j = 1; j <= joints; ++j) h += ",rdot_" + std::to_string(j);
  h += ",xi_x,xi_y,xi_theta";
  return h;
}

void SampleStore::write_csv(std::ostream& out) const {
  out << csv_header(joints_) << '\n';
  out.precision(17);
  for (const auto& s : samples_) {
    out << s.t << ',' << s.phi;
    for (int j = 0; j < joints_; ++j) out << ',' << s.r[j];
    for (int j = 0; j < joints_; ++j) out << ',' << s.r_dot[j];
    out << ',' << s.xi.xi_x << ',' << s.xi.xi_y << ',' << s.xi.xi_theta << '\n';
  }
}

SampleStore SampleStore::read_csv(std::istream& in) {
  std::string line;
  std::string header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header.empty()) throw DimensionError("sample CSV has no header");
  const auto columns = std::count(header.begin(), header.end(), ',') + 1;
  if (columns < 7 || (columns - 5) % 2 != 0) throw DimensionError("sample CSV header has an unexpected column count");
  const int d = static_cast<int>((columns - 5) / 2);
  if (header != csv_header(d)) throw DimensionError("sample CSV header does not match the frozen schema");

  SampleStore store(d);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> v;
    v.reserve(columns);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (static_cast<long>(v.size()) != columns) throw DimensionError("sample CSV row has the wrong number of cells");
    Sample s;
    s.t = v[0];
    s.phi = v[1];
    s.r = Eigen::Map<const Eigen::VectorXd>(v.data() + 2, d);
    s.r_dot = Eigen::Map<const Eigen::VectorXd>(v.data() + 2 + d, d);
    s.xi = {v[2 + 2 * d], v[3 + 2 * d], v[4 + 2 * d]};
    store.append(s);
  }
  return store;
}

BatchModel::BatchModel(Gait nominal, PhaseWindowGrid grid, int smoothing_order,
                       std::vector<Eigen::Matrix<double, Eigen::Dynamic, kOutputs>> weights)
    : nominal_(std::move(nominal)), grid_(grid), smoothing_order_(smoothing_order), weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != grid_.size()) throw DimensionError("batch model needs weights per window");
}

BodyVelocity BatchModel::predict(double phi, const Shape& r, const ShapeVelocity& r_dot) const {
  const Eigen::VectorXd x = build_regressor(r - nominal_.shape(phi), r_dot - nominal_.shape_velocity(phi));
  const Eigen::VectorXd kernel = phase_smoothing_kernel(grid_, smoothing_order_, phi);
  Eigen::Matrix<double, 1, kOutputs> y = Eigen::Matrix<double, 1, kOutputs>::Zero();
  for (int m = 0; m < grid_.size(); ++m) y += kernel[m] * (x.transpose() * weights_[m]);
  return {y[0], y[1], y[2]};
}

BatchModel fit_batch(const SampleStore& store, const PhaseWindowGrid& grid, const Gait& nominal, int smoothing_order,
                     Execution exec) {
  if (store.joints() != nominal.joints()) throw DimensionError("store and nominal gait differ in joints");
  if (smoothing_order < 0 || smoothing_order > max_smoothing_order(grid.size()))
    throw DimensionError("smoothing order must be in [0, M/2 - 1]");
  const int p = regressor_size(store.joints());
  const int m_windows = grid.size();

  std::vector<std::vector<std::size_t>> members(m_windows);
  for (std::size_t i = 0; i < store.size(); ++i)
    for (int m : covering_windows(grid, store.samples()[i].phi)) members[m].push_back(i);

  std::vector<Eigen::Matrix<double, Eigen::Dynamic, kOutputs>> weights(m_windows);
  for (int m = 0; m < m_windows; ++m) {
    if (static_cast<int>(members[m].size()) < p)
      throw RankDeficientError(m, "window " + std::to_string(m) + " has " + std::to_string(members[m].size()) +
                                      " samples, needs at least " + std::to_string(p));
  }
  std::vector<Eigen::Index> ranks(m_windows, p);
  for_each_index(static_cast<std::size_t>(m_windows), exec, [&](std::size_t wi) {
    const int m = static_cast<int>(wi);
    const auto& idx = members[m];
    const NominalShape centre = nominal_shape(nominal, grid.center(m));
    Eigen::MatrixXd x(idx.size(), p);
    Eigen::Matrix<double, Eigen::Dynamic, kOutputs> y(idx.size(), kOutputs);
    for (std::size_t row = 0; row < idx.size(); ++row) {
      const Sample& s = store.samples()[idx[row]];
      x.row(row) = build_regressor(s.r - centre.r, s.r_dot - centre.r_dot).transpose();
      for (int k = 0; k < kOutputs; ++k) y(row, k) = s.xi[k];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    ranks[m] = qr.rank();
    if (ranks[m] == p) weights[m] = qr.solve(y);
  });
  for (int m = 0; m < m_windows; ++m) {
    if (ranks[m] < p)
      throw RankDeficientError(m, "window " + std::to_string(m) + " design has rank " + std::to_string(ranks[m]) +
                                      " < " + std::to_string(p));
  }
  return BatchModel(nominal, grid, smoothing_order, std::move(weights));
}

PhaseAverageModel::PhaseAverageModel(PhaseWindowGrid grid, int smoothing_order, std::vector<BodyVelocity> window_means)
    : grid_(grid), smoothing_order_(smoothing_order), means_(std::move(window_means)) {
  if (static_cast<int>(means_.size()) != grid_.size()) throw DimensionError("phase average needs one mean per window");
}

BodyVelocity PhaseAverageModel::predict(double phi) const {
  const Eigen::VectorXd kernel = phase_smoothing_kernel(grid_, smoothing_order_, phi);
  BodyVelocity out;
  for (int m = 0; m < grid_.size(); ++m) out = out + means_[m] * kernel[m];
  return out;
}

PhaseAverageModel fit_phase_average(const SampleStore& store, const PhaseWindowGrid& grid, int smoothing_order) {
  std::vector<BodyVelocity> sums(grid.size());
  std::vector<long> counts(grid.size(), 0);
  for (const auto& s : store.samples()) {
    for (int m : covering_windows(grid, s.phi)) {
      sums[m] = sums[m] + s.xi;
      ++counts[m];
    }
  }
  for (int m = 0; m < grid.size(); ++m) {
    if (counts[m] == 0) throw UnfittedModelError("phase average: window " + std::to_string(m) + " is empty");
    sums[m] = sums[m] * (1.0 / static_cast<double>(counts[m]));
  }
  return PhaseAverageModel(grid, smoothing_order, std::move(sums));
}

RecursivePhaseAverage::RecursivePhaseAverage(PhaseWindowGrid grid, double lambda, double prior_variance,
                                             int smoothing_order)
    : grid_(grid), smoothing_order_(smoothing_order) {
  if (smoothing_order < 0 || smoothing_order > max_smoothing_order(grid.size()))
    throw DimensionError("smoothing order must be in [0, M/2 - 1]");
  const RlsFilter proto(1, lambda, prior_variance);
  filters_.assign(grid_.size(), {proto, proto, proto});
}

void RecursivePhaseAverage::ingest(double phi, const BodyVelocity& xi) {
  static const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  for (int m : covering_windows(grid_, phi))
    for (int k = 0; k < kOutputs; ++k) filters_[m][k].update(one, xi[k]);
}

BodyVelocity RecursivePhaseAverage::predict(double phi) const {
  const Eigen::VectorXd kernel = phase_smoothing_kernel(grid_, smoothing_order_, phi);
  BodyVelocity out;
  for (int m = 0; m < grid_.size(); ++m) out = out + window_value(m) * kernel[m];
  return out;
}

bool RecursivePhaseAverage::fitted() const {
  for (const auto& w : filters_)
    if (w[0].updates() == 0) return false;
  return true;
}

void RecursivePhaseAverage::set_window_value(int m, const BodyVelocity& v) {
  for (int k = 0; k < kOutputs; ++k) filters_[m][k].weights()[0] = v[k];
}

BodyVelocity RecursivePhaseAverage::window_value(int m) const {
  return {filters_[m][0].weights()[0], filters_[m][1].weights()[0], filters_[m][2].weights()[0]};
}

}  // namespace geomadapt
