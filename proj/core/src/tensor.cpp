#include "tidal/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace tidal {

double max_abs(const Vec4<>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
double max_abs(const Mat4<>& m) {
  double r = 0.0;
  for (const auto& row : m) r = std::max(r, max_abs(row));
  return r;
}
double max_abs(const Tensor3<>& t) {
  double r = 0.0;
  for (const auto& m : t) r = std::max(r, max_abs(m));
  return r;
}
double max_abs(const Tensor4<>& t) {
  double r = 0.0;
  for (const auto& m : t) r = std::max(r, max_abs(m));
  return r;
}

const char* to_string(Frame f) { return f == Frame::Coordinate ? "coordinate" : "adapted"; }

namespace {

std::size_t component_count(std::size_t rank) {
  std::size_t n = 1;
  for (std::size_t s = 0; s < rank; ++s) n *= kDim;
  return n;
}

}  // namespace

SmallTensor::SmallTensor(std::vector<Variance> variance, Frame frame)
    : variance_(std::move(variance)), frame_(frame) {
  if (variance_.size() > 4) throw TensorError("SmallTensor rank must be 0..4");
  data_.assign(component_count(variance_.size()), 0.0);
}

SmallTensor::SmallTensor(std::vector<Variance> variance, Frame frame, std::vector<double> components)
    : SmallTensor(std::move(variance), frame) {
  if (components.size() != data_.size())
    throw TensorError("component count " + std::to_string(components.size()) + " does not match 4^rank = " +
                      std::to_string(data_.size()));
  data_ = std::move(components);
}

SmallTensor SmallTensor::scalar(double value, Frame frame) { return SmallTensor({}, frame, {value}); }

SmallTensor SmallTensor::vector(const Vec4<>& v, Frame frame) {
  return SmallTensor({Variance::Up}, frame, {v.begin(), v.end()});
}

SmallTensor SmallTensor::covector(const Vec4<>& v, Frame frame) {
  return SmallTensor({Variance::Down}, frame, {v.begin(), v.end()});
}

SmallTensor SmallTensor::covariant2(const Mat4<>& m, Frame frame) {
  SmallTensor t({Variance::Down, Variance::Down}, frame);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.data_[i * kDim + j] = m[i][j];
  return t;
}

SmallTensor SmallTensor::mixed(const Mat4<>& m, Frame frame) {
  SmallTensor t({Variance::Up, Variance::Down}, frame);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.data_[i * kDim + j] = m[i][j];
  return t;
}

std::size_t SmallTensor::flat_index(const std::vector<int>& idx) const {
  if (idx.size() != variance_.size()) throw TensorError("index count does not match rank");
  std::size_t flat = 0;
  for (int i : idx) {
    if (i < 0 || i >= kDim) throw TensorError("index out of range");
    flat = flat * kDim + static_cast<std::size_t>(i);
  }
  return flat;
}

double& SmallTensor::at(std::initializer_list<int> idx) { return data_[flat_index(std::vector<int>(idx))]; }
double SmallTensor::at(std::initializer_list<int> idx) const { return data_[flat_index(std::vector<int>(idx))]; }

void SmallTensor::require_compatible(const SmallTensor& o) const {
  if (o.frame_ != frame_)
    throw TensorError(std::string("frame mismatch: ") + to_string(frame_) + " vs " + to_string(o.frame_));
  if (o.variance_ != variance_) throw TensorError("variance mismatch");
}

SmallTensor& SmallTensor::operator+=(const SmallTensor& o) {
  require_compatible(o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}
SmallTensor& SmallTensor::operator-=(const SmallTensor& o) {
  require_compatible(o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}
SmallTensor& SmallTensor::operator*=(double s) {
  for (double& c : data_) c *= s;
  return *this;
}

SmallTensor operator+(SmallTensor a, const SmallTensor& b) { return a += b; }
SmallTensor operator-(SmallTensor a, const SmallTensor& b) { return a -= b; }
SmallTensor operator*(SmallTensor a, double s) { return a *= s; }

namespace {

Mat4<> metric_matrix(const SmallTensor& g, const SmallTensor& t) {
  if (g.rank() != 2 || g.variance()[0] != Variance::Down || g.variance()[1] != Variance::Down)
    throw TensorError("metric must be a rank-2 covariant tensor");
  if (g.frame() != t.frame())
    throw TensorError(std::string("frame mismatch: tensor is ") + to_string(t.frame()) + ", metric is " +
                      to_string(g.frame()));
  Mat4<> m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m[i][j] = g.components()[i * kDim + j];
  return m;
}

// Contract `slot` of t with matrix m (out_slot_index, in_slot_index) and flip its variance.
SmallTensor contract_slot(const SmallTensor& t, int slot, const Mat4<>& m, Variance new_variance) {
  auto variance = t.variance();
  variance[slot] = new_variance;
  SmallTensor out(variance, t.frame());
  const int rank = t.rank();
  std::size_t stride = 1;
  for (int s = rank - 1; s > slot; --s) stride *= kDim;
  const auto& in = t.components();
  std::vector<double> res(in.size(), 0.0);
  for (std::size_t flat = 0; flat < in.size(); ++flat) {
    const int a = static_cast<int>((flat / stride) % kDim);
    const std::size_t base = flat - static_cast<std::size_t>(a) * stride;
    for (int b = 0; b < kDim; ++b) res[base + static_cast<std::size_t>(b) * stride] += m[b][a] * in[flat];
  }
  return SmallTensor(variance, t.frame(), std::move(res));
}

void check_slot(const SmallTensor& t, int slot, Variance expected) {
  if (slot < 0 || slot >= t.rank()) throw TensorError("slot " + std::to_string(slot) + " out of range");
  if (t.variance()[slot] != expected)
    throw TensorError(expected == Variance::Up ? "slot is not contravariant" : "slot is not covariant");
}

}  // namespace

SmallTensor lower_index(const SmallTensor& t, int slot, const SmallTensor& g) {
  if (t.rank() == 0) return t;
  check_slot(t, slot, Variance::Up);
  return contract_slot(t, slot, metric_matrix(g, t), Variance::Down);
}

SmallTensor raise_index(const SmallTensor& t, int slot, const SmallTensor& g) {
  if (t.rank() == 0) return t;
  check_slot(t, slot, Variance::Down);
  return contract_slot(t, slot, inverse(metric_matrix(g, t)), Variance::Up);
}

NormSign norm_and_sign(const Mat4<>& g, const Vec4<>& y, double null_tol) {
  for (double c : y)
    if (!std::isfinite(c)) throw NullFiberError("fiber vector has non-finite components");
  const double q = quadratic(g, y, y);
  const double scale = max_abs(y);
  if (!(std::abs(q) >= null_tol * scale * scale) || scale == 0.0)
    throw NullFiberError("fiber vector is null: g_ij y^i y^j = " + std::to_string(q));
  return {std::sqrt(std::abs(q)), q > 0.0 ? 1 : -1};
}

PhasePoint make_phase_point(const Vec4<>& x, const Vec4<>& y, const Mat4<>& g, double null_tol) {
  const auto ns = norm_and_sign(g, y, null_tol);
  return {x, y, ns.norm, ns.sign};
}

DistinguishedSection distinguished_section(const PhasePoint& p, const Mat4<>& g) {
  DistinguishedSection l;
  for (int i = 0; i < kDim; ++i) l.up[i] = p.y[i] / p.norm;
  l.down = mat_vec(g, l.up);
  return l;
}

Mat4<> angular_metric(const PhasePoint& p, const Mat4<>& g) {
  const auto l = distinguished_section(p, g);
  Mat4<> h;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) h[i][j] = g[i][j] - p.sign * l.down[i] * l.down[j];
  return h;
}

}  // namespace tidal
