#include "sprec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

MeasMatrix::MeasMatrix(Eigen::MatrixXd entries) : a_(std::move(entries)) {
  if (a_.rows() < 1 || a_.cols() < 1)
    throw ValidationError("measurement matrix must have m >= 1 and n >= 1");
  if (!a_.allFinite())
    throw ValidationError("measurement matrix has non-finite entries");
}

MeasMatrix gen_matrix(Index m, Index n, Stream& rng, Index entry_cap) {
  if (m < 1 || n < 1)
    throw ValidationError("gen_matrix: need m >= 1 and n >= 1, got m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
  if (m > entry_cap / n)
    throw GuardExceeded("gen_matrix: m*n = " + std::to_string(m) + "*" +
                        std::to_string(n) + " exceeds entry cap " +
                        std::to_string(entry_cap));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(double(m)));
  Eigen::MatrixXd a(m, n);
  double* p = a.data();
  for (Index i = 0; i < m * n; ++i) p[i] = normal(rng);
  return MeasMatrix(std::move(a));
}

// Plain loops: the summation order is fixed, so results do not depend on
// buffer alignment.
double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

ProjectionWorkspace::ProjectionWorkspace(const MeasMatrix& a,
                                         std::span<const double> y)
    : a_(&a), m_(a.rows()), y_norm2_(dot(y, y)) {
  if (Index(y.size()) != m_)
    throw ValidationError("projection: y has length " +
                          std::to_string(y.size()) + ", expected " +
                          std::to_string(m_));
  residuals_.assign(y.begin(), y.end());
  scratch_.resize(m_);
}

std::span<const double> ProjectionWorkspace::q(Index l) const {
  return {q_.data() + l * m_, static_cast<std::size_t>(m_)};
}

std::span<const double> ProjectionWorkspace::residual() const {
  return {residuals_.data() + rank_ * m_, static_cast<std::size_t>(m_)};
}

void ProjectionWorkspace::project_out(std::span<double> v) const {
  for (int pass = 0; pass < 2; ++pass)
    for (Index l = 0; l < rank_; ++l) axpy(-dot(q(l), v), q(l), v);
}

bool ProjectionWorkspace::direction(Index j, std::span<double> dir) const {
  auto col = a_->col(j);
  std::copy(col.begin(), col.end(), dir.begin());
  const double norm0 = std::sqrt(dot(col, col));
  project_out(dir);
  const double norm = std::sqrt(dot(dir, dir));
  if (!(norm > kRankDropTolerance * norm0)) return false;
  for (auto& v : dir) v /= norm;
  return true;
}

void ProjectionWorkspace::push(Index j) {
  if (j < 0 || j >= a_->cols())
    throw ValidationError("projection: column index " + std::to_string(j) +
                          " out of range");
  subset_.push_back(j);
  Frame frame{false, energy_};
  if (rank_ < m_ && direction(j, scratch_)) {
    const double c = dot(scratch_, residual());
    q_.insert(q_.end(), scratch_.begin(), scratch_.end());
    const std::size_t prev = residuals_.size();
    residuals_.resize(prev + m_);
    std::copy_n(residuals_.data() + prev - m_, m_, residuals_.data() + prev);
    ++rank_;
    axpy(-c, q(rank_ - 1), {residuals_.data() + rank_ * m_,
                            static_cast<std::size_t>(m_)});
    energy_ = std::min(energy_ + c * c, y_norm2_);
    frame.extended = true;
  }
  frames_.push_back(frame);
}

void ProjectionWorkspace::pop() {
  if (frames_.empty()) return;
  const Frame frame = frames_.back();
  frames_.pop_back();
  subset_.pop_back();
  if (frame.extended) {
    --rank_;
    q_.resize(rank_ * m_);
    residuals_.resize((rank_ + 1) * m_);
  }
  energy_ = frame.energy_before;
}

void ProjectionWorkspace::clear() {
  while (!frames_.empty()) pop();
}

double ProjectionWorkspace::energy_with(Index j) const {
  if (rank_ >= m_ || !direction(j, scratch_)) return energy_;
  const double c = dot(scratch_, residual());
  return std::min(energy_ + c * c, y_norm2_);
}

double ProjectionWorkspace::gain_of(Index j) const {
  if (j < 0 || j >= a_->cols())
    throw ValidationError("projection: column index " + std::to_string(j) +
                          " out of range");
  auto col = a_->col(j);
  std::copy(col.begin(), col.end(), scratch_.begin());
  project_out(scratch_);
  const double denom = dot(scratch_, scratch_);
  if (!(denom > kDegenerateGainDenominator))
    throw DegenerateColumn("column " + std::to_string(j) +
                           " lies numerically inside the base span (a'P a = " +
                           std::to_string(denom) + ")");
  const double num = dot(scratch_, residual());
  return num * num / denom;
}

Eigen::MatrixXd ProjectionWorkspace::basis() const {
  Eigen::MatrixXd out(m_, rank_);
  std::copy(q_.begin(), q_.end(), out.data());
  return out;
}

Subset normalize_subset(std::span<const Index> subset, Index n) {
  Subset s(subset.begin(), subset.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw ValidationError("subset contains duplicate indices");
  if (!s.empty() && (s.front() < 0 || s.back() >= n))
    throw ValidationError("subset index out of range [0, " +
                          std::to_string(n - 1) + "]");
  return s;
}

double projection_energy(const MeasMatrix& a, std::span<const Index> subset,
                         std::span<const double> y) {
  ProjectionWorkspace ws(a, y);
  for (Index j : normalize_subset(subset, a.cols())) ws.push(j);
  return ws.energy();
}

double residual_correlation_gain(const MeasMatrix& a,
                                 std::span<const Index> base, Index i,
                                 std::span<const double> y) {
  const Subset k = normalize_subset(base, a.cols());
  if (std::binary_search(k.begin(), k.end(), i))
    throw ValidationError("residual_correlation_gain: index " +
                          std::to_string(i) + " is already in the base set");
  ProjectionWorkspace ws(a, y);
  for (Index j : k) ws.push(j);
  return ws.gain_of(i);
}

}  // namespace sprec
