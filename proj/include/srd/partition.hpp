#ifndef SRD_PARTITION_HPP
#define SRD_PARTITION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace srd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Partition of a bounded interval [a,b] into k subintervals.
///
/// Knots are stored as given; subinterval widths are always derived from
/// them. Subintervals are half-open [t_{i-1}, t_i) except the last one,
/// which is closed on the right: [t_{k-1}, b].
class Partition {
public:
  explicit Partition(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2)
      throw std::invalid_argument("Partition: need at least two knots");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (!(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument("Partition: knots must be strictly increasing");
  }

  double a() const { return knots_.front(); }
  double b() const { return knots_.back(); }
  int size() const { return static_cast<int>(knots_.size()) - 1; }

  const std::vector<double>& knots() const { return knots_; }

  double knot(int i) const { return knots_[static_cast<std::size_t>(i)]; }

  double width(int i) const {
    return knots_[static_cast<std::size_t>(i) + 1] - knots_[static_cast<std::size_t>(i)];
  }

  Vector widths() const {
    Vector d(size());
    for (int i = 0; i < size(); ++i) d[i] = width(i);
    return d;
  }

  double midpoint(int i) const {
    return 0.5 * (knots_[static_cast<std::size_t>(i)] + knots_[static_cast<std::size_t>(i) + 1]);
  }

  /// Index of the cell containing x.  x = t_i for 0 < i < k belongs to the
  /// right cell; x = b belongs to the last cell.
  int cell_of(double x) const {
    if (x < a() || x > b()) {
      std::ostringstream msg;
      msg << "Partition: value " << x << " outside [" << a() << ", " << b() << "]";
      throw std::domain_error(msg.str());
    }
    if (x == b()) return size() - 1;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<int>(it - knots_.begin()) - 1;
  }

  /// Cheap structural identity used to couple count vectors to the
  /// partition that produced them.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      h ^= bits;
      h *= 0x100000001b3ULL;
    };
    for (double t : knots_) mix(t);
    return h;
  }

  friend bool operator==(const Partition& lhs, const Partition& rhs) {
    return lhs.knots_ == rhs.knots_;
  }

private:
  std::vector<double> knots_;
};

/// Per-cell sample counts: the sufficient statistic of the conditional model.
struct CountVector {
  Eigen::VectorXi counts;
  int n = 0;
  std::uint64_t partition_fingerprint = 0;
};

inline Partition uniform_partition(double a, double b, int k) {
  if (!(a < b)) throw std::invalid_argument("uniform_partition: need a < b");
  if (k < 1) throw std::invalid_argument("uniform_partition: need k >= 1");
  std::vector<double> knots(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i)
    knots[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / k;
  knots.front() = a;
  knots.back() = b;
  return Partition(std::move(knots));
}

inline CountVector count_statistic(const Partition& p, const std::vector<double>& xs) {
  CountVector c;
  c.counts = Eigen::VectorXi::Zero(p.size());
  c.n = static_cast<int>(xs.size());
  c.partition_fingerprint = p.fingerprint();
  for (double x : xs) ++c.counts[p.cell_of(x)];
  return c;
}

/// Total integral of the step function with heights u: sum_i d_i u_i.
inline double s_delta(const Partition& p, const Vector& u) {
  if (u.size() != p.size())
    throw std::invalid_argument("s_delta: height vector length does not match partition");
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += p.width(i) * u[i];
  return s;
}

/// Completes projected coordinates y in R^{k-1} to the full height vector on
/// the hyperplane sum_i d_i h_i = 1.  The completed last coordinate may be
/// nonpositive; membership in H_1 is the caller's check.
inline Vector complete_heights(const Partition& p, const Vector& y) {
  const int k = p.size();
  if (y.size() != k - 1)
    throw std::invalid_argument("complete_heights: expected k-1 coordinates");
  Vector h(k);
  double partial = 0.0;
  for (int i = 0; i < k - 1; ++i) {
    h[i] = y[i];
    partial += p.width(i) * y[i];
  }
  h[k - 1] = (1.0 - partial) / p.width(k - 1);
  return h;
}

}  // namespace srd

#endif  // SRD_PARTITION_HPP
