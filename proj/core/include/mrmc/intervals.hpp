#pragma once

#include <limits>
#include <string>
#include <vector>

namespace mrmc {

inline constexpr double kForever = std::numeric_limits<double>::infinity();

/// Closed time interval [lo, hi]; hi may be +infinity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  [[nodiscard]] double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of closed intervals kept sorted and pairwise disjoint.
/// Inserting an interval that overlaps or touches existing ones merges them.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval i) { insert(i); }

  void insert(Interval i);
  void insert(const IntervalSet& other);

  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] const std::vector<Interval>& items() const { return items_; }
  [[nodiscard]] auto begin() const { return items_.begin(); }
  [[nodiscard]] auto end() const { return items_.end(); }
  [[nodiscard]] const Interval& front() const { return items_.front(); }
  [[nodiscard]] const Interval& back() const { return items_.back(); }

  [[nodiscard]] bool intersects(const Interval& i) const;
  [[nodiscard]] bool intersects(const IntervalSet& other) const;
  [[nodiscard]] IntervalSet intersection(const IntervalSet& other) const;
  [[nodiscard]] bool contains(double t) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> items_;
};

std::string to_string(const Interval& i);
std::string to_string(const IntervalSet& s);

}  // namespace mrmc
