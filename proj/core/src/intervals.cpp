#include "mrmc/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrmc/format.hpp"

namespace mrmc {

void IntervalSet::insert(Interval i) {
  if (!(i.lo <= i.hi)) throw std::invalid_argument("interval must satisfy lo <= hi");
  // First item whose right end reaches i.lo; everything before stays.
  auto first = std::lower_bound(items_.begin(), items_.end(), i.lo,
                                [](const Interval& a, double lo) { return a.hi < lo; });
  auto last = first;
  while (last != items_.end() && last->lo <= i.hi) {
    i.lo = std::min(i.lo, last->lo);
    i.hi = std::max(i.hi, last->hi);
    ++last;
  }
  first = items_.erase(first, last);
  items_.insert(first, i);
}

void IntervalSet::insert(const IntervalSet& other) {
  for (const Interval& i : other.items_) insert(i);
}

bool IntervalSet::intersects(const Interval& i) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), i.lo,
                             [](const Interval& a, double lo) { return a.hi < lo; });
  return it != items_.end() && it->lo <= i.hi;
}

bool IntervalSet::intersects(const IntervalSet& other) const {
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (a->overlaps(*b)) return true;
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

IntervalSet IntervalSet::intersection(const IntervalSet& other) const {
  IntervalSet out;
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    const double lo = std::max(a->lo, b->lo);
    const double hi = std::min(a->hi, b->hi);
    if (lo <= hi) out.items_.push_back({lo, hi});
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return out;
}

bool IntervalSet::contains(double t) const { return intersects(Interval{t, t}); }

std::string to_string(const Interval& i) {
  return "[" + format_number(i.lo) + "," + (std::isinf(i.hi) ? "inf" : format_number(i.hi)) + "]";
}

std::string to_string(const IntervalSet& s) {
  std::string out;
  for (const Interval& i : s) out += to_string(i);
  return out;
}

}  // namespace mrmc
