#include "fanforge/pwl.hpp"

#include <algorithm>

#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

Rational lerp(const PiecewiseLinearMap::Point& a, const PiecewiseLinearMap::Point& b,
              const Rational& u) {
  return a.second + (b.second - a.second) * (u - a.first) / (b.first - a.first);
}

}  // namespace

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<Point> breakpoints) : pts_(std::move(breakpoints)) {
  if (pts_.size() < 2) throw ArgumentError("piecewise-linear map needs at least two breakpoints");
  for (std::size_t i = 1; i < pts_.size(); ++i)
    if (!(pts_[i - 1].first < pts_[i].first) || !(pts_[i - 1].second < pts_[i].second))
      throw ArgumentError("breakpoints must be strictly increasing in both coordinates");
  // drop collinear interior breakpoints so equal maps compare equal
  std::vector<Point> out{pts_.front()};
  for (std::size_t i = 1; i + 1 < pts_.size(); ++i) {
    const Point& a = out.back();
    const Point& b = pts_[i];
    const Point& c = pts_[i + 1];
    if ((b.second - a.second) * (c.first - b.first) != (c.second - b.second) * (b.first - a.first))
      out.push_back(b);
  }
  out.push_back(pts_.back());
  pts_ = std::move(out);
}

PiecewiseLinearMap PiecewiseLinearMap::identity(const Rational& lo, const Rational& hi) {
  return PiecewiseLinearMap({{lo, lo}, {hi, hi}});
}

Rational PiecewiseLinearMap::operator()(const Rational& u) const {
  if (u < pts_.front().first || u > pts_.back().first) throw RangeError("argument outside map domain");
  auto it = std::lower_bound(pts_.begin(), pts_.end(), u,
                             [](const Point& p, const Rational& v) { return p.first < v; });
  if (it->first == u) return it->second;
  return lerp(*(it - 1), *it, u);
}

Rational PiecewiseLinearMap::inverse_eval(const Rational& v) const {
  if (v < pts_.front().second || v > pts_.back().second) throw RangeError("argument outside map range");
  auto it = std::lower_bound(pts_.begin(), pts_.end(), v,
                             [](const Point& p, const Rational& w) { return p.second < w; });
  if (it->second == v) return it->first;
  const Point& a = *(it - 1);
  const Point& b = *it;
  return a.first + (b.first - a.first) * (v - a.second) / (b.second - a.second);
}

PiecewiseLinearMap PiecewiseLinearMap::inverse() const {
  std::vector<Point> inv;
  inv.reserve(pts_.size());
  for (const auto& p : pts_) inv.emplace_back(p.second, p.first);
  return PiecewiseLinearMap(std::move(inv));
}

PiecewiseLinearMap PiecewiseLinearMap::after(const PiecewiseLinearMap& first) const {
  if (first.pts_.front().second != domain_lo() || first.pts_.back().second != domain_hi())
    throw ArgumentError("composition requires matching range and domain");
  std::vector<Rational> us;
  for (const auto& p : first.pts_) us.push_back(p.first);
  for (const auto& p : pts_) us.push_back(first.inverse_eval(p.first));
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  std::vector<Point> out;
  for (const auto& u : us) out.emplace_back(u, (*this)(first(u)));
  return PiecewiseLinearMap(std::move(out));
}

bool PiecewiseLinearMap::is_identity() const {
  for (const auto& p : pts_)
    if (p.first != p.second) return false;
  return true;
}

}  // namespace fanforge
