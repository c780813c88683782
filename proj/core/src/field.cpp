#include "qmod/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmod {

GridField::GridField(Point lo, Point hi, std::vector<std::size_t> counts,
                     std::vector<double> values, std::optional<double> outside)
    : lo_(std::move(lo)),
      hi_(std::move(hi)),
      counts_(std::move(counts)),
      values_(std::move(values)),
      outside_(outside) {
  const std::size_t n = lo_.size();
  if (n < 2 || hi_.size() != n || counts_.size() != n) {
    throw std::invalid_argument("GridField: inconsistent header dimensions");
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts_[i] < 2) throw std::invalid_argument("GridField: need >= 2 nodes per axis");
    if (!(hi_[i] > lo_[i])) throw std::invalid_argument("GridField: need lo < hi per axis");
    total *= counts_[i];
  }
  if (values_.size() != total) {
    throw std::invalid_argument("GridField: value count does not match header");
  }
  for (double v : values_) {
    if (std::isnan(v) || v < 0.0) throw std::invalid_argument("GridField: negative or NaN value");
  }
  if (outside_ && (std::isnan(*outside_) || *outside_ < 0.0)) {
    throw std::invalid_argument("GridField: outside value must be >= 0");
  }
}

double GridField::interpolate(std::span<const double> x) const {
  const std::size_t n = lo_.size();
  if (x.size() != n) throw std::invalid_argument("GridField: dimension mismatch");
  // Cell index and local coordinate per axis.
  std::size_t base[8];
  double frac[8];
  if (n > 8) throw std::invalid_argument("GridField: at most 8 dimensions");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) {
      if (outside_) return *outside_;
      throw std::out_of_range("GridField: point outside grid bounds");
    }
    const double h = (hi_[i] - lo_[i]) / static_cast<double>(counts_[i] - 1);
    const double s = (x[i] - lo_[i]) / h;
    std::size_t k = static_cast<std::size_t>(std::floor(s));
    k = std::min(k, counts_[i] - 2);
    base[i] = k;
    frac[i] = std::clamp(s - static_cast<double>(k), 0.0, 1.0);
  }
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (c >> i) & 1u;
      w *= up ? frac[i] : 1.0 - frac[i];
      idx = idx * counts_[i] + base[i] + (up ? 1 : 0);
    }
    if (w != 0.0) acc += w * values_[idx];
  }
  return acc;
}

ScalarField::ScalarField(Kind kind, Domain support)
    : kind_(std::move(kind)), support_(std::move(support)) {
  validate(support_);
  const int n = qmod::dimension(support_);
  shift_.assign(static_cast<std::size_t>(n), 0.0);
  if (const auto* c = std::get_if<ConstantField>(&kind_); c && !(c->value >= 0.0)) {
    throw std::invalid_argument("constant field must be >= 0");
  }
  if (const auto* r = std::get_if<RadialPowerField>(&kind_)) {
    if (static_cast<int>(r->center.size()) != n) throw std::invalid_argument("radial-power center dimension");
    if (!(r->cap > 0.0)) throw std::invalid_argument("radial-power cap must be positive");
  }
  if (const auto* l = std::get_if<LogPowerField>(&kind_)) {
    if (static_cast<int>(l->center.size()) != n) throw std::invalid_argument("log-power center dimension");
    if (!(l->power >= 0.0)) throw std::invalid_argument("log-power exponent must be >= 0");
  }
  if (const auto* g = std::get_if<GridField>(&kind_); g && g->dimension() != n) {
    throw std::invalid_argument("grid dimension differs from support dimension");
  }
}

double ScalarField::raw(std::span<const double> y) const {
  struct {
    std::span<const double> y;
    double operator()(const ConstantField& c) const { return c.value; }
    double operator()(const RadialPowerField& r) const {
      const double d = distance(y, r.center);
      if (d == 0.0) return r.exponent > 0.0 ? r.cap : (r.exponent == 0.0 ? 1.0 : 0.0);
      return std::min(std::pow(d, -r.exponent), r.cap);
    }
    double operator()(const LogPowerField& l) const {
      const double d = distance(y, l.center);
      if (d >= 1.0) return 1.0;
      if (d == 0.0) return l.power > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
      return std::pow(1.0 - std::log(d), l.power);
    }
    double operator()(const GridField& g) const { return g.interpolate(y); }
  } visitor{y};
  return std::visit(visitor, kind_);
}

double ScalarField::value_at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) {
    throw std::invalid_argument("ScalarField: dimension mismatch");
  }
  for (double c : x) {
    if (!std::isfinite(c)) throw std::invalid_argument("ScalarField: point must be finite");
  }
  if (scale_ == 1.0 && std::all_of(shift_.begin(), shift_.end(), [](double s) { return s == 0.0; })) {
    return contains(support_, x) ? raw(x) : 0.0;
  }
  double buf[16];
  const std::size_t n = x.size();
  if (n > 16) throw std::invalid_argument("ScalarField: at most 16 dimensions");
  for (std::size_t i = 0; i < n; ++i) buf[i] = scale_ * x[i] + shift_[i];
  const std::span<const double> y(buf, n);
  return contains(support_, y) ? raw(y) : 0.0;
}

ScalarField ScalarField::pulled_back(double scale, std::span<const double> shift) const {
  if (!(scale > 0.0)) throw std::invalid_argument("pullback scale must be positive");
  if (static_cast<int>(shift.size()) != dimension()) {
    throw std::invalid_argument("pullback shift dimension mismatch");
  }
  ScalarField out = *this;
  // Compose: Q(s1 * (s2 x + b2) + b1) = Q(s1 s2 x + s1 b2 + b1).
  for (std::size_t i = 0; i < shift.size(); ++i) out.shift_[i] = scale_ * shift[i] + shift_[i];
  out.scale_ = scale_ * scale;
  return out;
}

ExtendedNonneg eval_field(const ScalarField& q, std::span<const double> x) { return q.evaluate(x); }

}  // namespace qmod
