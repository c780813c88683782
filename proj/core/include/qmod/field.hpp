#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qmod/extended.hpp"
#include "qmod/geometry.hpp"

namespace qmod {

struct ConstantField {
  double value = 1.0;
};

/// |x - a|^{-s}, clamped from above at `cap`. Negative s gives growing powers.
struct RadialPowerField {
  Point center;
  double exponent = 1.0;
  double cap = std::numeric_limits<double>::infinity();
};

/// (log(e / |x - a|))^m on |x - a| < 1, and 1 elsewhere.
struct LogPowerField {
  Point center;
  double power = 1.0;
};

/// Values on a regular node lattice: node k on axis i sits at
/// lo[i] + k * (hi[i] - lo[i]) / (counts[i] - 1). Values are row-major with
/// the last axis fastest.
class GridField {
 public:
  GridField(Point lo, Point hi, std::vector<std::size_t> counts, std::vector<double> values,
            std::optional<double> outside = std::nullopt);

  int dimension() const { return static_cast<int>(lo_.size()); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<double>& values() const { return values_; }
  std::optional<double> outside() const { return outside_; }

  /// Multilinear interpolation inside the lattice box; `outside` (or
  /// std::out_of_range) beyond it.
  double interpolate(std::span<const double> x) const;

 private:
  Point lo_;
  Point hi_;
  std::vector<std::size_t> counts_;
  std::vector<double> values_;
  std::optional<double> outside_;
};

/// The dilatation Q. Vanishes identically outside its support domain. An
/// optional affine pullback x -> scale * x + shift is applied before both the
/// support test and the evaluation.
class ScalarField {
 public:
  using Kind = std::variant<ConstantField, RadialPowerField, LogPowerField, GridField>;

  ScalarField(Kind kind, Domain support);

  const Kind& kind() const { return kind_; }
  const Domain& support() const { return support_; }
  int dimension() const { return qmod::dimension(support_); }

  /// Raw value in [0, inf].
  double value_at(std::span<const double> x) const;
  ExtendedNonneg evaluate(std::span<const double> x) const { return ExtendedNonneg(value_at(x)); }

  /// Q~(x) = Q(scale * x + shift).
  ScalarField pulled_back(double scale, std::span<const double> shift) const;

 private:
  double raw(std::span<const double> y) const;

  Kind kind_;
  Domain support_;
  double scale_ = 1.0;
  Point shift_;
};

ExtendedNonneg eval_field(const ScalarField& q, std::span<const double> x);

}  // namespace qmod
