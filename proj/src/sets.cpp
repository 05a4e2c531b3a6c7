#include "cfp/sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfp/coupling.hpp"
#include "cfp/error.hpp"

namespace cfp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_nonzero(const std::vector<double>& a, const char* what) {
  const bool nonzero = std::any_of(a.begin(), a.end(), [](double e) { return e != 0.0; });
  if (!nonzero) throw Error(ErrorCode::InvalidSet, std::string(what) + " normal must be nonzero");
  for (double e : a) {
    if (!std::isfinite(e)) throw Error(ErrorCode::InvalidSet, std::string(what) + " normal must be finite");
  }
}

void project_affine(std::span<const double> a, double b, bool halfspace, std::span<const double> x,
                    std::span<double> out) {
  const double excess = dot(a, x) - b;
  std::copy(x.begin(), x.end(), out.begin());
  if (halfspace && excess <= 0.0) return;
  const double step = excess / dot(a, a);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] -= step * a[k];
}

void project_composite(const Composite& c, std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size();
  const std::size_t m = c.members.size();
  // Dykstra increments, one per member.
  std::vector<double> increments(n * m, 0.0);
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> cycle_start(n);
  std::vector<double> shifted(n);
  std::vector<double> projected(n);

  for (std::size_t iter = 0; iter < c.inner_max_iter; ++iter) {
    cycle_start = current;
    for (std::size_t q = 0; q < m; ++q) {
      double* inc = increments.data() + q * n;
      for (std::size_t k = 0; k < n; ++k) shifted[k] = current[k] + inc[k];
      project_into(c.members[q], shifted, projected);
      for (std::size_t k = 0; k < n; ++k) {
        inc[k] = shifted[k] - projected[k];
        current[k] = projected[k];
      }
    }
    if (distance(current, cycle_start) > c.inner_tol) continue;
    double residual = 0.0;
    for (const SetSpec& member : c.members) residual = std::max(residual, dist(member, current));
    if (residual <= c.inner_tol) {
      std::copy(current.begin(), current.end(), out.begin());
      return;
    }
  }
  throw Error(ErrorCode::CompositeNoConverge,
              "inner Dykstra did not reach tolerance in " + std::to_string(c.inner_max_iter) + " cycles");
}

}  // namespace

SetSpec SetSpec::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::InvalidSet, "box bounds differ in length");
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (std::isnan(lower[k]) || std::isnan(upper[k]) || lower[k] > upper[k]) {
      throw Error(ErrorCode::InvalidSet, "box requires lower <= upper at coordinate " + std::to_string(k));
    }
  }
  const std::size_t dim = lower.size();
  return SetSpec(Box{std::move(lower), std::move(upper)}, dim);
}

SetSpec SetSpec::halfspace(std::vector<double> normal, double offset) {
  require_nonzero(normal, "halfspace");
  const std::size_t dim = normal.size();
  return SetSpec(Halfspace{std::move(normal), offset}, dim);
}

SetSpec SetSpec::hyperplane(std::vector<double> normal, double offset) {
  require_nonzero(normal, "hyperplane");
  const std::size_t dim = normal.size();
  return SetSpec(Hyperplane{std::move(normal), offset}, dim);
}

SetSpec SetSpec::composite(std::vector<SetSpec> members, double inner_tol, std::size_t inner_max_iter) {
  if (members.empty()) throw Error(ErrorCode::InvalidSet, "composite needs at least one member");
  const std::size_t dim = members.front().dimension();
  for (const auto& m : members) {
    if (m.dimension() != dim) throw Error(ErrorCode::InvalidSet, "composite members differ in dimension");
  }
  if (!(inner_tol > 0.0) || inner_max_iter == 0) {
    throw Error(ErrorCode::InvalidSet, "composite needs inner_tol > 0 and inner_max_iter >= 1");
  }
  return SetSpec(Composite{std::move(members), inner_tol, inner_max_iter}, dim);
}

SetSpec SetSpec::whole_space(std::size_t dim) {
  return box(std::vector<double>(dim, -kInf), std::vector<double>(dim, kInf));
}

void project_into(const SetSpec& spec, std::span<const double> x, std::span<double> out) {
  if (x.size() != spec.dimension() || out.size() != spec.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "point has dimension " + std::to_string(x.size()) +
                                                  ", set has " + std::to_string(spec.dimension()));
  }
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::clamp(x[k], s.lower[k], s.upper[k]);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          project_affine(s.normal, s.offset, true, x, out);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          project_affine(s.normal, s.offset, false, x, out);
        } else {
          project_composite(s, x, out);
        }
      },
      spec.variant());
}

std::vector<double> project(const SetSpec& spec, std::span<const double> x) {
  std::vector<double> out(x.size());
  project_into(spec, x, out);
  return out;
}

double dist(const SetSpec& spec, std::span<const double> x) {
  return distance(x, project(spec, x));
}

bool contains(const SetSpec& spec, std::span<const double> x, double tol) {
  return dist(spec, x) <= tol;
}

std::vector<double> prox_scaled(const SetSpec& spec, std::span<const double> x, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::NonpositiveScale, "prox scale must be positive");
  std::vector<double> p = project(spec, x);
  for (std::size_t k = 0; k < x.size(); ++k) p[k] = (x[k] + mu * p[k]) / (1.0 + mu);
  return p;
}

}  // namespace cfp
