#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace cfp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultContainsTol = 1e-6;

// {x : lower <= x <= upper}; unbounded sides use +-kInf.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

// {x : normal . x <= offset}
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
};

// {x : normal . x == offset}
struct Hyperplane {
  std::vector<double> normal;
  double offset = 0.0;
};

class SetSpec;

// Intersection of members sharing one dimension. Projection runs a cyclic
// Dykstra iteration; nonemptiness is never assumed.
struct Composite {
  std::vector<SetSpec> members;
  double inner_tol = 1e-10;
  std::size_t inner_max_iter = 10'000;
};

class SetSpec {
 public:
  using Variant = std::variant<Box, Halfspace, Hyperplane, Composite>;

  // Each factory validates its invariants and throws InvalidSet.
  static SetSpec box(std::vector<double> lower, std::vector<double> upper);
  static SetSpec halfspace(std::vector<double> normal, double offset);
  static SetSpec hyperplane(std::vector<double> normal, double offset);
  static SetSpec composite(std::vector<SetSpec> members, double inner_tol = 1e-10,
                           std::size_t inner_max_iter = 10'000);
  // R^n, as an unbounded box.
  static SetSpec whole_space(std::size_t dim);

  std::size_t dimension() const { return dim_; }
  const Variant& variant() const { return v_; }

 private:
  SetSpec(Variant v, std::size_t dim) : v_(std::move(v)), dim_(dim) {}

  Variant v_;
  std::size_t dim_ = 0;
};

// Euclidean projection. Exact for primitives; within inner_tol for Composite.
// Throws DimensionMismatch or CompositeNoConverge.
std::vector<double> project(const SetSpec& spec, std::span<const double> x);
void project_into(const SetSpec& spec, std::span<const double> x, std::span<double> out);

double dist(const SetSpec& spec, std::span<const double> x);

bool contains(const SetSpec& spec, std::span<const double> x, double tol = kDefaultContainsTol);

// Proximity operator of mu * 0.5 * dist(., set)^2: (x + mu * P(x)) / (1 + mu).
std::vector<double> prox_scaled(const SetSpec& spec, std::span<const double> x, double mu);

}  // namespace cfp
