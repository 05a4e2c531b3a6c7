#include <Eigen/Dense>
#include <random>

#include "cfp/error.hpp"
#include "cfp/sets.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfp;

namespace {

using Vec = std::vector<double>;

double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// A polyhedron as rows a.x <= b (inequalities) and a.x == b (equalities).
struct Polyhedron {
  std::vector<Vec> a;
  Vec b;
  std::vector<bool> equality;
};

// Projection by enumerating active sets: for every subset containing all
// equalities, solve the equality-constrained least-squares problem and keep
// the nearest candidate that satisfies every constraint.
std::optional<Vec> active_set_projection(const Polyhedron& p, const Vec& x) {
  const std::size_t m = p.a.size();
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  std::optional<Vec> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    bool ok = true;
    for (std::size_t r = 0; r < m; ++r) {
      if (p.equality[r] && !(mask >> r & 1u)) ok = false;
    }
    if (!ok) continue;
    std::vector<std::size_t> act;
    for (std::size_t r = 0; r < m; ++r) {
      if (mask >> r & 1u) act.push_back(r);
    }
    Eigen::VectorXd y = xv;
    if (!act.empty()) {
      Eigen::MatrixXd a(static_cast<Eigen::Index>(act.size()), n);
      Eigen::VectorXd b(static_cast<Eigen::Index>(act.size()));
      for (std::size_t r = 0; r < act.size(); ++r) {
        for (Eigen::Index c = 0; c < n; ++c) a(static_cast<Eigen::Index>(r), c) = p.a[act[r]][static_cast<std::size_t>(c)];
        b(static_cast<Eigen::Index>(r)) = p.b[act[r]];
      }
      // y = x - A^T (A A^T)^+ (A x - b)
      const Eigen::MatrixXd aat = a * a.transpose();
      const Eigen::VectorXd lam = aat.completeOrthogonalDecomposition().solve(a * xv - b);
      y = xv - a.transpose() * lam;
      if ((a * y - b).norm() > 1e-9) continue;  // inconsistent active set
    }
    bool feasible = true;
    for (std::size_t r = 0; r < m && feasible; ++r) {
      double ax = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) ax += p.a[r][static_cast<std::size_t>(c)] * y(c);
      feasible = p.equality[r] ? std::abs(ax - p.b[r]) <= 1e-9 : ax <= p.b[r] + 1e-9;
    }
    if (!feasible) continue;
    const double d = (y - xv).norm();
    if (d < best_d) {
      best_d = d;
      best = Vec(y.data(), y.data() + n);
    }
  }
  return best;
}

SetSpec as_spec(const Polyhedron& p) {
  std::vector<SetSpec> members;
  for (std::size_t r = 0; r < p.a.size(); ++r) {
    members.push_back(p.equality[r] ? SetSpec::hyperplane(p.a[r], p.b[r]) : SetSpec::halfspace(p.a[r], p.b[r]));
  }
  return SetSpec::composite(std::move(members));
}

std::vector<SetSpec> sample_sets(std::mt19937_64& rng, std::size_t dim) {
  auto a = cfp::testing::random_vector(rng, dim);
  auto a2 = cfp::testing::random_vector(rng, dim);
  Vec lo(dim), hi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    lo[i] = -1.0 - static_cast<double>(i % 2);
    hi[i] = 1.0 + static_cast<double>(i % 3);
  }
  return {SetSpec::box(lo, hi), SetSpec::halfspace(a, 0.3), SetSpec::hyperplane(a2, -0.2),
          SetSpec::composite({SetSpec::box(lo, hi), SetSpec::hyperplane(a2, 0.0), SetSpec::halfspace(a, 0.2)})};
}

}  // namespace

TEST_CASE("box projection clamps") {
  const auto box = SetSpec::box({0.0}, {1.0});
  CHECK(project(box, Vec{5})[0] == 1.0);
  CHECK(project(box, Vec{-1})[0] == 0.0);
  CHECK(project(box, Vec{0.5})[0] == 0.5);
  CHECK(dist(box, Vec{5}) == 4.0);
  CHECK(dist(box, Vec{0.25}) == 0.0);
}

TEST_CASE("halfspace projection") {
  const auto h = SetSpec::halfspace({1.0, 0.0}, 0.0);
  CHECK(project(h, Vec{2, 3}) == Vec{0, 3});
  CHECK(project(h, Vec{-1, 3}) == Vec{-1, 3});
  CHECK(dist(h, Vec{0.5, 0}) == 0.5);
}

TEST_CASE("composite of hyperplane and box") {
  const auto c = SetSpec::composite({SetSpec::hyperplane({1, 1}, 1), SetSpec::box({0, 0}, {kInf, kInf})});
  const auto p = project(c, Vec{2, 2});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-9));
  Polyhedron poly{{{1, 1}, {-1, 0}, {0, -1}}, {1, 0, 0}, {true, false, false}};
  const auto oracle = active_set_projection(poly, {2, 2});
  REQUIRE(oracle);
  CHECK(dist2(*oracle, p) <= 1e-6);
}

TEST_CASE("contains uses the distance tolerance") {
  CHECK(contains(SetSpec::box({0}, {1}), Vec{1 + 1e-9}, 1e-6));
  CHECK_FALSE(contains(SetSpec::box({0}, {1}), Vec{2}, 1e-6));
  CHECK(contains(SetSpec::hyperplane({1, 0}, 0), Vec{1e-7, 1}, 1e-6));
}

TEST_CASE("prox_scaled blends toward the projection") {
  const auto box = SetSpec::box({0}, {1});
  CHECK(prox_scaled(box, Vec{0.3}, 4.0)[0] == doctest::Approx(0.3));
  CHECK(prox_scaled(box, Vec{3}, 1.0)[0] == 2.0);
  CHECK(std::abs(prox_scaled(box, Vec{3}, 1e6)[0] - 1.0) <= 1e-5);
  CHECK_THROWS_AS(prox_scaled(box, Vec{3}, 0.0), Error);
}

TEST_CASE("invalid specs and dimension errors") {
  CHECK_THROWS_AS(SetSpec::box({1}, {0}), Error);
  CHECK_THROWS_AS(SetSpec::halfspace({0, 0}, 1), Error);
  CHECK_THROWS_AS(SetSpec::composite({SetSpec::box({0}, {1}), SetSpec::box({0, 0}, {1, 1})}), Error);
  CHECK_THROWS_AS(project(SetSpec::box({0}, {1}), Vec{1, 2}), Error);
}

TEST_CASE("empty composite reports non-convergence") {
  const auto empty = SetSpec::composite({SetSpec::halfspace({1}, 0), SetSpec::halfspace({-1}, -1)}, 1e-10, 200);
  try {
    project(empty, Vec{3});
    FAIL("expected CompositeNoConverge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CompositeNoConverge);
  }
}

TEST_CASE("projections are idempotent and nonexpansive" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 1 + rng() % 5;
    for (const SetSpec& s : sample_sets(rng, dim)) {
      const Vec x = cfp::testing::random_vector(rng, dim, 3.0);
      const Vec y = cfp::testing::random_vector(rng, dim, 3.0);
      const Vec px = project(s, x);
      const Vec py = project(s, y);
      CHECK(dist2(project(s, px), px) <= 1e-9);
      CHECK(dist2(px, py) <= dist2(x, y) + 1e-9);
      const bool composite = std::holds_alternative<Composite>(s.variant());
      CHECK(dist(s, px) <= (composite ? 1e-9 : 1e-12));
      CHECK(dist(s, x) == doctest::Approx(dist2(x, px)).epsilon(1e-12));
    }
  }
}

TEST_CASE("composite projection matches the active-set oracle" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng() % 5;
    const std::size_t m = 1 + rng() % 6;
    Polyhedron p;
    // Rows pass near a random interior point so most polyhedra are nonempty.
    const Vec centre = cfp::testing::random_vector(rng, dim);
    for (std::size_t r = 0; r < m; ++r) {
      Vec a = cfp::testing::random_vector(rng, dim);
      double ac = 0.0;
      for (std::size_t i = 0; i < dim; ++i) ac += a[i] * centre[i];
      const bool eq = r == 0 && rng() % 3 == 0;
      p.a.push_back(a);
      p.b.push_back(eq ? ac : ac + std::abs(cfp::testing::random_vector(rng, 1)[0]));
      p.equality.push_back(eq);
    }
    const Vec x = cfp::testing::random_vector(rng, dim, 4.0);
    const auto oracle = active_set_projection(p, x);
    REQUIRE(oracle);
    const Vec got = project(as_spec(p), x);
    CHECK(dist2(got, *oracle) <= 1e-6);
    ++checked;
  }
  CHECK(checked == 200);
}
