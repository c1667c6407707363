// Set distances: conventions, metric axioms, and oracle equivalence.

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "shapeval/random.hpp"
#include "shapeval/set_metrics.hpp"

using namespace shapeval;
using Catch::Approx;

TEST_CASE("empty-set conventions are uniform across the distances") {
  const ShapeSet none;
  ShapeSet one;
  one.shapes.push_back(Shape::make_box(0, 0, 2, 2));

  for (double cutoff : {1.0, 0.5}) {
    const MetricConfig cfg{BaseDistance::Iou, 1.0, cutoff};
    CHECK(hausdorff(none, none, cfg) == 0.0);
    CHECK(emd(none, none, cfg) == 0.0);
    CHECK(ospa(none, none, cfg) == 0.0);
    CHECK(ospa_unnormalized(none, none, cfg) == 0.0);
    CHECK(hausdorff(one, none, cfg) == cutoff);
    CHECK(hausdorff(none, one, cfg) == cutoff);
    CHECK(emd(one, none, cfg) == cutoff);
    CHECK(ospa(one, none, cfg) == cutoff);
    CHECK(ospa_unnormalized(none, one, cfg) == Approx(cutoff));
  }
}

TEST_CASE("identical sets are at distance zero") {
  Rng rng(11);
  const MetricConfig cfg;
  for (int it = 0; it < 100; ++it) {
    const ShapeSet x = oracle::random_box_set(rng, 6);
    CHECK(hausdorff(x, x, cfg) == Approx(0.0).margin(1e-12));
    CHECK(emd(x, x, cfg) == Approx(0.0).margin(1e-12));
    CHECK(ospa(x, x, cfg) == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("set distances satisfy symmetry and the triangle inequality") {
  Rng rng(12);
  for (double cutoff : {1.0, 0.5}) {
    const MetricConfig cfg{BaseDistance::Iou, 1.0, cutoff};
    for (int it = 0; it < 300; ++it) {
      const ShapeSet x = oracle::random_box_set(rng, 6);
      const ShapeSet y = oracle::random_box_set(rng, 6);
      const ShapeSet z = oracle::random_box_set(rng, 6);
      const auto all = {+hausdorff, +emd, +ospa};
      for (auto fn : all) {
        const double xy = fn(x, y, cfg);
        const double yz = fn(y, z, cfg);
        const double xz = fn(x, z, cfg);
        CHECK(xy == Approx(fn(y, x, cfg)).margin(1e-9));
        CHECK(xz <= xy + yz + 1e-9);
      }
    }
  }
}

TEST_CASE("optimal sub-pattern distance equals the exhaustive-permutation value") {
  Rng rng(13);
  for (int it = 0; it < 400; ++it) {
    const ShapeSet x = oracle::random_box_set(rng, 5);
    const ShapeSet y = oracle::random_box_set(rng, 5);
    for (double cutoff : {1.0, 0.5}) {
      for (double order : {1.0, 2.0}) {
        const MetricConfig cfg{BaseDistance::Iou, order, cutoff};
        CHECK(ospa(x, y, cfg) == Approx(oracle::ospa_value(x, y, cfg, true)).margin(1e-9));
        CHECK(ospa_unnormalized(x, y, cfg) ==
              Approx(oracle::ospa_value(x, y, cfg, false)).margin(1e-9));
      }
    }
  }
}

TEST_CASE("max-min distance equals the direct double-loop value") {
  Rng rng(14);
  for (int it = 0; it < 400; ++it) {
    const ShapeSet x = oracle::random_box_set(rng, 6);
    const ShapeSet y = oracle::random_box_set(rng, 6);
    for (double cutoff : {1.0, 0.5}) {
      const MetricConfig cfg{BaseDistance::Iou, 1.0, cutoff};
      CHECK(hausdorff(x, y, cfg) ==
            Approx(oracle::hausdorff_value(x, y, cfg)).margin(1e-12));
    }
  }
}

TEST_CASE("equal-cardinality transport distance equals the mean assignment cost") {
  Rng rng(15);
  for (int it = 0; it < 300; ++it) {
    const int n = uniform_int(rng, 1, 6);
    ShapeSet x, y;
    for (int i = 0; i < n; ++i) {
      x.shapes.push_back(oracle::random_box(rng));
      y.shapes.push_back(oracle::random_box(rng));
    }
    const MetricConfig cfg;
    const CostMatrix costs = detail::pairwise_costs(x, y, cfg, 1.0);
    const Matching m = solve_assignment(costs);
    CHECK(emd(x, y, cfg) == Approx(m.total_cost / n).margin(1e-9));
  }
}

TEST_CASE("unbalanced transport distance can undercut the assignment route") {
  // One perfect twin plus one distant extra: the coupling spreads mass and
  // scores strictly below the padded-assignment reading.
  ShapeSet x, y;
  x.shapes.push_back(Shape::make_box(0, 0, 10, 10));
  y.shapes.push_back(Shape::make_box(0, 0, 10, 10));
  y.shapes.push_back(Shape::make_box(100, 0, 110, 10));
  const MetricConfig cfg;
  // Flow: each column needs 1/2; row sends 1/2 at distance 0 and 1/2 at 1.
  CHECK(emd(x, y, cfg) == Approx(0.5).margin(1e-12));
  CHECK(ospa(x, y, cfg) == Approx(0.5).margin(1e-12));  // (0 + 1 * cutoff) / 2
  CHECK(hausdorff(x, y, cfg) == Approx(1.0).margin(1e-12));
}

TEST_CASE("distance values respect the cutoff ceiling") {
  Rng rng(16);
  for (int it = 0; it < 200; ++it) {
    const ShapeSet x = oracle::random_box_set(rng, 5);
    const ShapeSet y = oracle::random_box_set(rng, 5);
    const MetricConfig cfg{BaseDistance::Iou, 1.0, 0.5};
    CHECK(hausdorff(x, y, cfg) <= 0.5 + 1e-12);
    CHECK(emd(x, y, cfg) <= 0.5 + 1e-12);
    CHECK(ospa(x, y, cfg) <= 0.5 + 1e-12);
  }
}

TEST_CASE("un-normalized distance scales the normalized one by the larger cardinality") {
  Rng rng(17);
  for (int it = 0; it < 200; ++it) {
    const ShapeSet x = oracle::random_box_set(rng, 5);
    const ShapeSet y = oracle::random_box_set(rng, 5);
    const auto n = static_cast<double>(std::max(x.shapes.size(), y.shapes.size()));
    if (n == 0) continue;
    for (double order : {1.0, 2.0}) {
      const MetricConfig cfg{BaseDistance::Iou, order, 1.0};
      CHECK(ospa_unnormalized(x, y, cfg) ==
            Approx(ospa(x, y, cfg) * std::pow(n, 1.0 / order)).margin(1e-9));
    }
  }
}

TEST_CASE("metric configuration is validated") {
  const ShapeSet x;
  CHECK_THROWS_AS(ospa(x, x, MetricConfig{BaseDistance::Iou, 0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ospa(x, x, MetricConfig{BaseDistance::Iou, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ospa(x, x, MetricConfig{BaseDistance::Iou, 1.0, 1.5}),
                  std::invalid_argument);
}
