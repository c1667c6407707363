// Detection scoring: F1 at a similarity threshold, average precision under
// greedy and optimal matching with both interpolation styles, class-averaged
// AP, and the log-average miss rate.  Hand-computed reference values pin the
// arithmetic; cascade constructions document which criteria break the
// triangle inequality when read as dissimilarities.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "shapeval/detection_criteria.hpp"

namespace sv = shapeval;

namespace {

sv::Shape box(double x0, double y0, double x1, double y1) {
  return sv::Shape::make_box(x0, y0, x1, y1);
}

sv::Shape scored(sv::Shape s, double score) {
  s.score = score;
  return s;
}

sv::Shape classed(sv::Shape s, int category) {
  s.category = category;
  return s;
}

sv::ShapeSet set_of(std::vector<sv::Shape> shapes) {
  sv::ShapeSet s;
  s.shapes = std::move(shapes);
  return s;
}

}  // namespace

TEST_CASE("F1 empty-set conventions and counts") {
  const sv::ShapeSet none;
  const sv::ShapeSet three = set_of({box(0, 0, 1, 1), box(2, 0, 3, 1), box(4, 0, 5, 1)});

  const sv::F1Result both = sv::f1_score(none, none, 0.5);
  CHECK(both.f1 == 1.0);
  CHECK(both.precision == 1.0);
  CHECK(both.recall == 1.0);
  CHECK(both.tp == 0);

  const sv::F1Result no_preds = sv::f1_score(three, none, 0.5);
  CHECK(no_preds.f1 == 0.0);
  CHECK(no_preds.fn == 3);
  CHECK(no_preds.fp == 0);
  CHECK(no_preds.recall == 0.0);

  const sv::F1Result no_refs = sv::f1_score(none, three, 0.5);
  CHECK(no_refs.f1 == 0.0);
  CHECK(no_refs.fp == 3);
  CHECK(no_refs.fn == 0);
  CHECK(no_refs.precision == 0.0);
}

TEST_CASE("F1 counts on a mixed scene") {
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10), box(100, 0, 110, 10)});
  const sv::ShapeSet pred =
      set_of({box(0, 0, 10, 10), box(50, 0, 55, 5), box(200, 0, 210, 10)});
  const sv::F1Result r = sv::f1_score(ref, pred, 0.5);
  CHECK(r.tp == 1);
  CHECK(r.fp == 2);
  CHECK(r.fn == 1);
  CHECK(r.precision == Catch::Approx(1.0 / 3.0));
  CHECK(r.recall == Catch::Approx(0.5));
  CHECK(r.f1 == Catch::Approx(0.4));
}

TEST_CASE("F1 threshold controls which assigned pairs count") {
  // Overlap similarity between the two boxes is 7/13 (about 0.538).
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10)});
  const sv::ShapeSet pred = set_of({box(3, 0, 13, 10)});
  CHECK(sv::f1_score(ref, pred, 0.5).f1 == 1.0);
  CHECK(sv::f1_score(ref, pred, 0.55).f1 == 0.0);
}

TEST_CASE("thresholded F1 dissimilarity violates the triangle inequality") {
  // A chain of equally spaced boxes: each neighbour pair clears the 0.5
  // overlap threshold but the endpoints do not, so 1 - F1 jumps from 0 to 1.
  const sv::ShapeSet a = set_of({box(0, 0, 10, 10)});
  const sv::ShapeSet b = set_of({box(3, 0, 13, 10)});
  const sv::ShapeSet c = set_of({box(6, 0, 16, 10)});
  const double dab = 1.0 - sv::f1_score(a, b, 0.5).f1;
  const double dbc = 1.0 - sv::f1_score(b, c, 0.5).f1;
  const double dac = 1.0 - sv::f1_score(a, c, 0.5).f1;
  CHECK(dab == 0.0);
  CHECK(dbc == 0.0);
  CHECK(dac == 1.0);
  CHECK(dac > dab + dbc);
}

TEST_CASE("average precision empty-set conventions and score requirement") {
  const sv::ShapeSet none;
  const sv::ShapeSet one = set_of({scored(box(0, 0, 1, 1), 0.9)});
  CHECK(sv::average_precision(none, none, 0.5) == 1.0);
  CHECK(sv::average_precision(one, none, 0.5) == 0.0);
  CHECK(sv::average_precision(none, one, 0.5) == 0.0);

  const sv::ShapeSet unscored = set_of({box(0, 0, 1, 1)});
  CHECK_THROWS_AS(sv::average_precision(one, unscored, 0.5), std::invalid_argument);
}

TEST_CASE("average precision on a perfect and a useless prediction") {
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10)});
  const sv::ShapeSet exact = set_of({scored(box(0, 0, 10, 10), 0.7)});
  const sv::ShapeSet far = set_of({scored(box(50, 50, 60, 60), 0.7)});
  for (sv::AssignMode mode : {sv::AssignMode::Greedy, sv::AssignMode::Optimal}) {
    CHECK(sv::average_precision(ref, exact, 0.5, sv::BaseDistance::Iou, mode) == 1.0);
    CHECK(sv::average_precision(ref, far, 0.5, sv::BaseDistance::Iou, mode) == 0.0);
  }
}

TEST_CASE("average precision dissimilarity violates the triangle inequality") {
  const sv::ShapeSet a = set_of({scored(box(0, 0, 10, 10), 0.9)});
  const sv::ShapeSet b = set_of({scored(box(3, 0, 13, 10), 0.9)});
  const sv::ShapeSet c = set_of({scored(box(6, 0, 16, 10), 0.9)});
  const double dab = 1.0 - sv::average_precision(a, b, 0.5);
  const double dbc = 1.0 - sv::average_precision(b, c, 0.5);
  const double dac = 1.0 - sv::average_precision(a, c, 0.5);
  CHECK(dab == 0.0);
  CHECK(dbc == 0.0);
  CHECK(dac == 1.0);
  CHECK(dac > dab + dbc);
}

TEST_CASE("greedy matching can halve AP where the optimal assignment recovers it") {
  // The higher-scored prediction sits equally close to both references; the
  // greedy pass hands it the first one, stranding the exact-copy prediction.
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10), box(6, 0, 16, 10)});
  const sv::ShapeSet pred =
      set_of({scored(box(3, 0, 13, 10), 0.9), scored(box(0, 0, 10, 10), 0.8)});
  CHECK(sv::average_precision(ref, pred, 0.5, sv::BaseDistance::Iou,
                              sv::AssignMode::Greedy) == 0.5);
  CHECK(sv::average_precision(ref, pred, 0.5, sv::BaseDistance::Iou,
                              sv::AssignMode::Optimal) == 1.0);
}

TEST_CASE("sampled-recall interpolation differs from the all-point area") {
  // Two references, one recovered: the all-point area is exactly 0.5 while a
  // 101-point recall grid counts 51 grid values at precision 1.
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10), box(100, 0, 110, 10)});
  const sv::ShapeSet pred = set_of({scored(box(0, 0, 10, 10), 0.9)});
  CHECK(sv::average_precision(ref, pred, 0.5) == 0.5);
  CHECK(sv::average_precision(ref, pred, 0.5, sv::BaseDistance::Iou, sv::AssignMode::Greedy,
                              sv::Interp::Grid, 101) == Catch::Approx(51.0 / 101.0));
  CHECK(sv::average_precision(ref, pred, 0.5, sv::BaseDistance::Iou, sv::AssignMode::Greedy,
                              sv::Interp::Grid, 2) == 0.5);
  CHECK_THROWS_AS(sv::average_precision(ref, pred, 0.5, sv::BaseDistance::Iou,
                                        sv::AssignMode::Greedy, sv::Interp::Grid, 1),
                  std::invalid_argument);
}

TEST_CASE("lower-scored false positives do not drag down the all-point area") {
  // One exact match at score 0.8 plus a far box at score 0.2: precision at
  // full recall stays 1 before the false positive enters the sweep.
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10)});
  const sv::ShapeSet pred =
      set_of({scored(box(0, 0, 10, 10), 0.8), scored(box(90, 90, 99, 99), 0.2)});
  CHECK(sv::average_precision(ref, pred, 0.5) == 1.0);

  // Scored the other way round the running-best precision is 1/2 at the only
  // recall step.
  const sv::ShapeSet reversed =
      set_of({scored(box(0, 0, 10, 10), 0.2), scored(box(90, 90, 99, 99), 0.8)});
  CHECK(sv::average_precision(ref, reversed, 0.5) == 0.5);
}

TEST_CASE("class-averaged AP averages per-class areas and validates input") {
  const sv::Shape r1 = classed(box(0, 0, 10, 10), 1);
  const sv::Shape r2 = classed(box(100, 0, 110, 10), 2);
  const sv::ShapeSet ref = set_of({r1, r2});

  SECTION("a missing class contributes zero; extra predicted classes are ignored") {
    const sv::ShapeSet pred = set_of({classed(scored(box(0, 0, 10, 10), 0.9), 1),
                                      classed(scored(box(200, 0, 210, 10), 0.9), 3)});
    CHECK(sv::mean_ap(ref, pred, 0.5) == 0.5);
  }

  SECTION("threshold-grid values are averaged per class") {
    // Overlap similarity 7/13 sits between the two grid thresholds.
    const sv::ShapeSet pred = set_of({classed(scored(box(3, 0, 13, 10), 0.9), 1)});
    const sv::ShapeSet ref_one = set_of({r1});
    CHECK(sv::mean_ap(ref_one, pred, std::vector<double>{0.5, 0.6}) == 0.5);
  }

  SECTION("categories are mandatory on both sides once a reference exists") {
    const sv::ShapeSet pred_uncat = set_of({scored(box(0, 0, 10, 10), 0.9)});
    CHECK_THROWS_AS(sv::mean_ap(ref, pred_uncat, 0.5), std::invalid_argument);
    const sv::ShapeSet ref_uncat = set_of({box(0, 0, 10, 10)});
    const sv::ShapeSet pred_cat = set_of({classed(scored(box(0, 0, 10, 10), 0.9), 1)});
    CHECK_THROWS_AS(sv::mean_ap(ref_uncat, pred_cat, 0.5), std::invalid_argument);
  }

  SECTION("empty reference short-circuits before any category check") {
    const sv::ShapeSet none;
    const sv::ShapeSet pred_uncat = set_of({scored(box(0, 0, 10, 10), 0.9)});
    CHECK(sv::mean_ap(none, none, 0.5) == 1.0);
    CHECK(sv::mean_ap(none, pred_uncat, 0.5) == 0.0);
  }

  SECTION("an empty threshold grid is rejected") {
    CHECK_THROWS_AS(sv::mean_ap(ref, ref, std::vector<double>{}), std::invalid_argument);
  }
}

TEST_CASE("reference false-positive rate grid") {
  const std::vector<double> grid = sv::default_fppi_grid();
  REQUIRE(grid.size() == 9);
  CHECK(grid.front() == Catch::Approx(0.01));
  CHECK(grid.back() == Catch::Approx(1.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("log-average miss rate on hand-built sweeps") {
  const sv::ShapeSet ref = set_of({box(0, 0, 10, 10)});
  const sv::ShapeSet exact = set_of({scored(box(0, 0, 10, 10), 0.9)});
  const sv::ShapeSet far = set_of({scored(box(50, 50, 60, 60), 0.9)});

  SECTION("perfect prediction hits the floor exactly") {
    CHECK(sv::log_average_miss_rate(ref, exact, 0.5) == 1e-4);
  }

  SECTION("useless or missing predictions miss everywhere") {
    CHECK(sv::log_average_miss_rate(ref, far, 0.5) == 1.0);
    CHECK(sv::log_average_miss_rate(ref, sv::ShapeSet{}, 0.5) == 1.0);
  }

  SECTION("empty reference scores the floor against an empty prediction") {
    CHECK(sv::log_average_miss_rate(sv::ShapeSet{}, sv::ShapeSet{}, 0.5) == 1e-4);
    CHECK(sv::log_average_miss_rate(sv::ShapeSet{}, far, 0.5) == 1.0);
  }

  SECTION("a false positive outranking the only match splits the grid") {
    // Sweep points: (fppi 1, mr 1) then (fppi 1, mr 0).  Every sampled rate
    // below one false positive per image stays 1; the rate-1 sample takes the
    // floored miss rate, so the geometric mean is the floor to the 1/9.
    const sv::ShapeSet mixed =
        set_of({scored(box(50, 50, 60, 60), 0.9), scored(box(0, 0, 10, 10), 0.8)});
    CHECK(sv::log_average_miss_rate(ref, mixed, 0.5) ==
          std::exp(std::log(1e-4) / 9.0));
  }

  SECTION("cascade construction breaks the triangle inequality") {
    const sv::ShapeSet a = set_of({box(0, 0, 10, 10)});
    const sv::ShapeSet bp = set_of({scored(box(3, 0, 13, 10), 0.9)});
    const sv::ShapeSet b = set_of({box(3, 0, 13, 10)});
    const sv::ShapeSet cp = set_of({scored(box(6, 0, 16, 10), 0.9)});
    const double dab = sv::log_average_miss_rate(a, bp, 0.5);
    const double dbc = sv::log_average_miss_rate(b, cp, 0.5);
    const double dac = sv::log_average_miss_rate(a, cp, 0.5);
    CHECK(dab == 1e-4);
    CHECK(dbc == 1e-4);
    CHECK(dac == 1.0);
    CHECK(dac > dab + dbc);
  }

  SECTION("the image count rescales the false-positive rate") {
    // One false positive over four images = fppi 0.25: sampling only below
    // that rate sees the initial all-miss point.
    const sv::ShapeSet mixed =
        set_of({scored(box(50, 50, 60, 60), 0.9), scored(box(0, 0, 10, 10), 0.8)});
    const std::vector<double> low{0.1};
    CHECK(sv::log_average_miss_rate(ref, mixed, 0.5, sv::BaseDistance::Iou,
                                    sv::AssignMode::Greedy, low, 1e-4, 4.0) == 1.0);
    const std::vector<double> high{0.25};
    CHECK(sv::log_average_miss_rate(ref, mixed, 0.5, sv::BaseDistance::Iou,
                                    sv::AssignMode::Greedy, high, 1e-4, 4.0) == 1e-4);
  }

  SECTION("degenerate parameters are rejected") {
    CHECK_THROWS_AS(sv::log_average_miss_rate(ref, exact, 0.5, sv::BaseDistance::Iou,
                                              sv::AssignMode::Greedy, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        sv::log_average_miss_rate(ref, exact, 0.5, sv::BaseDistance::Iou,
                                  sv::AssignMode::Greedy, sv::default_fppi_grid(), 1e-4, 0.0),
        std::invalid_argument);
  }
}

TEST_CASE("detection criteria stay within their ranges on random scenes") {
  sv::Rng rng(2024);
  for (int it = 0; it < 150; ++it) {
    const sv::ShapeSet ref = oracle::random_box_set(rng, 5);
    sv::ShapeSet pred = oracle::random_box_set(rng, 5);
    for (sv::Shape& s : pred.shapes) s.score = sv::uniform_real(rng, 0.05, 1.0);
    const double t = sv::uniform_real(rng, 0.05, 0.95);
    const sv::F1Result f1 = sv::f1_score(ref, pred, t);
    CHECK(f1.f1 >= 0.0);
    CHECK(f1.f1 <= 1.0);
    CHECK(f1.tp + f1.fp == static_cast<std::int64_t>(pred.size()));
    CHECK(f1.tp + f1.fn == static_cast<std::int64_t>(ref.size()));
    for (sv::AssignMode mode : {sv::AssignMode::Greedy, sv::AssignMode::Optimal}) {
      const double ap = sv::average_precision(ref, pred, t, sv::BaseDistance::Iou, mode);
      CHECK(ap >= 0.0);
      CHECK(ap <= 1.0);
    }
    const double lamr = sv::log_average_miss_rate(ref, pred, t);
    CHECK(lamr >= 1e-4);
    CHECK(lamr <= 1.0);
  }
}
