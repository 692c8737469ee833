#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "oclu/baselines.hpp"
#include "oclu/eigen_sym.hpp"
#include "oclu/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace oclu;
using testing::naive_peaks;

namespace {

double sse_of(const std::vector<Point>& pts, const std::vector<int>& labels, int k) {
  std::vector<double> sx(k), sy(k), n(k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sx[labels[i]] += pts[i].x, sy[labels[i]] += pts[i].y, n[labels[i]] += 1;
  }
  double s = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int l = labels[i];
    const double cx = sx[l] / n[l], cy = sy[l] / n[l];
    s += (pts[i].x - cx) * (pts[i].x - cx) + (pts[i].y - cy) * (pts[i].y - cy);
  }
  return s;
}

// Minimum over all non-trivial 2-partitions of `score`.
template <typename F>
std::pair<double, std::vector<int>> brute_two_partition(std::size_t n, F score) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    if (mask & 1u) continue;  // each split once: point 0 always on side 0
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
    const double s = score(labels);
    if (s < best) best = s, arg = labels;
  }
  return {best, arg};
}

std::vector<Point> translated(const std::vector<Point>& pts, double dx, double dy) {
  auto out = pts;
  for (auto& p : out) p.x += dx, p.y += dy;
  return out;
}

struct Blobs {
  std::vector<Point> points;
  std::vector<int> labels;
};

Blobs blobs(Rng& rng, std::vector<Point> centers, double sd, int per) {
  Blobs b;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    testing::add_blob(b.points, b.labels, rng, centers[c], sd, per, static_cast<int>(c));
  }
  return b;
}

Blobs half_moons(Rng& rng, int per) {
  Blobs b;
  for (int i = 0; i < per; ++i) {
    const double t = std::numbers::pi * uniform(rng, 0, 1);
    b.points.push_back({20 + 10 * std::cos(t) + 0.4 * standard_normal(rng),
                        20 + 10 * std::sin(t) + 0.4 * standard_normal(rng)});
    b.labels.push_back(0);
    b.points.push_back({30 - 10 * std::cos(t) + 0.4 * standard_normal(rng),
                        25 - 10 * std::sin(t) + 0.4 * standard_normal(rng)});
    b.labels.push_back(1);
  }
  return b;
}

AffinityParams fixed_sigma(double s) {
  AffinityParams a;
  a.rule = SigmaRule::Fixed;
  a.sigma = s;
  return a;
}

}  // namespace

// ------------------------------------------------------------- k-means

TEST_CASE("kmeans worked example") {
  const std::vector<Point> pts{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  Rng rng(1);
  const auto r = kmeans(pts, 2, 5, rng);
  CHECK(r.result.labels[0] == r.result.labels[1]);
  CHECK(r.result.labels[2] == r.result.labels[3]);
  CHECK(r.result.labels[0] != r.result.labels[2]);
  std::set<std::pair<double, double>> centers;
  for (const auto& c : r.centers) centers.insert({c.x, c.y});
  CHECK(centers == std::set<std::pair<double, double>>{{0, 0.5}, {10, 0.5}});
  CHECK(r.sse == doctest::Approx(1.0));

  const auto brute = brute_two_partition(pts.size(), [&](const std::vector<int>& l) { return sse_of(pts, l, 2); });
  CHECK(brute.first == doctest::Approx(r.sse));
}

TEST_CASE("kmeans limits: k = 1 and k = n") {
  Rng rng(2);
  const auto pts = testing::random_points(rng, 12);
  auto one = kmeans(pts, 1, 3, rng);
  double cx = 0, cy = 0;
  for (const auto& p : pts) cx += p.x / 12, cy += p.y / 12;
  CHECK(one.centers[0].x == doctest::Approx(cx));
  CHECK(one.centers[0].y == doctest::Approx(cy));
  CHECK(one.result.k_found == 1);
  auto all = kmeans(pts, 12, 3, rng);
  CHECK(all.sse == doctest::Approx(0.0));
  CHECK(all.result.k_found == 12);
  CHECK_THROWS_AS(kmeans(pts, 13, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(pts, 0, 1, rng), std::invalid_argument);
}

TEST_CASE("kmeans reaches the brute-force optimum on clustered data") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto b = blobs(rng, {{10, 10}, {uniform(rng, 14, 30), uniform(rng, 14, 30)}}, 2.0, 5);
    const auto r = kmeans(b.points, 2, 10, rng);
    const auto brute = brute_two_partition(b.points.size(), [&](const std::vector<int>& l) {
      return sse_of(b.points, l, 2);
    });
    CHECK(r.sse == doctest::Approx(brute.first).epsilon(1e-9));
    CHECK(r.sse >= brute.first - 1e-9);
  }
}

TEST_CASE("property: kmeans SSE never increases across Lloyd iterations") {
  Rng rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto pts = testing::random_points(rng, 60);
    const auto r = kmeans(pts, static_cast<int>(uniform_int(rng, 2, 6)), 2, rng);
    REQUIRE(!r.sse_trace.empty());
    for (std::size_t i = 1; i < r.sse_trace.size(); ++i) {
      REQUIRE(r.sse_trace[i] <= r.sse_trace[i - 1] + 1e-9);
    }
    CHECK(r.sse == doctest::Approx(r.sse_trace.back()));
  }
}

TEST_CASE("kmeans repairs empty clusters") {
  // Many duplicates make empty clusters likely during seeding and updates.
  std::vector<Point> pts(20, Point{5, 5});
  pts.push_back({6, 5});
  pts.push_back({50, 50});
  Rng rng(5);
  const auto r = kmeans(pts, 3, 3, rng);
  CHECK(r.result.k_found == 3);
  for (int l : r.result.labels) CHECK((l >= 0 && l < 3));
}

// ------------------------------------------------------- fuzzy c-means

TEST_CASE("fuzzy c-means agrees with kmeans on separated pairs") {
  const std::vector<Point> pts{{0, 0}, {0, 1}, {30, 0}, {30, 1}};
  Rng rng(6);
  const auto f = fuzzy_cmeans(pts, 2, {}, rng);
  const auto k = kmeans(pts, 2, 5, rng);
  CHECK(pairwise_rand_accuracy(f.result.labels, k.result.labels) == 1.0);
  CHECK(f.result.k_found == 2);
}

TEST_CASE("fuzzy memberships are row-stochastic at every iteration count") {
  Rng rng(7);
  const auto pts = testing::random_points(rng, 40);
  for (int iters : {1, 2, 5, 300}) {
    FuzzyCMeansParams p;
    p.max_iterations = iters;
    Rng r2(8);
    const auto f = fuzzy_cmeans(pts, 3, p, r2);
    CHECK(f.iterations <= iters);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s = 0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double u = f.memberships[i * 3 + c];
        REQUIRE(u >= 0.0);
        s += u;
      }
      REQUIRE(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("large fuzziness drives memberships towards uniform") {
  Rng rng(9);
  const auto pts = testing::random_points(rng, 30);
  const std::vector<Point> centers{{10, 10}, {50, 20}, {30, 55}};
  double previous = 1.0;
  for (double m : {2.0, 5.0, 50.0, 1e4}) {
    const auto u = fcm_memberships(pts, centers, m);
    double dev = 0;
    for (double v : u) dev = std::max(dev, std::abs(v - 1.0 / 3.0));
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 1e-3);
  CHECK_THROWS_AS(fcm_memberships(pts, centers, 1.0), std::invalid_argument);

  const std::vector<Point> on{{10, 10}};
  CHECK(fcm_memberships(on, centers, 2.0) == std::vector<double>{1, 0, 0});

  // Under iteration the u^m center weights pull centers onto data points as
  // m grows, so the fitted memberships do not flatten the same way.
  FuzzyCMeansParams bad;
  bad.fuzziness = 1.0;
  CHECK_THROWS_AS(fuzzy_cmeans(pts, 3, bad, rng), std::invalid_argument);
}

TEST_CASE("a point on a center takes membership one") {
  // Identical points: after one update both centers can sit on a point.
  const std::vector<Point> pts{{1, 1}, {1, 1}, {9, 9}, {9, 9}};
  Rng rng(10);
  const auto f = fuzzy_cmeans(pts, 2, {}, rng);
  for (double u : f.memberships) CHECK(std::isfinite(u));
  CHECK(f.result.labels[0] == f.result.labels[1]);
  CHECK(f.result.labels[0] != f.result.labels[2]);
}

// ------------------------------------------------------------- spectral

TEST_CASE("RBF affinity and the median rule") {
  const std::vector<Point> pts{{0, 0}, {3, 4}, {6, 8}};
  const auto w = rbf_affinity(pts, 5.0);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(std::exp(-25.0 / 50.0)));
  CHECK(w[1] == w[3]);
  CHECK(median_pairwise_distance(pts) == doctest::Approx(5.0));
  AffinityParams a;
  a.median_factor = 0.5;
  CHECK(a.resolve(pts) == doctest::Approx(2.5));
  CHECK(fixed_sigma(2.0).resolve(pts) == 2.0);
  CHECK_THROWS_AS(fixed_sigma(0.0).resolve(pts), std::invalid_argument);
}

TEST_CASE("NJW separates half-moons where kmeans fails") {
  Rng rng(11);
  const auto m = half_moons(rng, 150);
  const auto s = spectral_njw(m.points, 2, fixed_sigma(1.0), rng);
  CHECK(pairwise_rand_accuracy(m.labels, s.labels) > 0.99);
  CHECK(s.k_found == 2);
  const auto k = kmeans(m.points, 2, 10, rng);
  CHECK(pairwise_rand_accuracy(m.labels, k.result.labels) < 0.9);
}

TEST_CASE("NJW is invariant to joint scaling of points and sigma") {
  Rng rng(12);
  const auto b = blobs(rng, {{10, 10}, {25, 12}, {15, 30}}, 3.0, 30);
  auto scaled = b.points;
  for (auto& p : scaled) p.x *= 3, p.y *= 3;
  Rng r1(13), r2(13);
  const auto a = spectral_njw(b.points, 3, fixed_sigma(2.0), r1);
  const auto c = spectral_njw(scaled, 3, fixed_sigma(6.0), r2);
  CHECK(pairwise_rand_accuracy(a.labels, c.labels) == 1.0);
  Rng r3(1);
  const auto one = spectral_njw(b.points, 1, fixed_sigma(2.0), r3);
  CHECK(std::all_of(one.labels.begin(), one.labels.end(), [](int l) { return l == 0; }));
}

TEST_CASE("NJW gives isolated points the label of their nearest neighbour") {
  Rng rng(14);
  auto b = blobs(rng, {{10, 10}, {40, 40}}, 1.0, 20);
  b.points.push_back({10, 20});  // ~exp(-50) affinity at sigma 1: isolated
  b.labels.push_back(0);
  const auto s = spectral_njw(b.points, 2, fixed_sigma(0.5), rng);
  CHECK(s.labels.back() == s.labels.front());
}

TEST_CASE("normalized cut splits two blobs with a near-zero cut") {
  Rng rng(15);
  const auto b = blobs(rng, {{10, 10}, {40, 12}}, 2.0, 25);
  const auto r = normalized_cut(b.points, 2, fixed_sigma(3.0), rng);
  CHECK(pairwise_rand_accuracy(b.labels, r.labels) == 1.0);
  const auto w = rbf_affinity(b.points, 3.0);
  std::vector<bool> side(b.points.size());
  for (std::size_t i = 0; i < side.size(); ++i) side[i] = r.labels[i] == 1;
  CHECK(ncut_value(w, b.points.size(), side) < 1e-6);
}

TEST_CASE("normalized cut finds the brute-force optimum on small dumbbells") {
  Rng rng(16);
  for (int rep = 0; rep < 10; ++rep) {
    auto b = blobs(rng, {{10, 10}, {18, 10}}, 1.2, 5);
    b.points.push_back({14, 10});  // bridge point
    const std::size_t n = b.points.size();
    const double sigma = 2.0;
    const auto w = rbf_affinity(b.points, sigma);
    const auto brute = brute_two_partition(n, [&](const std::vector<int>& l) {
      std::vector<bool> side(n);
      for (std::size_t i = 0; i < n; ++i) side[i] = l[i] == 1;
      return ncut_value(w, n, side);
    });
    const auto r = normalized_cut(b.points, 2, fixed_sigma(sigma), rng);
    std::vector<bool> side(n);
    for (std::size_t i = 0; i < n; ++i) side[i] = r.labels[i] == 1;
    CHECK(ncut_value(w, n, side) == doctest::Approx(brute.first).epsilon(1e-9));
  }
}

TEST_CASE("normalized cut on a symmetric dumbbell is balanced") {
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) {
    const double a = 2 * std::numbers::pi * i / 5;
    pts.push_back({10 + std::cos(a), 10 + std::sin(a)});
    pts.push_back({20 - std::cos(a), 10 + std::sin(a)});
  }
  Rng rng(17);
  const auto r = normalized_cut(pts, 2, fixed_sigma(2.0), rng);
  const auto ones = std::count(r.labels.begin(), r.labels.end(), 1);
  CHECK(ones == 5);
}

TEST_CASE("disconnected graphs split along components first") {
  Rng rng(18);
  const auto b = blobs(rng, {{10, 10}, {100, 10}, {10, 100}}, 1.0, 8);
  const auto r = normalized_cut(b.points, 3, fixed_sigma(1.0), rng);
  CHECK(pairwise_rand_accuracy(b.labels, r.labels) == 1.0);
  CHECK(r.k_found == 3);
}

TEST_CASE("ncut_value by hand") {
  // Path 0 - 1 - 2 with unit weights; cut {0} | {1, 2}.
  const std::vector<double> w{0, 1, 0, 1, 0, 1, 0, 1, 0};
  CHECK(ncut_value(w, 3, {false, true, true}) == doctest::Approx(1.0 / 1.0 + 1.0 / 3.0));
}

TEST_CASE("Jacobi agrees with the tridiagonal solver") {
  Rng rng(19);
  for (std::size_t n : {1u, 2u, 5u, 20u}) {
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = uniform(rng, -1, 1);
    const auto jac = jacobi_eigen(a, n);
    const auto tri = tridiagonal_eigen(a, n);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(jac.values[k] == doctest::Approx(tri.values[k]).epsilon(1e-9));
      // A v = lambda v for the Jacobi vectors.
      for (std::size_t i = 0; i < n; ++i) {
        double av = 0;
        for (std::size_t j = 0; j < n; ++j) av += a[i * n + j] * jac.vector(j, k);
        CHECK(av == doctest::Approx(jac.values[k] * jac.vector(i, k)).epsilon(1e-8).scale(1.0));
      }
    }
    CHECK(std::is_sorted(jac.values.begin(), jac.values.end()));
  }
}

TEST_CASE("spectral methods agree across eigensolvers") {
  Rng rng(20);
  const auto b = blobs(rng, {{10, 10}, {30, 12}, {18, 30}}, 2.5, 20);
  SpectralOptions jac;
  jac.solver = EigenSolver::Jacobi;
  Rng r1(3), r2(3);
  CHECK(pairwise_rand_accuracy(spectral_njw(b.points, 3, fixed_sigma(3.0), r1, jac).labels,
                               spectral_njw(b.points, 3, fixed_sigma(3.0), r2).labels) == 1.0);
}

TEST_CASE("large inputs are subsampled and propagated") {
  Rng rng(21);
  const auto b = blobs(rng, {{20, 20}, {80, 80}}, 3.0, 300);
  SpectralOptions opt;
  opt.max_points = 150;
  const auto r = spectral_njw(b.points, 2, fixed_sigma(4.0), rng, opt);
  CHECK(r.labels.size() == 600);
  CHECK(pairwise_rand_accuracy(b.labels, r.labels) == 1.0);
  const auto c = normalized_cut(b.points, 2, fixed_sigma(4.0), rng, opt);
  CHECK(pairwise_rand_accuracy(b.labels, c.labels) == 1.0);
}

// ------------------------------------------------------------ mean shift

TEST_CASE("mean shift examples") {
  Rng rng(22);
  const auto one = blobs(rng, {{30, 30}}, 1.0, 50);
  CHECK(mean_shift(one.points, 20.0).result.k_found == 1);

  const auto two = blobs(rng, {{20, 20}, {60, 60}}, 1.5, 60);
  const double h = 6.0;
  const auto r = mean_shift(two.points, h);
  CHECK(r.result.k_found == 2);
  CHECK(pairwise_rand_accuracy(two.labels, r.result.labels) == 1.0);
  for (int c = 0; c < 2; ++c) {
    double mx = 0, my = 0;
    int n = 0;
    for (std::size_t i = 0; i < two.points.size(); ++i) {
      if (r.result.labels[i] == c) mx += two.points[i].x, my += two.points[i].y, ++n;
    }
    const auto& mode = r.modes[static_cast<std::size_t>(c)];
    CHECK(std::hypot(mode.x - mx / n, mode.y - my / n) < h / 4);
  }

  const auto any = testing::random_points(rng, 80);
  CHECK(mean_shift(any, 1e6).result.k_found == 1);
  CHECK_THROWS_AS(mean_shift(any, 0.0), std::invalid_argument);
}

// ---------------------------------------------------------------- CFSFDP

TEST_CASE("CFSFDP worked example") {
  const std::vector<Point> pts{{0, 0}, {0, 1}, {1, 0}, {10, 10}, {10, 11}};
  const auto p = density_peaks(pts, 2.0);
  // rho by the formula: point 0 sees two neighbours at distance 1.
  const double e1 = std::exp(-0.25), e2 = std::exp(-0.5);
  CHECK(p.rho[0] == doctest::Approx(2 * e1 + std::exp(-200.0 / 4) + std::exp(-221.0 / 4)));
  CHECK(p.rho[1] == doctest::Approx(e1 + e2 + std::exp(-181.0 / 4) + std::exp(-200.0 / 4)));
  // Point 0 is the densest; the far pair's first point heads it.
  CHECK(p.nearest_higher[0] == 0);
  CHECK(p.delta[0] == doctest::Approx(std::hypot(10, 11)));
  CHECK(p.nearest_higher[1] == 0);
  CHECK(p.nearest_higher[4] == 3);

  CfsfdpParams params;
  params.centers = 2;
  params.cutoff = 2.0;
  const auto r = cfsfdp(pts, params);
  CHECK(r.result.labels == std::vector<int>{0, 0, 0, 1, 1});
  std::set<std::size_t> centers(r.center_indices.begin(), r.center_indices.end());
  CHECK(centers.count(0) == 1);
  CHECK((centers.count(3) == 1 || centers.count(4) == 1));
}

TEST_CASE("CFSFDP rho and delta match direct enumeration") {
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = testing::random_points(rng, 30, 0, 20);
    const double dc = uniform(rng, 1, 5);
    const auto fast = density_peaks(pts, dc);
    const auto slow = naive_peaks(pts, dc);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      REQUIRE(std::abs(fast.rho[i] - slow.rho[i]) <= 1e-12);
      REQUIRE(std::abs(fast.delta[i] - slow.delta[i]) <= 1e-12);
      REQUIRE(fast.nearest_higher[i] == slow.nearest_higher[i]);
    }
  }
}

TEST_CASE("CFSFDP with one center and acyclic chains") {
  Rng rng(24);
  for (int rep = 0; rep < 30; ++rep) {
    const auto pts = testing::random_points(rng, 40);
    CfsfdpParams params;
    params.centers = 1;
    const auto one = cfsfdp(pts, params);
    REQUIRE(std::all_of(one.result.labels.begin(), one.result.labels.end(), [](int l) { return l == 0; }));

    params.centers = static_cast<int>(uniform_int(rng, 1, 5));
    const auto r = cfsfdp(pts, params);
    const std::set<std::size_t> centers(r.center_indices.begin(), r.center_indices.end());
    REQUIRE(centers.size() == static_cast<std::size_t>(params.centers));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t at = i;
      std::size_t steps = 0;
      while (!centers.count(at)) {
        REQUIRE(r.peaks.rho[r.peaks.nearest_higher[at]] >= r.peaks.rho[at]);
        at = r.peaks.nearest_higher[at];
        REQUIRE(++steps <= pts.size());
      }
      REQUIRE(r.result.labels[i] == r.result.labels[at]);
      if (r.peaks.nearest_higher[i] != i) REQUIRE(r.peaks.delta[i] > 0);
    }
  }
}

TEST_CASE("CFSFDP cutoff rule") {
  Rng rng(25);
  const auto pts = testing::random_points(rng, 50);
  CfsfdpParams p;
  const double dc = p.resolve_cutoff(pts);
  auto d = pairwise_distances(pts);
  std::vector<double> upper;
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = i + 1; j < 50; ++j) upper.push_back(d[i * 50 + j]);
  const auto below = std::count_if(upper.begin(), upper.end(), [&](double v) { return v < dc; });
  CHECK(static_cast<double>(below) / static_cast<double>(upper.size()) ==
        doctest::Approx(0.02).epsilon(0.05));
  p.cutoff = 3.0;
  CHECK(p.resolve_cutoff(pts) == 3.0);
  p.centers = 0;
  CHECK_THROWS_AS(cfsfdp(pts, p), std::invalid_argument);
}

// ---------------------------------------------------------- all methods

TEST_CASE("property: translation leaves every partition unchanged") {
  Rng rng(26);
  for (int rep = 0; rep < 5; ++rep) {
    const auto b = blobs(rng, {{15, 15}, {40, 20}, {25, 45}}, 4.0, 20);
    const auto moved = translated(b.points, uniform(rng, -7, 7), uniform(rng, -7, 7));
    auto same = [&](auto run) {
      Rng r1(31), r2(31);
      return pairwise_rand_accuracy(run(b.points, r1), run(moved, r2));
    };
    CHECK(same([](const std::vector<Point>& p, Rng& r) { return kmeans(p, 3, 5, r).result.labels; }) == 1.0);
    CHECK(same([](const std::vector<Point>& p, Rng& r) { return fuzzy_cmeans(p, 3, {}, r).result.labels; }) == 1.0);
    CHECK(same([](const std::vector<Point>& p, Rng& r) {
            return spectral_njw(p, 3, fixed_sigma(3.0), r).labels;
          }) == 1.0);
    CHECK(same([](const std::vector<Point>& p, Rng& r) {
            return normalized_cut(p, 3, fixed_sigma(3.0), r).labels;
          }) == 1.0);
    CHECK(same([](const std::vector<Point>& p, Rng&) { return mean_shift(p, 8.0).result.labels; }) == 1.0);
    CHECK(same([](const std::vector<Point>& p, Rng&) {
            CfsfdpParams c;
            c.centers = 3;
            c.cutoff = 3.0;
            return cfsfdp(p, c).result.labels;
          }) == 1.0);
  }
}

TEST_CASE("property: methods given k return k contiguous labels") {
  Rng rng(27);
  for (int rep = 0; rep < 10; ++rep) {
    const int k = static_cast<int>(uniform_int(rng, 2, 4));
    std::vector<Point> centers;
    for (int c = 0; c < k; ++c) centers.push_back({uniform(rng, 5, 60), uniform(rng, 5, 60)});
    const auto b = blobs(rng, centers, 3.0, 25);
    const std::vector<ClusteringResult> results{
        kmeans(b.points, k, 5, rng).result, fuzzy_cmeans(b.points, k, {}, rng).result,
        spectral_njw(b.points, k, AffinityParams{}, rng),
        normalized_cut(b.points, k, AffinityParams{}, rng)};
    for (const auto& r : results) {
      CHECK(r.labels.size() == b.points.size());
      CHECK(r.k_found == k);
      std::set<int> ids(r.labels.begin(), r.labels.end());
      CHECK(ids.size() == static_cast<std::size_t>(k));
      CHECK(*ids.begin() == 0);
      CHECK(*ids.rbegin() == k - 1);
    }
  }
}

TEST_CASE("normalize_labels renumbers by first appearance") {
  std::vector<int> l{5, 5, 2, 9, 2};
  CHECK(normalize_labels(l) == 3);
  CHECK(l == std::vector<int>{0, 0, 1, 2, 1});
}

TEST_CASE("method names") {
  for (auto m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
  CHECK(method_name(Method::NormalizedCut) == "SC");
  CHECK(parse_method("NC") == Method::NormalizedCut);
  CHECK_THROWS_AS(parse_method("DBSCAN"), std::invalid_argument);
}
