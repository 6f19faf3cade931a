#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "plateshape/atlas.hpp"

using namespace plateshape;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const Atlas> box_atlas() {
  static const auto a =
      std::make_shared<const Atlas>(make_box_atlas(1.0, 0.7));
  return a;
}

std::shared_ptr<const Atlas> disk_atlas() {
  static const auto a = std::make_shared<const Atlas>(make_disk_arc_atlas());
  return a;
}

AtlasDomain flat_box(double h) {
  return make_box_domain(box_atlas(), [h](double) { return h; });
}

// Tent notch of depth c and half-width 0.05 cut into the flat top at x = 0.5.
AtlasDomain notched_box(double c) {
  return make_box_domain(box_atlas(), [c](double x) {
    const double d = std::abs(x - 0.5);
    return d >= 0.05 ? 0.7 : 0.7 - c * (1.0 - d / 0.05);
  });
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("prebuilt atlases are structurally valid") {
  validate_atlas(*box_atlas());
  CHECK(box_atlas()->count() == 9);
  CHECK(box_atlas()->s_prime == 8);

  validate_atlas(*disk_atlas());
  CHECK(disk_atlas()->count() == 9);
  CHECK(disk_atlas()->s_prime == 8);

  Atlas broken = *box_atlas();
  broken.rho = 0.0;
  CHECK_THROWS_AS(validate_atlas(broken), std::invalid_argument);
  broken = *box_atlas();
  broken.s_prime = broken.count() + 1;
  CHECK_THROWS_AS(validate_atlas(broken), std::invalid_argument);

  CHECK(same_atlas(*box_atlas(), make_box_atlas(1.0, 0.7)));
  CHECK_FALSE(same_atlas(*box_atlas(), make_box_atlas(1.0, 0.75)));
  CHECK_FALSE(same_atlas(*box_atlas(), *disk_atlas()));
}

TEST_CASE("chart frames rotate as claimed") {
  Chart c;
  c.angle = -kPi / 4;
  c.offset = Vec2(0.3, -0.2);
  const Vec2 x(1.0, 0.0);
  const Vec2 u = c.to_chart(x);
  CHECK((c.to_physical(u) - x).norm() <= 1e-15);
  // up_direction maps to +e2 in the chart frame.
  const Vec2 up = c.up_direction();
  const Vec2 e2 = c.rotation() * up;
  CHECK(std::abs(e2.x()) <= 1e-15);
  CHECK(e2.y() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("box domain with a flat top passes full validation") {
  const AtlasDomain d = flat_box(0.7);
  const DomainReport rep = validate_domain(d);
  for (const auto& s : rep.issues) MESSAGE(s);
  CHECK(rep.ok);
  REQUIRE(d.graphs.size() == 9);
  REQUIRE(d.subgraph.has_value());

  // The top chart is axis aligned, so its graph is the top function itself.
  for (double xb : {0.1, 0.33, 0.5, 0.77})
    CHECK(graph_value(*d.atlas, 0, d.graphs[0], xb) ==
          doctest::Approx(0.7).epsilon(1e-12));
  // Interior chart graphs are pinned at the box lid.
  const int interior = 8;
  CHECK(d.graphs[interior].g.minCoeff() ==
        doctest::Approx(d.atlas->charts[interior].hi.y()).epsilon(1e-15));
}

TEST_CASE("disk domains recover the circle in every arc chart") {
  for (double r : {0.95, 1.0, 1.1}) {
    const AtlasDomain d = make_disk_domain(disk_atlas(), r);
    const DomainReport rep = validate_domain(d);
    for (const auto& s : rep.issues) MESSAGE(s);
    CHECK(rep.ok);
    for (int j = 0; j < disk_atlas()->s_prime; ++j) {
      const Chart& c = disk_atlas()->charts[j];
      const double h = (c.hi.x() - c.lo.x()) / disk_atlas()->grid_n;
      for (int i = 16; i <= disk_atlas()->grid_n - 16; i += 16) {
        const double xb = c.lo.x() + h * i;
        CHECK(std::abs(d.graphs[j].g[i] - std::sqrt(r * r - xb * xb)) <= 1e-12);
      }
      // Window-edge columns are nudged 1e-9 w inward before bisection, which
      // shifts the sampled height by slope * nudge at most.
      const double xe = c.lo.x();
      CHECK(std::abs(d.graphs[j].g[0] - std::sqrt(r * r - xe * xe)) <= 5e-9);
    }
  }
  // A circle that exits the chart windows cannot be described.
  CHECK_THROWS_AS((void)make_disk_domain(disk_atlas(), 0.5), InvalidDomainError);
}

TEST_CASE("membership with no inside points is rejected") {
  CHECK_THROWS_AS((void)domain_from_membership(
                      box_atlas(), [](const Vec2&) { return false; }),
                  InvalidDomainError);
}

TEST_CASE("domain membership follows the graphs") {
  const AtlasDomain d = flat_box(0.7);
  CHECK(domain_contains(d, Vec2(0.5, 0.35)));
  CHECK(domain_contains(d, Vec2(0.02, 0.02)));
  CHECK(domain_contains(d, Vec2(0.5, 0.6999)));
  CHECK_FALSE(domain_contains(d, Vec2(0.5, 0.7001)));
  CHECK_FALSE(domain_contains(d, Vec2(-0.01, 0.35)));
  CHECK_FALSE(domain_contains(d, Vec2(0.5, -0.01)));
  CHECK_FALSE(domain_contains(d, Vec2(5.0, 5.0)));
  // slack loosens the graph comparison near the boundary
  CHECK(domain_contains(d, Vec2(0.5, 0.7001), 1e-3));

  const AtlasDomain disk = make_disk_domain(disk_atlas(), 1.0);
  CHECK(domain_contains(disk, Vec2(0.0, 0.0)));       // interior box
  CHECK(domain_contains(disk, Vec2(0.0, 0.9999)));    // below the arc
  CHECK_FALSE(domain_contains(disk, Vec2(0.0, 1.0001)));
  CHECK_FALSE(domain_contains(disk, Vec2(0.72, 0.72)));  // norm 1.018
  CHECK(domain_contains(disk, Vec2(0.70, 0.70)));        // norm 0.9899
}

TEST_CASE("lipschitz violations are reported") {
  // Amplitude small enough that the top stays above every chart floor
  // (construction succeeds), frequency high enough to breach the slope bound.
  const AtlasDomain steep = make_box_domain(box_atlas(), [](double x) {
    return 0.7 + 0.1 * std::sin(16.0 * kPi * x);  // slope up to 5.0 > 2.5
  });
  CHECK_FALSE(validate_domain(steep).ok);
}

TEST_CASE("atlas distance of flat tops is corner-inflated") {
  const AtlasDomain a = flat_box(0.70);
  const AtlasDomain b = flat_box(0.72);
  // Axis charts see 0.02; the 45-degree corner charts see sqrt(2) * 0.02.
  const double expect = std::sqrt(2.0) * 0.02;
  CHECK(atlas_distance(a, b) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(atlas_distance_halved(a, b) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(atlas_distance(a, a) == 0.0);

  // Triangle inequality across the flat family.
  const AtlasDomain c = flat_box(0.68);
  CHECK(atlas_distance(c, b) <=
        atlas_distance(c, a) + atlas_distance(a, b) + 1e-12);
  CHECK(atlas_distance_halved(c, b) <=
        atlas_distance_halved(c, a) + atlas_distance_halved(a, b) + 1e-12);

  CHECK_THROWS_AS((void)atlas_distance(a, make_disk_domain(disk_atlas(), 1.0)),
                  IncompatibleAtlasError);
}

TEST_CASE("a narrow notch widens the atlas distance by at most sqrt(2)") {
  // The top chart sees the apex at full depth (x = 0.5 is a grid column),
  // while the 45-degree corner charts rescale inclinations: a physical
  // flank slope g' appears as (g' + 1)/(1 - g') in the tr window, so the
  // notch is stretched but never beyond the sqrt(2) frame factor.
  const AtlasDomain base = flat_box(0.7);
  for (double c : {0.01, 0.02}) {
    const AtlasDomain cut = notched_box(c);
    CHECK(validate_domain(cut).ok);
    const double full = atlas_distance(base, cut);
    const double half = atlas_distance_halved(base, cut);
    CHECK(full >= c - 1e-12);
    CHECK(full <= std::sqrt(2.0) * c + 1e-12);
    CHECK(half >= c - 1e-12);
    CHECK(half <= full + 1e-12);
  }
  // Depth 0.04 gives flank slope 0.8, which the corner frames inflate to
  // (0.8 + 1)/(1 - 0.8) = 9, far beyond the declared Lipschitz bound 2.5.
  CHECK_FALSE(validate_domain(notched_box(0.04)).ok);
}

TEST_CASE("hausdorff deviations between concentric disks") {
  const AtlasDomain d1 = make_disk_domain(disk_atlas(), 1.0);
  const AtlasDomain d2 = make_disk_domain(disk_atlas(), 1.05);
  const HausdorffDeviations h = hausdorff_deviations(d1, d2);
  CHECK(h.from_first == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(h.from_second == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(h.max_deviation == std::max(h.from_first, h.from_second));
  // The chart metric dominates the geometric deviation.
  CHECK(h.max_deviation <= atlas_distance_halved(d1, d2));
  CHECK(hausdorff_deviations(d1, d1).max_deviation == 0.0);
}

TEST_CASE("neighborhood inclusion flips at the boundary gap") {
  const AtlasDomain d1 = make_disk_domain(disk_atlas(), 1.0);
  const AtlasDomain d2 = make_disk_domain(disk_atlas(), 1.05);

  const InclusionCheck wide = inclusion_neighborhoods(d1, d2, 0.05);
  CHECK(wide.first_in_second_tube);
  CHECK(wide.second_in_first_tube);
  CHECK(wide.slack > 0.0);
  CHECK(wide.slack < 0.01);
  CHECK(wide.deviation_first == doctest::Approx(0.05).epsilon(2e-3));

  const InclusionCheck tight = inclusion_neighborhoods(d1, d2, 0.04);
  CHECK_FALSE(tight.first_in_second_tube);
  CHECK_FALSE(tight.second_in_first_tube);
}

TEST_CASE("collapse map honors its validity window") {
  CHECK_THROWS_AS((void)burenkov_map(*box_atlas(), 0.05), OutOfRangeError);
  CHECK_THROWS_AS((void)burenkov_map(*box_atlas(), -0.01), OutOfRangeError);
  const CollapseMap cm = burenkov_map(*box_atlas(), 0.02);
  CHECK(cm.eps_max == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(cm.map.family == "burenkov-collapse");
}

TEST_CASE("partition of unity covers the box domain exactly") {
  const CollapseMap cm = burenkov_map(*box_atlas(), 0.02);
  for (int i = 0; i <= 12; ++i)
    for (int j = 0; j <= 12; ++j) {
      const Vec2 x(0.02 + 0.96 * i / 12.0, 0.02 + 0.66 * j / 12.0);
      CHECK(std::abs(cm.partition_sum(x) - 1.0) <= 1e-9);
      // Opposing plateaus may cancel exactly (floor against interior lid),
      // so only the upper bound on the push is universal.
      const Vec2 push = cm.map.value(x) - x;
      CHECK(push.norm() <= 0.02 * (1.0 + 1e-9));
    }
  CHECK(cm.partition_sum(Vec2(5.0, 5.0)) == 0.0);
  CHECK(cm.partition_sum(Vec2(0.5, 1.5)) == 0.0);
  CHECK((cm.map.value(Vec2(5.0, 5.0)) - Vec2(5.0, 5.0)).norm() == 0.0);
}

TEST_CASE("single-chart plateau pushes straight down") {
  // (0.5, 0.69) lies in the flat plateau of the top chart and in no other
  // chart's support, so the push is exactly -eps e2 and the jacobian is I.
  const CollapseMap cm = burenkov_map(*box_atlas(), 0.02);
  const Vec2 x(0.5, 0.69);
  CHECK((cm.map.value(x) - Vec2(0.5, 0.67)).norm() <= 1e-13);
  CHECK((cm.map.jacobian(x) - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(cm.map.hessians(x)[0].cwiseAbs().maxCoeff() <= 1e-12);

  // (0.28, 0.05) sits in two flat plateaus (bottom wall and its corner):
  // the push is the mean of the two inward unit directions.
  const Vec2 y(0.28, 0.05);
  const Vec2 expect = 0.02 * 0.5 * (Vec2(0, 1) + Vec2(std::sqrt(0.5), std::sqrt(0.5)));
  CHECK((cm.map.value(y) - y - expect).norm() <= 1e-12);
  CHECK((cm.map.jacobian(y) - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("collapse map derivatives are consistent in the ramp region") {
  // Cutoff ramps make the second derivatives large (hundreds near the top
  // wall), so the finite-difference tolerances scale with the hessian size.
  const CollapseMap cm = burenkov_map(*box_atlas(), 0.02);
  const double h = 1e-5;
  for (const Vec2& x : {Vec2(0.5, 0.91), Vec2(0.07, 0.45), Vec2(0.91, 0.05)}) {
    const Mat2 jac = cm.map.jacobian(x);
    const auto hes = cm.map.hessians(x);
    double hmax = 0.0;
    for (const Mat2& hc : hes) hmax = std::max(hmax, hc.cwiseAbs().maxCoeff());
    for (int j = 0; j < 2; ++j) {
      Vec2 dx = Vec2::Zero();
      dx[j] = h;
      const Vec2 fd = (cm.map.value(x + dx) - cm.map.value(x - dx)) / (2 * h);
      const Mat2 jp = cm.map.jacobian(x + dx), jm = cm.map.jacobian(x - dx);
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(jac(i, j) - fd[i]) <= 1e-4);
        for (int c = 0; c < 2; ++c)
          CHECK(std::abs(hes[c](i, j) - (jp(c, i) - jm(c, i)) / (2 * h)) <=
                1e-3 * std::max(1.0, hmax));
      }
    }
    // Some chart is ramping at these points: the jacobian must move.
    CHECK((jac - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-4);
  }
}

TEST_CASE("subgraph domains mesh into column grids") {
  const AtlasDomain d = flat_box(0.7);
  const Mesh m = domain_to_mesh(d, 10);
  CHECK(m.node_count() == 11 * 8);     // ny = round(10 * 0.7) = 7
  CHECK(m.triangle_count() == 140);
  CHECK(mesh_area(m) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(validate_mesh(m).ok);

  // A zero-mean sine top keeps the row count and the connectivity.
  const AtlasDomain s = make_box_domain(box_atlas(), [](double x) {
    return 0.7 + 0.02 * std::sin(2.0 * kPi * x);
  });
  const Mesh ms = domain_to_mesh(s, 10);
  REQUIRE(ms.node_count() == m.node_count());
  REQUIRE(ms.triangle_count() == m.triangle_count());
  CHECK(ms.triangles == m.triangles);
  CHECK(validate_mesh(ms).ok);
  // Columns scale to the local top height.
  double max_dy = 0.0;
  for (int i = 0; i < m.node_count(); ++i) {
    CHECK(ms.nodes[i].x() == doctest::Approx(m.nodes[i].x()).epsilon(1e-14));
    max_dy = std::max(max_dy, std::abs(ms.nodes[i].y() - m.nodes[i].y()));
  }
  CHECK(max_dy > 0.01);

  CHECK_THROWS_AS((void)domain_to_mesh(make_disk_domain(disk_atlas(), 1.0), 8),
                  InvalidDomainError);
}

TEST_CASE("graph interpolation is linear between samples") {
  const AtlasDomain s = make_box_domain(box_atlas(), [](double x) {
    return 0.7 + 0.02 * std::sin(2.0 * kPi * x);
  });
  const Atlas& a = *s.atlas;
  const double h = (a.charts[0].hi.x() - a.charts[0].lo.x()) / a.grid_n;
  const double x0 = a.charts[0].lo.x();
  for (int i : {10, 100, 200}) {
    const double mid = x0 + h * (i + 0.5);
    const double expect = 0.5 * (s.graphs[0].g[i] + s.graphs[0].g[i + 1]);
    CHECK(graph_value(a, 0, s.graphs[0], mid) ==
          doctest::Approx(expect).epsilon(1e-13));
    CHECK(graph_value(a, 0, s.graphs[0], x0 + h * i) ==
          doctest::Approx(s.graphs[0].g[i]).epsilon(1e-15));
  }
}

TEST_CASE("atlas and domain files round-trip byte for byte") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "plateshape_atlas_io";
  fs::create_directories(dir);

  const fs::path a1 = dir / "atlas_a.txt", a2 = dir / "atlas_b.txt";
  write_atlas(a1.string(), *box_atlas());
  const Atlas ra = read_atlas(a1.string());
  write_atlas(a2.string(), ra);
  CHECK(same_atlas(ra, *box_atlas()));
  CHECK(slurp(a1) == slurp(a2));

  const fs::path d1 = dir / "dom_a.txt", d2 = dir / "dom_b.txt";
  const AtlasDomain dom = make_box_domain(box_atlas(), [](double x) {
    return 0.7 + 0.02 * std::sin(2.0 * kPi * x);
  });
  write_domain(d1.string(), dom);
  const AtlasDomain rd = read_domain(d1.string());
  write_domain(d2.string(), rd);
  CHECK(slurp(d1) == slurp(d2));
  CHECK(same_atlas(*rd.atlas, *dom.atlas));
  CHECK(atlas_distance(rd, dom) == 0.0);
  REQUIRE(rd.subgraph.has_value());
  CHECK(rd.subgraph->x1 == dom.subgraph->x1);
  fs::remove_all(dir);
}
