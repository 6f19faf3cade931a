#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plateshape/maps.hpp"
#include "plateshape/mesh.hpp"
#include "plateshape/types.hpp"

namespace plateshape {

// Rigid chart frame: chart coordinates u = R(angle) x + offset. Domains are
// described inside the open box (lo, hi) as subgraphs u_y < g(u_x).
struct Chart {
  double angle = 0.0;
  Vec2 offset = Vec2::Zero();
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  Mat2 rotation() const;
  Vec2 to_chart(const Vec2& x) const;
  Vec2 to_physical(const Vec2& u) const;
  // Physical direction whose chart image is +e2; the boundary-collapse map
  // pushes along its negative (into the subgraph).
  Vec2 up_direction() const;
  bool in_box(const Vec2& u, double margin = 0.0) const;
};

// A fixed family of charts: the first s_prime carry boundary graphs, the
// rest are interior boxes. rho is the shrink margin (graphs must stay rho
// inside their boxes, coverage is demanded of the rho-shrunk boxes),
// lipschitz bounds admissible graph slopes, grid_n the samples per window.
struct Atlas {
  double rho = 0.1;
  double lipschitz = 2.0;
  int s_prime = 0;
  int grid_n = 256;
  std::vector<Chart> charts;

  int count() const { return static_cast<int>(charts.size()); }
};

void validate_atlas(const Atlas& atlas);  // throws std::invalid_argument
bool same_atlas(const Atlas& a, const Atlas& b);

// Graph heights over the uniform window grid (grid_n + 1 values).
struct ChartGraph {
  VecX g;
};

// Meshable special case: an axis-aligned base rectangle (x0,x1) x (y0, top)
// whose top boundary is the graph of one chart (which must be unrotated).
struct SubgraphSpec {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  int top_chart = 0;
};

struct AtlasDomain {
  std::shared_ptr<const Atlas> atlas;
  std::vector<ChartGraph> graphs;  // per chart; interior charts pinned at hi.y
  std::optional<SubgraphSpec> subgraph;
  // Present when built from a membership predicate; used by validation.
  std::function<bool(const Vec2&)> source_membership;
};

// Interpolated graph height at window coordinate xbar (clamped to the window).
double graph_value(const Atlas& atlas, int chart, const ChartGraph& graph,
                   double xbar);

AtlasDomain domain_from_graphs(std::shared_ptr<const Atlas> atlas,
                               std::vector<VecX> boundary_graphs,
                               std::optional<SubgraphSpec> subgraph = {});

// Reconstructs every chart graph from a membership predicate by bisection
// along the chart vertical. The predicate must describe a domain that is a
// subgraph in every boundary chart of this atlas.
AtlasDomain domain_from_membership(std::shared_ptr<const Atlas> atlas,
                                   std::function<bool(const Vec2&)> inside,
                                   std::optional<SubgraphSpec> subgraph = {});

// Membership through the chart description. slack loosens the subgraph
// comparison (use a small positive slack to test closures).
bool domain_contains(const AtlasDomain& d, const Vec2& x, double slack = 0.0);

struct DomainReport {
  bool ok = true;
  std::vector<std::string> issues;
};

// Margin, Lipschitz, overlap-consistency, interior-box and (when membership
// is available) coverage checks.
DomainReport validate_domain(const AtlasDomain& d);

// Sup over charts and window grid points of |g1 - g2|. Both domains must
// share the atlas (structurally). The halved variant restricts each window
// to (lo.x + rho/2, hi.x - rho/2), the distance of the shrunk-chart family.
double atlas_distance(const AtlasDomain& a, const AtlasDomain& b);
double atlas_distance_halved(const AtlasDomain& a, const AtlasDomain& b);

// Physical positions of all boundary-chart graph samples.
std::vector<Vec2> boundary_points(const AtlasDomain& d);

// Deviations between sampled boundaries: each direction takes the sup over
// one domain's boundary grid points of the distance to the other boundary's
// sampled polyline (point-to-segment, not point-to-point, so grid phase
// cannot inflate the value).
struct HausdorffDeviations {
  double from_first = 0.0;   // sup over first boundary of distance to second
  double from_second = 0.0;
  double max_deviation = 0.0;
};

HausdorffDeviations hausdorff_deviations(const AtlasDomain& a,
                                         const AtlasDomain& b);

// Two-sided eps-neighborhood test on sampled boundaries, with a sampling
// slack of half the boundary sample spacing.
struct InclusionCheck {
  bool first_in_second_tube = false;  // dist(x, B) <= eps + slack for x in A
  bool second_in_first_tube = false;
  double deviation_first = 0.0;
  double deviation_second = 0.0;
  double slack = 0.0;
};

InclusionCheck inclusion_neighborhoods(const AtlasDomain& a, const AtlasDomain& b,
                                       double eps);

// Boundary-collapse map phi_eps(x) = x - eps sum_j xi_j psi_j(x): a smooth
// partition of unity subordinate to the chart boxes pushes every point along
// the chart down-directions, so boundary-proximal material moves inward by
// eps. psi_j is built from tensor plateau bumps (flat 1 on the rho-shrunk
// box, 0 outside the 3rho/4-shrunk box) normalized by a smooth-floored sum,
// making sum_j psi_j = 1 exactly on the rho-shrunk cover. eps_max = rho/2
// keeps the push inside the collar; beyond it the construction refuses.
struct CollapseMap {
  ParametricMap map;
  double eps_max = 0.0;
  std::function<double(const Vec2&)> partition_sum;
};

CollapseMap burenkov_map(const Atlas& atlas, double eps);

// Triangulates a subgraph domain: nx columns, row count set by the mean
// column height, per-column vertical scaling of a rectangle grid. Domains of
// equal mean height on a shared atlas get identical connectivity.
Mesh domain_to_mesh(const AtlasDomain& d, int nx);

void write_atlas(const std::string& path, const Atlas& atlas);
Atlas read_atlas(const std::string& path);
void write_domain(const std::string& path, const AtlasDomain& d);
AtlasDomain read_domain(const std::string& path);

// Prebuilt geometries used across the experiment suite.
// Nine-chart cover of a rectangle (0,width) x (0, ~h0): four walls, four
// 45-degree corner tents, one interior box. Graphs near the top wall may
// deviate from h0 by up to ~0.1.
Atlas make_box_atlas(double width, double h0, double rho = 0.1);
// Domain under y = top(x) inside the box atlas.
AtlasDomain make_box_domain(std::shared_ptr<const Atlas> atlas,
                            std::function<double(double)> top);
// Eight circle arcs plus an interior box, admitting radii in ~[0.95, 1.1].
Atlas make_disk_arc_atlas(double rho = 0.1);
AtlasDomain make_disk_domain(std::shared_ptr<const Atlas> atlas, double radius);

}  // namespace plateshape
