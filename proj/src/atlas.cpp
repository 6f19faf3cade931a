#include "plateshape/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace plateshape {

/* ---------------------------------------------------------------- charts */

Mat2 Chart::rotation() const {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat2 R;
  R << c, -s, s, c;
  return R;
}

Vec2 Chart::to_chart(const Vec2& x) const { return rotation() * x + offset; }

Vec2 Chart::to_physical(const Vec2& u) const {
  return rotation().transpose() * (u - offset);
}

Vec2 Chart::up_direction() const {
  return Vec2(std::sin(angle), std::cos(angle));  // R^T e2
}

bool Chart::in_box(const Vec2& u, double margin) const {
  return u.x() > lo.x() + margin && u.x() < hi.x() - margin &&
         u.y() > lo.y() + margin && u.y() < hi.y() - margin;
}

void validate_atlas(const Atlas& atlas) {
  if (!(atlas.rho > 0.0)) throw std::invalid_argument("atlas: rho must be positive");
  if (!(atlas.lipschitz > 0.0))
    throw std::invalid_argument("atlas: lipschitz bound must be positive");
  if (atlas.grid_n < 8) throw std::invalid_argument("atlas: grid_n too small");
  if (atlas.s_prime < 1 || atlas.s_prime > atlas.count())
    throw std::invalid_argument("atlas: boundary chart count out of range");
  for (const Chart& c : atlas.charts) {
    if (!std::isfinite(c.angle) || !c.offset.allFinite() || !c.lo.allFinite() ||
        !c.hi.allFinite())
      throw std::invalid_argument("atlas: non-finite chart data");
    if (!(c.hi.x() - c.lo.x() > 2.0 * atlas.rho) ||
        !(c.hi.y() - c.lo.y() > 2.0 * atlas.rho))
      throw std::invalid_argument("atlas: chart box thinner than 2 rho");
  }
}

bool same_atlas(const Atlas& a, const Atlas& b) {
  if (a.rho != b.rho || a.lipschitz != b.lipschitz || a.s_prime != b.s_prime ||
      a.grid_n != b.grid_n || a.count() != b.count())
    return false;
  auto differ = [](const Vec2& u, const Vec2& v) {
    return u.x() != v.x() || u.y() != v.y();
  };
  for (int j = 0; j < a.count(); ++j) {
    const Chart &ca = a.charts[j], &cb = b.charts[j];
    if (ca.angle != cb.angle || differ(ca.offset, cb.offset) ||
        differ(ca.lo, cb.lo) || differ(ca.hi, cb.hi))
      return false;
  }
  return true;
}

/* ---------------------------------------------------------------- graphs */

double graph_value(const Atlas& atlas, int chart, const ChartGraph& graph,
                   double xbar) {
  const Chart& c = atlas.charts[chart];
  const double w = c.hi.x() - c.lo.x();
  const double h = w / atlas.grid_n;
  double s = (xbar - c.lo.x()) / h;
  s = std::clamp(s, 0.0, static_cast<double>(atlas.grid_n));
  int k = std::min(static_cast<int>(s), atlas.grid_n - 1);
  const double f = s - k;
  return (1.0 - f) * graph.g[k] + f * graph.g[k + 1];
}

AtlasDomain domain_from_graphs(std::shared_ptr<const Atlas> atlas,
                               std::vector<VecX> boundary_graphs,
                               std::optional<SubgraphSpec> subgraph) {
  validate_atlas(*atlas);
  if (static_cast<int>(boundary_graphs.size()) != atlas->s_prime)
    throw std::invalid_argument("domain: need one graph per boundary chart");
  AtlasDomain d;
  d.atlas = atlas;
  d.subgraph = subgraph;
  d.graphs.resize(atlas->count());
  for (int j = 0; j < atlas->count(); ++j) {
    if (j < atlas->s_prime) {
      if (boundary_graphs[j].size() != atlas->grid_n + 1)
        throw std::invalid_argument("domain: graph sample count mismatch");
      d.graphs[j].g = std::move(boundary_graphs[j]);
    } else {
      // interior charts carry the whole box: pin the graph at the lid
      d.graphs[j].g = VecX::Constant(atlas->grid_n + 1, atlas->charts[j].hi.y());
    }
  }
  return d;
}

AtlasDomain domain_from_membership(std::shared_ptr<const Atlas> atlas,
                                   std::function<bool(const Vec2&)> inside,
                                   std::optional<SubgraphSpec> subgraph) {
  validate_atlas(*atlas);
  std::vector<VecX> graphs(atlas->s_prime);
  for (int j = 0; j < atlas->s_prime; ++j) {
    const Chart& c = atlas->charts[j];
    const double w = c.hi.x() - c.lo.x();
    const double h = w / atlas->grid_n;
    VecX g(atlas->grid_n + 1);
    for (int k = 0; k <= atlas->grid_n; ++k) {
      // nudge window endpoints inward: the physical box is open, so the
      // exact edge column may sit on a side wall where membership is void
      const double nudge = 1e-9 * w;
      const double xbar =
          std::clamp(c.lo.x() + k * h, c.lo.x() + nudge, c.hi.x() - nudge);
      double yin = c.lo.y(), yout = c.hi.y();
      if (!inside(c.to_physical(Vec2(xbar, yin))))
        throw InvalidDomainError("membership: box floor is not inside the domain");
      if (inside(c.to_physical(Vec2(xbar, yout))))
        throw InvalidDomainError("membership: box lid is not outside the domain");
      while (yout - yin > 1e-13) {
        const double ymid = 0.5 * (yin + yout);
        (inside(c.to_physical(Vec2(xbar, ymid))) ? yin : yout) = ymid;
      }
      g[k] = 0.5 * (yin + yout);
    }
    graphs[j] = std::move(g);
  }
  AtlasDomain d = domain_from_graphs(atlas, std::move(graphs), subgraph);
  d.source_membership = std::move(inside);
  return d;
}

bool domain_contains(const AtlasDomain& d, const Vec2& x, double slack) {
  const Atlas& A = *d.atlas;
  for (int j = 0; j < A.count(); ++j) {
    const Chart& c = A.charts[j];
    const Vec2 u = c.to_chart(x);
    if (!c.in_box(u)) continue;
    if (j >= A.s_prime) return true;  // interior boxes lie inside by contract
    if (u.y() < graph_value(A, j, d.graphs[j], u.x()) + slack) return true;
  }
  // covered only by above-graph box regions, or not covered at all
  return false;
}

DomainReport validate_domain(const AtlasDomain& d) {
  DomainReport report;
  auto flag = [&](const std::string& msg) {
    report.ok = false;
    report.issues.push_back(msg);
  };
  const Atlas& A = *d.atlas;
  if (static_cast<int>(d.graphs.size()) != A.count()) {
    flag("graph count does not match the atlas");
    return report;
  }

  for (int j = 0; j < A.count(); ++j) {
    const Chart& c = A.charts[j];
    const VecX& g = d.graphs[j].g;
    if (g.size() != A.grid_n + 1) {
      flag("chart " + std::to_string(j) + ": bad graph sample count");
      continue;
    }
    const double h = (c.hi.x() - c.lo.x()) / A.grid_n;
    if (j >= A.s_prime) {
      if ((g.array() != c.hi.y()).any())
        flag("interior chart " + std::to_string(j) + ": graph not pinned at the lid");
      continue;
    }
    for (int k = 0; k <= A.grid_n; ++k) {
      if (!(g[k] >= c.lo.y() + A.rho) || !(g[k] <= c.hi.y() - A.rho)) {
        flag("chart " + std::to_string(j) + ": graph leaves the rho margin");
        break;
      }
    }
    for (int k = 0; k < A.grid_n; ++k) {
      if (std::abs(g[k + 1] - g[k]) > A.lipschitz * h * (1.0 + 1e-6) + 1e-12) {
        flag("chart " + std::to_string(j) + ": sampled slope above the Lipschitz bound");
        break;
      }
    }
  }
  if (!report.ok) return report;

  // Overlap consistency: where one chart's boundary samples land strictly
  // inside another boundary chart's box, both graphs must describe the same
  // curve up to interpolation error.
  double hmax = 0.0;
  for (int j = 0; j < A.s_prime; ++j)
    hmax = std::max(hmax, (A.charts[j].hi.x() - A.charts[j].lo.x()) / A.grid_n);
  const double overlap_tol = 2.0 * (A.lipschitz + 1.0) * hmax;
  for (int j = 0; j < A.s_prime; ++j) {
    const Chart& cj = A.charts[j];
    const double hj = (cj.hi.x() - cj.lo.x()) / A.grid_n;
    for (int k = 0; k <= A.grid_n; ++k) {
      const Vec2 p = cj.to_physical(Vec2(cj.lo.x() + k * hj, d.graphs[j].g[k]));
      for (int l = 0; l < A.s_prime; ++l) {
        if (l == j) continue;
        const Chart& cl = A.charts[l];
        const Vec2 u = cl.to_chart(p);
        if (!cl.in_box(u, A.rho / 4.0)) continue;
        const double gl = graph_value(A, l, d.graphs[l], u.x());
        if (std::abs(u.y() - gl) > overlap_tol) {
          flag("charts " + std::to_string(j) + " and " + std::to_string(l) +
               ": inconsistent boundary descriptions in their overlap");
          k = A.grid_n;  // one report per chart pair is enough
          break;
        }
      }
    }
  }

  // Interior boxes must sit inside the domain.
  for (int j = A.s_prime; j < A.count(); ++j) {
    const Chart& c = A.charts[j];
    bool bad = false;
    for (int a = 0; a < 13 && !bad; ++a)
      for (int b = 0; b < 13 && !bad; ++b) {
        // stay strictly inside the open box
        const Vec2 u(c.lo.x() + (c.hi.x() - c.lo.x()) * (a + 0.5) / 13.0,
                     c.lo.y() + (c.hi.y() - c.lo.y()) * (b + 0.5) / 13.0);
        const Vec2 p = c.to_physical(u);
        if (!domain_contains(d, p, 1e-9)) bad = true;
        if (d.source_membership && !d.source_membership(p)) bad = true;
      }
    if (bad) flag("interior chart " + std::to_string(j) + ": box leaves the domain");
  }

  // Coverage: every domain point must lie in some rho-shrunk chart box.
  if (d.source_membership) {
    Vec2 blo(1e300, 1e300), bhi(-1e300, -1e300);
    for (const Chart& c : A.charts)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const Vec2 corner(a ? c.hi.x() : c.lo.x(), b ? c.hi.y() : c.lo.y());
          const Vec2 p = c.to_physical(corner);
          blo = blo.cwiseMin(p);
          bhi = bhi.cwiseMax(p);
        }
    const int n = 160;
    int holes = 0;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        const Vec2 p(blo.x() + (bhi.x() - blo.x()) * a / n,
                     blo.y() + (bhi.y() - blo.y()) * b / n);
        if (!d.source_membership(p)) continue;
        bool covered = false;
        for (int j = 0; j < A.count() && !covered; ++j)
          if (A.charts[j].in_box(A.charts[j].to_chart(p), A.rho)) covered = true;
        if (!covered) ++holes;
      }
    if (holes > 0)
      flag("coverage: " + std::to_string(holes) +
           " sampled domain points outside every rho-shrunk chart box");
  }

  if (d.subgraph) {
    const SubgraphSpec& sg = *d.subgraph;
    if (sg.top_chart < 0 || sg.top_chart >= A.s_prime)
      flag("subgraph: top chart index out of range");
    else if (std::abs(A.charts[sg.top_chart].angle) > 1e-12)
      flag("subgraph: top chart is not axis aligned");
    if (!(sg.x1 > sg.x0)) flag("subgraph: empty base interval");
  }
  return report;
}

/* ------------------------------------------------------------- distances */

static void require_same_atlas(const AtlasDomain& a, const AtlasDomain& b) {
  if (!a.atlas || !b.atlas || !same_atlas(*a.atlas, *b.atlas))
    throw IncompatibleAtlasError("domains do not share an atlas");
}

static double graph_sup_distance(const AtlasDomain& a, const AtlasDomain& b,
                                 double window_shrink) {
  require_same_atlas(a, b);
  const Atlas& A = *a.atlas;
  double sup = 0.0;
  for (int j = 0; j < A.s_prime; ++j) {
    const Chart& c = A.charts[j];
    const double h = (c.hi.x() - c.lo.x()) / A.grid_n;
    for (int k = 0; k <= A.grid_n; ++k) {
      const double xbar = c.lo.x() + k * h;
      if (xbar < c.lo.x() + window_shrink - 1e-12 ||
          xbar > c.hi.x() - window_shrink + 1e-12)
        continue;
      sup = std::max(sup, std::abs(a.graphs[j].g[k] - b.graphs[j].g[k]));
    }
  }
  return sup;
}

double atlas_distance(const AtlasDomain& a, const AtlasDomain& b) {
  return graph_sup_distance(a, b, 0.0);
}

double atlas_distance_halved(const AtlasDomain& a, const AtlasDomain& b) {
  return graph_sup_distance(a, b, a.atlas->rho / 2.0);
}

std::vector<Vec2> boundary_points(const AtlasDomain& d) {
  const Atlas& A = *d.atlas;
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(A.s_prime) * (A.grid_n + 1));
  for (int j = 0; j < A.s_prime; ++j) {
    const Chart& c = A.charts[j];
    const double h = (c.hi.x() - c.lo.x()) / A.grid_n;
    for (int k = 0; k <= A.grid_n; ++k)
      pts.push_back(c.to_physical(Vec2(c.lo.x() + k * h, d.graphs[j].g[k])));
  }
  return pts;
}

namespace {

// consecutive graph samples within each boundary chart
std::vector<std::array<Vec2, 2>> boundary_segments(const AtlasDomain& d) {
  const Atlas& A = *d.atlas;
  std::vector<std::array<Vec2, 2>> segs;
  segs.reserve(static_cast<size_t>(A.s_prime) * A.grid_n);
  for (int j = 0; j < A.s_prime; ++j) {
    const Chart& c = A.charts[j];
    const double h = (c.hi.x() - c.lo.x()) / A.grid_n;
    Vec2 prev = c.to_physical(Vec2(c.lo.x(), d.graphs[j].g[0]));
    for (int k = 1; k <= A.grid_n; ++k) {
      const Vec2 cur = c.to_physical(Vec2(c.lo.x() + k * h, d.graphs[j].g[k]));
      segs.push_back({prev, cur});
      prev = cur;
    }
  }
  return segs;
}

double point_segment_sq(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).squaredNorm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).squaredNorm();
}

double one_sided_deviation(const AtlasDomain& from, const AtlasDomain& to) {
  const auto pts = boundary_points(from);
  const auto segs = boundary_segments(to);
  double sup = 0.0;
  for (const Vec2& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : segs) best = std::min(best, point_segment_sq(p, s[0], s[1]));
    sup = std::max(sup, best);
  }
  return std::sqrt(sup);
}

}  // namespace

HausdorffDeviations hausdorff_deviations(const AtlasDomain& a,
                                         const AtlasDomain& b) {
  HausdorffDeviations out;
  out.from_first = one_sided_deviation(a, b);
  out.from_second = one_sided_deviation(b, a);
  out.max_deviation = std::max(out.from_first, out.from_second);
  return out;
}

InclusionCheck inclusion_neighborhoods(const AtlasDomain& a, const AtlasDomain& b,
                                       double eps) {
  require_same_atlas(a, b);
  const Atlas& A = *a.atlas;
  double hmax = 0.0;
  for (int j = 0; j < A.s_prime; ++j)
    hmax = std::max(hmax, (A.charts[j].hi.x() - A.charts[j].lo.x()) / A.grid_n);
  const HausdorffDeviations dev = hausdorff_deviations(a, b);
  InclusionCheck out;
  // half the worst sample spacing along a graph of admissible slope
  out.slack = 0.5 * hmax * std::sqrt(1.0 + A.lipschitz * A.lipschitz);
  out.deviation_first = dev.from_first;
  out.deviation_second = dev.from_second;
  out.first_in_second_tube = dev.from_first <= eps + out.slack;
  out.second_in_first_tube = dev.from_second <= eps + out.slack;
  return out;
}

/* --------------------------------------------------------- collapse map */

namespace {

struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

double ramp_f(double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); }
double ramp_f1(double s) { return s <= 0.0 ? 0.0 : ramp_f(s) / (s * s); }
double ramp_f2(double s) {
  return s <= 0.0 ? 0.0 : ramp_f(s) * (1.0 - 2.0 * s) / (s * s * s * s);
}

// chi(s): 1 for s <= 0, 0 for s >= 1, C^infinity in between.
Jet step_down(double s) {
  if (s <= 0.0) return {1.0, 0.0, 0.0};
  if (s >= 1.0) return {0.0, 0.0, 0.0};
  const double a = ramp_f(1.0 - s), b = ramp_f(s);
  const double ap = -ramp_f1(1.0 - s), bp = ramp_f1(s);
  const double app = ramp_f2(1.0 - s), bpp = ramp_f2(s);
  const double den = a + b, denp = ap + bp;
  const double num = ap * b - a * bp;    // numerator of chi'
  const double nump = app * b - a * bpp;
  Jet out;
  out.v = a / den;
  out.d1 = num / (den * den);
  out.d2 = (nump * den - 2.0 * num * denp) / (den * den * den);
  return out;
}

Jet step_down_scaled(double s, double dsdx) {
  Jet c = step_down(s);
  return {c.v, c.d1 * dsdx, c.d2 * dsdx * dsdx};
}

// 1 on [lo+rho, hi-rho], 0 outside (lo+3rho/4, hi-3rho/4).
Jet plateau(double x, double lo, double hi, double rho) {
  const double k = 4.0 / rho;
  const Jet up = step_down_scaled((lo + rho - x) * k, -k);
  const Jet dn = step_down_scaled((x - hi + rho) * k, k);
  Jet out;
  out.v = up.v * dn.v;
  out.d1 = up.d1 * dn.v + up.v * dn.d1;
  out.d2 = up.d2 * dn.v + 2.0 * up.d1 * dn.d1 + up.v * dn.d2;
  return out;
}

struct BumpData {
  double b = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

BumpData chart_bump(const Chart& c, double rho, const Vec2& x) {
  const Vec2 u = c.to_chart(x);
  const Jet bx = plateau(u.x(), c.lo.x(), c.hi.x(), rho);
  const Jet by = plateau(u.y(), c.lo.y(), c.hi.y(), rho);
  BumpData out;
  out.b = bx.v * by.v;
  const Vec2 gu(bx.d1 * by.v, bx.v * by.d1);
  Mat2 hu;
  hu << bx.d2 * by.v, bx.d1 * by.d1, bx.d1 * by.d1, bx.v * by.d2;
  const Mat2 R = c.rotation();
  out.grad = R.transpose() * gu;       // u = R x + offset
  out.hess = R.transpose() * hu * R;
  return out;
}

// Smooth floor of the bump sum: m(S) = S for S >= 1, S + 1/2 for S <= 1/2,
// and always m >= max(S, 1/2). Normalizing by m instead of S makes the
// partition functions psi_j = b_j / m(S) globally smooth (no division by a
// vanishing sum), keeps sum psi <= 1 everywhere, and gives sum psi = 1
// exactly wherever the plateaus already cover (S >= 1).
Jet floor_jet(double S) {
  const Jet lam = step_down_scaled(2.0 * (1.0 - S), -2.0);  // 0 below 1/2, 1 above 1
  Jet m;
  m.v = S + 0.5 * (1.0 - lam.v);
  m.d1 = 1.0 - 0.5 * lam.d1;
  m.d2 = -0.5 * lam.d2;
  return m;
}

Jet recip_jet(const Jet& m) {
  Jet h;
  h.v = 1.0 / m.v;
  h.d1 = -m.d1 / (m.v * m.v);
  h.d2 = (2.0 * m.d1 * m.d1 - m.v * m.d2) / (m.v * m.v * m.v);
  return h;
}

struct PartitionEval {
  std::vector<double> psi;
  std::vector<Vec2> dpsi;
  std::vector<Mat2> hpsi;
  double sum = 0.0;
};

PartitionEval eval_partition(const std::vector<Chart>& charts, double rho,
                             const Vec2& x) {
  const int s = static_cast<int>(charts.size());
  std::vector<BumpData> bumps(s);
  double S = 0.0;
  Vec2 gS = Vec2::Zero();
  Mat2 hS = Mat2::Zero();
  for (int j = 0; j < s; ++j) {
    bumps[j] = chart_bump(charts[j], rho, x);
    S += bumps[j].b;
    gS += bumps[j].grad;
    hS += bumps[j].hess;
  }
  const Jet h = recip_jet(floor_jet(S));
  // h(S(x)) by the chain rule
  const Vec2 gh = h.d1 * gS;
  const Mat2 hh = h.d2 * (gS * gS.transpose()) + h.d1 * hS;
  PartitionEval out;
  out.psi.resize(s);
  out.dpsi.resize(s);
  out.hpsi.resize(s);
  for (int j = 0; j < s; ++j) {
    const BumpData& b = bumps[j];
    out.psi[j] = b.b * h.v;
    out.dpsi[j] = h.v * b.grad + b.b * gh;
    out.hpsi[j] = h.v * b.hess + b.grad * gh.transpose() + gh * b.grad.transpose() +
                  b.b * hh;
    out.sum += out.psi[j];
  }
  return out;
}

}  // namespace

CollapseMap burenkov_map(const Atlas& atlas, double eps) {
  validate_atlas(atlas);
  CollapseMap out;
  out.eps_max = atlas.rho / 2.0;
  if (!(eps >= 0.0) || eps >= out.eps_max)
    throw OutOfRangeError("collapse map: eps must lie in [0, rho/2)");
  auto charts = std::make_shared<const std::vector<Chart>>(atlas.charts);
  std::vector<Vec2> xi(charts->size());
  for (size_t j = 0; j < charts->size(); ++j) xi[j] = (*charts)[j].up_direction();
  const double rho = atlas.rho;

  out.map.family = "burenkov-collapse";
  out.map.value = [charts, xi, rho, eps](const Vec2& x) {
    const PartitionEval p = eval_partition(*charts, rho, x);
    Vec2 push = Vec2::Zero();
    for (size_t j = 0; j < xi.size(); ++j) push += xi[j] * p.psi[j];
    return Vec2(x - eps * push);
  };
  out.map.jacobian = [charts, xi, rho, eps](const Vec2& x) {
    const PartitionEval p = eval_partition(*charts, rho, x);
    Mat2 J = Mat2::Identity();
    for (size_t j = 0; j < xi.size(); ++j)
      J -= eps * (xi[j] * p.dpsi[j].transpose());
    return J;
  };
  out.map.hessians = [charts, xi, rho, eps](const Vec2& x) {
    const PartitionEval p = eval_partition(*charts, rho, x);
    std::array<Mat2, 2> H = {Mat2::Zero(), Mat2::Zero()};
    for (size_t j = 0; j < xi.size(); ++j)
      for (int c = 0; c < 2; ++c) H[c] -= eps * xi[j][c] * p.hpsi[j];
    return H;
  };
  out.partition_sum = [charts, rho](const Vec2& x) {
    return eval_partition(*charts, rho, x).sum;
  };
  return out;
}

/* ---------------------------------------------------------------- meshing */

Mesh domain_to_mesh(const AtlasDomain& d, int nx) {
  if (!d.subgraph)
    throw InvalidDomainError("meshing: domain carries no subgraph description");
  const SubgraphSpec& sg = *d.subgraph;
  const Atlas& A = *d.atlas;
  if (sg.top_chart < 0 || sg.top_chart >= A.s_prime)
    throw InvalidDomainError("meshing: top chart index out of range");
  const Chart& c = A.charts[sg.top_chart];
  if (std::abs(c.angle) > 1e-12)
    throw InvalidDomainError("meshing: top chart must be axis aligned");
  if (nx < 1 || !(sg.x1 > sg.x0))
    throw InvalidDomainError("meshing: bad base interval or resolution");

  auto top = [&](double x) {
    const Vec2 u = c.to_chart(Vec2(x, 0.0));
    return graph_value(A, sg.top_chart, d.graphs[sg.top_chart], u.x()) -
           c.offset.y();
  };
  const double dx = (sg.x1 - sg.x0) / nx;
  std::vector<double> height(nx + 1);
  double mean_height = 0.0;
  for (int i = 0; i <= nx; ++i) {
    height[i] = top(sg.x0 + i * dx) - sg.y0;
    if (!(height[i] > 0.0))
      throw InvalidDomainError("meshing: top graph touches the base line");
    mean_height += height[i];
  }
  mean_height /= (nx + 1);
  const int ny = std::max(
      1, static_cast<int>(std::llround(nx * mean_height / (sg.x1 - sg.x0))));

  Mesh mesh;
  mesh.nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes[static_cast<size_t>(j) * (nx + 1) + i] =
          Vec2(sg.x0 + i * dx, sg.y0 + height[i] * j / ny);
  mesh.triangles.reserve(static_cast<size_t>(nx) * ny * 2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * (nx + 1) + i, v10 = v00 + 1;
      const int v01 = v00 + (nx + 1), v11 = v01 + 1;
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  finalize_mesh(mesh);
  return mesh;
}

/* -------------------------------------------------------------------- io */

static void write_doubles(std::ostream& os, std::initializer_list<double> xs) {
  char buf[64];
  bool first = true;
  for (double x : xs) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << (first ? "" : " ") << buf;
    first = false;
  }
}

void write_atlas(const std::string& path, const Atlas& atlas) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "atlas " << atlas.count() << " " << atlas.s_prime << " " << atlas.grid_n
     << " ";
  write_doubles(os, {atlas.rho, atlas.lipschitz});
  os << "\n";
  for (const Chart& c : atlas.charts) {
    write_doubles(os, {c.angle, c.offset.x(), c.offset.y(), c.lo.x(), c.lo.y(),
                       c.hi.x(), c.hi.y()});
    os << "\n";
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Atlas read_atlas(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string tag;
  int count = 0;
  Atlas atlas;
  is >> tag >> count >> atlas.s_prime >> atlas.grid_n >> atlas.rho >>
      atlas.lipschitz;
  if (!is || tag != "atlas" || count < 1)
    throw std::runtime_error("malformed atlas file: " + path);
  atlas.charts.resize(count);
  for (Chart& c : atlas.charts)
    is >> c.angle >> c.offset.x() >> c.offset.y() >> c.lo.x() >> c.lo.y() >>
        c.hi.x() >> c.hi.y();
  if (!is) throw std::runtime_error("malformed atlas file: " + path);
  validate_atlas(atlas);
  return atlas;
}

void write_domain(const std::string& path, const AtlasDomain& d) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const Atlas& A = *d.atlas;
  os << "domain " << A.count() << " " << A.s_prime << " " << A.grid_n << " ";
  write_doubles(os, {A.rho, A.lipschitz});
  os << "\n";
  for (const Chart& c : A.charts) {
    write_doubles(os, {c.angle, c.offset.x(), c.offset.y(), c.lo.x(), c.lo.y(),
                       c.hi.x(), c.hi.y()});
    os << "\n";
  }
  if (d.subgraph) {
    os << "subgraph " << d.subgraph->top_chart << " ";
    write_doubles(os, {d.subgraph->x0, d.subgraph->x1, d.subgraph->y0});
    os << "\n";
  } else {
    os << "nosubgraph\n";
  }
  for (int j = 0; j < A.s_prime; ++j) {
    const VecX& g = d.graphs[j].g;
    for (int k = 0; k < g.size(); ++k) {
      write_doubles(os, {g[k]});
      os << (k + 1 < g.size() ? " " : "\n");
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

AtlasDomain read_domain(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string tag;
  int count = 0;
  auto atlas = std::make_shared<Atlas>();
  is >> tag >> count >> atlas->s_prime >> atlas->grid_n >> atlas->rho >>
      atlas->lipschitz;
  if (!is || tag != "domain" || count < 1)
    throw std::runtime_error("malformed domain file: " + path);
  atlas->charts.resize(count);
  for (Chart& c : atlas->charts)
    is >> c.angle >> c.offset.x() >> c.offset.y() >> c.lo.x() >> c.lo.y() >>
        c.hi.x() >> c.hi.y();
  std::string sub;
  is >> sub;
  std::optional<SubgraphSpec> sg;
  if (sub == "subgraph") {
    SubgraphSpec s;
    is >> s.top_chart >> s.x0 >> s.x1 >> s.y0;
    sg = s;
  } else if (sub != "nosubgraph") {
    throw std::runtime_error("malformed domain file: " + path);
  }
  std::vector<VecX> graphs(atlas->s_prime);
  for (int j = 0; j < atlas->s_prime; ++j) {
    graphs[j].resize(atlas->grid_n + 1);
    for (int k = 0; k <= atlas->grid_n; ++k) is >> graphs[j][k];
  }
  if (!is) throw std::runtime_error("malformed domain file: " + path);
  return domain_from_graphs(std::move(atlas), std::move(graphs), sg);
}

/* ---------------------------------------------------------- constructions */

Atlas make_box_atlas(double width, double h0, double rho) {
  if (!(width > 0.5) || !(h0 > 0.4) || !(h0 < width))
    throw std::invalid_argument("box atlas: expected 0.4 < h0 < width, width > 0.5");
  const double pi = std::acos(-1.0);
  Atlas atlas;
  atlas.rho = rho;
  atlas.lipschitz = 2.5;
  atlas.s_prime = 8;
  atlas.grid_n = 256;

  const double band = 0.3;  // half-thickness of the wall boxes

  Chart top;  // graphs y = g(x) near the lid
  top.angle = 0.0;
  top.lo = Vec2(0.0, h0 - band);
  top.hi = Vec2(width, h0 + band);

  Chart bottom;  // u = (-x, -y), floor y = 0 becomes the graph g = 0
  bottom.angle = pi;
  bottom.lo = Vec2(-width, -band);
  bottom.hi = Vec2(0.0, band);

  Chart left;  // u = (y, -x): the wall x = 0 seen from inside
  left.angle = -pi / 2.0;
  left.lo = Vec2(0.1, -band);
  left.hi = Vec2(h0 - 0.1, band);

  Chart right;  // u = (-y, x - width)
  right.angle = pi / 2.0;
  right.offset = Vec2(0.0, -width);
  right.lo = Vec2(-(h0 - 0.1), -band);
  right.hi = Vec2(-0.1, band);

  // 45-degree corner charts: the two meeting walls become the tent
  // g(u) = -|u| with the apex at the chart origin.
  auto corner = [&](const Vec2& p, double angle) {
    Chart c;
    c.angle = angle;
    c.offset = -(c.rotation() * p);
    c.lo = Vec2(-0.35, -0.53);
    c.hi = Vec2(0.35, 0.18);
    return c;
  };

  Chart interior;
  interior.angle = 0.0;
  interior.lo = Vec2(0.08, 0.08);
  interior.hi = Vec2(width - 0.08, h0 - 0.09);

  atlas.charts = {top,
                  bottom,
                  left,
                  right,
                  corner(Vec2(0.0, 0.0), -3.0 * pi / 4.0),
                  corner(Vec2(width, 0.0), 3.0 * pi / 4.0),
                  corner(Vec2(0.0, h0), -pi / 4.0),
                  corner(Vec2(width, h0), pi / 4.0),
                  interior};
  validate_atlas(atlas);
  return atlas;
}

AtlasDomain make_box_domain(std::shared_ptr<const Atlas> atlas,
                            std::function<double(double)> top) {
  const double width = atlas->charts[0].hi.x();
  auto inside = [width, top](const Vec2& x) {
    return x.x() > 0.0 && x.x() < width && x.y() > 0.0 && x.y() < top(x.x());
  };
  SubgraphSpec sg;
  sg.x0 = 0.0;
  sg.x1 = width;
  sg.y0 = 0.0;
  sg.top_chart = 0;
  return domain_from_membership(std::move(atlas), inside, sg);
}

Atlas make_disk_arc_atlas(double rho) {
  const double pi = std::acos(-1.0);
  Atlas atlas;
  atlas.rho = rho;
  atlas.lipschitz = 2.0;
  atlas.s_prime = 8;
  atlas.grid_n = 256;
  // eight arcs, each a graph over a 45-degree sector with generous overlap
  for (int j = 0; j < 8; ++j) {
    Chart c;
    c.angle = j * pi / 4.0;
    c.lo = Vec2(-0.55, 0.45);
    c.hi = Vec2(0.55, 1.25);
    atlas.charts.push_back(c);
  }
  Chart interior;
  interior.lo = Vec2(-0.65, -0.65);
  interior.hi = Vec2(0.65, 0.65);
  atlas.charts.push_back(interior);
  validate_atlas(atlas);
  return atlas;
}

AtlasDomain make_disk_domain(std::shared_ptr<const Atlas> atlas, double radius) {
  const double r2 = radius * radius;
  return domain_from_membership(
      std::move(atlas), [r2](const Vec2& x) { return x.squaredNorm() < r2; });
}

}  // namespace plateshape
