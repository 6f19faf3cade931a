#include "plateshape/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "plateshape/maps.hpp"

namespace plateshape {

namespace {

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

// Gauss-Legendre nodes/weights on [0,1], weights summing to 1.
void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 1:
      x = {0.5};
      w = {1.0};
      break;
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      x = {0.5 - d, 0.5 + d};
      w = {0.5, 0.5};
      break;
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      x = {0.5 - d, 0.5, 0.5 + d};
      w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    case 4: {
      const double x1 = 0.3399810435848563, x2 = 0.8611363115940526;
      const double w1 = 0.6521451548625461, w2 = 0.3478548451374538;
      x = {0.5 - 0.5 * x2, 0.5 - 0.5 * x1, 0.5 + 0.5 * x1, 0.5 + 0.5 * x2};
      w = {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2};
      break;
    }
    case 5: {
      const double x1 = 0.5384693101056831, x2 = 0.9061798459386640;
      const double w0 = 0.5688888888888889, w1 = 0.4786286704993665,
                   w2 = 0.2369268850561891;
      x = {0.5 - 0.5 * x2, 0.5 - 0.5 * x1, 0.5, 0.5 + 0.5 * x1, 0.5 + 0.5 * x2};
      w = {0.5 * w2, 0.5 * w1, 0.5 * w0, 0.5 * w1, 0.5 * w2};
      break;
    }
    default:
      throw std::invalid_argument(
          "boundary_trace: samples_per_edge must be between 1 and 5");
  }
}

}  // namespace

double triangle_area(const Mesh& mesh, int tri) {
  const auto& t = mesh.triangles.at(static_cast<size_t>(tri));
  return signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
}

double mesh_area(const Mesh& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) a += triangle_area(mesh, t);
  return a;
}

double mesh_perimeter(const Mesh& mesh) {
  double p = 0.0;
  for (const auto& e : mesh.boundary_edges) p += e.length;
  return p;
}

void finalize_mesh(Mesh& mesh) {
  const int nv = mesh.node_count();
  for (auto& t : mesh.triangles) {
    for (int v : t)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("finalize_mesh: vertex index out of range");
    if (signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]) < 0.0)
      std::swap(t[1], t[2]);
  }

  // Undirected edge -> (count, owning triangle, directed orientation as it
  // appears in that triangle). Boundary edges appear exactly once.
  std::map<std::pair<int, int>, std::array<int, 3>> edges;
  for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
    const auto& t = mesh.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = edges.find(key);
      if (it == edges.end())
        edges[key] = {1, ti, a};
      else
        it->second[0] += 1;
    }
  }

  std::map<int, BoundaryEdge> by_source;  // start node -> edge, for chaining
  for (const auto& [key, info] : edges) {
    if (info[0] == 1) {
      BoundaryEdge e;
      e.a = info[2];
      e.b = (key.first == e.a) ? key.second : key.first;
      e.tri = info[1];
      const Vec2 d = mesh.nodes[e.b] - mesh.nodes[e.a];
      e.length = d.norm();
      if (e.length <= 0.0)
        throw std::invalid_argument("finalize_mesh: zero-length boundary edge");
      e.normal = Vec2(d.y(), -d.x()) / e.length;
      by_source[e.a] = e;
    } else if (info[0] != 2) {
      throw std::invalid_argument(
          "finalize_mesh: edge shared by more than two triangles");
    }
  }

  mesh.boundary_edges.clear();
  mesh.boundary_flag.assign(static_cast<size_t>(nv), 0);
  while (!by_source.empty()) {
    int start = by_source.begin()->first;  // smallest remaining start node
    int cur = start;
    do {
      auto it = by_source.find(cur);
      if (it == by_source.end())
        throw std::invalid_argument("finalize_mesh: boundary loop is not closed");
      mesh.boundary_edges.push_back(it->second);
      mesh.boundary_flag[it->second.a] = 1;
      mesh.boundary_flag[it->second.b] = 1;
      cur = it->second.b;
      by_source.erase(it);
    } while (cur != start);
  }
}

std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = fnv1a64("mesh", 4);
  auto mix = [&h](const void* p, size_t n) { h = fnv1a64(p, n, h); };
  const std::uint64_t nv = static_cast<std::uint64_t>(mesh.nodes.size());
  const std::uint64_t nt = static_cast<std::uint64_t>(mesh.triangles.size());
  mix(&nv, sizeof nv);
  mix(&nt, sizeof nt);
  for (const auto& p : mesh.nodes) {
    const double c[2] = {p.x(), p.y()};
    mix(c, sizeof c);
  }
  for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
  return h;
}

Mesh generate_rectangle(double a, double b, int nx, int ny) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("generate_rectangle: sides must be positive");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("generate_rectangle: need at least one cell per side");

  Mesh m;
  m.nodes.reserve(static_cast<size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.emplace_back(a * i / nx, b * j / ny);

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int p = id(i, j), q = id(i + 1, j), r = id(i + 1, j + 1),
                s = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles.push_back({p, q, r});
        m.triangles.push_back({p, r, s});
      } else {
        m.triangles.push_back({p, q, s});
        m.triangles.push_back({q, r, s});
      }
    }
  finalize_mesh(m);
  return m;
}

Mesh generate_disk(double radius, int refine_level) {
  if (!(radius > 0.0))
    throw std::invalid_argument("generate_disk: radius must be positive");
  if (refine_level < 0 || refine_level > 7)
    throw std::invalid_argument("generate_disk: refine_level must be in [0,7]");

  const int nr = 1 << refine_level;
  Mesh m;
  m.nodes.emplace_back(0.0, 0.0);
  std::vector<int> ring_offset(static_cast<size_t>(nr) + 1, 0);
  for (int i = 1; i <= nr; ++i) {
    ring_offset[i] = m.node_count();
    const int count = 8 * i;
    const double r = radius * i / nr;
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      m.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }

  // Hub fan.
  for (int k = 0; k < 8; ++k)
    m.triangles.push_back({0, ring_offset[1] + k, ring_offset[1] + (k + 1) % 8});

  // Annulus between rings i-1 and i, split into 8 sectors. Each sector zips
  // the i inner nodes against the i+1 outer nodes by angular merge.
  for (int i = 2; i <= nr; ++i) {
    const int ni = 8 * (i - 1), no = 8 * i;
    for (int s = 0; s < 8; ++s) {
      auto inner = [&](int p) { return ring_offset[i - 1] + (s * (i - 1) + p) % ni; };
      auto outer = [&](int q) { return ring_offset[i] + (s * i + q) % no; };
      auto inner_angle = [&](int p) { return (s + double(p) / (i - 1)) * 0.25; };
      auto outer_angle = [&](int q) { return (s + double(q) / i) * 0.25; };
      int p = 0, q = 0;
      while (p < i - 1 || q < i) {
        const bool advance_outer =
            q < i && (p == i - 1 || outer_angle(q + 1) <= inner_angle(p + 1));
        if (advance_outer) {
          m.triangles.push_back({inner(p), outer(q), outer(q + 1)});
          ++q;
        } else {
          m.triangles.push_back({outer(q), inner(p + 1), inner(p)});
          ++p;
        }
      }
    }
  }
  finalize_mesh(m);
  return m;
}

Mesh map_mesh(const Mesh& mesh, const ParametricMap& map) {
  Mesh out;
  out.nodes.reserve(mesh.nodes.size());
  for (const auto& p : mesh.nodes) out.nodes.push_back(map.value(p));
  out.triangles = mesh.triangles;
  double min_area = std::numeric_limits<double>::infinity();
  for (const auto& t : out.triangles)
    min_area = std::min(min_area, signed_area(out.nodes[t[0]], out.nodes[t[1]],
                                              out.nodes[t[2]]));
  if (!(min_area > 0.0)) {
    std::ostringstream msg;
    msg << "map_mesh: image mesh degenerates (family '" << map.family
        << "', min signed area " << min_area << ")";
    throw DegenerateMapError(msg.str());
  }
  finalize_mesh(out);
  return out;
}

MeshReport validate_mesh(const Mesh& mesh) {
  MeshReport rep;
  auto fail = [&rep](const std::string& s) {
    rep.ok = false;
    rep.issues.push_back(s);
  };

  if (mesh.nodes.empty() || mesh.triangles.empty()) {
    fail("mesh is empty");
    return rep;
  }
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (!(triangle_area(mesh, t) > 0.0))
      fail("triangle " + std::to_string(t) + " has non-positive area");

  {
    std::map<std::pair<long long, long long>, size_t> seen;
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
      // Coincidence down to ~1e-12 of the coordinate scale.
      const auto key = std::make_pair(
          static_cast<long long>(std::llround(mesh.nodes[i].x() * 1e12)),
          static_cast<long long>(std::llround(mesh.nodes[i].y() * 1e12)));
      auto [it, fresh] = seen.emplace(key, i);
      if (!fresh)
        fail("nodes " + std::to_string(it->second) + " and " +
             std::to_string(i) + " coincide");
    }
  }

  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      count[std::minmax(t[k], t[(k + 1) % 3])] += 1;
  int boundary = 0;
  for (const auto& [key, c] : count) {
    if (c == 1)
      ++boundary;
    else if (c != 2)
      fail("edge (" + std::to_string(key.first) + "," +
           std::to_string(key.second) + ") shared by " + std::to_string(c) +
           " triangles");
  }
  if (boundary != static_cast<int>(mesh.boundary_edges.size()))
    fail("stored boundary edge list disagrees with connectivity");

  std::vector<int> flags(mesh.nodes.size(), 0);
  for (const auto& e : mesh.boundary_edges) {
    flags[static_cast<size_t>(e.a)] = 1;
    flags[static_cast<size_t>(e.b)] = 1;
    if (std::abs(e.normal.norm() - 1.0) > 1e-12)
      fail("boundary edge normal is not unit length");
  }
  if (flags != mesh.boundary_flag) fail("node boundary flags are stale");

  // The stored edges must chain into closed loops: each edge starts where the
  // previous one ended, and where the chain breaks the previous loop must
  // just have closed.
  if (!mesh.boundary_edges.empty()) {
    int loop_start = mesh.boundary_edges.front().a;
    for (size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
      const auto& e = mesh.boundary_edges[i];
      const bool last = (i + 1 == mesh.boundary_edges.size());
      const int next_a = last ? -1 : mesh.boundary_edges[i + 1].a;
      if (!last && e.b == next_a) continue;
      if (e.b != loop_start)
        fail("boundary loop starting at node " + std::to_string(loop_start) +
             " does not close");
      if (!last) loop_start = next_a;
    }
  }
  return rep;
}

BoundaryTrace boundary_trace(const Mesh& mesh, int samples_per_edge) {
  if (mesh.boundary_edges.empty())
    throw std::invalid_argument("boundary_trace: mesh has no boundary data");
  std::vector<double> gx, gw;
  gauss_rule(samples_per_edge, gx, gw);

  BoundaryTrace tr;
  const int n = static_cast<int>(mesh.boundary_edges.size()) * samples_per_edge;
  tr.points.reserve(static_cast<size_t>(n));
  tr.normals.reserve(static_cast<size_t>(n));
  tr.weights.resize(n);
  tr.arclength.resize(n);
  tr.edge_index.reserve(static_cast<size_t>(n));
  tr.tri.reserve(static_cast<size_t>(n));

  double s0 = 0.0;
  int out = 0;
  for (size_t ei = 0; ei < mesh.boundary_edges.size(); ++ei) {
    const auto& e = mesh.boundary_edges[ei];
    const Vec2 pa = mesh.nodes[e.a], pb = mesh.nodes[e.b];
    for (int g = 0; g < samples_per_edge; ++g, ++out) {
      tr.points.push_back(pa + gx[g] * (pb - pa));
      tr.normals.push_back(e.normal);
      tr.weights[out] = gw[g] * e.length;
      tr.arclength[out] = s0 + gx[g] * e.length;
      tr.edge_index.push_back(static_cast<int>(ei));
      tr.tri.push_back(e.tri);
    }
    s0 += e.length;
  }
  tr.source_hash = mesh_hash(mesh);
  return tr;
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_mesh: cannot open " + path);
  f << "nodes " << mesh.node_count() << "\n";
  char buf[80];
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.nodes[i].x(),
                  mesh.nodes[i].y(), mesh.boundary_flag[i]);
    f << buf;
  }
  f << "triangles " << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles)
    f << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!f) throw std::runtime_error("write_mesh: write failed for " + path);
}

Mesh read_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_mesh: cannot open " + path);
  std::string tag;
  int n = 0;
  if (!(f >> tag >> n) || tag != "nodes" || n <= 0)
    throw std::runtime_error("read_mesh: bad node header in " + path);
  Mesh m;
  m.nodes.resize(static_cast<size_t>(n));
  std::vector<int> flags(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x, y;
    int fl;
    if (!(f >> x >> y >> fl))
      throw std::runtime_error("read_mesh: truncated node table in " + path);
    m.nodes[static_cast<size_t>(i)] = Vec2(x, y);
    flags[static_cast<size_t>(i)] = fl;
  }
  int nt = 0;
  if (!(f >> tag >> nt) || tag != "triangles" || nt <= 0)
    throw std::runtime_error("read_mesh: bad triangle header in " + path);
  m.triangles.resize(static_cast<size_t>(nt));
  for (auto& t : m.triangles)
    if (!(f >> t[0] >> t[1] >> t[2]))
      throw std::runtime_error("read_mesh: truncated triangle table in " + path);
  finalize_mesh(m);
  if (flags != m.boundary_flag)
    throw std::runtime_error("read_mesh: stored boundary flags disagree with connectivity in " + path);
  return m;
}

}  // namespace plateshape
