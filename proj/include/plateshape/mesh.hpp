#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "plateshape/types.hpp"

namespace plateshape {

struct ParametricMap;

// One directed boundary edge a->b, oriented so the domain lies on its left
// (the boundary loop runs counterclockwise for a positively oriented mesh).
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  Vec2 normal = Vec2::Zero();  // outward unit normal
  double length = 0.0;
  int tri = -1;                // the unique triangle owning this edge
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex triples
  std::vector<int> boundary_flag;             // per node, 1 on the boundary
  std::vector<BoundaryEdge> boundary_edges;   // ordered along the loop

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

// Derived quantities recomputed from nodes+triangles: boundary edges (chained
// into a loop starting at the edge with the smallest source node id), node
// flags, orientation fix (negative-area triangles are flipped in place).
void finalize_mesh(Mesh& mesh);

double triangle_area(const Mesh& mesh, int tri);
double mesh_area(const Mesh& mesh);
double mesh_perimeter(const Mesh& mesh);

// Fingerprint of the full geometry+topology, stable across runs.
std::uint64_t mesh_hash(const Mesh& mesh);

// Axis-aligned rectangle (0,a) x (0,b) with nx-by-ny cells, each split along
// a diagonal that alternates with cell parity so the mesh has no preferred
// direction. nx, ny >= 1.
Mesh generate_rectangle(double a, double b, int nx, int ny);

// Disk of given radius centered at the origin built from 2^refine_level
// concentric rings; ring i carries 8i nodes, so every refinement level is a
// valid stand-alone mesh (level 0 is an 8-triangle fan). The triangulated
// domain is the inscribed regular 8*2^refine_level-gon.
Mesh generate_disk(double radius, int refine_level);

// Applies x -> map(x) to every node. Throws DegenerateMapError if any image
// triangle has non-positive area.
Mesh map_mesh(const Mesh& mesh, const ParametricMap& map);

struct MeshReport {
  bool ok = true;
  std::vector<std::string> issues;
};

// Structural checks: positive areas, no duplicate nodes, every non-boundary
// edge shared by exactly two triangles, boundary loop closed, flags
// consistent with connectivity.
MeshReport validate_mesh(const Mesh& mesh);

// Quadrature layout of the boundary: Gauss-Legendre samples walked along the
// counterclockwise loop. Weights include the edge lengths, so sum(weights)
// equals the perimeter and sum(f(points) * weights) approximates the contour
// integral of f.
struct BoundaryTrace {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;    // outward unit normal at each sample
  VecX weights;
  VecX arclength;               // cumulative arclength coordinate per sample
  std::vector<int> edge_index;  // owning entry of mesh.boundary_edges
  std::vector<int> tri;         // triangle adjacent to the owning edge
  std::uint64_t source_hash = 0;

  int size() const { return static_cast<int>(points.size()); }
};

BoundaryTrace boundary_trace(const Mesh& mesh, int samples_per_edge = 3);

// Plain-text round-trip: 17-significant-digit node coordinates so that
// write(read(f)) reproduces f byte for byte.
void write_mesh(const std::string& path, const Mesh& mesh);
Mesh read_mesh(const std::string& path);

}  // namespace plateshape
