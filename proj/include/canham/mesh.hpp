#pragma once

#include "canham/foundation.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace canham {

using Face = std::array<int, 3>;

template <class V>
struct TriMesh {
  std::vector<V> vertices;
  std::vector<Face> faces;
};

// Mesh on S^3 (R^4 coordinates) and mesh in R^3.
using SurfaceMesh = TriMesh<Vec4>;
using Mesh3 = TriMesh<Vec3>;

struct Topology {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t faces = 0;
  bool watertight = false;  // every edge shared by exactly two faces
  bool oriented = false;    // every directed edge used exactly once
  bool manifold_vertices = false;  // every vertex link is a single cycle
  int euler = 0;
  int genus = 0;  // (2 - euler) / 2 for a connected closed orientable mesh
};

Topology topology(const std::vector<Face>& faces, std::size_t vertex_count);

// Smallest angle between adjacent face planes measured through the surface
// (pi for a flat pair, 0 for a fully folded pair).
double min_dihedral_angle(const Mesh3& mesh);
// Smallest triangle area.
double min_face_area(const Mesh3& mesh);

// Merges vertices closer than tol (via a hash grid) and remaps faces; faces
// that collapse are dropped. remap (optional) receives old -> new indices.
template <class V>
TriMesh<V> weld(const TriMesh<V>& mesh, double tol, std::vector<int>* remap = nullptr);

// One-ring vertex neighbours (sorted, unique).
std::vector<std::vector<int>> vertex_neighbours(const std::vector<Face>& faces, std::size_t vertex_count);

}  // namespace canham
