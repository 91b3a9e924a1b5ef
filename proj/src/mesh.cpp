#include "canham/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace canham {

namespace {

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

Topology topology(const std::vector<Face>& faces, std::size_t vertex_count) {
  Topology t;
  t.vertices = vertex_count;
  t.faces = faces.size();
  std::map<Edge, int> undirected_count;
  std::map<Edge, int> directed_count;
  std::vector<std::vector<Edge>> link(vertex_count);
  for (const Face& f : faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
      if (a < 0 || static_cast<std::size_t>(a) >= vertex_count) throw std::out_of_range("mesh: face index out of range");
      ++undirected_count[undirected(a, b)];
      ++directed_count[{a, b}];
      link[a].push_back({b, c});
    }
  }
  t.edges = undirected_count.size();
  t.watertight = std::all_of(undirected_count.begin(), undirected_count.end(), [](const auto& e) { return e.second == 2; });
  t.oriented = t.watertight &&
               std::all_of(directed_count.begin(), directed_count.end(), [](const auto& e) { return e.second == 1; });
  // The link of a vertex (edges b -> c opposite to it) must form one cycle.
  t.manifold_vertices = true;
  for (std::size_t v = 0; v < vertex_count && t.manifold_vertices; ++v) {
    const auto& l = link[v];
    if (l.empty()) {
      t.manifold_vertices = false;
      break;
    }
    std::unordered_map<int, int> next;
    for (const auto& [b, c] : l) next[b] = c;
    if (next.size() != l.size()) {
      t.manifold_vertices = false;
      break;
    }
    int cur = l.front().first;
    std::size_t steps = 0;
    do {
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
      ++steps;
    } while (cur != l.front().first && steps <= l.size());
    t.manifold_vertices = cur == l.front().first && steps == l.size();
  }
  t.euler = static_cast<int>(t.vertices) - static_cast<int>(t.edges) + static_cast<int>(t.faces);
  t.genus = (2 - t.euler) / 2;
  return t;
}

double min_dihedral_angle(const Mesh3& mesh) {
  std::map<Edge, std::vector<int>> edge_faces;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i)
    for (int k = 0; k < 3; ++k)
      edge_faces[undirected(mesh.faces[i][k], mesh.faces[i][(k + 1) % 3])].push_back(static_cast<int>(i));
  auto normal = [&](int f) {
    const Face& F = mesh.faces[f];
    return (mesh.vertices[F[1]] - mesh.vertices[F[0]]).cross(mesh.vertices[F[2]] - mesh.vertices[F[0]]).normalized();
  };
  double best = std::numbers::pi;
  for (const auto& [e, fs] : edge_faces) {
    if (fs.size() != 2) continue;
    const double c = std::clamp(normal(fs[0]).dot(normal(fs[1])), -1.0, 1.0);
    best = std::min(best, std::numbers::pi - std::acos(c));
  }
  return best;
}

double min_face_area(const Mesh3& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (const Face& F : mesh.faces)
    best = std::min(best, 0.5 * (mesh.vertices[F[1]] - mesh.vertices[F[0]])
                                    .cross(mesh.vertices[F[2]] - mesh.vertices[F[0]])
                                    .norm());
  return best;
}

template <class V>
TriMesh<V> weld(const TriMesh<V>& mesh, double tol, std::vector<int>* remap_out) {
  using Key = std::array<long long, V::RowsAtCompileTime>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (long long x : k) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<Key, std::vector<int>, KeyHash> grid;
  TriMesh<V> out;
  std::vector<int> remap(mesh.vertices.size());
  auto key_of = [&](const V& v) {
    Key k;
    for (int i = 0; i < V::RowsAtCompileTime; ++i) k[i] = static_cast<long long>(std::floor(v[i] / tol));
    return k;
  };
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const V& v = mesh.vertices[i];
    const Key base = key_of(v);
    int found = -1;
    // Search the neighbouring cells (3^dim) for a vertex within tol.
    const int dim = V::RowsAtCompileTime;
    int total = 1;
    for (int d = 0; d < dim; ++d) total *= 3;
    for (int code = 0; code < total && found < 0; ++code) {
      Key k = base;
      int c = code;
      for (int d = 0; d < dim; ++d) {
        k[d] += c % 3 - 1;
        c /= 3;
      }
      auto it = grid.find(k);
      if (it == grid.end()) continue;
      for (int j : it->second)
        if ((out.vertices[j] - v).norm() <= tol) {
          found = j;
          break;
        }
    }
    if (found < 0) {
      found = static_cast<int>(out.vertices.size());
      out.vertices.push_back(v);
      grid[base].push_back(found);
    }
    remap[i] = found;
  }
  for (const Face& f : mesh.faces) {
    const Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;  // collapsed
    out.faces.push_back(g);
  }
  if (remap_out) *remap_out = std::move(remap);
  return out;
}

template TriMesh<Vec3> weld(const TriMesh<Vec3>&, double, std::vector<int>*);
template TriMesh<Vec4> weld(const TriMesh<Vec4>&, double, std::vector<int>*);

std::vector<std::vector<int>> vertex_neighbours(const std::vector<Face>& faces, std::size_t vertex_count) {
  std::vector<std::vector<int>> nb(vertex_count);
  for (const Face& f : faces)
    for (int k = 0; k < 3; ++k) {
      nb[f[k]].push_back(f[(k + 1) % 3]);
      nb[f[k]].push_back(f[(k + 2) % 3]);
    }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nb;
}

}  // namespace canham
