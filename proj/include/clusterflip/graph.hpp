#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clusterflip/rng.hpp"

namespace clusterflip {

using Vertex = std::uint32_t;

// One bit per edge, indexed consistently with Graph::edges. Uses uint8_t
// rather than vector<bool> so that spans and raw loops stay simple.
using BondConfig = std::vector<std::uint8_t>;

// Finite simple graph with a distinguished boundary vertex set. Vertices
// are dense integer indices and edges carry a stable index so bond
// configurations are reproducible across runs.
class Graph {
  public:
    struct AdjEntry {
        Vertex neighbor;
        std::uint32_t edge;
    };

    Graph() = default;

    Graph(std::uint32_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edge_list,
          std::vector<Vertex> boundary_list)
        : n_(vertex_count), edges_(std::move(edge_list)), boundary_(std::move(boundary_list)) {
        std::set<std::pair<Vertex, Vertex>> seen;
        for (auto& [u, v] : edges_) {
            if (u == v) throw std::invalid_argument("graph: self-loop on vertex " + std::to_string(u));
            if (u >= n_ || v >= n_) throw std::invalid_argument("graph: edge endpoint out of range");
            if (u > v) std::swap(u, v);
            if (!seen.insert({u, v}).second)
                throw std::invalid_argument("graph: duplicate edge {" + std::to_string(u) + "," +
                                            std::to_string(v) + "}");
        }
        std::sort(boundary_.begin(), boundary_.end());
        boundary_.erase(std::unique(boundary_.begin(), boundary_.end()), boundary_.end());
        for (Vertex b : boundary_) {
            if (b >= n_) throw std::invalid_argument("graph: boundary vertex out of range");
        }
        is_boundary_.assign(n_, 0);
        for (Vertex b : boundary_) is_boundary_[b] = 1;
        build_adjacency();
    }

    std::uint32_t vertex_count() const { return n_; }
    std::uint32_t edge_count() const { return static_cast<std::uint32_t>(edges_.size()); }
    const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
    std::pair<Vertex, Vertex> edge(std::uint32_t e) const { return edges_[e]; }
    const std::vector<Vertex>& boundary() const { return boundary_; }
    bool in_boundary(Vertex v) const { return is_boundary_[v] != 0; }

    std::span<const AdjEntry> neighbors(Vertex v) const {
        return {adj_.data() + adj_off_[v], adj_off_[v + 1] - adj_off_[v]};
    }
    std::uint32_t degree(Vertex v) const { return adj_off_[v + 1] - adj_off_[v]; }

    std::uint32_t max_degree() const {
        std::uint32_t d = 0;
        for (Vertex v = 0; v < n_; ++v) d = std::max(d, degree(v));
        return d;
    }

  private:
    void build_adjacency() {
        adj_off_.assign(n_ + 1, 0);
        for (const auto& [u, v] : edges_) {
            ++adj_off_[u + 1];
            ++adj_off_[v + 1];
        }
        for (Vertex v = 0; v < n_; ++v) adj_off_[v + 1] += adj_off_[v];
        adj_.resize(2 * edges_.size());
        std::vector<std::uint32_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
        for (std::uint32_t e = 0; e < edges_.size(); ++e) {
            const auto [u, v] = edges_[e];
            adj_[cursor[u]++] = {v, e};
            adj_[cursor[v]++] = {u, e};
        }
    }

    std::uint32_t n_ = 0;
    std::vector<std::pair<Vertex, Vertex>> edges_;
    std::vector<Vertex> boundary_;
    std::vector<std::uint8_t> is_boundary_;
    std::vector<AdjEntry> adj_;
    std::vector<std::uint32_t> adj_off_{0};
};

inline Graph build_graph(std::uint32_t vertex_count,
                         std::vector<std::pair<Vertex, Vertex>> edges,
                         std::vector<Vertex> boundary = {}) {
    return Graph(vertex_count, std::move(edges), std::move(boundary));
}

// --- Built-in generators -------------------------------------------------

inline Graph path_graph(std::uint32_t n, std::vector<Vertex> boundary = {0}) {
    if (n == 0) throw std::invalid_argument("path_graph: need at least one vertex");
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    return Graph(n, std::move(edges), std::move(boundary));
}

inline Graph cycle_graph(std::uint32_t n, std::vector<Vertex> boundary = {}) {
    if (n < 3) throw std::invalid_argument("cycle_graph: need at least three vertices");
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
    return Graph(n, std::move(edges), std::move(boundary));
}

enum class GridBoundary { none, frame };

inline Graph grid_graph(std::uint32_t width, std::uint32_t height,
                        GridBoundary mode = GridBoundary::frame) {
    if (width == 0 || height == 0) throw std::invalid_argument("grid_graph: empty grid");
    auto id = [width](std::uint32_t x, std::uint32_t y) { return y * width + x; };
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            if (x + 1 < width) edges.push_back({id(x, y), id(x + 1, y)});
            if (y + 1 < height) edges.push_back({id(x, y), id(x, y + 1)});
        }
    }
    std::vector<Vertex> boundary;
    if (mode == GridBoundary::frame) {
        for (std::uint32_t y = 0; y < height; ++y) {
            for (std::uint32_t x = 0; x < width; ++x) {
                if (x == 0 || y == 0 || x + 1 == width || y + 1 == height)
                    boundary.push_back(id(x, y));
            }
        }
    }
    return Graph(width * height, std::move(edges), std::move(boundary));
}

inline Graph complete_graph(std::uint32_t n, std::vector<Vertex> boundary = {}) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    return Graph(n, std::move(edges), std::move(boundary));
}

// Uniform attachment tree: vertex i connects to a uniformly random earlier
// vertex. Deterministic for a fixed seed.
inline Graph random_tree(std::uint32_t n, std::uint64_t seed, std::vector<Vertex> boundary = {0}) {
    if (n == 0) throw std::invalid_argument("random_tree: need at least one vertex");
    Rng rng = make_rng(seed);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 1; v < n; ++v) {
        edges.push_back({static_cast<Vertex>(rindex(rng, v)), v});
    }
    return Graph(n, std::move(edges), std::move(boundary));
}

// Edge-list text format: first line `n_vertices`, then one `u v` pair per
// line, then a final line `boundary: i j k ...` (indices optional).
inline Graph load_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("edge list: empty input");
    std::uint32_t n = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n)) throw std::invalid_argument("edge list: bad vertex count line");
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<Vertex> boundary;
    bool saw_boundary = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("boundary:", 0) == 0) {
            std::istringstream ss(line.substr(9));
            Vertex b;
            while (ss >> b) boundary.push_back(b);
            saw_boundary = true;
            break;
        }
        std::istringstream ss(line);
        Vertex u, v;
        if (!(ss >> u >> v)) throw std::invalid_argument("edge list: bad edge line: " + line);
        edges.push_back({u, v});
    }
    if (!saw_boundary) throw std::invalid_argument("edge list: missing boundary line");
    return Graph(n, std::move(edges), std::move(boundary));
}

inline Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("edge list: cannot open " + path);
    return load_edge_list(in);
}

// Identify all boundary vertices into a single vertex (index 0 in the new
// graph), erasing self-loops and keeping one representative per multi-edge.
// Non-boundary vertices keep their relative order at indices 1..
inline Graph contract_boundary(const Graph& g) {
    if (g.boundary().empty())
        throw std::invalid_argument("contract_boundary: boundary is empty");
    std::vector<Vertex> remap(g.vertex_count());
    Vertex next = 1;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        remap[v] = g.in_boundary(v) ? 0 : next++;
    }
    std::set<std::pair<Vertex, Vertex>> dedup;
    for (const auto& [u, v] : g.edges()) {
        Vertex a = remap[u], b = remap[v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        dedup.insert({a, b});
    }
    return Graph(next, {dedup.begin(), dedup.end()}, {0});
}

// --- Connectivity ---------------------------------------------------------

// Union-find with path compression and union by size. Rebuilt per bond
// configuration; the coupling regenerates bonds every step.
class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::uint32_t up = parent_[x];
            parent_[x] = root;
            x = up;
        }
        return root;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

struct Partition {
    std::vector<std::uint32_t> component_id;  // per vertex, contiguous 0..count-1
    std::uint32_t component_count = 0;
};

inline UnionFind bond_union_find(const Graph& g, const BondConfig& bonds) {
    if (bonds.size() != g.edge_count())
        throw std::invalid_argument("bond config size does not match edge count");
    UnionFind uf(g.vertex_count());
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        if (bonds[e]) {
            const auto [u, v] = g.edge(e);
            uf.unite(u, v);
        }
    }
    return uf;
}

inline Partition connected_components(const Graph& g, const BondConfig& bonds) {
    UnionFind uf = bond_union_find(g, bonds);
    Partition p;
    p.component_id.assign(g.vertex_count(), UINT32_MAX);
    std::vector<std::uint32_t> label(g.vertex_count(), UINT32_MAX);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const std::uint32_t root = uf.find(v);
        if (label[root] == UINT32_MAX) label[root] = p.component_count++;
        p.component_id[v] = label[root];
    }
    return p;
}

inline bool reaches_boundary(const Graph& g, const BondConfig& bonds, Vertex v) {
    if (v >= g.vertex_count()) throw std::invalid_argument("reaches_boundary: bad vertex");
    UnionFind uf = bond_union_find(g, bonds);
    const std::uint32_t root = uf.find(v);
    for (Vertex b : g.boundary()) {
        if (uf.find(b) == root) return true;
    }
    return false;
}

inline std::uint32_t edge_index(const Graph& g, Vertex u, Vertex v) {
    if (u < g.vertex_count()) {
        for (const auto& [w, e] : g.neighbors(u)) {
            if (w == v) return e;
        }
    }
    throw std::invalid_argument("edge_index: no edge {" + std::to_string(u) + "," +
                                std::to_string(v) + "}");
}

enum class LevelMode { below, above };

// True iff some path from the boundary set to `target` has every vertex,
// endpoints included, with height < m (below) or > m (above).
inline bool level_connected(const Graph& g, std::span<const double> heights, double m,
                            LevelMode mode, Vertex target) {
    if (heights.size() != g.vertex_count())
        throw std::invalid_argument("level_connected: height count mismatch");
    if (target >= g.vertex_count()) throw std::invalid_argument("level_connected: bad vertex");
    auto admissible = [&](Vertex v) {
        return mode == LevelMode::below ? heights[v] < m : heights[v] > m;
    };
    if (!admissible(target)) return false;
    std::vector<std::uint8_t> visited(g.vertex_count(), 0);
    std::vector<Vertex> stack;
    for (Vertex b : g.boundary()) {
        if (admissible(b) && !visited[b]) {
            if (b == target) return true;
            visited[b] = 1;
            stack.push_back(b);
        }
    }
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const auto& [w, e] : g.neighbors(v)) {
            (void)e;
            if (!visited[w] && admissible(w)) {
                if (w == target) return true;
                visited[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

}  // namespace clusterflip
