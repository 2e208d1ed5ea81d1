#include "texmetrics/topology.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace texmetrics {

namespace {

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

struct BitwiseVec3Hash {
    std::size_t operator()(const std::array<std::uint64_t, 3>& k) const
    {
        std::size_t h = 1469598103934665603ull;
        for (auto w : k)
            h = (h ^ w) * 1099511628211ull;
        return h;
    }
};

} // namespace

double bounding_box_diagonal(const TexturedMesh& mesh)
{
    if (mesh.positions.empty())
        return 0.0;
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi = -1.0 * lo;
    for (const auto& p : mesh.positions) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return length(hi - lo);
}

bool is_degenerate_face(const Face& f) { return f.v[0] == f.v[1] || f.v[1] == f.v[2] || f.v[0] == f.v[2]; }

double zero_area_threshold(const TexturedMesh& mesh)
{
    const double d = bounding_box_diagonal(mesh);
    return kZeroAreaEpsilon * d * d;
}

TopologyStats topology_stats(const TexturedMesh& mesh, const MeshAdjacency& adj)
{
    TopologyStats s;
    const auto nv = static_cast<std::uint32_t>(mesh.positions.size());
    s.vertex_count = nv;
    s.face_count = mesh.faces.size();

    std::vector<std::uint32_t> parent(nv);
    std::iota(parent.begin(), parent.end(), 0u);
    std::vector<bool> referenced(nv, false);
    bool has_degenerate = false;
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        for (auto v : face.v)
            referenced[v] = true;
        for (int k = 1; k < 3; ++k) {
            const auto a = find_root(parent, face.v[0]);
            const auto b = find_root(parent, face.v[k]);
            if (a != b)
                parent[std::max(a, b)] = std::min(a, b);
        }
        has_degenerate = has_degenerate || is_degenerate_face(face);
        s.surface_area_3d += triangle_area(mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2));
    }
    for (std::uint32_t v = 0; v < nv; ++v) {
        if (!referenced[v])
            continue;
        ++s.referenced_vertex_count;
        if (find_root(parent, v) == v)
            ++s.connected_components;
    }

    bool has_nonmanifold = false;
    // Directed boundary sides, outgoing from their start vertex.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> outgoing;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_sides;
    for (std::uint32_t e = 0; e < adj.edges.size(); ++e) {
        const auto& rec = adj.edges[e];
        if (rec.degenerate())
            continue;
        ++s.edge_count;
        if (rec.manifold_class == EdgeClass::nonmanifold)
            has_nonmanifold = true;
        if (rec.manifold_class != EdgeClass::boundary)
            continue;
        s.boundary_total_length += length(mesh.positions[rec.v1] - mesh.positions[rec.v0]);
        const auto c = adj.corners(e)[0];
        const auto& f = mesh.faces[c.face];
        const auto from = f.v[c.corner];
        const auto to = f.v[(c.corner + 1) % 3];
        outgoing[from].push_back(static_cast<std::uint32_t>(boundary_sides.size()));
        boundary_sides.emplace_back(from, to);
    }

    // Walk each loop along face orientation; a walk that dead-ends (inconsistent
    // orientation) still counts as one boundary component.
    std::vector<bool> used(boundary_sides.size(), false);
    auto take_next = [&](std::uint32_t vertex) -> std::int64_t {
        auto it = outgoing.find(vertex);
        if (it == outgoing.end())
            return -1;
        for (auto id : it->second)
            if (!used[id])
                return id;
        return -1;
    };
    for (std::uint32_t start = 0; start < boundary_sides.size(); ++start) {
        if (used[start])
            continue;
        ++s.boundary_loop_count;
        std::int64_t cur = start;
        while (cur >= 0) {
            used[cur] = true;
            if (boundary_sides[cur].second == boundary_sides[start].first)
                break;
            cur = take_next(boundary_sides[cur].second);
        }
    }

    s.euler_characteristic = static_cast<std::int64_t>(s.referenced_vertex_count) -
                             static_cast<std::int64_t>(s.edge_count) + static_cast<std::int64_t>(s.face_count);
    if (has_nonmanifold) {
        s.genus_null_reason = "genus_undefined: nonmanifold edges";
    } else if (has_degenerate) {
        s.genus_null_reason = "genus_undefined: degenerate faces";
    } else {
        const std::int64_t twice = 2 * static_cast<std::int64_t>(s.connected_components) - s.euler_characteristic -
                                   static_cast<std::int64_t>(s.boundary_loop_count);
        if (twice < 0 || twice % 2 != 0)
            s.genus_null_reason = "genus_undefined: inconsistent Euler characteristic";
        else
            s.genus = static_cast<std::uint64_t>(twice / 2);
    }
    return s;
}

bool vertex_link_is_disk(const TexturedMesh& mesh, const MeshAdjacency& adj, std::uint32_t v)
{
    // The link of v is a graph whose nodes are the other vertices of incident
    // faces and whose edges are the faces themselves. A disk link is a single
    // cycle, a half-disk link a single path.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> link;
    std::uint32_t prev = kNoIndex;
    for (auto f : adj.faces_of_vertex(v)) {
        if (f == prev)
            continue; // listed once per corner
        prev = f;
        const auto& face = mesh.faces[f];
        if (is_degenerate_face(face))
            continue;
        int k = 0;
        while (face.v[k] != v)
            ++k;
        link.emplace_back(face.v[(k + 1) % 3], face.v[(k + 2) % 3]);
    }
    if (link.empty())
        return true;

    std::vector<std::uint32_t> nodes;
    nodes.reserve(link.size() * 2);
    for (auto [a, b] : link) {
        nodes.push_back(a);
        nodes.push_back(b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    auto node_id = [&](std::uint32_t x) {
        return static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), x) - nodes.begin());
    };

    std::vector<std::uint32_t> degree(nodes.size(), 0);
    std::vector<std::uint32_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0u);
    std::size_t components = nodes.size();
    for (auto [a, b] : link) {
        const auto ia = node_id(a), ib = node_id(b);
        ++degree[ia];
        ++degree[ib];
        const auto ra = find_root(parent, ia), rb = find_root(parent, ib);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    if (components != 1)
        return false;
    if (std::any_of(degree.begin(), degree.end(), [](auto d) { return d > 2; }))
        return false;
    return link.size() == nodes.size() || link.size() + 1 == nodes.size();
}

DefectReport defect_scan(const TexturedMesh& mesh, const MeshAdjacency& adj)
{
    DefectReport r;
    const double area_eps = zero_area_threshold(mesh);
    std::vector<bool> referenced(mesh.positions.size(), false);
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        for (auto v : face.v)
            referenced[v] = true;
        if (triangle_area(mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2)) <= area_eps)
            ++r.zero_area_faces;
        if (is_degenerate_face(face))
            ++r.degenerate_faces;
        if (!face.mapped()) {
            ++r.unmapped_faces;
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            const auto t = mesh.uv(f, k);
            if (t.x < 0.0 || t.x > 1.0 || t.y < 0.0 || t.y > 1.0) {
                ++r.uv_out_of_range_faces;
                break;
            }
        }
    }
    r.unreferenced_vertices = static_cast<std::uint64_t>(std::count(referenced.begin(), referenced.end(), false));

    std::unordered_map<std::array<std::uint64_t, 3>, std::uint32_t, BitwiseVec3Hash> coords;
    coords.reserve(mesh.positions.size());
    for (const auto& p : mesh.positions)
        ++coords[{std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y), std::bit_cast<std::uint64_t>(p.z)}];
    for (const auto& [key, n] : coords)
        if (n > 1)
            r.duplicate_vertices += n;

    for (const auto& e : adj.edges)
        if (e.manifold_class == EdgeClass::nonmanifold && !e.degenerate())
            ++r.nonmanifold_edges;

    for (std::uint32_t v = 0; v < mesh.positions.size(); ++v)
        if (referenced[v] && !vertex_link_is_disk(mesh, adj, v))
            ++r.nonmanifold_vertices;
    return r;
}

} // namespace texmetrics
