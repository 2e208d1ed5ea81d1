#include "texmetrics/mesh_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace texmetrics {

namespace {

struct SideKey {
    std::uint64_t key;
    std::uint32_t face;
    std::uint8_t corner;
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

    std::uint32_t find(std::uint32_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // Keeps the smaller index as root so chart numbering follows face order.
    void unite(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::uint32_t> parent_;
};

} // namespace

std::uint32_t MeshAdjacency::neighbor(const std::uint32_t face, int side) const
{
    const auto& e = edges[face_edges[face][side]];
    if (e.manifold_class != EdgeClass::manifold || e.degenerate())
        return kNoIndex;
    const auto c = corners(face_edges[face][side]);
    return c[0].face == face ? c[1].face : c[0].face;
}

MeshAdjacency build_adjacency(const TexturedMesh& mesh)
{
    const auto nf = static_cast<std::uint32_t>(mesh.faces.size());
    std::vector<SideKey> sides;
    sides.reserve(std::size_t(nf) * 3);
    for (std::uint32_t f = 0; f < nf; ++f) {
        const auto& v = mesh.faces[f].v;
        for (std::uint8_t k = 0; k < 3; ++k)
            sides.push_back({edge_key(v[k], v[(k + 1) % 3]), f, k});
    }
    std::sort(sides.begin(), sides.end(), [](const SideKey& a, const SideKey& b) {
        if (a.key != b.key)
            return a.key < b.key;
        if (a.face != b.face)
            return a.face < b.face;
        return a.corner < b.corner;
    });

    MeshAdjacency adj;
    adj.face_edges.resize(nf);
    adj.edge_corners.reserve(sides.size());
    for (std::size_t i = 0; i < sides.size();) {
        std::size_t j = i;
        EdgeRecord rec;
        rec.v0 = static_cast<std::uint32_t>(sides[i].key >> 32);
        rec.v1 = static_cast<std::uint32_t>(sides[i].key & 0xffffffffu);
        rec.first_corner = static_cast<std::uint32_t>(adj.edge_corners.size());
        const auto id = static_cast<std::uint32_t>(adj.edges.size());
        for (; j < sides.size() && sides[j].key == sides[i].key; ++j) {
            adj.edge_corners.push_back({sides[j].face, sides[j].corner});
            adj.face_edges[sides[j].face][sides[j].corner] = id;
        }
        rec.corner_count = static_cast<std::uint32_t>(j - i);
        rec.manifold_class = rec.corner_count == 1   ? EdgeClass::boundary
                             : rec.corner_count == 2 ? EdgeClass::manifold
                                                     : EdgeClass::nonmanifold;
        adj.edges.push_back(rec);
        i = j;
    }

    const auto nv = mesh.positions.size();
    adj.vertex_face_offsets.assign(nv + 1, 0);
    for (const auto& f : mesh.faces)
        for (auto v : f.v)
            ++adj.vertex_face_offsets[v + 1];
    std::partial_sum(adj.vertex_face_offsets.begin(), adj.vertex_face_offsets.end(), adj.vertex_face_offsets.begin());
    adj.vertex_faces.resize(std::size_t(nf) * 3);
    std::vector<std::uint32_t> cursor(adj.vertex_face_offsets.begin(), adj.vertex_face_offsets.end() - 1);
    for (std::uint32_t f = 0; f < nf; ++f)
        for (auto v : mesh.faces[f].v)
            adj.vertex_faces[cursor[v]++] = f;
    return adj;
}

std::vector<std::uint32_t> classify_seams(const TexturedMesh& mesh, MeshAdjacency& adj)
{
    std::vector<std::uint32_t> seams;
    for (std::uint32_t e = 0; e < adj.edges.size(); ++e) {
        auto& rec = adj.edges[e];
        rec.is_seam = false;
        if (rec.manifold_class != EdgeClass::manifold || rec.degenerate())
            continue;
        const auto c = adj.corners(e);
        const auto& fa = mesh.faces[c[0].face];
        const auto& fb = mesh.faces[c[1].face];
        if (!fa.mapped() || !fb.mapped()) {
            rec.is_seam = fa.mapped() != fb.mapped();
        } else {
            const int a0 = c[0].corner;
            const int a1 = (a0 + 1) % 3;
            int b0 = c[1].corner;
            int b1 = (b0 + 1) % 3;
            if (fb.v[b0] != fa.v[a0])
                std::swap(b0, b1);
            const bool start_differs = length(mesh.texcoords[fa.t[a0]] - mesh.texcoords[fb.t[b0]]) > kUvTolerance;
            const bool end_differs = length(mesh.texcoords[fa.t[a1]] - mesh.texcoords[fb.t[b1]]) > kUvTolerance;
            rec.is_seam = start_differs || end_differs;
        }
        if (rec.is_seam)
            seams.push_back(e);
    }
    return seams;
}

bool is_chart_boundary_side(const TexturedMesh& mesh, const MeshAdjacency& adj, std::uint32_t face, int side)
{
    const auto& rec = adj.edges[adj.face_edges[face][side]];
    if (rec.manifold_class != EdgeClass::manifold || rec.degenerate() || rec.is_seam)
        return true;
    const auto other = adj.neighbor(face, side);
    const auto& a = mesh.faces[face];
    const auto& b = mesh.faces[other];
    return !a.mapped() || !b.mapped() || a.material != b.material;
}

ChartSet extract_charts(const TexturedMesh& mesh, const MeshAdjacency& adj)
{
    const auto nf = static_cast<std::uint32_t>(mesh.faces.size());
    DisjointSets sets(nf);
    for (std::uint32_t f = 0; f < nf; ++f) {
        if (!mesh.faces[f].mapped())
            continue;
        for (int k = 0; k < 3; ++k) {
            if (!is_chart_boundary_side(mesh, adj, f, k))
                sets.unite(f, adj.neighbor(f, k));
        }
    }

    ChartSet out;
    out.face_chart.assign(nf, kNoIndex);
    for (std::uint32_t f = 0; f < nf; ++f) {
        const auto& face = mesh.faces[f];
        if (!face.mapped())
            continue;
        const auto root = sets.find(f);
        if (out.face_chart[root] == kNoIndex) {
            out.face_chart[root] = static_cast<std::uint32_t>(out.charts.size());
            out.charts.push_back(Chart{{}, 0.0, 0.0, face.material});
        }
        const auto id = out.face_chart[root];
        out.face_chart[f] = id;
        auto& chart = out.charts[id];
        chart.face_ids.push_back(f);
        const Vec2 t0 = mesh.uv(f, 0), t1 = mesh.uv(f, 1), t2 = mesh.uv(f, 2);
        chart.uv_area += std::abs(signed_area(t0, t1, t2));
        for (int k = 0; k < 3; ++k) {
            if (is_chart_boundary_side(mesh, adj, f, k))
                chart.uv_perimeter += length(mesh.uv(f, (k + 1) % 3) - mesh.uv(f, k));
        }
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> TextureUnits::faces_by_unit() const
{
    std::vector<std::vector<std::uint32_t>> out(paths.size());
    for (std::uint32_t f = 0; f < face_unit.size(); ++f)
        if (face_unit[f] != kNoIndex)
            out[face_unit[f]].push_back(f);
    return out;
}

TextureUnits assign_texture_units(const TexturedMesh& mesh)
{
    TextureUnits units;
    std::vector<std::uint32_t> material_unit(mesh.materials.size(), kNoIndex);
    std::vector<bool> used(mesh.materials.size(), false);
    bool needs_untextured = false;
    for (const auto& f : mesh.faces) {
        if (!f.mapped())
            continue;
        if (f.has_material() && mesh.materials[f.material].diffuse_texture_path)
            used[f.material] = true;
        else
            needs_untextured = true;
    }
    for (std::uint32_t m = 0; m < mesh.materials.size(); ++m) {
        if (!used[m])
            continue;
        const auto& path = *mesh.materials[m].diffuse_texture_path;
        auto it = std::find(units.paths.begin(), units.paths.end(), path);
        if (it == units.paths.end()) {
            material_unit[m] = static_cast<std::uint32_t>(units.paths.size());
            units.paths.push_back(path);
            units.first_material.push_back(m);
        } else {
            material_unit[m] = static_cast<std::uint32_t>(it - units.paths.begin());
        }
    }
    if (needs_untextured) {
        units.untextured_unit = static_cast<std::uint32_t>(units.paths.size());
        units.paths.emplace_back();
        units.first_material.push_back(kNoIndex);
    }
    units.face_unit.assign(mesh.faces.size(), kNoIndex);
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        if (!face.mapped())
            continue;
        const auto unit = face.has_material() ? material_unit[face.material] : kNoIndex;
        units.face_unit[f] = unit != kNoIndex ? unit : units.untextured_unit;
    }
    return units;
}

} // namespace texmetrics
