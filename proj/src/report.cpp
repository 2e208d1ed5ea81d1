#include "texmetrics/report.hpp"

#include "texmetrics/mesh_model.hpp"
#include "texmetrics/seam_analysis.hpp"
#include "texmetrics/uv_analysis.hpp"

#include <charconv>
#include <sstream>

namespace texmetrics {

namespace {

constexpr std::size_t kMaxListedWarnings = 100;

template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string dims_text(TextureDims d) { return std::to_string(d.width) + "x" + std::to_string(d.height); }

void note_null(QualityReport& r, const std::string& field, const std::string& reason)
{
    r.null_reasons.emplace(field, reason);
}

} // namespace

std::optional<TextureDims> parse_texture_dims(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos)
        return std::nullopt;
    TextureDims d;
    auto parse = [](std::string_view s, std::uint32_t& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && p == s.data() + s.size() && out > 0;
    };
    const std::string_view sv = text;
    if (!parse(sv.substr(0, x), d.width) || !parse(sv.substr(x + 1), d.height))
        return std::nullopt;
    return d;
}

QualityReport analyze(const std::filesystem::path& model_path, const AnalysisOptions& options)
{
    ObjParseResult parsed;
    try {
        parsed = load_obj(model_path);
    } catch (const IoError& e) {
        throw AnalysisError(e.what());
    }
    auto base = model_path.parent_path();
    if (base.empty())
        base = ".";
    return analyze_mesh(std::move(parsed.mesh), std::move(parsed.warnings), base, options, model_path.string());
}

QualityReport analyze_mesh(TexturedMesh mesh, std::vector<ParseWarning> parse_warnings,
                           const std::filesystem::path& base_dir, const AnalysisOptions& options,
                           std::string model_label)
{
    if (mesh.faces.empty())
        throw AnalysisError("'" + model_label + "' contains no faces");

    QualityReport r;
    r.model_path = std::move(model_label);
    r.texture_dims_override = options.texture_dims;
    std::vector<std::string> warnings;
    for (const auto& w : parse_warnings)
        warnings.push_back(w.line ? "line " + std::to_string(w.line) + ": " + w.message : w.message);

    auto adj = build_adjacency(mesh);
    const auto seams = classify_seams(mesh, adj);
    const auto charts = extract_charts(mesh, adj);
    const auto units = assign_texture_units(mesh);

    r.mesh = topology_stats(mesh, adj);
    if (!r.mesh.genus)
        note_null(r, "mesh.genus", r.mesh.genus_null_reason);
    r.defects.counts = defect_scan(mesh, adj);

    // Textures: one entry per unit.
    const auto faces_by_unit = units.faces_by_unit();
    std::vector<std::optional<TextureImage>> images(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        TextureEntry entry;
        entry.path = units.paths[u];
        entry.face_count = faces_by_unit[u].size();
        if (options.texture_dims) {
            images[u] = load_texture({}, options.texture_dims);
        } else if (!entry.path.empty()) {
            try {
                images[u] = load_texture(base_dir / entry.path, std::nullopt);
            } catch (const IoError& e) {
                warnings.push_back(std::string("texture: ") + e.what());
            }
        } else {
            warnings.push_back("mapped faces without a diffuse texture; their texel measures need --texdims");
        }
        if (images[u]) {
            entry.dims = TextureDims{images[u]->width, images[u]->height};
            entry.has_pixels = images[u]->has_pixels();
        }
        r.textures.push_back(entry);
    }
    if (options.texture_dims && units.size() > 1)
        warnings.push_back("texture dimension override applied to all " + std::to_string(units.size()) + " textures");
    for (const auto& m : mesh.materials)
        for (const auto& [kind, path] : m.aux_textures)
            r.aux_textures.push_back({m.name, kind, path});

    std::uint64_t mapped = 0;
    for (const auto& f : mesh.faces)
        mapped += f.mapped();
    r.defects.mapped_face_fraction = static_cast<double>(mapped) / static_cast<double>(mesh.faces.size());

    const auto qcd = qc_distortion(mesh);
    r.defects.qcd_degenerate_3d_faces = qcd.degenerate_3d_faces;

    if (mapped == 0) {
        note_null(r, "atlas", "no_uv_mapping");
        note_null(r, "defects.flipped_face_count", "no_uv_mapping");
        note_null(r, "defects.cross_chart_overlap_texels", "no_uv_mapping");
        note_null(r, "defects.overlap_texel_fraction", "no_uv_mapping");
    } else {
        AtlasSection a;
        a.chart_count = charts.charts.size();
        a.mapped_face_count = mapped;
        for (const auto& c : charts.charts) {
            a.chart_area_total += c.uv_area;
            a.chart_perimeter_total += c.uv_perimeter;
        }

        // Grids are summarized and dropped one at a time.
        CoverageSummary coverage;
        std::size_t grids = 0;
        for (std::size_t u = 0; u < units.size(); ++u) {
            if (!images[u])
                continue;
            const auto grid = rasterize_coverage(mesh, charts, {images[u]->width, images[u]->height}, faces_by_unit[u]);
            coverage += summarize_coverage(grid);
            ++grids;
        }
        const auto flipped = count_flipped_faces(mesh, charts);
        r.defects.flipped_face_count = flipped;
        if (grids > 0) {
            a.occupancy = static_cast<double>(coverage.covered) / static_cast<double>(coverage.texels);
            const auto ov = overlap_stats(coverage, flipped);
            r.defects.cross_chart_overlap_texels = ov.cross_chart_overlap_texels;
            r.defects.overlap_texel_fraction = ov.overlap_texel_fraction;
            if (grids < units.size())
                warnings.push_back("occupancy covers only textures with known dimensions");
        } else {
            note_null(r, "atlas.occupancy", "no_texture_dimensions");
            note_null(r, "defects.cross_chart_overlap_texels", "no_texture_dimensions");
            note_null(r, "defects.overlap_texel_fraction", "no_texture_dimensions");
        }

        if (auto c = crumbliness(charts.charts)) {
            a.crumbliness = c->crumbliness;
            a.solidity = c->solidity;
        } else {
            note_null(r, "atlas.crumbliness", "degenerate_atlas");
            note_null(r, "atlas.solidity", "degenerate_atlas");
        }

        const auto sf = sampling_field(mesh);
        a.sampling = {sf.mean, sf.variance, sf.p1, sf.p50, sf.p99};
        if (!sf.variance) {
            const char* why = sf.valid_faces == 0 ? "no_valid_faces" : "zero_uv_area";
            for (const char* f : {"mean", "variance", "p1", "p50", "p99"})
                note_null(r, std::string("atlas.sampling.") + f, why);
        }

        a.qcd_mean = qcd.mean;
        a.qcd_evaluated_faces = qcd.evaluated_faces;
        if (!qcd.mean)
            note_null(r, "atlas.qcd_mean", "no_valid_faces");

        a.seam_edge_count = seams.size();
        const auto pairs = build_seam_pairs(mesh, adj, seams, units);
        const auto ds = mesh_discrepancy(pairs, images);
        a.seam_pair_count = pairs.size();
        a.seam_length_3d = ds.seam_total_length_3d;
        a.seam_length_uv = ds.seam_total_length_uv;
        a.seam_discrepancy = ds.aggregate;
        a.seam_discrepancy_evaluated_edges = ds.evaluated_edges;
        a.seam_degenerate_pairs = ds.degenerate_pairs;
        a.cross_texture_seam_edges = ds.cross_texture_edges;
        if (!ds.aggregate) {
            const bool any_pixels = std::any_of(images.begin(), images.end(),
                                                [](const auto& im) { return im && im->has_pixels(); });
            const char* why = pairs.empty()       ? "no_seam_edges"
                              : !any_pixels        ? "no_texture_pixels"
                              : ds.evaluated_edges ? "zero_seam_length"
                                                   : "no_evaluable_seam_edges";
            note_null(r, "atlas.seam_discrepancy", why);
        }
        r.atlas = a;
    }

    r.warning_count = warnings.size();
    if (warnings.size() > kMaxListedWarnings)
        warnings.resize(kMaxListedWarnings);
    r.warnings = std::move(warnings);
    return r;
}

nlohmann::ordered_json to_json(const QualityReport& r)
{
    using json = nlohmann::ordered_json;
    json j;
    j["schema"] = kReportSchema;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["model"] = {{"path", r.model_path}};

    const auto& m = r.mesh;
    j["mesh"] = {
        {"vertex_count", m.vertex_count},
        {"referenced_vertex_count", m.referenced_vertex_count},
        {"edge_count", m.edge_count},
        {"face_count", m.face_count},
        {"connected_components", m.connected_components},
        {"boundary_loops", m.boundary_loop_count},
        {"boundary_total_length", m.boundary_total_length},
        {"surface_area", m.surface_area_3d},
        {"euler_characteristic", m.euler_characteristic},
        {"genus", opt(m.genus)},
    };

    json units = json::array();
    std::uint64_t total_texels = 0;
    for (const auto& t : r.textures) {
        if (t.dims)
            total_texels += std::uint64_t(t.dims->width) * t.dims->height;
        units.push_back({
            {"path", t.path.empty() ? json(nullptr) : json(t.path)},
            {"width", t.dims ? json(t.dims->width) : json(nullptr)},
            {"height", t.dims ? json(t.dims->height) : json(nullptr)},
            {"has_pixels", t.has_pixels},
            {"face_count", t.face_count},
        });
    }
    json aux = json::array();
    for (const auto& a : r.aux_textures)
        aux.push_back({{"material", a.material}, {"kind", a.kind}, {"path", a.path}});
    j["textures"] = {
        {"count", r.textures.size()},
        {"total_texels", total_texels},
        {"units", units},
        {"auxiliary", aux},
    };

    if (r.atlas) {
        const auto& a = *r.atlas;
        j["atlas"] = {
            {"chart_count", a.chart_count},
            {"mapped_face_count", a.mapped_face_count},
            {"occupancy", opt(a.occupancy)},
            {"crumbliness", opt(a.crumbliness)},
            {"solidity", opt(a.solidity)},
            {"chart_area_total", a.chart_area_total},
            {"chart_perimeter_total", a.chart_perimeter_total},
            {"sampling",
             {{"mean", opt(a.sampling.mean)},
              {"variance", opt(a.sampling.variance)},
              {"p1", opt(a.sampling.p1)},
              {"p50", opt(a.sampling.p50)},
              {"p99", opt(a.sampling.p99)}}},
            {"qcd_mean", opt(a.qcd_mean)},
            {"qcd_evaluated_faces", a.qcd_evaluated_faces},
            {"seam_edge_count", a.seam_edge_count},
            {"seam_pair_count", a.seam_pair_count},
            {"seam_length_3d", a.seam_length_3d},
            {"seam_length_uv", a.seam_length_uv},
            {"seam_discrepancy", opt(a.seam_discrepancy)},
            {"seam_discrepancy_evaluated_edges", a.seam_discrepancy_evaluated_edges},
            {"seam_degenerate_pairs", a.seam_degenerate_pairs},
            {"cross_texture_seam_edges", a.cross_texture_seam_edges},
        };
    } else {
        j["atlas"] = nullptr;
    }

    const auto& d = r.defects;
    j["defects"] = {
        {"zero_area_faces", d.counts.zero_area_faces},
        {"degenerate_faces", d.counts.degenerate_faces},
        {"duplicate_vertices", d.counts.duplicate_vertices},
        {"unreferenced_vertices", d.counts.unreferenced_vertices},
        {"nonmanifold_edges", d.counts.nonmanifold_edges},
        {"nonmanifold_vertices", d.counts.nonmanifold_vertices},
        {"unmapped_faces", d.counts.unmapped_faces},
        {"uv_out_of_range_faces", d.counts.uv_out_of_range_faces},
        {"qcd_degenerate_3d_faces", d.qcd_degenerate_3d_faces},
        {"flipped_face_count", opt(d.flipped_face_count)},
        {"cross_chart_overlap_texels", opt(d.cross_chart_overlap_texels)},
        {"overlap_texel_fraction", opt(d.overlap_texel_fraction)},
        {"mapped_face_fraction", d.mapped_face_fraction},
    };

    json reasons = json::object();
    for (const auto& [k, v] : r.null_reasons)
        reasons[k] = v;
    j["meta"] = {
        {"options",
         {{"texdims", r.texture_dims_override ? json(dims_text(*r.texture_dims_override)) : json(nullptr)}}},
        {"conventions",
         {{"aggregate_weighting", "3d_area"},
          {"percentiles", "lower_weighted_quantile"},
          {"seam_color_distance", "euclidean_rgb_unit_range"},
          {"seam_sampling", "midpoint_rule_texel_length"},
          {"coverage_rule", "texel_center_top_left"},
          {"uv_tolerance", kUvTolerance},
          {"zero_area_epsilon", kZeroAreaEpsilon}}},
        {"null_reasons", reasons},
        {"warning_count", r.warning_count},
        {"warnings", r.warnings},
    };
    return j;
}

std::string report_text(const QualityReport& report) { return to_json(report).dump(2) + "\n"; }

std::string summary_text(const QualityReport& r)
{
    std::ostringstream out;
    auto num = [](const std::optional<double>& v) {
        if (!v)
            return std::string("n/a");
        std::ostringstream s;
        s.precision(6);
        s << *v;
        return s.str();
    };
    out << "model        " << r.model_path << '\n';
    out << "vertices     " << r.mesh.vertex_count << "\n";
    out << "faces        " << r.mesh.face_count << "\n";
    out << "components   " << r.mesh.connected_components << "\n";
    out << "boundaries   " << r.mesh.boundary_loop_count << "\n";
    out << "genus        " << (r.mesh.genus ? std::to_string(*r.mesh.genus) : std::string("n/a")) << "\n";
    out << "textures     " << r.textures.size() << "\n";
    if (r.atlas) {
        const auto& a = *r.atlas;
        out << "charts       " << a.chart_count << "\n";
        out << "occupancy    " << num(a.occupancy) << "\n";
        out << "solidity     " << num(a.solidity) << "\n";
        out << "qcd_mean     " << num(a.qcd_mean) << "\n";
        out << "sf_variance  " << num(a.sampling.variance) << "\n";
        out << "seam_disc    " << num(a.seam_discrepancy) << "\n";
    } else {
        out << "atlas        n/a (no UV mapping)\n";
    }
    const auto& c = r.defects.counts;
    const auto defect_total = c.zero_area_faces + c.degenerate_faces + c.duplicate_vertices + c.unreferenced_vertices +
                              c.nonmanifold_edges + c.nonmanifold_vertices + c.unmapped_faces + c.uv_out_of_range_faces;
    out << "defects      " << defect_total << " (nonmanifold edges " << c.nonmanifold_edges << ", degenerate faces "
        << c.degenerate_faces << ", unmapped faces " << c.unmapped_faces << ")\n";
    if (r.defects.flipped_face_count)
        out << "flipped      " << *r.defects.flipped_face_count << "\n";
    if (r.warning_count)
        out << "warnings     " << r.warning_count << "\n";
    return out.str();
}

} // namespace texmetrics
