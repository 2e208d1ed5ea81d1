#include "texmetrics/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

namespace texmetrics {

namespace {

bool is_obj(const std::filesystem::path& p)
{
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".obj";
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw AnalysisError("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw AnalysisError("write failed for '" + path.string() + "'");
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

// Same shortest round-trip text the JSON report uses.
std::string number_text(double v) { return nlohmann::json(v).dump(); }

template <class T>
std::string cell(const std::optional<T>& v)
{
    if (!v)
        return {};
    if constexpr (std::is_floating_point_v<T>)
        return number_text(*v);
    else
        return std::to_string(*v);
}

template <class T>
std::string cell(const T& v)
{
    if constexpr (std::is_floating_point_v<T>)
        return number_text(v);
    else
        return std::to_string(v);
}

struct Metric {
    const char* name;
    std::function<std::optional<double>(const QualityReport&)> value;
};

std::optional<double> atlas_value(const QualityReport& r, std::optional<double> AtlasSection::*field)
{
    if (!r.atlas)
        return std::nullopt;
    return (*r.atlas).*field;
}

} // namespace

Histogram make_histogram(std::string metric, const std::vector<std::optional<double>>& values, std::size_t bins,
                         double lo, double hi)
{
    Histogram h;
    h.metric = std::move(metric);
    bins = std::max<std::size_t>(bins, 1);
    if (!(hi > lo))
        hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i)
        h.bins.push_back({lo + width * static_cast<double>(i), i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1), 0});
    for (const auto& v : values) {
        if (!v) {
            ++h.null_count;
            continue;
        }
        const double pos = std::floor((*v - lo) / width);
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        ++h.bins[idx].count;
    }
    return h;
}

std::vector<ModelInput> discover_models(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir))
        entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());

    std::vector<ModelInput> models;
    for (const auto& p : entries) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> objs;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && is_obj(e.path()))
                    objs.push_back(e.path());
            if (objs.empty())
                continue;
            std::sort(objs.begin(), objs.end());
            models.push_back({p.filename().string(), objs.front(), p / kReportFileName});
        } else if (fs::is_regular_file(p) && is_obj(p)) {
            models.push_back({p.filename().string(), p, dir / (p.stem().string() + "." + kReportFileName)});
        }
    }
    return models;
}

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> columns = {
        "model",
        "vertices",
        "faces",
        "edges",
        "components",
        "boundary_loops",
        "boundary_length",
        "genus",
        "surface_area",
        "textures",
        "total_texels",
        "charts",
        "occupancy",
        "crumbliness",
        "solidity",
        "sf_variance",
        "sf_p1",
        "sf_p50",
        "sf_p99",
        "qcd_mean",
        "seam_edges",
        "seam_length_3d",
        "seam_discrepancy",
        "zero_area_faces",
        "degenerate_faces",
        "duplicate_vertices",
        "unreferenced_vertices",
        "nonmanifold_edges",
        "nonmanifold_vertices",
        "unmapped_faces",
        "uv_out_of_range_faces",
        "flipped_faces",
        "cross_chart_overlap_texels",
        "overlap_texel_fraction",
        "mapped_face_fraction",
        "warnings",
    };
    return columns;
}

std::string csv_row(const BatchRow& row)
{
    const auto& r = row.report;
    const auto& m = r.mesh;
    const auto& d = r.defects;
    std::uint64_t texels = 0;
    for (const auto& t : r.textures)
        if (t.dims)
            texels += std::uint64_t(t.dims->width) * t.dims->height;
    const AtlasSection empty_atlas;
    const auto& a = r.atlas ? *r.atlas : empty_atlas;
    auto atlas_count = [&](std::uint64_t v) { return r.atlas ? std::to_string(v) : std::string(); };

    const std::vector<std::string> cells = {
        csv_escape(row.model),
        cell(m.vertex_count),
        cell(m.face_count),
        cell(m.edge_count),
        cell(m.connected_components),
        cell(m.boundary_loop_count),
        cell(m.boundary_total_length),
        cell(m.genus),
        cell(m.surface_area_3d),
        cell(r.textures.size()),
        cell(texels),
        atlas_count(a.chart_count),
        cell(a.occupancy),
        cell(a.crumbliness),
        cell(a.solidity),
        cell(a.sampling.variance),
        cell(a.sampling.p1),
        cell(a.sampling.p50),
        cell(a.sampling.p99),
        cell(a.qcd_mean),
        atlas_count(a.seam_edge_count),
        r.atlas ? cell(a.seam_length_3d) : std::string(),
        cell(a.seam_discrepancy),
        cell(d.counts.zero_area_faces),
        cell(d.counts.degenerate_faces),
        cell(d.counts.duplicate_vertices),
        cell(d.counts.unreferenced_vertices),
        cell(d.counts.nonmanifold_edges),
        cell(d.counts.nonmanifold_vertices),
        cell(d.counts.unmapped_faces),
        cell(d.counts.uv_out_of_range_faces),
        cell(d.flipped_face_count),
        cell(d.cross_chart_overlap_texels),
        cell(d.overlap_texel_fraction),
        cell(d.mapped_face_fraction),
        cell(r.warning_count),
    };
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            line += ',';
        line += cells[i];
    }
    return line;
}

BatchSummary run_batch(const std::filesystem::path& dir, const BatchOptions& options)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw AnalysisError("'" + dir.string() + "' is not a directory");
    const auto models = discover_models(dir);
    if (models.empty())
        throw AnalysisError("no models found in '" + dir.string() + "'");

    struct Outcome {
        std::optional<QualityReport> report;
        std::string error;
    };
    std::vector<Outcome> outcomes(models.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < models.size(); i = next++) {
            try {
                auto report = analyze(models[i].obj_path, options.analysis);
                write_file(models[i].report_path, report_text(report));
                outcomes[i].report = std::move(report);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    const auto jobs = std::clamp<std::size_t>(options.jobs, 1, models.size());
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
    }

    BatchSummary summary;
    summary.model_count = models.size();
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (outcomes[i].report)
            summary.rows.push_back({models[i].name, models[i].report_path, std::move(*outcomes[i].report)});
        else
            summary.failures.push_back({models[i].name, outcomes[i].error});
    }

    summary.csv_path = options.csv_path.value_or(dir / "texmetrics.csv");
    const auto out_dir = summary.csv_path.has_parent_path() ? summary.csv_path.parent_path() : fs::path(".");
    fs::create_directories(out_dir, ec);

    std::string csv;
    for (std::size_t i = 0; i < csv_columns().size(); ++i)
        csv += (i ? "," : "") + csv_columns()[i];
    csv += "\r\n";
    for (const auto& row : summary.rows)
        csv += csv_row(row) + "\r\n";
    write_file(summary.csv_path, csv);

    const std::vector<Metric> metrics = {
        {"occupancy", [](const QualityReport& r) { return atlas_value(r, &AtlasSection::occupancy); }},
        {"solidity", [](const QualityReport& r) { return atlas_value(r, &AtlasSection::solidity); }},
        {"qcd_mean", [](const QualityReport& r) { return atlas_value(r, &AtlasSection::qcd_mean); }},
        {"seam_discrepancy", [](const QualityReport& r) { return atlas_value(r, &AtlasSection::seam_discrepancy); }},
        {"vertex_count", [](const QualityReport& r) { return std::optional<double>(double(r.mesh.vertex_count)); }},
    };
    for (const auto& metric : metrics) {
        std::vector<std::optional<double>> values;
        for (const auto& row : summary.rows)
            values.push_back(metric.value(row.report));
        double lo = 0.0, hi = 1.0;
        if (std::string_view(metric.name) == "seam_discrepancy") {
            hi = std::sqrt(3.0); // largest RGB distance on unit channels
        } else if (std::string_view(metric.name) == "vertex_count") {
            hi = 0.0;
            for (const auto& v : values)
                hi = std::max(hi, v.value_or(0.0));
        }
        auto h = make_histogram(metric.name, values, options.bins, lo, hi);
        std::string tsv = "bin_left\tbin_right\tcount\n";
        for (const auto& b : h.bins)
            tsv += number_text(b.left) + "\t" + number_text(b.right) + "\t" + std::to_string(b.count) + "\n";
        const auto path = out_dir / ("histogram_" + h.metric + ".tsv");
        write_file(path, tsv);
        summary.histogram_paths.push_back(path);
        summary.histograms.push_back(std::move(h));
    }

    nlohmann::ordered_json j;
    j["schema"] = "texmetrics.batch/1";
    j["model_count"] = summary.model_count;
    j["report_count"] = summary.rows.size();
    auto& reports = j["reports"] = nlohmann::ordered_json::array();
    for (const auto& row : summary.rows)
        reports.push_back({{"model", row.model}, {"report", row.report_path.string()}});
    auto& failures = j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : summary.failures)
        failures.push_back({{"model", f.model}, {"error", f.error}});
    auto& hist = j["histograms"] = nlohmann::ordered_json::object();
    for (const auto& h : summary.histograms) {
        auto bins = nlohmann::ordered_json::array();
        for (const auto& b : h.bins)
            bins.push_back({b.left, b.right, b.count});
        hist[h.metric] = {{"bins", bins}, {"null_count", h.null_count}};
    }
    write_file(out_dir / "batch_summary.json", j.dump(2) + "\n");
    return summary;
}

} // namespace texmetrics
