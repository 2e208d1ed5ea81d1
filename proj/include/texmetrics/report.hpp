#pragma once

// Full-model analysis, the JSON quality report, and batch aggregation.

#include "texmetrics/mesh_io.hpp"
#include "texmetrics/topology.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace texmetrics {

inline constexpr const char* kToolName = "texmetrics";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "texmetrics.report/1";
inline constexpr const char* kReportFileName = "texmetro.json";

/// Thrown when a model cannot be analyzed at all (unreadable or empty OBJ).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnalysisOptions {
    std::optional<TextureDims> texture_dims; // replaces every texture, no decode
};

struct TextureEntry {
    std::string path; // as referenced by map_Kd; empty for the untextured unit
    std::optional<TextureDims> dims;
    bool has_pixels = false;
    std::uint64_t face_count = 0;
};

struct AuxTextureEntry {
    std::string material;
    std::string kind;
    std::string path;
};

struct SamplingSummary {
    std::optional<double> mean;
    std::optional<double> variance;
    std::optional<double> p1;
    std::optional<double> p50;
    std::optional<double> p99;
};

struct AtlasSection {
    std::uint64_t chart_count = 0;
    std::uint64_t mapped_face_count = 0;
    std::optional<double> occupancy;
    std::optional<double> crumbliness;
    std::optional<double> solidity;
    double chart_area_total = 0.0;
    double chart_perimeter_total = 0.0;
    SamplingSummary sampling;
    std::optional<double> qcd_mean;
    std::uint64_t qcd_evaluated_faces = 0;
    std::uint64_t seam_edge_count = 0;
    std::uint64_t seam_pair_count = 0; // seams with both sides mapped
    double seam_length_3d = 0.0;
    double seam_length_uv = 0.0;
    std::optional<double> seam_discrepancy;
    std::uint64_t seam_discrepancy_evaluated_edges = 0;
    std::uint64_t seam_degenerate_pairs = 0;
    std::uint64_t cross_texture_seam_edges = 0;
};

struct DefectSection {
    DefectReport counts;
    std::uint64_t qcd_degenerate_3d_faces = 0;
    std::optional<std::uint64_t> flipped_face_count;
    std::optional<std::uint64_t> cross_chart_overlap_texels;
    std::optional<double> overlap_texel_fraction;
    double mapped_face_fraction = 0.0;
};

struct QualityReport {
    std::string model_path;
    TopologyStats mesh;
    std::vector<TextureEntry> textures;
    std::vector<AuxTextureEntry> aux_textures;
    std::optional<AtlasSection> atlas; // empty when no face is UV-mapped
    DefectSection defects;
    std::optional<TextureDims> texture_dims_override;
    std::map<std::string, std::string> null_reasons; // "section.field" -> reason
    std::vector<std::string> warnings;
    std::uint64_t warning_count = 0;
};

/// Runs every analysis stage on one OBJ. Stages that cannot run leave nulls
/// plus a reason; only an unreadable or face-less OBJ throws (AnalysisError).
QualityReport analyze(const std::filesystem::path& model_path, const AnalysisOptions& options);

/// Same as analyze() on an already parsed mesh; textures resolve against base_dir.
QualityReport analyze_mesh(TexturedMesh mesh, std::vector<ParseWarning> warnings,
                           const std::filesystem::path& base_dir, const AnalysisOptions& options,
                           std::string model_label);

nlohmann::ordered_json to_json(const QualityReport& report);

/// Serialized report text (2-space indent, trailing newline).
std::string report_text(const QualityReport& report);

/// The subset printed on stdout.
std::string summary_text(const QualityReport& report);

/// Parses "WxH" with both sides >= 1.
std::optional<TextureDims> parse_texture_dims(const std::string& text);

// ---------------------------------------------------------------------------
// Batch mode

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::uint64_t count = 0;
};

struct Histogram {
    std::string metric;
    std::vector<HistogramBin> bins;
    std::uint64_t null_count = 0; // models whose metric is null
};

/// Equal-width bins over [lo, hi]; the last bin is closed. Values outside the
/// range clamp to the end bins.
Histogram make_histogram(std::string metric, const std::vector<std::optional<double>>& values, std::size_t bins,
                         double lo, double hi);

struct BatchRow {
    std::string model;
    std::filesystem::path report_path;
    QualityReport report;
};

struct BatchFailure {
    std::string model;
    std::string error;
};

struct BatchOptions {
    AnalysisOptions analysis;
    std::optional<std::filesystem::path> csv_path; // default <dir>/texmetrics.csv
    std::size_t bins = 20;
    std::size_t jobs = 1;
};

struct BatchSummary {
    std::vector<BatchRow> rows;
    std::vector<Histogram> histograms;
    std::vector<BatchFailure> failures;
    std::size_t model_count = 0;
    std::filesystem::path csv_path;
    std::vector<std::filesystem::path> histogram_paths;
};

struct ModelInput {
    std::string name;
    std::filesystem::path obj_path;
    std::filesystem::path report_path;
};

/// Models under `dir`: each subdirectory holding an OBJ (first by name) and
/// each loose OBJ in `dir` itself, sorted by name.
std::vector<ModelInput> discover_models(const std::filesystem::path& dir);

/// Fixed CSV column set; every row has every column.
const std::vector<std::string>& csv_columns();
std::string csv_row(const BatchRow& row);

/// Analyzes every model, writes one report per model, the CSV, the histogram
/// TSVs and batch_summary.json. Per-model failures are recorded and skipped.
/// Throws AnalysisError when the directory holds no model.
BatchSummary run_batch(const std::filesystem::path& dir, const BatchOptions& options);

} // namespace texmetrics
