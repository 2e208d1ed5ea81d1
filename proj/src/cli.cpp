#include "texmetrics/cli.hpp"

#include "texmetrics/report.hpp"

#include <CLI11.hpp>

#include <fstream>

namespace texmetrics {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Geometry, UV-map, texture and defect measures for textured OBJ meshes", "texmetrics"};
    std::string model;
    std::string batch_dir;
    std::string texdims;
    std::string json_path;
    std::string csv_path;
    std::size_t bins = 20;
    std::size_t jobs = 1;
    bool quiet = false;

    app.add_option("model", model, "OBJ file to analyze");
    app.add_option("--batch", batch_dir, "Analyze every model folder in DIR");
    app.add_option("--texdims", texdims, "Texture dimensions WxH; skips image decoding");
    app.add_option("--json", json_path, "Write the full report to PATH");
    app.add_option("--csv", csv_path, "Batch CSV path (default DIR/texmetrics.csv)");
    app.add_option("--bins", bins, "Histogram bin count in batch mode")->check(CLI::PositiveNumber);
    app.add_option("--jobs", jobs, "Models analyzed concurrently in batch mode")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "Suppress the stdout summary");
    app.set_version_flag("--version", std::string(kToolVersion));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (model.empty() == batch_dir.empty()) {
        err << "error: give either a model path or --batch DIR\n\n" << app.help();
        return 2;
    }

    AnalysisOptions options;
    if (!texdims.empty()) {
        options.texture_dims = parse_texture_dims(texdims);
        if (!options.texture_dims) {
            err << "error: --texdims expects WxH with positive integers, got '" << texdims << "'\n";
            return 2;
        }
    }

    try {
        if (!batch_dir.empty()) {
            BatchOptions bo;
            bo.analysis = options;
            bo.bins = bins;
            bo.jobs = jobs;
            if (!csv_path.empty())
                bo.csv_path = csv_path;
            const auto summary = run_batch(batch_dir, bo);
            if (!quiet) {
                out << "models     " << summary.model_count << "\n";
                out << "reports    " << summary.rows.size() << "\n";
                out << "failures   " << summary.failures.size() << "\n";
                out << "csv        " << summary.csv_path.string() << "\n";
            }
            for (const auto& f : summary.failures)
                err << "warning: " << f.model << ": " << f.error << "\n";
            return 0;
        }

        const auto report = analyze(model, options);
        if (!json_path.empty()) {
            std::ofstream f(json_path, std::ios::binary);
            if (!f) {
                err << "error: cannot write '" << json_path << "'\n";
                return 1;
            }
            f << report_text(report);
        }
        if (!quiet)
            out << summary_text(report);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace texmetrics
