#include "rcbir/cli.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "rcbir/errors.hpp"
#include "rcbir/evaluation.hpp"
#include "rcbir/image_io.hpp"
#include "rcbir/index_io.hpp"
#include "rcbir/reports.hpp"
#include "rcbir/retrieval.hpp"
#include "rcbir/service.hpp"
#include "rcbir/synthetic.hpp"

namespace rcbir {

namespace {

struct CliConfig {
    std::string input;
    std::string output;
    std::string index_path;
    std::string image;
    std::vector<std::string> images;
    std::string mode = "rbir";
    std::size_t k = 10;
    int levels = kDefaultToneLevels;
    int distance = kDefaultDistance;
    unsigned threads = 0;
    std::uint64_t seed = 7;
    int per_class = 25;
    int size = 256;
    bool include_self = false;
    bool exclude_self = false;
    bool json = false;
    bool csv = false;
    bool whole_image = false;
    std::string plot;
    std::string dump_mask;
    std::string corpus_root;
    std::string bind = "127.0.0.1:8731";
    std::string cors_origin;
};

const auto kModeCheck = CLI::IsMember({"rbir", "lbir", "cbir"}, CLI::ignore_case);

Mode mode_of(const std::string& text) { return parse_mode(text).value_or(Mode::Rbir); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot create " + path);
    f << text;
    if (!f) throw IoError("cannot write " + path);
}

int cmd_gen_corpus(const CliConfig& c, std::ostream& out, std::ostream& err) {
    SyntheticOptions opt;
    opt.seed = c.seed;
    opt.per_class = c.per_class;
    opt.size = c.size;
    const auto corpus = write_synthetic_corpus(opt, c.output);
    err << "wrote " << corpus.size() << " images to " << c.output << '\n';
    out << Json{{"images", corpus.size()}, {"out", c.output}, {"seed", c.seed}}.dump() << '\n';
    return kExitOk;
}

int cmd_index_build(const CliConfig& c, std::ostream& out, std::ostream& err) {
    BuildOptions opt;
    opt.texture = {c.levels, c.distance};
    opt.threads = c.threads;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) opt.created_unix = std::strtoll(epoch, nullptr, 10);
    const ImageIndex index = build_index(scan_corpus(c.input), opt);
    save_index(index, c.output);
    for (const auto& s : index.skipped()) err << "skipped " << s.image_id << ": " << s.reason << " (" << s.detail << ")\n";
    err << "indexed " << index.entries().size() << " images into " << c.output << '\n';
    out << Json{{"entries", index.entries().size()},
                {"skipped", index.skipped().size()},
                {"combined_buckets", index.occupied_combined_keys().size()},
                {"out", c.output}}
               .dump()
        << '\n';
    return kExitOk;
}

int cmd_index_export(const CliConfig& c, std::ostream& out) {
    out << to_json(load_index(c.index_path)).dump(2) << '\n';
    return kExitOk;
}

int cmd_query(const CliConfig& c, std::ostream& out) {
    const ImageIndex index = load_index(c.index_path);
    QueryOptions opt;
    opt.mode = mode_of(c.mode);
    opt.k = c.k;
    if (c.exclude_self) opt.exclude_id = std::filesystem::path(c.image).stem().string();
    out << to_json(query(index, load_image(c.image), opt)).dump() << '\n';
    return kExitOk;
}

int cmd_eval(const CliConfig& c, std::ostream& out) {
    const ImageIndex index = load_index(c.index_path);
    std::vector<Mode> modes;
    if (c.mode == "all") {
        modes = {Mode::Cbir, Mode::Lbir, Mode::Rbir};
    } else {
        modes = {mode_of(c.mode)};
    }
    std::vector<EvalReport> reports;
    for (Mode m : modes) reports.push_back(run_protocol(index, m, EvalOptions{c.include_self}));

    if (c.json) {
        Json all = Json::array();
        for (const auto& r : reports) all.push_back(to_json(r));
        out << (all.size() == 1 ? all[0] : all).dump() << '\n';
    } else {
        out << eval_csv(reports);
    }
    if (!c.plot.empty()) write_text(c.plot, precision_svg(reports));
    return kExitOk;
}

int cmd_segment(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const GrayImage img = load_image(c.image);
    const ThresholdReport report = compute_t_star(img);
    Segmentation seg;
    try {
        seg = segment(img);
    } catch (const NoRegionError&) {
        if (c.json) {
            Json j = to_json(report);
            j["error"] = "no_region";
            out << j.dump() << '\n';
        }
        throw;
    }
    if (!c.dump_mask.empty()) write_pgm(c.dump_mask, mask_to_image(seg.roi.mask));
    const int cell = location_cell(seg.roi.bbox, img.width(), img.height());
    if (c.json) {
        Json j = to_json(report);
        j["bbox"] = to_json(seg.roi.bbox);
        j["area"] = seg.roi.area;
        j["cell"] = cell;
        out << j.dump() << '\n';
    } else {
        out << "T=" << report.t_iterative << " t*=" << report.t_otsu << " T*=" << report.t_star
            << " iterations=" << report.iterations << '\n'
            << "roi bbox=(" << seg.roi.bbox.x1 << ',' << seg.roi.bbox.y1 << ")-(" << seg.roi.bbox.x2 << ','
            << seg.roi.bbox.y2 << ") area=" << seg.roi.area << " cell=" << cell << '\n';
    }
    (void)err;
    return kExitOk;
}

int cmd_features(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const TextureParams params{c.levels, c.distance};
    out << features_csv_header();
    int failures = 0;
    for (const auto& path : c.images) {
        const std::string id = std::filesystem::path(path).stem().string();
        try {
            const GrayImage img = load_image(path);
            TextureFeatures f;
            if (c.whole_image) {
                f = region_texture(img, nullptr, params);
            } else {
                const Segmentation seg = segment(img);
                f = region_texture(img, &seg.roi.mask, params);
            }
            out << features_csv_row(id, f);
        } catch (const Error& e) {
            err << path << ": " << e.code() << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return failures ? kExitDomainError : kExitOk;
}

int cmd_serve(const CliConfig& c) {
    ServiceOptions opt;
    opt.corpus_root = c.corpus_root.empty() ? std::filesystem::path(c.index_path).parent_path()
                                            : std::filesystem::path(c.corpus_root);
    if (!c.cors_origin.empty()) opt.cors_origin = c.cors_origin;
    const QueryService service(load_index(c.index_path), opt);
    return serve(service, c.bind) == 0 ? kExitOk : kExitDomainError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig c;
    CLI::App app{"Region-of-interest image retrieval: segmentation, texture indexing and query by example",
                 "rcbir"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto* gen = app.add_subcommand("gen-corpus", "Write a labelled synthetic corpus");
    gen->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    gen->add_option("--out", c.output, "Output directory")->required();
    gen->add_option("--per-class", c.per_class, "Images per class")->capture_default_str()->check(CLI::Range(2, 100000));
    gen->add_option("--size", c.size, "Image side in pixels")->capture_default_str()->check(CLI::Range(64, 8192));

    auto* index_cmd = app.add_subcommand("index", "Build or export an index");
    index_cmd->require_subcommand(1);
    auto* build = index_cmd->add_subcommand("build", "Index a directory of images");
    build->add_option("--input", c.input, "Corpus directory (manifest.csv optional)")->required()->check(CLI::ExistingDirectory);
    build->add_option("--out", c.output, "Index file to write")->required();
    build->add_option("--ng", c.levels, "Gray-tone levels for texture")->capture_default_str()->check(CLI::Range(2, 256));
    build->add_option("--d", c.distance, "Co-occurrence distance")->capture_default_str()->check(CLI::PositiveNumber);
    build->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
    auto* exp = index_cmd->add_subcommand("export", "Dump an index as JSON");
    exp->add_option("--index", c.index_path, "Index file")->required()->check(CLI::ExistingFile);
    exp->add_flag("--json", c.json, "JSON output (the only format)");

    auto* query_cmd = app.add_subcommand("query", "Query by example");
    query_cmd->add_option("--index", c.index_path, "Index file")->required()->check(CLI::ExistingFile);
    query_cmd->add_option("--image", c.image, "Query image")->required();
    query_cmd->add_option("--mode", c.mode, "rbir, lbir or cbir")->capture_default_str()->transform(kModeCheck);
    query_cmd->add_option("-k", c.k, "Results to return")->capture_default_str()->check(CLI::PositiveNumber);
    query_cmd->add_flag("--exclude-self", c.exclude_self, "Drop the entry whose id matches the image file stem");

    auto* eval = app.add_subcommand("eval", "Run the precision/recall protocol over an index");
    eval->add_option("--index", c.index_path, "Labelled index file")->required()->check(CLI::ExistingFile);
    eval->add_option("--mode", c.mode, "rbir, lbir, cbir or all")
        ->capture_default_str()
        ->transform(CLI::IsMember({"rbir", "lbir", "cbir", "all"}, CLI::ignore_case));
    auto* csv_flag = eval->add_flag("--csv", c.csv, "CSV tables (default)");
    eval->add_flag("--json", c.json, "JSON report with per-query logs")->excludes(csv_flag);
    eval->add_flag("--include-self", c.include_self, "Keep each query in its own ranking");
    eval->add_option("--plot", c.plot, "Write a precision-vs-k SVG chart here");

    auto* seg = app.add_subcommand("segment", "Threshold and extract the region of interest");
    seg->add_option("--image", c.image, "Input image")->required();
    seg->add_option("--dump-mask", c.dump_mask, "Write the region mask as PGM");
    seg->add_flag("--json", c.json, "JSON output");

    auto* feat = app.add_subcommand("features", "Print texture features as CSV");
    feat->add_option("--image", c.images, "Input images")->required();
    feat->add_option("--ng", c.levels, "Gray-tone levels")->capture_default_str()->check(CLI::Range(2, 256));
    feat->add_option("--d", c.distance, "Co-occurrence distance")->capture_default_str()->check(CLI::PositiveNumber);
    feat->add_flag("--whole-image", c.whole_image, "Measure the whole frame instead of the region");

    auto* serve_cmd = app.add_subcommand("serve", "HTTP query service over an index");
    serve_cmd->add_option("--index", c.index_path, "Index file")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--corpus-root", c.corpus_root, "Directory the indexed paths are relative to");
    serve_cmd->add_option("--bind", c.bind, "host:port")->capture_default_str();
    serve_cmd->add_option("--cors-origin", c.cors_origin, "Allowed browser origin");

    std::vector<const char*> argv{"rcbir"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        if (e.get_exit_code() != 0) {
            // Point at the relevant subcommand's help.
            const CLI::App* target = &app;
            for (auto* sub = &app; sub;) {
                auto subs = sub->get_subcommands();
                if (subs.empty()) break;
                target = sub = subs.front();
            }
            err << target->help();
        }
        return kExitUsage;
    }

    try {
        c.mode = std::string(c.mode);
        std::transform(c.mode.begin(), c.mode.end(), c.mode.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (*gen) return cmd_gen_corpus(c, out, err);
        if (*build) return cmd_index_build(c, out, err);
        if (*exp) return cmd_index_export(c, out);
        if (*query_cmd) return cmd_query(c, out);
        if (*eval) return cmd_eval(c, out);
        if (*seg) return cmd_segment(c, out, err);
        if (*feat) return cmd_features(c, out, err);
        if (*serve_cmd) return cmd_serve(c);
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << '\n';
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    }
    return kExitUsage;
}

}  // namespace rcbir
