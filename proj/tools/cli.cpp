// Command-line surface: every pipeline stage behind one binary with
// machine-readable outputs.
//
// Exit codes: 0 success, 2 input/parse error, 3 I/O error, 4 numeric
// failure, 5 precondition failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hilbertcloud/blocks.hpp"
#include "hilbertcloud/cloud.hpp"
#include "hilbertcloud/error.hpp"
#include "hilbertcloud/metrics.hpp"
#include "hilbertcloud/occupancy.hpp"
#include "hilbertcloud/rng.hpp"
#include "hilbertcloud/sinkhorn.hpp"
#include "hilbertcloud/xyz_io.hpp"

namespace fs = std::filesystem;
using hcl::format_double;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitPrecondition = 5;

json load_config(const std::string& path, const std::set<std::string>& known_keys) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw hcl::IoError("cannot open config " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw hcl::ParseError(std::string("config json: ") + e.what());
    }
    if (!cfg.is_object()) throw hcl::ParseError("config json: expected an object");
    for (const auto& [key, _] : cfg.items())
        if (!known_keys.contains(key))
            throw hcl::ParseError("config json: unknown key '" + key + "'");
    return cfg;
}

// flags beat config values beat built-in defaults
template <class T>
void cfg_default(const json& cfg, const char* key, const CLI::Option* opt, T& target) {
    if (opt->count() == 0 && cfg.contains(key)) {
        try {
            target = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw hcl::ParseError("config json: bad value for '" + std::string(key) + "': " +
                                  e.what());
        }
    }
}

void require_input(const std::string& path, const char* what) {
    if (path.empty()) throw hcl::ParseError(std::string("missing required ") + what);
}

hcl::GroundMetric parse_metric(const std::string& name) {
    if (name == "sq_euclidean") return hcl::GroundMetric::sq_euclidean;
    if (name == "euclidean") return hcl::GroundMetric::euclidean;
    if (name == "l1") return hcl::GroundMetric::l1;
    throw hcl::ParseError("unknown metric '" + name + "'");
}

std::string cloud_rows_json(const hcl::PointCloud& pc, const std::string& row_indent,
                            const std::string& close_indent) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < pc.size(); ++i) {
        out << (i ? ",\n" : "\n") << row_indent << "[";
        for (int k = 0; k < pc.dims; ++k) {
            if (k) out << ", ";
            out << format_double(pc.at(i, k));
        }
        out << "]";
    }
    out << "\n" << close_indent << "]";
    return out.str();
}

std::string zero_pad(std::int64_t t, int width = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(t));
    return buf;
}

// ---------------------------------------------------------------------------

struct SortArgs {
    std::string input, output, perm_out, scheme = "hilbert", config;
    int order = hcl::kDefaultSortOrder;
    bool print_config = false;
};

int run_sort(const SortArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"order\": " << a.order << ",\n  \"scheme\": \"" << a.scheme
                  << "\"\n}\n";
        return kExitOk;
    }
    require_input(a.input, "input file");
    require_input(a.output, "output file");

    const hcl::PointCloud pc = hcl::read_xyz(a.input);
    const hcl::CurveConfig cfg(pc.dims, a.order);

    hcl::Permutation perm;
    if (a.scheme == "hilbert") {
        perm = hcl::hilbert_sort(pc, cfg).perm;
    } else {
        perm = hcl::order_by(pc, a.scheme == "morton" ? hcl::OrderScheme::morton
                                                      : hcl::OrderScheme::lex,
                             cfg);
    }
    hcl::write_xyz(a.output, hcl::apply_permutation(pc, perm));
    if (!a.perm_out.empty()) {
        std::ostringstream lines;
        for (std::size_t v : perm.order) lines << v << '\n';
        hcl::write_file_atomic(a.perm_out, lines.str());
    }
    return kExitOk;
}

struct LocalityArgs {
    std::string input, output, config;
    int order = hcl::kDefaultSortOrder;
    bool print_config = false;
};

int run_locality(const LocalityArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"order\": " << a.order << "\n}\n";
        return kExitOk;
    }
    require_input(a.input, "input file");
    require_input(a.output, "output file");

    const hcl::PointCloud pc = hcl::read_xyz(a.input);
    const hcl::CurveConfig cfg(pc.dims, a.order);
    const hcl::LocalityReport report = hcl::compare_orderings(pc, cfg);

    std::ostringstream csv;
    csv << "scheme,mean_consecutive_distance,normalized_score\n";
    for (const auto& e : report.entries)
        csv << e.scheme << ',' << format_double(e.mean_consecutive) << ','
            << format_double(e.normalized) << '\n';
    hcl::write_file_atomic(a.output, csv.str());
    return kExitOk;
}

struct SinkhornArgs {
    std::string input_a, input_b, output, mode = "log", metric = "sq_euclidean", config;
    double epsilon = 0.001;
    int iters = 175;
    double tol = 0.0;  // 0 = run exactly `iters` iterations
    bool print_config = false;
};

int run_sinkhorn(const SinkhornArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"epsilon\": " << format_double(a.epsilon)
                  << ",\n  \"iters\": " << a.iters << ",\n  \"metric\": \"" << a.metric
                  << "\",\n  \"mode\": \"" << a.mode << "\",\n  \"tol\": " << format_double(a.tol)
                  << "\n}\n";
        return kExitOk;
    }
    require_input(a.input_a, "first input file");
    require_input(a.input_b, "second input file");
    require_input(a.output, "output file");

    const hcl::PointCloud X = hcl::read_xyz(a.input_a);
    const hcl::PointCloud Y = hcl::read_xyz(a.input_b);

    hcl::SinkhornParams p;
    p.epsilon = a.epsilon;
    p.max_iters = a.iters;
    p.tol = a.tol;
    p.log_domain = a.mode == "log";
    const auto res = hcl::sinkhorn_distance(X, Y, p, parse_metric(a.metric));

    std::ostringstream out;
    out << "{\n";
    out << "  \"converged\": " << (res.solution.converged ? "true" : "false") << ",\n";
    out << "  \"distance\": " << format_double(res.distance) << ",\n";
    out << "  \"entropy\": " << format_double(res.entropy) << ",\n";
    out << "  \"iters\": " << res.solution.iters << ",\n";
    out << "  \"marginal_violation\": " << format_double(res.solution.marginal_violation)
        << ",\n";
    out << "  \"transport_cost\": " << format_double(res.transport_cost) << "\n";
    out << "}\n";
    hcl::write_file_atomic(a.output, out.str());
    return kExitOk;
}

struct EmdArgs {
    std::string input_a, input_b, output, mode = "exact", metric = "sq_euclidean", config;
    double epsilon = 0.001;
    int iters = 10000;
    double tol = 1e-9;
    bool print_config = false;
};

int run_emd(const EmdArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"epsilon\": " << format_double(a.epsilon)
                  << ",\n  \"iters\": " << a.iters << ",\n  \"metric\": \"" << a.metric
                  << "\",\n  \"mode\": \"" << a.mode << "\",\n  \"tol\": " << format_double(a.tol)
                  << "\n}\n";
        return kExitOk;
    }
    require_input(a.input_a, "first input file");
    require_input(a.input_b, "second input file");
    require_input(a.output, "output file");

    const hcl::PointCloud X = hcl::read_xyz(a.input_a);
    const hcl::PointCloud Y = hcl::read_xyz(a.input_b);
    hcl::SinkhornParams p;
    p.epsilon = a.epsilon;
    p.max_iters = a.iters;
    p.tol = a.tol;
    const double value = hcl::emd(
        X, Y, a.mode == "exact" ? hcl::EmdMode::exact : hcl::EmdMode::sinkhorn, p,
        parse_metric(a.metric));

    std::ostringstream out;
    out << "{\n  \"emd\": " << format_double(value) << ",\n  \"mode\": \"" << a.mode
        << "\",\n  \"n\": " << X.size() << "\n}\n";
    hcl::write_file_atomic(a.output, out.str());
    return kExitOk;
}

struct ChamferArgs {
    std::string input_a, input_b, output, config;
    bool print_config = false;
};

int run_chamfer(const ChamferArgs& a) {
    if (a.print_config) {
        std::cout << "{}\n";
        return kExitOk;
    }
    require_input(a.input_a, "first input file");
    require_input(a.input_b, "second input file");
    require_input(a.output, "output file");

    const double value = hcl::chamfer(hcl::read_xyz(a.input_a), hcl::read_xyz(a.input_b));
    std::ostringstream out;
    out << "{\n  \"chamfer\": " << format_double(value) << "\n}\n";
    hcl::write_file_atomic(a.output, out.str());
    return kExitOk;
}

struct PrepArgs {
    std::string seq_dir, out_dir, methodology = "p2d", config;
    std::size_t n = 128;
    std::uint64_t seed = 0;
    double z_min = hcl::kDefaultGroundZ;
    double range = hcl::kDefaultClipRange;
    double cell = hcl::kDefaultCellSize;
    int order = hcl::kDefaultSortOrder;
    bool print_config = false;
};

int run_occupancy_prep(const PrepArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"cell\": " << format_double(a.cell)
                  << ",\n  \"methodology\": \"" << a.methodology << "\",\n  \"n\": " << a.n
                  << ",\n  \"order\": " << a.order << ",\n  \"range\": "
                  << format_double(a.range) << ",\n  \"seed\": " << a.seed
                  << ",\n  \"z_min\": " << format_double(a.z_min) << "\n}\n";
        return kExitOk;
    }
    require_input(a.seq_dir, "sequence directory");
    require_input(a.out_dir, "output directory");

    const hcl::Methodology m = a.methodology == "p2p"   ? hcl::Methodology::p2p
                               : a.methodology == "p2d" ? hcl::Methodology::p2d
                                                        : hcl::Methodology::d2d;
    const std::size_t span = m == hcl::Methodology::d2d ? 3 : 2;

    const auto entries = hcl::scan_sequence(a.seq_dir);
    if (entries.size() < span)
        throw hcl::DomainError("sequence has " + std::to_string(entries.size()) +
                               " frames, " + std::string(hcl::methodology_name(m)) + " needs " +
                               std::to_string(span));

    // ground removal needs z, so the order is ground -> clip -> project
    std::vector<hcl::Frame> frames;
    frames.reserve(entries.size());
    for (const auto& e : entries) {
        hcl::Frame f{hcl::read_xyz(e.file), e.t};
        if (f.cloud.dims != 3)
            throw hcl::ParseError("frame " + e.file.filename().string() + " is not 3-D");
        frames.push_back(project_xy(clip_range(remove_ground(f, a.z_min), a.range)));
    }

    fs::create_directories(a.out_dir);
    const hcl::CurveConfig cfg(2, a.order);

    std::ostringstream pairs_json, skipped_json;
    int pair_count = 0, skip_count = 0;
    for (std::size_t i = 0; i + span <= frames.size(); ++i) {
        // pair label t = timestamp of the input frame x_t
        const hcl::Frame* window = frames.data() + i;
        const std::int64_t t = window[span - 2].t;
        const std::uint64_t derived_seed = a.seed ^ static_cast<std::uint64_t>(t);

        std::string reason;
        for (std::size_t k = 0; k < span; ++k)
            if (window[k].cloud.size() < a.n)
                reason = "frame " + std::to_string(window[k].t) + " has " +
                         std::to_string(window[k].cloud.size()) + " points after preprocessing, need " +
                         std::to_string(a.n);
        if (!reason.empty()) {
            skipped_json << (skip_count++ ? ",\n" : "\n") << "    {\"t\": " << t
                         << ", \"reason\": \"" << reason << "\"}";
            continue;
        }

        const auto pair = hcl::make_pair({window, span}, m, a.n, derived_seed, cfg);
        const std::string tag = zero_pad(t) + "_" + hcl::methodology_name(m);
        const std::string pair_name = "pair_" + tag + ".json";

        std::ostringstream pj;
        pj << "{\n";
        pj << "  \"methodology\": \"" << hcl::methodology_name(m) << "\",\n";
        pj << "  \"t\": " << t << ",\n";
        pj << "  \"seed\": " << derived_seed << ",\n";
        pj << "  \"n\": " << a.n << ",\n";
        pj << "  \"preprocessing\": {\"z_min\": " << format_double(a.z_min)
           << ", \"range\": " << format_double(a.range) << ", \"order\": " << a.order
           << ", \"cell\": " << format_double(a.cell) << "},\n";
        pj << "  \"input_kind\": \"" << (pair.input_kind == hcl::PayloadKind::diff ? "diff" : "cloud")
           << "\",\n";
        pj << "  \"target_kind\": \""
           << (pair.target_kind == hcl::PayloadKind::diff ? "diff" : "cloud") << "\",\n";
        pj << "  \"base\": " << cloud_rows_json(pair.base, "    ", "  ") << ",\n";
        pj << "  \"input\": " << cloud_rows_json(pair.input, "    ", "  ") << ",\n";
        pj << "  \"target\": " << cloud_rows_json(pair.target, "    ", "  ") << "\n";
        pj << "}\n";
        hcl::write_file_atomic(fs::path(a.out_dir) / pair_name, pj.str());

        const hcl::PointCloud target_cloud = pair.target_kind == hcl::PayloadKind::diff
                                                 ? hcl::compose_prediction(pair.target, pair.base)
                                                 : pair.target;
        const auto base_grid = hcl::rasterize(pair.base, a.cell, a.range);
        const auto target_grid = hcl::rasterize(target_cloud, a.cell, a.range);
        const std::string base_name = "grid_" + tag + "_base";
        const std::string target_name = "grid_" + tag + "_target";
        hcl::write_file_atomic(fs::path(a.out_dir) / (base_name + ".pgm"), to_pgm(base_grid));
        hcl::write_file_atomic(fs::path(a.out_dir) / (base_name + ".json"),
                               grid_sidecar_json(base_grid));
        hcl::write_file_atomic(fs::path(a.out_dir) / (target_name + ".pgm"),
                               to_pgm(target_grid));
        hcl::write_file_atomic(fs::path(a.out_dir) / (target_name + ".json"),
                               grid_sidecar_json(target_grid));

        pairs_json << (pair_count++ ? ",\n" : "\n") << "    {\"t\": " << t << ", \"pair\": \""
                   << pair_name << "\", \"grids\": [\"" << base_name << ".pgm\", \""
                   << target_name << ".pgm\"]}";
    }

    if (pair_count == 0)
        throw hcl::DomainError("no admissible frame window produced a pair (methodology " +
                               std::string(hcl::methodology_name(m)) + ")");

    std::ostringstream manifest;
    manifest << "{\n";
    manifest << "  \"methodology\": \"" << hcl::methodology_name(m) << "\",\n";
    manifest << "  \"n\": " << a.n << ",\n";
    manifest << "  \"seed\": " << a.seed << ",\n";
    manifest << "  \"z_min\": " << format_double(a.z_min) << ",\n";
    manifest << "  \"range\": " << format_double(a.range) << ",\n";
    manifest << "  \"cell\": " << format_double(a.cell) << ",\n";
    manifest << "  \"order\": " << a.order << ",\n";
    manifest << "  \"frames\": " << entries.size() << ",\n";
    manifest << "  \"pairs\": [" << pairs_json.str() << "\n  ],\n";
    manifest << "  \"skipped\": [" << skipped_json.str() << (skip_count ? "\n  " : "") << "]\n";
    manifest << "}\n";
    hcl::write_file_atomic(fs::path(a.out_dir) / "manifest.json", manifest.str());
    return kExitOk;
}

struct GradcheckArgs {
    std::string block, output, config;
    int points = 8;
    int channels = 4;
    double step = 1e-5;
    std::uint64_t seed = 1;
    bool print_config = false;
};

int run_gradcheck(const GradcheckArgs& a) {
    if (a.print_config) {
        std::cout << "{\n  \"channels\": " << a.channels << ",\n  \"points\": " << a.points
                  << ",\n  \"seed\": " << a.seed << ",\n  \"step\": " << format_double(a.step)
                  << "\n}\n";
        return kExitOk;
    }
    require_input(a.block, "block name");
    require_input(a.output, "output file");

    using namespace hcl::blocks;
    hcl::Rng rng(a.seed);
    const int n = a.points, C = a.channels;

    auto random_tensor = [&rng](int n_, int c_) {
        Tensor t(n_, c_);
        for (double& v : t.data) v = hcl::uniform_range(rng, -1, 1);
        return t;
    };

    double tolerance = 1e-4;
    double err = 0.0;
    if (a.block == "conv1d") {
        tolerance = 1e-6;
        ConvSpec s = ConvSpec::make(C, C, 3, 2);
        auto views = param_views(s, "conv1d");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return t.conv1d(t.input(x), s); }, views, a.step);
    } else if (a.block == "sep_conv") {
        tolerance = 1e-6;
        SepConvSpec s = SepConvSpec::make(C, C, 3, 2);
        auto views = param_views(s, "sep_conv");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return build_sep_conv(t, t.input(x), s); }, views,
                         a.step);
    } else if (a.block == "res_unit") {
        tolerance = 1e-6;
        ConvSpec s = ConvSpec::make(C, C, 3, 1);
        auto views = param_views(s, "res_unit");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return build_res_unit(t, t.input(x), s); }, views,
                         a.step);
    } else if (a.block == "channel_attention") {
        CaParams p = CaParams::make(C, 2);
        auto views = param_views(p, "channel_attention");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return build_ca(t, t.input(x), p); }, views, a.step);
    } else if (a.block == "mfa") {
        MfaParams p = MfaParams::make(C, 2, C);
        auto views = param_views(p, "mfa");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return build_mfa(t, t.input(x), p); }, views, a.step);
    } else if (a.block == "bfa") {
        BfaParams p = BfaParams::make(C, C);
        auto views = param_views(p, "bfa");
        randomize(views, rng);
        const Tensor x = random_tensor(n, C);
        const Tensor y = random_tensor(n, C);
        err = grad_check([&](Tape& t) { return build_bfa(t, t.input(x), t.input(y), p); },
                         views, a.step);
    } else if (a.block == "aggregated") {
        AggParams p = AggParams::make(C, C);
        auto views = param_views(p, "aggregated");
        randomize(views, rng);
        const Tensor heavy = random_tensor(n, C);
        const Tensor light = random_tensor(n, C);
        err = grad_check(
            [&](Tape& t) { return build_aggregated(t, t.input(heavy), t.input(light), p); },
            views, a.step);
    } else {
        throw hcl::ParseError("unknown block '" + a.block + "'");
    }

    const bool pass = err <= tolerance;
    std::ostringstream out;
    out << "{\n";
    out << "  \"block\": \"" << a.block << "\",\n";
    out << "  \"channels\": " << C << ",\n";
    out << "  \"max_rel_error\": " << format_double(err) << ",\n";
    out << "  \"pass\": " << (pass ? "true" : "false") << ",\n";
    out << "  \"points\": " << n << ",\n";
    out << "  \"seed\": " << a.seed << ",\n";
    out << "  \"step\": " << format_double(a.step) << ",\n";
    out << "  \"tolerance\": " << format_double(tolerance) << "\n";
    out << "}\n";
    hcl::write_file_atomic(a.output, out.str());
    if (!pass) throw hcl::NumericError("gradient check failed: max relative error " +
                                       format_double(err) + " > " + format_double(tolerance));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hilbert-sorted point cloud toolkit: locality-preserving ordering, entropic "
                 "optimal transport, point-cloud metrics and occupancy-prediction data prep"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::uint64_t global_seed = 0;
    bool global_print = false;
    app.add_option("--seed", global_seed, "Seed for every randomized stage");
    auto* seed_opt = app.get_option("--seed");
    app.add_flag("--print-config", global_print, "Print the effective configuration and exit");

    SortArgs sort_args;
    auto* sort_cmd = app.add_subcommand("sort", "Reorder a cloud along a space-filling curve");
    sort_cmd->add_option("input", sort_args.input, "Input .xyz file");
    sort_cmd->add_option("output", sort_args.output, "Output .xyz file");
    auto* sort_order = sort_cmd->add_option("--order", sort_args.order, "Bits per axis");
    sort_cmd->add_option("--scheme", sort_args.scheme, "Ordering scheme")
        ->check(CLI::IsMember({"hilbert", "morton", "lex"}));
    sort_cmd->add_option("--perm", sort_args.perm_out, "Write the permutation CSV here");
    sort_cmd->add_option("--config", sort_args.config, "JSON config file");

    LocalityArgs loc_args;
    auto* loc_cmd = app.add_subcommand("locality", "Compare ordering locality scores");
    loc_cmd->add_option("input", loc_args.input, "Input .xyz file");
    loc_cmd->add_option("output", loc_args.output, "Output .csv file");
    auto* loc_order = loc_cmd->add_option("--order", loc_args.order, "Bits per axis");
    loc_cmd->add_option("--config", loc_args.config, "JSON config file");

    SinkhornArgs sk_args;
    auto* sk_cmd = app.add_subcommand("sinkhorn", "Entropic transport distance between clouds");
    sk_cmd->add_option("input_a", sk_args.input_a, "First .xyz file");
    sk_cmd->add_option("input_b", sk_args.input_b, "Second .xyz file");
    sk_cmd->add_option("output", sk_args.output, "Output .json file");
    auto* sk_eps = sk_cmd->add_option("--epsilon", sk_args.epsilon, "Entropic regularization");
    auto* sk_iters = sk_cmd->add_option("--iters", sk_args.iters, "Iteration budget");
    auto* sk_tol = sk_cmd->add_option("--tol", sk_args.tol,
                                      "Marginal violation tolerance (0 = fixed budget)");
    auto* sk_mode = sk_cmd->add_option("--mode", sk_args.mode, "log or multiplicative")
                        ->check(CLI::IsMember({"log", "multiplicative"}));
    auto* sk_metric = sk_cmd->add_option("--metric", sk_args.metric, "Ground metric")
                          ->check(CLI::IsMember({"sq_euclidean", "euclidean", "l1"}));
    sk_cmd->add_option("--config", sk_args.config, "JSON config file");

    EmdArgs emd_args;
    auto* emd_cmd = app.add_subcommand("emd", "Earth mover's distance between equal-size clouds");
    emd_cmd->add_option("input_a", emd_args.input_a, "First .xyz file");
    emd_cmd->add_option("input_b", emd_args.input_b, "Second .xyz file");
    emd_cmd->add_option("output", emd_args.output, "Output .json file");
    auto* emd_mode = emd_cmd->add_option("--mode", emd_args.mode, "exact or sinkhorn")
                         ->check(CLI::IsMember({"exact", "sinkhorn"}));
    emd_cmd->add_flag_callback("--exact", [&emd_args] { emd_args.mode = "exact"; },
                               "Shorthand for --mode exact");
    auto* emd_eps = emd_cmd->add_option("--epsilon", emd_args.epsilon, "Sinkhorn regularization");
    auto* emd_iters = emd_cmd->add_option("--iters", emd_args.iters, "Sinkhorn iteration budget");
    auto* emd_tol = emd_cmd->add_option("--tol", emd_args.tol, "Sinkhorn tolerance");
    auto* emd_metric = emd_cmd->add_option("--metric", emd_args.metric, "Ground metric")
                           ->check(CLI::IsMember({"sq_euclidean", "euclidean", "l1"}));
    emd_cmd->add_option("--config", emd_args.config, "JSON config file");

    ChamferArgs ch_args;
    auto* ch_cmd = app.add_subcommand("chamfer", "Chamfer distance between clouds");
    ch_cmd->add_option("input_a", ch_args.input_a, "First .xyz file");
    ch_cmd->add_option("input_b", ch_args.input_b, "Second .xyz file");
    ch_cmd->add_option("output", ch_args.output, "Output .json file");
    ch_cmd->add_option("--config", ch_args.config, "JSON config file");

    PrepArgs prep_args;
    auto* prep_cmd = app.add_subcommand(
        "occupancy-prep", "Build occupancy training pairs and grids from a frame sequence");
    prep_cmd->add_option("seq_dir", prep_args.seq_dir, "Directory of NNNNNN.xyz frames");
    prep_cmd->add_option("out_dir", prep_args.out_dir, "Output directory");
    auto* prep_m = prep_cmd->add_option("--methodology", prep_args.methodology, "p2p, p2d or d2d")
                       ->check(CLI::IsMember({"p2p", "p2d", "d2d"}));
    auto* prep_n = prep_cmd->add_option("-n,--points", prep_args.n, "Points per frame after FPS");
    auto* prep_z = prep_cmd->add_option("--z-min", prep_args.z_min, "Ground height threshold");
    auto* prep_r = prep_cmd->add_option("--range", prep_args.range, "Clip range (meters)");
    auto* prep_c = prep_cmd->add_option("--cell", prep_args.cell, "Raster cell size (meters)");
    auto* prep_o = prep_cmd->add_option("--order", prep_args.order, "Hilbert sort bits per axis");
    prep_cmd->add_option("--config", prep_args.config, "JSON config file");

    GradcheckArgs gc_args;
    auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of a block gradient");
    gc_cmd->add_option("block", gc_args.block,
                       "conv1d, sep_conv, res_unit, channel_attention, mfa, bfa, aggregated");
    gc_cmd->add_option("output", gc_args.output, "Output .json file");
    auto* gc_n = gc_cmd->add_option("--points", gc_args.points, "Input length");
    auto* gc_c = gc_cmd->add_option("--channels", gc_args.channels, "Channel count");
    auto* gc_step = gc_cmd->add_option("--step", gc_args.step, "Finite difference step");
    gc_cmd->add_option("--config", gc_args.config, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (sort_cmd->parsed()) {
            const json cfg = load_config(sort_args.config, {"order", "scheme"});
            cfg_default(cfg, "order", sort_order, sort_args.order);
            cfg_default(cfg, "scheme", sort_cmd->get_option("--scheme"), sort_args.scheme);
            sort_args.print_config = global_print;
            return run_sort(sort_args);
        }
        if (loc_cmd->parsed()) {
            const json cfg = load_config(loc_args.config, {"order"});
            cfg_default(cfg, "order", loc_order, loc_args.order);
            loc_args.print_config = global_print;
            return run_locality(loc_args);
        }
        if (sk_cmd->parsed()) {
            const json cfg =
                load_config(sk_args.config, {"epsilon", "iters", "tol", "mode", "metric"});
            cfg_default(cfg, "epsilon", sk_eps, sk_args.epsilon);
            cfg_default(cfg, "iters", sk_iters, sk_args.iters);
            cfg_default(cfg, "tol", sk_tol, sk_args.tol);
            cfg_default(cfg, "mode", sk_mode, sk_args.mode);
            cfg_default(cfg, "metric", sk_metric, sk_args.metric);
            sk_args.print_config = global_print;
            return run_sinkhorn(sk_args);
        }
        if (emd_cmd->parsed()) {
            const json cfg =
                load_config(emd_args.config, {"epsilon", "iters", "tol", "mode", "metric"});
            cfg_default(cfg, "epsilon", emd_eps, emd_args.epsilon);
            cfg_default(cfg, "iters", emd_iters, emd_args.iters);
            cfg_default(cfg, "tol", emd_tol, emd_args.tol);
            cfg_default(cfg, "mode", emd_mode, emd_args.mode);
            cfg_default(cfg, "metric", emd_metric, emd_args.metric);
            emd_args.print_config = global_print;
            return run_emd(emd_args);
        }
        if (ch_cmd->parsed()) {
            load_config(ch_args.config, {});
            ch_args.print_config = global_print;
            return run_chamfer(ch_args);
        }
        if (prep_cmd->parsed()) {
            const json cfg = load_config(
                prep_args.config, {"methodology", "n", "z_min", "range", "cell", "order", "seed"});
            cfg_default(cfg, "methodology", prep_m, prep_args.methodology);
            cfg_default(cfg, "n", prep_n, prep_args.n);
            cfg_default(cfg, "z_min", prep_z, prep_args.z_min);
            cfg_default(cfg, "range", prep_r, prep_args.range);
            cfg_default(cfg, "cell", prep_c, prep_args.cell);
            cfg_default(cfg, "order", prep_o, prep_args.order);
            cfg_default(cfg, "seed", seed_opt, global_seed);
            prep_args.seed = global_seed;
            prep_args.print_config = global_print;
            return run_occupancy_prep(prep_args);
        }
        if (gc_cmd->parsed()) {
            const json cfg =
                load_config(gc_args.config, {"points", "channels", "step", "seed"});
            cfg_default(cfg, "points", gc_n, gc_args.points);
            cfg_default(cfg, "channels", gc_c, gc_args.channels);
            cfg_default(cfg, "step", gc_step, gc_args.step);
            std::uint64_t seed = seed_opt->count() ? global_seed : gc_args.seed;
            cfg_default(cfg, "seed", seed_opt, seed);
            gc_args.seed = seed;
            gc_args.print_config = global_print;
            return run_gradcheck(gc_args);
        }
        std::cout << app.help();
        return kExitOk;
    } catch (const hcl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const hcl::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const hcl::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const hcl::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const hcl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
