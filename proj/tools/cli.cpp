#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "dendrix/dendrix.hpp"

namespace dendrix::cli {

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
        f << content;
        if (!f.flush()) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot replace '" + path + "'");
    }
}

namespace {

// Sends an artifact to `path`, or to stdout when no path was given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") out << content;
    else write_file_atomic(path, content);
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

struct StateFlags {
    std::string omega = "0", eta = "0", fiber = "P:0";
    std::string omega2, eta2, fiber2;

    void attach(CLI::App* app) {
        app->add_option("--omega", omega, "timer word, position 0 first; '...' repeats the pattern");
        app->add_option("--eta", eta, "control word of the first state");
        app->add_option("--fiber", fiber, "fiber point: P:t, Q:t, origin, y+:j, two-, z+:j, ...");
        app->add_option("--omega2", omega2, "timer word of the second state (default: --omega)");
        app->add_option("--eta2", eta2, "control word of the second state (default: --eta)");
        app->add_option("--fiber2", fiber2, "fiber point of the second state (default: --fiber)");
    }

    std::pair<SkewState, SkewState> states() const {
        SkewState a{OmegaWord::parse(omega), OmegaWord::parse(eta), parse_fiber(fiber)};
        SkewState b{OmegaWord::parse(omega2.empty() ? omega : omega2), OmegaWord::parse(eta2.empty() ? eta : eta2),
                    parse_fiber(fiber2.empty() ? fiber : fiber2)};
        return {std::move(a), std::move(b)};
    }
};

std::vector<std::uint64_t> checkpoints_from(const std::vector<std::uint64_t>& raw, const std::vector<int>& columns) {
    if (!raw.empty() && !columns.empty()) {
        throw CLI::ValidationError("--checkpoints and --col-checkpoints are exclusive");
    }
    if (!columns.empty()) {
        for (int n : columns) {
            if (n < 1 || n >= kMaxColumn) throw CLI::ValidationError("column must be in 1.." + std::to_string(kMaxColumn - 1));
        }
        return column_checkpoints(columns);
    }
    std::vector<std::uint64_t> out = raw;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    // lo:hi:count
    double lo = 0, hi = 0;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !in.eof()) {
        throw CLI::ValidationError("--s-grid expects lo:hi:count");
    }
    return threshold_grid(lo, hi, count);
}

PositionPattern parse_pattern(const std::string& text) {
    if (text == "even") return [](std::size_t i) { return i % 2 == 0; };
    if (text == "odd") return [](std::size_t i) { return i % 2 == 1; };
    std::size_t k = 0, r = 0;
    char c1 = 0;
    std::istringstream in(text);
    std::string head(4, '\0');
    if (in.read(head.data(), 4) && head == "mod:" && (in >> k >> c1 >> r) && c1 == ':' && in.eof() && k > 0 && r < k) {
        return [k, r](std::size_t i) { return i % k == r; };
    }
    throw CLI::ValidationError("--pattern expects even, odd or mod:K:R");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dendrites over finite totally disconnected spaces, and the odometer skew product", "dendrix"};
    app.require_subcommand(1);

    // space gen
    auto* space = app.add_subcommand("space", "metric spaces")->require_subcommand(1);
    auto* gen = space->add_subcommand("gen", "generate a named space");
    std::string kind, space_out, from_path;
    SpaceParams sp;
    std::vector<std::string> factor_paths;
    gen->add_option("--kind", kind, "cantor | harmonic | fiber_c | product | from_file")->required();
    gen->add_option("--k", sp.k, "harmonic: points 1, 1/2, ..., 1/k and 0");
    gen->add_option("--depth", sp.depth, "cantor: word length");
    gen->add_option("--n-max", sp.n_max, "fiber_c: number of columns");
    gen->add_option("--factor", factor_paths, "product: factor space files")->check(CLI::ExistingFile);
    gen->add_option("--path", from_path, "from_file: space file");
    gen->add_option("--out", space_out, "output file (default stdout)");

    // dendrite build / verify
    auto* dendrite = app.add_subcommand("dendrite", "dendrite skeletons")->require_subcommand(1);
    auto* build = dendrite->add_subcommand("build", "build the dendrite of a space");
    std::string build_space, dot_out, skeleton_json, dendrite_out;
    build->add_option("space", build_space, "space file")->required()->check(CLI::ExistingFile);
    build->add_option("--dot", dot_out, "write the skeleton as DOT");
    build->add_option("--skeleton-json", skeleton_json, "write the skeleton export as JSON");
    build->add_option("--out", dendrite_out, "dendrite file (default stdout)");

    auto* verify = dendrite->add_subcommand("verify", "check a dendrite against its space");
    std::string verify_dendrite_path, verify_space, report_out;
    std::size_t triples = 10000;
    std::uint64_t seed = 0x5eed;
    verify->add_option("dendrite", verify_dendrite_path, "dendrite file")->required()->check(CLI::ExistingFile);
    verify->add_option("--space", verify_space, "space file")->required()->check(CLI::ExistingFile);
    verify->add_option("--triples", triples, "random triangle-inequality triples")->check(CLI::Range(0, 10000000));
    verify->add_option("--seed", seed, "sampling seed (DENDRITE_SEED overrides)");
    verify->add_option("--out", report_out, "report file (default stdout)");

    // map extend
    auto* map = app.add_subcommand("map", "maps on dendrites")->require_subcommand(1);
    auto* extend = map->add_subcommand("extend", "extend an endpoint map to the whole dendrite");
    std::string ext_dendrite, ext_space, ext_map, ext_out;
    std::optional<std::size_t> ext_base;
    extend->add_option("dendrite", ext_dendrite, "dendrite file")->required()->check(CLI::ExistingFile);
    extend->add_option("--space", ext_space, "space file")->required()->check(CLI::ExistingFile);
    extend->add_option("--map", ext_map, "endpoint map file: {label: label}")->required()->check(CLI::ExistingFile);
    extend->add_option("--base", ext_base, "base vertex (default: the root)");
    extend->add_option("--out", ext_out, "extension file (default stdout)");

    // skew simulate
    auto* skew = app.add_subcommand("skew", "the skew product system")->require_subcommand(1);
    auto* simulate = skew->add_subcommand("simulate", "orbit distances of a pair of states");
    StateFlags sim_states;
    sim_states.attach(simulate);
    std::uint64_t horizon = 0;
    std::vector<int> sim_columns;
    std::string csv_out;
    simulate->add_option("--horizon", horizon, "number of steps")->check(CLI::PositiveNumber);
    simulate->add_option("--col-checkpoints", sim_columns, "run through the tops of these columns")->delimiter(',');
    simulate->add_option("--csv", csv_out, "orbit CSV (default stdout)");

    // chaos classify / family
    auto* chaos = app.add_subcommand("chaos", "distributional chaos")->require_subcommand(1);
    auto* classify = chaos->add_subcommand("classify", "Li-Yorke and DC3 verdict for a pair");
    StateFlags cls_states;
    cls_states.attach(classify);
    std::string cls_csv, s_grid, verdict_out, svg_out, profile_out;
    std::vector<double> s_values;
    std::vector<std::uint64_t> raw_checkpoints;
    std::vector<int> cls_columns;
    double gap = kDefaultDc3Gap;
    classify->add_option("--csv", cls_csv, "read distances from an orbit CSV instead of simulating")
        ->check(CLI::ExistingFile);
    classify->add_option("--s", s_values, "thresholds")->delimiter(',');
    classify->add_option("--s-grid", s_grid, "threshold grid lo:hi:count");
    classify->add_option("--checkpoints", raw_checkpoints, "horizons N")->delimiter(',');
    classify->add_option("--col-checkpoints", cls_columns, "horizons T_n + 1 for these columns")->delimiter(',');
    classify->add_option("--gap", gap, "spread required for DC3 evidence")->check(CLI::Range(0.0, 1.0));
    classify->add_option("--out", verdict_out, "verdict file (default stdout)");
    classify->add_option("--svg", svg_out, "plot of the profile");
    classify->add_option("--profile-csv", profile_out, "profile table");

    auto* family = chaos->add_subcommand("family", "control words with a prescribed agreement pattern");
    std::string pattern = "even", family_out;
    std::size_t count = 2, depth = 16;
    family->add_option("--pattern", pattern, "coding positions: even, odd or mod:K:R");
    family->add_option("--count", count, "family size")->check(CLI::PositiveNumber);
    family->add_option("--depth", depth, "positions generated and checked");
    family->add_option("--out", family_out, "output file (default stdout)");

    std::vector<std::string> argv_store{"dendrix"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());

        if (gen->parsed()) {
            if (kind == "product") {
                for (const auto& p : factor_paths) sp.factors.push_back(load_space(p));
            }
            sp.path = from_path;
            emit(space_out, dump(space_to_json(generate_space(kind, sp))), out);
            return kOk;
        }

        if (build->parsed()) {
            const MetricSpace s = load_space(build_space);
            const Dendrite d = build_dendrite(s);
            if (!dot_out.empty()) write_file_atomic(dot_out, export_skeleton(d, "dot"));
            if (!skeleton_json.empty()) write_file_atomic(skeleton_json, export_skeleton(d, "json"));
            emit(dendrite_out, dump(dendrite_to_json(d)), out);
            return kOk;
        }

        if (verify->parsed()) {
            if (const char* env = std::getenv("DENDRITE_SEED")) {
                try {
                    seed = std::stoull(env, nullptr, 0);
                } catch (const std::exception&) {
                    throw CLI::ValidationError("DENDRITE_SEED is not an integer");
                }
            }
            const MetricSpace s = load_space(verify_space);
            const Dendrite d = dendrite_from_json(read_json_file(verify_dendrite_path), s);
            const VerificationReport r = verify_dendrite(d, s, triples, seed);
            auto doc = report_to_json(r);
            doc["seed"] = seed;
            emit(report_out, dump(doc), out);
            if (!r.ok()) {
                err << "dendrite verify: invariant check failed\n";
                return kValidationFailure;
            }
            return kOk;
        }

        if (extend->parsed()) {
            const MetricSpace s = load_space(ext_space);
            auto d = std::make_shared<const Dendrite>(dendrite_from_json(read_json_file(ext_dendrite), s));
            auto f = endpoint_map_from_json(read_json_file(ext_map), s);
            Filtration filtration;
            if (d->vertex_count() > 1) filtration = build_filtration(*d, ext_base.value_or(d->root()));
            const DendriteMap m = extend_map(d, std::move(filtration), f);
            for (std::size_t x = 0; x < s.size(); ++x) {
                const VertexId leaf = *d->leaf_of_point(x);
                if (!(m(DPoint::vertex(leaf)) == DPoint::vertex(*d->leaf_of_point(f[x])))) {
                    err << "map extend: extension does not restrict to the endpoint map at '" << s.label(x) << "'\n";
                    return kValidationFailure;
                }
            }
            emit(ext_out, dump(extension_to_json(m)), out);
            return kOk;
        }

        if (simulate->parsed()) {
            if ((horizon == 0) == sim_columns.empty()) {
                throw CLI::ValidationError("give exactly one of --horizon and --col-checkpoints");
            }
            if (!sim_columns.empty()) horizon = checkpoints_from({}, sim_columns).back();
            const auto [a, b] = sim_states.states();
            const auto dist = orbit_distances(a, b, horizon);
            std::ostringstream csv;
            write_orbit_csv(csv, dist);
            emit(csv_out, csv.str(), out);
            return kOk;
        }

        if (classify->parsed()) {
            std::vector<double> thresholds = s_values;
            if (!s_grid.empty()) {
                if (!thresholds.empty()) throw CLI::ValidationError("--s and --s-grid are exclusive");
                thresholds = parse_grid(s_grid);
            }
            if (thresholds.empty()) {
                const auto safe = safe_dc3_interval();
                thresholds = threshold_grid(0.25, safe.hi, 16);
            }
            std::sort(thresholds.begin(), thresholds.end());
            thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
            auto checkpoints = checkpoints_from(raw_checkpoints, cls_columns);

            PairVerdict v;
            if (!cls_csv.empty()) {
                std::ifstream in(cls_csv);
                if (!in) throw Error(ErrorCode::Io, "cannot open '" + cls_csv + "'");
                const auto dist = read_orbit_csv(in);
                if (checkpoints.empty()) {
                    for (int n = 1; n < kMaxColumn && column_top(n) + 1 <= dist.size(); ++n) {
                        checkpoints.push_back(column_top(n) + 1);
                    }
                    if (checkpoints.empty()) checkpoints.push_back(dist.size());
                }
                v = classify_distances(dist, thresholds, checkpoints, gap);
            } else {
                if (checkpoints.empty()) checkpoints = column_checkpoints(std::vector<int>{3, 4, 5});
                const auto [a, b] = cls_states.states();
                v = classify_pair(a, b, thresholds, checkpoints, {}, gap);
            }
            if (!profile_out.empty()) {
                std::ostringstream csv;
                write_profile_csv(csv, v.profile);
                write_file_atomic(profile_out, csv.str());
            }
            if (!svg_out.empty()) write_file_atomic(svg_out, render_profile_svg(v.profile));
            emit(verdict_out, dump(verdict_to_json(v)), out);
            return kOk;
        }

        if (family->parsed()) {
            const auto words = scrambled_family(parse_pattern(pattern), count, depth);
            const auto stats = family_stats(words, 1, depth - 1);
            nlohmann::json doc{{"pattern", pattern}, {"count", count}, {"depth", depth}};
            for (const auto& w : words) doc["words"].push_back(w.to_string());
            doc["stats"] = {{"pairwise_distinct", stats.pairwise_distinct},
                            {"min_agreements", stats.min_agreements},
                            {"min_disagreements", stats.min_disagreements}};
            emit(family_out, dump(doc), out);
            if (count > 1 && (!stats.pairwise_distinct || stats.min_agreements == 0 || stats.min_disagreements == 0)) {
                err << "chaos family: some pair never agrees or never disagrees below depth " << depth << "\n";
                return kValidationFailure;
            }
            return kOk;
        }
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        const CLI::App* failed = &app;
        for (CLI::App* sub : {gen, build, verify, extend, simulate, classify, family}) {
            if (sub->parsed()) failed = sub;
        }
        err << failed->help();
        return kUsage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidationFailure;
    }
    err << app.help();
    return kUsage;
}

}  // namespace dendrix::cli
