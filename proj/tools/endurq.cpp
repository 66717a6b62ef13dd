#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "endurq/log.hpp"
#include "endurq/serde.hpp"
#include "endurq/simulator.hpp"

namespace {

using namespace endurq;

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + out_path);
    out << content;
    if (!out) throw IoError("write failed: " + out_path);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

std::vector<double> parse_demands(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            out.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw std::invalid_argument("demands: bad number: " + field);
        }
    }
    if (out.empty()) throw std::invalid_argument("demands: empty list");
    return out;
}

std::string format_step(const SaturatingValue& v) {
    auto line = std::to_string(v.value);
    if (v.saturated) line += " saturated";
    return line;
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const IoError& e) {
        log_error(e.what());
        return 1;
    } catch (const ConfigError& e) {
        log_error(e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        log_error(e.what());
        return 2;
    } catch (const std::domain_error& e) {
        log_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"endurance queue simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed_override;

    auto* simulate = app.add_subcommand("simulate", "run one simulation from a JSON config");
    simulate->add_option("config", config_path, "SimConfig JSON path")->required();
    simulate->add_option("--seed", seed_override, "override the config seed");
    simulate->add_option("--out", out_path, "output path (default: stdout)");

    auto* compare = app.add_subcommand("compare", "endurance vs fixed depth-1 baseline");
    compare->add_option("config", config_path, "SimConfig JSON path")->required();
    compare->add_option("--seed", seed_override, "override the config seed");
    compare->add_option("--out", out_path, "output path (default: stdout)");

    std::string trace_path;
    double bucket_width = 1.0;
    std::string format = "csv";
    auto* heatmap_cmd = app.add_subcommand("heatmap", "bucket an event trace into a heat map");
    heatmap_cmd->add_option("trace", trace_path, "event trace CSV path")->required();
    heatmap_cmd->add_option("--bucket-width", bucket_width, "bucket width, seconds")
        ->check(CLI::PositiveNumber);
    heatmap_cmd->add_option("--format", format, "csv or ppm")
        ->check(CLI::IsMember({"csv", "ppm"}));
    heatmap_cmd->add_option("--out", out_path, "output path (default: stdout)");

    std::string metrics_path;
    auto* capacity_cmd = app.add_subcommand("capacity", "capacity scores from a metrics CSV");
    capacity_cmd->add_option("metrics", metrics_path, "metrics CSV path")->required();
    capacity_cmd->add_option("--out", out_path, "output path (default: stdout)");

    std::string demands_csv;
    std::uint64_t population = 0;
    auto* gn = app.add_subcommand("gn", "normalizing constants G(0..N) by convolution");
    gn->add_option("--demands", demands_csv, "comma-separated station demands")->required();
    gn->add_option("--population", population, "population N")->required();
    gn->add_option("--out", out_path, "output path (default: stdout)");

    std::uint64_t ack_m = 0;
    std::uint64_t ack_n = 0;
    std::uint64_t cap = kDefaultCap;
    std::uint64_t max_steps = 4096;
    bool with_trace = false;
    auto* ackermann_cmd = app.add_subcommand("ackermann", "Ackermann value or growth trace");
    ackermann_cmd->add_option("m", ack_m, "first argument")->required();
    ackermann_cmd->add_option("n", ack_n, "second argument")->required();
    ackermann_cmd->add_option("--cap", cap, "saturation cap");
    ackermann_cmd->add_flag("--trace", with_trace, "print the reduction step values");
    ackermann_cmd->add_option("--max-steps", max_steps, "step budget for --trace");
    ackermann_cmd->add_option("--out", out_path, "output path (default: stdout)");

    WorkloadProfile profile;
    std::string profile_kind;
    auto* trace_gen = app.add_subcommand("trace-gen", "generate a workload trace CSV");
    trace_gen->add_option("--profile", profile_kind, "poisson, bursty, or sparse")
        ->required()
        ->check(CLI::IsMember({"poisson", "bursty", "sparse"}));
    trace_gen->add_option("--rate", profile.rate, "poisson/sparse rate, items/s");
    trace_gen->add_option("--base-rate", profile.base_rate, "bursty base rate");
    trace_gen->add_option("--burst-rate", profile.burst_rate, "bursty burst rate");
    trace_gen->add_option("--burst-duration", profile.burst_duration, "burst length, s");
    trace_gen->add_option("--period", profile.period, "burst period, s");
    trace_gen->add_option("--gap", profile.gap, "sparse extra gap, s");
    trace_gen->add_option("--duration", profile.duration, "trace length, s")->required();
    trace_gen->add_option("--seed", profile.seed, "generator seed");
    trace_gen->add_option("--system-id", profile.system_id, "label for generated events");
    trace_gen->add_option("--out", out_path, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto load_config = [&] {
        auto cfg = load_sim_config(config_path);
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.workload.seed = *seed_override;
        }
        return cfg;
    };

    if (simulate->parsed())
        return run_guarded([&] {
            const auto report = run_simulation(load_config());
            write_output(out_path, to_json(report).dump(2) + "\n");
        });

    if (compare->parsed())
        return run_guarded([&] {
            const auto both = compare_baseline(load_config());
            const json doc{{"endurance", to_json(both.endurance)},
                           {"fixed", to_json(both.fixed)}};
            write_output(out_path, doc.dump(2) + "\n");
        });

    if (heatmap_cmd->parsed())
        return run_guarded([&] {
            auto in = open_input(trace_path);
            const auto trace = read_trace_csv(in);
            const auto hm = build_heatmap(trace, bucket_width);
            write_output(out_path, export_heatmap(hm, format == "ppm"
                                                          ? HeatMapFormat::ppm
                                                          : HeatMapFormat::csv));
        });

    if (capacity_cmd->parsed())
        return run_guarded([&] {
            auto in = open_input(metrics_path);
            const auto rows = read_metrics_csv(in);
            const auto totals = aggregate_stack(rows);
            json scores = json::array();
            for (const auto& m : rows) scores.push_back(to_json(compute_capacity(m, totals)));
            write_output(out_path, scores.dump(2) + "\n");
        });

    if (gn->parsed())
        return run_guarded([&] {
            const auto g = normalizing_constant(parse_demands(demands_csv), population);
            std::string lines;
            char buf[64];
            for (const auto v : g) {
                std::snprintf(buf, sizeof(buf), "%.9f\n", v);
                lines += buf;
            }
            write_output(out_path, lines);
        });

    if (ackermann_cmd->parsed())
        return run_guarded([&] {
            std::string lines;
            if (with_trace) {
                const auto trace = ackermann_trace(ack_m, ack_n, cap, max_steps);
                for (std::size_t i = 0; i < trace.steps.size(); ++i) {
                    if (trace.truncated && i + 1 == trace.steps.size())
                        lines += "truncated\n";
                    lines += format_step(trace.steps[i]) + "\n";
                }
            } else {
                lines = format_step(ackermann(ack_m, ack_n, cap)) + "\n";
            }
            write_output(out_path, lines);
        });

    // trace-gen
    return run_guarded([&] {
        if (profile_kind == "poisson") profile.kind = WorkloadProfile::Kind::poisson;
        if (profile_kind == "bursty") profile.kind = WorkloadProfile::Kind::bursty;
        if (profile_kind == "sparse") profile.kind = WorkloadProfile::Kind::sparse;
        const auto trace = generate_workload(profile);
        std::ostringstream out;
        write_trace_csv(trace, out);
        write_output(out_path, out.str());
    });
}
