// Copyright 2026 The weakbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "weakbell/bell.hpp"
#include "weakbell/io.hpp"
#include "weakbell/montecarlo.hpp"
#include "weakbell/pointer.hpp"
#include "weakbell/protocol.hpp"

namespace weakbell::cli {

namespace {

using nlohmann::json;

/// Validation failure detected by the front end itself (exit code 2).
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw InvalidParameter("empty number");
    }
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw InvalidParameter("not a finite number: '" + s + "'");
    }
    return v;
}

std::string scalar_text(const json &v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    if (v.is_number()) {
        return format_number(v.get<double>());
    }
    throw UsageError("config values must be scalars or arrays of scalars");
}

void append_json_entries(const json &obj, const std::string &command,
                         std::vector<std::string> &out, bool nested) {
    for (const auto &[key, value] : obj.items()) {
        if (value.is_object()) {
            if (nested || key != command) {
                throw UsageError("unknown config section '" + key + "'");
            }
            append_json_entries(value, command, out, true);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                text += (i ? "," : "") + scalar_text(value[i]);
            }
        } else {
            text = scalar_text(value);
        }
        out.push_back("--" + key + "=" + text);
    }
}

/// Config file contents as `--key=value` arguments for `command`.
std::vector<std::string> config_arguments(const std::string &path,
                                          const std::string &command) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<std::string> out;
    const std::string head = trim(text);
    if (!head.empty() && head.front() == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception &e) {
            throw UsageError(std::string("malformed JSON config: ") + e.what());
        }
        append_json_entries(j, command, out, false);
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    int number = 0;
    bool active = true;
    while (std::getline(lines, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw UsageError("malformed section at line " +
                                 std::to_string(number));
            }
            const std::string section = trim(t.substr(1, t.size() - 2));
            active = section == command;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("expected key=value at line " +
                             std::to_string(number));
        }
        if (!active) {
            continue;
        }
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        out.push_back("--" + trim(t.substr(0, eq)) + "=" + value);
    }
    return out;
}

/// Moves config-file settings in front of the command-line flags so that
/// flags win (every option keeps its last value).
std::vector<std::string> expand_config(const std::vector<std::string> &args) {
    if (args.size() < 2) {
        return args;
    }
    std::string command;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (!args[i].empty() && args[i].front() != '-') {
            command = args[i];
            break;
        }
    }
    std::optional<std::string> config;
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string &a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) {
                throw UsageError("--config needs a file name");
            }
            config = args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            config = a.substr(9);
        } else {
            rest.push_back(a);
        }
    }
    if (!config) {
        return args;
    }
    if (command.empty()) {
        throw UsageError("--config needs a command");
    }
    std::vector<std::string> out{args[0]};
    bool inserted = false;
    for (const auto &a : rest) {
        out.push_back(a);
        if (!inserted && a == command) {
            const auto extra = config_arguments(*config, command);
            out.insert(out.end(), extra.begin(), extra.end());
            inserted = true;
        }
    }
    return out;
}

struct Emit {
    std::string text;
    std::string default_name;
};

enum class Format { Csv, Json };

Format resolve_format(const std::string &requested, Format fallback) {
    if (requested.empty()) {
        return fallback;
    }
    if (requested == "csv") {
        return Format::Csv;
    }
    if (requested == "json") {
        return Format::Json;
    }
    throw UsageError("format must be csv or json");
}

std::string extension(Format f) { return f == Format::Csv ? ".csv" : ".json"; }

PointerOptions pointer_options(double grid_spacing, double bump_alpha) {
    require_dyadic_spacing(grid_spacing);
    if (!(bump_alpha > 0.0)) {
        throw InvalidParameter("bump alpha must be positive");
    }
    return {grid_spacing, bump_alpha, kDefaultEnvelopeCutoff};
}

json tradeoff_json(std::span<const TradeoffRow> rows) {
    json arr = json::array();
    for (const auto &r : rows) {
        arr.push_back({{"family", family_name(r.family)},
                       {"parameter", r.parameter},
                       {"F", r.quality_factor},
                       {"G", r.precision}});
    }
    return arr;
}

template <typename Writer>
std::string csv_of(Writer &&w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

std::string json_text(const json &j) { return j.dump(2) + "\n"; }

std::uint64_t trial_count(double trials) {
    if (!(trials >= 1.0) || trials > 1e12 || std::floor(trials) != trials) {
        throw InvalidParameter("trials must be a positive integer");
    }
    return static_cast<std::uint64_t>(trials);
}

std::shared_ptr<const PointerState> shared_pointer(PointerState p) {
    return std::make_shared<const PointerState>(std::move(p));
}

std::shared_ptr<const PointerState> stage_pointer_for(PointerFamily family,
                                                      double g,
                                                      const PointerOptions &o) {
    if (!(g > 0.0 && g <= 1.0)) {
        throw InvalidParameter("precision must lie in (0, 1]");
    }
    if (g == 1.0) {
        return shared_pointer(make_square(1.0, o.grid_spacing));
    }
    return shared_pointer(pointer_for_precision(family, g, o));
}

} // namespace

std::vector<double> parse_range(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw InvalidParameter("empty range");
    }
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::string_view rest = s;
        while (true) {
            const auto c = rest.find(':');
            parts.push_back(parse_number(rest.substr(0, c)));
            if (c == std::string_view::npos) {
                break;
            }
            rest = rest.substr(c + 1);
        }
        if (parts.size() != 3) {
            throw InvalidParameter("range must be start:stop:step");
        }
        const double start = parts[0];
        const double stop = parts[1];
        const double step = parts[2];
        if (!(step > 0.0) || stop < start) {
            throw InvalidParameter("range needs step > 0 and stop >= start");
        }
        const double count = std::floor((stop - start) / step + 0.5);
        if (count > 1e7) {
            throw InvalidParameter("range has too many points");
        }
        for (long k = 0; k <= static_cast<long>(count); ++k) {
            const double v = start + static_cast<double>(k) * step;
            if (v > stop + 0.5 * step) {
                break;
            }
            out.push_back(v);
        }
        return out;
    }
    std::string_view rest = s;
    while (true) {
        const auto c = rest.find(',');
        out.push_back(parse_number(rest.substr(0, c)));
        if (c == std::string_view::npos) {
            break;
        }
        rest = rest.substr(c + 1);
    }
    return out;
}

void write_atomically(const std::string &path, const std::string &content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot open '" + tmp.string() + "'");
        }
        os << content;
        os.flush();
        if (!os) {
            fs::remove(tmp);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename to '" + path +
                                 "': " + ec.message());
    }
}

int run_cli(const std::vector<std::string> &raw, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Sequential weak-measurement Bell scenarios", "weakbell"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string out_path;
    std::string format;
    unsigned threads = 0;
    std::string config_unused;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--out,-o", out_path, "Output file (default: stdout)");
        sub->add_option("--format", format, "csv or json");
        sub->add_option("--config", config_unused,
                        "key=value or JSON file; flags override it");
    };

    // tradeoff --------------------------------------------------------------
    std::string family;
    std::string g_range;
    std::string delta_range;
    std::string scale_range;
    std::string param_range;
    double grid_spacing = kDefaultGridSpacing;
    double bump_alpha = 1.0;
    auto *tradeoff = app.add_subcommand("tradeoff", "F and G along a pointer family");
    common(tradeoff);
    tradeoff->add_option("--family", family, "square, gaussian, exponential, "
                                             "optimal, optimal-bump, worst")
        ->required();
    tradeoff->add_option("--g", g_range, "precision range (optimal families)");
    tradeoff->add_option("--delta", delta_range, "width range (square, gaussian)");
    tradeoff->add_option("--scale", scale_range, "scale range (exponential)");
    tradeoff->add_option("--param", param_range, "family parameter range");
    tradeoff->add_option("--grid-spacing", grid_spacing, "1/2^k");
    tradeoff->add_option("--bump-alpha", bump_alpha, "smooth-bump alpha");

    // pointer-dump ----------------------------------------------------------
    double dump_param = 0.0;
    auto *dump = app.add_subcommand("pointer-dump", "pointer samples as q,phi");
    common(dump);
    dump->add_option("--family", family)->required();
    dump->add_option("--param", dump_param, "family parameter")->required();
    dump->add_option("--grid-spacing", grid_spacing);
    dump->add_option("--bump-alpha", bump_alpha);

    // double ----------------------------------------------------------------
    std::string double_family = "analytic";
    std::string double_range = "0.01:0.99:0.01";
    auto *dbl = app.add_subcommand("double", "I1 and I2 along a precision grid");
    common(dbl);
    dbl->add_option("--family", double_family,
                    "analytic (exact optimal strengths) or a pointer family");
    dbl->add_option("--g", double_range, "precision range of Bob 1");
    dbl->add_option("--grid-spacing", grid_spacing);

    // positivity ------------------------------------------------------------
    double pos_f = 0.0;
    double pos_g = 0.0;
    std::string theta_range = "0:1.57:0.01";
    auto *pos = app.add_subcommand("positivity",
                                   "closed-form outcome probabilities on the tangent geometry");
    common(pos);
    pos->add_option("--f", pos_f, "quality factor")->required();
    pos->add_option("--g", pos_g, "precision")->required();
    pos->add_option("--theta", theta_range, "tangent-angle range");

    // protocol --------------------------------------------------------------
    int proto_n = 0;
    double proto_bias = -1.0;
    std::vector<double> proto_biases;
    bool auto_bias = false;
    bool limit = false;
    auto *protocol = app.add_subcommand("protocol", "biased-input schedule");
    common(protocol);
    protocol->add_option("--n", proto_n, "number of Bobs")->required();
    auto *bias_opt = protocol->add_option("--bias", proto_bias, "uniform bias r");
    auto *biases_opt = protocol->add_option("--biases", proto_biases,
                                            "comma-separated r_1..r_{N-1}")
                           ->delimiter(',');
    biases_opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    auto *auto_opt = protocol->add_flag("--auto-bias", auto_bias,
                                        "uniform bias with P_N = chi_N / 2");
    auto *limit_opt = protocol->add_flag("--limit", limit, "zero-bias limit (default)");
    bias_opt->excludes(biases_opt)->excludes(auto_opt)->excludes(limit_opt);
    biases_opt->excludes(auto_opt)->excludes(limit_opt);
    auto_opt->excludes(limit_opt);

    // montecarlo ------------------------------------------------------------
    std::string scenario = "double";
    std::string mc_family = "optimal";
    double mc_g = 0.8;
    double mc_g2 = -1.0;
    double mc_trials = 1e5;
    std::uint64_t mc_seed = 1;
    double mc_bias = 0.5;
    auto *mc = app.add_subcommand("montecarlo", "sampled chain with JSON report");
    common(mc);
    mc->add_option("--scenario", scenario, "single, double or triple");
    mc->add_option("--family", mc_family, "pointer family of the weak Bobs");
    mc->add_option("--g", mc_g, "precision of the first Bob");
    mc->add_option("--g2", mc_g2, "precision of the second Bob (triple)");
    mc->add_option("--trials", mc_trials, "number of trials (1e6 accepted)");
    mc->add_option("--seed", mc_seed, "64-bit seed");
    mc->add_option("--bias", mc_bias, "input bias of every Bob");
    mc->add_option("--grid-spacing", grid_spacing);
    mc->add_option("--threads", threads);

    // triple-scan -----------------------------------------------------------
    double resolution = 0.01;
    std::string f1_range;
    std::string f2_range;
    std::string settings_name = "tsirelson";
    auto *scan = app.add_subcommand("triple-scan",
                                    "best min(I1, I2, I3) over (F1, F2)");
    common(scan);
    scan->add_option("--resolution", resolution, "grid step for F1 and F2");
    scan->add_option("--f1", f1_range, "explicit F1 range");
    scan->add_option("--f2", f2_range, "explicit F2 range");
    scan->add_option("--settings", settings_name, "settings registry name");
    scan->add_option("--threads", threads);

    try {
        std::vector<std::string> args = expand_config(raw);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);

        Emit emit;
        if (tradeoff->parsed()) {
            const PointerFamily fam = parse_family(family);
            const bool optimal_family = fam == PointerFamily::Optimal ||
                                        fam == PointerFamily::OptimalBump ||
                                        fam == PointerFamily::Worst;
            std::vector<std::pair<std::string, const std::string *>> given;
            for (const auto &[flag, value] :
                 {std::pair{"--g", &g_range}, std::pair{"--delta", &delta_range},
                  std::pair{"--scale", &scale_range},
                  std::pair{"--param", &param_range}}) {
                if (!value->empty()) {
                    given.emplace_back(flag, value);
                }
            }
            if (given.size() != 1) {
                throw UsageError("give exactly one of --g, --delta, --scale, --param");
            }
            const std::string &flag = given[0].first;
            const bool matches =
                flag == "--param" || (flag == "--g" && optimal_family) ||
                (flag == "--delta" && (fam == PointerFamily::Square ||
                                       fam == PointerFamily::Gaussian)) ||
                (flag == "--scale" && fam == PointerFamily::Exponential);
            if (!matches) {
                throw UsageError(flag + " does not parameterize family " + family);
            }
            const auto params = parse_range(*given[0].second);
            const auto rows =
                tradeoff_curve(fam, params, pointer_options(grid_spacing, bump_alpha));
            const Format f = resolve_format(format, Format::Csv);
            emit.text = f == Format::Csv
                            ? csv_of([&](std::ostream &os) { write_tradeoff_csv(os, rows); })
                            : json_text(tradeoff_json(rows));
            emit.default_name = "tradeoff" + extension(f);
        } else if (dump->parsed()) {
            const PointerFamily fam = parse_family(family);
            const PointerState p =
                make_pointer(fam, dump_param, pointer_options(grid_spacing, bump_alpha));
            const Format f = resolve_format(format, Format::Csv);
            if (f == Format::Csv) {
                emit.text = csv_of([&](std::ostream &os) { write_pointer_csv(os, p); });
            } else {
                json q = json::array();
                json phi = json::array();
                for (std::size_t i = 0; i < p.size(); ++i) {
                    q.push_back(p.position(i));
                    phi.push_back(p.samples()[i]);
                }
                emit.text = json_text({{"family", family_name(fam)},
                                       {"parameter", dump_param},
                                       {"grid_spacing", p.grid_spacing()},
                                       {"F", quality_factor(p)},
                                       {"G", precision(p)},
                                       {"q", q},
                                       {"phi", phi}});
            }
            emit.default_name = "pointer" + extension(f);
        } else if (dbl->parsed()) {
            std::optional<PointerFamily> fam;
            if (double_family != "analytic") {
                fam = parse_family(double_family);
            }
            const auto grid = parse_range(double_range);
            for (double g : grid) {
                if (!(g > 0.0 && g < 1.0)) {
                    throw InvalidParameter("precision grid must lie in (0, 1)");
                }
            }
            const auto rows = double_violation_curve(
                fam, grid, pointer_options(grid_spacing, 1.0));
            const Format f = resolve_format(format, Format::Csv);
            if (f == Format::Csv) {
                emit.text = csv_of(
                    [&](std::ostream &os) { write_double_violation_csv(os, rows); });
            } else {
                json arr = json::array();
                for (const auto &r : rows) {
                    arr.push_back({{"G", r.precision},
                                   {"F", r.quality_factor},
                                   {"I1", r.chsh_first},
                                   {"I2", r.chsh_second}});
                }
                emit.text = json_text({{"family", double_family},
                                       {"rows", arr},
                                       {"double_violation", has_double_violation(rows)}});
            }
            emit.default_name = "double" + extension(f);
        } else if (pos->parsed()) {
            const MeasurementStrength s = MeasurementStrength::make(pos_f, pos_g);
            const auto thetas = parse_range(theta_range);
            const PositivityReport rep = positivity_bound_scan(s, thetas);
            const Format f = resolve_format(format, Format::Csv);
            if (f == Format::Csv) {
                emit.text =
                    csv_of([&](std::ostream &os) { write_positivity_csv(os, rep); });
            } else {
                json arr = json::array();
                for (const auto &r : rep.rows) {
                    arr.push_back({{"theta", r.theta},
                                   {"min_prob", r.min_probability},
                                   {"tangent_value", r.tangent_value}});
                }
                emit.text = json_text({{"rows", arr},
                                       {"min_probability", rep.min_probability},
                                       {"theta_at_min", rep.theta_at_min},
                                       {"max_tangent_value", rep.max_tangent_value},
                                       {"consistent", rep.consistent}});
            }
            emit.default_name = "positivity" + extension(f);
        } else if (protocol->parsed()) {
            if (proto_n < 1) {
                throw InvalidParameter("--n must be at least 1");
            }
            const auto n = static_cast<std::size_t>(proto_n);
            ProtocolSchedule schedule;
            if (*bias_opt) {
                schedule = build_schedule(n, BiasSchedule::uniform(n - 1, proto_bias));
            } else if (*biases_opt) {
                if (proto_biases.size() != n - 1) {
                    throw InvalidParameter("--biases needs exactly N-1 values");
                }
                schedule = build_schedule(n, proto_biases);
            } else if (auto_bias) {
                if (n < 2) {
                    throw InvalidParameter("--auto-bias needs N >= 2");
                }
                const UniformBias b = feasible_uniform_bias(n);
                schedule = build_schedule(n, BiasSchedule::uniform_log(n - 1, b.log_r));
            } else {
                schedule = build_limit_schedule(n);
            }
            const Format f = resolve_format(format, Format::Csv);
            if (f == Format::Csv) {
                emit.text =
                    csv_of([&](std::ostream &os) { write_protocol_csv(os, schedule); });
            } else {
                json arr = json::array();
                for (const auto &r : schedule.rows) {
                    const ChshBound b = chsh_lower_bound(schedule, r.n);
                    arr.push_back(
                        {{"n", r.n},
                         {"theta", r.theta},
                         {"log_theta", r.log_theta},
                         {"F", r.quality_factor},
                         {"log_F", r.log_quality_factor},
                         {"G", r.precision},
                         {"P", r.spoil_probability},
                         {"log_P", r.log_spoil_probability},
                         {"chi", r.chi},
                         {"log_chi", r.log_chi},
                         {"bound", format_two_plus(b.excess_sign, b.log_abs_excess)},
                         {"bound_exceeds_2", b.exceeds_classical()},
                         {"limit_I", format_two_plus(1, r.log_violation)},
                         {"V", r.violation},
                         {"log10_V", r.log_violation / std::numbers::ln10}});
                }
                emit.text = json_text({{"rows", arr}});
            }
            emit.default_name = "protocol" + extension(f);
        } else if (mc->parsed()) {
            const std::uint64_t trials = trial_count(mc_trials);
            if (!(mc_bias >= 0.0 && mc_bias <= 1.0)) {
                throw InvalidParameter("--bias must lie in [0, 1]");
            }
            const PointerFamily fam = parse_family(mc_family);
            const PointerOptions opts = pointer_options(grid_spacing, 1.0);
            const Settings t = tsirelson_settings();
            std::vector<BobStage> stages;
            if (scenario == "single") {
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, mc_g, opts), mc_bias));
            } else if (scenario == "double") {
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, mc_g, opts), mc_bias));
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, 1.0, opts), mc_bias));
            } else if (scenario == "triple") {
                const double g2 = mc_g2 < 0.0 ? mc_g : mc_g2;
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, mc_g, opts), mc_bias));
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, g2, opts), mc_bias));
                stages.push_back(BobStage::with_pointer(
                    t.bob, stage_pointer_for(fam, 1.0, opts), mc_bias));
            } else {
                throw UsageError("unknown scenario '" + scenario +
                                 "' (single, double, triple)");
            }
            const BellChainConfig cfg = make_chain(t.alice, std::move(stages));
            const EmpiricalReport report =
                run_chain(cfg, trials, mc_seed, {threads, 0});
            const ChiSquareReport chi =
                chi_square_report(report, analytic_distribution(cfg));
            const Format f = resolve_format(format, Format::Json);
            if (f == Format::Json) {
                json j = to_json(report, chi);
                j["scenario"] = scenario;
                emit.text = json_text(j);
            } else {
                std::ostringstream os;
                os << "bob,E00,E01,E10,E11,chsh,stderr,analytic_chsh\n";
                for (std::size_t k = 0; k < report.per_bob.size(); ++k) {
                    const auto &b = report.per_bob[k];
                    os << k + 1;
                    for (int x = 0; x < 2; ++x) {
                        for (int y = 0; y < 2; ++y) {
                            os << ',' << format_number(b.correlations.E[x][y]);
                        }
                    }
                    os << ','
                       << (b.chsh ? format_number(*b.chsh) : std::string("nan"))
                       << ',' << format_number(b.chsh_stderr) << ','
                       << format_number(b.analytic_chsh) << '\n';
                }
                emit.text = os.str();
            }
            emit.default_name = "montecarlo" + extension(f);
        } else if (scan->parsed()) {
            std::vector<double> f1;
            std::vector<double> f2;
            if (f1_range.empty() || f2_range.empty()) {
                if (!(resolution > 0.0 && resolution < 0.5)) {
                    throw InvalidParameter("--resolution must lie in (0, 0.5)");
                }
                const auto grid = parse_range("0:1:" + format_number(resolution));
                std::vector<double> inner;
                for (double v : grid) {
                    if (v > 0.0 && v < 1.0 - 0.5 * resolution) {
                        inner.push_back(v);
                    }
                }
                f1 = f1_range.empty() ? inner : parse_range(f1_range);
                f2 = f2_range.empty() ? inner : parse_range(f2_range);
            } else {
                f1 = parse_range(f1_range);
                f2 = parse_range(f2_range);
            }
            const TripleScanReport rep =
                unbiased_triple_scan(f1, f2, settings_by_name(settings_name), threads);
            const Format f = resolve_format(format, Format::Json);
            if (f == Format::Json) {
                json j = to_json(rep);
                j["settings"] = settings_name;
                emit.text = json_text(j);
            } else {
                std::ostringstream os;
                os << "F1,F2,I1,I2,I3,cells,triple_violations\n";
                const auto &b = rep.best;
                os << format_number(b.f1) << ',' << format_number(b.f2) << ','
                   << format_number(b.chsh1) << ',' << format_number(b.chsh2)
                   << ',' << format_number(b.chsh3) << ',' << rep.cells << ','
                   << rep.triple_violations << '\n';
                emit.text = os.str();
            }
            emit.default_name = "triple-scan" + extension(f);
        }

        std::string target = out_path;
        if (target.empty()) {
            if (const char *dir = std::getenv(kOutputDirEnv); dir && *dir) {
                target = (std::filesystem::path(dir) / emit.default_name).string();
            }
        }
        if (target.empty()) {
            out << emit.text;
            out.flush();
        } else {
            write_atomically(target, emit.text);
        }
        return 0;
    } catch (const CLI::CallForHelp &) {
        const CLI::App *target = &app;
        for (const auto *sub : app.get_subcommands()) {
            target = sub;
        }
        out << target->help();
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "weakbell: " << e.what() << "\n";
        return 2;
    } catch (const UsageError &e) {
        err << "weakbell: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParameter &e) {
        err << "weakbell: invalid parameter: " << e.what() << "\n";
        return 2;
    } catch (const InvalidState &e) {
        err << "weakbell: invalid state: " << e.what() << "\n";
        return 2;
    } catch (const PhysicalityError &e) {
        err << "weakbell: unphysical strength: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "weakbell: internal error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, out, err);
}

} // namespace weakbell::cli
