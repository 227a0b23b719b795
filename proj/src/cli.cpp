#include "latshell/cli.hpp"

#include "latshell/analysis.hpp"
#include "latshell/config.hpp"
#include "latshell/counting.hpp"
#include "latshell/curvature.hpp"
#include "latshell/energy.hpp"
#include "latshell/errors.hpp"
#include "latshell/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace latshell::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_rational(item));
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const std::string& item : split_list(text)) {
        const Rational r = parse_rational(item);
        if (r.get_den() != 1) throw ConfigError("expected an integer list, got '" + item + "'");
        out.push_back(floor_rational_i64(r));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) out.push_back(std::stod(item));
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    return cfg;
}

// Flags given on the command line win over config-file values.
struct ConfigMerge {
    const CLI::App* sub;
    json cfg;

    bool has(const std::string& key) const { return cfg.contains(key); }

    void scalar(const std::string& flag, std::string& target) const {
        if (sub->count("--" + flag) == 0 && cfg.contains(flag)) {
            const json& v = cfg[flag];
            target = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    void scalar(const std::string& flag, int& target) const {
        if (sub->count("--" + flag) == 0 && cfg.contains(flag)) target = cfg[flag].get<int>();
    }
    void scalar(const std::string& flag, double& target) const {
        if (sub->count("--" + flag) == 0 && cfg.contains(flag)) target = cfg[flag].get<double>();
    }
    void scalar(const std::string& flag, std::uint64_t& target) const {
        if (sub->count("--" + flag) == 0 && cfg.contains(flag))
            target = cfg[flag].get<std::uint64_t>();
    }
    void scalar(const std::string& flag, bool& target) const {
        if (sub->count("--" + flag) == 0 && cfg.contains(flag)) target = cfg[flag].get<bool>();
    }
};

struct BodyFlags {
    std::string kind = "ball";
    int dim = 2;
    int p = 4;
    std::string matrix_text;

    void attach(CLI::App* sub) {
        sub->add_option("--body", kind, "body kind: ball, pball, ellipsoid");
        sub->add_option("--dim", dim, "lattice dimension d >= 2");
        sub->add_option("--p", p, "pball exponent (even, >= 2)");
        sub->add_option("--A", matrix_text, "ellipsoid matrix as JSON, e.g. [[1,0],[0,4]]");
    }

    void merge(const ConfigMerge& m) {
        m.scalar("body", kind);
        m.scalar("dim", dim);
        m.scalar("p", p);
        m.scalar("A", matrix_text);
    }

    ConvexBody resolve(const json* descriptor) const {
        if (descriptor) return body_from_json(*descriptor);
        if (kind == "ball") return ConvexBody::euclidean_ball(dim);
        if (kind == "pball") return ConvexBody::pball(p, dim);
        if (kind == "ellipsoid") {
            if (matrix_text.empty())
                throw ConfigError("ellipsoid body requires --A with a JSON matrix");
            json j;
            j["kind"] = "ellipsoid";
            try {
                j["A"] = json::parse(matrix_text);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("field 'A': ") + e.what());
            }
            return body_from_json(j);
        }
        throw ConfigError("unknown body kind '" + kind + "'");
    }
};

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << contents;
}

// CSV body -> full file with deterministic metadata preamble.
std::string finish_csv(const std::string& experiment, const json& params,
                       const std::string& table) {
    std::ostringstream out;
    CsvWriter csv(out);
    csv.metadata("tool", std::string(kToolVersion));
    csv.metadata("experiment", experiment);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(params.dump())));
    csv.metadata("config_hash", hash);
    out << table;
    return out.str();
}

json summary_json(const std::string& experiment, const json& params, const json& results,
                  bool pass) {
    json j;
    j["experiment"] = experiment;
    j["params"] = params;
    j["results"] = results;
    j["pass"] = pass;
    return j;
}

void emit(const std::string& experiment, const json& params, const json& results, bool pass,
          const std::string& table, const std::string& csv_path, const std::string& json_path) {
    if (!csv_path.empty()) write_file(csv_path, finish_csv(experiment, params, table));
    if (!json_path.empty())
        write_file(json_path, summary_json(experiment, params, results, pass).dump(2) + "\n");
}

std::string convention_name(Convention c) {
    return c == Convention::closed ? "closed" : "half_open";
}

Convention parse_convention(const std::string& name) {
    if (name == "closed") return Convention::closed;
    if (name == "half_open") return Convention::half_open;
    throw ConfigError("unknown convention '" + name + "' (closed or half_open)");
}

// ---------------------------------------------------------------------------
// count-shell
// ---------------------------------------------------------------------------

struct CountShellArgs {
    BodyFlags body;
    std::string R_text;
    std::string delta_text = "0";
    std::string convention = "closed";
    std::string method = "fiber";
    int workers = 0;
    bool override_guard = false;
    bool timings = false;
    std::string csv_path = "count-shell.csv";
    std::string json_path = "count-shell.json";
    std::string config_path;
};

int run_count_shell(const CountShellArgs& a) {
    const json* body_descriptor = nullptr;
    json cfg;
    CountShellArgs args = a;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
        if (cfg.contains("body") && cfg["body"].is_object()) body_descriptor = &cfg["body"];
    }
    const ConvexBody body = args.body.resolve(body_descriptor);
    const Convention conv = parse_convention(args.convention);
    const std::vector<Rational> Rs = parse_rational_list(args.R_text);
    const std::vector<Rational> deltas = parse_rational_list(args.delta_text);

    std::vector<std::string> methods;
    if (args.method == "both")
        methods = {"fiber", "brute"};
    else if (args.method == "fiber" || args.method == "brute")
        methods = {args.method};
    else
        throw ConfigError("unknown method '" + args.method + "' (fiber, brute, both)");

    json params;
    params["body"] = body_to_json(body);
    params["R"] = args.R_text;
    params["delta"] = args.delta_text;
    params["convention"] = args.convention;
    params["method"] = args.method;

    CountOptions opts;
    opts.workers = args.workers;
    opts.override_guard = args.override_guard;

    std::ostringstream table;
    CsvWriter csv(table);
    std::vector<std::string> header = {"R", "delta", "convention", "count", "method",
                                       "points_examined"};
    if (args.timings) header.push_back("wall_time");
    csv.header(header);

    bool pass = true;
    json rows = json::array();
    for (const Rational& R : Rs) {
        for (const Rational& delta : deltas) {
            const ShellQuery query{body, R, delta, conv};
            BigInt first_count;
            bool first = true;
            for (const std::string& method : methods) {
                const CountResult res = method == "fiber" ? shell_count_fiber(query, opts)
                                                          : shell_count_brute(query, opts);
                if (first) {
                    first_count = res.count;
                    first = false;
                } else if (res.count != first_count) {
                    pass = false; // methods disagree: report and fail
                }
                std::vector<std::string> cells = {rational_to_string(R),
                                                  rational_to_string(delta),
                                                  convention_name(conv),
                                                  res.count.get_str(),
                                                  count_method_name(res.method),
                                                  std::to_string(res.points_examined)};
                if (args.timings) cells.push_back(format_double(res.wall_time));
                csv.row(cells);
                json row;
                row["R"] = rational_to_string(R);
                row["delta"] = rational_to_string(delta);
                row["count"] = res.count.get_str();
                row["method"] = count_method_name(res.method);
                rows.push_back(row);
            }
        }
    }

    json results;
    results["rows"] = rows;
    emit("count-shell", params, results, pass, table.str(), args.csv_path, args.json_path);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// count-pairs
// ---------------------------------------------------------------------------

struct CountPairsArgs {
    std::string phase = "parabolic";
    BodyFlags body;
    std::string q_text;
    std::string delta_text = "0";
    std::string C_text = "1";
    std::string convention = "closed";
    std::string method = "diff";
    int workers = 0;
    bool override_guard = false;
    bool timings = false;
    std::string csv_path = "count-pairs.csv";
    std::string json_path = "count-pairs.json";
    std::string config_path;
};

PhaseFunction resolve_phase(const std::string& phase, const BodyFlags& body,
                            const json* phase_descriptor) {
    if (phase_descriptor) return phase_from_json(*phase_descriptor);
    if (phase == "parabolic") return PhaseFunction::parabolic(body.dim);
    if (phase == "diff_gauge") return PhaseFunction::difference_gauge(body.resolve(nullptr));
    throw ConfigError("unknown phase '" + phase + "' (parabolic or diff_gauge)");
}

int run_count_pairs(const CountPairsArgs& a) {
    CountPairsArgs args = a;
    const json* phase_descriptor = nullptr;
    json cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
        if (cfg.contains("phase") && cfg["phase"].is_object()) phase_descriptor = &cfg["phase"];
    }
    const PhaseFunction phi = resolve_phase(args.phase, args.body, phase_descriptor);
    const Convention conv = parse_convention(args.convention);
    const std::vector<Rational> qs = parse_rational_list(args.q_text);
    const std::vector<Rational> deltas = parse_rational_list(args.delta_text);
    const Rational C = parse_rational(args.C_text);
    const int d = phi.dimension();
    const double beta = phi.beta().get_d();

    std::vector<std::string> methods;
    if (args.method == "both")
        methods = {"diff", "brute"};
    else if (args.method == "diff" || args.method == "brute")
        methods = {args.method};
    else
        throw ConfigError("unknown method '" + args.method + "' (diff, brute, both)");

    json params;
    params["phase"] = phase_to_json(phi);
    params["q"] = args.q_text;
    params["delta"] = args.delta_text;
    params["C"] = args.C_text;
    params["convention"] = args.convention;
    params["method"] = args.method;

    CountOptions opts;
    opts.workers = args.workers;
    opts.override_guard = args.override_guard;

    std::ostringstream table;
    CsvWriter csv(table);
    std::vector<std::string> header = {"q",     "delta",       "C",           "convention",
                                       "count", "method",      "qinv_count",  "theorem_bound",
                                       "ratio", "exact_scales"};
    if (args.timings) header.push_back("wall_time");
    csv.header(header);

    bool pass = true;
    json rows = json::array();
    for (const Rational& q : qs) {
        for (const Rational& delta : deltas) {
            const PairQuery query{phi, q, delta, C, conv};
            BigInt first_count;
            bool first = true;
            for (const std::string& method : methods) {
                const CountResult res = method == "diff" ? pair_count_diff_weight(query, opts)
                                                         : pair_count_brute(query, opts);
                if (first) {
                    first_count = res.count;
                    first = false;
                } else if (res.count != first_count) {
                    pass = false;
                }
                const double qd = q.get_d();
                const double value = res.count.get_d() / std::pow(qd, d);
                const double bound = theorem_bound(qd, delta.get_d(), d, beta);
                std::vector<std::string> cells = {rational_to_string(q),
                                                  rational_to_string(delta),
                                                  rational_to_string(C),
                                                  convention_name(conv),
                                                  res.count.get_str(),
                                                  count_method_name(res.method),
                                                  format_double(value),
                                                  format_double(bound),
                                                  format_double(value / bound),
                                                  res.exact_scales ? "1" : "0"};
                if (args.timings) cells.push_back(format_double(res.wall_time));
                csv.row(cells);
                json row;
                row["q"] = rational_to_string(q);
                row["delta"] = rational_to_string(delta);
                row["count"] = res.count.get_str();
                row["method"] = count_method_name(res.method);
                row["exact_scales"] = res.exact_scales;
                rows.push_back(row);
            }
        }
    }

    json results;
    results["rows"] = rows;
    emit("count-pairs", params, results, pass, table.str(), args.csv_path, args.json_path);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// discrepancy-scan
// ---------------------------------------------------------------------------

struct DiscrepancyArgs {
    BodyFlags body;
    std::string R_list_text;
    double ref_exponent = 0.0; // 0: auto from d (Mueller exponents, d >= 3)
    int workers = 0;
    std::string csv_path = "discrepancy-scan.csv";
    std::string json_path = "discrepancy-scan.json";
    std::string config_path;
};

double mueller_reference_exponent(int d) {
    if (d == 3) return 1.0 + 20.0 / 43.0;
    if (d == 4) return 2.0 + 6.0 / 17.0;
    if (d >= 5)
        return d - 2.0 + static_cast<double>(d + 4) / (static_cast<double>(d) * d + d + 2);
    return 0.0; // no reference below d = 3
}

int run_discrepancy_scan(const DiscrepancyArgs& a) {
    DiscrepancyArgs args = a;
    const json* body_descriptor = nullptr;
    json cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
        if (cfg.contains("body") && cfg["body"].is_object()) body_descriptor = &cfg["body"];
    }
    const ConvexBody body = args.body.resolve(body_descriptor);
    const std::vector<Rational> Rs = parse_rational_list(args.R_list_text);
    const int d = body.dimension();
    const double ref = args.ref_exponent > 0 ? args.ref_exponent : mueller_reference_exponent(d);

    json params;
    params["body"] = body_to_json(body);
    params["R"] = args.R_list_text;
    if (ref > 0) params["ref_exponent"] = format_double(ref);

    CountOptions opts;
    opts.workers = args.workers;

    std::ostringstream table;
    CsvWriter csv(table);
    std::vector<std::string> header = {"R", "count", "volume_term", "discrepancy"};
    if (ref > 0) header.push_back("ratio");
    csv.header(header);

    std::vector<std::pair<double, double>> fit_rows;
    int dropped = 0;
    double max_ratio = 0.0;
    for (const Rational& R : Rs) {
        const CountResult n = ball_count(body, R, opts);
        const double rd = std::pow(R.get_d(), d);
        const double volume_term = body.volume() * rd;
        const double disc = n.count.get_d() - volume_term;
        std::vector<std::string> cells = {rational_to_string(R), n.count.get_str(),
                                          format_double(volume_term), format_double(disc)};
        if (ref > 0) {
            const double ratio = std::abs(disc) / std::pow(R.get_d(), ref);
            max_ratio = std::max(max_ratio, ratio);
            cells.push_back(format_double(ratio));
        }
        csv.row(cells);
        if (std::abs(disc) > 0)
            fit_rows.emplace_back(R.get_d(), std::abs(disc));
        else
            ++dropped;
    }

    json results;
    results["dropped_rows"] = dropped;
    if (fit_rows.size() >= 3) {
        const FitResult fit = fit_exponent(fit_rows);
        results["slope"] = fit.slope;
        results["slope_stderr"] = fit.stderr_slope;
        results["r_squared"] = fit.r_squared;
    }
    if (ref > 0) results["max_ratio"] = max_ratio;
    emit("discrepancy-scan", params, results, true, table.str(), args.csv_path, args.json_path);
    return 0;
}

// ---------------------------------------------------------------------------
// ma-check
// ---------------------------------------------------------------------------

struct MaCheckArgs {
    std::string phase = "parabolic";
    BodyFlags body;
    double t = 1.0;
    int samples = 1000;
    std::uint64_t seed = 0;
    double thickness = 0.05;
    double floor = 1e-3;
    double h = 1e-4;
    int order = 2;
    int workers = 0;
    std::string json_path = "ma-check.json";
    std::string config_path;
};

int run_ma_check(const MaCheckArgs& a) {
    MaCheckArgs args = a;
    const json* phase_descriptor = nullptr;
    json cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
        if (cfg.contains("phase") && cfg["phase"].is_object()) phase_descriptor = &cfg["phase"];
    }
    const PhaseFunction phi = resolve_phase(args.phase, args.body, phase_descriptor);

    LevelSetScan scan{phi, args.t, args.samples, args.seed, args.thickness, args.floor};
    const FDScheme scheme{args.h, args.order};
    const CertifyReport report = certify_level_set(scan, scheme, args.workers);

    json params;
    params["phase"] = phase_to_json(phi);
    params["t"] = args.t;
    params["samples"] = args.samples;
    params["seed"] = args.seed;
    params["thickness"] = args.thickness;
    params["floor"] = args.floor;
    params["scheme"] = {{"h", args.h}, {"order", args.order}};

    json results;
    results["min_abs_det"] = report.min_abs_det;
    results["min_grad_x_norm"] = report.min_grad_x_norm;
    results["min_grad_y_norm"] = report.min_grad_y_norm;
    results["n_accepted"] = report.n_accepted;
    results["hypothesis_pass"] = report.hypothesis_pass;
    results["n_draws"] = report.n_draws;
    results["n_rejected_near_diagonal"] = report.n_rejected_near_diagonal;
    results["projection_used"] = report.projection_used;

    const json summary = summary_json("ma-check", params, results, report.hypothesis_pass);
    if (!args.json_path.empty()) write_file(args.json_path, summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return report.hypothesis_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// energy-scan
// ---------------------------------------------------------------------------

struct EnergyScanArgs {
    int d = 2;
    std::string alpha_text = "1,1";
    std::string C_text = "1";
    std::string s_text = "1.5";
    std::string q_list_text = "8,16,32,64,128";
    double slope_tol = 0.0; // 0: no declared tolerance
    double ratio_max = 0.0;
    int workers = 0;
    std::string csv_path = "energy-scan.csv";
    std::string json_path = "energy-scan.json";
    std::string config_path;
};

int run_energy_scan(const EnergyScanArgs& args) {
    const std::vector<Rational> alpha = parse_rational_list(args.alpha_text);
    const Rational C = parse_rational(args.C_text);
    const std::vector<double> s_values = parse_double_list(args.s_text);
    const std::vector<std::int64_t> q_list = parse_int_list(args.q_list_text);

    json params;
    params["d"] = args.d;
    params["alpha"] = args.alpha_text;
    params["C"] = args.C_text;
    params["s"] = args.s_text;
    params["q_list"] = args.q_list_text;
    if (args.slope_tol > 0) params["slope_tol"] = args.slope_tol;
    if (args.ratio_max > 0) params["ratio_max"] = args.ratio_max;

    CountOptions opts;
    opts.workers = args.workers;

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"q", "s", "E", "ratio_to_first"});

    bool pass = true;
    json per_s = json::array();
    for (double s : s_values) {
        const ScanReport report = energy_scan(args.d, alpha, C, s, q_list, opts);
        const double first = report.rows.front().value;
        for (const ScanRow& row : report.rows)
            csv.row({format_double(row.param), format_double(s), format_double(row.value),
                     format_double(first > 0 ? row.value / first : 0.0)});
        json entry;
        entry["s"] = s;
        entry["slope"] = report.fit.slope;
        entry["slope_stderr"] = report.fit.stderr_slope;
        entry["r_squared"] = report.fit.r_squared;
        entry["max_over_min"] = report.max_over_min;
        entry["dropped_rows"] = report.dropped_rows;
        if (args.slope_tol > 0 && std::abs(report.fit.slope) > args.slope_tol) pass = false;
        if (args.ratio_max > 0 && report.max_over_min > args.ratio_max) pass = false;
        per_s.push_back(entry);
    }

    json results;
    results["scans"] = per_s;
    emit("energy-scan", params, results, pass, table.str(), args.csv_path, args.json_path);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sharpness-demo
// ---------------------------------------------------------------------------

struct SharpnessArgs {
    int d = 2;
    std::string t_list_text = "2,3,4,5,6,7,8";
    std::string C_text = "1";
    double slope_tol = 0.0;
    int workers = 0;
    std::string csv_path = "sharpness-demo.csv";
    std::string json_path = "sharpness-demo.json";
    std::string config_path;
};

int run_sharpness_demo(const SharpnessArgs& args) {
    const std::vector<std::int64_t> ts = parse_int_list(args.t_list_text);
    const Rational C = parse_rational(args.C_text);
    const int d = args.d;
    const double beta = 2.0 * d / (d + 1);
    const double expected_slope = 2.0 * d * d / (d + 1);

    json params;
    params["d"] = d;
    params["t_list"] = args.t_list_text;
    params["C"] = args.C_text;
    if (args.slope_tol > 0) params["slope_tol"] = args.slope_tol;

    CountOptions opts;
    opts.workers = args.workers;

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"t", "q", "count", "qinv_count", "theorem_bound", "ratio"});

    std::vector<std::pair<double, double>> fit_rows;
    int dropped = 0;
    for (std::int64_t t : ts) {
        const CountResult res = sharpness_count(d, t, C, opts);
        const double q = std::pow(static_cast<double>(t), d + 1);
        const double value = res.count.get_d() / std::pow(q, d);
        const double bound = theorem_bound(q, 0.0, d, beta);
        BigInt qz;
        mpz_ui_pow_ui(qz.get_mpz_t(), static_cast<unsigned long>(t),
                      static_cast<unsigned long>(d + 1));
        csv.row({std::to_string(t), qz.get_str(), res.count.get_str(), format_double(value),
                 format_double(bound), format_double(value / bound)});
        if (res.count > 0)
            fit_rows.emplace_back(q, res.count.get_d());
        else
            ++dropped;
    }

    json results;
    results["dropped_rows"] = dropped;
    results["expected_slope"] = expected_slope;
    bool pass = true;
    if (fit_rows.size() >= 3) {
        const FitResult fit = fit_exponent(fit_rows);
        results["slope"] = fit.slope;
        results["normalized_slope"] = fit.slope - d;
        results["slope_stderr"] = fit.stderr_slope;
        results["r_squared"] = fit.r_squared;
        if (args.slope_tol > 0 && std::abs(fit.slope - expected_slope) > args.slope_tol)
            pass = false;
    } else if (args.slope_tol > 0) {
        pass = false;
    }
    emit("sharpness-demo", params, results, pass, table.str(), args.csv_path, args.json_path);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string x_col;
    std::string y_col;
    std::string json_path = "fit.json";
};

int run_fit(const FitArgs& args) {
    std::ifstream in(args.input);
    if (!in) throw ConfigError("cannot open input file '" + args.input + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<std::pair<double, double>> rows;
    int x_idx = 0, y_idx = 1;
    int dropped = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_list(line);
        if (!have_header) {
            header = cells;
            have_header = true;
            if (!args.x_col.empty()) {
                const auto it = std::find(header.begin(), header.end(), args.x_col);
                if (it == header.end())
                    throw ConfigError("column '" + args.x_col + "' not found in header");
                x_idx = static_cast<int>(it - header.begin());
            }
            if (!args.y_col.empty()) {
                const auto it = std::find(header.begin(), header.end(), args.y_col);
                if (it == header.end())
                    throw ConfigError("column '" + args.y_col + "' not found in header");
                y_idx = static_cast<int>(it - header.begin());
            }
            continue;
        }
        if (static_cast<std::size_t>(std::max(x_idx, y_idx)) >= cells.size())
            throw ConfigError("row with too few columns in '" + args.input + "'");
        const double x = std::stod(cells[static_cast<std::size_t>(x_idx)]);
        const double y = std::stod(cells[static_cast<std::size_t>(y_idx)]);
        if (x > 0 && y > 0)
            rows.emplace_back(x, y);
        else
            ++dropped;
    }
    if (rows.size() < 3)
        throw ConfigError("degenerate regression: need at least 3 positive rows, got " +
                          std::to_string(rows.size()));
    const FitResult fit = fit_exponent(rows);

    json params;
    params["input"] = args.input;
    params["x_col"] = args.x_col.empty() ? (header.empty() ? "0" : header[0]) : args.x_col;
    params["y_col"] = args.y_col.empty() ? (header.size() > 1 ? header[1] : "1") : args.y_col;
    json results;
    results["slope"] = fit.slope;
    results["intercept"] = fit.intercept;
    results["slope_stderr"] = fit.stderr_slope;
    results["r_squared"] = fit.r_squared;
    results["rows_used"] = rows.size();
    results["dropped_rows"] = dropped;
    const json summary = summary_json("fit", params, results, true);
    if (!args.json_path.empty()) write_file(args.json_path, summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Presets: the named desk-scale experiments with their declared tolerances.
// ---------------------------------------------------------------------------

struct PresetArgs {
    std::string name;
    std::string out_dir = ".";
    int workers = 0;
};

std::string preset_path(const PresetArgs& a, const std::string& stem, const char* ext) {
    return a.out_dir + "/" + stem + ext;
}

int preset_sharpness_d2(const PresetArgs& a) {
    SharpnessArgs args;
    args.d = 2;
    args.t_list_text = "2,3,4,5,6,7,8";
    args.slope_tol = 0.10;
    args.workers = a.workers;
    args.csv_path = preset_path(a, "sharpness-d2", ".csv");
    args.json_path = preset_path(a, "sharpness-d2", ".json");
    return run_sharpness_demo(args);
}

int preset_envelope_d2(const PresetArgs& a) {
    const ConvexBody ball = ConvexBody::euclidean_ball(2);
    const PhaseFunction phi = PhaseFunction::difference_gauge(ball);
    const std::vector<Rational> deltas = {Rational(0), Rational(1, 8), Rational(1)};
    const std::vector<std::int64_t> qs = {16, 32, 64, 128, 256};
    CountOptions opts;
    opts.workers = a.workers;

    json params;
    params["body"] = body_to_json(ball);
    params["delta"] = "0,1/8,1";
    params["q"] = "16,32,64,128,256";
    params["C"] = "1";
    params["halves_rule"] = "second_half_max <= 2 * first_half_max";
    params["slope_tol_delta1"] = 0.15;

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"delta", "q", "count", "qinv_count", "theorem_bound", "ratio"});

    bool pass = true;
    json per_delta = json::array();
    for (const Rational& delta : deltas) {
        std::vector<RatioRow> ratio_rows;
        std::vector<std::pair<double, double>> fit_rows;
        for (std::int64_t q : qs) {
            const PairQuery query{phi, Rational(static_cast<long>(q)), delta, Rational(1),
                                  Convention::closed};
            const CountResult res = pair_count_diff_weight(query, opts);
            const double value = res.count.get_d() / (static_cast<double>(q) * q);
            const double bound = theorem_bound(static_cast<double>(q), delta.get_d(), 2, 1.0);
            csv.row({rational_to_string(delta), std::to_string(q), res.count.get_str(),
                     format_double(value), format_double(bound), format_double(value / bound)});
            ratio_rows.push_back(RatioRow{static_cast<double>(q), value, bound});
            if (value > 0) fit_rows.emplace_back(static_cast<double>(q), value);
        }
        const BoundRatioStats stats = bound_ratio_scan(ratio_rows);
        json entry;
        entry["delta"] = rational_to_string(delta);
        entry["max_ratio"] = stats.max_ratio;
        entry["first_half_max"] = stats.first_half_max;
        entry["second_half_max"] = stats.second_half_max;
        const bool halves_ok = stats.second_half_max <= 2.0 * stats.first_half_max;
        entry["halves_ok"] = halves_ok;
        if (!halves_ok) pass = false;
        if (delta == 1) {
            const FitResult fit = fit_exponent(fit_rows);
            entry["slope"] = fit.slope;
            const bool slope_ok = std::abs(fit.slope - 1.0) <= 0.15;
            entry["slope_ok"] = slope_ok;
            if (!slope_ok) pass = false;
        }
        per_delta.push_back(entry);
    }

    json results;
    results["per_delta"] = per_delta;
    emit("envelope-d2", params, results, pass, table.str(), preset_path(a, "envelope-d2", ".csv"),
         preset_path(a, "envelope-d2", ".json"));
    return pass ? 0 : 1;
}

int preset_discrepancy_d3(const PresetArgs& a) {
    const ConvexBody ball = ConvexBody::euclidean_ball(3);
    CountOptions opts;
    opts.workers = a.workers;
    const double ref = mueller_reference_exponent(3);

    json params;
    params["body"] = body_to_json(ball);
    params["R"] = "2..100 step 2";
    params["ref_exponent"] = format_double(ref);
    params["max_ratio_tol"] = 10.0;
    params["slope_tol"] = 1.5;

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"R", "count", "discrepancy", "ratio"});

    std::vector<std::pair<double, double>> fit_rows;
    int dropped = 0;
    double max_ratio = 0;
    for (std::int64_t R = 2; R <= 100; R += 2) {
        const CountResult n = ball_count(ball, Rational(static_cast<long>(R)), opts);
        const double disc = n.count.get_d() - ball.volume() * std::pow(static_cast<double>(R), 3);
        const double ratio = std::abs(disc) / std::pow(static_cast<double>(R), ref);
        max_ratio = std::max(max_ratio, ratio);
        csv.row({std::to_string(R), n.count.get_str(), format_double(disc),
                 format_double(ratio)});
        if (std::abs(disc) > 0)
            fit_rows.emplace_back(static_cast<double>(R), std::abs(disc));
        else
            ++dropped;
    }
    const FitResult fit = fit_exponent(fit_rows);
    const bool pass = max_ratio <= 10.0 && fit.slope <= 1.5;

    json results;
    results["max_ratio"] = max_ratio;
    results["slope"] = fit.slope;
    results["dropped_rows"] = dropped;
    emit("discrepancy-d3", params, results, pass, table.str(),
         preset_path(a, "discrepancy-d3", ".csv"), preset_path(a, "discrepancy-d3", ".json"));
    return pass ? 0 : 1;
}

int preset_energy_iso_d2(const PresetArgs& a) {
    EnergyScanArgs args;
    args.d = 2;
    args.alpha_text = "1,1";
    args.s_text = "1.5,1.9";
    args.q_list_text = "8,16,32,64,128";
    args.slope_tol = 0.10;
    args.ratio_max = 2.0;
    args.workers = a.workers;
    args.csv_path = preset_path(a, "energy-iso-d2", ".csv");
    args.json_path = preset_path(a, "energy-iso-d2", ".json");
    return run_energy_scan(args);
}

int preset_energy_aniso_d2(const PresetArgs& a) {
    EnergyScanArgs args;
    args.d = 2;
    args.alpha_text = "2/3,4/3";
    args.s_text = "1.5";
    args.q_list_text = "8,27,64,125"; // q = t^3, t = 2..5
    args.slope_tol = 0.15;
    args.workers = a.workers;
    args.csv_path = preset_path(a, "energy-aniso-d2", ".csv");
    args.json_path = preset_path(a, "energy-aniso-d2", ".json");
    return run_energy_scan(args);
}

int preset_dyadic_bounds(const PresetArgs& a) {
    const std::vector<std::pair<double, int>> cases = {{2.0, 1}, {1.5, 2}, {2.0, 2}};
    const std::vector<std::int64_t> qs = {8, 16, 32, 64, 128, 256};

    json params;
    params["alpha"] = "1";
    params["C"] = "1";
    params["q"] = "8,16,32,64,128,256";
    params["cases"] = "(2,1),(1.5,2),(2,2)";
    params["kappa_max"] = 8.0;

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"s", "i", "q", "value", "bound", "ratio", "kappa"});

    double kappa = 0.0;
    for (const auto& [s, i] : cases) {
        for (std::int64_t q : qs) {
            const DyadicSumResult res = dyadic_inner_sum(q, Rational(1), s, i);
            const double k = res.ratio / (std::log2(static_cast<double>(q)) + 1.0);
            kappa = std::max(kappa, k);
            csv.row({format_double(s), std::to_string(i), std::to_string(q),
                     format_double(res.value), format_double(res.bound),
                     format_double(res.ratio), format_double(k)});
        }
    }
    const bool pass = kappa <= 8.0;

    json results;
    results["kappa"] = kappa;
    emit("dyadic-bounds", params, results, pass, table.str(),
         preset_path(a, "dyadic-bounds", ".csv"), preset_path(a, "dyadic-bounds", ".json"));
    return pass ? 0 : 1;
}

int preset_ma_certify(const PresetArgs& a) {
    struct Case {
        const char* name;
        PhaseFunction phi;
        int samples;
        std::uint64_t seed;
        bool expect_pass;
    };
    const std::vector<Case> cases = {
        {"parabolic-d2", PhaseFunction::parabolic(2), 1000, 42, true},
        {"ball-d3", PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(3)), 1000, 43,
         true},
        {"pball4-d2", PhaseFunction::difference_gauge(ConvexBody::pball(4, 2)), 2000, 44, false},
    };

    json params;
    params["t"] = 1.0;
    params["thickness"] = 0.05;
    params["floor"] = 1e-3;
    params["scheme"] = {{"h", 1e-4}, {"order", 2}};

    std::ostringstream table;
    CsvWriter csv(table);
    csv.header({"case", "min_abs_det", "min_grad_x_norm", "min_grad_y_norm", "n_accepted",
                "hypothesis_pass", "expected_pass"});

    bool pass = true;
    json rows = json::array();
    for (const Case& c : cases) {
        LevelSetScan scan{c.phi, 1.0, c.samples, c.seed, 0.05, 1e-3};
        const CertifyReport report = certify_level_set(scan, FDScheme{1e-4, 2}, a.workers);
        const bool ok = report.hypothesis_pass == c.expect_pass;
        if (!ok) pass = false;
        csv.row({c.name, format_double(report.min_abs_det),
                 format_double(report.min_grad_x_norm), format_double(report.min_grad_y_norm),
                 std::to_string(report.n_accepted), report.hypothesis_pass ? "1" : "0",
                 c.expect_pass ? "1" : "0"});
        json row;
        row["case"] = c.name;
        row["min_abs_det"] = report.min_abs_det;
        row["hypothesis_pass"] = report.hypothesis_pass;
        row["expected_pass"] = c.expect_pass;
        row["as_expected"] = ok;
        rows.push_back(row);
    }

    json results;
    results["cases"] = rows;
    emit("ma-certify", params, results, pass, table.str(), preset_path(a, "ma-certify", ".csv"),
         preset_path(a, "ma-certify", ".json"));
    return pass ? 0 : 1;
}

int run_preset(const PresetArgs& args) {
    using Handler = int (*)(const PresetArgs&);
    static const std::vector<std::pair<std::string, Handler>> presets = {
        {"sharpness-d2", preset_sharpness_d2},   {"envelope-d2", preset_envelope_d2},
        {"discrepancy-d3", preset_discrepancy_d3}, {"energy-iso-d2", preset_energy_iso_d2},
        {"energy-aniso-d2", preset_energy_aniso_d2}, {"dyadic-bounds", preset_dyadic_bounds},
        {"ma-certify", preset_ma_certify},
    };
    if (args.name == "list") {
        for (const auto& [name, handler] : presets) std::cout << name << "\n";
        return 0;
    }
    for (const auto& [name, handler] : presets)
        if (name == args.name) return handler(args);
    std::ostringstream msg;
    msg << "unknown preset '" << args.name << "'; available:";
    for (const auto& [name, handler] : presets) msg << " " << name;
    throw ConfigError(msg.str());
}

} // namespace

// ---------------------------------------------------------------------------
// Top-level driver
// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
    CLI::App app{"lattice points near dilated convex surfaces and quasi-homogeneous level sets"};
    app.name("latshell");
    app.require_subcommand(1);

    int rc = 0;

    CountShellArgs shell_args;
    CLI::App* shell = app.add_subcommand("count-shell", "count lattice points in a gauge shell");
    shell_args.body.attach(shell);
    shell->add_option("--R", shell_args.R_text, "dilate (rational; comma list)")->required();
    shell->add_option("--delta", shell_args.delta_text, "thickness (rational; comma list)");
    shell->add_option("--convention", shell_args.convention, "closed or half_open");
    shell->add_option("--method", shell_args.method, "fiber, brute, or both");
    shell->add_option("--workers", shell_args.workers, "worker threads (0 = auto)");
    shell->add_flag("--override-guard", shell_args.override_guard, "disable feasibility guard");
    shell->add_flag("--timings", shell_args.timings, "append wall_time column (non-reproducible)");
    shell->add_option("--csv", shell_args.csv_path, "CSV output path");
    shell->add_option("--json", shell_args.json_path, "JSON summary path");
    shell->add_option("--config", shell_args.config_path, "JSON config file (flags override)");
    shell->callback([&] {
        if (!shell_args.config_path.empty()) {
            ConfigMerge m{shell, load_config_file(shell_args.config_path)};
            shell_args.body.merge(m);
            m.scalar("R", shell_args.R_text);
            m.scalar("delta", shell_args.delta_text);
            m.scalar("convention", shell_args.convention);
            m.scalar("method", shell_args.method);
            m.scalar("workers", shell_args.workers);
            m.scalar("csv", shell_args.csv_path);
            m.scalar("json", shell_args.json_path);
        }
        if (shell_args.R_text.empty()) throw ConfigError("missing required parameter 'R'");
        rc = run_count_shell(shell_args);
    });

    CountPairsArgs pairs_args;
    CLI::App* pairs = app.add_subcommand("count-pairs", "count pairs near a phase level set");
    pairs->add_option("--phase", pairs_args.phase, "parabolic or diff_gauge");
    pairs_args.body.attach(pairs);
    pairs->add_option("--q", pairs_args.q_text, "dilation parameter (rational; comma list)")
        ->required();
    pairs->add_option("--delta", pairs_args.delta_text, "level thickness (rational; comma list)");
    pairs->add_option("--C", pairs_args.C_text, "box constant (rational)");
    pairs->add_option("--convention", pairs_args.convention, "closed or half_open");
    pairs->add_option("--method", pairs_args.method, "diff, brute, or both");
    pairs->add_option("--workers", pairs_args.workers, "worker threads (0 = auto)");
    pairs->add_flag("--override-guard", pairs_args.override_guard, "disable feasibility guard");
    pairs->add_flag("--timings", pairs_args.timings, "append wall_time column (non-reproducible)");
    pairs->add_option("--csv", pairs_args.csv_path, "CSV output path");
    pairs->add_option("--json", pairs_args.json_path, "JSON summary path");
    pairs->add_option("--config", pairs_args.config_path, "JSON config file (flags override)");
    pairs->callback([&] {
        if (!pairs_args.config_path.empty()) {
            ConfigMerge m{pairs, load_config_file(pairs_args.config_path)};
            pairs_args.body.merge(m);
            m.scalar("phase", pairs_args.phase);
            m.scalar("q", pairs_args.q_text);
            m.scalar("delta", pairs_args.delta_text);
            m.scalar("C", pairs_args.C_text);
            m.scalar("convention", pairs_args.convention);
            m.scalar("method", pairs_args.method);
            m.scalar("workers", pairs_args.workers);
            m.scalar("csv", pairs_args.csv_path);
            m.scalar("json", pairs_args.json_path);
        }
        rc = run_count_pairs(pairs_args);
    });

    DiscrepancyArgs disc_args;
    CLI::App* disc = app.add_subcommand("discrepancy-scan", "ball counts vs the volume term");
    disc_args.body.attach(disc);
    disc->add_option("--R-list", disc_args.R_list_text, "grid of dilates (comma list)")
        ->required();
    disc->add_option("--ref-exponent", disc_args.ref_exponent,
                     "reference exponent for |D|/R^e (default: Mueller, d >= 3)");
    disc->add_option("--workers", disc_args.workers, "worker threads (0 = auto)");
    disc->add_option("--csv", disc_args.csv_path, "CSV output path");
    disc->add_option("--json", disc_args.json_path, "JSON summary path");
    disc->add_option("--config", disc_args.config_path, "JSON config file (flags override)");
    disc->callback([&] {
        if (!disc_args.config_path.empty()) {
            ConfigMerge m{disc, load_config_file(disc_args.config_path)};
            disc_args.body.merge(m);
            m.scalar("R-list", disc_args.R_list_text);
            m.scalar("ref-exponent", disc_args.ref_exponent);
            m.scalar("workers", disc_args.workers);
            m.scalar("csv", disc_args.csv_path);
            m.scalar("json", disc_args.json_path);
        }
        rc = run_discrepancy_scan(disc_args);
    });

    MaCheckArgs ma_args;
    CLI::App* ma = app.add_subcommand("ma-check", "certify the curvature hypotheses on a level set");
    ma->add_option("--phase", ma_args.phase, "parabolic or diff_gauge");
    ma_args.body.attach(ma);
    ma->add_option("--t", ma_args.t, "level value (t > 0)");
    ma->add_option("--samples", ma_args.samples, "target accepted samples");
    ma->add_option("--seed", ma_args.seed, "RNG seed (required)")->required();
    ma->add_option("--thickness", ma_args.thickness, "accept |phi - t| <= thickness");
    ma->add_option("--floor", ma_args.floor, "hypothesis floor for the three minima");
    ma->add_option("--fd-step", ma_args.h, "finite-difference step");
    ma->add_option("--fd-order", ma_args.order, "finite-difference order (2 or 4)");
    ma->add_option("--workers", ma_args.workers, "worker threads (0 = auto)");
    ma->add_option("--json", ma_args.json_path, "JSON report path");
    ma->add_option("--config", ma_args.config_path, "JSON config file (flags override)");
    ma->callback([&] {
        if (!ma_args.config_path.empty()) {
            ConfigMerge m{ma, load_config_file(ma_args.config_path)};
            ma_args.body.merge(m);
            m.scalar("phase", ma_args.phase);
            m.scalar("t", ma_args.t);
            m.scalar("samples", ma_args.samples);
            m.scalar("seed", ma_args.seed);
            m.scalar("thickness", ma_args.thickness);
            m.scalar("floor", ma_args.floor);
            m.scalar("fd-step", ma_args.h);
            m.scalar("fd-order", ma_args.order);
            m.scalar("workers", ma_args.workers);
            m.scalar("json", ma_args.json_path);
        }
        rc = run_ma_check(ma_args);
    });

    EnergyScanArgs energy_args;
    CLI::App* energy = app.add_subcommand("energy-scan", "discrete s-energy across a q grid");
    energy->add_option("--d", energy_args.d, "dimension");
    energy->add_option("--alpha", energy_args.alpha_text, "exponents (rational comma list)");
    energy->add_option("--C", energy_args.C_text, "box constant (rational)");
    energy->add_option("--s", energy_args.s_text, "energy exponents (comma list)");
    energy->add_option("--q-list", energy_args.q_list_text, "ascending q grid (>= 4 values)");
    energy->add_option("--slope-tol", energy_args.slope_tol, "declared |slope| tolerance");
    energy->add_option("--ratio-max", energy_args.ratio_max, "declared max/min ratio bound");
    energy->add_option("--workers", energy_args.workers, "worker threads (0 = auto)");
    energy->add_option("--csv", energy_args.csv_path, "CSV output path");
    energy->add_option("--json", energy_args.json_path, "JSON summary path");
    energy->add_option("--config", energy_args.config_path, "JSON config file (flags override)");
    energy->callback([&] {
        if (!energy_args.config_path.empty()) {
            ConfigMerge m{energy, load_config_file(energy_args.config_path)};
            m.scalar("d", energy_args.d);
            m.scalar("alpha", energy_args.alpha_text);
            m.scalar("C", energy_args.C_text);
            m.scalar("s", energy_args.s_text);
            m.scalar("q-list", energy_args.q_list_text);
            m.scalar("slope-tol", energy_args.slope_tol);
            m.scalar("ratio-max", energy_args.ratio_max);
            m.scalar("workers", energy_args.workers);
            m.scalar("csv", energy_args.csv_path);
            m.scalar("json", energy_args.json_path);
        }
        rc = run_energy_scan(energy_args);
    });

    SharpnessArgs sharp_args;
    CLI::App* sharp = app.add_subcommand("sharpness-demo", "parabolic sharpness construction");
    sharp->add_option("--d", sharp_args.d, "dimension");
    sharp->add_option("--t-list", sharp_args.t_list_text, "grid of t (q = t^{d+1})");
    sharp->add_option("--C", sharp_args.C_text, "box constant (rational)");
    sharp->add_option("--slope-tol", sharp_args.slope_tol,
                      "declared tolerance around 2d^2/(d+1)");
    sharp->add_option("--workers", sharp_args.workers, "worker threads (0 = auto)");
    sharp->add_option("--csv", sharp_args.csv_path, "CSV output path");
    sharp->add_option("--json", sharp_args.json_path, "JSON summary path");
    sharp->add_option("--config", sharp_args.config_path, "JSON config file (flags override)");
    sharp->callback([&] {
        if (!sharp_args.config_path.empty()) {
            ConfigMerge m{sharp, load_config_file(sharp_args.config_path)};
            m.scalar("d", sharp_args.d);
            m.scalar("t-list", sharp_args.t_list_text);
            m.scalar("C", sharp_args.C_text);
            m.scalar("slope-tol", sharp_args.slope_tol);
            m.scalar("workers", sharp_args.workers);
            m.scalar("csv", sharp_args.csv_path);
            m.scalar("json", sharp_args.json_path);
        }
        rc = run_sharpness_demo(sharp_args);
    });

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "log-log OLS over CSV columns");
    fit->add_option("--input", fit_args.input, "input CSV")->required();
    fit->add_option("--x-col", fit_args.x_col, "x column name (default: first column)");
    fit->add_option("--y-col", fit_args.y_col, "y column name (default: second column)");
    fit->add_option("--json", fit_args.json_path, "JSON output path");
    fit->callback([&] { rc = run_fit(fit_args); });

    PresetArgs preset_args;
    CLI::App* preset = app.add_subcommand("preset", "run a named experiment (or 'list')");
    preset->add_option("name", preset_args.name, "preset name")->required();
    preset->add_option("--out-dir", preset_args.out_dir, "output directory");
    preset->add_option("--workers", preset_args.workers, "worker threads (0 = auto)");
    preset->callback([&] { rc = run_preset(preset_args); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TooLargeError& e) {
        std::cerr << "infeasible size: " << e.what() << "\n";
        return 2;
    } catch (const LevelSetEmptyError& e) {
        std::cerr << "empty level set: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

} // namespace latshell::cli
