// Command-line front end: subcommands dispatch into the header-only library,
// every design is re-validated by the grid oracle before anything is written,
// and results are emitted as JSON (or CSV tables for joint-mac sweeps).
//
// Exit codes: 0 success, 1 infeasible (domain-level), 2 input error,
// 3 solver failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ldpcopt/design.hpp>
#include <ldpcopt/json_io.hpp>
#include <ldpcopt/version.hpp>

using ldpcopt::DegreeDistribution;
using ldpcopt::DesignOptions;
using ldpcopt::DesignResult;
using ldpcopt::FeasibilityReport;
using ldpcopt::JointDesignResult;
using ldpcopt::JointDesignSpec;
using ldpcopt::MissingRequired;
using ldpcopt::NodeKind;
using ldpcopt::RangeError;
using ldpcopt::UnknownKey;
using ldpcopt::json;

namespace {

// ----------------------------------------------------------------- parsing

int parse_int_token(const std::string& tok, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw RangeError(std::string(what) + ": '" + tok +
                         "' is not an integer");
    return v;
}

double parse_double_token(const std::string& tok, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw RangeError(std::string(what) + ": '" + tok +
                         "' is not a number");
    }
}

// compact degree-map syntax: degree:coeff[,degree:coeff...]
std::map<int, double> parse_degree_map(const std::string& text,
                                       const std::string& key) {
    std::map<int, double> m;
    if (text.empty())
        throw RangeError(key + ": degree map must not be empty");
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw RangeError(key + ": expected degree:coeff, got '" + tok +
                             "'");
        int deg = parse_int_token(tok.substr(0, colon), key.c_str());
        double w = parse_double_token(tok.substr(colon + 1), key.c_str());
        if (deg < 2)
            throw RangeError(key + ": degrees must be at least 2, got " +
                             std::to_string(deg));
        if (!(w >= 0.0))
            throw RangeError(key + ": coefficients must be nonnegative");
        if (m.count(deg))
            throw RangeError(key + ": duplicate degree " +
                             std::to_string(deg));
        m[deg] = w;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return m;
}

std::map<int, double> degree_map_from_json(const json& j,
                                           const std::string& key) {
    if (j.is_string()) return parse_degree_map(j.get<std::string>(), key);
    if (!j.is_object())
        throw RangeError(key +
                         ": expected a degree map (object or compact string)");
    std::map<int, double> m;
    for (const auto& [k, v] : j.items()) {
        int deg = parse_int_token(k, key.c_str());
        if (deg < 2)
            throw RangeError(key + ": degrees must be at least 2, got " + k);
        if (!v.is_number())
            throw RangeError(key + ": coefficient for degree " + k +
                             " must be a number");
        m[deg] = v.get<double>();
    }
    if (m.empty()) throw RangeError(key + ": degree map must not be empty");
    return m;
}

// canonical compact text: ascending degrees, shortest-round-trip coefficients
std::string degree_map_to_text(const std::map<int, double>& m) {
    std::string out;
    char buf[32];
    for (const auto& [deg, w] : m) {
        if (!out.empty()) out += ',';
        out += std::to_string(deg);
        out += ':';
        auto res = std::to_chars(buf, buf + sizeof buf, w);
        out.append(buf, res.ptr);
    }
    return out;
}

// "5,6,7" and "5..11" (segments may be mixed: "5..7,9")
std::vector<int> parse_dv1_list(const std::string& text) {
    std::vector<int> vals;
    if (text.empty()) throw RangeError("dv1_list must not be empty");
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t dots = tok.find("..");
        if (dots == std::string::npos) {
            vals.push_back(parse_int_token(tok, "dv1_list"));
        } else {
            int lo = parse_int_token(tok.substr(0, dots), "dv1_list");
            int hi = parse_int_token(tok.substr(dots + 2), "dv1_list");
            if (hi < lo)
                throw RangeError("dv1_list: range '" + tok + "' is reversed");
            for (int d = lo; d <= hi; ++d) vals.push_back(d);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    for (int d : vals)
        if (d < 2)
            throw RangeError("dv1_list: degrees must be at least 2, got " +
                             std::to_string(d));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

// ------------------------------------------------------------ configuration

struct Merged {
    std::string command;
    std::optional<double> epsilon, epsilon1, epsilon2, p_crossover,
        correlation_p, rs2, tol, bisect_tol;
    std::optional<int> max_vdeg, max_cdeg, max_vdeg1, max_iter, grid_size,
        grid;
    std::optional<std::map<int, double>> lambda, rho, rho1, rho2, lambda1,
        lambda2;
    std::optional<std::vector<int>> dv1_list;
    std::optional<std::string> output, format, result;
};

const std::set<std::string>& allowed_keys(const std::string& cmd) {
    static const std::map<std::string, std::set<std::string>> table = {
        {"design-lambda",
         {"command", "output", "epsilon", "rho", "max_vdeg", "tol", "max_iter",
          "grid_size"}},
        {"design-rho",
         {"command", "output", "epsilon", "lambda", "max_cdeg", "tol",
          "max_iter", "grid_size"}},
        {"design-lambda-bsc",
         {"command", "output", "p_crossover", "rho", "max_vdeg", "tol",
          "max_iter", "grid_size"}},
        {"threshold", {"command", "output", "lambda", "rho", "bisect_tol"}},
        {"joint-mac",
         {"command", "output", "epsilon1", "epsilon2", "correlation_p", "rho1",
          "rho2", "lambda2", "lambda1", "max_vdeg1", "dv1_list", "rs2", "tol",
          "max_iter", "grid_size", "format"}},
        {"validate", {"command", "output", "result", "grid"}},
    };
    return table.at(cmd);
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw MissingRequired("config file '" + path + "' cannot be opened");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw RangeError("config file '" + path + "' is not valid JSON: " +
                         e.what());
    }
}

double config_number(const json& v, const std::string& key) {
    if (!v.is_number())
        throw RangeError("config key '" + key + "' must be a number");
    return v.get<double>();
}

int config_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer())
        throw RangeError("config key '" + key + "' must be an integer");
    return v.get<int>();
}

std::string config_string(const json& v, const std::string& key) {
    if (!v.is_string())
        throw RangeError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

// flags were applied first; the config file only fills fields still unset
void apply_config(Merged& m, const json& cfg) {
    if (!cfg.is_object()) throw RangeError("config file must hold an object");
    const auto& allowed = allowed_keys(m.command);
    for (const auto& [key, value] : cfg.items()) {
        if (!allowed.count(key))
            throw UnknownKey("config key '" + key + "' is not used by " +
                             m.command);
        if (key == "command") {
            if (config_string(value, key) != m.command)
                throw RangeError("config command '" +
                                 value.get<std::string>() +
                                 "' does not match invoked command '" +
                                 m.command + "'");
            continue;
        }
        auto set_num = [&](std::optional<double>& slot) {
            if (!slot) slot = config_number(value, key);
        };
        auto set_int = [&](std::optional<int>& slot) {
            if (!slot) slot = config_integer(value, key);
        };
        auto set_map = [&](std::optional<std::map<int, double>>& slot) {
            if (!slot) slot = degree_map_from_json(value, key);
        };
        auto set_str = [&](std::optional<std::string>& slot) {
            if (!slot) slot = config_string(value, key);
        };
        if (key == "epsilon") set_num(m.epsilon);
        else if (key == "epsilon1") set_num(m.epsilon1);
        else if (key == "epsilon2") set_num(m.epsilon2);
        else if (key == "p_crossover") set_num(m.p_crossover);
        else if (key == "correlation_p") set_num(m.correlation_p);
        else if (key == "rs2") set_num(m.rs2);
        else if (key == "tol") set_num(m.tol);
        else if (key == "bisect_tol") set_num(m.bisect_tol);
        else if (key == "max_vdeg") set_int(m.max_vdeg);
        else if (key == "max_cdeg") set_int(m.max_cdeg);
        else if (key == "max_vdeg1") set_int(m.max_vdeg1);
        else if (key == "max_iter") set_int(m.max_iter);
        else if (key == "grid_size") set_int(m.grid_size);
        else if (key == "grid") set_int(m.grid);
        else if (key == "lambda") set_map(m.lambda);
        else if (key == "rho") set_map(m.rho);
        else if (key == "rho1") set_map(m.rho1);
        else if (key == "rho2") set_map(m.rho2);
        else if (key == "lambda1") set_map(m.lambda1);
        else if (key == "lambda2") set_map(m.lambda2);
        else if (key == "dv1_list") {
            if (!m.dv1_list) {
                if (value.is_string()) {
                    m.dv1_list = parse_dv1_list(value.get<std::string>());
                } else if (value.is_array()) {
                    std::vector<int> vals;
                    for (const auto& e : value)
                        vals.push_back(config_integer(e, key));
                    for (int d : vals)
                        if (d < 2)
                            throw RangeError(
                                "dv1_list: degrees must be at least 2");
                    if (vals.empty())
                        throw RangeError("dv1_list must not be empty");
                    std::sort(vals.begin(), vals.end());
                    vals.erase(std::unique(vals.begin(), vals.end()),
                               vals.end());
                    m.dv1_list = std::move(vals);
                } else {
                    throw RangeError(
                        "config key 'dv1_list' must be an array or a compact "
                        "string");
                }
            }
        }
        else if (key == "output") set_str(m.output);
        else if (key == "format") set_str(m.format);
        else if (key == "result") set_str(m.result);
    }
}

void require(bool present, const char* key, const std::string& cmd) {
    if (!present)
        throw MissingRequired(std::string("'") + key + "' is required by " +
                              cmd);
}

void check_unit_interval(std::optional<double> v, const char* key) {
    if (v && !(*v > 0.0 && *v < 1.0))
        throw RangeError(std::string(key) + " must lie in (0, 1)");
}

// range validation happens before dispatch so bad input never reaches the
// solver; the library re-validates with its own error types as a backstop
void validate_ranges(const Merged& m) {
    check_unit_interval(m.epsilon, "epsilon");
    check_unit_interval(m.epsilon1, "epsilon1");
    check_unit_interval(m.epsilon2, "epsilon2");
    if (m.p_crossover && !(*m.p_crossover > 0.0 && *m.p_crossover < 0.5))
        throw RangeError("p_crossover must lie in (0, 0.5)");
    if (m.correlation_p &&
        !(*m.correlation_p > 0.5 && *m.correlation_p <= 1.0))
        throw RangeError("correlation_p must lie in (0.5, 1]");
    if (m.rs2 && !(*m.rs2 >= 0.0 && *m.rs2 <= 1.0))
        throw RangeError("rs2 must lie in [0, 1]");
    if (m.tol && !(*m.tol > 0.0 && *m.tol < 1.0))
        throw RangeError("tol must lie in (0, 1)");
    if (m.bisect_tol && !(*m.bisect_tol >= 1e-8))
        throw RangeError("bisect_tol must be at least 1e-8");
    if (m.max_vdeg && *m.max_vdeg < 2)
        throw RangeError("max_vdeg must be at least 2");
    if (m.max_cdeg && *m.max_cdeg < 2)
        throw RangeError("max_cdeg must be at least 2");
    if (m.max_vdeg1 && *m.max_vdeg1 < 2)
        throw RangeError("max_vdeg1 must be at least 2");
    if (m.max_iter && *m.max_iter < 1)
        throw RangeError("max_iter must be at least 1");
    if (m.grid_size && *m.grid_size < 100)
        throw RangeError("grid_size must be at least 100");
    if (m.grid && *m.grid < 100)
        throw RangeError("grid must be at least 100");
    if (m.format && *m.format != "json" && *m.format != "csv")
        throw RangeError("format must be json or csv");
}

// ------------------------------------------------------------------ output

std::string iso_timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json envelope(const json& echo, json results, json validation) {
    return json{{"tool_version", ldpcopt::tool_version},
                {"config_echo", echo},
                {"results", std::move(results)},
                {"validation", std::move(validation)},
                {"timestamp", iso_timestamp()}};
}

void write_artifact(const std::optional<std::string>& path,
                    const std::string& text) {
    if (path) {
        std::ofstream f(*path);
        if (!f)
            throw RangeError("output path '" + *path + "' cannot be opened");
        f << text << '\n';
    } else {
        std::fputs(text.c_str(), stdout);
        std::fputc('\n', stdout);
    }
}

json aggregate_validation(const std::vector<FeasibilityReport>& reports) {
    FeasibilityReport agg;
    agg.feasible = true;
    bool first = true;
    for (const auto& r : reports) {
        agg.feasible = agg.feasible && r.feasible;
        if (first || r.max_violation > agg.max_violation) {
            agg.max_violation = r.max_violation;
            agg.argmax_x = r.argmax_x;
            first = false;
        }
        agg.grid_size = r.grid_size;
        agg.tolerance = r.tolerance;
    }
    return json(agg);
}

// ---------------------------------------------------------------- dispatch

DesignOptions design_options(const Merged& m) {
    DesignOptions opts;
    if (m.tol) opts.solver.tol = *m.tol;
    if (m.max_iter) opts.solver.max_iter = *m.max_iter;
    if (m.grid_size) opts.grid_size = *m.grid_size;
    return opts;
}

json echo_common(const Merged& m) {
    json echo = json::object();
    echo["command"] = m.command;
    if (m.output) echo["output"] = *m.output;
    return echo;
}

void echo_solver_opts(json& echo, const Merged& m) {
    DesignOptions defaults;
    echo["tol"] = m.tol.value_or(defaults.solver.tol);
    echo["max_iter"] = m.max_iter.value_or(defaults.solver.max_iter);
    echo["grid_size"] = m.grid_size.value_or(defaults.grid_size);
}

int run_design_lambda(const Merged& m) {
    require(m.epsilon.has_value(), "epsilon", m.command);
    require(m.rho.has_value(), "rho", m.command);
    require(m.max_vdeg.has_value(), "max_vdeg", m.command);
    json echo = echo_common(m);
    echo["epsilon"] = *m.epsilon;
    echo["rho"] = degree_map_to_text(*m.rho);
    echo["max_vdeg"] = *m.max_vdeg;
    echo_solver_opts(echo, m);

    DegreeDistribution rho(NodeKind::check, *m.rho);
    auto res = ldpcopt::optimize_lambda_bec(rho, *m.epsilon, *m.max_vdeg,
                                            design_options(m));
    write_artifact(m.output, envelope(echo, json::array({res}),
                                      json(res.validation))
                                 .dump(2));
    return 0;
}

int run_design_rho(const Merged& m) {
    require(m.epsilon.has_value(), "epsilon", m.command);
    require(m.lambda.has_value(), "lambda", m.command);
    require(m.max_cdeg.has_value(), "max_cdeg", m.command);
    json echo = echo_common(m);
    echo["epsilon"] = *m.epsilon;
    echo["lambda"] = degree_map_to_text(*m.lambda);
    echo["max_cdeg"] = *m.max_cdeg;
    echo_solver_opts(echo, m);

    DegreeDistribution lambda(NodeKind::variable, *m.lambda);
    auto res = ldpcopt::optimize_rho_bec(lambda, *m.epsilon, *m.max_cdeg,
                                         design_options(m));
    write_artifact(m.output, envelope(echo, json::array({res}),
                                      json(res.validation))
                                 .dump(2));
    return 0;
}

int run_design_lambda_bsc(const Merged& m) {
    require(m.p_crossover.has_value(), "p_crossover", m.command);
    require(m.rho.has_value(), "rho", m.command);
    require(m.max_vdeg.has_value(), "max_vdeg", m.command);
    json echo = echo_common(m);
    echo["p_crossover"] = *m.p_crossover;
    echo["rho"] = degree_map_to_text(*m.rho);
    echo["max_vdeg"] = *m.max_vdeg;
    echo_solver_opts(echo, m);

    DegreeDistribution rho(NodeKind::check, *m.rho);
    auto res = ldpcopt::optimize_lambda_bsc(rho, *m.p_crossover, *m.max_vdeg,
                                            design_options(m));
    write_artifact(m.output, envelope(echo, json::array({res}),
                                      json(res.validation))
                                 .dump(2));
    return 0;
}

int run_threshold(const Merged& m) {
    require(m.lambda.has_value(), "lambda", m.command);
    require(m.rho.has_value(), "rho", m.command);
    double bisect_tol = m.bisect_tol.value_or(1e-4);
    json echo = echo_common(m);
    echo["lambda"] = degree_map_to_text(*m.lambda);
    echo["rho"] = degree_map_to_text(*m.rho);
    echo["bisect_tol"] = bisect_tol;

    DegreeDistribution lambda(NodeKind::variable, *m.lambda);
    DegreeDistribution rho(NodeKind::check, *m.rho);
    double thr = ldpcopt::threshold_bec(lambda, rho, bisect_tol);

    // confirm convergence just inside the reported threshold
    FeasibilityReport rep;
    rep.tolerance = bisect_tol;
    if (thr > 0.0) {
        double probe = std::max(thr - bisect_tol, 0.5 * thr);
        auto rec = ldpcopt::de_recursion_bec(lambda, rho, probe, 200000);
        rep.feasible = rec.converged;
        rep.max_violation = rec.converged ? 0.0 : rec.final_x;
        rep.argmax_x = probe;
    } else {
        rep.feasible = true;
    }
    write_artifact(m.output,
                   envelope(echo, json::array({json{{"threshold", thr}}}),
                            json(rep))
                       .dump(2));
    return 0;
}

int run_joint_mac(const Merged& m) {
    require(m.epsilon1.has_value(), "epsilon1", m.command);
    require(m.epsilon2.has_value(), "epsilon2", m.command);
    require(m.correlation_p.has_value(), "correlation_p", m.command);
    require(m.rho1.has_value(), "rho1", m.command);
    require(m.rho2.has_value(), "rho2", m.command);
    require(m.lambda2.has_value(), "lambda2", m.command);
    int modes = (m.lambda1 ? 1 : 0) + (m.dv1_list ? 1 : 0) +
                (m.max_vdeg1 ? 1 : 0);
    if (modes == 0)
        throw MissingRequired(
            "joint-mac needs one of lambda1, dv1_list, or max_vdeg1");
    if (modes > 1)
        throw RangeError(
            "lambda1, dv1_list, and max_vdeg1 are mutually exclusive");

    json echo = echo_common(m);
    echo["epsilon1"] = *m.epsilon1;
    echo["epsilon2"] = *m.epsilon2;
    echo["correlation_p"] = *m.correlation_p;
    echo["rho1"] = degree_map_to_text(*m.rho1);
    echo["rho2"] = degree_map_to_text(*m.rho2);
    echo["lambda2"] = degree_map_to_text(*m.lambda2);
    if (m.lambda1) echo["lambda1"] = degree_map_to_text(*m.lambda1);
    if (m.dv1_list) echo["dv1_list"] = *m.dv1_list;
    if (m.max_vdeg1) echo["max_vdeg1"] = *m.max_vdeg1;
    echo["rs2"] = m.rs2.value_or(1.0);
    echo["format"] = m.format.value_or("json");
    echo_solver_opts(echo, m);

    auto base_spec = [&]() {
        return JointDesignSpec{*m.epsilon1,
                               *m.epsilon2,
                               *m.correlation_p,
                               DegreeDistribution(NodeKind::check, *m.rho1),
                               DegreeDistribution(NodeKind::check, *m.rho2),
                               DegreeDistribution(NodeKind::variable,
                                                  *m.lambda2),
                               std::nullopt,
                               0,
                               m.rs2.value_or(1.0)};
    };
    auto opts = design_options(m);

    std::vector<JointDesignResult> results;
    if (m.dv1_list) {
        for (int d : *m.dv1_list) {
            auto spec = base_spec();
            spec.lambda1_fixed =
                DegreeDistribution(NodeKind::variable, {{d, 1.0}});
            results.push_back(ldpcopt::design_joint_mac(spec, opts));
        }
    } else if (m.lambda1) {
        auto spec = base_spec();
        spec.lambda1_fixed = DegreeDistribution(NodeKind::variable, *m.lambda1);
        results.push_back(ldpcopt::design_joint_mac(spec, opts));
    } else {
        auto spec = base_spec();
        spec.max_vdeg1 = *m.max_vdeg1;
        results.push_back(ldpcopt::design_joint_mac(spec, opts));
    }
    std::sort(results.begin(), results.end(),
              [](const auto& a, const auto& b) { return a.d_v1 < b.d_v1; });

    if (m.format.value_or("json") == "csv") {
        write_artifact(m.output,
                       ldpcopt::emit_table(results,
                                           ldpcopt::TableFormat::csv));
        return 0;
    }
    std::vector<FeasibilityReport> reports;
    for (const auto& r : results) reports.push_back(r.validation);
    write_artifact(m.output, envelope(echo, json(results),
                                      aggregate_validation(reports))
                                 .dump(2));
    return 0;
}

// ---------------------------------------------------------------- validate

FeasibilityReport recheck_grid(const ldpcopt::json& config_echo,
                               const DesignResult& res, int grid) {
    const std::string cmd = config_echo.at("command").get<std::string>();
    double tol = res.validation.tolerance > 0.0 ? res.validation.tolerance
                                                : 1e-6;
    if (cmd == "design-lambda") {
        return ldpcopt::check_feasibility_grid_fn(
            [&](double x) {
                return ldpcopt::eval_de_bec(res.distribution, res.fixed_side,
                                            res.channel_param, x);
            },
            1.0, grid, tol);
    }
    if (cmd == "design-rho") {
        return ldpcopt::check_feasibility_grid_fn(
            [&](double x) {
                return ldpcopt::eval_de_bec_dual(res.fixed_side,
                                                 res.distribution,
                                                 res.channel_param, x);
            },
            1.0, grid, tol);
    }
    if (cmd == "design-lambda-bsc") {
        return ldpcopt::check_feasibility_grid_fn(
            [&](double x) {
                return ldpcopt::eval_de_bsc(res.distribution, res.fixed_side,
                                            res.channel_param, x);
            },
            res.channel_param, grid, tol);
    }
    throw RangeError("result command '" + cmd +
                     "' does not produce a single-channel design");
}

int run_validate(const Merged& m) {
    require(m.result.has_value(), "result", m.command);
    int grid = m.grid.value_or(100000);
    json echo = echo_common(m);
    echo["result"] = *m.result;
    echo["grid"] = grid;

    std::ifstream f(*m.result);
    if (!f)
        throw MissingRequired("result file '" + *m.result +
                              "' cannot be opened");
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw RangeError("result file '" + *m.result +
                         "' is not valid JSON: " + e.what());
    }
    json cfg;
    json stored;
    try {
        cfg = doc.at("config_echo");
        stored = doc.at("results");
    } catch (const json::exception&) {
        throw RangeError("result file lacks config_echo/results");
    }
    const std::string cmd = cfg.at("command").get<std::string>();

    std::vector<FeasibilityReport> reports;
    json detail = json::array();
    auto add = [&](const FeasibilityReport& rep, const json& extra) {
        reports.push_back(rep);
        json entry = json(rep);
        for (const auto& [k, v] : extra.items()) entry[k] = v;
        detail.push_back(entry);
    };

    if (cmd == "design-lambda" || cmd == "design-rho" ||
        cmd == "design-lambda-bsc") {
        for (const auto& item : stored) {
            auto res = ldpcopt::design_result_from_json(item);
            auto rep = recheck_grid(cfg, res, grid);
            double rate =
                cmd == "design-rho"
                    ? ldpcopt::design_rate(res.fixed_side, res.distribution)
                    : ldpcopt::design_rate(res.distribution, res.fixed_side);
            if (std::abs(rate - res.design_rate) > 1e-9) {
                rep.feasible = false;
                add(rep, json{{"rate_mismatch",
                               std::abs(rate - res.design_rate)}});
            } else {
                add(rep, json::object());
            }
        }
    } else if (cmd == "joint-mac") {
        DegreeDistribution rho1(
            NodeKind::check,
            parse_degree_map(cfg.at("rho1").get<std::string>(), "rho1"));
        double eps1 = cfg.at("epsilon1").get<double>();
        for (const auto& item : stored) {
            auto res = ldpcopt::joint_result_from_json(item);
            double tol = res.validation.tolerance > 0.0
                             ? res.validation.tolerance
                             : 1e-6;
            auto rep = ldpcopt::check_feasibility_grid_fn(
                [&](double x) {
                    return ldpcopt::eval_de_bec_dual(res.lambda1, rho1, eps1,
                                                     x);
                },
                1.0, grid, tol);
            double rc1 = ldpcopt::design_rate(res.lambda1, rho1);
            json extra = json::object();
            if (std::abs(rc1 - res.Rc1) > 1e-9) {
                rep.feasible = false;
                extra["rate_mismatch"] = std::abs(rc1 - res.Rc1);
            }
            if (!(res.Rs1 >= 0.0 && res.Rs1 <= 1.0)) {
                rep.feasible = false;
                extra["rs1_out_of_range"] = res.Rs1;
            }
            add(rep, extra);
        }
    } else if (cmd == "threshold") {
        DegreeDistribution lambda(
            NodeKind::variable,
            parse_degree_map(cfg.at("lambda").get<std::string>(), "lambda"));
        DegreeDistribution rho(
            NodeKind::check,
            parse_degree_map(cfg.at("rho").get<std::string>(), "rho"));
        double bt = cfg.at("bisect_tol").get<double>();
        for (const auto& item : stored) {
            double claimed = item.at("threshold").get<double>();
            double redone = ldpcopt::threshold_bec(lambda, rho, bt);
            FeasibilityReport rep;
            rep.feasible = std::abs(redone - claimed) <= 2.0 * bt;
            rep.max_violation = std::abs(redone - claimed);
            rep.tolerance = 2.0 * bt;
            add(rep, json{{"recomputed", redone}});
        }
    } else {
        throw RangeError("cannot validate results of command '" + cmd + "'");
    }

    json agg = aggregate_validation(reports);
    bool ok = agg.at("feasible").get<bool>();
    write_artifact(m.output, envelope(echo, detail, agg).dump(2));
    if (!ok)
        std::fprintf(stderr,
                     "validation failed: worst violation %.3e (see report)\n",
                     agg.at("max_violation").get<double>());
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC degree-distribution design with certified decoding "
                 "constraints"};
    app.require_subcommand(1);

    Merged m;
    std::optional<std::string> config_path;
    std::optional<std::string> lambda_text, rho_text, rho1_text, rho2_text,
        lambda1_text, lambda2_text, dv1_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "JSON config file; flags take precedence");
        sub->add_option("--output", m.output, "write the artifact here");
    };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--tol", m.tol, "interior-point tolerance");
        sub->add_option("--max-iter", m.max_iter, "iteration cap");
        sub->add_option("--grid-size", m.grid_size,
                        "validation grid resolution");
    };

    auto* dl = app.add_subcommand("design-lambda",
                                  "variable-side design on the erasure "
                                  "channel");
    dl->add_option("--epsilon", m.epsilon, "erasure probability");
    dl->add_option("--rho", rho_text, "fixed check side, degree:coeff[,...]");
    dl->add_option("--max-vdeg", m.max_vdeg, "largest variable degree");
    add_common(dl);
    add_solver(dl);

    auto* dr = app.add_subcommand("design-rho",
                                  "check-side design on the erasure channel");
    dr->add_option("--epsilon", m.epsilon, "erasure probability");
    dr->add_option("--lambda", lambda_text,
                   "fixed variable side, degree:coeff[,...]");
    dr->add_option("--max-cdeg", m.max_cdeg, "largest check degree");
    add_common(dr);
    add_solver(dr);

    auto* db = app.add_subcommand("design-lambda-bsc",
                                  "variable-side design on the crossover "
                                  "channel");
    db->add_option("--p-crossover", m.p_crossover, "crossover probability");
    db->add_option("--rho", rho_text, "fixed check side, degree:coeff[,...]");
    db->add_option("--max-vdeg", m.max_vdeg, "largest variable degree");
    add_common(db);
    add_solver(db);

    auto* th = app.add_subcommand("threshold",
                                  "erasure decoding threshold by bisection");
    th->add_option("--lambda", lambda_text, "variable side");
    th->add_option("--rho", rho_text, "check side");
    th->add_option("--bisect-tol", m.bisect_tol, "bisection tolerance");
    add_common(th);

    auto* jm = app.add_subcommand("joint-mac",
                                  "two-sender design over the erasure MAC");
    jm->add_option("--epsilon1", m.epsilon1, "sender-1 erasure probability");
    jm->add_option("--epsilon2", m.epsilon2, "sender-2 erasure probability");
    jm->add_option("--correlation-p", m.correlation_p, "source correlation");
    jm->add_option("--rho1", rho1_text, "sender-1 check side");
    jm->add_option("--rho2", rho2_text, "sender-2 check side");
    jm->add_option("--lambda1", lambda1_text, "fixed sender-1 variable side");
    jm->add_option("--lambda2", lambda2_text, "sender-2 variable side");
    jm->add_option("--max-vdeg1", m.max_vdeg1,
                   "optimize sender 1 up to this degree");
    jm->add_option("--dv1-list", dv1_text,
                   "sweep regular sender-1 degrees, e.g. 5..11 or 5,6,7");
    jm->add_option("--rs2", m.rs2, "sender-2 source rate");
    jm->add_option("--format", m.format, "table format: json or csv");
    add_common(jm);
    add_solver(jm);

    auto* va = app.add_subcommand("validate",
                                  "re-check a result file with the grid "
                                  "oracle");
    va->add_option("--result", m.result, "result JSON to re-check");
    va->add_option("--grid", m.grid, "oracle grid resolution");
    add_common(va);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        m.command = app.get_subcommands().front()->get_name();
        if (lambda_text) m.lambda = parse_degree_map(*lambda_text, "lambda");
        if (rho_text) m.rho = parse_degree_map(*rho_text, "rho");
        if (rho1_text) m.rho1 = parse_degree_map(*rho1_text, "rho1");
        if (rho2_text) m.rho2 = parse_degree_map(*rho2_text, "rho2");
        if (lambda1_text)
            m.lambda1 = parse_degree_map(*lambda1_text, "lambda1");
        if (lambda2_text)
            m.lambda2 = parse_degree_map(*lambda2_text, "lambda2");
        if (dv1_text) m.dv1_list = parse_dv1_list(*dv1_text);
        if (config_path) apply_config(m, load_config_file(*config_path));
        validate_ranges(m);

        if (m.command == "design-lambda") return run_design_lambda(m);
        if (m.command == "design-rho") return run_design_rho(m);
        if (m.command == "design-lambda-bsc") return run_design_lambda_bsc(m);
        if (m.command == "threshold") return run_threshold(m);
        if (m.command == "joint-mac") return run_joint_mac(m);
        return run_validate(m);
    } catch (const ldpcopt::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const ldpcopt::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 1;
    } catch (const ldpcopt::SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected failure: %s\n", e.what());
        return 3;
    }
}
