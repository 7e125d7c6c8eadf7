#pragma once

#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "conic_program.hpp"
#include "conic_solver.hpp"
#include "degree_distribution.hpp"
#include "density_evolution.hpp"
#include "design.hpp"
#include "errors.hpp"
#include "sos.hpp"

namespace ldpcopt {

using nlohmann::json;

// Default-constructible types get nlohmann's to_json/from_json pair; types
// whose constructors validate (distributions, results) expose to_json plus an
// explicit *_from_json factory instead.

inline void to_json(json& j, const NodeKind& k) { j = to_string(k); }

inline void to_json(json& j, const DegreeDistribution& d) {
    json w = json::object();
    for (const auto& [deg, coeff] : d.weights())
        w[std::to_string(deg)] = coeff;
    j = json{{"kind", d.kind()}, {"weights", w}};
}

inline DegreeDistribution distribution_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    NodeKind k;
    if (kind == "variable")
        k = NodeKind::variable;
    else if (kind == "check")
        k = NodeKind::check;
    else
        throw ParamOutOfRange("distribution kind must be variable or check");
    std::map<int, double> w;
    for (const auto& [key, val] : j.at("weights").items()) {
        int deg = 0;
        try {
            deg = std::stoi(key);
        } catch (const std::exception&) {
            throw ParamOutOfRange("degree keys must be integers, got '" + key +
                                  "'");
        }
        w[deg] = val.get<double>();
    }
    return DegreeDistribution(k, w);
}

inline void to_json(json& j, const FeasibilityReport& r) {
    j = json{{"feasible", r.feasible},
             {"max_violation", r.max_violation},
             {"argmax_x", r.argmax_x},
             {"grid_size", r.grid_size},
             {"tolerance", r.tolerance}};
}

inline void from_json(const json& j, FeasibilityReport& r) {
    j.at("feasible").get_to(r.feasible);
    j.at("max_violation").get_to(r.max_violation);
    j.at("argmax_x").get_to(r.argmax_x);
    j.at("grid_size").get_to(r.grid_size);
    j.at("tolerance").get_to(r.tolerance);
}

inline void to_json(json& j, const SolverResiduals& r) {
    j = json{{"primal_eq", r.primal_eq}, {"dual", r.dual}, {"gap", r.gap}};
}

inline void from_json(const json& j, SolverResiduals& r) {
    j.at("primal_eq").get_to(r.primal_eq);
    j.at("dual").get_to(r.dual);
    j.at("gap").get_to(r.gap);
}

namespace detail {

inline SolveStatus solve_status_from_string(std::string_view s) {
    if (s == "optimal") return SolveStatus::optimal;
    if (s == "primal_infeasible") return SolveStatus::primal_infeasible;
    if (s == "unbounded") return SolveStatus::unbounded;
    if (s == "max_iterations") return SolveStatus::max_iterations;
    if (s == "numerical_failure") return SolveStatus::numerical_failure;
    throw ParamOutOfRange("unknown solver status '" + std::string(s) + "'");
}

} // namespace detail

inline void to_json(json& j, const SolverStats& s) {
    j = json{{"status", to_string(s.status)},
             {"iterations", s.iterations},
             {"residuals", s.residuals}};
}

inline void from_json(const json& j, SolverStats& s) {
    s.status =
        detail::solve_status_from_string(j.at("status").get<std::string>());
    j.at("iterations").get_to(s.iterations);
    j.at("residuals").get_to(s.residuals);
}

inline void to_json(json& j, const GramMatrix& g) {
    json rows = json::array();
    for (int i = 0; i < g.dim; ++i) {
        json row = json::array();
        for (int k = 0; k < g.dim; ++k) row.push_back(g.entries(i, k));
        rows.push_back(std::move(row));
    }
    j = json{{"dim", g.dim}, {"entries", rows}};
}

inline void from_json(const json& j, GramMatrix& g) {
    j.at("dim").get_to(g.dim);
    if (g.dim < 0) throw ParamOutOfRange("gram dimension must be nonnegative");
    const auto& rows = j.at("entries");
    if (static_cast<int>(rows.size()) != g.dim)
        throw DimensionMismatch("gram entries do not match dim");
    g.entries.resize(g.dim, g.dim);
    for (int i = 0; i < g.dim; ++i) {
        if (static_cast<int>(rows[i].size()) != g.dim)
            throw DimensionMismatch("gram entries do not match dim");
        for (int k = 0; k < g.dim; ++k)
            g.entries(i, k) = rows[i][k].get<double>();
    }
}

inline void to_json(json& j, const DesignResult& r) {
    j = json{{"distribution", r.distribution},
             {"fixed_side", r.fixed_side},
             {"channel_param", r.channel_param},
             {"design_rate", r.design_rate},
             {"objective", r.objective},
             {"certificate", r.certificate},
             {"validation", r.validation},
             {"solver_stats", r.solver_stats}};
}

inline DesignResult design_result_from_json(const json& j) {
    return DesignResult{distribution_from_json(j.at("distribution")),
                        distribution_from_json(j.at("fixed_side")),
                        j.at("channel_param").get<double>(),
                        j.at("design_rate").get<double>(),
                        j.at("objective").get<double>(),
                        j.at("certificate").get<GramMatrix>(),
                        j.at("validation").get<FeasibilityReport>(),
                        j.at("solver_stats").get<SolverStats>()};
}

inline void to_json(json& j, const JointDesignResult& r) {
    j = json{{"Rs1", r.Rs1},
             {"Rc1", r.Rc1},
             {"Rc2", r.Rc2},
             {"lambda1", r.lambda1},
             {"cap_individual", r.cap_individual},
             {"cap_sum_residual", r.cap_sum_residual},
             {"objective_R1_plus_R2", r.objective_R1_plus_R2},
             {"sw_lower", r.sw_lower},
             {"flags", r.flags},
             {"notes", r.notes},
             {"validation", r.validation},
             {"d_v1", r.d_v1}};
}

inline JointDesignResult joint_result_from_json(const json& j) {
    return JointDesignResult{
        j.at("Rs1").get<double>(),
        j.at("Rc1").get<double>(),
        j.at("Rc2").get<double>(),
        distribution_from_json(j.at("lambda1")),
        j.at("cap_individual").get<double>(),
        j.at("cap_sum_residual").get<double>(),
        j.at("objective_R1_plus_R2").get<double>(),
        j.at("sw_lower").get<double>(),
        j.at("flags").get<std::vector<std::string>>(),
        j.at("notes").get<std::string>(),
        j.at("validation").get<FeasibilityReport>(),
        j.at("d_v1").get<int>()};
}

// Debug dump of a standard-form program; cone entries mirror the block list.
inline json program_debug_dump(const ConicProgram& prog) {
    json cones = json::array();
    for (const auto& blk : prog.cones) {
        if (blk.type == ConeBlock::Type::nonneg)
            cones.push_back(json{{"type", "nonneg"}, {"size", blk.size}});
        else
            cones.push_back(json{{"type", "psd"}, {"side", blk.size}});
    }
    json trips = json::array();
    for (const auto& t : prog.A)
        trips.push_back(json::array({t.row, t.col, t.value}));
    return json{{"c", prog.c}, {"A", trips}, {"b", prog.b}, {"cones", cones}};
}

// 6 significant digits, trailing zeros kept; printf's binary-to-decimal
// conversion rounds half cases to even.
inline std::string format_sig6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.6g", v);
    return buf;
}

enum class TableFormat { json, csv };

inline TableFormat table_format_from_string(std::string_view s) {
    if (s == "json") return TableFormat::json;
    if (s == "csv") return TableFormat::csv;
    throw ParamOutOfRange("format must be json or csv");
}

inline std::string emit_table(const std::vector<JointDesignResult>& results,
                              TableFormat format) {
    if (results.empty())
        throw std::logic_error("emit_table requires at least one result");
    if (format == TableFormat::json) {
        json arr = json::array();
        for (const auto& r : results) arr.push_back(r);
        return arr.dump(2);
    }
    std::string out = "d_v1,R_s1,R_c1,R_c2,objective,flags\n";
    for (const auto& r : results) {
        out += std::to_string(r.d_v1);
        out += ',';
        out += format_sig6(r.Rs1);
        out += ',';
        out += format_sig6(r.Rc1);
        out += ',';
        out += format_sig6(r.Rc2);
        out += ',';
        out += format_sig6(r.objective_R1_plus_R2);
        out += ',';
        for (std::size_t i = 0; i < r.flags.size(); ++i) {
            if (i) out += ';';
            out += r.flags[i];
        }
        out += '\n';
    }
    return out;
}

} // namespace ldpcopt
