#include "osm/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace osm {
namespace report {

using nlohmann::json;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(const OuterBC& outer) {
    if (outer.kind == OuterBC::Kind::dirichlet) return json{{"kind", "dirichlet"}};
    return json{{"kind", "robin"}, {"pa", outer.p_a}, {"pb", outer.p_b}};
}

json to_json(const ProblemConfig& cfg) {
    return json{{"J", cfg.J},         {"L", cfg.L},           {"Lhat", cfg.Lhat},
                {"delta", cfg.delta}, {"epsilon", cfg.epsilon}, {"outer", to_json(cfg.outer)},
                {"sigma", cfg.sigma}};
}

json to_json(const SearchPolicy& policy) {
    return json{{"coarse_points", policy.coarse_points},
                {"k_min", policy.k_min},
                {"k_tol", policy.k_tol},
                {"max_evals", policy.max_evals},
                {"multistarts", policy.multistarts},
                {"p_hi", policy.p_hi},
                {"p_lo", policy.p_lo},
                {"rho_tol", policy.rho_tol},
                {"seed", policy.seed}};
}

json to_json(const TransmissionParams& params) {
    return json{{"values", params.values}, {"variant", variant_name(params.variant)}};
}

json to_json(const OptimizationResult& result) {
    json maxima = json::array();
    for (const KRho& m : result.maxima) maxima.push_back(json{{"k", m.k}, {"rho", m.rho}});
    return json{{"converged", result.converged},
                {"equioscillation_residual", result.equioscillation_residual},
                {"evaluations", result.evaluations},
                {"maxima", maxima},
                {"params", to_json(result.params)},
                {"rho_star", result.rho_star}};
}

json to_json(const SimulatorReport& rep) {
    return json{{"errors", rep.errors},
                {"iterations", rep.iterations},
                {"measured_rate", rep.measured_rate},
                {"predicted_rate", rep.predicted_rate},
                {"relative_gap", rep.relative_gap}};
}

json to_json(const std::vector<ModeRate>& rates) {
    json rows = json::array();
    for (const ModeRate& r : rates)
        rows.push_back(json{{"k", r.k}, {"measured", r.measured}, {"predicted", r.predicted}});
    return rows;
}

OuterBC outer_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "dirichlet") return OuterBC::dirichlet();
    if (kind == "robin") return OuterBC::robin(j.at("pa").get<double>(), j.at("pb").get<double>());
    throw std::invalid_argument("unknown outer boundary kind '" + kind + "'");
}

ProblemConfig config_from_json(const json& j) {
    ProblemConfig cfg;
    cfg.sigma = j.at("sigma").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.L = j.at("L").get<double>();
    cfg.Lhat = j.at("Lhat").get<double>();
    cfg.delta = j.at("delta").get<double>();
    cfg.J = j.at("J").get<int>();
    cfg.outer = outer_from_json(j.at("outer"));
    return cfg;
}

SearchPolicy policy_from_json(const json& j, SearchPolicy base) {
    SearchPolicy p = base;
    p.coarse_points = j.value("coarse_points", p.coarse_points);
    p.k_min = j.value("k_min", p.k_min);
    p.k_tol = j.value("k_tol", p.k_tol);
    p.max_evals = j.value("max_evals", p.max_evals);
    p.multistarts = j.value("multistarts", p.multistarts);
    p.p_hi = j.value("p_hi", p.p_hi);
    p.p_lo = j.value("p_lo", p.p_lo);
    p.rho_tol = j.value("rho_tol", p.rho_tol);
    p.seed = j.value("seed", p.seed);
    return p;
}

TransmissionParams params_from_json(const json& j) {
    std::string v = j.at("variant").get<std::string>();
    TransmissionParams params;
    if (v == "uniform")
        params.variant = Variant::uniform;
    else if (v == "two_sided")
        params.variant = Variant::two_sided;
    else if (v == "full")
        params.variant = Variant::full;
    else
        throw std::invalid_argument("unknown variant '" + v + "'");
    params.values = j.at("values").get<std::vector<double>>();
    return params;
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < width.size(); ++c) {
            std::string cell = c < row.size() ? row[c] : "";
            cell.resize(width[c], ' ');
            line += cell;
            if (c + 1 < width.size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line + "\n";
    };
    std::string out = emit(header);
    for (const auto& row : rows) out += emit(row);
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out += cells[c];
        if (c + 1 < cells.size()) out += ',';
    }
    out += '\n';
    return out;
}

} // namespace report
} // namespace osm
