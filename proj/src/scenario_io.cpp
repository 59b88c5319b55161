#include "robest/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace robest {

namespace {

using nlohmann::json;

const json& require_field(const json& doc, const std::string& key, const std::string& context) {
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw std::invalid_argument(context + key + ": missing required field");
    }
    return *it;
}

double number_field(const json& value, const std::string& name) {
    if (!value.is_number()) throw std::invalid_argument(name + ": expected a number");
    return value.get<double>();
}

int int_field(const json& value, const std::string& name) {
    if (!value.is_number_integer()) throw std::invalid_argument(name + ": expected an integer");
    return value.get<int>();
}

Eigen::MatrixXd matrix_field(const json& value, const std::string& name) {
    if (!value.is_array() || value.empty()) {
        throw std::invalid_argument(name + ": expected a non-empty list of rows");
    }
    const size_t rows = value.size();
    size_t cols = 0;
    Eigen::MatrixXd H;
    for (size_t r = 0; r < rows; ++r) {
        const json& row = value[r];
        if (!row.is_array() || row.empty()) {
            throw std::invalid_argument(name + "[" + std::to_string(r) + "]: expected a non-empty row");
        }
        if (r == 0) {
            cols = row.size();
            H.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw std::invalid_argument(name + "[" + std::to_string(r) + "]: ragged row length");
        }
        for (size_t c = 0; c < cols; ++c) {
            H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number_field(row[c], name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return H;
}

json matrix_to_json(const Eigen::MatrixXd& H) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < H.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < H.cols(); ++c) row.push_back(H(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& value, const std::string& name) {
    if (!value.is_array()) throw std::invalid_argument(name + ": expected a list of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
    for (size_t i = 0; i < value.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = number_field(value[i], name + "[" + std::to_string(i) + "]");
    }
    return v;
}

// Infinities are not representable in JSON numbers; both directions use the
// strings "inf" / "-inf".
json margin_to_json(double value) {
    if (std::isinf(value)) return value > 0 ? json("inf") : json("-inf");
    return json(value);
}

double margin_from_json(const json& value, const std::string& name) {
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument(name + ": unknown margin string '" + s + "'");
    }
    return number_field(value, name);
}

NoiseSpec noise_from_json(const json& doc) {
    NoiseSpec noise;
    const std::string kind = require_field(doc, "kind", "noise.").get<std::string>();
    if (kind == "none") {
        noise.kind = NoiseSpec::Kind::None;
    } else if (kind == "gaussian") {
        noise.kind = NoiseSpec::Kind::Gaussian;
    } else if (kind == "uniform") {
        noise.kind = NoiseSpec::Kind::Uniform;
    } else {
        throw std::invalid_argument("noise.kind: unknown value '" + kind + "'");
    }
    if (doc.contains("scale")) noise.scale = number_field(doc["scale"], "noise.scale");
    return noise;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("scenario: expected a JSON object");
    const int n = int_field(require_field(doc, "n", ""), "n");

    const json& sensors = require_field(doc, "sensors", "");
    if (!sensors.is_array() || sensors.empty()) {
        throw std::invalid_argument("sensors: expected a non-empty list");
    }

    std::vector<Eigen::MatrixXd> blocks;
    std::vector<CostSpec> costs;
    for (size_t i = 0; i < sensors.size(); ++i) {
        const std::string prefix = "sensors[" + std::to_string(i) + "].";
        const json& sensor = sensors[i];
        blocks.push_back(matrix_field(require_field(sensor, "H", prefix), prefix + "H"));

        const json& cost_doc = require_field(sensor, "cost", prefix);
        CostSpec cost;
        cost.kind =
            cost_kind_from_name(require_field(cost_doc, "kind", prefix + "cost.").get<std::string>());
        if (cost_doc.contains("lambda")) {
            cost.lambda = number_field(cost_doc["lambda"], prefix + "cost.lambda");
            if (!(cost.lambda > 0.0)) {
                throw std::invalid_argument(prefix + "cost.lambda: must be positive");
            }
        }
        cost.dim = static_cast<int>(blocks.back().rows());
        costs.push_back(cost);
    }

    Scenario scenario{MeasurementModel(n, std::move(blocks)), std::move(costs),
                      int_field(require_field(doc, "p", ""), "p"), NoiseSpec{}, 0};
    scenario.noise = noise_from_json(require_field(doc, "noise", ""));
    const json& seed = require_field(doc, "seed", "");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() &&
                                      seed.get<long long>() < 0)) {
        throw std::invalid_argument("seed: expected a nonnegative integer");
    }
    scenario.seed = seed.get<std::uint64_t>();
    scenario.validate();
    return scenario;
}

json scenario_to_json(const Scenario& scenario) {
    json sensors = json::array();
    for (int i = 0; i < scenario.model.sensor_count(); ++i) {
        json cost{{"kind", cost_kind_name(scenario.costs[static_cast<size_t>(i)].kind)}};
        if (scenario.costs[static_cast<size_t>(i)].kind == CostKind::LassoEnvelope) {
            cost["lambda"] = scenario.costs[static_cast<size_t>(i)].lambda;
        }
        sensors.push_back(json{{"H", matrix_to_json(scenario.model.block(i))}, {"cost", cost}});
    }
    std::string noise_kind = "none";
    if (scenario.noise.kind == NoiseSpec::Kind::Gaussian) noise_kind = "gaussian";
    if (scenario.noise.kind == NoiseSpec::Kind::Uniform) noise_kind = "uniform";
    return json{{"n", scenario.model.state_dim()},
                {"sensors", sensors},
                {"p", scenario.p},
                {"noise", json{{"kind", noise_kind}, {"scale", scenario.noise.scale}}},
                {"seed", scenario.seed}};
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario file: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw std::invalid_argument("scenario file '" + path + "': " + err.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    write_text_file(path, dump_json(scenario_to_json(scenario)));
}

json certificate_to_json(const Certificate& cert) {
    json witness_sensors = json::array();
    for (int i : cert.witness_I) witness_sensors.push_back(i + 1);
    return json{{"decision", decision_name(cert.decision)},
                {"margin_min", margin_to_json(cert.margin_min)},
                {"margin_min_mesh", margin_to_json(cert.margin_min_mesh)},
                {"witness_u", vector_to_json(cert.witness_u)},
                {"witness_I", witness_sensors},
                {"rigorous", cert.rigorous},
                {"mesh_resolution", cert.mesh_resolution},
                {"lipschitz_total", cert.lipschitz_total},
                {"directions_evaluated", cert.directions_evaluated},
                {"tol", cert.tol}};
}

Certificate certificate_from_json(const json& doc) {
    Certificate cert;
    const std::string decision = require_field(doc, "decision", "certificate.").get<std::string>();
    if (decision == "Robust") {
        cert.decision = Decision::Robust;
    } else if (decision == "NotRobust") {
        cert.decision = Decision::NotRobust;
    } else if (decision == "Inconclusive") {
        cert.decision = Decision::Inconclusive;
    } else if (decision == "UnboundedGain") {
        cert.decision = Decision::UnboundedGain;
    } else {
        throw std::invalid_argument("certificate.decision: unknown value '" + decision + "'");
    }
    cert.margin_min = margin_from_json(require_field(doc, "margin_min", "certificate."),
                                       "certificate.margin_min");
    cert.margin_min_mesh = margin_from_json(require_field(doc, "margin_min_mesh", "certificate."),
                                            "certificate.margin_min_mesh");
    cert.witness_u = vector_from_json(require_field(doc, "witness_u", "certificate."),
                                      "certificate.witness_u");
    for (const auto& idx : require_field(doc, "witness_I", "certificate.")) {
        cert.witness_I.push_back(idx.get<int>() - 1);
    }
    cert.rigorous = require_field(doc, "rigorous", "certificate.").get<bool>();
    cert.mesh_resolution = number_field(require_field(doc, "mesh_resolution", "certificate."),
                                        "certificate.mesh_resolution");
    cert.lipschitz_total = number_field(require_field(doc, "lipschitz_total", "certificate."),
                                        "certificate.lipschitz_total");
    cert.directions_evaluated =
        require_field(doc, "directions_evaluated", "certificate.").get<long>();
    cert.tol = number_field(require_field(doc, "tol", "certificate."), "certificate.tol");
    return cert;
}

json estimate_to_json(const EstimateResult& result) {
    return json{{"x_hat", vector_to_json(result.x_hat)},
                {"objective", result.objective},
                {"iterations", result.iterations},
                {"converged", result.converged},
                {"method", solve_method_name(result.method)}};
}

EstimateResult estimate_from_json(const json& doc) {
    EstimateResult result;
    result.x_hat = vector_from_json(require_field(doc, "x_hat", "estimate."), "estimate.x_hat");
    result.objective = number_field(require_field(doc, "objective", "estimate."), "estimate.objective");
    result.iterations = int_field(require_field(doc, "iterations", "estimate."), "estimate.iterations");
    result.converged = require_field(doc, "converged", "estimate.").get<bool>();
    const std::string method = require_field(doc, "method", "estimate.").get<std::string>();
    if (method == "closed_form") {
        result.method = SolveMethod::ClosedForm;
    } else if (method == "weiszfeld") {
        result.method = SolveMethod::Weiszfeld;
    } else if (method == "first_order") {
        result.method = SolveMethod::FirstOrder;
    } else {
        throw std::invalid_argument("estimate.method: unknown value '" + method + "'");
    }
    return result;
}

json sweep_summary_to_json(const std::vector<BreakdownEntry>& entries, std::uint64_t seed,
                           int trials) {
    json list = json::array();
    for (const auto& entry : entries) {
        json points = json::array();
        for (const auto& point : entry.sweep.points) {
            points.push_back(json{{"t", point.t},
                                  {"bias_median", point.bias_median},
                                  {"bias_max", point.bias_max}});
        }
        list.push_back(json{{"p", entry.p},
                            {"certificate", certificate_to_json(entry.certificate)},
                            {"flag", sweep_flag_name(entry.sweep.flag)},
                            {"consistency", entry.consistency},
                            {"points", points}});
    }
    return json{{"seed", seed}, {"trials", trials}, {"entries", list}};
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
}

}  // namespace robest
