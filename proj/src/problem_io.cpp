#include "screenlap/problem_io.hpp"

#include <fstream>

#include <json.hpp>

namespace screenlap::io {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw input_error("malformed JSON in " + path + ": " + e.what());
    }
    return doc;
}

double require_number(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number())
        throw input_error(std::string("problem file: missing numeric field '") + key + "'");
    return doc[key].get<double>();
}

Eigen::MatrixXd qform_from_lower(const json& lower, int d) {
    const int expected = d * (d + 1) / 2;
    if (!lower.is_array() || int(lower.size()) != expected)
        throw input_error("problem file: qform_lower must hold the " +
                          std::to_string(expected) + " lower-triangle entries");
    Eigen::MatrixXd A(d, d);
    int idx = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            if (!lower[idx].is_number())
                throw input_error("problem file: qform_lower entries must be numbers");
            A(i, j) = A(j, i) = lower[idx].get<double>();
            ++idx;
        }
    return A;
}

json lower_from_qform(const Eigen::MatrixXd& A) {
    json lower = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j <= i; ++j) lower.push_back(A(i, j));
    return lower;
}

gausscalc::GaussianSum sum_from_json(const json& terms, int expected_dim) {
    if (!terms.is_array()) throw input_error("problem file: term list must be an array");
    std::vector<gausscalc::GaussianTerm> parsed;
    parsed.reserve(terms.size());
    for (const json& t : terms) {
        const double coeff = require_number(t, "coeff");
        if (!t.contains("center") || !t["center"].is_array() ||
            int(t["center"].size()) != expected_dim)
            throw input_error("problem file: each term needs a center of length " +
                              std::to_string(expected_dim));
        Eigen::VectorXd center(expected_dim);
        for (int i = 0; i < expected_dim; ++i) {
            if (!t["center"][i].is_number())
                throw input_error("problem file: center entries must be numbers");
            center[i] = t["center"][i].get<double>();
        }
        if (!t.contains("qform_lower"))
            throw input_error("problem file: each term needs qform_lower");
        parsed.push_back(gausscalc::make_term(
            coeff, center, qform_from_lower(t["qform_lower"], expected_dim)));
    }
    return gausscalc::make_sum(expected_dim, std::move(parsed));
}

json sum_to_json(const gausscalc::GaussianSum& s) {
    json terms = json::array();
    for (const gausscalc::GaussianTerm& t : s.terms) {
        json term;
        term["coeff"] = t.coeff;
        term["center"] = std::vector<double>(t.center.data(), t.center.data() + t.center.size());
        term["qform_lower"] = lower_from_qform(t.qform);
        terms.push_back(std::move(term));
    }
    return terms;
}

}  // namespace

Problem load_problem(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.contains("schema") || doc["schema"] != "screenlap.problem/1")
        throw input_error("problem file: schema must be 'screenlap.problem/1'");

    Problem p;
    const double electrons = require_number(doc, "electrons");
    if (electrons != double(int(electrons)))
        throw input_error("problem file: electrons must be an integer");
    p.dims = tspace::SystemDims::for_electrons(int(electrons));
    p.mu = require_number(doc, "mu");
    if (!(p.mu > 0)) throw input_error("problem file: mu must be positive");

    if (doc.contains("kernel")) {
        const json& k = doc["kernel"];
        if (!k.is_object()) throw input_error("problem file: kernel must be an object");
        if (k.contains("h") || k.contains("k1") || k.contains("k2")) {
            expsum::GridParams grid;
            grid.h = require_number(k, "h");
            grid.k1 = int(require_number(k, "k1"));
            grid.k2 = int(require_number(k, "k2"));
            p.kernel_grid = grid;
        }
        if (k.contains("tol")) p.kernel_tol = require_number(k, "tol");
        if (!(p.kernel_tol > 0 && p.kernel_tol < 1))
            throw input_error("problem file: kernel tol outside (0,1)");
    }

    if (!doc.contains("rhs")) throw input_error("problem file: missing rhs term list");
    p.rhs = sum_from_json(doc["rhs"], p.dims.n);
    return p;
}

std::string sum_to_json_text(const gausscalc::GaussianSum& s, int indent) {
    return sum_to_json(s).dump(indent);
}

gausscalc::GaussianSum sum_from_json_text(const std::string& text, int expected_dim) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("malformed term list JSON: ") + e.what());
    }
    return sum_from_json(doc, expected_dim);
}

void save_solution(const SolveReport& report, const std::string& path) {
    json doc;
    doc["schema"] = "screenlap.solution/1";
    doc["electrons"] = report.problem.dims.electrons;
    doc["mu"] = report.problem.mu;

    json kernel;
    kernel["certified_tol"] = report.kernel.certified_tol;
    kernel["certified_lo"] = report.kernel.certified_lo;
    kernel["certified_hi"] = report.kernel.certified_hi;
    kernel["terms"] = report.kernel.sum.terms.size();
    if (report.kernel.sum.provenance) {
        const auto& g = *report.kernel.sum.provenance;
        kernel["h"] = g.h;
        kernel["k1"] = g.k1;
        kernel["k2"] = g.k2;
        kernel["rescale_mu"] = g.mu;
    }
    doc["kernel"] = std::move(kernel);

    doc["rhs"] = sum_to_json(report.problem.rhs);
    doc["degenerate"] = sum_to_json(report.degenerate);
    doc["decoupled"] = sum_to_json(report.decoupled);
    doc["residual"] = report.residual;
    doc["max_rel_deviation"] = report.max_rel_deviation;
    doc["points"] = report.points;
    doc["seed"] = report.seed;

    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace screenlap::io
