#include "screenlap/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace screenlap::expsum {

namespace {

// exp(-e^u + u), the integrand of 1/r = ∫ exp(-e^s r + s) ds at r = 1
double bump(double u) {
    return std::exp(u - std::exp(u));
}

double parse_number(const std::string& token, const char* what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size()) throw input_error(std::string(what) + ": trailing characters");
        return value;
    } catch (const input_error&) {
        throw;
    } catch (const std::exception&) {
        throw input_error(std::string(what) + ": not a number: '" + token + "'");
    }
}

}  // namespace

ExpSum build(double h, int k1, int k2) {
    if (!(h > 0.0)) throw input_error("expsum::build: step h must be positive");
    ExpSum v;
    v.provenance = GridProvenance{h, k1, k2, 1.0};
    if (k2 < k1) return v;  // empty sum, evaluates to zero
    v.terms.reserve(std::size_t(k2 - k1 + 1));
    for (int k = k1; k <= k2; ++k) {
        const double rate = std::exp(-double(k) * h);
        v.terms.push_back({h * rate, rate});
    }
    return v;
}

ExpSum rescale(const ExpSum& v, double mu) {
    if (!(mu > 0.0)) throw input_error("expsum::rescale: mu must be positive");
    ExpSum out = v;
    for (Term& t : out.terms) {
        t.weight /= mu;
        t.rate /= mu;
    }
    if (out.provenance) out.provenance->mu *= mu;
    return out;
}

double eval(const ExpSum& v, double r) {
    double sum = 0.0;
    for (const Term& t : v.terms) sum += t.weight * std::exp(-t.rate * r);
    return sum;
}

double window_value(double h, int k1, int k2, double s) {
    double sum = 0.0;
    for (int k = k1; k <= k2; ++k) sum += bump(s - double(k) * h);
    return h * sum;
}

RelErrorReport rel_error_sup_on(const ExpSum& v, double r_lo, double r_hi, int grid_points) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw input_error("rel_error_sup: need 0 < r_lo < r_hi");
    if (grid_points == 1) throw input_error("rel_error_sup: need at least two grid points");
    const double s_lo = std::log(r_lo), s_hi = std::log(r_hi);
    if (grid_points <= 0) {
        const double h = v.provenance ? v.provenance->h : 1.0;
        grid_points = std::max(2, int(std::ceil((s_hi - s_lo) / h * 40.0)) + 1);
    }

    RelErrorReport report;
    report.grid_points = grid_points;
    report.argmax_r = r_lo;
    for (int i = 0; i < grid_points; ++i) {
        const double s = s_lo + (s_hi - s_lo) * double(i) / double(grid_points - 1);
        const double r = std::exp(s);
        const double direct = r * eval(v, r) - 1.0;
        if (v.provenance) {
            const auto& p = *v.provenance;
            const double windowed =
                window_value(p.h, p.k1, p.k2, s - std::log(p.mu)) - 1.0;
            report.max_form_gap = std::max(report.max_form_gap, std::abs(direct - windowed));
        }
        if (std::abs(direct) > report.sup_error) {
            report.sup_error = std::abs(direct);
            report.argmax_r = r;
        }
    }
    return report;
}

RelErrorReport rel_error_sup(const ExpSum& v, double R, int grid_points) {
    if (!(R > 1.0)) throw input_error("rel_error_sup: need R > 1");
    return rel_error_sup_on(v, 1.0, R, grid_points);
}

GridParams suggest_params(double mu, double R, double tol, int term_budget) {
    if (!(mu > 0.0)) throw input_error("suggest_params: mu must be positive");
    if (!(tol > 1e-12 && tol < 1.0)) throw input_error("suggest_params: tol outside (1e-12, 1)");
    if (!(R > 100.0 * 1.0001))
        throw input_error("suggest_params: R too small for an interior certification interval");

    // Certification interval in base (mu = 1) coordinates.
    const double s_lo = std::log(10.0);
    const double s_hi = std::log(R / 10.0);
    // Truncation margins keeping the missing window tails below tol/10:
    // the bump decays like e^u to the left of the interval and like
    // exp(-e^u) to the right.
    const double margin_lo = std::log(std::log(10.0 / tol));
    const double margin_hi = std::log(10.0 / tol);

    for (double h = 2.0;; h *= 0.5) {
        GridParams params;
        params.h = h;
        params.k1 = int(std::floor((s_lo - margin_lo) / h));
        params.k2 = int(std::ceil((s_hi + margin_hi) / h));
        const long count = long(params.k2) - long(params.k1) + 1;
        if (count > term_budget)
            throw capacity_error(
                "suggest_params: tolerance not reachable within the term budget");
        const ExpSum candidate = rescale(build(params.h, params.k1, params.k2), mu);
        const RelErrorReport report = rel_error_sup_on(candidate, 10.0 * mu, R * mu / 10.0);
        if (report.sup_error <= tol) return params;
    }
}

std::string to_csv(const ExpSum& v) {
    std::ostringstream out;
    out << "# screenlap.expsum/1\n";
    if (v.provenance) {
        const auto& p = *v.provenance;
        out << std::setprecision(17) << "# provenance: h=" << p.h << " k1=" << p.k1
            << " k2=" << p.k2 << " mu=" << p.mu << "\n";
    }
    out << "weight,rate\n" << std::setprecision(17);
    for (const Term& t : v.terms) out << t.weight << "," << t.rate << "\n";
    return out.str();
}

ExpSum from_csv(const std::string& text) {
    ExpSum v;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("provenance:");
            if (pos != std::string::npos) {
                GridProvenance p;
                std::istringstream fields(line.substr(pos + 11));
                std::string field;
                while (fields >> field) {
                    const auto eq = field.find('=');
                    if (eq == std::string::npos)
                        throw input_error("expsum csv: malformed provenance field");
                    const std::string key = field.substr(0, eq);
                    const std::string val = field.substr(eq + 1);
                    if (key == "h")
                        p.h = parse_number(val, "expsum csv h");
                    else if (key == "k1")
                        p.k1 = int(parse_number(val, "expsum csv k1"));
                    else if (key == "k2")
                        p.k2 = int(parse_number(val, "expsum csv k2"));
                    else if (key == "mu")
                        p.mu = parse_number(val, "expsum csv mu");
                    else
                        throw input_error("expsum csv: unknown provenance key '" + key + "'");
                }
                v.provenance = p;
            }
            continue;
        }
        if (!saw_header) {
            if (line != "weight,rate")
                throw input_error("expsum csv: expected header 'weight,rate'");
            saw_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw input_error("expsum csv: row without comma");
        Term t;
        t.weight = parse_number(line.substr(0, comma), "expsum csv weight");
        t.rate = parse_number(line.substr(comma + 1), "expsum csv rate");
        v.terms.push_back(t);
    }
    if (!saw_header) throw input_error("expsum csv: missing header row");
    return v;
}

}  // namespace screenlap::expsum
