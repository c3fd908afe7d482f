#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "screenlap/concentration.hpp"
#include "screenlap/expsum.hpp"
#include "screenlap/gausscalc.hpp"
#include "screenlap/philox.hpp"
#include "screenlap/problem_io.hpp"
#include "screenlap/smoothing.hpp"
#include "screenlap/tspace.hpp"

namespace {

using namespace screenlap;

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

// Bare filenames land in SCREENLAP_OUTDIR when it is set; paths containing a
// separator are taken as given.
std::string resolve_out(const std::string& name) {
    if (name.find('/') != std::string::npos) return name;
    const char* outdir = std::getenv("SCREENLAP_OUTDIR");
    if (!outdir || !*outdir) return name;
    return std::string(outdir) + "/" + name;
}

std::ofstream open_csv(const std::string& path, const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& params) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << "# screenlap.csv/1\n";
    out << "# command: " << command << "\n";
    for (const auto& [key, value] : params) out << "# param: " << key << "=" << value << "\n";
    out << "# timestamp: " << timestamp_utc() << "\n";
    return out;
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error("malformed config JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw input_error("config file must hold a JSON object");
    return doc;
}

template <typename T>
void override_from(const nlohmann::json& cfg, const char* key, T& value) {
    if (!cfg.contains(key)) return;
    try {
        value = cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw input_error(std::string("config key '") + key + "' has the wrong type");
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// ---------------------------------------------------------------- fig1

struct Fig1Params {
    std::vector<int> m_list{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384,
                            32768, 65536};
    int ratio = 2;
    int delta_steps = 200;
    std::string out = "fig1.csv";
    std::string width_out = "fig1-width.csv";
    std::string config;
};

void run_fig1(Fig1Params p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "m-list", p.m_list);
    override_from(cfg, "ratio", p.ratio);
    override_from(cfg, "delta-steps", p.delta_steps);
    override_from(cfg, "out", p.out);
    override_from(cfg, "width-out", p.width_out);
    if (p.ratio < 2) throw input_error("fig1: ratio must be at least 2 so that m < n");
    if (p.delta_steps < 2) throw input_error("fig1: need at least two delta steps");

    // uniform grid plus the half-crossing point sqrt(1/2) of the n = 2m family
    std::vector<double> deltas;
    for (int i = 0; i <= p.delta_steps; ++i) deltas.push_back(double(i) / p.delta_steps);
    deltas.push_back(std::sqrt(0.5));
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

    const std::vector<std::pair<std::string, std::string>> params = {
        {"m-list", join_ints(p.m_list)},
        {"ratio", std::to_string(p.ratio)},
        {"delta-steps", std::to_string(p.delta_steps)}};
    const std::string out_path = resolve_out(p.out);
    // A bare companion filename follows the main output into its directory.
    std::string width_path = resolve_out(p.width_out);
    if (width_path.find('/') == std::string::npos && out_path.find('/') != std::string::npos)
        width_path = out_path.substr(0, out_path.rfind('/') + 1) + width_path;
    auto out = open_csv(out_path, "fig1", params);
    auto wout = open_csv(width_path, "fig1-width", params);
    out << "m,delta,F\n";
    wout << "m,delta_low,delta_high,width\n";

    for (int m : p.m_list) {
        const int n = p.ratio * m;
        double prev_f = 0.0, prev_d = 0.0;
        double d_low = -1.0, d_high = -1.0;
        for (double d : deltas) {
            const double f = conc::volume_ratio_F(m, n, d);
            out << m << "," << fmt(d) << "," << fmt(f) << "\n";
            auto crossing = [&](double level) {
                return prev_f < level && f >= level
                           ? prev_d + (d - prev_d) * (level - prev_f) / (f - prev_f)
                           : -1.0;
            };
            if (d_low < 0.0) d_low = crossing(0.01);
            if (d_high < 0.0) d_high = crossing(0.99);
            prev_f = f;
            prev_d = d;
        }
        if (d_low < 0.0 || d_high < 0.0)
            throw input_error("fig1: delta grid does not resolve the transition for m=" +
                              std::to_string(m));
        wout << m << "," << fmt(d_low) << "," << fmt(d_high) << "," << fmt(d_high - d_low)
             << "\n";
    }
    std::cout << "fig1: wrote " << out_path << " and " << width_path << "\n";
}

// ---------------------------------------------------------------- fig2

struct Fig2Params {
    std::vector<int> electrons_list{8, 16, 32, 64};
    int eps_steps = 100;
    std::string out = "fig2.csv";
    std::string config;
};

void run_fig2(Fig2Params p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "electrons-list", p.electrons_list);
    override_from(cfg, "eps-steps", p.eps_steps);
    override_from(cfg, "out", p.out);
    if (p.eps_steps < 2) throw input_error("fig2: need at least two eps steps");

    auto out = open_csv(resolve_out(p.out), "fig2",
                        {{"electrons-list", join_ints(p.electrons_list)},
                         {"eps-steps", std::to_string(p.eps_steps)}});
    out << "electrons,eps,distance,bound_sharp,bound_two_sided,bound_exponential,clamped\n";
    for (int N : p.electrons_list) {
        const auto dims = tspace::SystemDims::for_electrons(N);
        for (int i = 1; i < p.eps_steps; ++i) {
            const double eps = double(i) / p.eps_steps;
            const auto sharp = conc::prob_bound_sharp(dims, eps);
            const auto simple = conc::prob_bound_simple(dims, eps);
            out << N << "," << fmt(eps) << "," << fmt(sharp.distance_to_one) << ","
                << fmt(sharp.value) << "," << fmt(simple.two_sided) << ","
                << fmt(simple.exponential) << "," << (sharp.clamped ? 1 : 0) << "\n";
        }
    }
    std::cout << "fig2: wrote " << resolve_out(p.out) << "\n";
}

// ---------------------------------------------------------------- fig3

struct Fig3Params {
    std::vector<int> nu_list{0, 1, 2, 3, 4, 5};
    double omega_max = 6.0;
    int omega_steps = 300;
    std::string out = "fig3.csv";
    std::string config;
};

void run_fig3(Fig3Params p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "nu-list", p.nu_list);
    override_from(cfg, "omega-max", p.omega_max);
    override_from(cfg, "omega-steps", p.omega_steps);
    override_from(cfg, "out", p.out);
    if (!(p.omega_max > 0) || p.omega_steps < 2) throw input_error("fig3: bad omega grid");

    auto out = open_csv(resolve_out(p.out), "fig3",
                        {{"nu-list", join_ints(p.nu_list)},
                         {"omega-max", fmt(p.omega_max)},
                         {"omega-steps", std::to_string(p.omega_steps)}});
    out << "nu,omega,value\n";
    for (int nu : p.nu_list)
        for (int i = 0; i <= p.omega_steps; ++i) {
            const double w = p.omega_max * double(i) / p.omega_steps;
            // one-dimensional transform renormalized to one at zero
            out << nu << "," << fmt(w) << "," << fmt(smoothing::phi_factor(nu, 0.5 * w * w))
                << "\n";
        }
    std::cout << "fig3: wrote " << resolve_out(p.out) << "\n";
}

// ---------------------------------------------------------------- fig4

struct Fig4Params {
    double h = 1.0;
    int k1 = -2;
    int k2 = 50;
    double s_max = 18.0;
    int s_steps = 1800;
    std::string out = "fig4.csv";
    std::string config;
};

void run_fig4(Fig4Params p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "h", p.h);
    override_from(cfg, "k1", p.k1);
    override_from(cfg, "k2", p.k2);
    override_from(cfg, "s-max", p.s_max);
    override_from(cfg, "s-steps", p.s_steps);
    override_from(cfg, "out", p.out);
    if (!(p.h > 0)) throw input_error("fig4: h must be positive");
    if (p.s_steps < 2) throw input_error("fig4: need at least two s steps");

    auto out = open_csv(resolve_out(p.out), "fig4",
                        {{"h", fmt(p.h)},
                         {"k1", std::to_string(p.k1)},
                         {"k2", std::to_string(p.k2)},
                         {"s-max", fmt(p.s_max)},
                         {"s-steps", std::to_string(p.s_steps)}});
    out << "s,phi,abs_dev\n";
    const double ln10 = std::log(10.0);
    for (int i = 0; i <= p.s_steps; ++i) {
        const double s = p.s_max * double(i) / p.s_steps;
        const double phi = expsum::window_value(p.h, p.k1, p.k2, s * ln10);
        out << fmt(s) << "," << fmt(phi) << "," << fmt(std::abs(phi - 1.0)) << "\n";
    }
    std::cout << "fig4: wrote " << resolve_out(p.out) << "\n";
}

// ---------------------------------------------------------------- expsum-cert

struct CertParams {
    double tol = 0.0;  // > 0 selects the parameter search
    double R = 1e18;
    double mu = 1.0;
    double h = 1.0;
    int k1 = -2;
    int k2 = 50;
    double r_lo = 10.0;
    double r_hi = 1e17;
    int grid_points = 0;
    double require_tol = 0.0;
    std::string csv_out;
    std::string config;
};

void run_cert(CertParams p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "tol", p.tol);
    override_from(cfg, "R", p.R);
    override_from(cfg, "mu", p.mu);
    override_from(cfg, "h", p.h);
    override_from(cfg, "k1", p.k1);
    override_from(cfg, "k2", p.k2);
    override_from(cfg, "r-lo", p.r_lo);
    override_from(cfg, "r-hi", p.r_hi);
    override_from(cfg, "grid-points", p.grid_points);
    override_from(cfg, "require-tol", p.require_tol);
    override_from(cfg, "csv-out", p.csv_out);

    expsum::ExpSum v;
    expsum::RelErrorReport report;
    if (p.tol > 0.0) {
        const expsum::GridParams grid = expsum::suggest_params(p.mu, p.R, p.tol);
        v = expsum::rescale(expsum::build(grid.h, grid.k1, grid.k2), p.mu);
        report = expsum::rel_error_sup_on(v, 10.0 * p.mu, p.R * p.mu / 10.0, p.grid_points);
        std::cout << "mode=search tol=" << fmt(p.tol) << " R=" << fmt(p.R)
                  << " mu=" << fmt(p.mu) << "\n";
        std::cout << "h=" << fmt(grid.h) << " k1=" << grid.k1 << " k2=" << grid.k2
                  << " terms=" << v.terms.size() << "\n";
    } else {
        v = expsum::rescale(expsum::build(p.h, p.k1, p.k2), p.mu);
        report = expsum::rel_error_sup_on(v, p.r_lo, p.r_hi, p.grid_points);
        std::cout << "mode=explicit h=" << fmt(p.h) << " k1=" << p.k1 << " k2=" << p.k2
                  << " mu=" << fmt(p.mu) << " terms=" << v.terms.size() << "\n";
    }
    std::cout << "sup_error=" << fmt(report.sup_error) << " argmax_r=" << fmt(report.argmax_r)
              << " grid_points=" << report.grid_points
              << " form_gap=" << fmt(report.max_form_gap) << "\n";
    if (!p.csv_out.empty()) {
        const std::string path = resolve_out(p.csv_out);
        std::ofstream out(path);
        if (!out) throw input_error("cannot write file: " + path);
        out << expsum::to_csv(v);
        std::cout << "csv=" << path << "\n";
    }
    if (p.require_tol > 0.0 && report.sup_error > p.require_tol)
        throw certification_error("expsum-cert: sup error " + fmt(report.sup_error) +
                                  " exceeds required tolerance " + fmt(p.require_tol));
    std::cout << (p.require_tol > 0.0 ? "certified=1\n" : "");
}

// ---------------------------------------------------------------- solve

struct SolveParams {
    std::string problem;
    std::string out = "solution.json";
    int points = 50;
    std::uint64_t seed = 20260814;
    std::string config;
};

void run_solve(SolveParams p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "problem", p.problem);
    override_from(cfg, "out", p.out);
    override_from(cfg, "points", p.points);
    override_from(cfg, "seed", p.seed);
    if (p.points < 1) throw input_error("solve: need at least one sample point");

    io::SolveReport report;
    report.problem = io::load_problem(p.problem);
    const auto& dims = report.problem.dims;
    const auto& F = report.problem.rhs;
    const double mu = report.problem.mu;
    report.points = p.points;
    report.seed = p.seed;

    report.kernel =
        report.problem.kernel_grid
            ? gausscalc::make_kernel_from_grid(gausscalc::KernelMode::degenerate, mu,
                                               report.problem.kernel_tol,
                                               *report.problem.kernel_grid, F, dims)
            : gausscalc::make_kernel(gausscalc::KernelMode::degenerate, mu,
                                     report.problem.kernel_tol, F, dims);
    gausscalc::KernelSpec decoupled = report.kernel;
    decoupled.mode = gausscalc::KernelMode::decoupled;

    report.degenerate = gausscalc::apply_screened_inverse(F, report.kernel, dims);
    report.decoupled = gausscalc::apply_screened_inverse(F, decoupled, dims);

    const auto x_points = gausscalc::gaussian_points(dims.m, p.points, p.seed);
    report.residual = gausscalc::residual(F, report.degenerate, mu, dims, x_points);

    const auto y_points = gausscalc::gaussian_points(dims.n, p.points, p.seed + 1);
    double max_coeff = 0.0;
    for (const auto& t : report.degenerate.terms)
        max_coeff = std::max(max_coeff, std::abs(t.coeff));
    const double floor = 1e-12 * max_coeff;
    for (const auto& y : y_points) {
        const double a = gausscalc::eval(report.degenerate, y);
        const double b = gausscalc::eval(report.decoupled, y);
        const double diff = std::abs(a - b);
        if (diff > 0.0)
            report.max_rel_deviation =
                std::max(report.max_rel_deviation, diff / std::max(std::abs(a), floor));
    }

    const std::string out_path = resolve_out(p.out);
    io::save_solution(report, out_path);
    std::cout << "electrons=" << dims.electrons << " mu=" << fmt(mu)
              << " kernel_terms=" << report.kernel.sum.terms.size()
              << " certified_tol=" << fmt(report.kernel.certified_tol) << " certified_interval=["
              << fmt(report.kernel.certified_lo) << "," << fmt(report.kernel.certified_hi)
              << "]\n";
    std::cout << "terms_degenerate=" << report.degenerate.terms.size()
              << " terms_decoupled=" << report.decoupled.terms.size() << "\n";
    std::cout << "residual=" << fmt(report.residual) << "\n";
    std::cout << "max_rel_deviation=" << fmt(report.max_rel_deviation) << "\n";
    std::cout << "solution=" << out_path << "\n";
}

// ---------------------------------------------------------------- mc

struct McParams {
    std::string profile = "tt:3";
    double delta = 0.5;
    long samples = 200000;
    std::uint64_t seed = 9001;
    int workers = 0;
    std::string out;
    std::string config;
};

void run_mc(McParams p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "profile", p.profile);
    override_from(cfg, "delta", p.delta);
    override_from(cfg, "samples", p.samples);
    override_from(cfg, "seed", p.seed);
    override_from(cfg, "workers", p.workers);
    override_from(cfg, "out", p.out);

    conc::SingularProfile profile;
    double lower = 0.0, upper = 0.0;
    if (p.profile.rfind("tt:", 0) == 0) {
        const int N = std::atoi(p.profile.c_str() + 3);
        const auto dims = tspace::SystemDims::for_electrons(N);
        profile = conc::SingularProfile::for_Tt(dims);
        lower = conc::volume_ratio_F(dims.m, dims.n, p.delta);
        upper = conc::volume_ratio_F(dims.m - 3, dims.n, p.delta);
    } else if (p.profile.rfind("proj:", 0) == 0) {
        int m = 0, n = 0;
        if (std::sscanf(p.profile.c_str() + 5, "%d,%d", &m, &n) != 2)
            throw input_error("mc: projection profile must look like proj:m,n");
        profile = conc::SingularProfile::projection(m, n);
        lower = upper = conc::volume_ratio_F(m, n, p.delta);
    } else {
        throw input_error("mc: profile must be tt:N or proj:m,n");
    }

    const auto est = conc::mc_volume_ratio(profile, p.delta, p.samples, p.seed, p.workers);
    std::cout << "profile=" << p.profile << " delta=" << fmt(p.delta)
              << " samples=" << est.samples << " seed=" << p.seed << "\n";
    std::cout << "estimate=" << fmt(est.value) << " stderr=" << fmt(est.std_error) << "\n";
    std::cout << "sector_lower=" << fmt(lower) << " sector_upper=" << fmt(upper) << "\n";

    if (!p.out.empty()) {
        auto out = open_csv(resolve_out(p.out), "mc",
                            {{"profile", p.profile},
                             {"delta", fmt(p.delta)},
                             {"samples", std::to_string(p.samples)},
                             {"seed", std::to_string(p.seed)}});
        out << "profile,delta,samples,seed,estimate,stderr,sector_lower,sector_upper\n";
        out << p.profile << "," << fmt(p.delta) << "," << p.samples << "," << p.seed << ","
            << fmt(est.value) << "," << fmt(est.std_error) << "," << fmt(lower) << ","
            << fmt(upper) << "\n";
    }
}

// ---------------------------------------------------------------- sym-check

struct SymParams {
    int electrons = 3;
    int trials = 50;
    std::uint64_t seed = 777;
    double kernel_tol = 1e-3;
    std::string config;
};

std::vector<int> random_permutation(int n, std::uint64_t seed, std::uint64_t index) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const auto words = rng::philox_block(seed, index, std::uint32_t(i));
        const int j = int(words[0] % std::uint32_t(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

void run_sym(SymParams p) {
    const auto cfg = load_config(p.config);
    override_from(cfg, "electrons", p.electrons);
    override_from(cfg, "trials", p.trials);
    override_from(cfg, "seed", p.seed);
    override_from(cfg, "kernel-tol", p.kernel_tol);
    if (p.electrons < 2 || p.electrons > 6)
        throw input_error("sym-check: electron count outside [2, 6]");

    const auto dims = tspace::SystemDims::for_electrons(p.electrons);

    double intertwine = 0.0, norm_gap = 0.0;
    for (int t = 0; t < p.trials; ++t) {
        const auto perm = random_permutation(p.electrons, p.seed, std::uint64_t(t));
        const auto action = tspace::build_actions(dims, perm);
        rng::NormalStream stream(p.seed ^ 0x5eedULL, std::uint64_t(t));
        Eigen::VectorXd x(dims.m);
        for (int i = 0; i < dims.m; ++i) x[i] = stream.next();
        Eigen::VectorXd omega(dims.n);
        for (int i = 0; i < dims.n; ++i) omega[i] = stream.next();

        const Eigen::VectorXd lhs = tspace::apply_T(dims, action.apply_P(x));
        const Eigen::VectorXd rhs = action.apply_Q(tspace::apply_T(dims, x));
        intertwine = std::max(intertwine, (lhs - rhs).norm() / x.norm());

        const double with_q = tspace::apply_Tt(dims, action.apply_Q(omega)).norm();
        const double without = tspace::apply_Tt(dims, omega).norm();
        norm_gap = std::max(norm_gap, std::abs(with_q - without) / omega.norm());
    }

    // antisymmetrized right-hand side -> solutions keep the sign-equivariance
    rng::NormalStream stream(p.seed ^ 0xabcdULL, 0);
    Eigen::VectorXd center(dims.n);
    for (int i = 0; i < dims.n; ++i) center[i] = 0.3 * stream.next();
    Eigen::MatrixXd W(dims.n, dims.n);
    for (int i = 0; i < dims.n; ++i)
        for (int j = 0; j < dims.n; ++j) W(i, j) = stream.next();
    const Eigen::MatrixXd qform =
        0.25 * Eigen::MatrixXd::Identity(dims.n, dims.n) + 0.1 / dims.n * W.transpose() * W;
    const auto F0 = gausscalc::make_sum(dims.n, {gausscalc::make_term(1.0, center, qform)});
    const auto group = tspace::all_permutations(p.electrons);
    const auto F = gausscalc::antisymmetrize(F0, dims, group);

    double defect = 0.0;
    for (const auto mode :
         {gausscalc::KernelMode::degenerate, gausscalc::KernelMode::decoupled}) {
        const auto kernel = gausscalc::make_kernel(mode, 1.0, p.kernel_tol, F, dims);
        const auto U = gausscalc::apply_screened_inverse(F, kernel, dims);
        const auto pts = gausscalc::gaussian_points(dims.n, 20, p.seed + 99);
        double scale = 0.0;
        for (const auto& y : pts) scale = std::max(scale, std::abs(gausscalc::eval(U, y)));
        for (const auto& g : group) {
            const auto action = tspace::build_actions(dims, g);
            for (const auto& y : pts) {
                const double lhs = gausscalc::eval(U, action.apply_Q(y));
                const double rhs = double(action.sign) * gausscalc::eval(U, y);
                defect = std::max(defect, std::abs(lhs - rhs) / scale);
            }
        }
    }

    std::cout << "electrons=" << p.electrons << " trials=" << p.trials << " seed=" << p.seed
              << "\n";
    std::cout << "intertwine_defect=" << fmt(intertwine) << " (limit 1e-13)\n";
    std::cout << "adjoint_norm_gap=" << fmt(norm_gap) << " (limit 1e-12)\n";
    std::cout << "antisymmetry_defect=" << fmt(defect) << " (limit 1e-10)\n";
    if (intertwine > 1e-13 || norm_gap > 1e-12 || defect > 1e-10)
        throw certification_error("sym-check: a symmetry identity exceeded its limit");
    std::cout << "ok=1\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"screened-Laplace solver and measure-concentration toolkit"};
    app.require_subcommand(1);

    Fig1Params fig1;
    auto* c1 = app.add_subcommand("fig1", "volume-ratio step curves over a delta grid");
    c1->add_option("--m-list", fig1.m_list, "projection dimensions")->delimiter(',');
    c1->add_option("--ratio", fig1.ratio, "ambient dimension as a multiple of m");
    c1->add_option("--delta-steps", fig1.delta_steps, "uniform delta intervals");
    c1->add_option("--out", fig1.out, "output CSV");
    c1->add_option("--width-out", fig1.width_out, "transition-width CSV");
    c1->add_option("--config", fig1.config, "JSON config overriding flags");
    c1->callback([&] { run_fig1(fig1); });

    Fig2Params fig2;
    auto* c2 = app.add_subcommand("fig2", "distance of the enclosure probability bound to one");
    c2->add_option("--electrons-list", fig2.electrons_list, "electron counts")->delimiter(',');
    c2->add_option("--eps-steps", fig2.eps_steps, "uniform eps intervals on (0,1)");
    c2->add_option("--out", fig2.out, "output CSV");
    c2->add_option("--config", fig2.config, "JSON config overriding flags");
    c2->callback([&] { run_fig2(fig2); });

    Fig3Params fig3;
    auto* c3 = app.add_subcommand("fig3", "renormalized mollifier transforms");
    c3->add_option("--nu-list", fig3.nu_list, "kernel orders")->delimiter(',');
    c3->add_option("--omega-max", fig3.omega_max, "grid end");
    c3->add_option("--omega-steps", fig3.omega_steps, "grid intervals");
    c3->add_option("--out", fig3.out, "output CSV");
    c3->add_option("--config", fig3.config, "JSON config overriding flags");
    c3->callback([&] { run_fig3(fig3); });

    Fig4Params fig4;
    auto* c4 = app.add_subcommand("fig4", "window function of the exponential-sum grid");
    c4->set_help_flag("--help", "print help");  // frees -h for the grid step
    c4->add_option("--h", fig4.h, "grid step");
    c4->add_option("--k1", fig4.k1, "first grid index");
    c4->add_option("--k2", fig4.k2, "last grid index");
    c4->add_option("--s-max", fig4.s_max, "end of the decimal-log grid");
    c4->add_option("--s-steps", fig4.s_steps, "grid intervals");
    c4->add_option("--out", fig4.out, "output CSV");
    c4->add_option("--config", fig4.config, "JSON config overriding flags");
    c4->callback([&] { run_fig4(fig4); });

    CertParams cert;
    auto* c5 = app.add_subcommand("expsum-cert", "build and certify an exponential sum");
    c5->set_help_flag("--help", "print help");  // frees -h for the grid step
    c5->add_option("--tol", cert.tol, "run the parameter search for this tolerance");
    c5->add_option("--R", cert.R, "interval length ratio for the search");
    c5->add_option("--mu", cert.mu, "left endpoint scale");
    c5->add_option("--h", cert.h, "explicit grid step");
    c5->add_option("--k1", cert.k1, "explicit first index");
    c5->add_option("--k2", cert.k2, "explicit last index");
    c5->add_option("--r-lo", cert.r_lo, "explicit-mode measurement interval start");
    c5->add_option("--r-hi", cert.r_hi, "explicit-mode measurement interval end");
    c5->add_option("--grid-points", cert.grid_points, "measurement points (0 = auto)");
    c5->add_option("--require-tol", cert.require_tol, "fail unless sup error meets this");
    c5->add_option("--csv-out", cert.csv_out, "write the terms as CSV");
    c5->add_option("--config", cert.config, "JSON config overriding flags");
    c5->callback([&] { run_cert(cert); });

    SolveParams solve;
    auto* c6 = app.add_subcommand("solve", "solve the screened equation for a problem file");
    c6->add_option("--problem", solve.problem, "problem JSON")->required();
    c6->add_option("--out", solve.out, "solution JSON");
    c6->add_option("--points", solve.points, "sample points for residual/deviation");
    c6->add_option("--seed", solve.seed, "sample-point seed");
    c6->add_option("--config", solve.config, "JSON config overriding flags");
    c6->callback([&] { run_solve(solve); });

    McParams mc;
    auto* c7 = app.add_subcommand("mc", "Monte-Carlo sector measure with sandwich bounds");
    c7->add_option("--profile", mc.profile, "tt:N or proj:m,n");
    c7->add_option("--delta", mc.delta, "relative-norm threshold");
    c7->add_option("--samples", mc.samples, "sample count");
    c7->add_option("--seed", mc.seed, "stream seed");
    c7->add_option("--workers", mc.workers, "worker threads (0 = auto)");
    c7->add_option("--out", mc.out, "optional CSV report");
    c7->add_option("--config", mc.config, "JSON config overriding flags");
    c7->callback([&] { run_mc(mc); });

    SymParams sym;
    auto* c8 = app.add_subcommand("sym-check", "verify the permutation-symmetry identities");
    c8->add_option("--electrons", sym.electrons, "electron count (2..6)");
    c8->add_option("--trials", sym.trials, "random permutation/vector trials");
    c8->add_option("--seed", sym.seed, "trial seed");
    c8->add_option("--kernel-tol", sym.kernel_tol, "kernel tolerance for the solve stage");
    c8->add_option("--config", sym.config, "JSON config overriding flags");
    c8->callback([&] { run_sym(sym); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const screenlap::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const screenlap::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const screenlap::certification_error& e) {
        std::cerr << "certification error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
