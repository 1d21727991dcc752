#include "dr/micp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "dr/rng.hpp"

namespace dr::micp {

void MicpCurve::validate() const {
    double prev_pc = 0.0, prev_bv = -1.0;
    for (const auto& p : points) {
        if (!(p.pc > 0.0)) throw std::invalid_argument("MicpCurve: pressures must be > 0");
        if (p.pc <= prev_pc)
            throw std::invalid_argument("MicpCurve: pressures must be strictly increasing");
        if (p.bv < prev_bv - 1e-12 || p.bv < 0.0 || p.bv > 1.0)
            throw std::invalid_argument("MicpCurve: Bv must be non-decreasing in [0, 1]");
        prev_pc = p.pc;
        prev_bv = p.bv;
    }
}

double thomeer_eval(const ThomeerModel& model, double pc) {
    if (!(pc > 0.0)) throw std::invalid_argument("thomeer_eval: P_c must be > 0");
    double total = 0.0;
    for (const auto& s : model.systems) {
        if (pc <= s.p_d) continue;  // right-limit convention at P_d
        total += s.b_inf * std::exp(-s.g / std::log10(pc / s.p_d));
    }
    return total;
}

namespace {

// Nelder-Mead on an unconstrained vector; standard reflection /
// expansion / contraction / shrink coefficients.
struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, int max_iter, double tol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (x0[i] != 0.0 ? 0.1 * std::abs(x0[i]) : 0.1);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> ord(n + 1);
    auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        sort_simplex();
        if (std::abs(fv[ord[n]] - fv[ord[0]]) <= tol * (std::abs(fv[ord[0]]) + tol)) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[ord[i]][j] / n;
        auto blend = [&](double alpha) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + alpha * (simplex[ord[n]][j] - centroid[j]);
            return p;
        };
        std::vector<double> refl = blend(-1.0);
        double f_refl = f(refl);
        if (f_refl < fv[ord[0]]) {
            std::vector<double> exp_p = blend(-2.0);
            double f_exp = f(exp_p);
            if (f_exp < f_refl) {
                simplex[ord[n]] = exp_p;
                fv[ord[n]] = f_exp;
            } else {
                simplex[ord[n]] = refl;
                fv[ord[n]] = f_refl;
            }
        } else if (f_refl < fv[ord[n - 1]]) {
            simplex[ord[n]] = refl;
            fv[ord[n]] = f_refl;
        } else {
            std::vector<double> con = blend(f_refl < fv[ord[n]] ? -0.5 : 0.5);
            double f_con = f(con);
            if (f_con < std::min(f_refl, fv[ord[n]])) {
                simplex[ord[n]] = con;
                fv[ord[n]] = f_con;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[ord[i]][j] =
                            simplex[ord[0]][j] + 0.5 * (simplex[ord[i]][j] - simplex[ord[0]][j]);
                    fv[ord[i]] = f(simplex[ord[i]]);
                }
            }
        }
    }
    sort_simplex();
    return {simplex[ord[0]], fv[ord[0]], converged};
}

// Bounded transforms: b_inf in (0, 1] via logistic, g and p_d positive
// via exp. The optimizer works in the unconstrained space.
double to_b_inf(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double from_b_inf(double b) {
    b = std::clamp(b, 1e-9, 1.0 - 1e-9);
    return std::log(b / (1.0 - b));
}

ThomeerModel decode(const std::vector<double>& u, int n_systems) {
    ThomeerModel m;
    for (int s = 0; s < n_systems; ++s) {
        ThomeerSystem sys;
        sys.b_inf = to_b_inf(u[static_cast<std::size_t>(3 * s)]);
        sys.g = std::exp(u[static_cast<std::size_t>(3 * s + 1)]);
        sys.p_d = std::exp(u[static_cast<std::size_t>(3 * s + 2)]);
        m.systems.push_back(sys);
    }
    std::sort(m.systems.begin(), m.systems.end(),
              [](const ThomeerSystem& a, const ThomeerSystem& b) { return a.p_d < b.p_d; });
    return m;
}

}  // namespace

FitResult thomeer_fit(const MicpCurve& curve, int n_systems, const FitConfig& cfg) {
    curve.validate();
    if (n_systems < 1) throw std::invalid_argument("thomeer_fit: need >= 1 system");
    if (static_cast<int>(curve.points.size()) < 3 * n_systems)
        throw std::invalid_argument("thomeer_fit: need at least 3 points per system");

    const double pc_lo = curve.points.front().pc;
    const double pc_hi = curve.points.back().pc;
    const double bv_max = std::max(curve.points.back().bv, 1e-6);

    auto objective = [&](const std::vector<double>& u) {
        ThomeerModel m = decode(u, n_systems);
        double acc = 0.0;
        for (const auto& p : curve.points) {
            double pred = thomeer_eval(m, p.pc);
            double r = cfg.log_residual
                           ? std::log10(pred + 1e-9) - std::log10(p.bv + 1e-9)
                           : pred - p.bv;
            acc += r * r;
        }
        return acc;
    };

    Rng rng(cfg.seed);
    std::vector<double> best_u;
    double best_f = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    for (int start = 0; start < cfg.multi_starts; ++start) {
        // Log-spaced displacement pressures across the observed range,
        // jittered per start; B_inf split evenly across systems.
        std::vector<double> u0;
        if (start == 0 && static_cast<int>(cfg.init.size()) == n_systems) {
            for (const auto& sys : cfg.init) {
                u0.push_back(from_b_inf(sys.b_inf));
                u0.push_back(std::log(std::max(sys.g, 1e-9)));
                u0.push_back(std::log(std::max(sys.p_d, 1e-12)));
            }
        } else
        for (int s = 0; s < n_systems; ++s) {
            double frac = n_systems == 1
                              ? static_cast<double>(start % cfg.multi_starts) /
                                    std::max(1, cfg.multi_starts - 1)
                              : static_cast<double>(s) / (n_systems - 1 + 1e-12);
            double log_pd = std::log(pc_lo) +
                            frac * (std::log(pc_hi) - std::log(pc_lo)) * 0.8 +
                            0.2 * (rng.uniform() - 0.5);
            u0.push_back(from_b_inf(std::min(0.999, bv_max / n_systems)));
            u0.push_back(std::log(0.3 + rng.uniform()));
            u0.push_back(log_pd);
        }
        NmResult r = nelder_mead(objective, u0, cfg.max_iterations, 1e-14);
        // Polish: restart from the incumbent until it is a fixed point.
        for (int polish = 0; polish < 3 && r.fx < best_f; ++polish) {
            NmResult r2 = nelder_mead(objective, r.x, cfg.max_iterations, 1e-14);
            if (r2.fx >= r.fx * (1.0 - 1e-12)) {
                r = r2;
                break;
            }
            r = r2;
        }
        if (r.fx < best_f) {
            best_f = r.fx;
            best_u = r.x;
            best_converged = r.converged;
        }
    }

    FitResult out;
    out.model = decode(best_u, n_systems);
    out.rms = std::sqrt(best_f / static_cast<double>(curve.points.size()));
    out.converged = best_converged;
    return out;
}

std::pair<double, double> partition_porosity(const ThomeerModel& model) {
    if (model.systems.size() != 2)
        throw std::invalid_argument("partition_porosity: needs exactly two systems");
    // Systems are ordered by ascending P_d: large throats first.
    return {model.systems[0].b_inf, model.systems[1].b_inf};
}

MicpCurve load_micp_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_micp_csv: cannot open " + path);
    MicpCurve curve;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_not_of("0123456789.,+-eE \t\r") != std::string::npos) continue;
        std::istringstream ss(line);
        double pc, bv;
        char comma;
        if (ss >> pc >> comma >> bv) curve.points.push_back({pc, bv});
    }
    curve.validate();
    return curve;
}

void save_model_csv(const ThomeerModel& model, double rms, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("save_model_csv: cannot open " + path);
    f << "b_inf,g,p_d,rms\n";
    f.precision(12);
    for (const auto& s : model.systems)
        f << s.b_inf << "," << s.g << "," << s.p_d << "," << rms << "\n";
}

}  // namespace dr::micp
