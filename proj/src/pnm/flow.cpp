#include "dr/pnm/flow.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>

namespace dr::pnm {

namespace {

// Connected components over throats with positive conductance.
std::vector<Index> components(const PoreNetwork& net, const std::vector<double>& throat_g) {
    std::vector<Index> comp(net.pores.size(), -1);
    std::vector<std::vector<std::pair<Index, Index>>> adj(net.pores.size());
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        if (throat_g[t] <= 0.0) continue;
        adj[static_cast<std::size_t>(net.throats[t].pore_i)].push_back(
            {net.throats[t].pore_j, static_cast<Index>(t)});
        adj[static_cast<std::size_t>(net.throats[t].pore_j)].push_back(
            {net.throats[t].pore_i, static_cast<Index>(t)});
    }
    Index next = 0;
    std::vector<Index> stack;
    for (std::size_t s = 0; s < net.pores.size(); ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        stack.push_back(static_cast<Index>(s));
        while (!stack.empty()) {
            Index p = stack.back();
            stack.pop_back();
            for (const auto& [q, t] : adj[static_cast<std::size_t>(p)])
                if (comp[static_cast<std::size_t>(q)] < 0) {
                    comp[static_cast<std::size_t>(q)] = next;
                    stack.push_back(q);
                }
        }
        ++next;
    }
    return comp;
}

}  // namespace

SolveOutcome solve_network(const PoreNetwork& net, const std::vector<double>& throat_g) {
    if (throat_g.size() != net.throats.size())
        throw std::invalid_argument("solve_network: conductance count mismatch");
    SolveOutcome out;
    if (net.pores.empty()) return out;

    // Keep only components that bridge inlet and outlet.
    std::vector<Index> comp = components(net, throat_g);
    std::vector<char> comp_in(net.pores.size(), 0), comp_out(net.pores.size(), 0);
    for (std::size_t p = 0; p < net.pores.size(); ++p) {
        if (net.pores[p].inlet) comp_in[static_cast<std::size_t>(comp[p])] = 1;
        if (net.pores[p].outlet) comp_out[static_cast<std::size_t>(comp[p])] = 1;
    }
    auto conducting = [&](Index p) {
        Index c = comp[static_cast<std::size_t>(p)];
        return comp_in[static_cast<std::size_t>(c)] && comp_out[static_cast<std::size_t>(c)];
    };

    // Unknowns: non-Dirichlet pores of conducting components. Pores that
    // are both inlet and outlet are treated as inlet.
    std::vector<Index> unknown_id(net.pores.size(), -1);
    Index n_unknown = 0;
    bool any = false;
    for (std::size_t p = 0; p < net.pores.size(); ++p) {
        if (!conducting(static_cast<Index>(p))) continue;
        any = true;
        if (!net.pores[p].inlet && !net.pores[p].outlet)
            unknown_id[p] = n_unknown++;
    }
    if (!any) return out;  // inlet and outlet never meet
    out.connected = true;

    auto dirichlet = [&](Index p) { return net.pores[static_cast<std::size_t>(p)].inlet ? 1.0 : 0.0; };

    Eigen::VectorXd pressure = Eigen::VectorXd::Zero(std::max<Index>(n_unknown, 1));
    if (n_unknown > 0) {
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
        for (std::size_t t = 0; t < net.throats.size(); ++t) {
            double g = throat_g[t];
            if (g <= 0.0) continue;
            Index a = net.throats[t].pore_i, b = net.throats[t].pore_j;
            if (!conducting(a)) continue;
            Index ua = unknown_id[static_cast<std::size_t>(a)];
            Index ub = unknown_id[static_cast<std::size_t>(b)];
            if (ua >= 0) {
                trips.emplace_back(ua, ua, g);
                if (ub >= 0)
                    trips.emplace_back(ua, ub, -g);
                else
                    rhs[ua] += g * dirichlet(b);
            }
            if (ub >= 0) {
                trips.emplace_back(ub, ub, g);
                if (ua >= 0)
                    trips.emplace_back(ub, ua, -g);
                else
                    rhs[ub] += g * dirichlet(a);
            }
        }
        Eigen::SparseMatrix<double> mat(n_unknown, n_unknown);
        mat.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mat);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("solve_network: singular conductance system");
        pressure = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("solve_network: linear solve failed");
    }

    auto pore_pressure = [&](Index p) {
        Index u = unknown_id[static_cast<std::size_t>(p)];
        return u >= 0 ? pressure[u] : dirichlet(p);
    };

    // Total throughput into the outlet set and conservation residual.
    // Pores carrying both flags count as inlet.
    double q_out = 0.0;
    std::vector<double> net_flux(net.pores.size(), 0.0);
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        double g = throat_g[t];
        if (g <= 0.0) continue;
        Index a = net.throats[t].pore_i, b = net.throats[t].pore_j;
        if (!conducting(a)) continue;
        double q = g * (pore_pressure(a) - pore_pressure(b));  // flux a -> b
        net_flux[static_cast<std::size_t>(a)] -= q;
        net_flux[static_cast<std::size_t>(b)] += q;
        const Pore& pa = net.pores[static_cast<std::size_t>(a)];
        const Pore& pb = net.pores[static_cast<std::size_t>(b)];
        bool a_sink = pa.outlet && !pa.inlet;
        bool b_sink = pb.outlet && !pb.inlet;
        if (b_sink && !a_sink) q_out += q;
        if (a_sink && !b_sink) q_out -= q;
    }
    double max_interior = 0.0;
    for (std::size_t p = 0; p < net.pores.size(); ++p) {
        if (net.pores[p].inlet || net.pores[p].outlet || !conducting(static_cast<Index>(p)))
            continue;
        max_interior = std::max(max_interior, std::abs(net_flux[p]));
    }
    out.flux = q_out;
    out.residual = q_out != 0.0 ? max_interior / std::abs(q_out) : max_interior;
    return out;
}

FlowResult absolute_permeability(const PoreNetwork& net, double viscosity_pa_s) {
    if (!(viscosity_pa_s > 0.0))
        throw std::invalid_argument("absolute_permeability: viscosity must be > 0");
    net.validate();
    std::vector<double> g(net.throats.size());
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        const Throat& th = net.throats[t];
        g[t] = M_PI * std::pow(th.radius_um, 4) / (8.0 * viscosity_pa_s * th.length_um);
    }
    SolveOutcome s = solve_network(net, g);
    FlowResult r;
    r.connected = s.connected;
    r.flux_residual = s.residual;
    // K = Q mu L / (A dP) with dP = 1.
    r.value = s.connected ? s.flux * viscosity_pa_s * net.length_um / net.area_um2 : 0.0;
    return r;
}

FlowResult formation_factor(const PoreNetwork& net) {
    net.validate();
    const double sigma_w = 1.0;
    std::vector<double> g(net.throats.size());
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        const Throat& th = net.throats[t];
        g[t] = sigma_w * M_PI * th.radius_um * th.radius_um / th.length_um;
    }
    SolveOutcome s = solve_network(net, g);
    FlowResult r;
    r.connected = s.connected;
    r.flux_residual = s.residual;
    if (!s.connected || s.flux <= 0.0) {
        r.value = std::numeric_limits<double>::infinity();
        r.connected = false;
        return r;
    }
    double sigma_eff = s.flux * net.length_um / net.area_um2;
    r.value = sigma_w / sigma_eff;
    return r;
}

}  // namespace dr::pnm
