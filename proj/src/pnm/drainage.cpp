#include "dr/pnm/drainage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dr::pnm {

void FluidPair::validate() const {
    if (!(sigma_n_per_m > 0.0)) throw std::invalid_argument("FluidPair: sigma must be > 0");
    if (!(theta_rad >= 0.0 && theta_rad < M_PI / 2.0))
        throw std::invalid_argument("FluidPair: drainage needs theta in [0, pi/2)");
    if (!(mu_w_pa_s > 0.0) || !(mu_nw_pa_s > 0.0))
        throw std::invalid_argument("FluidPair: viscosities must be > 0");
}

double entry_pressure_pa(double radius_um, const FluidPair& fluids) {
    return 2.0 * fluids.sigma_n_per_m * std::cos(fluids.theta_rad) / (radius_um * 1e-6);
}

namespace {

// Pore <-> throat adjacency for the element graph.
struct Adjacency {
    std::vector<std::vector<Index>> pore_throats;
};

Adjacency build_adjacency(const PoreNetwork& net) {
    Adjacency a;
    a.pore_throats.resize(net.pores.size());
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        a.pore_throats[static_cast<std::size_t>(net.throats[t].pore_i)].push_back(
            static_cast<Index>(t));
        a.pore_throats[static_cast<std::size_t>(net.throats[t].pore_j)].push_back(
            static_cast<Index>(t));
    }
    return a;
}

// Uninvaded elements connected to an outlet pore through uninvaded
// elements; used by the trapping rule.
void mark_escapable(const PoreNetwork& net, const Adjacency& adj,
                    const std::vector<char>& pore_inv, const std::vector<char>& throat_inv,
                    std::vector<char>& pore_esc, std::vector<char>& throat_esc) {
    std::fill(pore_esc.begin(), pore_esc.end(), 0);
    std::fill(throat_esc.begin(), throat_esc.end(), 0);
    std::vector<Index> stack;
    for (std::size_t p = 0; p < net.pores.size(); ++p)
        if (net.pores[p].outlet && !pore_inv[p]) {
            pore_esc[p] = 1;
            stack.push_back(static_cast<Index>(p));
        }
    while (!stack.empty()) {
        Index p = stack.back();
        stack.pop_back();
        for (Index t : adj.pore_throats[static_cast<std::size_t>(p)]) {
            if (throat_inv[static_cast<std::size_t>(t)]) continue;
            throat_esc[static_cast<std::size_t>(t)] = 1;
            Index q = net.throats[static_cast<std::size_t>(t)].pore_i == p
                          ? net.throats[static_cast<std::size_t>(t)].pore_j
                          : net.throats[static_cast<std::size_t>(t)].pore_i;
            if (!pore_inv[static_cast<std::size_t>(q)] && !pore_esc[static_cast<std::size_t>(q)]) {
                pore_esc[static_cast<std::size_t>(q)] = 1;
                stack.push_back(q);
            }
        }
    }
}

}  // namespace

std::vector<DrainageState> drainage_simulate(const PoreNetwork& net, const FluidPair& fluids,
                                             const std::vector<double>& pc_steps_pa,
                                             bool trapping) {
    fluids.validate();
    net.validate();
    for (std::size_t i = 1; i < pc_steps_pa.size(); ++i)
        if (!(pc_steps_pa[i] > pc_steps_pa[i - 1]))
            throw std::invalid_argument("drainage_simulate: pc steps must increase strictly");

    Adjacency adj = build_adjacency(net);
    std::vector<double> pore_pe(net.pores.size()), throat_pe(net.throats.size());
    for (std::size_t p = 0; p < net.pores.size(); ++p)
        pore_pe[p] = entry_pressure_pa(net.pores[p].radius_um, fluids);
    for (std::size_t t = 0; t < net.throats.size(); ++t)
        throat_pe[t] = entry_pressure_pa(net.throats[t].radius_um, fluids);

    double total_volume = 0.0;
    for (const auto& p : net.pores) total_volume += p.volume_um3;

    std::vector<char> pore_inv(net.pores.size(), 0), throat_inv(net.throats.size(), 0);
    std::vector<char> pore_esc(net.pores.size(), 1), throat_esc(net.throats.size(), 1);

    std::vector<DrainageState> states;
    double invaded_volume = 0.0;
    for (double pc : pc_steps_pa) {
        bool changed = true;
        while (changed) {
            changed = false;
            if (trapping)
                mark_escapable(net, adj, pore_inv, throat_inv, pore_esc, throat_esc);
            // Inlet pores see the reservoir directly; everything else
            // needs an invaded neighbor element.
            for (std::size_t p = 0; p < net.pores.size(); ++p) {
                if (pore_inv[p] || pore_pe[p] > pc) continue;
                if (trapping && !pore_esc[p]) continue;
                bool reachable = net.pores[p].inlet;
                for (Index t : adj.pore_throats[p])
                    reachable = reachable || throat_inv[static_cast<std::size_t>(t)];
                if (reachable) {
                    pore_inv[p] = 1;
                    invaded_volume += net.pores[p].volume_um3;
                    changed = true;
                }
            }
            for (std::size_t t = 0; t < net.throats.size(); ++t) {
                if (throat_inv[t] || throat_pe[t] > pc) continue;
                if (trapping && !throat_esc[t]) continue;
                if (pore_inv[static_cast<std::size_t>(net.throats[t].pore_i)] ||
                    pore_inv[static_cast<std::size_t>(net.throats[t].pore_j)]) {
                    throat_inv[t] = 1;
                    changed = true;
                }
            }
        }
        DrainageState st;
        st.pc_pa = pc;
        st.sw = total_volume > 0.0 ? 1.0 - invaded_volume / total_volume : 1.0;
        st.pore_invaded = pore_inv;
        st.throat_invaded = throat_inv;
        states.push_back(std::move(st));
    }
    return states;
}

std::vector<KrPoint> relative_permeability(const PoreNetwork& net, const FluidPair& fluids,
                                           const std::vector<DrainageState>& states,
                                           double corner_beta) {
    if (corner_beta < 0.0)
        throw std::invalid_argument("relative_permeability: beta must be >= 0");
    net.validate();

    std::vector<double> g_bulk_w(net.throats.size()), g_bulk_nw(net.throats.size());
    for (std::size_t t = 0; t < net.throats.size(); ++t) {
        const Throat& th = net.throats[t];
        double geo = M_PI * std::pow(th.radius_um, 4) / (8.0 * th.length_um);
        g_bulk_w[t] = geo / fluids.mu_w_pa_s;
        g_bulk_nw[t] = geo / fluids.mu_nw_pa_s;
    }

    SolveOutcome abs_w = solve_network(net, g_bulk_w);
    SolveOutcome abs_nw = solve_network(net, g_bulk_nw);
    if (!abs_w.connected)
        throw std::runtime_error("relative_permeability: network carries no absolute flow");

    std::vector<KrPoint> out;
    for (const auto& st : states) {
        std::vector<double> gw(net.throats.size()), gnw(net.throats.size(), 0.0);
        for (std::size_t t = 0; t < net.throats.size(); ++t) {
            const Throat& th = net.throats[t];
            bool i_inv = st.pore_invaded[static_cast<std::size_t>(th.pore_i)];
            bool j_inv = st.pore_invaded[static_cast<std::size_t>(th.pore_j)];
            bool t_inv = st.throat_invaded[t];
            // Wetting keeps the bulk path only when the throat and both
            // junction pores are still water filled.
            gw[t] = (t_inv || i_inv || j_inv) ? corner_beta * g_bulk_w[t] : g_bulk_w[t];
            // Non-wetting continuity needs the throat and both pores.
            if (t_inv && i_inv && j_inv) gnw[t] = g_bulk_nw[t];
        }
        SolveOutcome sw_flow = solve_network(net, gw);
        SolveOutcome nw_flow = solve_network(net, gnw);
        KrPoint kp;
        kp.pc_pa = st.pc_pa;
        kp.sw = st.sw;
        kp.kr_w = sw_flow.connected ? sw_flow.flux / abs_w.flux : 0.0;
        kp.kr_nw = nw_flow.connected ? nw_flow.flux / abs_nw.flux : 0.0;
        out.push_back(kp);
    }
    return out;
}

void save_pc_curve_csv(const std::vector<DrainageState>& states, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("save_pc_curve_csv: cannot open " + path);
    f << "pc_pa,sw\n";
    f.precision(12);
    for (const auto& s : states) f << s.pc_pa << "," << s.sw << "\n";
}

void save_kr_curve_csv(const std::vector<KrPoint>& points, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("save_kr_curve_csv: cannot open " + path);
    f << "sw,kr_w,kr_nw,pc_pa\n";
    f.precision(12);
    for (const auto& p : points) f << p.sw << "," << p.kr_w << "," << p.kr_nw << "," << p.pc_pa << "\n";
}

}  // namespace dr::pnm
