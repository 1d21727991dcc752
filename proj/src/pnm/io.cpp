#include <fstream>
#include <sstream>

#include "dr/pnm/network.hpp"

namespace dr::pnm {

void save_network_csv(const PoreNetwork& net, const std::string& pores_path,
                      const std::string& throats_path) {
    std::ofstream pf(pores_path, std::ios::trunc);
    if (!pf) throw std::runtime_error("save_network_csv: cannot open " + pores_path);
    pf << "id,x,y,z,radius_um,volume_um3,inlet,outlet\n";
    pf.precision(12);
    for (std::size_t i = 0; i < net.pores.size(); ++i) {
        const Pore& p = net.pores[i];
        pf << i << "," << p.center[0] << "," << p.center[1] << "," << p.center[2] << ","
           << p.radius_um << "," << p.volume_um3 << "," << (p.inlet ? 1 : 0) << ","
           << (p.outlet ? 1 : 0) << "\n";
    }
    std::ofstream tf(throats_path, std::ios::trunc);
    if (!tf) throw std::runtime_error("save_network_csv: cannot open " + throats_path);
    tf << "pore_i,pore_j,radius_um,length_um\n";
    tf.precision(12);
    // Domain geometry rides along as a comment so load can restore it.
    tf << "# area_um2=" << net.area_um2 << " length_um=" << net.length_um
       << " voxel_size_um=" << net.voxel_size_um << "\n";
    for (const auto& t : net.throats)
        tf << t.pore_i << "," << t.pore_j << "," << t.radius_um << "," << t.length_um << "\n";
}

PoreNetwork load_network_csv(const std::string& pores_path, const std::string& throats_path) {
    PoreNetwork net;
    std::ifstream pf(pores_path);
    if (!pf) throw std::runtime_error("load_network_csv: cannot open " + pores_path);
    std::string line;
    std::getline(pf, line);  // header
    while (std::getline(pf, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Pore p;
        std::size_t id;
        char c;
        int inlet, outlet;
        if (!(ss >> id >> c >> p.center[0] >> c >> p.center[1] >> c >> p.center[2] >> c >>
              p.radius_um >> c >> p.volume_um3 >> c >> inlet >> c >> outlet))
            throw std::runtime_error("load_network_csv: malformed pore row '" + line + "'");
        p.inlet = inlet != 0;
        p.outlet = outlet != 0;
        net.pores.push_back(p);
    }
    std::ifstream tf(throats_path);
    if (!tf) throw std::runtime_error("load_network_csv: cannot open " + throats_path);
    std::getline(tf, line);  // header
    while (std::getline(tf, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string kv;
            while (ss >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                double val = std::stod(kv.substr(eq + 1));
                if (key == "area_um2") net.area_um2 = val;
                if (key == "length_um") net.length_um = val;
                if (key == "voxel_size_um") net.voxel_size_um = val;
            }
            continue;
        }
        std::istringstream ss(line);
        Throat t;
        char c;
        if (!(ss >> t.pore_i >> c >> t.pore_j >> c >> t.radius_um >> c >> t.length_um))
            throw std::runtime_error("load_network_csv: malformed throat row '" + line + "'");
        net.throats.push_back(t);
    }
    net.validate();
    return net;
}

std::string network_stats_text(const PoreNetwork& net) {
    double mean_pr = 0.0, mean_tr = 0.0, pore_vol = 0.0;
    std::size_t inlets = 0, outlets = 0;
    for (const auto& p : net.pores) {
        mean_pr += p.radius_um;
        pore_vol += p.volume_um3;
        inlets += p.inlet ? 1 : 0;
        outlets += p.outlet ? 1 : 0;
    }
    for (const auto& t : net.throats) mean_tr += t.radius_um;
    if (!net.pores.empty()) mean_pr /= static_cast<double>(net.pores.size());
    if (!net.throats.empty()) mean_tr /= static_cast<double>(net.throats.size());

    std::ostringstream os;
    os.precision(9);
    os << "pores=" << net.pores.size() << "\n"
       << "throats=" << net.throats.size() << "\n"
       << "inlet_pores=" << inlets << "\n"
       << "outlet_pores=" << outlets << "\n"
       << "mean_pore_radius_um=" << mean_pr << "\n"
       << "mean_throat_radius_um=" << mean_tr << "\n"
       << "pore_volume_um3=" << pore_vol << "\n"
       << "area_um2=" << net.area_um2 << "\n"
       << "length_um=" << net.length_um << "\n"
       << "voxel_size_um=" << net.voxel_size_um << "\n";
    return os.str();
}

}  // namespace dr::pnm
