#include "altopf/network.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace altopf {

Network Network::assemble(double base_mva, std::vector<Bus> buses,
                          std::vector<Branch> branches, std::vector<Device> devices) {
    Network net;
    net.base_mva = base_mva;
    net.buses = std::move(buses);
    net.branches = std::move(branches);
    net.devices = std::move(devices);

    auto index_unique = [](auto const& items, const char* kind) {
        std::unordered_map<int, int> map;
        for (int i = 0; i < static_cast<int>(items.size()); ++i) {
            auto [it, inserted] = map.emplace(items[i].id, i);
            if (!inserted) {
                std::ostringstream os;
                os << "duplicate " << kind << " id " << items[i].id;
                throw ValidationError(os.str());
            }
        }
        return map;
    };
    net.bus_index = index_unique(net.buses, "bus");
    net.branch_index = index_unique(net.branches, "branch");
    net.device_index = index_unique(net.devices, "device");

    net.out_branches.assign(net.buses.size(), {});
    net.in_branches.assign(net.buses.size(), {});
    net.devices_at.assign(net.buses.size(), {});

    auto resolve_bus = [&](int bus_id, const char* kind, int entity_id) {
        auto it = net.bus_index.find(bus_id);
        if (it == net.bus_index.end()) {
            std::ostringstream os;
            os << kind << " " << entity_id << " references unknown bus " << bus_id;
            throw ValidationError(os.str());
        }
        return it->second;
    };

    for (int e = 0; e < net.n_branches(); ++e) {
        const Branch& br = net.branches[e];
        net.out_branches[resolve_bus(br.origin, "branch", br.id)].push_back(e);
        net.in_branches[resolve_bus(br.dest, "branch", br.id)].push_back(e);
    }
    for (int d = 0; d < net.n_devices(); ++d) {
        net.devices_at[resolve_bus(net.devices[d].bus, "device", net.devices[d].id)].push_back(d);
    }
    return net;
}

bool operator==(const Bus& a, const Bus& b) {
    return a.id == b.id && a.base_kv == b.base_kv && a.v_min == b.v_min && a.v_max == b.v_max;
}

bool operator==(const Branch& a, const Branch& b) {
    return a.id == b.id && a.origin == b.origin && a.dest == b.dest && a.b == b.b &&
           a.g == b.g && a.p_max == b.p_max && a.switchable == b.switchable && a.x0 == b.x0;
}

bool operator==(const Device& a, const Device& b) {
    return a.id == b.id && a.bus == b.bus && a.cost == b.cost && a.p_min == b.p_min &&
           a.p_max == b.p_max && a.q_min == b.q_min && a.q_max == b.q_max &&
           a.ramp == b.ramp && a.commitable == b.commitable;
}

bool operator==(const Network& a, const Network& b) {
    return a.base_mva == b.base_mva && a.buses == b.buses && a.branches == b.branches &&
           a.devices == b.devices;
}

std::vector<Diagnostic> validate_network(const Network& net) {
    std::vector<Diagnostic> diags;
    auto error = [&](std::string entity, std::string message) {
        diags.push_back({Severity::Error, std::move(entity), std::move(message)});
    };

    for (const Bus& bus : net.buses) {
        std::string ent = "bus " + std::to_string(bus.id);
        if (!(bus.v_min > 0)) error(ent, "v_min must be positive");
        if (!(bus.v_min <= bus.v_max)) error(ent, "v_min exceeds v_max");
    }
    for (const Branch& br : net.branches) {
        std::string ent = "branch " + std::to_string(br.id);
        if (br.origin == br.dest) error(ent, "origin and dest coincide");
        if (!(br.p_max > 0)) error(ent, "thermal limit p_max must be positive");
        if (!net.bus_index.count(br.origin)) error(ent, "unknown origin bus");
        if (!net.bus_index.count(br.dest)) error(ent, "unknown dest bus");
    }
    for (const Device& dev : net.devices) {
        std::string ent = "device " + std::to_string(dev.id);
        if (!(dev.p_min <= dev.p_max)) error(ent, "p_min exceeds p_max");
        if (!(dev.q_min <= dev.q_max)) error(ent, "q_min exceeds q_max");
        if (!net.bus_index.count(dev.bus)) error(ent, "unknown bus");
    }
    return diags;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

int reference_bus_pos(const Network& net) {
    if (net.buses.empty()) throw std::invalid_argument("reference_bus_pos: no buses");
    int best = 0;
    for (int i = 1; i < net.n_buses(); ++i) {
        if (net.buses[i].id < net.buses[best].id) best = i;
    }
    return best;
}

ConnectivityResult connectivity_check(const Network& net, const IntVector& x) {
    if (x.size() != net.n_branches()) {
        throw std::invalid_argument("connectivity_check: x has " + std::to_string(x.size()) +
                                    " entries for " + std::to_string(net.n_branches()) +
                                    " branches");
    }
    UnionFind uf(net.n_buses());
    std::vector<int> on_degree(net.buses.size(), 0);
    for (int e = 0; e < net.n_branches(); ++e) {
        if (x[e] == 0) continue;
        int o = net.bus_index.at(net.branches[e].origin);
        int d = net.bus_index.at(net.branches[e].dest);
        uf.unite(o, d);
        ++on_degree[o];
        ++on_degree[d];
    }

    ConnectivityResult result;
    std::vector<int> roots;
    for (int i = 0; i < net.n_buses(); ++i) roots.push_back(uf.find(i));
    std::sort(roots.begin(), roots.end());
    result.island_count =
        static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());

    result.min_degree_satisfied = true;
    for (int i = 0; i < net.n_buses(); ++i) {
        if (on_degree[i] < std::min(2, net.degree(i))) {
            result.min_degree_satisfied = false;
            break;
        }
    }
    return result;
}

} // namespace altopf
