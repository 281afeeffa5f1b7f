#pragma once

#include "altopf/types.hpp"

#include <unordered_map>
#include <vector>

namespace altopf {

struct Bus {
    int id = 0;
    double base_kv = 0.0;
    double v_min = 0.9; // per unit
    double v_max = 1.1; // per unit
};

struct Branch {
    int id = 0;
    int origin = 0; // bus id
    int dest = 0;   // bus id
    double b = 0.0; // per-unit susceptance, b = x / (r^2 + x^2) >= 0 for x > 0
    double g = 0.0; // per-unit conductance, g = r / (r^2 + x^2)
    double p_max = 0.0; // per-unit thermal limit
    bool switchable = true;
    int x0 = 1; // initial on/off state
};

struct Device {
    int id = 0;
    int bus = 0;
    double cost = 0.0; // objective coefficient per unit of per-unit power
    double p_min = 0.0;
    double p_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    double ramp = kInf; // per-unit change allowed per timestep
    bool commitable = false;
};

/// Immutable network model. Construct through assemble(), which resolves
/// bus references and builds the adjacency maps.
struct Network {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Device> devices;

    // Derived (filled by assemble).
    std::unordered_map<int, int> bus_index;    // bus id -> position in buses
    std::unordered_map<int, int> branch_index; // branch id -> position
    std::unordered_map<int, int> device_index; // device id -> position
    std::vector<std::vector<int>> out_branches; // bus position -> branch positions with origin here
    std::vector<std::vector<int>> in_branches;  // bus position -> branch positions with dest here
    std::vector<std::vector<int>> devices_at;   // bus position -> device positions

    int n_buses() const { return static_cast<int>(buses.size()); }
    int n_branches() const { return static_cast<int>(branches.size()); }
    int n_devices() const { return static_cast<int>(devices.size()); }

    /// Number of branches incident to the bus at `bus_pos` (data degree,
    /// independent of switch state).
    int degree(int bus_pos) const {
        return static_cast<int>(out_branches[bus_pos].size() + in_branches[bus_pos].size());
    }

    /// Builds a Network from parts: checks id uniqueness and referential
    /// integrity (throws ValidationError), then fills index/adjacency maps.
    static Network assemble(double base_mva, std::vector<Bus> buses,
                            std::vector<Branch> branches, std::vector<Device> devices);
};

bool operator==(const Bus& a, const Bus& b);
bool operator==(const Branch& a, const Branch& b);
bool operator==(const Device& a, const Device& b);
bool operator==(const Network& a, const Network& b);

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string entity; // e.g. "bus 3", "branch 7"
    std::string message;
};

/// Checks the value invariants of every entity. Empty result means the
/// network is well formed. Referential integrity is enforced earlier by
/// Network::assemble and is re-checked here defensively.
std::vector<Diagnostic> validate_network(const Network& net);

struct ConnectivityResult {
    int island_count = 0;
    bool min_degree_satisfied = false;
};

/// Union-find island count over branches with x_e = 1, plus the degree
/// heuristic: every bus must have at least min(2, data degree) energized
/// incident branches. The heuristic is exactly that -- islanded networks
/// can satisfy it and connected ones can violate it.
ConnectivityResult connectivity_check(const Network& net, const IntVector& x);

/// Position of the reference bus (lowest id); used as the angle gauge and
/// the recovery slack bus.
int reference_bus_pos(const Network& net);

} // namespace altopf
