#include "altopf/matpower.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace altopf {

namespace {

struct MatpowerTable {
    std::vector<std::vector<double>> rows;
    std::vector<int> line_numbers; // 1-based source line per row
};

[[noreturn]] void fail(const std::string& table, int line, const std::string& what) {
    std::ostringstream os;
    os << "matpower parse error in table '" << table << "' at line " << line << ": " << what;
    throw ParseError(os.str());
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('%');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

/// Splits the text into "mpc.<name> = <body>;" assignments. Matrix bodies
/// run from '[' to the matching ']'.
struct Assignment {
    std::string name;
    std::string body;
    int start_line = 0;
};

std::vector<Assignment> scan_assignments(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) lines.push_back(strip_comment(line));
    }
    std::vector<Assignment> out;
    for (size_t i = 0; i < lines.size(); ++i) {
        auto mpc = lines[i].find("mpc.");
        if (mpc == std::string::npos) continue;
        auto eq = lines[i].find('=', mpc);
        if (eq == std::string::npos) continue;
        Assignment a;
        a.start_line = static_cast<int>(i) + 1;
        a.name = lines[i].substr(mpc + 4, eq - mpc - 4);
        while (!a.name.empty() && (a.name.back() == ' ' || a.name.back() == '\t')) a.name.pop_back();
        std::string rest = lines[i].substr(eq + 1);
        if (rest.find('[') == std::string::npos) {
            a.body = rest;
            out.push_back(std::move(a));
            continue;
        }
        // Accumulate until the closing bracket.
        std::string body = rest;
        size_t j = i;
        while (body.find(']') == std::string::npos && j + 1 < lines.size()) {
            ++j;
            body += "\n" + lines[j];
        }
        if (body.find(']') == std::string::npos) fail(a.name, a.start_line, "missing closing ']'");
        a.body = body;
        out.push_back(std::move(a));
        i = j;
    }
    return out;
}

MatpowerTable parse_matrix(const Assignment& a) {
    MatpowerTable table;
    auto open = a.body.find('[');
    auto close = a.body.find(']');
    std::string inner = a.body.substr(open + 1, close - open - 1);
    std::istringstream in(inner);
    std::string line;
    int line_no = a.start_line - 1;
    while (std::getline(in, line)) {
        ++line_no;
        // Rows may also be separated by ';' within one line.
        std::string current;
        auto flush_row = [&](const std::string& row_text) {
            std::istringstream row_in(row_text);
            std::vector<double> row;
            std::string tok;
            while (row_in >> tok) {
                char* end = nullptr;
                double value = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0') {
                    fail(a.name, line_no, "expected a number, got '" + tok + "'");
                }
                row.push_back(value);
            }
            if (!row.empty()) {
                table.rows.push_back(std::move(row));
                table.line_numbers.push_back(line_no);
            }
        };
        for (char c : line) {
            if (c == ';') {
                flush_row(current);
                current.clear();
            } else {
                current += c;
            }
        }
        flush_row(current);
    }
    return table;
}

double col(const MatpowerTable& t, const std::string& name, size_t row, size_t index) {
    if (index >= t.rows[row].size()) {
        fail(name, t.line_numbers[row],
             "row has " + std::to_string(t.rows[row].size()) + " columns, need at least " +
                 std::to_string(index + 1));
    }
    return t.rows[row][index];
}

} // namespace

Network parse_matpower_case(const std::string& text) {
    std::unordered_map<std::string, MatpowerTable> tables;
    double base_mva = 0.0;
    bool have_base = false;

    for (const Assignment& a : scan_assignments(text)) {
        if (a.name == "baseMVA") {
            std::string body = a.body;
            for (char& c : body)
                if (c == ';') c = ' ';
            std::istringstream in(body);
            if (!(in >> base_mva)) fail("baseMVA", a.start_line, "expected a number");
            have_base = true;
        } else if (a.name == "bus" || a.name == "branch" || a.name == "gen" ||
                   a.name == "gencost") {
            tables[a.name] = parse_matrix(a);
        }
        // Other mpc fields (version, bus_name, ...) are ignored.
    }

    if (!have_base) throw ParseError("matpower parse error: mpc.baseMVA not found");
    for (const char* required : {"bus", "branch", "gen", "gencost"}) {
        if (!tables.count(required)) {
            throw ParseError(std::string("matpower parse error: mpc.") + required +
                             " table not found");
        }
    }
    if (base_mva <= 0) throw ParseError("matpower parse error: baseMVA must be positive");

    const MatpowerTable& bus_t = tables["bus"];
    const MatpowerTable& branch_t = tables["branch"];
    const MatpowerTable& gen_t = tables["gen"];
    const MatpowerTable& cost_t = tables["gencost"];

    std::vector<Bus> buses;
    std::vector<Device> devices;
    int next_device_id = 1;

    for (size_t r = 0; r < bus_t.rows.size(); ++r) {
        Bus bus;
        bus.id = static_cast<int>(col(bus_t, "bus", r, 0));
        bus.base_kv = col(bus_t, "bus", r, 9);
        double v_max = col(bus_t, "bus", r, 11);
        double v_min = col(bus_t, "bus", r, 12);
        bus.v_max = v_max > 0 ? v_max : 1.1;
        bus.v_min = v_min > 0 ? v_min : 0.9;
        buses.push_back(bus);

        double pd = col(bus_t, "bus", r, 2);
        double qd = col(bus_t, "bus", r, 3);
        if (pd != 0.0 || qd != 0.0) {
            Device load;
            load.id = next_device_id++;
            load.bus = bus.id;
            load.cost = 0.0;
            load.p_min = load.p_max = -pd / base_mva;
            load.q_min = load.q_max = -qd / base_mva;
            load.commitable = false;
            devices.push_back(load);
        }
    }

    std::vector<Branch> branches;
    for (size_t r = 0; r < branch_t.rows.size(); ++r) {
        Branch br;
        br.id = static_cast<int>(r) + 1;
        br.origin = static_cast<int>(col(branch_t, "branch", r, 0));
        br.dest = static_cast<int>(col(branch_t, "branch", r, 1));
        double res = col(branch_t, "branch", r, 2);
        double x = col(branch_t, "branch", r, 3);
        double denom = res * res + x * x;
        if (denom == 0.0) fail("branch", branch_t.line_numbers[r], "r and x are both zero");
        br.b = x / denom;
        br.g = res / denom;
        double rate_a = col(branch_t, "branch", r, 5);
        br.p_max = rate_a > 0 ? rate_a / base_mva : 1e3;
        double tap = col(branch_t, "branch", r, 8);
        double shift = col(branch_t, "branch", r, 9);
        if ((tap != 0.0 && tap != 1.0) || shift != 0.0) {
            fail("branch", branch_t.line_numbers[r],
                 "off-nominal taps and phase shifts are not supported");
        }
        br.x0 = col(branch_t, "branch", r, 10) > 0 ? 1 : 0;
        br.switchable = true;
        branches.push_back(br);
    }

    if (cost_t.rows.size() != gen_t.rows.size()) {
        fail("gencost", cost_t.line_numbers.empty() ? 0 : cost_t.line_numbers[0],
             "gencost must have one row per generator");
    }
    for (size_t r = 0; r < gen_t.rows.size(); ++r) {
        Device gen;
        gen.id = next_device_id++;
        gen.bus = static_cast<int>(col(gen_t, "gen", r, 0));
        gen.q_max = col(gen_t, "gen", r, 3) / base_mva;
        gen.q_min = col(gen_t, "gen", r, 4) / base_mva;
        gen.p_max = col(gen_t, "gen", r, 8) / base_mva;
        gen.p_min = col(gen_t, "gen", r, 9) / base_mva;
        gen.commitable = false;

        int model = static_cast<int>(col(cost_t, "gencost", r, 0));
        if (model != 2) {
            fail("gencost", cost_t.line_numbers[r],
                 "only polynomial cost (model 2) is supported");
        }
        int n_cost = static_cast<int>(col(cost_t, "gencost", r, 3));
        if (n_cost > 2) {
            fail("gencost", cost_t.line_numbers[r],
                 "polynomial degree exceeds 1 (n = " + std::to_string(n_cost) +
                     "); only linear costs are supported");
        }
        // Cost rows are [model startup shutdown n c_(n-1) ... c_0]; with
        // n <= 2 the slope (if any) is the first coefficient.
        double slope = n_cost == 2 ? col(cost_t, "gencost", r, 4) : 0.0;
        gen.cost = slope * base_mva; // per-unit dispatch keeps source currency
        devices.push_back(gen);
    }

    return Network::assemble(base_mva, std::move(buses), std::move(branches),
                             std::move(devices));
}

} // namespace altopf
