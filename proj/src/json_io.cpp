#include "altopf/json_io.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace altopf {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("network json: " + path + ": " + what);
}

double require_number(const ordered_json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "/" + key, "missing required field");
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "/" + key, "expected a number");
    return v.get<double>();
}

int require_int(const ordered_json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "/" + key, "missing required field");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
    return v.get<int>();
}

} // namespace

Network parse_network_json(const std::string& text,
                           std::vector<std::string>* defaults_applied) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
    if (!doc.is_object()) fail("/", "top level must be an object");

    auto note_default = [&](const std::string& path, const std::string& what) {
        if (defaults_applied) defaults_applied->push_back(path + ": " + what);
    };

    double base_mva = 100.0;
    if (doc.contains("base_mva")) {
        if (!doc["base_mva"].is_number()) fail("/base_mva", "expected a number");
        base_mva = doc["base_mva"].get<double>();
    } else {
        note_default("/base_mva", "defaulted to 100");
    }

    std::vector<Bus> buses;
    if (!doc.contains("buses") || !doc["buses"].is_array()) fail("/buses", "expected an array");
    int i = 0;
    for (const auto& jb : doc["buses"]) {
        std::string path = "/buses/" + std::to_string(i++);
        if (!jb.is_object()) fail(path, "expected an object");
        Bus bus;
        bus.id = require_int(jb, path, "id");
        bus.base_kv = jb.contains("base_kv") ? require_number(jb, path, "base_kv") : 0.0;
        if (jb.contains("v_min")) {
            bus.v_min = require_number(jb, path, "v_min");
        } else {
            bus.v_min = 0.9;
            note_default(path + "/v_min", "defaulted to 0.9");
        }
        if (jb.contains("v_max")) {
            bus.v_max = require_number(jb, path, "v_max");
        } else {
            bus.v_max = 1.1;
            note_default(path + "/v_max", "defaulted to 1.1");
        }
        buses.push_back(bus);
    }

    std::vector<Branch> branches;
    if (doc.contains("branches")) {
        if (!doc["branches"].is_array()) fail("/branches", "expected an array");
        i = 0;
        for (const auto& je : doc["branches"]) {
            std::string path = "/branches/" + std::to_string(i++);
            if (!je.is_object()) fail(path, "expected an object");
            Branch br;
            br.id = require_int(je, path, "id");
            br.origin = require_int(je, path, "origin");
            br.dest = require_int(je, path, "dest");
            br.b = require_number(je, path, "b");
            br.g = je.contains("g") ? require_number(je, path, "g") : 0.0;
            br.p_max = require_number(je, path, "p_max");
            if (je.contains("switchable")) {
                if (!je["switchable"].is_boolean()) fail(path + "/switchable", "expected a bool");
                br.switchable = je["switchable"].get<bool>();
            } else {
                br.switchable = true;
                note_default(path + "/switchable", "defaulted to true");
            }
            if (je.contains("x0")) {
                br.x0 = require_int(je, path, "x0");
                if (br.x0 != 0 && br.x0 != 1) fail(path + "/x0", "must be 0 or 1");
            } else {
                br.x0 = 1;
                note_default(path + "/x0", "defaulted to 1");
            }
            branches.push_back(br);
        }
    }

    std::vector<Device> devices;
    if (doc.contains("devices")) {
        if (!doc["devices"].is_array()) fail("/devices", "expected an array");
        i = 0;
        for (const auto& jd : doc["devices"]) {
            std::string path = "/devices/" + std::to_string(i++);
            if (!jd.is_object()) fail(path, "expected an object");
            Device dev;
            dev.id = require_int(jd, path, "id");
            dev.bus = require_int(jd, path, "bus");
            dev.cost = jd.contains("cost") ? require_number(jd, path, "cost") : 0.0;
            dev.p_min = require_number(jd, path, "p_min");
            dev.p_max = require_number(jd, path, "p_max");
            double q_default = 0.3 * std::abs(dev.p_max);
            if (jd.contains("q_min")) {
                dev.q_min = require_number(jd, path, "q_min");
            } else {
                dev.q_min = -q_default;
                note_default(path + "/q_min", "defaulted to -0.3*|p_max|");
            }
            if (jd.contains("q_max")) {
                dev.q_max = require_number(jd, path, "q_max");
            } else {
                dev.q_max = q_default;
                note_default(path + "/q_max", "defaulted to 0.3*|p_max|");
            }
            if (jd.contains("ramp")) {
                dev.ramp = require_number(jd, path, "ramp");
            } else {
                dev.ramp = kInf;
            }
            if (jd.contains("commitable")) {
                if (!jd["commitable"].is_boolean()) fail(path + "/commitable", "expected a bool");
                dev.commitable = jd["commitable"].get<bool>();
            } else {
                dev.commitable = false;
            }
            devices.push_back(dev);
        }
    }

    return Network::assemble(base_mva, std::move(buses), std::move(branches),
                             std::move(devices));
}

std::string emit_network_json(const Network& net) {
    ordered_json doc;
    doc["base_mva"] = net.base_mva;
    doc["buses"] = ordered_json::array();
    for (const Bus& bus : net.buses) {
        ordered_json jb;
        jb["id"] = bus.id;
        jb["base_kv"] = bus.base_kv;
        jb["v_min"] = bus.v_min;
        jb["v_max"] = bus.v_max;
        doc["buses"].push_back(jb);
    }
    doc["branches"] = ordered_json::array();
    for (const Branch& br : net.branches) {
        ordered_json je;
        je["id"] = br.id;
        je["origin"] = br.origin;
        je["dest"] = br.dest;
        je["b"] = br.b;
        je["g"] = br.g;
        je["p_max"] = br.p_max;
        je["switchable"] = br.switchable;
        je["x0"] = br.x0;
        doc["branches"].push_back(je);
    }
    doc["devices"] = ordered_json::array();
    for (const Device& dev : net.devices) {
        ordered_json jd;
        jd["id"] = dev.id;
        jd["bus"] = dev.bus;
        jd["cost"] = dev.cost;
        jd["p_min"] = dev.p_min;
        jd["p_max"] = dev.p_max;
        jd["q_min"] = dev.q_min;
        jd["q_max"] = dev.q_max;
        if (std::isfinite(dev.ramp)) jd["ramp"] = dev.ramp;
        jd["commitable"] = dev.commitable;
        doc["devices"].push_back(jd);
    }
    return doc.dump(2);
}

} // namespace altopf
