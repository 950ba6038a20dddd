#pragma once
// JSON (de)serialization for sequences.  All floats are written as decimal
// strings with enough digits to round-trip binary64 exactly.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shcert/seqspace.hpp"

namespace shcert {

inline std::string group_label(const SymmetryGroup& g) {
    switch (g.name) {
        case GroupName::Z2xZ1: return "Z2xZ1";
        case GroupName::D2: return "D2";
        case GroupName::D4: return "D4";
        case GroupName::Dj: return "D" + std::to_string(g.j);
    }
    throw inconsistency_error("unknown group name");
}

inline SymmetryGroup parse_group_label(const std::string& s) {
    if (s == "Z2xZ1") return build_group(GroupName::Z2xZ1);
    if (s == "D2") return build_group(GroupName::D2);
    if (s == "D4") return build_group(GroupName::D4);
    if (s.size() >= 2 && s[0] == 'D') {
        int j = 0;
        try {
            std::size_t pos = 0;
            j = std::stoi(s.substr(1), &pos);
            if (pos + 1 != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw format_error("unrecognized group label '" + s + "'");
        }
        if (j == 2) return build_group(GroupName::D2);
        if (j == 4) return build_group(GroupName::D4);
        return build_group(GroupName::Dj, j);
    }
    throw format_error("unrecognized group label '" + s + "'");
}

inline nlohmann::json interval_to_json(const Interval& x) {
    return nlohmann::json::array({double_to_string(x.lo), double_to_string(x.hi)});
}

inline Interval interval_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
        throw format_error("interval must be a pair of decimal strings");
    return Interval(double_from_string(j[0].get<std::string>()),
                    double_from_string(j[1].get<std::string>()));
}

inline nlohmann::json seq_to_json(const SymSequence& u) {
    nlohmann::json doc;
    doc["group"] = group_label(u.group());
    doc["d"] = double_to_string(u.d);
    doc["N"] = u.N();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t s = 0; s < u.size(); ++s) {
        const auto n = u.table->reps[s];
        rows.push_back(nlohmann::json::array(
            {nlohmann::json::array({n[0], n[1]}), interval_to_json(u.entries[s])}));
    }
    doc["entries"] = rows;
    return doc;
}

inline SymSequence seq_from_json(const nlohmann::json& doc) {
    try {
        const SymmetryGroup g = parse_group_label(doc.at("group").get<std::string>());
        const double d = double_from_string(doc.at("d").get<std::string>());
        const int n_order = doc.at("N").get<int>();
        if (!(d > 0.0)) throw format_error("d must be positive");
        if (n_order < 0) throw format_error("N must be nonnegative");
        SymSequence u(make_table(g, n_order), d);
        std::vector<bool> seen(u.size(), false);
        for (const auto& row : doc.at("entries")) {
            if (!row.is_array() || row.size() != 2) throw format_error("bad entry row");
            const std::array<int, 2> n = {row[0].at(0).get<int>(), row[0].at(1).get<int>()};
            const std::size_t s = u.table->slot(n);
            if (u.table->reps[s] != n)
                throw format_error("entry index is not an orbit representative");
            if (seen[s]) throw format_error("duplicate entry index");
            seen[s] = true;
            u.entries[s] = interval_from_json(row[1]);
        }
        for (std::size_t s = 0; s < u.size(); ++s)
            if (!seen[s]) throw format_error("missing entry for a representative");
        return u;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("sequence document: ") + e.what());
    }
}

inline void save_sequence(const SymSequence& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot open '" + path + "' for writing");
    out << seq_to_json(u).dump(1) << "\n";
    if (!out) throw format_error("write to '" + path + "' failed");
}

inline SymSequence load_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("JSON parse of '") + path + "': " + e.what());
    }
    return seq_from_json(doc);
}

}  // namespace shcert
