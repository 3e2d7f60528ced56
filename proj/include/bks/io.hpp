#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bks/instance.hpp"
#include "bks/version.hpp"

namespace bks {

using ordered_json = nlohmann::ordered_json;

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Canonical line-based rendering of an instance; the FNV-1a hash of this
/// text is the instance fingerprint used in reports and data-file checksums.
inline std::string canonical_text(const KSInstance& inst) {
    std::ostringstream os;
    os << "ks|" << inst.name() << '|' << inst.dimension() << '\n';
    for (int i = 0; i < inst.n(); ++i) {
        os << "v|" << inst.ids()[i] << '|';
        if (inst.coordinate_backed()) {
            const auto& c = inst.coordinates()[i].coords;
            for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k].str();
        } else {
            os << "abstract";
        }
        os << '\n';
    }
    for (const auto& b : inst.bases()) {
        os << "b|" << b.label << '|';
        for (std::size_t k = 0; k < b.members.size(); ++k) os << (k ? "," : "") << b.members[k];
        os << '\n';
    }
    if (!inst.coordinate_backed()) {
        for (int i = 0; i < inst.n(); ++i)
            for (int j = i + 1; j < inst.n(); ++j)
                if (inst.orthogonal(i, j)) os << "e|" << i << ',' << j << '\n';
    }
    return os.str();
}

inline std::string fingerprint(const KSInstance& inst) { return hex64(fnv1a(canonical_text(inst))); }

// ----------------------------------------------------------------- expected

/// Per-entry reference metadata carried by catalog files (regression pins).
struct Expected {
    std::optional<int> vector_count, basis_count, dimension;
    std::optional<std::pair<int, int>> optimal_sizes;
    std::optional<std::pair<int, int>> optimal_alt_sizes;   // when sources conflict
    bool optimal_conflict = false;
    bool deep = false;
    std::optional<long long> capable_total, essential_total;
    std::map<int, long long> iso_capable, iso_essential;
    std::optional<std::vector<int>> reference_sa, reference_sb;   // basis labels
    std::optional<int> per_vector_basis_count;
};

struct KSDocument {
    KSInstance instance;
    Expected expected;
    ordered_json metadata;     // free-form
    std::string checksum;      // as stored in the file ("" if absent)
};

inline KSDocument parse_ks_document(const ordered_json& j) {
    if (!j.contains("format") || j["format"] != "ks-set/1")
        throw std::invalid_argument("ks document: unsupported format");
    KSDocument doc;
    std::string name = j.at("name").get<std::string>();
    int dim = j.at("dimension").get<int>();
    std::vector<std::string> ids;
    std::vector<ExactVector> coords;
    bool abstract = false;
    for (const auto& v : j.at("vectors")) {
        ids.push_back(v.at("id").get<std::string>());
        if (v.contains("coords")) {
            ExactVector ev;
            for (const auto& c : v["coords"]) {
                auto fe = parse_field_element(c.get<std::string>());
                if (!fe)
                    throw std::invalid_argument(name + ": bad coordinate '" +
                                                c.get<std::string>() + "'");
                ev.coords.push_back(*fe);
            }
            coords.push_back(std::move(ev));
        } else {
            abstract = true;
        }
    }
    if (abstract && !coords.empty())
        throw std::invalid_argument(name + ": vectors must be all coordinate-backed or all abstract");
    std::vector<Basis> bases;
    for (const auto& b : j.at("bases")) {
        Basis bb;
        bb.label = b.at("label").get<int>();
        for (const auto& mm : b.at("members")) bb.members.push_back(mm.get<int>());
        bases.push_back(std::move(bb));
    }
    if (abstract) {
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("orthogonality"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        doc.instance = KSInstance::from_orthogonality(name, dim, std::move(ids), edges, std::move(bases));
    } else {
        doc.instance =
            KSInstance::from_coordinates(name, dim, std::move(ids), std::move(coords), std::move(bases));
        if (j.contains("orthogonality")) {
            // optional explicit edge list must agree with the derived relation
            std::vector<Mask> adj(doc.instance.n(), 0);
            for (const auto& e : j["orthogonality"]) {
                int a = e.at(0).get<int>(), b = e.at(1).get<int>();
                adj[a] |= Mask(1) << b;
                adj[b] |= Mask(1) << a;
            }
            for (int v = 0; v < doc.instance.n(); ++v)
                if (adj[v] != doc.instance.adjacency(v))
                    throw std::invalid_argument(name +
                                                ": explicit orthogonality disagrees with coordinates");
        }
    }
    if (j.contains("metadata")) doc.metadata = j["metadata"];
    if (j.contains("checksum")) doc.checksum = j["checksum"].get<std::string>();
    if (j.contains("expected")) {
        const auto& e = j["expected"];
        Expected& x = doc.expected;
        if (e.contains("vector_count")) x.vector_count = e["vector_count"].get<int>();
        if (e.contains("basis_count")) x.basis_count = e["basis_count"].get<int>();
        if (e.contains("dimension")) x.dimension = e["dimension"].get<int>();
        if (e.contains("optimal")) {
            const auto& o = e["optimal"];
            auto sz = o.at("sizes");
            x.optimal_sizes = {sz.at(0).get<int>(), sz.at(1).get<int>()};
            x.optimal_conflict = o.value("status", "confirmed") == std::string("conflict");
            if (o.contains("alt_sizes"))
                x.optimal_alt_sizes = {o["alt_sizes"].at(0).get<int>(), o["alt_sizes"].at(1).get<int>()};
            x.deep = o.value("deep", false);
        }
        if (e.contains("census")) {
            x.capable_total = e["census"].at("capable").get<long long>();
            x.essential_total = e["census"].at("essential").get<long long>();
        }
        auto read_iso = [&](const char* key, std::map<int, long long>& into) {
            if (!e.contains(key)) return;
            for (auto it = e[key].begin(); it != e[key].end(); ++it)
                into[std::stoi(it.key())] = it.value().get<long long>();
        };
        read_iso("iso_capable", x.iso_capable);
        read_iso("iso_essential", x.iso_essential);
        if (e.contains("reference_pair")) {
            x.reference_sa = e["reference_pair"].at("sa").get<std::vector<int>>();
            x.reference_sb = e["reference_pair"].at("sb").get<std::vector<int>>();
        }
        if (e.contains("per_vector_basis_count"))
            x.per_vector_basis_count = e["per_vector_basis_count"].get<int>();
    }
    return doc;
}

/// File content problems surface as runtime_error (CLI exit code 2);
/// invalid_argument stays reserved for usage-level mistakes.
inline KSDocument load_ks_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    try {
        ordered_json j;
        in >> j;
        return parse_ks_document(j);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

/// Canonical serialization; parse(serialize(doc)) is the identity on
/// canonical documents.
inline ordered_json serialize_ks_document(const KSInstance& inst, const ordered_json& metadata = {},
                                          const ordered_json& expected = {}) {
    ordered_json j;
    j["format"] = "ks-set/1";
    j["name"] = inst.name();
    j["dimension"] = inst.dimension();
    j["vectors"] = ordered_json::array();
    for (int i = 0; i < inst.n(); ++i) {
        ordered_json v;
        v["id"] = inst.ids()[i];
        if (inst.coordinate_backed()) {
            ordered_json cs = ordered_json::array();
            for (const auto& c : inst.coordinates()[i].coords) cs.push_back(c.str());
            v["coords"] = cs;
        }
        j["vectors"].push_back(v);
    }
    j["bases"] = ordered_json::array();
    for (const auto& b : inst.bases()) {
        ordered_json bb;
        bb["label"] = b.label;
        bb["members"] = b.members;
        j["bases"].push_back(bb);
    }
    if (!inst.coordinate_backed()) {
        ordered_json es = ordered_json::array();
        for (int i = 0; i < inst.n(); ++i)
            for (int k = i + 1; k < inst.n(); ++k)
                if (inst.orthogonal(i, k)) es.push_back(ordered_json::array({i, k}));
        j["orthogonality"] = es;
    }
    if (!metadata.is_null() && !metadata.empty()) j["metadata"] = metadata;
    if (!expected.is_null() && !expected.empty()) j["expected"] = expected;
    j["checksum"] = fingerprint(inst);
    return j;
}

// ----------------------------------------------------------------- reports

/// Envelope for CLI results: `payload` is deterministic (identical across
/// --jobs settings and re-runs); command echo and timing live outside it.
inline ordered_json make_report(const std::string& command_echo, const KSInstance& inst,
                                ordered_json payload, double wall_ms) {
    ordered_json j;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["command"] = command_echo;
    j["instance"] = {{"name", inst.name()}, {"fingerprint", fingerprint(inst)}};
    j["payload"] = std::move(payload);
    j["timing"] = {{"wall_ms", wall_ms}};
    return j;
}

}  // namespace bks
