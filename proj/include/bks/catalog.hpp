#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bks/io.hpp"

namespace bks::catalog {

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> kNames = {
        "CEG-18", "P-24", "K-20", "Pen-40", "ZP-28", "CK-31", "CK-33", "CK-37",
        "P-33", "MP-57", "KP-36", "KP-40", "S-29", "S-31", "S-34", "S-35"};
    return kNames;
}

inline std::string data_dir() {
    if (const char* env = std::getenv("BKS_DATA_DIR")) return env;
#ifdef BKS_DEFAULT_DATA_DIR
    if (std::filesystem::exists(BKS_DEFAULT_DATA_DIR)) return BKS_DEFAULT_DATA_DIR;
#endif
    return "data";
}

inline std::string resolve_name(const std::string& name) {
    static const std::map<std::string, std::string> kAliases = {{"S-7", "S-34"}, {"P-40", "Pen-40"}};
    auto it = kAliases.find(name);
    if (it != kAliases.end()) return it->second;
    return name;
}

inline std::string file_for(const std::string& name) {
    std::string base;
    for (char c : name)
        if (c != '-') base += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return (std::filesystem::path(data_dir()) / (base + ".json")).string();
}

/// Loads a bundled KS set by name (alias-aware).  Unknown names raise with
/// the list of alternatives.
inline KSDocument get(const std::string& raw_name) {
    std::string name = resolve_name(raw_name);
    const auto& all = names();
    if (std::find(all.begin(), all.end(), name) == all.end()) {
        std::string msg = "unknown catalog set '" + raw_name + "'; available:";
        for (const auto& n : all) msg += " " + n;
        throw std::invalid_argument(msg);
    }
    KSDocument doc = load_ks_file(file_for(name));
    if (doc.instance.name() != name)
        throw std::runtime_error("catalog file name mismatch for " + name);
    if (!doc.checksum.empty() && doc.checksum != fingerprint(doc.instance))
        throw std::runtime_error("catalog checksum mismatch for " + name +
                                 " (file edited or corrupted)");
    return doc;
}

/// Name or path: catalog names take precedence, otherwise treat as a file.
inline KSDocument get_or_load(const std::string& name_or_path) {
    std::string name = resolve_name(name_or_path);
    const auto& all = names();
    if (std::find(all.begin(), all.end(), name) != all.end()) return get(name);
    if (std::filesystem::exists(name_or_path)) return load_ks_file(name_or_path);
    std::string msg = "'" + name_or_path + "' is neither a bundled set nor a file; available:";
    for (const auto& n : all) msg += " " + n;
    throw std::invalid_argument(msg);
}

}  // namespace bks::catalog
