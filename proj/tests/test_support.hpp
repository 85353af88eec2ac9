#pragma once

#include <cstdlib>
#include <filesystem>

#include "theta/catalogue.hpp"

namespace theta::test {

inline std::filesystem::path data_dir() {
#ifdef THETA_DATA_DIR
    return THETA_DATA_DIR;
#else
    return "data/catalogue";
#endif
}

inline std::filesystem::path cache_dir() {
    if (const char* env = std::getenv("THETA_CACHE_DIR")) return env;
    return std::filesystem::temp_directory_path() / "theta-test-cache";
}

// shipped catalogue, loaded once per process
inline const Catalogue& shipped_catalogue() {
    static Catalogue cat = [] {
        Catalogue c;
        c.load_directory(data_dir());
        return c;
    }();
    return cat;
}

} // namespace theta::test
