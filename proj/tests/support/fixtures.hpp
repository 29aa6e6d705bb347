#pragma once

#include <filesystem>
#include <string>

#include "carbondef/io/files.hpp"

namespace carbondef::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(CARBONDEF_FIXTURES) / name;
}

inline std::string read_fixture(const std::string& name) { return io::read_file(fixture(name)); }

}  // namespace carbondef::testing
