#include "clustab/hash.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clustab/error.hpp"

namespace clustab {

std::string hex64(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("data", "cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return hash_string(ss.str());
}

std::string hash_string(std::string_view bytes) {
    return "fnv1a64:" + hex64(fnv1a64(bytes));
}

}  // namespace clustab
