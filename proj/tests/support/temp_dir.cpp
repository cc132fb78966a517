#include "temp_dir.hpp"

#include "techmap/hash.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace techmap::testkit {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto p = fs::temp_directory_path() / (prefix + "-" + std::to_string(rd()));
        if (fs::create_directories(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_file(e.path());
    return out;
}

fs::path fixture(const std::string& name) { return fs::path(TECHMAP_FIXTURES) / name; }
fs::path data_file(const std::string& name) { return fs::path(TECHMAP_DATA) / name; }

} // namespace techmap::testkit
