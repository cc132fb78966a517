#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace techmap::testkit {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "techmap");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

/// relative path -> sha256 for every regular file under `root`.
std::map<std::string, std::string> tree_hashes(const std::filesystem::path& root);

std::filesystem::path fixture(const std::string& name);
std::filesystem::path data_file(const std::string& name);

} // namespace techmap::testkit
