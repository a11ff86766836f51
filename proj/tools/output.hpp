#pragma once

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lab {

using Json = nlohmann::ordered_json;

std::string sha1_hex(const std::string& bytes);
// Hash of the content as git stores it: sha1("blob <size>\0" + bytes).
std::string git_blob_sha1(const std::string& bytes);

std::string format_double(double v);

// CSV with a leading "# config_sha1=..." line, a header row, %.17g floats and LF endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& config_sha1,
              const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(const std::string& v);
    void end_row();

private:
    void sep();
    std::ofstream out_;
    std::size_t cols_;
    std::size_t col_ = 0;
    std::filesystem::path path_;
};

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace lab
