#include "output.hpp"

#include "kakinuma/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

namespace lab {

std::string sha1_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha1(), nullptr))
        throw std::runtime_error("SHA-1 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string git_blob_sha1(const std::string& bytes) {
    std::string s = "blob " + std::to_string(bytes.size());
    s.push_back('\0');
    return sha1_hex(s + bytes);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_sha1,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), cols_(header.size()), path_(path) {
    if (!out_) throw kakinuma::ConfigError("cannot write " + path.string());
    out_ << "# config_sha1=" << config_sha1 << '\n';
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep() {
    if (col_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (col_ != cols_)
        throw std::logic_error(path_.string() + ": row has " + std::to_string(col_) + " fields, header has " +
                               std::to_string(cols_));
    out_ << '\n';
    col_ = 0;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kakinuma::ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace lab
