#include "hyplab/lab.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyplab::lab {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << bytes;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_file(p)); }

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw UsageError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed config");
  }
}

namespace {
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + quote(header[i]);
  body_ += "\n";
}

Csv& Csv::cell(const std::string& s) {
  pending_.push_back(quote(s));
  return *this;
}
Csv& Csv::cell(double v) { return cell(fmt17(v)); }
Csv& Csv::cell(long long v) { return cell(std::to_string(v)); }

void Csv::end_row() {
  if (pending_.size() != width_) throw std::logic_error("Csv: row width does not match the header");
  for (std::size_t i = 0; i < pending_.size(); ++i) body_ += (i ? "," : "") + pending_[i];
  body_ += "\n";
  pending_.clear();
}

void Csv::footer(const std::string& line) { foot_ += "# " + line + "\n"; }

std::string Csv::str() const { return body_ + foot_; }

}  // namespace hyplab::lab
