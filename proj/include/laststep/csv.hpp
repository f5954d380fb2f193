#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace laststep {

inline constexpr const char* kVersion = "0.1.0";

// shortest text that round-trips a double exactly
std::string format_double(double v);

std::uint64_t hash_string(const std::string& s);  // FNV-1a 64

struct CsvTable {
  std::vector<std::string> comments;  // leading '#' lines, markers stripped
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
std::vector<std::string> split_csv_line(const std::string& line);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_line);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);

 private:
  std::FILE* out_ = nullptr;
};

// one-line JSON comment carrying tool version, a hash of the generating
// configuration, and the configuration itself
std::string csv_comment(const std::string& config);

// flat "key = value" text; '#' starts a comment, later keys win
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// "k1=v1,k2=v2" fragments used by problem and schedule specs
std::map<std::string, std::string> parse_kv_list(const std::string& text);

}  // namespace laststep
