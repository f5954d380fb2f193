#include "laststep/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "laststep/errors.hpp"

namespace laststep {

std::string format_double(double v) {
  // try increasing precision until the text parses back exactly
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  CsvTable table;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      table.comments.push_back(line.substr(start));
      continue;
    }
    if (!saw_header) {
      table.header = split_csv_line(line);
      saw_header = true;
    } else {
      table.rows.push_back(split_csv_line(line));
    }
  }
  return table;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_line) {
  out_ = std::fopen(path.c_str(), "wb");
  if (!out_) fail(errc::io_error, "cannot write " + path);
  const std::string comment = csv_comment(config_line);
  std::fprintf(out_, "# %s\n", comment.c_str());
}

CsvWriter::~CsvWriter() {
  if (out_) std::fclose(out_);
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    std::fprintf(out_, "%s%s", i ? "," : "", cells[i].c_str());
  std::fputc('\n', out_);
}

std::string csv_comment(const std::string& config) {
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(hash_string(config)));
  std::string out = "{\"tool\":\"laststep\",\"version\":\"";
  out += kVersion;
  out += "\",\"config_hash\":\"";
  out += hash;
  out += "\",\"config\":\"";
  for (char c : config) {  // escape for the JSON string
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  out += "\"}";
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail(errc::bad_config, "config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << content;
}

std::map<std::string, std::string> parse_kv_list(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = trim(text.substr(pos, end - pos));
    if (!item.empty()) {
      std::size_t eq = item.find('=');
      if (eq == std::string::npos) fail(errc::bad_config, "expected key=value in '" + item + "'");
      kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    pos = end + 1;
  }
  return kv;
}

}  // namespace laststep
