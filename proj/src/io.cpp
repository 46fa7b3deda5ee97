#include "cgeom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace cgeom {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json chart_header(const Chart& c) {
  json j;
  j["kind"] = to_string(c.kind());
  j["dimension"] = c.dim();
  j["r_in"] = c.r_in();
  j["r_out"] = c.r_out();
  j["resolution"] = c.res();
  j["radial_rule"] = c.rule() == RadialRule::gauss ? "gauss" : "trapezoid";
  j["nodes"] = c.num_nodes();
  return j;
}

std::string field_csv(const GridField& f, const std::vector<std::string>& names) {
  static const char* polar[] = {"r", "theta"};
  static const char* radial[] = {"r", "eta", "xi1", "xi2"};
  std::ostringstream os;
  const Chart& c = f.chart;
  for (int a = 0; a < c.num_axes(); ++a) {
    if (c.kind() == ChartKind::polar_disk)
      os << polar[a];
    else if (c.kind() == ChartKind::radial_annulus4)
      os << radial[a];
    else
      os << "x" << a;
    os << ",";
  }
  for (int k = 0; k < f.components(); ++k) {
    if (k < static_cast<int>(names.size()))
      os << names[k];
    else
      os << "c" << k;
    os << (k + 1 < f.components() ? "," : "\n");
  }
  for (int n = 0; n < f.num_nodes(); ++n) {
    for (double x : c.coords(n)) os << fmt(x) << ",";
    for (int k = 0; k < f.components(); ++k) os << fmt(f(n, k)) << (k + 1 < f.components() ? "," : "\n");
  }
  return os.str();
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& r : rows)
    for (size_t i = 0; i < r.size(); ++i) os << fmt(r[i]) << (i + 1 < r.size() ? "," : "\n");
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace cgeom
