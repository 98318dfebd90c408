#include "measurelab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <unistd.h>

namespace mlab::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex c) { return format_double(c.real()) + "," + format_double(c.imag()); }

Complex parse_complex(const std::string& text) {
  static const std::regex number(R"(\s*([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?)\s*)");
  const auto comma = text.find(',');
  const std::string re = text.substr(0, comma);
  const std::string im = comma == std::string::npos ? "0" : text.substr(comma + 1);
  if (!std::regex_match(re, number) || !std::regex_match(im, number))
    throw Error(Errc::Parse, "not a complex number \"re,im\": '" + text + "'");
  return {std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)};
}

CsvWriter::CsvWriter(const std::vector<std::string>& columns) : columns_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
  text_ += '\n';
}

void CsvWriter::comment(const std::string& line) { text_ += "# " + line + '\n'; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error(Errc::SizeMismatch, "CSV row width");
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v));
  row(s);
}

fs::path resolve_output(const std::string& path) {
  if (path.empty()) throw Error(Errc::Io, "empty output path");
  fs::path p(path);
  if (p.is_absolute() || path.rfind("./", 0) == 0 || path.rfind("../", 0) == 0) return p;
  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') return fs::path(dir) / p;
  return p;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(Errc::Io, "output directory does not exist: " + dir.string());
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(Errc::Io, "write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename onto " + path.string());
  }
}

fs::path summary_path(const fs::path& scan_path) {
  return scan_path.parent_path() / (scan_path.stem().string() + ".summary.csv");
}

std::string scan_csv(const ScanResult& scan, const std::vector<std::string>& comments) {
  CsvWriter csv({"param", "size", "statistic", "stderr"});
  for (const auto& c : comments) csv.comment(c);
  csv.comment("axis=" + scan.axis);
  for (const auto& mc : scan.mc)
    csv.comment("mc param=" + format_double(mc.param) + " size=" + format_double(mc.size) +
                " exact=" + format_double(mc.exact) + " estimate=" + format_double(mc.estimate.mean) +
                " stderr=" + format_double(mc.estimate.std_error) + " within_3se=" + (mc.within() ? "1" : "0"));
  for (const auto& p : scan.points) csv.row({p.param, p.size, p.statistic, p.std_error});
  return csv.str();
}

std::string summary_csv(const ScanResult& scan, const std::vector<std::string>& comments) {
  CsvWriter csv({"param", "slope", "slope_err", "verdict"});
  for (const auto& c : comments) csv.comment(c);
  csv.comment(scan.threshold ? "threshold=" + format_double(*scan.threshold) : "threshold=none");
  for (const auto& s : scan.summary)
    csv.comment("rate param=" + format_double(s.param) + " rate=" + (s.rate ? format_double(*s.rate) : "none"));
  for (const auto& s : scan.summary)
    csv.row({format_double(s.param), format_double(s.slope), format_double(s.slope_err), std::string(to_string(s.verdict))});
  return csv.str();
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, path.string() + ": " + e.what());
  }
}

namespace {

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw Error(Errc::Parse, std::string("missing key '") + key + "'");
  return doc.at(key);
}

std::string as_string(const json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(Errc::Parse, std::string(what) + " must be a string");
}

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(Errc::Parse, "unknown key '" + key + "'");
  }
}

}  // namespace

BasisPtr parse_basis(const json& doc) {
  const auto& names = field(doc, "basis");
  if (!names.is_array()) throw Error(Errc::Parse, "'basis' must be an array of names");
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(as_string(n, "symbol name"));
  return SymbolBasis::make(std::move(out));
}

std::vector<FrequencyVector> parse_vectors(const BasisPtr& basis, const json& rows) {
  if (!rows.is_array()) throw Error(Errc::Parse, "vector list must be an array");
  std::vector<FrequencyVector> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw Error(Errc::Parse, "each vector must be an array of \"p/q\" strings");
    std::vector<std::string> coords;
    for (const auto& c : row) coords.push_back(as_string(c, "coordinate"));
    out.push_back(FrequencyVector::parse(basis, coords));
  }
  return out;
}

CylFunction parse_cyl_function(const json& doc) {
  reject_unknown(doc, {"basis", "gamma", "terms"});
  const auto basis = parse_basis(doc);
  auto gamma = IndependentSet::make(parse_vectors(basis, field(doc, "gamma")));
  CylFunction f(gamma);
  const auto& terms = field(doc, "terms");
  if (!terms.is_array()) throw Error(Errc::Parse, "'terms' must be an array");
  for (const auto& t : terms) {
    reject_unknown(t, {"m", "c"});
    const auto& m = field(t, "m");
    if (!m.is_array()) throw Error(Errc::Parse, "'m' must be an integer array");
    IntVector idx;
    for (const auto& x : m) {
      if (!x.is_number_integer()) throw Error(Errc::Parse, "'m' entries must be integers");
      idx.push_back(x.get<std::int64_t>());
    }
    f.add(idx, parse_complex(as_string(field(t, "c"), "coefficient")));
  }
  return f;
}

GlobalTrigPoly parse_trig_poly(const json& doc) {
  reject_unknown(doc, {"basis", "terms"});
  const auto basis = parse_basis(doc);
  GlobalTrigPoly psi(basis);
  const auto& terms = field(doc, "terms");
  if (!terms.is_array()) throw Error(Errc::Parse, "'terms' must be an array");
  std::set<FrequencyVector> seen;
  for (const auto& t : terms) {
    reject_unknown(t, {"k", "c"});
    const auto k = parse_vectors(basis, json::array({field(t, "k")}));
    if (!seen.insert(k.front()).second) throw Error(Errc::Parse, "repeated frequency in 'terms'");
    psi.add(k.front(), parse_complex(as_string(field(t, "c"), "coefficient")));
  }
  return psi;
}

json to_json(const FrequencyVector& k) { return k.to_strings(); }

json to_json(const CylFunction& f) {
  json doc;
  doc["basis"] = f.gamma().basis()->names();
  doc["gamma"] = json::array();
  for (const auto& g : f.gamma().generators()) doc["gamma"].push_back(to_json(g));
  doc["terms"] = json::array();
  for (const auto& [m, c] : f.coeffs()) doc["terms"].push_back({{"m", m}, {"c", format_complex(c)}});
  return doc;
}

json to_json(const GlobalTrigPoly& psi) {
  json doc;
  doc["basis"] = psi.basis()->names();
  doc["terms"] = json::array();
  for (const auto& [k, c] : psi.terms()) doc["terms"].push_back({{"k", to_json(k)}, {"c", format_complex(c)}});
  return doc;
}

}  // namespace mlab::io
