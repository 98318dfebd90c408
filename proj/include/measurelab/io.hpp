#pragma once

// Output formats shared by the command-line tool and the acceptance suite.
//
// CSV: header line first, then `#` comment lines (config echo, seed, derived
// quantities), then data rows. Reals are printed with 17 significant digits so
// a file round-trips bit-exactly.
//
// Structured files are JSON. Rationals are strings "p/q", complex numbers are
// strings "re,im":
//   frequency set   {"basis": [names], "vectors": [[q, ...], ...]}
//   CylFunction     {"basis": [names], "gamma": [[q, ...], ...],
//                    "terms": [{"m": [ints], "c": "re,im"}, ...]}
//   GlobalTrigPoly  {"basis": [names], "terms": [{"k": [q, ...], "c": "re,im"}, ...]}

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "measurelab/bohr_measure.hpp"
#include "measurelab/diagnostics.hpp"

namespace mlab::io {

/// %.17g.
std::string format_double(double v);
std::string format_complex(Complex c);
/// "re,im" or a bare real; throws PARSE_ERROR.
Complex parse_complex(const std::string& text);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& columns);
  void comment(const std::string& line);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Environment variable naming the directory for relative output paths.
inline constexpr const char* kOutDirEnv = "MEASURELAB_OUT_DIR";

/// Absolute or explicitly relative (./x) paths are kept; bare relative paths
/// are placed under $MEASURELAB_OUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path);

/// Writes to a sibling temporary file and renames it over the target; throws IO_ERROR.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// "<dir>/<stem>.summary.csv" next to a scan file.
std::filesystem::path summary_path(const std::filesystem::path& scan_path);

/// Scan rows (param,size,statistic,stderr) and summary rows
/// (param,slope,slope_err,verdict). `comments` go after each header.
std::string scan_csv(const ScanResult& scan, const std::vector<std::string>& comments);
std::string summary_csv(const ScanResult& scan, const std::vector<std::string>& comments);

nlohmann::json read_json(const std::filesystem::path& path);

BasisPtr parse_basis(const nlohmann::json& doc);
std::vector<FrequencyVector> parse_vectors(const BasisPtr& basis, const nlohmann::json& rows);
CylFunction parse_cyl_function(const nlohmann::json& doc);
GlobalTrigPoly parse_trig_poly(const nlohmann::json& doc);

nlohmann::json to_json(const FrequencyVector& k);
nlohmann::json to_json(const CylFunction& f);
nlohmann::json to_json(const GlobalTrigPoly& psi);

}  // namespace mlab::io
