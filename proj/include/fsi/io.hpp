#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsi/operators.hpp"

namespace fsi {

/// Coordinate text format: "rows cols nnz", then one "i j value" line per
/// stored entry, 0-based, values with 17 significant digits.
void write_coordinate(std::ostream& out, const SparseMatrix& m);
/// Dense variant; exact zeros are not stored.
void write_coordinate(std::ostream& out, const MatrixXd& m);
SparseMatrix read_coordinate(std::istream& in);

std::string sha256_hex(const std::filesystem::path& file);

/// Single writer for one run directory. Every file goes through `write` and
/// ends up in manifest.json with its size and SHA-256.
class OutputWriter {
 public:
  /// Creates the directory; failure is a ConfigError naming output.directory.
  explicit OutputWriter(std::filesystem::path dir);

  const std::filesystem::path& directory() const { return dir_; }
  void write(const std::string& name, const std::function<void(std::ostream&)>& fill);
  void write_json(const std::string& name, const nlohmann::json& doc);
  const std::vector<std::string>& files() const { return files_; }

  /// Writes manifest.json: `base` plus a "files" array of {name, bytes, sha256}.
  void finish(nlohmann::json base);

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace fsi
