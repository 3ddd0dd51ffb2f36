#include "fsi/io.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

void write_entries(std::ostream& out, Index rows, Index cols,
                   const std::vector<Eigen::Triplet<double>>& entries) {
  out << rows << ' ' << cols << ' ' << entries.size() << '\n';
  out << std::setprecision(17);
  for (const auto& t : entries) out << t.row() << ' ' << t.col() << ' ' << t.value() << '\n';
  if (!out) throw ConfigError("matrix dump: write failed");
}

}  // namespace

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  write_entries(out, m.rows(), m.cols(), entries);
}

void write_coordinate(std::ostream& out, const MatrixXd& m) {
  std::vector<Eigen::Triplet<double>> entries;
  for (Index col = 0; col < m.cols(); ++col)
    for (Index row = 0; row < m.rows(); ++row)
      if (m(row, col) != 0.0) entries.emplace_back(row, col, m(row, col));
  write_entries(out, m.rows(), m.cols(), entries);
}

SparseMatrix read_coordinate(std::istream& in) {
  long long rows = -1, cols = -1, nnz = -1;
  if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw ConfigError("matrix file: bad header, expected 'rows cols nnz'");
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw ConfigError("matrix file: truncated at entry " + std::to_string(k));
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ConfigError("matrix file: entry " + std::to_string(k) + " out of range");
    entries.emplace_back(i, j, v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + file.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return hex.str();
}

OutputWriter::OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw ConfigError("output.directory: cannot create '" + dir_.string() + "'" +
                      (ec ? ": " + ec.message() : std::string()));
  const auto probe = dir_ / ".write_probe";
  {
    std::ofstream test(probe);
    if (!test) throw ConfigError("output.directory: '" + dir_.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void OutputWriter::write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
  const auto path = dir_ / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("output.directory: cannot write '" + path.string() + "'");
  fill(out);
  out.close();
  if (!out) throw ConfigError("output.directory: write to '" + path.string() + "' failed");
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputWriter::write_json(const std::string& name, const nlohmann::json& doc) {
  write(name, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

void OutputWriter::finish(nlohmann::json base) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& name : files_) {
    const auto path = dir_ / name;
    list.push_back({{"name", name},
                    {"bytes", std::filesystem::file_size(path)},
                    {"sha256", sha256_hex(path)}});
  }
  base["files"] = list;
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path);
  out << base.dump(2) << '\n';
  if (!out) throw ConfigError("output.directory: cannot write manifest '" + path.string() + "'");
}

}  // namespace fsi
